//! Command-line front-end: evaluate delay-advection solutions, emit
//! figure datasets as CSV, run verification suites.
//!
//! Exit codes: 0 success, 1 tolerance failure or I/O error, 2 malformed
//! flags, 3 numeric overflow (the failing series term index is printed).

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use da::{
    compare, eval_cosh_closed, eval_fractional, eval_gaussian_hermite, eval_grid, eval_integer,
    eval_separable, linspace, oracle_solve, residual_fractional, residual_integer, DelayParams,
    Error, GridSpec, InitialCondition, OracleConfig, SolutionField, TimeProfile,
};
use delay_advection as da;

/// Inclusive sample range `MIN:MAX:N`.
#[derive(Debug, Clone, Copy)]
struct Range {
    min: f64,
    max: f64,
    n: usize,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected MIN:MAX:N, got '{s}'"));
        }
        let min: f64 = parts[0].parse().map_err(|_| format!("bad MIN in '{s}'"))?;
        let max: f64 = parts[1].parse().map_err(|_| format!("bad MAX in '{s}'"))?;
        let n: usize = parts[2].parse().map_err(|_| format!("bad N in '{s}'"))?;
        if !min.is_finite() || !max.is_finite() || min >= max || n < 2 {
            return Err(format!("range '{s}' needs MIN < MAX and N >= 2"));
        }
        Ok(Range { min, max, n })
    }
}

/// `RE,IM` pair for a complex scale factor.
#[derive(Debug, Clone, Copy)]
struct ComplexArg(Complex64);

impl FromStr for ComplexArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (re, im) = s
            .split_once(',')
            .ok_or_else(|| format!("expected RE,IM, got '{s}'"))?;
        let re: f64 = re.parse().map_err(|_| format!("bad RE in '{s}'"))?;
        let im: f64 = im.parse().map_err(|_| format!("bad IM in '{s}'"))?;
        Ok(ComplexArg(Complex64::new(re, im)))
    }
}

#[derive(Parser)]
#[command(
    name = "delay-advection",
    about = "Exact solutions of time-delay advection equations: delay special functions, \
             grid evaluation, figure datasets, verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the delay exponential dexp(t; tau), or dexp(lambda t; lambda tau) with --lambda
    Dexp {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long)]
        tau: f64,
        /// Complex scale factor RE,IM
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<ComplexArg>,
    },
    /// Evaluate the delay fractional Mittag-Leffler function dE_alpha^-(-t; -tau)
    DelayMl {
        #[arg(long)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long)]
        tau: f64,
    },
    /// Evaluate a solution on a rectangular grid and write CSV columns x,t,u
    Solve {
        /// Initial condition: exp:<c>, cosh, sinh, gaussian, sin:<k>, cos:<k>, poly:<c0,c1,...>
        #[arg(long)]
        ic: String,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        tau: f64,
        /// Fractional order in (0, 1]; 1 selects the integer-order equation
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Time profile for a separable initial condition f(x) g(t): const:<c>, exp:<r>, poly:<...>
        #[arg(long)]
        g: Option<String>,
        /// Spatial range MIN:MAX:N
        #[arg(long, allow_hyphen_values = true)]
        x: Range,
        /// Time range MIN:MAX:N
        #[arg(long, allow_hyphen_values = true)]
        t: Range,
        #[arg(long)]
        out: PathBuf,
        /// Gauss-Legendre points per quadrature panel for the separable integral
        #[arg(long, default_value_t = 16)]
        quad_points: usize,
    },
    /// Emit the CSV dataset of one of the three standard figures
    Figure {
        #[command(subcommand)]
        which: FigureCmd,
    },
    /// Run a verification suite; exits 0 iff the check passes its tolerance
    Verify {
        #[command(subcommand)]
        which: VerifyCmd,
    },
    /// Error norms between two solve-produced CSV files on the same grid
    Compare {
        #[arg(long)]
        exact: PathBuf,
        #[arg(long)]
        oracle: PathBuf,
    },
}

#[derive(Subcommand)]
enum FigureCmd {
    /// cosh initial condition, x=5, a=1, tau in {0, 0.30, 0.32, 0.34}, t in [-1, 14]
    Fig1 {
        #[arg(long)]
        out: PathBuf,
    },
    /// cosh initial condition, x=5, a=1, tau in {0, 3.0, 3.2, 3.4}, t in [-50, 165]
    Fig2 {
        #[arg(long)]
        out: PathBuf,
    },
    /// Gaussian initial condition, t=4, a=2, tau in {0, 0.1}, x in [-10, 30]
    Fig3 {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ResidualArgs {
    /// Initial condition name
    #[arg(long, default_value = "cosh")]
    ic: String,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long)]
    tau: f64,
    /// Spatial range MIN:MAX:N
    #[arg(long, allow_hyphen_values = true)]
    x: Range,
    /// Time range MIN:MAX:N (must start above tau + exclusion)
    #[arg(long, allow_hyphen_values = true)]
    t: Range,
    /// Breakpoint exclusion radius (time units)
    #[arg(long, default_value_t = 1e-2)]
    exclusion: f64,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Finite-difference residual of the integer-order equation
    ResidualInteger {
        #[command(flatten)]
        common: ResidualArgs,
        #[arg(long, default_value_t = 1e-4)]
        fd_step: f64,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
    /// L1-Caputo residual of the fractional-order equation
    ResidualFractional {
        #[command(flatten)]
        common: ResidualArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 8000)]
        l1_steps: usize,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
    },
    /// Method-of-lines oracle against the exact series
    Oracle {
        #[arg(long, default_value = "gaussian")]
        ic: String,
        #[arg(long, default_value_t = 2.0)]
        a: f64,
        #[arg(long, default_value_t = 0.1)]
        tau: f64,
        /// Periodic half-width L of the domain [-L, L)
        #[arg(long, default_value_t = 40.0)]
        l: f64,
        #[arg(long, default_value_t = 2048)]
        nx: usize,
        /// Steps per delay (time step h = tau / m)
        #[arg(long, default_value_t = 20)]
        m: usize,
        #[arg(long, default_value_t = 4.0)]
        t_final: f64,
        /// Comparison window MIN:MAX over x (the N field is ignored)
        #[arg(long, default_value = "-10:30:2", allow_hyphen_values = true)]
        x_window: Range,
        #[arg(long)]
        g: Option<String>,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
}

fn print_value(v: Complex64) {
    if v.im == 0.0 {
        println!("{}", v.re);
    } else {
        println!("{},{}", v.re, v.im);
    }
}

/// Evaluator selected by (alpha, g); used by `solve`.
fn build_evaluator<'a>(
    ic: &'a InitialCondition,
    g: Option<&'a TimeProfile>,
    p: &'a DelayParams,
    quad_points: usize,
) -> impl Fn(f64, f64) -> da::Result<f64> + Sync + 'a {
    move |x, t| match g {
        Some(g) => eval_separable(ic, g, p, x, t, quad_points),
        None if p.alpha == 1.0 => eval_integer(ic, p, x, t),
        None => eval_fractional(ic, p, x, t),
    }
}

fn write_columns(
    path: &PathBuf,
    header: &str,
    abscissa: &[f64],
    columns: &[Vec<f64>],
) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{header}")?;
    for (i, &s) in abscissa.iter().enumerate() {
        write!(w, "{:.16e}", s)?;
        for col in columns {
            write!(w, ",{:.16e}", col[i])?;
        }
        writeln!(w)?;
    }
    w.flush()
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Dexp { t, tau, lambda } => {
            let v = match lambda {
                Some(ComplexArg(lam)) => da::dexp_scaled(lam, t, tau)?,
                None => Complex64::new(da::dexp(t, tau)?, 0.0),
            };
            print_value(v);
            Ok(())
        }
        Cmd::DelayMl { alpha, t, tau } => {
            println!("{}", da::delay_ml(alpha, t, tau)?);
            Ok(())
        }
        Cmd::Solve {
            ic,
            a,
            tau,
            alpha,
            g,
            x,
            t,
            out,
            quad_points,
        } => {
            let ic: InitialCondition = ic.parse()?;
            let g: Option<TimeProfile> = g.map(|s| s.parse()).transpose()?;
            let p = DelayParams::new(a, tau, alpha)?;
            let grid = GridSpec::new(x.min, x.max, x.n, t.min, t.max, t.n)?;
            let field = eval_grid(build_evaluator(&ic, g.as_ref(), &p, quad_points), &grid)?;
            let mut w = BufWriter::new(File::create(&out)?);
            field.write_csv(&mut w)?;
            w.flush()?;
            println!("wrote {} points to {}", field.values.len(), out.display());
            Ok(())
        }
        Cmd::Figure { which } => run_figure(which),
        Cmd::Verify { which } => run_verify(which),
        Cmd::Compare { exact, oracle } => {
            let a = SolutionField::read_csv(BufReader::new(File::open(&exact)?))?;
            let b = SolutionField::read_csv(BufReader::new(File::open(&oracle)?))?;
            let rep = compare(&a, &b)?;
            print!("{}", rep.to_kv_block());
            Ok(())
        }
    }
}

fn run_figure(which: FigureCmd) -> Result<(), CliError> {
    match which {
        FigureCmd::Fig1 { out } => {
            let ts = linspace(-1.0, 14.0, 1501);
            let taus = [0.30, 0.32, 0.34];
            let mut cols = vec![ts.iter().map(|&t| (5.0 - t).cosh()).collect::<Vec<_>>()];
            for &tau in &taus {
                let p = DelayParams::integer(1.0, tau)?;
                let col: Result<Vec<f64>, Error> =
                    ts.iter().map(|&t| eval_cosh_closed(&p, 5.0, t)).collect();
                cols.push(col?);
            }
            std::fs::create_dir_all(&out)?;
            let path = out.join("fig1.csv");
            write_columns(
                &path,
                "t,u_tau_0,u_tau_0.30,u_tau_0.32,u_tau_0.34",
                &ts,
                &cols,
            )?;
            println!("wrote {}", path.display());
            Ok(())
        }
        FigureCmd::Fig2 { out } => {
            let ts = linspace(-50.0, 165.0, 2151);
            let taus = [3.0, 3.2, 3.4];
            let mut cols = vec![ts.iter().map(|&t| (5.0 - t).cosh()).collect::<Vec<_>>()];
            for &tau in &taus {
                let p = DelayParams::integer(1.0, tau)?;
                let col: Result<Vec<f64>, Error> =
                    ts.iter().map(|&t| eval_cosh_closed(&p, 5.0, t)).collect();
                cols.push(col?);
            }
            std::fs::create_dir_all(&out)?;
            let path = out.join("fig2.csv");
            write_columns(&path, "t,u_tau_0,u_tau_3.0,u_tau_3.2,u_tau_3.4", &ts, &cols)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        FigureCmd::Fig3 { out } => {
            let xs = linspace(-10.0, 30.0, 2001);
            let classical: Vec<f64> = xs.iter().map(|&x| (-(x - 8.0f64).powi(2)).exp()).collect();
            let p = DelayParams::integer(2.0, 0.1)?;
            let delayed: Result<Vec<f64>, Error> = xs
                .iter()
                .map(|&x| eval_gaussian_hermite(&p, x, 4.0))
                .collect();
            std::fs::create_dir_all(&out)?;
            let path = out.join("fig3.csv");
            write_columns(&path, "x,u_tau_0,u_tau_0.1", &xs, &[classical, delayed?])?;
            println!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn run_verify(which: VerifyCmd) -> Result<(), CliError> {
    match which {
        VerifyCmd::ResidualInteger {
            common,
            fd_step,
            tol,
        } => {
            let ic: InitialCondition = common.ic.parse()?;
            let p = DelayParams::integer(common.a, common.tau)?;
            let grid = GridSpec::new(
                common.x.min,
                common.x.max,
                common.x.n,
                common.t.min,
                common.t.max,
                common.t.n,
            )?;
            let rep = residual_integer(
                |x, t| eval_integer(&ic, &p, x, t),
                &p,
                &grid,
                fd_step,
                common.exclusion,
            )?;
            print!("{}", rep.to_kv_block());
            gate(rep.max_abs_residual, tol)
        }
        VerifyCmd::ResidualFractional {
            common,
            alpha,
            l1_steps,
            tol,
        } => {
            let ic: InitialCondition = common.ic.parse()?;
            let p = DelayParams::new(common.a, common.tau, alpha)?;
            let grid = GridSpec::new(
                common.x.min,
                common.x.max,
                common.x.n,
                common.t.min,
                common.t.max,
                common.t.n,
            )?;
            let rep = residual_fractional(
                |x, t| eval_fractional(&ic, &p, x, t),
                &p,
                &grid,
                l1_steps,
                common.exclusion,
            )?;
            print!("{}", rep.to_kv_block());
            gate(rep.max_abs_residual, tol)
        }
        VerifyCmd::Oracle {
            ic,
            a,
            tau,
            l,
            nx,
            m,
            t_final,
            x_window,
            g,
            tol,
        } => {
            let ic: InitialCondition = ic.parse()?;
            let g: Option<TimeProfile> = g.map(|s| s.parse()).transpose()?;
            let p = DelayParams::integer(a, tau)?;
            let cfg = OracleConfig {
                half_width: l,
                nx,
                steps_per_delay: m,
                final_time: t_final,
                history: ic.clone(),
                profile: g.clone(),
            };
            let field = oracle_solve(&cfg, &p)?;
            let last = field.ts.len() - 1;
            let mut sup = 0.0f64;
            let mut sq = 0.0f64;
            let mut count = 0usize;
            for (ix, &x) in field.xs.iter().enumerate() {
                if x < x_window.min || x > x_window.max {
                    continue;
                }
                let want = match &g {
                    Some(g) => eval_separable(&ic, g, &p, x, t_final, 16)?,
                    None => eval_integer(&ic, &p, x, t_final)?,
                };
                let d = (field.get(last, ix) - want).abs();
                sup = sup.max(d);
                sq += d * d;
                count += 1;
            }
            println!("sup_error={sup:e}");
            println!("l2_error={:e}", (sq / count.max(1) as f64).sqrt());
            println!("points_checked={count}");
            gate(sup, tol)
        }
    }
}

fn gate(measured: f64, tol: f64) -> Result<(), CliError> {
    if measured <= tol {
        println!("status=pass");
        Ok(())
    } else {
        println!("status=fail tolerance={tol:e}");
        Err(CliError::Tolerance)
    }
}

enum CliError {
    Tolerance,
    Math(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Math(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Tolerance) => ExitCode::from(1),
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Math(e)) => {
            eprintln!("error: {e}");
            if e.is_overflow() {
                if let Some(n) = e.term_index() {
                    eprintln!("failing term index: {n}");
                }
                ExitCode::from(3)
            } else {
                // invalid parameter combinations count as usage errors
                ExitCode::from(2)
            }
        }
    }
}
