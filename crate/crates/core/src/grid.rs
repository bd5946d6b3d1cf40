//! Rectangular evaluation grids and solution fields.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Rectangular `(x, t)` grid: inclusive endpoints, `nx >= 2`, `nt >= 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub nt: usize,
}

impl GridSpec {
    pub fn new(
        x_min: f64,
        x_max: f64,
        nx: usize,
        t_min: f64,
        t_max: f64,
        nt: usize,
    ) -> Result<Self> {
        let bounds_ok = x_min.is_finite()
            && x_max.is_finite()
            && x_min < x_max
            && t_min.is_finite()
            && t_max.is_finite()
            && t_min < t_max;
        if !bounds_ok || nx < 2 || nt < 2 {
            return Err(Error::Config {
                message: format!(
                    "invalid grid: x [{x_min}, {x_max}] nx={nx}, t [{t_min}, {t_max}] nt={nt}"
                ),
            });
        }
        Ok(Self {
            x_min,
            x_max,
            nx,
            t_min,
            t_max,
            nt,
        })
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn ts(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.nt)
    }
}

/// `n` equally spaced inclusive samples of `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + i as f64 * step })
        .collect()
}

/// Solution values on a rectangular grid, row-major over t then x:
/// `values[it * nx + ix]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub values: Vec<f64>,
}

impl SolutionField {
    pub fn get(&self, it: usize, ix: usize) -> f64 {
        self.values[it * self.xs.len() + ix]
    }

    /// Row at a fixed time index.
    pub fn row(&self, it: usize) -> &[f64] {
        let nx = self.xs.len();
        &self.values[it * nx..(it + 1) * nx]
    }

    /// CSV with header `x,t,u`, one line per point, t-major, 17
    /// significant digits for lossless round-trip.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,t,u")?;
        for (it, &t) in self.ts.iter().enumerate() {
            for (ix, &x) in self.xs.iter().enumerate() {
                writeln!(w, "{:.16e},{:.16e},{:.16e}", x, t, self.get(it, ix))?;
            }
        }
        Ok(())
    }

    /// Parse a CSV produced by [`SolutionField::write_csv`].
    pub fn read_csv<R: std::io::BufRead>(r: R) -> Result<Self> {
        let bad = |line: usize, what: &str| Error::Config {
            message: format!("CSV line {line}: {what}"),
        };
        let mut xs: Vec<f64> = Vec::new();
        let mut ts: Vec<f64> = Vec::new();
        let mut values = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| bad(i + 1, &e.to_string()))?;
            if i == 0 {
                if line.trim() != "x,t,u" {
                    return Err(bad(1, "expected header 'x,t,u'"));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let mut field = || -> Result<f64> {
                parts
                    .next()
                    .ok_or_else(|| bad(i + 1, "missing field"))?
                    .trim()
                    .parse()
                    .map_err(|_| bad(i + 1, "malformed number"))
            };
            let (x, t, u) = (field()?, field()?, field()?);
            if ts.last() != Some(&t) {
                ts.push(t);
            }
            if ts.len() == 1 {
                xs.push(x);
            }
            values.push(u);
        }
        if values.len() != xs.len() * ts.len() {
            return Err(Error::Config {
                message: "CSV is not a complete rectangular grid".into(),
            });
        }
        Ok(SolutionField { xs, ts, values })
    }
}

/// Pointwise evaluation over a grid, parallel across points with
/// deterministic output ordering. Errors are annotated with the failing
/// grid indices.
pub fn eval_grid<F>(f: F, grid: &GridSpec) -> Result<SolutionField>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    let xs = grid.xs();
    let ts = grid.ts();
    let values: Result<Vec<f64>> = (0..xs.len() * ts.len())
        .into_par_iter()
        .map(|idx| {
            let it = idx / xs.len();
            let ix = idx % xs.len();
            f(xs[ix], ts[it]).map_err(|e| Error::AtGridPoint {
                ix,
                it,
                source: Box::new(e),
            })
        })
        .collect();
    Ok(SolutionField {
        xs,
        ts,
        values: values?,
    })
}
