//! Initial spatial profiles `f(x)` with exact nth derivatives, and time
//! profiles `g(t)` with derivatives, for the separable initial condition
//! `u(x, t) = f(x) g(t)` on the strip `[0, tau]`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// ln of the Cramer constant bounding `|H_n(x)| <= K 2^{n/2} sqrt(n!) e^{x^2/2}`.
/// 1.09 is a safe rounding-up of the sharp constant.
const LN_CRAMER: f64 = 0.086_177_696_241_052_92; // ln(1.09)

/// Catalogue of initial spatial profiles. Every variant supplies the value
/// and the exact nth derivative; numerical differentiation is never used
/// because the delay series needs arbitrary-order derivatives.
#[derive(Clone)]
pub enum InitialCondition {
    /// `e^{c x}`
    Exp(f64),
    Cosh,
    Sinh,
    /// `e^{-x^2}`
    Gaussian,
    /// `sin(k x)`
    Sin(f64),
    /// `cos(k x)`
    Cos(f64),
    /// `c_0 + c_1 x + c_2 x^2 + ...`
    Polynomial(Vec<f64>),
    /// Exact derivative provider: `(n, x) -> d^n f / dx^n`.
    Custom(Arc<dyn Fn(u32, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCondition::Exp(c) => write!(f, "Exp({c})"),
            InitialCondition::Cosh => write!(f, "Cosh"),
            InitialCondition::Sinh => write!(f, "Sinh"),
            InitialCondition::Gaussian => write!(f, "Gaussian"),
            InitialCondition::Sin(k) => write!(f, "Sin({k})"),
            InitialCondition::Cos(k) => write!(f, "Cos({k})"),
            InitialCondition::Polynomial(c) => write!(f, "Polynomial({c:?})"),
            InitialCondition::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Falling factorial `j (j-1) ... (j-n+1)` as f64.
fn falling_factorial(j: usize, n: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..n {
        acc *= (j - i) as f64;
    }
    acc
}

fn poly_derivative(coeffs: &[f64], n: u32, x: f64, absolute: bool) -> f64 {
    let n = n as usize;
    let mut acc = 0.0;
    // sum_{j >= n} c_j * j!/(j-n)! * x^{j-n}, highest power first (Horner)
    for j in (n..coeffs.len()).rev() {
        let c = if absolute { coeffs[j].abs() } else { coeffs[j] };
        let xw = if absolute { x.abs() } else { x };
        acc = acc * xw + c * falling_factorial(j, n);
    }
    acc
}

impl InitialCondition {
    /// `f(x)`.
    pub fn value(&self, x: f64) -> f64 {
        match self {
            InitialCondition::Exp(c) => (c * x).exp(),
            InitialCondition::Cosh => x.cosh(),
            InitialCondition::Sinh => x.sinh(),
            InitialCondition::Gaussian => (-x * x).exp(),
            InitialCondition::Sin(k) => (k * x).sin(),
            InitialCondition::Cos(k) => (k * x).cos(),
            InitialCondition::Polynomial(c) => poly_derivative(c, 0, x, false),
            InitialCondition::Custom(f) => f(0, x),
        }
    }

    /// Exact nth derivative `d^n f / dx^n (x)`.
    pub fn nth_derivative(&self, n: u32, x: f64) -> Result<f64> {
        let mut scan = self.derivative_scan(x);
        for _ in 0..n {
            scan.skip();
        }
        scan.next()
    }

    /// Upper bound on `ln |f^{(n)}(x)|`, used to prove series terms
    /// negligible without evaluating derivatives that overflow f64.
    /// `+inf` means no bound is available (Custom providers).
    pub(crate) fn log_derivative_bound(&self, n: u32, x: f64) -> f64 {
        match self {
            InitialCondition::Exp(c) => {
                if n == 0 {
                    c * x
                } else if *c == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    n as f64 * c.abs().ln() + c * x
                }
            }
            InitialCondition::Cosh | InitialCondition::Sinh => x.abs(),
            InitialCondition::Gaussian => {
                let lg = ln_gamma(n as f64 + 1.0).unwrap_or(f64::INFINITY);
                LN_CRAMER + 0.5 * lg + 0.5 * n as f64 * std::f64::consts::LN_2 - 0.5 * x * x
            }
            InitialCondition::Sin(k) | InitialCondition::Cos(k) => {
                if n == 0 {
                    0.0
                } else if *k == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    n as f64 * k.abs().ln()
                }
            }
            InitialCondition::Polynomial(c) => {
                let v = poly_derivative(c, n, x, true);
                if v == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    v.ln()
                }
            }
            InitialCondition::Custom(_) => f64::INFINITY,
        }
    }

    /// Sequential derivative cursor yielding `f^{(0)}, f^{(1)}, ...` in
    /// O(1) amortized per order.
    pub(crate) fn derivative_scan(&self, x: f64) -> DerivativeScan<'_> {
        let state = match self {
            InitialCondition::Exp(c) => ScanState::Exp { cur: (c * x).exp() },
            InitialCondition::Gaussian => ScanState::Gaussian {
                prev: f64::NAN,
                cur: (-x * x).exp(),
            },
            _ => ScanState::Stateless,
        };
        DerivativeScan {
            ic: self,
            x,
            n: 0,
            state,
        }
    }
}

enum ScanState {
    Stateless,
    Exp { cur: f64 },
    Gaussian { prev: f64, cur: f64 },
}

/// See [`InitialCondition::derivative_scan`].
pub(crate) struct DerivativeScan<'a> {
    ic: &'a InitialCondition,
    x: f64,
    n: u32,
    state: ScanState,
}

impl DerivativeScan<'_> {
    pub(crate) fn bound(&self) -> f64 {
        self.ic.log_derivative_bound(self.n, self.x)
    }

    fn current(&self) -> f64 {
        let (n, x) = (self.n, self.x);
        match (self.ic, &self.state) {
            (_, ScanState::Exp { cur }) => *cur,
            (_, ScanState::Gaussian { cur, .. }) => *cur,
            (InitialCondition::Cosh, _) => {
                if n % 2 == 0 {
                    x.cosh()
                } else {
                    x.sinh()
                }
            }
            (InitialCondition::Sinh, _) => {
                if n % 2 == 0 {
                    x.sinh()
                } else {
                    x.cosh()
                }
            }
            (InitialCondition::Sin(k), _) => {
                let w = k.powi(n as i32);
                match n % 4 {
                    0 => w * (k * x).sin(),
                    1 => w * (k * x).cos(),
                    2 => -w * (k * x).sin(),
                    _ => -w * (k * x).cos(),
                }
            }
            (InitialCondition::Cos(k), _) => {
                let w = k.powi(n as i32);
                match n % 4 {
                    0 => w * (k * x).cos(),
                    1 => -w * (k * x).sin(),
                    2 => -w * (k * x).cos(),
                    _ => w * (k * x).sin(),
                }
            }
            (InitialCondition::Polynomial(c), _) => poly_derivative(c, n, x, false),
            (InitialCondition::Custom(f), _) => f(n, x),
            (InitialCondition::Exp(_) | InitialCondition::Gaussian, ScanState::Stateless) => {
                unreachable!("stateful variants carry scan state")
            }
        }
    }

    fn step_state(&mut self) {
        match (&mut self.state, self.ic) {
            (ScanState::Exp { cur }, InitialCondition::Exp(c)) => *cur *= c,
            (ScanState::Gaussian { prev, cur }, _) => {
                // A_{n+1} = -2x A_n - 2n A_{n-1} with A_n = (-1)^n H_n(x) e^{-x^2}
                let next = if self.n == 0 {
                    -2.0 * self.x * *cur
                } else {
                    -2.0 * self.x * *cur - 2.0 * self.n as f64 * *prev
                };
                *prev = *cur;
                *cur = next;
            }
            _ => {}
        }
        self.n += 1;
    }

    /// The derivative at the current order; errors if it left the f64
    /// range. Advances to the next order.
    pub(crate) fn next(&mut self) -> Result<f64> {
        let v = self.current();
        let n = self.n;
        self.step_state();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::TermOverflow { index: n })
        }
    }

    /// Advance without using the value (for terms proven negligible); the
    /// state is allowed to saturate to non-finite values here.
    pub(crate) fn skip(&mut self) {
        self.step_state();
    }
}

impl FromStr for InitialCondition {
    type Err = Error;

    /// CLI names: `exp:<c>`, `cosh`, `sinh`, `gaussian`, `sin:<k>`,
    /// `cos:<k>`, `poly:<c0,c1,...>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |_| Error::Config {
            message: format!("malformed initial condition '{s}'"),
        };
        match s.split_once(':') {
            None => match s {
                "cosh" => Ok(InitialCondition::Cosh),
                "sinh" => Ok(InitialCondition::Sinh),
                "gaussian" => Ok(InitialCondition::Gaussian),
                _ => Err(Error::Config {
                    message: format!("unknown initial condition '{s}'"),
                }),
            },
            Some(("exp", arg)) => Ok(InitialCondition::Exp(arg.parse().map_err(bad)?)),
            Some(("sin", arg)) => Ok(InitialCondition::Sin(arg.parse().map_err(bad)?)),
            Some(("cos", arg)) => Ok(InitialCondition::Cos(arg.parse().map_err(bad)?)),
            Some(("poly", arg)) => {
                let coeffs: std::result::Result<Vec<f64>, _> =
                    arg.split(',').map(str::parse).collect();
                Ok(InitialCondition::Polynomial(coeffs.map_err(bad)?))
            }
            Some(_) => Err(Error::Config {
                message: format!("unknown initial condition '{s}'"),
            }),
        }
    }
}

/// Time profile `g(s)` with derivative, defined on `[0, tau]`.
#[derive(Clone)]
pub enum TimeProfile {
    Constant(f64),
    /// `e^{r s}`
    Exp(f64),
    Polynomial(Vec<f64>),
    Custom {
        value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for TimeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeProfile::Constant(c) => write!(f, "Constant({c})"),
            TimeProfile::Exp(r) => write!(f, "Exp({r})"),
            TimeProfile::Polynomial(c) => write!(f, "Polynomial({c:?})"),
            TimeProfile::Custom { .. } => write!(f, "Custom(..)"),
        }
    }
}

impl TimeProfile {
    pub fn value(&self, s: f64) -> f64 {
        match self {
            TimeProfile::Constant(c) => *c,
            TimeProfile::Exp(r) => (r * s).exp(),
            TimeProfile::Polynomial(c) => poly_derivative(c, 0, s, false),
            TimeProfile::Custom { value, .. } => value(s),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match self {
            TimeProfile::Constant(_) => 0.0,
            TimeProfile::Exp(r) => r * (r * s).exp(),
            TimeProfile::Polynomial(c) => poly_derivative(c, 1, s, false),
            TimeProfile::Custom { derivative, .. } => derivative(s),
        }
    }

    /// True when the derivative vanishes identically, letting the
    /// separable evaluator skip quadrature entirely.
    pub(crate) fn is_constant(&self) -> bool {
        match self {
            TimeProfile::Constant(_) => true,
            TimeProfile::Polynomial(c) => c.iter().skip(1).all(|&v| v == 0.0),
            _ => false,
        }
    }
}

impl FromStr for TimeProfile {
    type Err = Error;

    /// CLI names: `const:<c>`, `exp:<r>`, `poly:<c0,c1,...>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |_| Error::Config {
            message: format!("malformed time profile '{s}'"),
        };
        match s.split_once(':') {
            Some(("const", arg)) => Ok(TimeProfile::Constant(arg.parse().map_err(bad)?)),
            Some(("exp", arg)) => Ok(TimeProfile::Exp(arg.parse().map_err(bad)?)),
            Some(("poly", arg)) => {
                let coeffs: std::result::Result<Vec<f64>, _> =
                    arg.split(',').map(str::parse).collect();
                Ok(TimeProfile::Polynomial(coeffs.map_err(bad)?))
            }
            _ => Err(Error::Config {
                message: format!("unknown time profile '{s}'"),
            }),
        }
    }
}
