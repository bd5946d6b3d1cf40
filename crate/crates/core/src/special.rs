//! Scalar special functions used by every evaluator: Heaviside step,
//! gamma function, Hermite polynomials.

use crate::error::{Error, Result};

/// Heaviside step with the closed-at-zero convention: 0 for `y < 0`,
/// 1 for `y >= 0`.
#[inline]
pub fn heaviside(y: f64) -> f64 {
    if y < 0.0 {
        0.0
    } else {
        1.0
    }
}

// Lanczos approximation with r = 10.900511 and eleven coefficients
// (Pugh's optimal set, as used by Boost and statrs). Relative error is
// a few ulps over the positive axis, comfortably below 1e-12.
const LANCZOS_R: f64 = 10.900511;
const LANCZOS_DK: [f64; 11] = [
    2.485_740_891_387_535_5e-5,
    1.051_423_785_817_219_7,
    -3.456_870_972_220_162_5,
    4.512_277_094_668_948,
    -2.982_852_253_235_766_4,
    1.056_397_115_771_267,
    -1.954_287_731_916_458_7e-1,
    1.709_705_434_044_412e-2,
    -5.719_261_174_043_057e-4,
    4.633_994_733_599_057e-6,
    -2.719_949_084_886_077_2e-9,
];
// 2 * sqrt(e / pi)
const TWO_SQRT_E_OVER_PI: f64 = 1.860_382_734_205_265_7;

/// Largest argument for which `Gamma(z)` stays within f64 range per the
/// module contract.
pub const GAMMA_MAX_ARG: f64 = 171.0;

/// `n!` for `n <= 170`, exact for every factorial representable in f64
/// and correctly accumulated beyond. The series hand values depend on
/// small factorials being exact, which Lanczos is not.
pub(crate) fn factorial(n: u32) -> f64 {
    static TABLE: std::sync::OnceLock<[f64; 171]> = std::sync::OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = [1.0f64; 171];
        for i in 1..171usize {
            t[i] = t[i - 1] * i as f64;
        }
        t
    });
    table[n as usize]
}

fn lanczos_series(z: f64) -> f64 {
    let mut s = LANCZOS_DK[0];
    for (i, dk) in LANCZOS_DK.iter().enumerate().skip(1) {
        s += dk / (z + i as f64 - 1.0);
    }
    s
}

/// Gamma function for positive arguments `0 < z <= 171`.
///
/// Integer arguments short-circuit to the factorial table; everything
/// else goes through Lanczos.
pub fn gamma(z: f64) -> Result<f64> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::Domain {
            context: "gamma requires a finite argument z > 0",
        });
    }
    if z > GAMMA_MAX_ARG {
        return Err(Error::GammaOverflow { z });
    }
    if z.fract() == 0.0 {
        return Ok(factorial(z as u32 - 1));
    }
    let s = lanczos_series(z);
    let base = (z - 0.5 + LANCZOS_R) / std::f64::consts::E;
    // split the power for z near the top of the range: base^(z - 0.5)
    // alone can overflow while the product with s stays representable
    if z > 140.0 {
        let half = base.powf(0.5 * (z - 0.5));
        Ok(TWO_SQRT_E_OVER_PI * s * half * half)
    } else {
        Ok(TWO_SQRT_E_OVER_PI * base.powf(z - 0.5) * s)
    }
}

/// Natural log of the gamma function for `z > 0`. Valid far beyond the
/// overflow bound of [`gamma`]; used for log-space series terms.
pub fn ln_gamma(z: f64) -> Result<f64> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::Domain {
            context: "ln_gamma requires a finite argument z > 0",
        });
    }
    let s = lanczos_series(z);
    let shifted = z - 0.5 + LANCZOS_R;
    Ok(s.ln() + TWO_SQRT_E_OVER_PI.ln() + (z - 0.5) * (shifted.ln() - 1.0))
}

/// All physicists' Hermite polynomial values `H_0(x) .. H_max(x)` at one
/// point, from the three-term recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteTable {
    pub max_order: u32,
    pub values: Vec<f64>,
}

/// Largest Hermite order accepted by [`hermite`] and [`hermite_table`].
pub const HERMITE_MAX_ORDER: u32 = 10_000;

/// `H_n(x)` for a single order; see [`hermite_table`] for all orders in
/// one pass.
pub fn hermite(n: u32, x: f64) -> Result<f64> {
    Ok(*hermite_table(n, x)?.values.last().expect("non-empty table"))
}

/// `H_0(x) .. H_n(x)` by upward recurrence
/// `H_{k+1} = 2x H_k - 2k H_{k-1}`.
///
/// Errors with the offending order if an intermediate leaves the f64
/// range; coefficient expansion is never used because it cancels
/// catastrophically past order ~20.
pub fn hermite_table(n: u32, x: f64) -> Result<HermiteTable> {
    if n > HERMITE_MAX_ORDER {
        return Err(Error::Domain {
            context: "hermite order exceeds 10^4",
        });
    }
    if !x.is_finite() {
        return Err(Error::Domain {
            context: "hermite requires finite x",
        });
    }
    let mut values = Vec::with_capacity(n as usize + 1);
    values.push(1.0);
    if n >= 1 {
        values.push(2.0 * x);
    }
    for k in 1..n {
        let next = 2.0 * x * values[k as usize] - 2.0 * k as f64 * values[k as usize - 1];
        if !next.is_finite() {
            return Err(Error::HermiteOverflow { order: k + 1 });
        }
        values.push(next);
    }
    Ok(HermiteTable {
        max_order: n,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // High-precision references (mpmath, 20 digits).
    const GAMMA_REFS: &[(f64, f64)] = &[
        (0.5, 1.772_453_850_905_516),
        (1.0, 1.0),
        (1.5, 0.886_226_925_452_758),
        (2.0, 1.0),
        (3.7, 4.170_651_783_796_603),
        (5.0, 24.0),
        (10.3, 716_430.689_062_375_2),
        (25.7, 5.880_910_964_450_198e24),
        (100.5, 9.320_963_104_082_717e156),
        (170.9, 4.341_324_334_535_097_6e306),
    ];

    #[test]
    fn gamma_reference_values() {
        for &(z, want) in GAMMA_REFS {
            let got = gamma(z).unwrap();
            let rel = ((got - want) / want).abs();
            assert!(rel <= 1e-12, "gamma({z}) = {got}, want {want}, rel {rel:e}");
        }
    }

    #[test]
    fn gamma_domain_and_overflow() {
        assert!(matches!(gamma(0.0), Err(Error::Domain { .. })));
        assert!(matches!(gamma(-1.5), Err(Error::Domain { .. })));
        assert!(matches!(gamma(171.5), Err(Error::GammaOverflow { .. })));
        assert!(gamma(171.0).is_ok());
    }

    #[test]
    fn gamma_recurrence_identity() {
        // gamma(z+1) = z gamma(z) at relative 1e-11; log-space above z = 30.
        let mut z = 0.5;
        while z <= 100.0 {
            if z <= 30.0 {
                let lhs = gamma(z + 1.0).unwrap();
                let rhs = z * gamma(z).unwrap();
                assert!(
                    ((lhs - rhs) / rhs).abs() <= 1e-11,
                    "recurrence fails at z = {z}"
                );
            } else {
                let lhs = ln_gamma(z + 1.0).unwrap();
                let rhs = ln_gamma(z).unwrap() + z.ln();
                assert!(
                    (lhs - rhs).abs() <= 1e-11,
                    "log recurrence fails at z = {z}"
                );
            }
            z += 0.37;
        }
    }

    #[test]
    fn ln_gamma_reference_values() {
        // mpmath: loggamma(10001), loggamma(501.25)
        let refs = [
            (10_001.0, 82_108.927_836_814_35),
            (501.25, 2_612.884_422_828_576_7),
        ];
        for (z, want) in refs {
            let got = ln_gamma(z).unwrap();
            assert!(
                ((got - want) / want).abs() <= 1e-13,
                "ln_gamma({z}) = {got}, want {want}"
            );
        }
        // consistency with gamma on moderate arguments
        for z in [0.7, 1.5, 7.3, 42.0, 150.0] {
            let a = ln_gamma(z).unwrap();
            let b = gamma(z).unwrap().ln();
            assert!((a - b).abs() <= 1e-11 * b.abs().max(1.0));
        }
    }

    #[test]
    fn heaviside_cases() {
        assert_eq!(heaviside(-0.5), 0.0);
        assert_eq!(heaviside(0.0), 1.0);
        assert_eq!(heaviside(3.2), 1.0);
    }

    #[test]
    fn heaviside_composition_and_monotone() {
        // with the closed-at-zero convention a single re-application maps
        // 0 to 1, so the composition stabilizes from the second iterate on
        let mut last = 0.0;
        let mut y = -5.0;
        while y <= 5.0 {
            let h = heaviside(y);
            let hh = heaviside(h);
            assert_eq!(heaviside(hh), hh);
            assert!(h >= last, "not monotone at {y}");
            last = h;
            y += 0.01;
        }
    }

    #[test]
    fn factorial_table_is_exact_where_representable() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(3), 6.0);
        assert_eq!(factorial(10), 3_628_800.0);
        assert_eq!(factorial(18), 6_402_373_705_728_000.0);
        assert_eq!(gamma(3.0).unwrap(), 2.0);
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        assert_eq!(gamma(1.0).unwrap(), 1.0);
    }

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite(0, 1.234).unwrap(), 1.0);
        assert_eq!(hermite(1, 2.0).unwrap(), 4.0);
        // H_3(x) = 8x^3 - 12x
        assert_eq!(hermite(3, 1.0).unwrap(), -4.0);
    }

    #[test]
    fn hermite_parity() {
        for n in 0..=50u32 {
            let mut x = -5.0;
            while x <= 5.0 {
                let p = hermite(n, x).unwrap();
                let m = hermite(n, -x).unwrap();
                let want = if n % 2 == 0 { p } else { -p };
                let scale = p.abs().max(1e-300);
                assert!(
                    ((m - want) / scale).abs() <= 1e-10,
                    "parity fails n={n} x={x}"
                );
                x += 0.625;
            }
        }
    }

    #[test]
    fn hermite_table_recurrence_invariant() {
        let x = 1.7;
        let table = hermite_table(40, x).unwrap();
        assert_eq!(table.values[0], 1.0);
        for n in 1..40usize {
            let lhs = table.values[n + 1];
            let rhs = 2.0 * x * table.values[n] - 2.0 * n as f64 * table.values[n - 1];
            let scale = lhs.abs().max(1.0);
            assert!(((lhs - rhs) / scale).abs() <= 1e-10);
        }
    }

    #[test]
    fn hermite_overflow_reported() {
        // H_n(30) ~ 60^n overflows near n = 180.
        let err = hermite(400, 30.0).unwrap_err();
        assert!(matches!(err, Error::HermiteOverflow { .. }), "got {err:?}");
        assert!(matches!(
            hermite(HERMITE_MAX_ORDER + 1, 0.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn hermite_generating_function() {
        // sum_n H_n(x) (a t)^n / n! = exp(2 a x t - (a t)^2) at a=2, t=0.5, x=1.
        let (a, t, x) = (2.0, 0.5, 1.0);
        let table = hermite_table(60, x).unwrap();
        let mut sum = 0.0;
        let mut pow_over_fact = 1.0; // (a t)^n / n!
        for n in 0..=60usize {
            sum += table.values[n] * pow_over_fact;
            pow_over_fact *= a * t / (n as f64 + 1.0);
        }
        let want = (2.0 * a * x * t - (a * t) * (a * t)).exp();
        assert!((sum - want).abs() <= 1e-8, "sum {sum} vs {want}");
    }
}
