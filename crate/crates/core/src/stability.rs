//! Characteristic roots of `x² − p x + q = 0` and the stability constant γ.
//!
//! The stability result needs distinct real roots with `0 < |β| < |α| < 1`.
//! All checks are strict with no epsilon slack: inputs right next to the
//! boundary are admitted and simply yield a small γ.

use crate::error::{Error, Result};

/// Coefficients of `f(x) = p f(x−1) − q f(x−2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub p: f64,
    pub q: f64,
}

impl Coefficients {
    pub fn new(p: f64, q: f64) -> Self {
        Self { p, q }
    }

    pub fn discriminant(&self) -> f64 {
        self.p * self.p - 4.0 * self.q
    }

    /// `1 + |p| + |q|`, the operator bound of `v ↦ v₀ − p v₁ + q v₂`.
    pub fn residual_gain(&self) -> f64 {
        1.0 + self.p.abs() + self.q.abs()
    }
}

/// Characteristic data of an admissible equation. `alpha` is always the root
/// of larger magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub coefficients: Coefficients,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Spectrum {
    pub fn p(&self) -> f64 {
        self.coefficients.p
    }

    pub fn q(&self) -> f64 {
        self.coefficients.q
    }
}

fn check_region(alpha: f64, beta: f64) -> Result<()> {
    let (a, b) = (alpha.abs(), beta.abs());
    if !(a.is_finite() && b.is_finite()) || !(0.0 < b && b < a && a < 1.0) {
        return Err(Error::OutsideValidityRegion { alpha, beta });
    }
    Ok(())
}

/// Solves `x² − p x + q = 0`, orders the roots by magnitude and computes γ.
pub fn solve_characteristic(c: Coefficients) -> Result<Spectrum> {
    if !(c.p.is_finite() && c.q.is_finite()) {
        return Err(Error::Domain(format!("coefficients must be finite: {c:?}")));
    }
    if c.q == 0.0 {
        return Err(Error::DegenerateEquation);
    }
    let disc = c.discriminant();
    if disc.is_nan() || disc <= 0.0 {
        return Err(Error::NonrealOrRepeatedRoots { discriminant: disc });
    }
    // Pick the sign that avoids cancellation, then recover the small root
    // from the product of the roots.
    let s = disc.sqrt();
    let big = if c.p >= 0.0 {
        (c.p + s) / 2.0
    } else {
        (c.p - s) / 2.0
    };
    let small = c.q / big;
    let (alpha, beta) = if big.abs() >= small.abs() {
        (big, small)
    } else {
        (small, big)
    };
    check_region(alpha, beta)?;
    Ok(Spectrum {
        coefficients: c,
        alpha,
        beta,
        gamma: gamma_unchecked(alpha, beta),
    })
}

/// `|α−β|(1−|α|)(1−|β|) / (|α|+|β|−2|α||β|)` without any region check.
pub fn gamma_unchecked(alpha: f64, beta: f64) -> f64 {
    let (a, b) = (alpha.abs(), beta.abs());
    (alpha - beta).abs() * (1.0 - a) * (1.0 - b) / (a + b - 2.0 * a * b)
}

/// The stability constant γ for roots in the admissible region.
pub fn gamma_of(alpha: f64, beta: f64) -> Result<f64> {
    check_region(alpha, beta)?;
    Ok(gamma_unchecked(alpha, beta))
}

/// Vieta: `p = α + β`, `q = αβ`.
pub fn from_roots(alpha: f64, beta: f64) -> Result<Coefficients> {
    check_region(alpha, beta)?;
    Ok(Coefficients::new(alpha + beta, alpha * beta))
}

/// Builds the spectrum directly from admissible roots (ordering them first).
pub fn spectrum_from_roots(r1: f64, r2: f64) -> Result<Spectrum> {
    let (alpha, beta) = if r1.abs() >= r2.abs() {
        (r1, r2)
    } else {
        (r2, r1)
    };
    let coefficients = from_roots(alpha, beta)?;
    Ok(Spectrum {
        coefficients,
        alpha,
        beta,
        gamma: gamma_unchecked(alpha, beta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    /// Quadratic formula, straight from the definition.
    fn roots_oracle(p: f64, q: f64) -> (f64, f64) {
        let s = (p * p - 4.0 * q).sqrt();
        ((p + s) / 2.0, (p - s) / 2.0)
    }

    #[test]
    fn solve_example() {
        let sp = solve_characteristic(Coefficients::new(1.0 / 6.0, -1.0 / 6.0)).unwrap();
        assert!((sp.alpha - 0.5).abs() < 1e-15);
        assert!((sp.beta + 1.0 / 3.0).abs() < 1e-15);
        let (r1, r2) = roots_oracle(1.0 / 6.0, -1.0 / 6.0);
        assert!((sp.alpha - r1).abs() < 1e-15 && (sp.beta - r2).abs() < 1e-15);
        for r in [sp.alpha, sp.beta] {
            assert!((r * r - sp.p() * r + sp.q()).abs() < 1e-14);
        }
        assert!((sp.gamma - 5.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn rejections() {
        assert!(matches!(
            solve_characteristic(Coefficients::new(1.0, -1.0)),
            Err(Error::OutsideValidityRegion { .. })
        ));
        assert!(matches!(
            solve_characteristic(Coefficients::new(2.0, 1.0)),
            Err(Error::NonrealOrRepeatedRoots { .. })
        ));
        assert!(matches!(
            solve_characteristic(Coefficients::new(0.5, 1.0)),
            Err(Error::NonrealOrRepeatedRoots { .. })
        ));
        assert_eq!(
            solve_characteristic(Coefficients::new(0.5, 0.0)),
            Err(Error::DegenerateEquation)
        );
        // p = 0 gives ±√(−q): equal magnitudes
        assert!(matches!(
            solve_characteristic(Coefficients::new(0.0, -0.25)),
            Err(Error::OutsideValidityRegion { .. })
        ));
        assert!(gamma_of(1.0, 0.5).is_err());
        assert!(gamma_of(0.5, 0.0).is_err());
        assert!(gamma_of(0.5, -0.5).is_err());
        assert!(gamma_of(0.3, 0.5).is_err());
        assert!(from_roots(0.5, 0.5).is_err());
    }

    #[test]
    fn negative_p_orders_by_magnitude() {
        let sp = solve_characteristic(Coefficients::new(-1.0 / 6.0, -1.0 / 6.0)).unwrap();
        assert!((sp.alpha + 0.5).abs() < 1e-15);
        assert!((sp.beta - 1.0 / 3.0).abs() < 1e-15);
    }

    fn gamma_rational(a: Ratio<i64>, b: Ratio<i64>) -> Ratio<i64> {
        let zero = Ratio::from_integer(0);
        let abs = |r: Ratio<i64>| if r < zero { -r } else { r };
        let one = Ratio::from_integer(1);
        let two = Ratio::from_integer(2);
        let (aa, ab) = (abs(a), abs(b));
        abs(a - b) * (one - aa) * (one - ab) / (aa + ab - two * aa * ab)
    }

    #[test]
    fn gamma_examples_against_exact_rationals() {
        let exact = gamma_rational(Ratio::new(1, 2), Ratio::new(-1, 3));
        assert_eq!(exact, Ratio::new(5, 9));
        let g = gamma_of(0.5, -1.0 / 3.0).unwrap();
        assert!((g - 5.0 / 9.0).abs() <= 1e-15);

        let exact = gamma_rational(Ratio::new(9, 10), Ratio::new(1, 10));
        assert_eq!(exact, Ratio::new(72, 820));
        let g = gamma_of(0.9, 0.1).unwrap();
        assert!((g - 0.072 / 0.82).abs() <= 1e-15);
    }

    #[test]
    fn symmetric_roots_give_one_minus_t() {
        // |β| = |α| is outside the strict region, but the closed form still
        // simplifies to 1 − t there.
        assert!((gamma_unchecked(0.25, -0.25) - 0.75).abs() < 1e-15);
        for t in [0.1, 0.4, 0.8] {
            assert!((gamma_unchecked(t, -t) - (1.0 - t)).abs() < 1e-15);
        }
    }

    #[test]
    fn from_roots_examples() {
        let c = from_roots(0.5, -1.0 / 3.0).unwrap();
        assert!((c.p - 1.0 / 6.0).abs() < 1e-16 && (c.q + 1.0 / 6.0).abs() < 1e-16);
        let c = from_roots(0.9, 0.1).unwrap();
        assert!((c.p - 1.0).abs() < 1e-16 && (c.q - 0.09).abs() < 1e-16);
    }

    #[test]
    fn gamma_vanishes_at_unit_boundary() {
        for beta in [-0.6, -0.1, 0.05, 0.5] {
            let mut prev = f64::INFINITY;
            for k in 1..=12 {
                let alpha = 1.0 - 10f64.powi(-k);
                if alpha <= f64::abs(beta) {
                    continue;
                }
                let g = gamma_of(alpha, beta).unwrap();
                assert!(g < prev, "beta={beta}, alpha={alpha}");
                prev = g;
            }
            assert!(prev < 1e-11);
        }
    }

    #[test]
    fn gamma_positive_on_many_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for _ in 0..10_000 {
            let a: f64 = rng.random_range(1e-6..1.0);
            let b: f64 = rng.random_range(-1.0..1.0) * a;
            if b == 0.0 || b.abs() >= a {
                continue;
            }
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let g = gamma_of(sign * a, b).unwrap();
            assert!(g > 0.0);
            lo = lo.min(g);
            hi = hi.max(g);
        }
        // recorded, not asserted beyond positivity
        eprintln!("gamma range over samples: [{lo:e}, {hi:e}]");
    }

    proptest! {
        #[test]
        fn roots_roundtrip(a in 0.01..0.99f64, frac in 0.01..0.99f64, neg in any::<bool>(), flip in any::<bool>()) {
            let alpha = if flip { -a } else { a };
            let beta = if neg { -a * frac } else { a * frac };
            let c = from_roots(alpha, beta).unwrap();
            let sp = solve_characteristic(c).unwrap();
            prop_assert!((sp.alpha - alpha).abs() <= 1e-12);
            prop_assert!((sp.beta - beta).abs() <= 1e-12);
            let back = from_roots(sp.alpha, sp.beta).unwrap();
            prop_assert!((back.p - c.p).abs() <= 1e-12 && (back.q - c.q).abs() <= 1e-12);
            prop_assert!(sp.gamma > 0.0);
        }
    }
}
