//! Triangular norms.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TNorm {
    /// `T_M(a, b) = min(a, b)`
    Minimum,
    /// `T_P(a, b) = a·b`
    Product,
}

fn check_unit(v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::Domain(format!(
            "t-norm argument {v} is outside [0, 1]"
        )))
    }
}

impl TNorm {
    pub fn apply(self, a: f64, b: f64) -> Result<f64> {
        let (a, b) = (check_unit(a)?, check_unit(b)?);
        Ok(self.apply_unchecked(a, b))
    }

    pub(crate) fn apply_unchecked(self, a: f64, b: f64) -> f64 {
        match self {
            TNorm::Minimum => a.min(b),
            TNorm::Product => a * b,
        }
    }

    /// n-ary extension by left fold; the empty fold is 1.
    pub fn fold(self, values: &[f64]) -> Result<f64> {
        values.iter().try_fold(1.0, |acc, &v| {
            check_unit(v)?;
            Ok(self.apply_unchecked(acc, v))
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            TNorm::Minimum => "minimum",
            TNorm::Product => "product",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TNormAxiom {
    Commutativity,
    Associativity,
    Unit,
    Monotonicity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TNormViolation {
    pub axiom: TNormAxiom,
    pub args: [f64; 4],
    pub lhs: f64,
    pub rhs: f64,
}

/// Checks TN1–TN3 on each quadruple `(a, b, c, d)` of values in `[0, 1]`.
///
/// Commutativity uses `(a, b)`, associativity `(a, b, c)`, the unit law `a`,
/// and monotonicity compares `T(min(a,c), min(b,d))` with `T(c, d)`.
pub fn check_axioms(t: TNorm, samples: &[[f64; 4]], tol: f64) -> Result<Vec<TNormViolation>> {
    let mut out = Vec::new();
    for &s in samples {
        let [a, b, c, d] = s;
        for v in s {
            check_unit(v)?;
        }
        let mut push = |axiom, lhs: f64, rhs: f64, ok: bool| {
            if !ok {
                out.push(TNormViolation {
                    axiom,
                    args: s,
                    lhs,
                    rhs,
                });
            }
        };

        let (ab, ba) = (t.apply_unchecked(a, b), t.apply_unchecked(b, a));
        push(TNormAxiom::Commutativity, ab, ba, (ab - ba).abs() <= tol);

        let left = t.apply_unchecked(ab, c);
        let right = t.apply_unchecked(a, t.apply_unchecked(b, c));
        push(
            TNormAxiom::Associativity,
            left,
            right,
            (left - right).abs() <= tol,
        );

        let unit = t.apply_unchecked(a, 1.0);
        push(TNormAxiom::Unit, unit, a, (unit - a).abs() <= tol);

        let small = t.apply_unchecked(a.min(c), b.min(d));
        let big = t.apply_unchecked(c, d);
        push(TNormAxiom::Monotonicity, small, big, small <= big + tol);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn apply_examples() {
        assert_eq!(TNorm::Minimum.apply(0.3, 0.7).unwrap(), 0.3);
        assert_eq!(TNorm::Product.apply(0.5, 0.5).unwrap(), 0.25);
        for a in [0.0, 0.1, 0.5, 0.99, 1.0] {
            assert_eq!(TNorm::Minimum.apply(a, 1.0).unwrap(), a);
        }
    }

    #[test]
    fn fold_examples() {
        assert_eq!(TNorm::Minimum.fold(&[]).unwrap(), 1.0);
        assert_eq!(TNorm::Product.fold(&[]).unwrap(), 1.0);
        assert_eq!(TNorm::Minimum.fold(&[0.4, 0.7, 0.2]).unwrap(), 0.2);
        assert_eq!(TNorm::Product.fold(&[0.5, 0.5, 0.5]).unwrap(), 0.125);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            TNorm::Minimum.apply(1.2, 0.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            TNorm::Product.apply(0.5, -0.1),
            Err(Error::Domain(_))
        ));
        assert!(TNorm::Minimum.apply(f64::NAN, 0.5).is_err());
        assert!(matches!(
            TNorm::Minimum.fold(&[0.2, 2.0]),
            Err(Error::Domain(_))
        ));
        assert!(check_axioms(TNorm::Minimum, &[[0.1, 0.2, 0.3, 1.5]], 0.0).is_err());
    }

    #[test]
    fn harness_catches_a_broken_norm() {
        // T(a,b)=a·b violates nothing, but a "t-norm" with tol < 0 must flag everything.
        let v = check_axioms(TNorm::Product, &[[0.5, 0.5, 0.5, 0.5]], -1.0).unwrap();
        assert_eq!(v.len(), 4);
    }

    fn unit() -> impl Strategy<Value = f64> {
        prop_oneof![Just(0.0), Just(1.0), 0.0..=1.0f64]
    }

    proptest! {
        #[test]
        fn minimum_axioms_exact(a in unit(), b in unit(), c in unit(), d in unit()) {
            prop_assert!(check_axioms(TNorm::Minimum, &[[a, b, c, d]], 0.0).unwrap().is_empty());
        }

        #[test]
        fn product_axioms_ulp(a in unit(), b in unit(), c in unit(), d in unit()) {
            prop_assert!(check_axioms(TNorm::Product, &[[a, b, c, d]], 4.0 * f64::EPSILON).unwrap().is_empty());
        }

        #[test]
        fn fold_minimum_is_min(v in prop::collection::vec(unit(), 1..16)) {
            let m = v.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert_eq!(TNorm::Minimum.fold(&v).unwrap(), m);
        }

        #[test]
        fn fold_minimum_order_independent(v in prop::collection::vec(unit(), 1..16).prop_shuffle()) {
            let mut sorted = v.clone();
            sorted.sort_by(f64::total_cmp);
            prop_assert_eq!(TNorm::Minimum.fold(&v).unwrap(), TNorm::Minimum.fold(&sorted).unwrap());
        }

        #[test]
        fn results_stay_in_unit_interval(a in unit(), b in unit()) {
            for t in [TNorm::Minimum, TNorm::Product] {
                let r = t.apply(a, b).unwrap();
                prop_assert!((0.0..=1.0).contains(&r));
            }
        }
    }
}
