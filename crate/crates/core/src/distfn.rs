//! Distribution functions on the extended reals.
//!
//! A [`DistributionFn`] is a nondecreasing, left-continuous map into `[0, 1]`
//! with `F(-∞) = 0` and `F(+∞) = 1`. The pointwise order on these functions is
//! only decidable on finite samples, so [`leq`] works on a caller-supplied grid
//! with an explicit tolerance.

use crate::error::{Error, Result};
use crate::normal::std_normal_cdf;

/// Left-continuous step function described by breakpoints and values.
///
/// `F(t) = 0` for `t < b₀`, `F(t) = vᵢ` for `b_{i-1} < t ≤ bᵢ` (and at `b₀`),
/// and `F(t) = v_last` above the last breakpoint. Sampling any distribution
/// function at the breakpoints and rebuilding a grid therefore reproduces the
/// samples exactly. The function is left-continuous everywhere except at `b₀`
/// when `v₀ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepGrid {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepGrid {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::Usage("grid needs at least one breakpoint".into()));
        }
        if breakpoints.len() != values.len() {
            return Err(Error::Usage(format!(
                "grid has {} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::Domain("grid breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(
                "grid breakpoints must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Domain("grid values must lie in [0, 1]".into()));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Domain("grid values must be nondecreasing".into()));
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn eval_finite(&self, t: f64) -> f64 {
        if t < self.breakpoints[0] {
            return 0.0;
        }
        let i = self.breakpoints.partition_point(|&b| b < t);
        self.values
            .get(i)
            .copied()
            .unwrap_or(*self.values.last().expect("nonempty grid"))
    }

    fn left_limit_finite(&self, t: f64) -> f64 {
        if t <= self.breakpoints[0] {
            return 0.0;
        }
        let i = self.breakpoints.partition_point(|&b| b < t);
        self.values
            .get(i)
            .copied()
            .unwrap_or(*self.values.last().expect("nonempty grid"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionFn {
    /// `t ↦ ε₀(t − c)`; `Eps0Shift(0)` is the maximal element ε₀.
    Eps0Shift(f64),
    /// `t ↦ t/(t + c)` for `t > 0`, `0` otherwise. `Ratio(0)` coincides with ε₀.
    Ratio(f64),
    /// `t ↦ Φ(t − location)` on the finite reals.
    GaussianShift(f64),
    Grid(StepGrid),
    /// `t ↦ inner(gamma · t)`, produced by [`scale_arg`] when no closed form exists.
    Scaled {
        inner: Box<DistributionFn>,
        gamma: f64,
    },
}

impl DistributionFn {
    /// The maximal distribution function ε₀.
    pub fn eps0() -> Self {
        DistributionFn::Eps0Shift(0.0)
    }

    pub fn ratio(c: f64) -> Result<Self> {
        if c.is_nan() || c < 0.0 {
            return Err(Error::Domain(format!("ratio scale must be >= 0, got {c}")));
        }
        Ok(DistributionFn::Ratio(c))
    }

    pub fn eps0_shift(c: f64) -> Result<Self> {
        if c.is_nan() || c < 0.0 {
            return Err(Error::Domain(format!("eps0 shift must be >= 0, got {c}")));
        }
        Ok(DistributionFn::Eps0Shift(c))
    }

    pub fn grid(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        StepGrid::new(breakpoints, values).map(DistributionFn::Grid)
    }

    /// Samples `self` at `breakpoints` and returns the equivalent step grid.
    pub fn sample_to_grid(&self, breakpoints: Vec<f64>) -> Result<Self> {
        let values = breakpoints.iter().map(|&t| self.eval(t)).collect();
        Self::grid(breakpoints, values)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t == f64::NEG_INFINITY {
            return 0.0;
        }
        if t == f64::INFINITY {
            return 1.0;
        }
        match self {
            DistributionFn::Eps0Shift(c) => {
                if t > *c {
                    1.0
                } else {
                    0.0
                }
            }
            DistributionFn::Ratio(c) => {
                if t <= 0.0 {
                    0.0
                } else if *c == 0.0 {
                    1.0
                } else {
                    t / (t + c)
                }
            }
            DistributionFn::GaussianShift(loc) => std_normal_cdf(t - loc),
            DistributionFn::Grid(g) => g.eval_finite(t),
            DistributionFn::Scaled { inner, gamma } => inner.eval(gamma * t),
        }
    }

    /// `lim_{s→t⁻} F(s)`. At `+∞` this is the D⁺ limit, which is the last grid
    /// value for [`DistributionFn::Grid`] and 1 for every closed form.
    pub fn left_limit(&self, t: f64) -> f64 {
        if t == f64::NEG_INFINITY {
            return 0.0;
        }
        match self {
            DistributionFn::Grid(g) => {
                if t == f64::INFINITY {
                    *g.values.last().expect("nonempty grid")
                } else {
                    g.left_limit_finite(t)
                }
            }
            DistributionFn::Scaled { inner, gamma } => inner.left_limit(gamma * t),
            // closed forms are left-continuous on the finite reals
            _ => self.eval(t),
        }
    }
}

/// Sampled pointwise order: `F(t) ≤ G(t) + tol` at every grid point.
pub fn leq(f: &DistributionFn, g: &DistributionFn, grid: &[f64], tol: f64) -> Result<bool> {
    if grid.is_empty() {
        return Err(Error::Usage("order check needs a nonempty grid".into()));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Usage(format!("tolerance must be >= 0, got {tol}")));
    }
    Ok(grid.iter().all(|&t| f.eval(t) <= g.eval(t) + tol))
}

/// Returns the distribution function `t ↦ F(gamma · t)`.
pub fn scale_arg(f: &DistributionFn, gamma: f64) -> Result<DistributionFn> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!(
            "argument scale must be positive and finite, got {gamma}"
        )));
    }
    if gamma == 1.0 {
        return Ok(f.clone());
    }
    Ok(match f {
        DistributionFn::Eps0Shift(c) => DistributionFn::Eps0Shift(c / gamma),
        DistributionFn::Ratio(c) => DistributionFn::Ratio(c / gamma),
        DistributionFn::Grid(g) => {
            let breakpoints: Vec<f64> = g.breakpoints.iter().map(|b| b / gamma).collect();
            match StepGrid::new(breakpoints, g.values.clone()) {
                Ok(scaled) => DistributionFn::Grid(scaled),
                // breakpoints merged under rounding
                Err(_) => DistributionFn::Scaled {
                    inner: Box::new(f.clone()),
                    gamma,
                },
            }
        }
        DistributionFn::Scaled { inner, gamma: g0 } => DistributionFn::Scaled {
            inner: inner.clone(),
            gamma: g0 * gamma,
        },
        DistributionFn::GaussianShift(_) => DistributionFn::Scaled {
            inner: Box::new(f.clone()),
            gamma,
        },
    })
}

/// A family `x ↦ φ_x` of distribution functions used as perturbation envelope.
///
/// Both families satisfy `φ_x ≥ φ_{x+1}` pointwise and `φ_x(t) → 1` as
/// `x → -∞` for every `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhiFamily {
    /// `φ_x(t) = t / (t + eˣ)`. In the induced space `μ_y ≥ φ_x` is exactly
    /// `‖y‖ ≤ eˣ`.
    ExpRatio,
    /// `φ_x(t) = Φ(t − x)`.
    GaussianLocation,
}

impl PhiFamily {
    pub fn name(self) -> &'static str {
        match self {
            PhiFamily::ExpRatio => "exp_ratio",
            PhiFamily::GaussianLocation => "gaussian_location",
        }
    }
}

pub fn phi(family: PhiFamily, x: f64) -> DistributionFn {
    match family {
        PhiFamily::ExpRatio => DistributionFn::Ratio(x.exp()),
        PhiFamily::GaussianLocation => DistributionFn::GaussianShift(x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid_1_1() -> DistributionFn {
        DistributionFn::grid(vec![1.0], vec![1.0]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let e0 = DistributionFn::eps0();
        assert_eq!(e0.eval(0.0), 0.0);
        assert_eq!(e0.eval(1.0), 1.0);
        assert_eq!(DistributionFn::Ratio(2.0).eval(2.0), 0.5);
        assert_eq!(DistributionFn::GaussianShift(0.0).eval(0.0), 0.5);
    }

    #[test]
    fn left_limit_examples() {
        assert_eq!(DistributionFn::eps0().left_limit(0.0), 0.0);
        assert_eq!(grid_1_1().left_limit(1.0), 0.0);
        assert_eq!(DistributionFn::GaussianShift(0.0).left_limit(0.0), 0.5);
    }

    #[test]
    fn grid_step_rule() {
        let g = DistributionFn::grid(vec![0.0, 1.0, 2.0], vec![0.0, 0.25, 0.75]).unwrap();
        assert_eq!(g.eval(-1.0), 0.0);
        assert_eq!(g.eval(0.0), 0.0);
        assert_eq!(g.eval(0.5), 0.25);
        assert_eq!(g.eval(1.0), 0.25);
        assert_eq!(g.eval(1.0 + 1e-12), 0.75);
        assert_eq!(g.eval(2.0), 0.75);
        assert_eq!(g.eval(5.0), 0.75);
        assert_eq!(g.left_limit(1.0), 0.25);
        assert_eq!(g.left_limit(2.0), 0.75);
        assert_eq!(g.left_limit(f64::INFINITY), 0.75);
        assert_eq!(g.eval(f64::INFINITY), 1.0);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(DistributionFn::grid(vec![], vec![]).is_err());
        assert!(DistributionFn::grid(vec![1.0, 1.0], vec![0.1, 0.2]).is_err());
        assert!(DistributionFn::grid(vec![1.0, 2.0], vec![0.3, 0.2]).is_err());
        assert!(DistributionFn::grid(vec![1.0], vec![1.5]).is_err());
        assert!(DistributionFn::grid(vec![1.0, 2.0], vec![0.5]).is_err());
    }

    #[test]
    fn constructors_reject_negative_scales() {
        assert!(DistributionFn::ratio(-1.0).is_err());
        assert!(DistributionFn::eps0_shift(f64::NAN).is_err());
        assert!(DistributionFn::ratio(0.0).is_ok());
    }

    #[test]
    fn ratio_zero_is_eps0() {
        let r = DistributionFn::Ratio(0.0);
        let e = DistributionFn::eps0();
        for t in [-1.0, 0.0, 1e-300, 0.5, 7.0, f64::INFINITY] {
            assert_eq!(r.eval(t), e.eval(t));
        }
    }

    #[test]
    fn leq_examples() {
        let grid = [0.5, 1.0, 2.0];
        let e0 = DistributionFn::eps0();
        let r1 = DistributionFn::Ratio(1.0);
        assert!(leq(&r1, &e0, &grid, 0.0).unwrap());
        assert!(!leq(&e0, &r1, &[1.0], 0.0).unwrap());
        assert!(leq(&r1, &r1, &grid, 0.0).unwrap());
        assert!(matches!(leq(&r1, &e0, &[], 0.0), Err(Error::Usage(_))));
    }

    #[test]
    fn scale_arg_examples() {
        let r1 = DistributionFn::Ratio(1.0);
        assert_eq!(scale_arg(&r1, 1.0).unwrap(), r1);
        assert_eq!(scale_arg(&r1, 0.5).unwrap().eval(2.0), 0.5);
        // Φ(2) from a 25-digit reference
        let g = scale_arg(&DistributionFn::GaussianShift(0.0), 2.0).unwrap();
        assert!((g.eval(1.0) - 0.977_249_868_051_820_8).abs() < 1e-15);
        assert!(matches!(scale_arg(&r1, 0.0), Err(Error::Domain(_))));
        assert!(matches!(scale_arg(&r1, -2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn scale_arg_composes() {
        let g = DistributionFn::GaussianShift(0.3);
        let twice = scale_arg(&scale_arg(&g, 2.0).unwrap(), 1.5).unwrap();
        match &twice {
            DistributionFn::Scaled { gamma, .. } => assert_eq!(*gamma, 3.0),
            other => panic!("expected Scaled, got {other:?}"),
        }
        let e = scale_arg(&DistributionFn::Eps0Shift(2.0), 4.0).unwrap();
        assert_eq!(e, DistributionFn::Eps0Shift(0.5));
        let grid = DistributionFn::grid(vec![1.0, 2.0], vec![0.5, 1.0]).unwrap();
        let sg = scale_arg(&grid, 2.0).unwrap();
        for t in [0.0, 0.5, 0.75, 1.0, 1.1] {
            assert_eq!(sg.eval(t), grid.eval(2.0 * t));
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(PhiFamily::ExpRatio, 0.0).eval(1.0), 0.5);
        assert_eq!(phi(PhiFamily::GaussianLocation, 1.0).eval(1.0), 0.5);
        let v = phi(PhiFamily::ExpRatio, -20.0).eval(1.0);
        // 1 - 1/(1+e^{-20}) = 2.061153618190203...e-9
        assert!(((1.0 - v) - 2.061_153_618_190_204e-9).abs() < 2e-16);
    }

    #[test]
    fn phi_limit_ladder() {
        for fam in [PhiFamily::ExpRatio, PhiFamily::GaussianLocation] {
            for t in [0.1, 1.0, 10.0] {
                let mut prev = 0.0;
                for x in (1..=40).map(|k| -(k as f64)) {
                    let v = phi(fam, x).eval(t);
                    assert!(v >= prev, "{fam:?} not increasing at x={x}, t={t}");
                    prev = v;
                }
                assert!(prev >= 1.0 - 1e-6, "{fam:?} at t={t}: {prev}");
            }
        }
    }

    fn variant() -> impl Strategy<Value = DistributionFn> {
        prop_oneof![
            (0.0..10.0f64).prop_map(DistributionFn::Eps0Shift),
            (0.0..10.0f64).prop_map(DistributionFn::Ratio),
            (-5.0..5.0f64).prop_map(DistributionFn::GaussianShift),
            prop::collection::vec((0.01..3.0f64, 0.0..0.3f64), 1..8).prop_map(|steps| {
                let mut b = -0.5;
                let mut v = 0.0;
                let (bs, vs): (Vec<f64>, Vec<f64>) = steps
                    .into_iter()
                    .map(|(db, dv)| {
                        b += db;
                        v = f64::min(v + dv, 1.0);
                        (b, v)
                    })
                    .unzip();
                DistributionFn::grid(bs, vs).unwrap()
            }),
        ]
    }

    proptest! {
        #[test]
        fn monotone_and_bounded(f in variant(), a in -20.0..20.0f64, b in -20.0..20.0f64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (flo, fhi) = (f.eval(lo), f.eval(hi));
            prop_assert!(flo <= fhi);
            prop_assert!((0.0..=1.0).contains(&flo));
            prop_assert!((0.0..=1.0).contains(&fhi));
        }

        #[test]
        fn infinite_endpoints(f in variant()) {
            prop_assert_eq!(f.eval(f64::NEG_INFINITY), 0.0);
            prop_assert_eq!(f.eval(f64::INFINITY), 1.0);
        }

        #[test]
        fn zero_maps_to_zero_for_delta_plus_variants(c in 0.0..10.0f64) {
            prop_assert_eq!(DistributionFn::Eps0Shift(c).eval(0.0), 0.0);
            prop_assert_eq!(DistributionFn::Ratio(c).eval(0.0), 0.0);
        }

        #[test]
        fn left_continuity_ladder(f in variant(), t in 0.01..15.0f64) {
            // Grid may jump at its first breakpoint; everything else is left-continuous.
            if let DistributionFn::Grid(g) = &f {
                prop_assume!(t != g.breakpoints()[0]);
            }
            let target = f.left_limit(t);
            prop_assert_eq!(target, f.eval(t));
            let gap = |h: f64| (f.eval(t - h) - target).abs();
            let ladder = [1e-3, 1e-6, 1e-9];
            let last = gap(ladder[ladder.len() - 1]);
            prop_assert!(last <= gap(ladder[0]) + 1e-15);
            // Continuous variants converge, steps settle exactly.
            prop_assert!(last <= 1e-8, "gap {} at t={}", last, t);
        }

        #[test]
        fn grid_roundtrip(f in variant(), mut pts in prop::collection::vec(-5.0..20.0f64, 1..20)) {
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let g = f.sample_to_grid(pts.clone()).unwrap();
            for &t in &pts {
                prop_assert_eq!(g.eval(t), f.eval(t));
            }
        }

        #[test]
        fn phi_order(x in -30.0..30.0f64, t in 1e-3..1e3f64) {
            for fam in [PhiFamily::ExpRatio, PhiFamily::GaussianLocation] {
                prop_assert!(phi(fam, x).eval(t) >= phi(fam, x + 1.0).eval(t));
            }
        }

        #[test]
        fn scale_arg_is_argument_scaling(f in variant(), gamma in 0.05..20.0f64, t in 0.0..10.0f64) {
            let s = scale_arg(&f, gamma).unwrap();
            let got = s.eval(t);
            let want = f.eval(gamma * t);
            // Closed-form rewrites round differently; a jump may only move by
            // a relative hair.
            let lo = f.eval(gamma * t * (1.0 - 1e-12));
            let hi = f.eval(gamma * t * (1.0 + 1e-12));
            prop_assert!((got - want).abs() <= 1e-12 || (lo - 1e-12 <= got && got <= hi + 1e-12));
        }
    }
}
