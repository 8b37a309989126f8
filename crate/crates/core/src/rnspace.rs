//! Finite-dimensional carrier and the random norm induced by its norm.
//!
//! The carrier is `ℝᵈ`. Its norm induces the random norm
//! `μ_x(t) = t / (t + ‖x‖)`, which is an RN-space under the minimum t-norm.
//! The alternative `μ_x(t) = ε₀(t − ‖x‖)` is available through
//! [`InducedKind::Eps0Shift`]. Finite-dimensional carriers are complete, so
//! completeness is not checked anywhere.

use std::ops::{Add, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distfn::DistributionFn;
use crate::error::{Error, Result};
use crate::tnorm::TNorm;

#[derive(Debug, Clone, PartialEq)]
pub struct VectorX(Vec<f64>);

impl VectorX {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Usage("vectors need dimension >= 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("vector coordinates must be finite".into()));
        }
        Ok(VectorX(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        VectorX(vec![0.0; dim])
    }

    /// Unit vector along axis `i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        VectorX(v)
    }

    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        VectorX(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn scale(&self, k: f64) -> VectorX {
        VectorX(self.0.iter().map(|c| k * c).collect())
    }

    /// `self + k·other`
    pub fn axpy(&self, k: f64, other: &VectorX) -> VectorX {
        debug_assert_eq!(self.dim(), other.dim());
        VectorX(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + k * b)
                .collect(),
        )
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    pub fn max_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| f64::max(m, c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }
}

impl Add for &VectorX {
    type Output = VectorX;
    fn add(self, rhs: &VectorX) -> VectorX {
        debug_assert_eq!(self.dim(), rhs.dim());
        VectorX(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &VectorX {
    type Output = VectorX;
    fn sub(self, rhs: &VectorX) -> VectorX {
        debug_assert_eq!(self.dim(), rhs.dim());
        VectorX(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &VectorX {
    type Output = VectorX;
    fn neg(self) -> VectorX {
        self.scale(-1.0)
    }
}

/// Euclidean norm, computed with scaling so that huge or tiny coordinates
/// neither overflow nor underflow.
pub fn norm(x: &VectorX) -> f64 {
    let m = x.max_norm();
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    let s: f64 = x.0.iter().map(|c| (c / m) * (c / m)).sum();
    m * s.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NormKind {
    #[default]
    Euclidean,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InducedKind {
    /// `μ_x(t) = t/(t + ‖x‖)`
    #[default]
    Ratio,
    /// `μ_x(t) = ε₀(t − ‖x‖)`
    Eps0Shift,
}

/// Anything that assigns a distribution function to each vector.
///
/// [`RNSpace`] is the real implementation; tests plug in deliberately broken
/// ones to exercise [`check_rn_axioms`].
pub trait RandomNorm {
    fn dimension(&self) -> usize;
    fn tnorm(&self) -> TNorm;
    fn mu(&self, x: &VectorX) -> Result<DistributionFn>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RNSpace {
    pub dimension: usize,
    pub tnorm: TNorm,
    pub induced: InducedKind,
    pub norm: NormKind,
}

impl RNSpace {
    /// The induced space `t/(t+‖x‖)` over `ℝᵈ` under the minimum t-norm.
    pub fn induced(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Usage("dimension must be >= 1".into()));
        }
        Ok(Self {
            dimension,
            tnorm: TNorm::Minimum,
            induced: InducedKind::Ratio,
            norm: NormKind::Euclidean,
        })
    }

    pub fn with_induced(mut self, induced: InducedKind) -> Self {
        self.induced = induced;
        self
    }

    pub fn with_norm(mut self, norm: NormKind) -> Self {
        self.norm = norm;
        self
    }

    pub fn norm_of(&self, x: &VectorX) -> f64 {
        match self.norm {
            NormKind::Euclidean => norm(x),
            NormKind::Max => x.max_norm(),
        }
    }

    /// The random norm of any vector whose norm is `n`.
    pub fn mu_of_norm(&self, n: f64) -> DistributionFn {
        if n == 0.0 {
            return DistributionFn::eps0();
        }
        match self.induced {
            InducedKind::Ratio => DistributionFn::Ratio(n),
            InducedKind::Eps0Shift => DistributionFn::Eps0Shift(n),
        }
    }

    fn check_dim(&self, x: &VectorX) -> Result<()> {
        if x.dim() != self.dimension {
            return Err(Error::Usage(format!(
                "vector has dimension {}, space has {}",
                x.dim(),
                self.dimension
            )));
        }
        Ok(())
    }
}

impl RandomNorm for RNSpace {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn tnorm(&self) -> TNorm {
        self.tnorm
    }

    fn mu(&self, x: &VectorX) -> Result<DistributionFn> {
        self.check_dim(x)?;
        Ok(self.mu_of_norm(self.norm_of(x)))
    }
}

/// One draw for the axiom harness: two vectors, a scalar and two times.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomSample {
    pub x: VectorX,
    pub y: VectorX,
    pub beta: f64,
    pub t: f64,
    pub s: f64,
}

/// Seeded generator of [`AxiomSample`]s.
///
/// Coordinates are uniform in `[-2, 2]`; one draw in ten uses the zero vector
/// for `x` and one in ten makes `y` parallel to `x`, which is where RN3 is
/// tight. Times are log-uniform on `[1e-3, 1e3]` with occasional zeros.
#[derive(Debug, Clone)]
pub struct AxiomSampler {
    rng: ChaCha8Rng,
    dimension: usize,
}

impl AxiomSampler {
    pub fn new(seed: u64, dimension: usize) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dimension,
        }
    }

    fn vector(&mut self) -> VectorX {
        VectorX(
            (0..self.dimension)
                .map(|_| self.rng.random_range(-2.0..2.0))
                .collect(),
        )
    }

    fn time(&mut self) -> f64 {
        if self.rng.random_ratio(1, 20) {
            0.0
        } else {
            10f64.powf(self.rng.random_range(-3.0..3.0))
        }
    }

    pub fn draw(&mut self, count: usize) -> Vec<AxiomSample> {
        (0..count)
            .map(|_| {
                let x = if self.rng.random_ratio(1, 10) {
                    VectorX::zeros(self.dimension)
                } else {
                    self.vector()
                };
                let y = if self.rng.random_ratio(1, 10) {
                    let k = self.rng.random_range(0.1..3.0);
                    x.scale(k)
                } else {
                    self.vector()
                };
                let mut beta = 0.0;
                while beta == 0.0 {
                    beta = self.rng.random_range(-3.0..3.0);
                }
                let t = self.time();
                let s = self.time();
                AxiomSample { x, y, beta, t, s }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RnAxiom {
    Rn1,
    Rn2,
    Rn3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomViolation {
    pub axiom: RnAxiom,
    pub sample: usize,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxiomReport {
    pub samples: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, axiom: RnAxiom) -> usize {
        self.violations.iter().filter(|v| v.axiom == axiom).count()
    }
}

/// Looks for sampled violations of RN1–RN3 beyond `tol`.
///
/// * RN1: `μ_0` agrees with ε₀ on the grid, and every sampled nonzero `x` has
///   some positive grid time with `μ_x(t) < 1 − tol`.
/// * RN2: `μ_{βx}(t) = μ_x(t/|β|)` at every grid time.
/// * RN3: `μ_{x+y}(t+s) ≥ T(μ_x(t), μ_y(s))` at the sampled `(t, s)`.
pub fn check_rn_axioms<M: RandomNorm + ?Sized>(
    space: &M,
    samples: &[AxiomSample],
    grid: &[f64],
    tol: f64,
) -> Result<AxiomReport> {
    if grid.is_empty() {
        return Err(Error::Usage("axiom check needs a nonempty grid".into()));
    }
    let eps0 = DistributionFn::eps0();
    let tnorm = space.tnorm();
    let mut report = AxiomReport {
        samples: samples.len(),
        violations: Vec::new(),
    };

    let zero = VectorX::zeros(space.dimension());
    let mu_zero = space.mu(&zero)?;
    for &t in grid {
        let (lhs, rhs) = (mu_zero.eval(t), eps0.eval(t));
        if (lhs - rhs).abs() > tol {
            report.violations.push(AxiomViolation {
                axiom: RnAxiom::Rn1,
                sample: usize::MAX,
                t,
                lhs,
                rhs,
            });
        }
    }

    for (i, s) in samples.iter().enumerate() {
        let mu_x = space.mu(&s.x)?;

        if !s.x.is_zero() {
            let separated = grid.iter().any(|&t| t > 0.0 && mu_x.eval(t) < 1.0 - tol);
            if !separated {
                report.violations.push(AxiomViolation {
                    axiom: RnAxiom::Rn1,
                    sample: i,
                    t: f64::NAN,
                    lhs: 1.0,
                    rhs: 1.0,
                });
            }
        }

        let mu_bx = space.mu(&s.x.scale(s.beta))?;
        for &t in grid.iter().filter(|&&t| t > 0.0) {
            let lhs = mu_bx.eval(t);
            let rhs = mu_x.eval(t / s.beta.abs());
            if (lhs - rhs).abs() > tol {
                report.violations.push(AxiomViolation {
                    axiom: RnAxiom::Rn2,
                    sample: i,
                    t,
                    lhs,
                    rhs,
                });
            }
        }

        let mu_y = space.mu(&s.y)?;
        let mu_sum = space.mu(&(&s.x + &s.y))?;
        let lhs = mu_sum.eval(s.t + s.s);
        let rhs = tnorm.apply_unchecked(mu_x.eval(s.t), mu_y.eval(s.s));
        if lhs < rhs - tol {
            report.violations.push(AxiomViolation {
                axiom: RnAxiom::Rn3,
                sample: i,
                t: s.t + s.s,
                lhs,
                rhs,
            });
        }
    }
    Ok(report)
}

fn check_sequence_args(len: usize, eps: f64, lambda: f64, start: usize) -> Result<()> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Usage(format!("eps must be positive, got {eps}")));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Usage(format!(
            "lambda must lie in (0, 1), got {lambda}"
        )));
    }
    if start == 0 || start > len {
        return Err(Error::Usage(format!(
            "index N={start} outside the sequence (length {len}, indices start at 1)"
        )));
    }
    Ok(())
}

/// Finite Cauchy test: `μ_{x_n − x_m}(eps) > 1 − λ` for all `n ≥ m ≥ N`.
///
/// The sequence is indexed from 1, so `seq[0]` is `x_1`.
pub fn is_cauchy<M: RandomNorm + ?Sized>(
    seq: &[VectorX],
    space: &M,
    eps: f64,
    lambda: f64,
    start: usize,
) -> Result<bool> {
    check_sequence_args(seq.len(), eps, lambda, start)?;
    let tail = &seq[start - 1..];
    for (m, xm) in tail.iter().enumerate() {
        for xn in &tail[m..] {
            if space.mu(&(xn - xm))?.eval(eps) <= 1.0 - lambda {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Finite convergence test: `μ_{x_n − limit}(eps) > 1 − λ` for all `n ≥ N`.
pub fn converges_to<M: RandomNorm + ?Sized>(
    seq: &[VectorX],
    limit: &VectorX,
    space: &M,
    eps: f64,
    lambda: f64,
    start: usize,
) -> Result<bool> {
    check_sequence_args(seq.len(), eps, lambda, start)?;
    for xn in &seq[start - 1..] {
        if space.mu(&(xn - limit))?.eval(eps) <= 1.0 - lambda {
            return Ok(false);
        }
    }
    Ok(true)
}
