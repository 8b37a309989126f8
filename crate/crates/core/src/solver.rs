//! Perturbed scenarios and the limit construction of an exact solution.
//!
//! The equation only couples points that differ by integers, so every
//! scenario lives on one coset lattice `x₀ + ℤ`; lattice points are addressed
//! by their integer index `k` (the point `x₀ + k`).
//!
//! From a perturbed `f` the solver forms
//!
//! ```text
//! G_n(x) = αⁿ (f(x−n) − β f(x−n−1))      H_n(x) = βⁿ (f(x−n) − α f(x−n−1))
//! F(x)   = α/(α−β) · lim G_n(x) − β/(α−β) · lim H_n(x)
//! ```
//!
//! The limits are truncated at the first `N` whose certified geometric tail
//! is below the policy target. Every estimate carries two error terms: the
//! tail, which bounds the distance to the true limit of the scenario's ideal
//! (real-arithmetic) function, and a first-order floating-point bound on how
//! far the computed `G_N` is from its ideal value.

use std::f64::consts::{E, TAU};

use crate::error::{Error, Result};
use crate::rnspace::{norm, VectorX};
use crate::stability::{Coefficients, Spectrum};

const EPS: f64 = f64::EPSILON;

/// SplitMix64 step. Used for all scenario randomness so that every value is
/// a pure function of `(seed, lattice index)`.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform in `[0, 1)` from the top 53 bits.
fn unit_f64(state: &mut u64) -> f64 {
    (splitmix64(state) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn stream(seed: u64, salt: u64, index: i64) -> u64 {
    let mut s = seed ^ salt;
    let a = splitmix64(&mut s);
    let mut t = index as u64;
    a ^ splitmix64(&mut t)
}

const NOISE_SALT: u64 = 0x6E6F_6973_6500_0000;
const COEF_SALT: u64 = 0x636F_6566_0000_0000;

/// A perturbed function on one coset lattice.
///
/// `f(x₀+k) = c1·αᵏ + c2·βᵏ + η(k)` where the first two terms solve the
/// equation exactly and `η` is seeded noise with
/// `‖η(k)‖ ≤ scale · κ · e^{x₀+k}`, `κ = 1/(1 + |p|/e + |q|/e²)`.
/// The normalisation makes the residual `f(x) − p f(x−1) + q f(x−2)` bounded
/// by `scale · eˣ`, so any `scale ≤ 1` satisfies `‖residual(x)‖ ≤ eˣ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    spectrum: Spectrum,
    anchor: f64,
    c1: VectorX,
    c2: VectorX,
    noise_scale: f64,
    seed: u64,
    kappa: f64,
    c1_norm: f64,
    c2_norm: f64,
}

impl Scenario {
    pub fn new(
        spectrum: &Spectrum,
        anchor: f64,
        c1: VectorX,
        c2: VectorX,
        noise_scale: f64,
        seed: u64,
    ) -> Result<Self> {
        if c1.dim() != c2.dim() {
            return Err(Error::Usage(format!(
                "coefficient vectors differ in dimension ({} vs {})",
                c1.dim(),
                c2.dim()
            )));
        }
        if !anchor.is_finite() {
            return Err(Error::Domain(format!(
                "anchor must be finite, got {anchor}"
            )));
        }
        if !(noise_scale >= 0.0 && noise_scale.is_finite()) {
            return Err(Error::Domain(format!(
                "noise scale must be finite and >= 0, got {noise_scale}"
            )));
        }
        let (p, q) = (spectrum.p(), spectrum.q());
        let kappa = 1.0 / (1.0 + p.abs() / E + q.abs() / (E * E));
        Ok(Self {
            spectrum: *spectrum,
            anchor,
            c1_norm: norm(&c1),
            c2_norm: norm(&c2),
            c1,
            c2,
            noise_scale,
            seed,
            kappa,
        })
    }

    /// Scenario whose exact-part coefficients are drawn from `seed` as well,
    /// with coordinates uniform in `[-1, 1]`.
    pub fn seeded(
        spectrum: &Spectrum,
        dim: usize,
        anchor: f64,
        noise_scale: f64,
        seed: u64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Usage("dimension must be >= 1".into()));
        }
        let mut s = stream(seed, COEF_SALT, 0);
        let mut draw =
            || VectorX::from_raw((0..dim).map(|_| 2.0 * unit_f64(&mut s) - 1.0).collect());
        let c1 = draw();
        let c2 = draw();
        Self::new(spectrum, anchor, c1, c2, noise_scale, seed)
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.c1.dim()
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn noise_scale(&self) -> f64 {
        self.noise_scale
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn c1(&self) -> &VectorX {
        &self.c1
    }

    pub fn c2(&self) -> &VectorX {
        &self.c2
    }

    /// Same scenario with a different noise scale.
    pub fn with_noise_scale(&self, noise_scale: f64) -> Result<Self> {
        Self::new(
            &self.spectrum,
            self.anchor,
            self.c1.clone(),
            self.c2.clone(),
            noise_scale,
            self.seed,
        )
    }

    /// The lattice point `x₀ + k`.
    pub fn point(&self, k: i32) -> f64 {
        self.anchor + f64::from(k)
    }

    /// Lattice index of `x`, or a usage error when `x` is off the lattice.
    pub fn locate(&self, x: f64) -> Result<i32> {
        let k = (x - self.anchor).round();
        let off = (x - (self.anchor + k)).abs();
        if !x.is_finite() || off > 1e-9 * (1.0 + x.abs()) || k.abs() > f64::from(i32::MAX / 2) {
            return Err(Error::Usage(format!(
                "x={x} is not on the lattice {} + Z",
                self.anchor
            )));
        }
        Ok(k as i32)
    }

    /// Residual envelope `ε(x) = eˣ`.
    pub fn envelope(&self, x: f64) -> f64 {
        x.exp()
    }

    /// Upper bound on `‖η(k)‖`.
    pub fn noise_amplitude(&self, k: i32) -> f64 {
        self.noise_scale * self.kappa * self.envelope(self.point(k))
    }

    /// Certified bound on the ideal residual `‖f(x)−pf(x−1)+qf(x−2)‖` at `x₀+k`.
    pub fn residual_bound(&self, k: i32) -> f64 {
        self.noise_scale * self.envelope(self.point(k)) * (1.0 + 8.0 * EPS)
    }

    /// The seeded noise vector at lattice index `k`: a direction uniform on
    /// the unit sphere (normalised Box–Muller normals) times a magnitude
    /// uniform in `[0, amplitude)`.
    pub fn noise_at(&self, k: i32) -> VectorX {
        let dim = self.dim();
        let amp = self.noise_amplitude(k);
        if amp == 0.0 {
            return VectorX::zeros(dim);
        }
        let mut s = stream(self.seed, NOISE_SALT, i64::from(k));
        let mut dir = Vec::with_capacity(dim + 1);
        while dir.len() < dim {
            let u1 = 1.0 - unit_f64(&mut s);
            let u2 = unit_f64(&mut s);
            let r = (-2.0 * u1.ln()).sqrt();
            dir.push(r * (TAU * u2).cos());
            dir.push(r * (TAU * u2).sin());
        }
        dir.truncate(dim);
        let mut dir = VectorX::from_raw(dir);
        let n = norm(&dir);
        if n == 0.0 {
            dir = VectorX::unit(dim, 0);
        } else {
            dir = dir.scale(1.0 / n);
        }
        let magnitude = amp * unit_f64(&mut s);
        dir.scale(magnitude)
    }

    pub fn exact_at(&self, k: i32) -> VectorX {
        let a = self.spectrum.alpha.powi(k);
        let b = self.spectrum.beta.powi(k);
        self.c1.scale(a).axpy(b, &self.c2)
    }

    pub fn eval_at(&self, k: i32) -> VectorX {
        &self.exact_at(k) + &self.noise_at(k)
    }

    /// `f(x)`; `x` must lie on the lattice.
    pub fn eval_f(&self, x: f64) -> Result<VectorX> {
        Ok(self.eval_at(self.locate(x)?))
    }

    /// Bound on `‖f(x₀+k)‖` of the ideal function.
    pub fn magnitude(&self, k: i32) -> f64 {
        self.c1_norm * self.spectrum.alpha.abs().powi(k)
            + self.c2_norm * self.spectrum.beta.abs().powi(k)
            + self.noise_amplitude(k)
    }

    /// First-order bound on `‖eval_at(k) − f_ideal(x₀+k)‖`.
    pub fn eval_error(&self, k: i32) -> f64 {
        (f64::from(k.unsigned_abs().min(1 << 20) as i32) + 8.0) * EPS * self.magnitude(k)
    }
}

/// Truncation rule for the limits `G` and `H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub target_tail: f64,
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            target_tail: 1e-10,
            max_terms: 500,
        }
    }
}

impl TruncationPolicy {
    pub fn new(target_tail: f64, max_terms: usize) -> Result<Self> {
        if !(target_tail > 0.0 && target_tail.is_finite()) {
            return Err(Error::Domain(format!(
                "target tail must be positive, got {target_tail}"
            )));
        }
        if max_terms == 0 {
            return Err(Error::Domain("max_terms must be >= 1".into()));
        }
        Ok(Self {
            target_tail,
            max_terms,
        })
    }
}

/// Which root drives the sequence: `G_n` uses `α`, `H_n` uses `β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lead {
    Alpha,
    Beta,
}

impl Lead {
    fn roots(self, spectrum: &Spectrum) -> (f64, f64) {
        match self {
            Lead::Alpha => (spectrum.alpha, spectrum.beta),
            Lead::Beta => (spectrum.beta, spectrum.alpha),
        }
    }
}

/// `leadⁿ (f(x−n) − other · f(x−n−1))` at lattice index `k`.
pub fn sequence_term(sc: &Scenario, spectrum: &Spectrum, lead: Lead, k: i32, n: u32) -> VectorX {
    let (r, s) = lead.roots(spectrum);
    let n = n as i32;
    let a = sc.eval_at(k - n);
    let b = sc.eval_at(k - n - 1);
    a.axpy(-s, &b).scale(r.powi(n))
}

/// Floating-point error bound for [`sequence_term`].
pub fn sequence_term_rounding(
    sc: &Scenario,
    spectrum: &Spectrum,
    lead: Lead,
    k: i32,
    n: u32,
) -> f64 {
    let (r, s) = lead.roots(spectrum);
    let ni = n as i32;
    let (j1, j2) = (k - ni, k - ni - 1);
    let w = r.abs().powi(ni);
    w * (sc.eval_error(j1)
        + s.abs() * sc.eval_error(j2)
        + (f64::from(n) + 8.0) * EPS * (sc.magnitude(j1) + s.abs() * sc.magnitude(j2)))
}

pub fn g_n_at(sc: &Scenario, spectrum: &Spectrum, k: i32, n: u32) -> VectorX {
    sequence_term(sc, spectrum, Lead::Alpha, k, n)
}

pub fn h_n_at(sc: &Scenario, spectrum: &Spectrum, k: i32, n: u32) -> VectorX {
    sequence_term(sc, spectrum, Lead::Beta, k, n)
}

/// `G_n(x) = αⁿ (f(x−n) − β f(x−n−1))`
pub fn g_n(sc: &Scenario, spectrum: &Spectrum, x: f64, n: u32) -> Result<VectorX> {
    Ok(g_n_at(sc, spectrum, sc.locate(x)?, n))
}

/// `H_n(x) = βⁿ (f(x−n) − α f(x−n−1))`
pub fn h_n(sc: &Scenario, spectrum: &Spectrum, x: f64, n: u32) -> Result<VectorX> {
    Ok(h_n_at(sc, spectrum, sc.locate(x)?, n))
}

/// `f(x) − p f(x−1) + q f(x−2)` at lattice index `k`.
pub fn residual_at(sc: &Scenario, c: &Coefficients, k: i32) -> VectorX {
    sc.eval_at(k)
        .axpy(-c.p, &sc.eval_at(k - 1))
        .axpy(c.q, &sc.eval_at(k - 2))
}

/// Floating-point error bound for [`residual_at`].
pub fn residual_rounding(sc: &Scenario, c: &Coefficients, k: i32) -> f64 {
    let (p, q) = (c.p.abs(), c.q.abs());
    let eval = sc.eval_error(k) + p * sc.eval_error(k - 1) + q * sc.eval_error(k - 2);
    let mags = sc.magnitude(k) + p * sc.magnitude(k - 1) + q * sc.magnitude(k - 2);
    eval + 4.0 * EPS * mags
}

/// A truncated limit of `G_n` or `H_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub value: VectorX,
    /// Number of the term returned (`N`).
    pub terms: u32,
    /// Certified bound on `‖G_N − G‖` for the ideal function.
    pub tail_bound: f64,
    /// Bound on the floating-point error of the returned `G_N`.
    pub rounding_bound: f64,
}

impl LimitEstimate {
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }
}

/// Geometric tail `Σ_{j≥n} |r|ʲ R(x−j)` with `R(y) = c·e^y`, i.e.
/// `c·eˣ·ρⁿ/(1−ρ)` for `ρ = |r|/e`.
fn geometric_tail(residual_at_x: f64, rate: f64, n: u32) -> f64 {
    if residual_at_x == 0.0 {
        return 0.0;
    }
    let rho = rate.abs() / E;
    residual_at_x * rho.powi(n as i32) / (1.0 - rho)
}

/// Smallest `N ≤ max_terms` whose tail meets the target.
pub fn choose_terms(
    sc: &Scenario,
    rate: f64,
    k: i32,
    pol: &TruncationPolicy,
) -> Result<(u32, f64)> {
    let c = sc.residual_bound(k);
    let max = u32::try_from(pol.max_terms).unwrap_or(u32::MAX);
    for n in 0..=max {
        let tail = geometric_tail(c, rate, n);
        if tail <= pol.target_tail {
            return Ok((n, tail));
        }
    }
    Err(Error::TruncationFailure {
        achieved: geometric_tail(c, rate, max),
        target: pol.target_tail,
        max_terms: pol.max_terms,
    })
}

pub fn limit_at(
    sc: &Scenario,
    spectrum: &Spectrum,
    lead: Lead,
    k: i32,
    pol: &TruncationPolicy,
) -> Result<LimitEstimate> {
    let (rate, _) = lead.roots(spectrum);
    let (n, tail) = choose_terms(sc, rate, k, pol)?;
    Ok(LimitEstimate {
        value: sequence_term(sc, spectrum, lead, k, n),
        terms: n,
        tail_bound: tail,
        rounding_bound: sequence_term_rounding(sc, spectrum, lead, k, n),
    })
}

/// `G(x) = lim G_n(x)`, truncated per `pol`.
pub fn limit_g(
    sc: &Scenario,
    spectrum: &Spectrum,
    x: f64,
    pol: &TruncationPolicy,
) -> Result<LimitEstimate> {
    limit_at(sc, spectrum, Lead::Alpha, sc.locate(x)?, pol)
}

/// `H(x) = lim H_n(x)`, truncated per `pol`.
pub fn limit_h(
    sc: &Scenario,
    spectrum: &Spectrum,
    x: f64,
    pol: &TruncationPolicy,
) -> Result<LimitEstimate> {
    limit_at(sc, spectrum, Lead::Beta, sc.locate(x)?, pol)
}

/// The reconstructed exact solution at one lattice point.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub value: VectorX,
    /// Bounds `‖F_returned − F_ideal‖ + ‖eval_f(x) − f_ideal(x)‖`, so that
    /// comparisons of the returned `F` with `eval_f(x)` are certified.
    pub error_bound: f64,
    pub g: LimitEstimate,
    pub h: LimitEstimate,
}

pub fn construct_at(
    sc: &Scenario,
    spectrum: &Spectrum,
    k: i32,
    pol: &TruncationPolicy,
) -> Result<Reconstruction> {
    let g = limit_at(sc, spectrum, Lead::Alpha, k, pol)?;
    let h = limit_at(sc, spectrum, Lead::Beta, k, pol)?;
    let d = spectrum.alpha - spectrum.beta;
    let (a, b) = (spectrum.alpha / d, spectrum.beta / d);
    let value = g.value.scale(a).axpy(-b, &h.value);
    let combine = 4.0 * EPS * (a.abs() * norm(&g.value) + b.abs() * norm(&h.value));
    let error_bound =
        a.abs() * g.error_bound() + b.abs() * h.error_bound() + combine + sc.eval_error(k);
    Ok(Reconstruction {
        value,
        error_bound,
        g,
        h,
    })
}

/// `F(x) = α/(α−β)·G(x) − β/(α−β)·H(x)` with its error bound.
pub fn construct_f(
    sc: &Scenario,
    spectrum: &Spectrum,
    x: f64,
    pol: &TruncationPolicy,
) -> Result<Reconstruction> {
    construct_at(sc, spectrum, sc.locate(x)?, pol)
}

/// `‖F(x) − p F(x−1) + q F(x−2)‖`
pub fn recurrence_residual(fx: &VectorX, fx1: &VectorX, fx2: &VectorX, c: &Coefficients) -> f64 {
    norm(&fx.axpy(-c.p, fx1).axpy(c.q, fx2))
}
