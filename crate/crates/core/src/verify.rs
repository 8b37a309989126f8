//! Checks of the stability theorem on concrete scenarios.
//!
//! Every check produces [`CheckRow`]s of the form `lhs ≥ rhs`: the row
//! passes when `margin = lhs − rhs ≥ −tolerance`, where the tolerance is
//! the configured one plus a per-row allowance that accounts for truncation
//! and floating-point rounding. Rows are always sorted by `(check, x, t)`.
//!
//! For the index-based checks (telescoping identity and Cauchy estimate) the
//! `t` column carries the sequence index `n`.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::distfn::{phi, scale_arg, DistributionFn, PhiFamily};
use crate::error::{Error, Result};
use crate::normal::std_normal_cdf;
use crate::rnspace::{norm, InducedKind, RNSpace, VectorX};
use crate::solver::{
    construct_at, g_n_at, h_n_at, limit_at, recurrence_residual, residual_at, residual_rounding,
    sequence_term_rounding, Lead, Scenario, TruncationPolicy,
};
use crate::stability::{Coefficients, Spectrum};

const EPS: f64 = f64::EPSILON;

pub const HYPOTHESIS: &str = "hypothesis";
pub const HYPOTHESIS_REDUCED: &str = "hypothesis_reduced";
pub const IDENTITY_G: &str = "telescoping_identity_g";
pub const IDENTITY_H: &str = "telescoping_identity_h";
pub const CAUCHY_G: &str = "cauchy_g";
pub const CAUCHY_H: &str = "cauchy_h";
pub const INTERMEDIATE_G: &str = "intermediate_g";
pub const INTERMEDIATE_G_REDUCED: &str = "intermediate_g_reduced";
pub const INTERMEDIATE_H: &str = "intermediate_h";
pub const INTERMEDIATE_H_REDUCED: &str = "intermediate_h_reduced";
pub const CONCLUSION: &str = "conclusion";
pub const CONCLUSION_REDUCED: &str = "conclusion_reduced";
pub const SOLUTION_RESIDUAL: &str = "solution_residual";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute slack for comparisons of distribution values and norms.
    pub distributional: f64,
    /// Bound on the normalised deviation of exact algebraic identities.
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            distributional: 1e-9,
            identity: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: &'static str,
    pub x: f64,
    pub t: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`
    pub margin: f64,
    /// Configured tolerance plus the row's truncation and rounding allowance.
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(
        check: &'static str,
        x: f64,
        t: Option<f64>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        let margin = lhs - rhs;
        Self {
            check,
            x,
            t,
            lhs,
            rhs,
            margin,
            tolerance,
            pass: margin >= -tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckSummary {
    pub check: &'static str,
    pub min_margin: f64,
    pub passed: bool,
    pub points: usize,
    pub failures: usize,
}

fn row_order(a: &CheckRow, b: &CheckRow) -> Ordering {
    let t = |r: &CheckRow| r.t.unwrap_or(f64::NEG_INFINITY);
    a.check
        .cmp(b.check)
        .then(a.x.total_cmp(&b.x))
        .then(t(a).total_cmp(&t(b)))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    rows: Vec<CheckRow>,
}

impl VerificationReport {
    pub fn new(mut rows: Vec<CheckRow>) -> Self {
        rows.sort_by(row_order);
        Self { rows }
    }

    pub fn rows(&self) -> &[CheckRow] {
        &self.rows
    }

    pub fn rows_for<'a>(&'a self, check: &'a str) -> impl Iterator<Item = &'a CheckRow> + 'a {
        self.rows.iter().filter(move |r| r.check == check)
    }

    pub fn merge(mut self, other: VerificationReport) -> Self {
        self.rows.extend(other.rows);
        self.rows.sort_by(row_order);
        self
    }

    /// One entry per check, in check-name order.
    pub fn summaries(&self) -> Vec<CheckSummary> {
        let mut out: Vec<CheckSummary> = Vec::new();
        for r in &self.rows {
            match out.last_mut() {
                Some(s) if s.check == r.check => {
                    s.min_margin = s.min_margin.min(r.margin);
                    s.points += 1;
                    if !r.pass {
                        s.failures += 1;
                        s.passed = false;
                    }
                }
                _ => out.push(CheckSummary {
                    check: r.check,
                    min_margin: r.margin,
                    passed: r.pass,
                    points: 1,
                    failures: usize::from(!r.pass),
                }),
            }
        }
        out
    }

    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// 61 points, logarithmically spaced over `[1e-3, 1e3]`.
pub fn default_tgrid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 61).expect("valid default grid")
}

/// `points` values spaced logarithmically over `[min, max]`.
pub fn log_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min && max.is_finite()) || points == 0 || (points == 1 && max != min) {
        return Err(Error::Usage(format!(
            "invalid t-grid: min={min}, max={max}, points={points}"
        )));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let (a, b) = (min.log10(), max.log10());
    let step = (b - a) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| match i {
            0 => min,
            i if i == points - 1 => max,
            i => 10f64.powf(a + step * i as f64),
        })
        .collect())
}

fn check_inputs(sc: &Scenario, space: &RNSpace, tgrid: &[f64]) -> Result<()> {
    if space.dimension != sc.dim() {
        return Err(Error::Usage(format!(
            "space dimension {} does not match scenario dimension {}",
            space.dimension,
            sc.dim()
        )));
    }
    if tgrid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::Usage(
            "t-grid values must be positive and finite".into(),
        ));
    }
    Ok(())
}

fn locate_all(sc: &Scenario, lattice: &[f64]) -> Result<Vec<(f64, i32)>> {
    lattice.iter().map(|&x| Ok((x, sc.locate(x)?))).collect()
}

/// Runs `f` for each lattice point in parallel and concatenates in input order.
fn per_point<F>(points: &[(f64, i32)], f: F) -> Result<VerificationReport>
where
    F: Fn(f64, i32) -> Result<Vec<CheckRow>> + Sync + Send,
{
    let parts: Vec<Vec<CheckRow>> = points
        .par_iter()
        .map(|&(x, k)| f(x, k))
        .collect::<Result<_>>()?;
    Ok(VerificationReport::new(
        parts.into_iter().flatten().collect(),
    ))
}

/// Norm of `v` plus a bound on its distance from the ideal value, given a
/// bound `err` on the vector error.
fn norm_with_error(space: &RNSpace, v: &VectorX, err: f64) -> (f64, f64) {
    let n = space.norm_of(v);
    (n, err + (v.dim() as f64 + 4.0) * EPS * n)
}

/// Width of the band `μ_{n−δ}(t) − μ_{n+δ}(t)` that contains the ideal value.
fn mu_band(space: &RNSpace, n: f64, delta: f64, t: f64) -> f64 {
    let hi = space.mu_of_norm((n - delta).max(0.0)).eval(t);
    let lo = space.mu_of_norm(n + delta).eval(t);
    hi - lo
}

/// Whether the `μ ≥ φ` comparison is exactly `‖·‖ ≤ eˣ`.
fn reducible(fam: PhiFamily, space: &RNSpace) -> bool {
    fam == PhiFamily::ExpRatio && space.induced == InducedKind::Ratio
}

/// Distributional rows `μ_n(s·t) ≥ target(t)` over the grid.
#[allow(clippy::too_many_arguments)]
fn distributional_rows(
    check: &'static str,
    space: &RNSpace,
    x: f64,
    n: f64,
    delta: f64,
    stretch: f64,
    target: &DistributionFn,
    tgrid: &[f64],
    tol: f64,
) -> Vec<CheckRow> {
    let mu = space.mu_of_norm(n);
    tgrid
        .iter()
        .map(|&t| {
            let s = t * stretch;
            CheckRow::new(
                check,
                x,
                Some(t),
                mu.eval(s),
                target.eval(t),
                tol + mu_band(space, n, delta, s),
            )
        })
        .collect()
}

/// `μ_{f(x)−pf(x−1)+qf(x−2)}(t) ≥ φ_x(t)` on the lattice and grid.
///
/// With the exponential family in the induced space the comparison is
/// equivalent to `‖residual(x)‖ ≤ eˣ`, which is recorded as well.
pub fn check_hypothesis(
    sc: &Scenario,
    fam: PhiFamily,
    space: &RNSpace,
    c: &Coefficients,
    lattice: &[f64],
    tgrid: &[f64],
    tol: &Tolerances,
) -> Result<VerificationReport> {
    check_inputs(sc, space, tgrid)?;
    let points = locate_all(sc, lattice)?;
    per_point(&points, |x, k| {
        let r = residual_at(sc, c, k);
        let (n, delta) = norm_with_error(space, &r, residual_rounding(sc, c, k));
        let target = phi(fam, x);
        let mut rows = distributional_rows(
            HYPOTHESIS,
            space,
            x,
            n,
            delta,
            1.0,
            &target,
            tgrid,
            tol.distributional,
        );
        if reducible(fam, space) {
            rows.push(CheckRow::new(
                HYPOTHESIS_REDUCED,
                x,
                None,
                x.exp(),
                n,
                tol.distributional + delta,
            ));
        }
        Ok(rows)
    })
}

/// Size of the quantities that enter `leadⁿ(f(x−n) − other·f(x−n−1))`.
fn term_scale(sc: &Scenario, spectrum: &Spectrum, lead: Lead, k: i32, n: u32) -> f64 {
    let (r, s) = match lead {
        Lead::Alpha => (spectrum.alpha, spectrum.beta),
        Lead::Beta => (spectrum.beta, spectrum.alpha),
    };
    let j = k - n as i32;
    r.abs().powi(n as i32) * (sc.magnitude(j) + s.abs() * sc.magnitude(j - 1))
}

/// Telescoping identity and Cauchy estimate for both sequences.
///
/// Identity rows hold the deviation of `g_n − g_{n+1}` from `αⁿ·residual(x−n)`,
/// divided by the size of the summands (at least 1), against `tol.identity`.
/// Cauchy rows compare `Σ_{j=n}^{n+m−1} |α|ʲ e^{x−j}` with `‖g_n − g_{n+m}‖`
/// and keep the smallest margin over `1 ≤ m ≤ m_max`. The `h` rows mirror
/// both with `β`.
pub fn check_telescoping(
    sc: &Scenario,
    spectrum: &Spectrum,
    lattice: &[f64],
    n_max: u32,
    m_max: u32,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    if n_max < 2 || m_max < 1 {
        return Err(Error::Usage(format!(
            "telescoping needs n_max >= 2 and m_max >= 1, got {n_max}, {m_max}"
        )));
    }
    let points = locate_all(sc, lattice)?;
    let c = spectrum.coefficients;
    per_point(&points, |x, k| {
        let mut rows = Vec::new();
        for (lead, rate, identity, cauchy) in [
            (Lead::Alpha, spectrum.alpha, IDENTITY_G, CAUCHY_G),
            (Lead::Beta, spectrum.beta, IDENTITY_H, CAUCHY_H),
        ] {
            let last = n_max + m_max;
            let terms: Vec<VectorX> = (0..=last)
                .map(|n| match lead {
                    Lead::Alpha => g_n_at(sc, spectrum, k, n),
                    Lead::Beta => h_n_at(sc, spectrum, k, n),
                })
                .collect();
            let rounding: Vec<f64> = (0..=last)
                .map(|n| sequence_term_rounding(sc, spectrum, lead, k, n))
                .collect();
            for n in 0..=n_max {
                let ni = n as usize;
                let j = k - n as i32;
                let w = rate.powi(n as i32);
                let step = &terms[ni] - &terms[ni + 1];
                let dev = norm(&(&step - &residual_at(sc, &c, j).scale(w)));
                let scale = term_scale(sc, spectrum, lead, k, n)
                    + term_scale(sc, spectrum, lead, k, n + 1)
                    + w.abs()
                        * (sc.magnitude(j)
                            + c.p.abs() * sc.magnitude(j - 1)
                            + c.q.abs() * sc.magnitude(j - 2));
                rows.push(CheckRow::new(
                    identity,
                    x,
                    Some(f64::from(n)),
                    0.0,
                    dev / scale.max(1.0),
                    tol.identity,
                ));

                let mut bound = 0.0;
                let mut worst: Option<CheckRow> = None;
                for m in 1..=m_max {
                    let i = n + m - 1;
                    bound += rate.abs().powi(i as i32) * sc.envelope(x - f64::from(i));
                    let gap = norm(&(&terms[ni] - &terms[(n + m) as usize]));
                    let allow = rounding[ni] + rounding[(n + m) as usize] + 4.0 * EPS * gap;
                    let row = CheckRow::new(
                        cauchy,
                        x,
                        Some(f64::from(n)),
                        bound,
                        gap,
                        tol.distributional + allow,
                    );
                    if worst.as_ref().is_none_or(|w| row.margin < w.margin) {
                        worst = Some(row);
                    }
                }
                rows.extend(worst);
            }
        }
        Ok(rows)
    })
}

/// `μ_{f(x)−βf(x−1)−G(x)}(t/(1−|α|)) ≥ φ_x(t)` and its mirror
/// `μ_{f(x)−αf(x−1)−H(x)}(t/(1−|β|)) ≥ φ_x(t)`.
///
/// Reduced forms: `‖f(x)−βf(x−1)−G(x)‖ ≤ eˣ/(1−|α|)` and the mirror.
#[allow(clippy::too_many_arguments)]
pub fn check_intermediate_bounds(
    sc: &Scenario,
    spectrum: &Spectrum,
    fam: PhiFamily,
    space: &RNSpace,
    pol: &TruncationPolicy,
    lattice: &[f64],
    tgrid: &[f64],
    tol: &Tolerances,
) -> Result<VerificationReport> {
    check_inputs(sc, space, tgrid)?;
    let points = locate_all(sc, lattice)?;
    per_point(&points, |x, k| {
        let mut rows = Vec::new();
        let target = phi(fam, x);
        for (lead, dist, reduced) in [
            (Lead::Alpha, INTERMEDIATE_G, INTERMEDIATE_G_REDUCED),
            (Lead::Beta, INTERMEDIATE_H, INTERMEDIATE_H_REDUCED),
        ] {
            let (rate, other) = match lead {
                Lead::Alpha => (spectrum.alpha, spectrum.beta),
                Lead::Beta => (spectrum.beta, spectrum.alpha),
            };
            let lim = limit_at(sc, spectrum, lead, k, pol)?;
            let (f0, f1) = (sc.eval_at(k), sc.eval_at(k - 1));
            let v = &f0.axpy(-other, &f1) - &lim.value;
            let err = lim.error_bound()
                + sc.eval_error(k)
                + other.abs() * sc.eval_error(k - 1)
                + 4.0 * EPS * (norm(&f0) + other.abs() * norm(&f1) + norm(&lim.value));
            let (n, delta) = norm_with_error(space, &v, err);
            let factor = 1.0 - rate.abs();
            rows.extend(distributional_rows(
                dist,
                space,
                x,
                n,
                delta,
                1.0 / factor,
                &target,
                tgrid,
                tol.distributional,
            ));
            if reducible(fam, space) {
                rows.push(CheckRow::new(
                    reduced,
                    x,
                    None,
                    x.exp() / factor,
                    n,
                    tol.distributional + delta,
                ));
            }
        }
        Ok(rows)
    })
}

/// `μ_{f(x)−F(x)}(t) ≥ φ_x(γt)` for the constructed `F`.
///
/// Reduced form: `‖f(x)−F(x)‖ ≤ eˣ/γ`. The construction's error bound is
/// added to the tolerance of every row.
#[allow(clippy::too_many_arguments)]
pub fn check_conclusion(
    sc: &Scenario,
    spectrum: &Spectrum,
    fam: PhiFamily,
    space: &RNSpace,
    pol: &TruncationPolicy,
    lattice: &[f64],
    tgrid: &[f64],
    tol: &Tolerances,
) -> Result<VerificationReport> {
    check_inputs(sc, space, tgrid)?;
    let points = locate_all(sc, lattice)?;
    per_point(&points, |x, k| {
        let rec = construct_at(sc, spectrum, k, pol)?;
        let f = sc.eval_at(k);
        let d = &f - &rec.value;
        let err = rec.error_bound + 4.0 * EPS * (norm(&f) + norm(&rec.value));
        let (n, delta) = norm_with_error(space, &d, err);
        let target = scale_arg(&phi(fam, x), spectrum.gamma)?;
        let mut rows = distributional_rows(
            CONCLUSION,
            space,
            x,
            n,
            delta,
            1.0,
            &target,
            tgrid,
            tol.distributional,
        );
        if reducible(fam, space) {
            rows.push(CheckRow::new(
                CONCLUSION_REDUCED,
                x,
                None,
                x.exp() / spectrum.gamma,
                n,
                tol.distributional + delta,
            ));
        }
        Ok(rows)
    })
}

/// `‖F(x) − pF(x−1) + qF(x−2)‖ ≤ (1+|p|+|q|)·max error_bound` at every
/// lattice point whose two predecessors are constructed as well.
pub fn check_solution_residual(
    sc: &Scenario,
    spectrum: &Spectrum,
    pol: &TruncationPolicy,
    lattice: &[f64],
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let points = locate_all(sc, lattice)?;
    let c = spectrum.coefficients;
    let gain = c.residual_gain();
    per_point(&points, |x, k| {
        let recs = [
            construct_at(sc, spectrum, k, pol)?,
            construct_at(sc, spectrum, k - 1, pol)?,
            construct_at(sc, spectrum, k - 2, pol)?,
        ];
        let r = recurrence_residual(&recs[0].value, &recs[1].value, &recs[2].value, &c);
        let eb = recs.iter().map(|r| r.error_bound).fold(0.0, f64::max);
        let round = 4.0
            * EPS
            * (norm(&recs[0].value)
                + c.p.abs() * norm(&recs[1].value)
                + c.q.abs() * norm(&recs[2].value));
        Ok(vec![CheckRow::new(
            SOLUTION_RESIDUAL,
            x,
            None,
            gain * eb,
            r,
            tol.distributional + round,
        )])
    })
}

/// The curve `‖f(x)−F(x)‖` against the bound `eˣ/γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries {
    pub x: Vec<f64>,
    pub error: Vec<f64>,
    pub bound: Vec<f64>,
}

pub fn conclusion_series(
    sc: &Scenario,
    spectrum: &Spectrum,
    pol: &TruncationPolicy,
    lattice: &[f64],
) -> Result<ErrorSeries> {
    let points = locate_all(sc, lattice)?;
    let error: Vec<f64> = points
        .par_iter()
        .map(|&(_, k)| {
            Ok(norm(
                &(&sc.eval_at(k) - &construct_at(sc, spectrum, k, pol)?.value),
            ))
        })
        .collect::<Result<_>>()?;
    Ok(ErrorSeries {
        x: points.iter().map(|p| p.0).collect(),
        bound: points.iter().map(|p| p.0.exp() / spectrum.gamma).collect(),
        error,
    })
}

/// One point of the comparison between the two Gaussian readings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryRow {
    pub x: f64,
    pub t: f64,
    /// `Φ(γt − x)`
    pub scaled_time: f64,
    /// `Φ(γ(t − x))`
    pub scaled_shift: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn name(self) -> &'static str {
        match self {
            Sign::Negative => "negative",
            Sign::Zero => "zero",
            Sign::Positive => "positive",
        }
    }
}

/// Sign of the nonzero differences over the t-grid at one `x`; `None` when
/// both signs occur. Points where both readings round to the same value
/// (typically 1 at large `t`) do not count as a sign change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignRegion {
    pub x: f64,
    pub sign: Option<Sign>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryTable {
    pub gamma: f64,
    pub rows: Vec<CorollaryRow>,
    pub regions: Vec<SignRegion>,
}

/// Tabulates `Φ(γt − x) − Φ(γ(t − x))`. Informational only.
pub fn check_corollary_readings(
    spectrum: &Spectrum,
    lattice: &[f64],
    tgrid: &[f64],
) -> CorollaryTable {
    let g = spectrum.gamma;
    let mut rows = Vec::with_capacity(lattice.len() * tgrid.len());
    let mut regions = Vec::with_capacity(lattice.len());
    for &x in lattice {
        let (mut pos, mut neg) = (false, false);
        for &t in tgrid {
            let a = std_normal_cdf(g * t - x);
            let b = std_normal_cdf(g * (t - x));
            let d = a - b;
            pos |= d > 0.0;
            neg |= d < 0.0;
            rows.push(CorollaryRow {
                x,
                t,
                scaled_time: a,
                scaled_shift: b,
                difference: d,
            });
        }
        let sign = match (pos, neg) {
            (true, true) => None,
            (true, false) => Some(Sign::Positive),
            (false, true) => Some(Sign::Negative),
            (false, false) => Some(Sign::Zero),
        };
        regions.push(SignRegion { x, sign });
    }
    rows.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.t.total_cmp(&b.t)));
    regions.sort_by(|a, b| a.x.total_cmp(&b.x));
    CorollaryTable {
        gamma: g,
        rows,
        regions,
    }
}
