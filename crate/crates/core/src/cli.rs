//! Batch front end: config parsing, check runs and CSV output.
//!
//! The config format is line based: `[section]` headers, `key = value`
//! pairs and `#` comments. See the README for the full grammar.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distfn::{phi, PhiFamily};
use crate::error::{Error, Result};
use crate::rnspace::{check_rn_axioms, AxiomSampler, InducedKind, NormKind, RNSpace, VectorX};
use crate::solver::{Scenario, TruncationPolicy};
use crate::stability::{solve_characteristic, spectrum_from_roots, Coefficients, Spectrum};
use crate::tnorm::{check_axioms, TNorm};
use crate::verify::{
    check_conclusion, check_corollary_readings, check_hypothesis, check_intermediate_bounds,
    check_solution_residual, check_telescoping, conclusion_series, log_grid, Tolerances,
    VerificationReport,
};

/// Overrides the default output directory.
pub const OUT_DIR_ENV: &str = "RNSTAB_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "rnstab-out";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    Hypothesis,
    Telescoping,
    Intermediate,
    Conclusion,
    SolutionResidual,
    Corollary,
}

impl CheckKind {
    pub const ALL: [CheckKind; 6] = [
        CheckKind::Hypothesis,
        CheckKind::Telescoping,
        CheckKind::Intermediate,
        CheckKind::Conclusion,
        CheckKind::SolutionResidual,
        CheckKind::Corollary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Hypothesis => "hypothesis",
            CheckKind::Telescoping => "telescoping",
            CheckKind::Intermediate => "intermediate",
            CheckKind::Conclusion => "conclusion",
            CheckKind::SolutionResidual => "solution_residual",
            CheckKind::Corollary => "corollary",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// How the equation was given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EquationInput {
    Coefficients { p: f64, q: f64 },
    Roots { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub equation: EquationInput,
    pub spectrum: Spectrum,
    pub dimension: usize,
    pub anchor: f64,
    pub k_min: i32,
    pub k_max: i32,
    pub seed: u64,
    pub noise_scale: f64,
    /// Explicit exact-part coefficients; drawn from the seed when absent.
    pub c1: Option<VectorX>,
    pub c2: Option<VectorX>,
    pub family: PhiFamily,
    pub induced: InducedKind,
    pub norm: NormKind,
    pub policy: TruncationPolicy,
    pub tgrid: Vec<f64>,
    pub tolerances: Tolerances,
    pub checks: Vec<CheckKind>,
    pub n_max: u32,
    pub m_max: u32,
    pub out_dir: Option<PathBuf>,
    pub run_id: String,
}

impl RunConfig {
    pub fn scenario(&self) -> Result<Scenario> {
        match (&self.c1, &self.c2) {
            (Some(c1), Some(c2)) => Scenario::new(
                &self.spectrum,
                self.anchor,
                c1.clone(),
                c2.clone(),
                self.noise_scale,
                self.seed,
            ),
            _ => Scenario::seeded(
                &self.spectrum,
                self.dimension,
                self.anchor,
                self.noise_scale,
                self.seed,
            ),
        }
    }

    pub fn space(&self) -> Result<RNSpace> {
        Ok(RNSpace::induced(self.dimension)?
            .with_induced(self.induced)
            .with_norm(self.norm))
    }

    pub fn lattice(&self) -> Vec<f64> {
        (self.k_min..=self.k_max)
            .map(|k| self.anchor + f64::from(k))
            .collect()
    }

    /// Explicit directory, then the environment override, then the default.
    pub fn resolved_out_dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}

struct Entry {
    value: String,
    line: usize,
}

const KEYS: &[(&str, &[&str])] = &[
    ("equation", &["p", "q", "alpha", "beta"]),
    (
        "scenario",
        &[
            "dimension",
            "anchor",
            "k_min",
            "k_max",
            "seed",
            "noise_scale",
            "c1",
            "c2",
        ],
    ),
    ("phi", &["family"]),
    ("space", &["induced", "norm"]),
    ("truncation", &["target_tail", "max_terms"]),
    ("tgrid", &["min", "max", "points"]),
    ("tolerance", &["distributional", "identity"]),
    ("checks", &["run", "n_max", "m_max"]),
    ("output", &["dir", "run_id"]),
];

fn config_err(line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

struct Document {
    entries: BTreeMap<String, Entry>,
}

impl Document {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| config_err(line, content, "unterminated section header"))?
                    .trim();
                if !KEYS.iter().any(|(s, _)| *s == name) {
                    return Err(config_err(line, name, "unknown section"));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| config_err(line, content, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let sec = section
                .as_deref()
                .ok_or_else(|| config_err(line, key, "key outside of any section"))?;
            let field = format!("{sec}.{key}");
            let known = KEYS.iter().any(|(s, ks)| *s == sec && ks.contains(&key));
            if !known {
                return Err(config_err(line, &field, "unknown key"));
            }
            if value.is_empty() {
                return Err(config_err(line, &field, "empty value"));
            }
            if let Some(prev) = entries.get(&field) {
                let prev: &Entry = prev;
                return Err(config_err(
                    line,
                    &field,
                    format!("duplicate key (first set on line {})", prev.line),
                ));
            }
            entries.insert(
                field,
                Entry {
                    value: value.to_string(),
                    line,
                },
            );
        }
        Ok(Self { entries })
    }

    fn get(&self, field: &str) -> Option<&Entry> {
        self.entries.get(field)
    }

    fn parsed<T>(
        &self,
        field: &str,
        parse: impl Fn(&str) -> std::result::Result<T, String>,
    ) -> Result<Option<(T, usize)>> {
        match self.get(field) {
            None => Ok(None),
            Some(e) => parse(&e.value)
                .map(|v| Some((v, e.line)))
                .map_err(|m| config_err(e.line, field, m)),
        }
    }

    fn real(&self, field: &str) -> Result<Option<(f64, usize)>> {
        self.parsed(field, parse_real)
    }

    fn int<T: std::str::FromStr>(&self, field: &str) -> Result<Option<(T, usize)>> {
        self.parsed(field, |s| {
            s.parse::<T>()
                .map_err(|_| format!("not a valid integer: `{s}`"))
        })
    }
}

/// A finite real written as a decimal or as a ratio `a/b`.
pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("not a number: `{s}`"))
    };
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b)?);
            if b == 0.0 {
                return Err(format!("zero denominator in `{s}`"));
            }
            a / b
        }
        None => num(s)?,
    };
    if !v.is_finite() {
        return Err(format!("not finite: `{s}`"));
    }
    Ok(v)
}

fn parse_vector(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').map(|c| parse_real(c.trim())).collect()
}

fn parse_family(s: &str) -> std::result::Result<PhiFamily, String> {
    match s {
        "exp_ratio" => Ok(PhiFamily::ExpRatio),
        "gaussian_location" => Ok(PhiFamily::GaussianLocation),
        _ => Err(format!(
            "unknown family `{s}` (exp_ratio, gaussian_location)"
        )),
    }
}

fn parse_induced(s: &str) -> std::result::Result<InducedKind, String> {
    match s {
        "ratio" => Ok(InducedKind::Ratio),
        "eps0_shift" => Ok(InducedKind::Eps0Shift),
        _ => Err(format!("unknown induced norm `{s}` (ratio, eps0_shift)")),
    }
}

fn parse_norm(s: &str) -> std::result::Result<NormKind, String> {
    match s {
        "euclidean" => Ok(NormKind::Euclidean),
        "max" => Ok(NormKind::Max),
        _ => Err(format!("unknown norm `{s}` (euclidean, max)")),
    }
}

fn parse_checks(s: &str) -> std::result::Result<Vec<CheckKind>, String> {
    let mut out = Vec::new();
    for name in s.split(',').map(str::trim) {
        if name == "all" {
            out.extend(CheckKind::ALL);
            continue;
        }
        let c = CheckKind::parse(name).ok_or_else(|| {
            let known: Vec<_> = CheckKind::ALL.iter().map(|c| c.name()).collect();
            format!("unknown check `{name}` (all, {})", known.join(", "))
        })?;
        out.push(c);
    }
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err("no checks listed".into());
    }
    Ok(out)
}

fn parse_run_id(s: &str) -> std::result::Result<String, String> {
    if s.chars()
        .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
    {
        Ok(s.to_string())
    } else {
        Err(format!(
            "run_id `{s}` may only contain letters, digits, `-`, `_` and `.`"
        ))
    }
}

fn resolve_equation(doc: &Document) -> Result<(EquationInput, Spectrum)> {
    let p = doc.real("equation.p")?;
    let q = doc.real("equation.q")?;
    let a = doc.real("equation.alpha")?;
    let b = doc.real("equation.beta")?;
    let coef = p.is_some() || q.is_some();
    let roots = a.is_some() || b.is_some();
    if coef && roots {
        let line = [p, q, a, b]
            .iter()
            .flatten()
            .map(|v| v.1)
            .max()
            .unwrap_or(0);
        return Err(config_err(
            line,
            "equation",
            "give either p, q or alpha, beta, not both",
        ));
    }
    match (p, q, a, b) {
        (Some((p, _)), Some((q, _)), None, None) => {
            let sp = solve_characteristic(Coefficients::new(p, q))?;
            Ok((EquationInput::Coefficients { p, q }, sp))
        }
        (None, None, Some((alpha, _)), Some((beta, _))) => {
            let sp = spectrum_from_roots(alpha, beta)?;
            Ok((EquationInput::Roots { alpha, beta }, sp))
        }
        _ => {
            let line = [p, q, a, b]
                .iter()
                .flatten()
                .map(|v| v.1)
                .next()
                .unwrap_or(0);
            Err(config_err(
                line,
                "equation",
                "need both p and q, or both alpha and beta",
            ))
        }
    }
}

/// Parses and validates a config document, filling in defaults.
///
/// An equation outside the validity region is reported with its own error
/// variant rather than as a config error.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let doc = Document::parse(text)?;
    let (equation, spectrum) = resolve_equation(&doc)?;

    let dimension = match doc.int::<usize>("scenario.dimension")? {
        Some((0, line)) => return Err(config_err(line, "scenario.dimension", "must be >= 1")),
        Some((d, _)) => d,
        None => 2,
    };
    let anchor = doc.real("scenario.anchor")?.map_or(0.0, |v| v.0);
    let k_min = doc.int::<i32>("scenario.k_min")?.map_or(-5, |v| v.0);
    let k_max = doc.int::<i32>("scenario.k_max")?;
    let k_max_line = k_max.map_or(0, |v| v.1);
    let k_max = k_max.map_or(5, |v| v.0);
    if k_min > k_max {
        return Err(config_err(
            k_max_line,
            "scenario.k_max",
            format!("empty range {k_min}..={k_max}"),
        ));
    }
    if k_min < -100_000 || k_max > 100_000 {
        return Err(config_err(
            k_max_line,
            "scenario.k_min",
            "lattice range must stay within +-100000",
        ));
    }
    let seed = doc.int::<u64>("scenario.seed")?.map_or(0, |v| v.0);
    let noise_scale = match doc.real("scenario.noise_scale")? {
        Some((s, line)) if s < 0.0 => {
            return Err(config_err(line, "scenario.noise_scale", "must be >= 0"))
        }
        Some((s, _)) => s,
        None => 0.0,
    };
    let vector = |field: &str| -> Result<Option<VectorX>> {
        match doc.parsed(field, parse_vector)? {
            None => Ok(None),
            Some((v, line)) => {
                if v.len() != dimension {
                    return Err(config_err(
                        line,
                        field,
                        format!("has {} coordinates, dimension is {dimension}", v.len()),
                    ));
                }
                VectorX::new(v)
                    .map(Some)
                    .map_err(|e| config_err(line, field, e.to_string()))
            }
        }
    };
    let c1 = vector("scenario.c1")?;
    let c2 = vector("scenario.c2")?;
    if c1.is_some() != c2.is_some() {
        let line = doc
            .get("scenario.c1")
            .or(doc.get("scenario.c2"))
            .map_or(0, |e| e.line);
        return Err(config_err(
            line,
            "scenario.c1",
            "give both c1 and c2 or neither",
        ));
    }

    let family = doc
        .parsed("phi.family", parse_family)?
        .map_or(PhiFamily::ExpRatio, |v| v.0);
    let induced = doc
        .parsed("space.induced", parse_induced)?
        .map_or(InducedKind::Ratio, |v| v.0);
    let norm = doc
        .parsed("space.norm", parse_norm)?
        .map_or(NormKind::Euclidean, |v| v.0);

    let default_pol = TruncationPolicy::default();
    let target = doc.real("truncation.target_tail")?;
    let max_terms = doc.int::<usize>("truncation.max_terms")?;
    let policy = TruncationPolicy::new(
        target.map_or(default_pol.target_tail, |v| v.0),
        max_terms.map_or(default_pol.max_terms, |v| v.0),
    )
    .map_err(|e| {
        let line = target.map(|v| v.1).or(max_terms.map(|v| v.1)).unwrap_or(0);
        config_err(line, "truncation", e.to_string())
    })?;

    let tmin = doc.real("tgrid.min")?;
    let tmax = doc.real("tgrid.max")?;
    let tpoints = doc.int::<usize>("tgrid.points")?;
    let tgrid = log_grid(
        tmin.map_or(1e-3, |v| v.0),
        tmax.map_or(1e3, |v| v.0),
        tpoints.map_or(61, |v| v.0),
    )
    .map_err(|e| {
        let line = [tmin.map(|v| v.1), tmax.map(|v| v.1), tpoints.map(|v| v.1)]
            .into_iter()
            .flatten()
            .next()
            .unwrap_or(0);
        config_err(line, "tgrid", e.to_string())
    })?;

    let defaults = Tolerances::default();
    let nonneg = |field: &str, default: f64| -> Result<f64> {
        match doc.real(field)? {
            Some((v, line)) if v < 0.0 => Err(config_err(line, field, "must be >= 0")),
            Some((v, _)) => Ok(v),
            None => Ok(default),
        }
    };
    let tolerances = Tolerances {
        distributional: nonneg("tolerance.distributional", defaults.distributional)?,
        identity: nonneg("tolerance.identity", defaults.identity)?,
    };

    let checks = doc
        .parsed("checks.run", parse_checks)?
        .map_or_else(|| CheckKind::ALL.to_vec(), |v| v.0);
    let n_max = match doc.int::<u32>("checks.n_max")? {
        Some((n, line)) if n < 2 => return Err(config_err(line, "checks.n_max", "must be >= 2")),
        Some((n, _)) => n,
        None => 30,
    };
    let m_max = match doc.int::<u32>("checks.m_max")? {
        Some((0, line)) => return Err(config_err(line, "checks.m_max", "must be >= 1")),
        Some((m, _)) => m,
        None => 20,
    };

    let out_dir = doc.get("output.dir").map(|e| PathBuf::from(&e.value));
    let run_id = doc
        .parsed("output.run_id", parse_run_id)?
        .map_or_else(|| "run".to_string(), |v| v.0);

    Ok(RunConfig {
        equation,
        spectrum,
        dimension,
        anchor,
        k_min,
        k_max,
        seed,
        noise_scale,
        c1,
        c2,
        family,
        induced,
        norm,
        policy,
        tgrid,
        tolerances,
        checks,
        n_max,
        m_max,
        out_dir,
        run_id,
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Result of a completed run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub report: VerificationReport,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.report.all_passed()
    }
}

/// Reals are written with 17 significant digits.
fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the configured checks and writes all tables into the output directory.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let sc = cfg.scenario()?;
    let sp = cfg.spectrum;
    let space = cfg.space()?;
    let lattice = cfg.lattice();
    let tol = &cfg.tolerances;
    let mut report = VerificationReport::default();
    for check in &cfg.checks {
        let part = match check {
            CheckKind::Hypothesis => check_hypothesis(
                &sc,
                cfg.family,
                &space,
                &sp.coefficients,
                &lattice,
                &cfg.tgrid,
                tol,
            )?,
            CheckKind::Telescoping => {
                check_telescoping(&sc, &sp, &lattice, cfg.n_max, cfg.m_max, tol)?
            }
            CheckKind::Intermediate => check_intermediate_bounds(
                &sc,
                &sp,
                cfg.family,
                &space,
                &cfg.policy,
                &lattice,
                &cfg.tgrid,
                tol,
            )?,
            CheckKind::Conclusion => check_conclusion(
                &sc,
                &sp,
                cfg.family,
                &space,
                &cfg.policy,
                &lattice,
                &cfg.tgrid,
                tol,
            )?,
            CheckKind::SolutionResidual => {
                check_solution_residual(&sc, &sp, &cfg.policy, &lattice, tol)?
            }
            CheckKind::Corollary => continue,
        };
        report = report.merge(part);
    }
    let series = conclusion_series(&sc, &sp, &cfg.policy, &lattice)?;

    let dir = cfg.resolved_out_dir();
    fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let id = cfg.run_id.as_str();
    let mut files = Vec::new();

    let mut summary: Vec<Vec<String>> = report
        .summaries()
        .into_iter()
        .map(|s| {
            vec![
                id.to_string(),
                s.check.to_string(),
                real(s.min_margin),
                s.passed.to_string(),
                s.points.to_string(),
                s.failures.to_string(),
            ]
        })
        .collect();

    if cfg.checks.contains(&CheckKind::Corollary) {
        let tab = check_corollary_readings(&sp, &lattice, &cfg.tgrid);
        let path = dir.join("corollary.csv");
        write_csv(
            &path,
            &[
                "run_id",
                "x",
                "t",
                "scaled_time",
                "scaled_shift",
                "difference",
            ],
            tab.rows.iter().map(|r| {
                vec![
                    id.to_string(),
                    real(r.x),
                    real(r.t),
                    real(r.scaled_time),
                    real(r.scaled_shift),
                    real(r.difference),
                ]
            }),
        )?;
        files.push(path);
        let path = dir.join("corollary_regions.csv");
        write_csv(
            &path,
            &["run_id", "x", "sign"],
            tab.regions.iter().map(|r| {
                vec![
                    id.to_string(),
                    real(r.x),
                    r.sign.map_or("mixed", |s| s.name()).to_string(),
                ]
            }),
        )?;
        files.push(path);
        summary.push(vec![
            id.to_string(),
            "corollary_readings".to_string(),
            String::new(),
            "true".to_string(),
            tab.rows.len().to_string(),
            "0".to_string(),
        ]);
    }

    let path = dir.join("summary.csv");
    write_csv(
        &path,
        &[
            "run_id",
            "check",
            "min_margin",
            "passed",
            "points",
            "failures",
        ],
        summary,
    )?;
    files.push(path);

    let path = dir.join("detail.csv");
    write_csv(
        &path,
        &[
            "run_id",
            "check",
            "x",
            "t",
            "lhs",
            "rhs",
            "margin",
            "tolerance",
            "pass",
        ],
        report.rows().iter().map(|r| {
            vec![
                id.to_string(),
                r.check.to_string(),
                real(r.x),
                r.t.map_or(String::new(), real),
                real(r.lhs),
                real(r.rhs),
                real(r.margin),
                real(r.tolerance),
                r.pass.to_string(),
            ]
        }),
    )?;
    files.push(path);

    let path = dir.join("plot_error.csv");
    write_csv(
        &path,
        &["x", "error"],
        series
            .x
            .iter()
            .zip(&series.error)
            .map(|(x, e)| vec![real(*x), real(*e)]),
    )?;
    files.push(path);
    let path = dir.join("plot_bound.csv");
    write_csv(
        &path,
        &["x", "bound"],
        series
            .x
            .iter()
            .zip(&series.bound)
            .map(|(x, b)| vec![real(*x), real(*b)]),
    )?;
    files.push(path);

    files.sort();
    Ok(RunOutcome {
        report,
        out_dir: dir,
        files,
    })
}

/// Maps a run result onto the process exit code.
pub fn exit_code(result: &Result<RunOutcome>) -> i32 {
    match result {
        Ok(o) if o.passed() => EXIT_OK,
        Ok(_) => EXIT_CHECK_FAILED,
        Err(e) => error_code(e),
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::TruncationFailure { .. } => EXIT_TRUNCATION,
        _ => EXIT_INVALID,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "rnstab",
    version,
    about = "Stability checks for f(x) = p f(x-1) - q f(x-2) in random normed spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the characteristic roots and the stability constant.
    Params(ParamsArgs),
    /// Run the configured checks and write CSV tables.
    Verify(VerifyArgs),
    /// Randomised checks of the t-norm and random-norm axioms.
    Axioms(AxiomsArgs),
    /// Tabulate the stability constant over a grid of admissible roots.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Read the equation from a config file instead.
    #[arg(long, conflicts_with_all = ["p", "q", "alpha", "beta"])]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub config: PathBuf,
    /// Output directory; overrides the config and the environment.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub run_id: Option<String>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AxiomsArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 2)]
    pub dimension: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Grid points per root axis.
    #[arg(long, default_value_t = 19)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Usage(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn report_error(e: &Error) -> i32 {
    eprintln!("rnstab: {e}");
    error_code(e)
}

fn params(args: &ParamsArgs) -> Result<Spectrum> {
    if let Some(path) = &args.config {
        return Ok(load_config(path)?.spectrum);
    }
    let num = |name: &str, v: &Option<String>| -> Result<Option<f64>> {
        v.as_deref()
            .map(|s| parse_real(s).map_err(|m| Error::Usage(format!("--{name}: {m}"))))
            .transpose()
    };
    match (
        num("p", &args.p)?,
        num("q", &args.q)?,
        num("alpha", &args.alpha)?,
        num("beta", &args.beta)?,
    ) {
        (Some(p), Some(q), None, None) => solve_characteristic(Coefficients::new(p, q)),
        (None, None, Some(a), Some(b)) => spectrum_from_roots(a, b),
        _ => Err(Error::Usage(
            "give --p and --q, or --alpha and --beta".into(),
        )),
    }
}

fn cmd_params(args: &ParamsArgs) -> i32 {
    match params(args) {
        Ok(sp) => {
            println!("p,q,alpha,beta,gamma,discriminant");
            println!(
                "{},{},{},{},{},{}",
                real(sp.p()),
                real(sp.q()),
                real(sp.alpha),
                real(sp.beta),
                real(sp.gamma),
                real(sp.coefficients.discriminant())
            );
            EXIT_OK
        }
        Err(e) => report_error(&e),
    }
}

fn cmd_verify(args: &VerifyArgs) -> i32 {
    let mut cfg = match load_config(&args.config) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    if let Some(out) = &args.out {
        cfg.out_dir = Some(out.clone());
    }
    if let Some(id) = &args.run_id {
        match parse_run_id(id) {
            Ok(id) => cfg.run_id = id,
            Err(m) => return report_error(&Error::Usage(m)),
        }
    }
    let result = with_threads(args.threads, || run(&cfg)).and_then(|r| r);
    match &result {
        Ok(o) => {
            for s in o.report.summaries() {
                println!(
                    "{:<24} {} min_margin={:+.3e} points={}",
                    s.check,
                    if s.passed { "PASS" } else { "FAIL" },
                    s.min_margin,
                    s.points
                );
            }
            println!("wrote {} files to {}", o.files.len(), o.out_dir.display());
        }
        Err(e) => eprintln!("rnstab: {e}"),
    }
    exit_code(&result)
}

fn cmd_axioms(args: &AxiomsArgs) -> i32 {
    let space = match RNSpace::induced(args.dimension) {
        Ok(s) => s,
        Err(e) => return report_error(&e),
    };
    let samples = AxiomSampler::new(args.seed, args.dimension).draw(args.samples);
    let grid = crate::verify::default_tgrid();
    let mut failed = false;
    match check_rn_axioms(&space, &samples, &grid, args.tol) {
        Ok(r) => {
            println!(
                "rn_axioms samples={} violations={}",
                r.samples,
                r.violations.len()
            );
            failed |= !r.is_clean();
        }
        Err(e) => return report_error(&e),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let quads: Vec<[f64; 4]> = (0..args.samples)
        .map(|_| {
            std::array::from_fn(|_| {
                if rng.random_ratio(1, 10) {
                    1.0
                } else {
                    rng.random::<f64>()
                }
            })
        })
        .collect();
    for t in [TNorm::Minimum, TNorm::Product] {
        let tol = if t == TNorm::Minimum {
            0.0
        } else {
            4.0 * f64::EPSILON
        };
        match check_axioms(t, &quads, tol) {
            Ok(v) => {
                println!(
                    "tnorm_{} samples={} violations={}",
                    t.name(),
                    quads.len(),
                    v.len()
                );
                failed |= !v.is_empty();
            }
            Err(e) => return report_error(&e),
        }
    }
    for fam in [PhiFamily::ExpRatio, PhiFamily::GaussianLocation] {
        let mut bad = 0usize;
        for x in -40..40 {
            let (a, b) = (phi(fam, f64::from(x)), phi(fam, f64::from(x + 1)));
            bad += grid.iter().filter(|&&t| a.eval(t) < b.eval(t)).count();
        }
        println!("phi_{}_monotone violations={bad}", fam.name());
        failed |= bad > 0;
    }
    if failed {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    }
}

/// `(α, β, γ)` over `α = i/(n+1)`, `β = α·(2j/(n+1) − 1)`, skipping `β = 0`.
pub fn sweep_grid(points: usize) -> Vec<(f64, f64, f64)> {
    let n = points as f64 + 1.0;
    let mut out = Vec::new();
    for i in 1..=points {
        let alpha = i as f64 / n;
        for j in 1..=points {
            let beta = alpha * (2.0 * j as f64 / n - 1.0);
            if let Ok(sp) = spectrum_from_roots(alpha, beta) {
                out.push((alpha, beta, sp.gamma));
            }
        }
    }
    out
}

fn cmd_sweep(args: &SweepArgs) -> i32 {
    let rows = sweep_grid(args.points);
    let records = rows
        .iter()
        .map(|(a, b, g)| vec![real(*a), real(*b), real(*g)]);
    let header = ["alpha", "beta", "gamma"];
    match &args.out {
        Some(path) => {
            if let Err(e) = write_csv(path, &header, records) {
                return report_error(&e);
            }
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => {
            println!("{}", header.join(","));
            for r in records {
                println!("{}", r.join(","));
            }
        }
    }
    EXIT_OK
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    match &cli.command {
        Command::Params(a) => cmd_params(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Axioms(a) => cmd_axioms(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}
