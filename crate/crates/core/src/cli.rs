//! Command-line front end. JSON configs in, JSON reports out.
//!
//! Exit codes: 0 pass, 1 numeric fail, 2 config error, 3 constraint error.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cascade::{
    basis_names, build_stage_1d, conventions, verify_limit, Convention, ConvergenceReport,
    DegenParams, Form, HarnessConfig,
};
use crate::error::Error;
use crate::laxlink::{
    match_d5, match_e6, match_e7, sample_js, sample_yamada, JSParams, MatchResult, YamadaParams,
};
use crate::qcalc::{LogParam, ModulusPair, C64};
use crate::qheun::{
    apply_to_poly, continuum_residual, heun_normal_form, polynomial_solution, polynomial_spectrum,
    probe_point, riemann_scheme, sample_continuum, ContinuumParams, HeunParams, QHeunParams,
    RiemannScheme, Spectrum,
};
use crate::rvd::{build_rvd_1d, RvDParams};
use crate::shiftops::{fourier_mode, LaurentPoly};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_PASS: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CONSTRAINT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "rvd-cascade", version, about = "Degeneration cascade verifier")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config for the subcommand; defaults are used when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the command's main tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check one degeneration limit numerically.
    VerifyLimits,
    Qheun {
        #[command(subcommand)]
        which: QheunCmd,
    },
    /// Match a specialized Lax equation against the cascade.
    LaxMatch {
        #[command(subcommand)]
        family: LaxCmd,
    },
    /// Apply a named operator to e^(2 pi i k z) at a point.
    Eval,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum QheunCmd {
    Spectrum,
    Continuum,
    NormalForm,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum LaxCmd {
    D5,
    E6,
    E7,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn config(m: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: m.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ConstraintViolated(_) | Error::NoPolynomialSector(_) => EXIT_CONSTRAINT,
            Error::InvalidModulus(_)
            | Error::CounterTermPole
            | Error::InvalidScales(_)
            | Error::InvalidInput(_)
            | Error::StageArityMismatch { .. }
            | Error::DimensionMismatch { .. }
            | Error::ConfluentSingularities
            | Error::SingularPoint { .. }
            | Error::UnsupportedGauge(_) => EXIT_CONFIG,
            _ => EXIT_NUMERIC,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report<C, R> {
    pub artifact: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config: C,
    pub result: R,
    pub pass: bool,
}

/// Finished run: exit code and serialized report.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

fn report<C: Serialize, R: Serialize>(
    command: &str,
    seed: u64,
    config: C,
    result: R,
    pass: bool,
) -> Outcome {
    let r = Report {
        artifact: "rvd-cascade",
        version: VERSION,
        command: command.into(),
        seed,
        config,
        result,
        pass,
    };
    Outcome {
        code: if pass { EXIT_PASS } else { EXIT_NUMERIC },
        report: serde_json::to_string_pretty(&r).expect("report serializes") + "\n",
    }
}

fn parse<C: DeserializeOwned + Default>(text: Option<&str>) -> Result<C, Failure> {
    match text {
        None => Ok(C::default()),
        Some(t) => serde_json::from_str(t).map_err(|e| Failure::config(format!("config: {e}"))),
    }
}

// ---------------------------------------------------------------- verify-limits

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub stage: u8,
    #[serde(default = "one")]
    pub n: usize,
    /// Defaults to the built-in sample point of the stage.
    #[serde(default)]
    pub params: Option<DegenParams>,
    #[serde(default)]
    pub scales: Option<Vec<f64>>,
    #[serde(default)]
    pub harness: HarnessConfig,
}

fn one() -> usize {
    1
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            stage: 1,
            n: 1,
            params: None,
            scales: None,
            harness: HarnessConfig::default(),
        }
    }
}

pub fn default_scales(stage: u8, n: usize) -> Vec<f64> {
    match (stage, n) {
        (1, _) => vec![1e-2, 1e-3, 1e-4],
        (2, n) if n >= 2 => vec![0.5, 0.75, 1.0],
        _ => vec![1.0, 1.5, 2.0],
    }
}

#[derive(Debug, Serialize)]
struct LimitResult {
    basis: Vec<String>,
    conventions: Vec<Convention>,
    report: ConvergenceReport,
}

fn verify_limits(text: Option<&str>, seed: u64, tol: Option<f64>) -> Result<Outcome, Failure> {
    let mut cfg: VerifyConfig = parse(text)?;
    if !(1..=4).contains(&cfg.stage) {
        return Err(Failure::config(format!(
            "stage must be 1..4, got {}",
            cfg.stage
        )));
    }
    if !(1..=2).contains(&cfg.n) {
        return Err(Failure::config(format!("n must be 1 or 2, got {}", cfg.n)));
    }
    if let Some(t) = tol {
        cfg.harness.rate_tolerance = t;
    }
    let params = match cfg.params.clone() {
        Some(p) => p,
        None => DegenParams::sample(cfg.stage).with_n(cfg.n, C64::new(0.3, 0.1)),
    };
    if params.n != cfg.n {
        return Err(Failure::config(format!(
            "params.n = {} but n = {}",
            params.n, cfg.n
        )));
    }
    let scales = cfg
        .scales
        .clone()
        .unwrap_or_else(|| default_scales(cfg.stage, cfg.n));
    cfg.params = Some(params.clone());
    cfg.scales = Some(scales.clone());
    let rep = verify_limit(cfg.stage, &params, &scales, &cfg.harness)?;
    let pass = rep.pass;
    let result = LimitResult {
        basis: basis_names(cfg.n),
        conventions: conventions(),
        report: rep,
    };
    Ok(report("verify-limits", seed, cfg, result, pass))
}

// ---------------------------------------------------------------- qheun

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub q: f64,
    pub h: [C64; 3],
    pub l: [C64; 4],
    pub degree: usize,
    #[serde(default = "spectrum_tol")]
    pub tol: f64,
}

fn spectrum_tol() -> f64 {
    1e-10
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        let r = |v: f64| C64::new(v, 0.0);
        Self {
            q: 0.25,
            h: [r(2.0), r(3.0), r(0.375)],
            l: [r(1.0), r(2.0), r(0.5), r(1.0)],
            degree: 0,
            tol: spectrum_tol(),
        }
    }
}

#[derive(Debug, Serialize)]
struct SpectrumResult {
    spectrum: Spectrum,
    /// max |L g| / max |g| for each eigenvalue's polynomial solution.
    residuals: Vec<f64>,
}

fn spectrum(text: Option<&str>, seed: u64, tol: Option<f64>) -> Result<Outcome, Failure> {
    let mut cfg: SpectrumConfig = parse(text)?;
    if let Some(t) = tol {
        cfg.tol = t;
    }
    let p = QHeunParams::from_values(cfg.q, cfg.h, cfg.l, C64::new(0.0, 0.0))?;
    let spec = polynomial_spectrum(&p, cfg.degree)?;
    let mut residuals = Vec::new();
    for e in &spec.energies {
        let g = polynomial_solution(&p, &spec, *e)?;
        let r = apply_to_poly(&QHeunParams { e: *e, ..p }, &g)?;
        residuals.push(r.max_abs() / (g.max_abs() * (1.0 + e.norm())));
    }
    let pass = residuals.iter().all(|r| *r < cfg.tol);
    Ok(report(
        "qheun spectrum",
        seed,
        cfg,
        SpectrumResult {
            spectrum: spec,
            residuals,
        },
        pass,
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumConfig {
    /// Explicit parameters; random draws from the seed when absent.
    #[serde(default)]
    pub params: Option<ContinuumParams>,
    #[serde(default = "twenty")]
    pub draws: usize,
    pub eps: Vec<f64>,
    #[serde(default = "min_slope")]
    pub min_slope: f64,
    /// Tolerance on the Riemann scheme against the indicial roots.
    #[serde(default = "spectrum_tol")]
    pub tol: f64,
}

fn twenty() -> usize {
    20
}

fn min_slope() -> f64 {
    0.9
}

impl Default for ContinuumConfig {
    fn default() -> Self {
        Self {
            params: None,
            draws: 20,
            eps: vec![1e-2, 3e-3, 1e-3],
            min_slope: 0.9,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ContinuumDraw {
    pub params: ContinuumParams,
    pub point: C64,
    /// Test functions 1, x, x^2, 1 - x/2 + x^3/3.
    pub residuals: Vec<Vec<f64>>,
    pub slopes: Vec<f64>,
    pub riemann: RiemannScheme,
}

pub fn continuum_test_functions() -> Vec<LaurentPoly> {
    let r = |v: f64| C64::new(v, 0.0);
    vec![
        LaurentPoly::monomial(0, r(1.0)),
        LaurentPoly::monomial(1, r(1.0)),
        LaurentPoly::monomial(2, r(1.0)),
        LaurentPoly::from_coeffs(0, vec![r(1.0), r(-0.5), r(0.0), r(1.0 / 3.0)]),
    ]
}

pub fn continuum_draw(cp: &ContinuumParams, eps: &[f64]) -> crate::Result<ContinuumDraw> {
    let x = probe_point(cp);
    let logs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let mut residuals = Vec::new();
    let mut slopes = Vec::new();
    for f in continuum_test_functions() {
        let rs = eps
            .iter()
            .map(|e| continuum_residual(&cp.with_eps(*e), &f, x).map(|r| r.norm()))
            .collect::<crate::Result<Vec<f64>>>()?;
        let ly: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
        slopes.push(crate::cascade::fit_slope(&logs, &ly));
        residuals.push(rs);
    }
    Ok(ContinuumDraw {
        params: *cp,
        point: x,
        residuals,
        slopes,
        riemann: riemann_scheme(cp)?,
    })
}

#[derive(Debug, Serialize)]
struct ContinuumResult {
    draws: Vec<ContinuumDraw>,
    min_slope: f64,
    max_indicial_residual: f64,
}

fn continuum(text: Option<&str>, seed: u64, tol: Option<f64>) -> Result<Outcome, Failure> {
    let mut cfg: ContinuumConfig = parse(text)?;
    if let Some(t) = tol {
        cfg.tol = t;
    }
    if cfg.eps.len() < 2 || cfg.eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Failure::config("eps needs at least two positive values"));
    }
    let params: Vec<ContinuumParams> = match cfg.params {
        Some(p) => vec![p],
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..cfg.draws)
                .map(|_| sample_continuum(&mut rng, cfg.eps[0]))
                .collect()
        }
    };
    let draws = params
        .iter()
        .map(|p| continuum_draw(p, &cfg.eps))
        .collect::<crate::Result<Vec<_>>>()?;
    let min = draws
        .iter()
        .flat_map(|d| d.slopes.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let ind = draws
        .iter()
        .map(|d| d.riemann.indicial_residual)
        .fold(0.0, f64::max);
    let pass = min >= cfg.min_slope && ind < cfg.tol;
    let result = ContinuumResult {
        draws,
        min_slope: min,
        max_indicial_residual: ind,
    };
    Ok(report("qheun continuum", seed, cfg, result, pass))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalFormConfig {
    pub params: ContinuumParams,
    #[serde(default = "fuchs_tol")]
    pub tol: f64,
}

fn fuchs_tol() -> f64 {
    1e-12
}

impl Default for NormalFormConfig {
    fn default() -> Self {
        // h1 = l1 and h2 = l2 give delta = epsilon = 1
        let r = |v: f64| C64::new(v, 0.0);
        Self {
            params: ContinuumParams::new(
                r(2.0),
                r(-1.5),
                [r(0.2), r(-0.1), r(0.3)],
                [r(0.2), r(-0.1), r(0.4), r(0.6)],
                r(0.7),
                1e-3,
            ),
            tol: fuchs_tol(),
        }
    }
}

#[derive(Debug, Serialize)]
struct NormalFormResult {
    heun: HeunParams,
    /// gamma + delta + epsilon - alpha - beta - 1
    fuchs_residual: f64,
}

fn normal_form(text: Option<&str>, seed: u64, tol: Option<f64>) -> Result<Outcome, Failure> {
    let mut cfg: NormalFormConfig = parse(text)?;
    if let Some(t) = tol {
        cfg.tol = t;
    }
    let heun = heun_normal_form(&cfg.params)?;
    let fuchs = (heun.gamma + heun.delta + heun.epsilon - heun.alpha - heun.beta - 1.0).norm();
    let pass = fuchs < cfg.tol;
    Ok(report(
        "qheun normal-form",
        seed,
        cfg,
        NormalFormResult {
            heun,
            fuchs_residual: fuchs,
        },
        pass,
    ))
}

// ---------------------------------------------------------------- lax-match

/// Explicit parameters for one match; b8 / theta2 are checked, not derived.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LaxParams {
    Js {
        q: f64,
        kappa: [C64; 2],
        theta: [C64; 2],
        a: [C64; 4],
        t: C64,
        lambda: C64,
        mu: C64,
    },
    Yamada {
        q: f64,
        b: [C64; 8],
        t: C64,
        f: C64,
        g: C64,
        #[serde(default)]
        c1: Option<C64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaxConfig {
    #[serde(default = "fifty")]
    pub draws: usize,
    #[serde(default)]
    pub params: Option<LaxParams>,
    #[serde(default = "lax_tol")]
    pub tol: f64,
}

fn fifty() -> usize {
    50
}

fn lax_tol() -> f64 {
    1e-12
}

impl Default for LaxConfig {
    fn default() -> Self {
        Self {
            draws: 50,
            params: None,
            tol: lax_tol(),
        }
    }
}

#[derive(Debug, Serialize)]
struct LaxResult {
    family: String,
    excluded: Vec<String>,
    discrepancies: Vec<f64>,
    max_discrepancy: f64,
    matches: Vec<MatchResult>,
}

fn lp(v: C64) -> crate::Result<LogParam> {
    LogParam::from_value(v)
}

fn explicit_js(p: &LaxParams) -> Result<JSParams, Failure> {
    match p {
        LaxParams::Js {
            q,
            kappa,
            theta,
            a,
            t,
            lambda,
            mu,
        } => {
            let p = JSParams {
                q: *q,
                kappa: [lp(kappa[0])?, lp(kappa[1])?],
                theta: [lp(theta[0])?, lp(theta[1])?],
                a: [lp(a[0])?, lp(a[1])?, lp(a[2])?, lp(a[3])?],
                t: lp(*t)?,
                lambda: *lambda,
                mu: *mu,
            };
            p.check()?;
            Ok(p)
        }
        _ => Err(Failure::config(
            "d5 needs q, kappa, theta, a, t, lambda, mu",
        )),
    }
}

fn explicit_yamada(p: &LaxParams) -> Result<(YamadaParams, Option<C64>), Failure> {
    match p {
        LaxParams::Yamada { q, b, t, f, g, c1 } => {
            let mut bl = [LogParam::one(); 8];
            for (d, v) in bl.iter_mut().zip(b) {
                *d = lp(*v)?;
            }
            let p = YamadaParams {
                q: *q,
                b: bl,
                t: lp(*t)?,
                f: *f,
                g: *g,
            };
            p.check()?;
            Ok((p, *c1))
        }
        _ => Err(Failure::config("e6/e7 need q, b, t, f, g")),
    }
}

/// Accessory value for E6 when none is given: a function of the draw, fixed by the seed.
fn default_c1(p: &YamadaParams) -> C64 {
    p.g + p.f * p.t.value()
}

fn lax_match(
    family: LaxCmd,
    text: Option<&str>,
    seed: u64,
    tol: Option<f64>,
) -> Result<Outcome, Failure> {
    let mut cfg: LaxConfig = parse(text)?;
    if let Some(t) = tol {
        cfg.tol = t;
    }
    if cfg.draws == 0 {
        return Err(Failure::config("draws must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matches = Vec::new();
    match family {
        LaxCmd::D5 => {
            let ps = match &cfg.params {
                Some(p) => vec![explicit_js(p)?],
                None => (0..cfg.draws)
                    .map(|_| sample_js(&mut rng))
                    .collect::<crate::Result<Vec<_>>>()?,
            };
            for p in &ps {
                matches.push(match_d5(p)?);
            }
        }
        LaxCmd::E6 | LaxCmd::E7 => {
            let ps = match &cfg.params {
                Some(p) => vec![explicit_yamada(p)?],
                None => (0..cfg.draws)
                    .map(|_| sample_yamada(&mut rng).map(|p| (p, None)))
                    .collect::<crate::Result<Vec<_>>>()?,
            };
            for (p, c1) in &ps {
                matches.push(match family {
                    LaxCmd::E6 => match_e6(p, c1.unwrap_or_else(|| default_c1(p)))?,
                    _ => match_e7(p)?,
                });
            }
        }
    }
    let discrepancies: Vec<f64> = matches.iter().map(|m| m.max_discrepancy).collect();
    let max = discrepancies.iter().copied().fold(0.0, f64::max);
    let pass = max < cfg.tol;
    let name = match family {
        LaxCmd::D5 => "d5",
        LaxCmd::E6 => "e6",
        LaxCmd::E7 => "e7",
    };
    let result = LaxResult {
        family: name.into(),
        excluded: matches
            .first()
            .map(|m| m.excluded.clone())
            .unwrap_or_default(),
        discrepancies,
        max_discrepancy: max,
        matches,
    };
    Ok(report(
        &format!("lax-match {name}"),
        seed,
        cfg,
        result,
        pass,
    ))
}

// ---------------------------------------------------------------- eval

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalOperator {
    Rvd,
    Stage,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub operator: EvalOperator,
    /// Stage number for `stage`.
    #[serde(default)]
    pub stage: Option<u8>,
    #[serde(default = "gauged")]
    pub form: Form,
    #[serde(default = "one_f")]
    pub a_plus: f64,
    pub a_minus: f64,
    pub h: Vec<C64>,
    #[serde(default)]
    pub l: Vec<C64>,
    #[serde(default)]
    pub mu: C64,
    /// Basis function e^(2 pi i k z).
    pub mode: i32,
    pub z: C64,
}

fn gauged() -> Form {
    Form::Gauged
}

fn one_f() -> f64 {
    1.0
}

impl Default for EvalConfig {
    fn default() -> Self {
        let p = DegenParams::sample(1);
        Self {
            operator: EvalOperator::Rvd,
            stage: None,
            form: Form::Gauged,
            a_plus: 1.0,
            a_minus: p.a_minus,
            h: p.h,
            l: Vec::new(),
            mu: C64::new(0.3, 0.1),
            mode: 1,
            z: C64::new(0.1, 0.05),
        }
    }
}

#[derive(Debug, Serialize)]
struct EvalResult {
    value: C64,
}

fn eval(text: Option<&str>, seed: u64) -> Result<Outcome, Failure> {
    let cfg: EvalConfig = parse(text)?;
    let f = fourier_mode(cfg.mode);
    let op = match cfg.operator {
        EvalOperator::Rvd => {
            let h: [C64; 8] = cfg
                .h
                .clone()
                .try_into()
                .map_err(|_| Failure::config("rvd needs 8 h values"))?;
            build_rvd_1d(&RvDParams {
                modulus: ModulusPair::new(cfg.a_plus, cfg.a_minus)?,
                h,
                mu: cfg.mu,
                n: 1,
            })?
        }
        EvalOperator::Stage => {
            let stage = cfg
                .stage
                .ok_or_else(|| Failure::config("stage operator needs `stage`"))?;
            let p = DegenParams {
                a_minus: cfg.a_minus,
                h: cfg.h.clone(),
                l: cfg.l.clone(),
                mu: cfg.mu,
                n: 1,
            };
            build_stage_1d(stage, cfg.form, &p)?
        }
    };
    let value = op.apply(&*f, cfg.z)?;
    let pass = value.re.is_finite() && value.im.is_finite();
    Ok(report("eval", seed, cfg, EvalResult { value }, pass))
}

// ---------------------------------------------------------------- entry

/// Runs a parsed command line. The config file is read here; nothing is written.
pub fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let text = match &cli.config {
        Some(p) => Some(
            std::fs::read_to_string(p)
                .map_err(|e| Failure::config(format!("cannot read {}: {e}", p.display())))?,
        ),
        None => None,
    };
    run_command(&cli.command, text.as_deref(), cli.seed, cli.tol)
}

pub fn run_command(
    cmd: &Command,
    config: Option<&str>,
    seed: u64,
    tol: Option<f64>,
) -> Result<Outcome, Failure> {
    match cmd {
        Command::VerifyLimits => verify_limits(config, seed, tol),
        Command::Qheun { which } => match which {
            QheunCmd::Spectrum => spectrum(config, seed, tol),
            QheunCmd::Continuum => continuum(config, seed, tol),
            QheunCmd::NormalForm => normal_form(config, seed, tol),
        },
        Command::LaxMatch { family } => lax_match(*family, config, seed, tol),
        Command::Eval => eval(config, seed),
    }
}

/// Full process behavior: parse args, run, write the report, return the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let written = match &cli.out {
                Some(p) => std::fs::write(p, &out.report),
                None => {
                    print!("{}", out.report);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: cannot write report: {e}");
                return EXIT_CONFIG;
            }
            out.code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str], config: Option<&str>) -> Result<Outcome, Failure> {
        let mut full = vec!["rvd-cascade"];
        full.extend_from_slice(args);
        let cli = Cli::try_parse_from(full).unwrap();
        run_command(&cli.command, config, cli.seed, cli.tol)
    }

    #[test]
    fn spectrum_default_is_the_degree_zero_example() {
        let out = run(&["qheun", "spectrum"], None).unwrap();
        assert_eq!(out.code, 0);
        let v: serde_json::Value = serde_json::from_str(&out.report).unwrap();
        let e = &v["result"]["spectrum"]["energies"][0];
        assert!((e[0].as_f64().unwrap() + 5.5).abs() < 1e-12);
        assert_eq!(v["version"], VERSION);
    }

    #[test]
    fn counterterm_pole_is_config_error() {
        let cfg = r#"{"stage": 1, "params": {"a_minus": 0.0, "h": [[0.1,0],[0.2,0],[0.3,0],[0.4,0],[0.5,0],[0.6,0],[0.7,0],[0.8,0]]}}"#;
        let f = run(&["verify-limits"], Some(cfg)).unwrap_err();
        assert_eq!(f.code, EXIT_CONFIG);
    }

    #[test]
    fn unknown_field_is_config_error() {
        let f = run(&["lax-match", "d5"], Some(r#"{"drawz": 3}"#)).unwrap_err();
        assert_eq!(f.code, EXIT_CONFIG);
    }

    #[test]
    fn broken_e7_constraint_exits_3() {
        let cfg = r#"{"params": {"q": 0.4, "b": [[1,0],[1,0],[1,0],[1,0],[1,0],[1,0],[1,0],[1,0]], "t": [0.9,0.1], "f": [0.5,0.5], "g": [0.6,-0.4]}}"#;
        let f = run(&["lax-match", "e7"], Some(cfg)).unwrap_err();
        assert_eq!(f.code, EXIT_CONSTRAINT);
    }

    #[test]
    fn e6_names_excluded_slot() {
        let out = run(&["lax-match", "e6", "--seed", "7"], Some(r#"{"draws": 3}"#)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.report).unwrap();
        assert!(v["result"]["excluded"][0].as_str().unwrap().contains("c1"));
        assert_eq!(out.code, 0);
    }

    #[test]
    fn normal_form_default_has_unit_delta_epsilon() {
        let out = run(&["qheun", "normal-form"], None).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.report).unwrap();
        assert_eq!(out.code, 0);
        for k in ["delta", "epsilon"] {
            let d = &v["result"]["heun"][k];
            assert!((d[0].as_f64().unwrap() - 1.0).abs() < 1e-12, "{k} = {d}");
        }
    }
}
