//! Command implementations: from a validated [`Config`] to deterministic
//! artifacts on disk.
//!
//! Each command returns `Ok(())` for exit code 0 or a [`Failure`] whose
//! code becomes the process exit status. Artifacts are written before a
//! failing status is returned whenever they carry the evidence (for
//! example `axioms.txt` with the violating triple).

use std::path::{Path, PathBuf};

use hypalg_core::{
    character_norms, classify_family, construct_mean, construct_symmetric_mean, corollary_check,
    estimate_support, orthonormalize, verdict_polynomial, verdict_symmetric, AlphaMean,
    AmenabilityReport, AxiomParams, AxiomReport, CharacterNorms, ClassFlags, ConvolutionTable,
    CorollaryOutcome, Family, HaarWeights, MeanOptions, NormValue, Rational,
    RecurrenceCoefficients, Scalar, SupportEstimate, SupportOptions, VerdictOptions,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{self, Backend, CliResult, Config, Failure};
use crate::emit::{fnum, write_artifact, write_json, Csv};

/// One CLI invocation after argument parsing.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub config_path: PathBuf,
    /// Raw `--x` values; parsed as reals or level indices per family.
    pub xs: Vec<String>,
    pub out: Option<PathBuf>,
    pub backend: Option<Backend>,
}

fn prepare(inv: &Invocation) -> CliResult<(Config, PathBuf)> {
    let mut cfg = config::load(&inv.config_path)?;
    if let Some(backend) = inv.backend {
        cfg.backend = backend;
    }
    let dir = inv
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((cfg, dir))
}

fn family_label(cfg: &Config) -> String {
    match &cfg.family {
        config::FamilySpec::Preset { name, .. } => format!("preset:{name}"),
        config::FamilySpec::Explicit { .. } => "explicit".into(),
        config::FamilySpec::Symmetric { .. } => "symmetric".into(),
        config::FamilySpec::Orthonormal { .. } => "orthonormal".into(),
    }
}

fn parse_point(text: &str) -> CliResult<f64> {
    <f64 as Scalar>::parse(text)
        .map_err(|e| Failure::config(format!("invalid --x `{text}`: {e}")))
}

fn parse_level(text: &str) -> CliResult<usize> {
    text.parse::<usize>().map_err(|_| {
        Failure::config(format!(
            "invalid --x `{text}`: symmetric characters are indexed by level, \
             a nonnegative integer"
        ))
    })
}

// ---------------------------------------------------------------- build

pub fn cmd_build(inv: &Invocation) -> CliResult<()> {
    let (cfg, dir) = prepare(inv)?;
    if !inv.xs.is_empty() {
        return Err(Failure::config("build does not take --x"));
    }
    if cfg.family.is_orthonormal() {
        return Err(Failure::config(
            "build needs a convolution family; an orthonormal system defines none \
             (use spectrum/analyze/mean)",
        ));
    }
    let report = match cfg.backend {
        Backend::Float => build_artifacts::<f64>(&cfg, &dir)?,
        Backend::Rational => build_artifacts::<Rational>(&cfg, &dir)?,
    };
    if report.pass() {
        println!("{report}");
        Ok(())
    } else {
        let witness = report.first().expect("non-pass report has a violation");
        Err(Failure {
            code: 2,
            message: format!(
                "axiom verification failed ({} violation(s) up to level {}); first: {}",
                report.violations.len(),
                report.levels,
                witness
            ),
        })
    }
}

fn scalar_str<S: Scalar>(v: &S) -> String {
    if S::EXACT {
        v.to_string()
    } else {
        fnum(v.to_f64())
    }
}

fn build_artifacts<S: Scalar>(cfg: &Config, dir: &Path) -> CliResult<AxiomReport> {
    let family = cfg.family.family::<S>()?;
    let params = AxiomParams { tol: cfg.tol.tol, ..AxiomParams::default() };
    let report = hypalg_core::verify_family(&family, cfg.max_level, &params);

    // Materialize the low levels of the table for inspection; the
    // verification above streams rows and is not bounded by this cap.
    let cap = cfg.table_cap.min(cfg.max_level).max(1);
    let table = ConvolutionTable::from_family(&family, cap).map_err(Failure::from_core)?;
    let mut csv = Csv::new(&["j", "k", "n", "g"]);
    for j in 0..cap {
        for k in j..cap {
            for (n, v) in table.row(j, k).iter() {
                csv.row([j.to_string(), k.to_string(), n.to_string(), scalar_str(v)]);
            }
        }
    }
    write_artifact(dir, "table.csv", &csv.into_string())?;

    let mut text = String::new();
    text.push_str(&format!("family: {}\n", family_label(cfg)));
    text.push_str(&format!("backend: {}\n", cfg.backend.as_str()));
    text.push_str(&format!("levels: {}\n", cfg.max_level));
    text.push_str(&format!(
        "tolerance: {}\n",
        if S::EXACT { "exact".into() } else { format!("{:e}", cfg.tol.tol) }
    ));
    text.push_str(&format!("result: {report}\n"));
    for v in &report.violations {
        text.push_str(&format!("violation: {v}\n"));
    }
    if report.truncated {
        text.push_str("note: stopped at the violation budget; later rows unchecked\n");
    }
    write_artifact(dir, "axioms.txt", &text)?;
    Ok(report)
}

// ------------------------------------------------------------- spectrum

fn support_options(cfg: &Config, assume_m01: Option<bool>) -> SupportOptions {
    SupportOptions {
        outside_eps: cfg.tol.outside_eps,
        match_tol: cfg.tol.match_tol,
        sep: cfg.tol.sep,
        assume_m01,
        m01_tol: cfg.tol.ctol,
    }
}

fn require_two_truncations(cfg: &Config) -> CliResult<()> {
    if cfg.truncations.len() < 2 {
        return Err(Failure::config(
            "need at least two truncation orders to separate stable mass points \
             from drifting eigenvalues (set `truncations` to e.g. [200, 400])",
        ));
    }
    Ok(())
}

pub fn cmd_spectrum(inv: &Invocation) -> CliResult<()> {
    let (cfg, dir) = prepare(inv)?;
    if !inv.xs.is_empty() {
        return Err(Failure::config("spectrum does not take --x"));
    }
    require_two_truncations(&cfg)?;
    let sys = cfg.family.system()?;
    let support = estimate_support(&sys, &cfg.truncations, &support_options(&cfg, None))
        .map_err(Failure::from_core)?;

    let mut csv = Csv::new(&["truncation", "index", "eigenvalue"]);
    for (t, evs) in support.truncations.iter().zip(&support.eigenvalues) {
        for (i, ev) in evs.iter().enumerate() {
            csv.row([t.to_string(), i.to_string(), fnum(*ev)]);
        }
    }
    write_artifact(&dir, "spectrum.csv", &csv.into_string())?;
    write_artifact(&dir, "masspoints.csv", &masspoints_csv(&support))?;

    match support.essential {
        Some((lo, hi)) => println!(
            "essential spectrum ~ [{lo:.6}, {hi:.6}], {} mass point(s)",
            support.mass_points.len()
        ),
        None => println!(
            "no essential interval at these truncations, {} mass point(s)",
            support.mass_points.len()
        ),
    }
    Ok(())
}

fn masspoints_csv(support: &SupportEstimate) -> String {
    let mut csv = Csv::new(&["x", "weight", "stable"]);
    for mp in &support.mass_points {
        csv.row([fnum(mp.x), fnum(mp.weight), mp.stable.to_string()]);
    }
    csv.into_string()
}

// -------------------------------------------------------- analyze/scan

/// Shared spectral/classification context for verdicts on one family.
struct AnalysisCx {
    coeffs: RecurrenceCoefficients<f64>,
    flags: ClassFlags,
    support: SupportEstimate,
}

/// The recurrence the verdicts run on: the family itself, or for an
/// orthonormal system the structure relations of `q_1 q_n`, whose
/// convolution has unit Haar weights and the same characters.
fn family_coeffs(cfg: &Config) -> CliResult<RecurrenceCoefficients<f64>> {
    if cfg.family.is_orthonormal() {
        let sys = cfg.family.system()?;
        return sys.q_structure(analysis_window(cfg)).map_err(Failure::from_core);
    }
    match cfg.family.family::<f64>()? {
        Family::Polynomial(coeffs) => Ok(coeffs),
        Family::Symmetric(_) => Err(Failure::config(
            "symmetric families have level-indexed characters; this code path \
             expects a real character parameter",
        )),
    }
}

fn analysis_window(cfg: &Config) -> usize {
    cfg.max_level.max(64)
}

impl AnalysisCx {
    fn new(cfg: &Config) -> CliResult<Self> {
        require_two_truncations(cfg)?;
        let window = analysis_window(cfg);
        let coeffs = family_coeffs(cfg)?;
        let flags = classify_family(&coeffs, window, cfg.tol.ctol).map_err(Failure::from_core)?;
        let sys = orthonormalize(&coeffs);
        let support = estimate_support(
            &sys,
            &cfg.truncations,
            &support_options(cfg, Some(flags.nevai_m01)),
        )
        .map_err(Failure::from_core)?;
        Ok(Self { coeffs, flags, support })
    }
}

fn mean_options(cfg: &Config) -> MeanOptions {
    MeanOptions {
        terms: analysis_window(cfg),
        margin: cfg.tol.margin,
        boundary_tol: cfg.tol.boundary_tol,
        tail_target: cfg.tol.tail_target,
        ..MeanOptions::default()
    }
}

fn verdict_options(cfg: &Config) -> VerdictOptions {
    VerdictOptions {
        mean: mean_options(cfg),
        sep: cfg.tol.sep,
        growth_bound: cfg.tol.growth_bound,
        identity_tol: cfg.tol.tol,
    }
}

pub fn cmd_analyze(inv: &Invocation) -> CliResult<()> {
    let (cfg, dir) = prepare(inv)?;
    if inv.xs.is_empty() {
        return Err(Failure::config("analyze needs at least one --x <point>"));
    }
    run_verdicts(&cfg, &dir, "analyze", &inv.xs)
}

pub fn cmd_scan(inv: &Invocation) -> CliResult<()> {
    let (cfg, dir) = prepare(inv)?;
    if cfg.family.is_symmetric() {
        return Err(Failure::config(
            "scan is not defined for symmetric families: their characters form \
             a discrete ladder of levels, not a real interval (use analyze \
             with --x <level>)",
        ));
    }
    let mut xs: Vec<String> = cfg.scan.grid()?.iter().map(|x| fnum(*x)).collect();
    xs.extend(inv.xs.iter().cloned());
    if xs.is_empty() {
        return Err(Failure::config(
            "scan produced no sample points; set scan.x_min/x_max/step or \
             scan.points in the config, or pass --x",
        ));
    }
    run_verdicts(&cfg, &dir, "scan", &xs)
}

fn run_verdicts(cfg: &Config, dir: &Path, command: &str, xs: &[String]) -> CliResult<()> {
    if cfg.family.is_symmetric() {
        let params = cfg.family.symmetric::<Rational>()?;
        let mut reports = Vec::with_capacity(xs.len());
        for raw in xs {
            let level = parse_level(raw)?;
            reports.push(verdict_symmetric(&params, level).map_err(Failure::from_core)?);
        }
        let corollary = corollary_check(&reports, None, cfg.tol.closure_tol);
        emit_verdicts(cfg, dir, command, None, &reports, &corollary)?;
        print_verdicts(&reports, &corollary);
        return Ok(());
    }

    let cx = AnalysisCx::new(cfg)?;
    let points: Vec<f64> = xs.iter().map(|s| parse_point(s)).collect::<CliResult<_>>()?;
    let opts = verdict_options(cfg);
    let reports: Vec<AmenabilityReport> = points
        .par_iter()
        .map(|&x| verdict_polynomial(&cx.coeffs, &cx.flags, &cx.support, x, &opts))
        .collect::<hypalg_core::Result<_>>()
        .map_err(Failure::from_core)?;
    let corollary = corollary_check(&reports, Some(&cx.support), cfg.tol.closure_tol);
    emit_verdicts(cfg, dir, command, Some(&cx), &reports, &corollary)?;
    print_verdicts(&reports, &corollary);
    Ok(())
}

fn print_verdicts(reports: &[AmenabilityReport], corollary: &CorollaryOutcome) {
    for r in reports {
        println!("x = {:<12} {:<26} {}", format!("{:.6}", r.x), r.verdict.as_str(), r.clause);
    }
    if corollary.applicable {
        println!(
            "support closure check: {} ({})",
            if corollary.pass { "pass" } else { "FAIL" },
            corollary.detail
        );
    }
}

// --------------------------------------------------------- JSON report

/// Finite floats serialize as numbers; non-finite values as strings,
/// since JSON has no representation for them.
fn jf(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(fnum(v))
    }
}

fn norm_value_json(n: &NormValue) -> Value {
    match n.value() {
        Some(v) => jf(v),
        None => json!("divergent"),
    }
}

fn norm_value_csv(n: &NormValue) -> String {
    match n.value() {
        Some(v) => fnum(v),
        None => "divergent".into(),
    }
}

fn norms_json(n: &CharacterNorms) -> Value {
    json!({
        "l1": norm_value_json(&n.l1),
        "l2_sq": norm_value_json(&n.l2_sq),
        "per_term_ratio": jf(n.ratio),
        "ratio_closed_form": n.ratio_closed_form.map(jf),
        "terms": n.terms,
        "method": n.method.as_str(),
        "boundary_residual": jf(n.boundary_residual),
        "sup_tail": jf(n.sup_tail),
    })
}

fn mean_json(m: &AlphaMean) -> Value {
    json!({
        "x": jf(m.x),
        "alpha_l1": jf(m.alpha_l1),
        "alpha_l2_sq": jf(m.alpha_l2_sq),
        "truncation": m.truncation,
        "tail_bound": jf(m.tail_bound),
        "method": m.method.as_str(),
        "verification": {
            "normalization_error": jf(m.verification.normalization),
            "idempotency_l1": jf(m.verification.idempotency_l1),
            "eigen_residual": jf(m.verification.eigen_residual),
            "table_levels": m.verification.table_levels,
        },
    })
}

fn report_json(r: &AmenabilityReport) -> Value {
    json!({
        "x": jf(r.x),
        "x_tilde": jf(r.x_tilde),
        "verdict": r.verdict.as_str(),
        "clause": r.clause,
        "isolated": r.isolated,
        "norms": r.norms.as_ref().map(norms_json),
        "mean": r.mean.as_ref().map(mean_json),
    })
}

fn flags_json(f: &ClassFlags) -> Value {
    json!({
        "window": f.window,
        "ctol": jf(f.ctol),
        "compact_type": f.compact_type,
        "compact_by_tail_rule": f.compact_by_tail_rule,
        "compact_deviation": jf(f.compact_deviation),
        "nevai_m01": f.nevai_m01,
        "nevai_deviation": jf(f.nevai_deviation),
        "bounded_variation": f.bounded_variation,
        "bv_increment": jf(f.bv_increment),
        "haar_bounded": f.haar_bounded,
        "haar_sup": jf(f.haar_sup),
        "haar_sup_half": jf(f.haar_sup_half),
        "scale": jf(f.scale),
        "shift": jf(f.shift),
    })
}

fn support_json(s: &SupportEstimate) -> Value {
    json!({
        "truncations": s.truncations,
        "anchored": s.anchored_m01,
        "essential": s.essential.map(|(lo, hi)| json!([jf(lo), jf(hi)])),
        "mass_points": s.mass_points.iter().map(|mp| json!({
            "x": jf(mp.x),
            "weight": jf(mp.weight),
            "stable": mp.stable,
        })).collect::<Vec<_>>(),
    })
}

fn corollary_json(c: &CorollaryOutcome) -> Value {
    json!({
        "applicable": c.applicable,
        "identity_distance": c.identity_distance.map(jf),
        "pass": c.pass,
        "detail": c.detail,
    })
}

fn emit_verdicts(
    cfg: &Config,
    dir: &Path,
    command: &str,
    cx: Option<&AnalysisCx>,
    reports: &[AmenabilityReport],
    corollary: &CorollaryOutcome,
) -> CliResult<()> {
    let mut csv = Csv::new(&["x", "verdict", "l1", "l2sq", "isolated", "clause"]);
    for r in reports {
        let (l1, l2) = match &r.norms {
            Some(n) => (norm_value_csv(&n.l1), norm_value_csv(&n.l2_sq)),
            None => (String::new(), String::new()),
        };
        let iso = r.isolated.map(|b| b.to_string()).unwrap_or_default();
        csv.row([fnum(r.x), r.verdict.as_str().into(), l1, l2, iso, r.clause.clone()]);
    }
    write_artifact(dir, "verdicts.csv", &csv.into_string())?;

    let report = json!({
        "command": command,
        "backend": cfg.backend.as_str(),
        "family": family_label(cfg),
        "config": cfg.raw,
        "window": cx.map(|_| analysis_window(cfg)),
        "classification": cx.map(|c| flags_json(&c.flags)),
        "support": cx.map(|c| support_json(&c.support)),
        "verdicts": reports.iter().map(report_json).collect::<Vec<_>>(),
        "corollary": corollary_json(corollary),
    });
    write_json(dir, "report.json", &report)
}

// ----------------------------------------------------------------- mean

pub fn cmd_mean(inv: &Invocation) -> CliResult<()> {
    let (cfg, dir) = prepare(inv)?;
    if inv.xs.len() != 1 {
        return Err(Failure::config("mean needs exactly one --x <point>"));
    }
    if cfg.family.is_symmetric() {
        return symmetric_mean(&cfg, &dir, &inv.xs[0]);
    }

    let coeffs = family_coeffs(&cfg)?;
    let window = analysis_window(&cfg);
    let flags = classify_family(&coeffs, window, cfg.tol.ctol).map_err(Failure::from_core)?;
    let x = parse_point(&inv.xs[0])?;
    let x_tilde = flags.x_tilde(x);
    let opts = mean_options(&cfg);

    // Dual-membership gate: a character with unbounded values is not a
    // state of the algebra, so no mean of any kind exists there.
    let haar = HaarWeights::from_recurrence(&coeffs, opts.terms);
    let norms = character_norms(&coeffs, &haar, x, x_tilde, &opts).map_err(Failure::from_core)?;
    if norms.sup_tail > cfg.tol.growth_bound {
        return Err(Failure::construction(format!(
            "no mean at x = {x}: character values reach {:e} on the tail window \
             (bound {:e}), so x lies outside the dual object",
            norms.sup_tail, cfg.tol.growth_bound
        )));
    }

    let mean = construct_mean(&coeffs, x, x_tilde, &opts).map_err(Failure::from_core)?;

    let mut csv = Csv::new(&["n", "m", "h"]);
    for n in 0..mean.density.len() {
        csv.row([n.to_string(), fnum(mean.density.get(n)), fnum(*haar.get(n))]);
    }
    write_artifact(&dir, "mean.csv", &csv.into_string())?;

    let report = json!({
        "command": "mean",
        "backend": cfg.backend.as_str(),
        "family": family_label(&cfg),
        "config": cfg.raw,
        "x": jf(x),
        "x_tilde": jf(x_tilde),
        "norms": norms_json(&norms),
        "mean": mean_json(&mean),
    });
    write_json(&dir, "mean_report.json", &report)?;

    println!(
        "mean at x = {x}: {} terms, normalization error {:.3e}, idempotency defect {:.3e}, \
         eigen residual {:.3e}",
        mean.density.len(),
        mean.verification.normalization,
        mean.verification.idempotency_l1,
        mean.verification.eigen_residual
    );
    Ok(())
}

fn symmetric_mean(cfg: &Config, dir: &Path, raw_level: &str) -> CliResult<()> {
    let level = parse_level(raw_level)?;
    if level == 0 {
        return Err(Failure::construction(
            "the level-0 character is identically 1, which is not square-summable \
             against the Haar weights; no mean of this form exists",
        ));
    }
    let params = cfg.family.symmetric::<Rational>()?;
    let mean = construct_symmetric_mean(&params, level).map_err(Failure::from_core)?;
    let haar = HaarWeights::from_symmetric(&params, mean.density.len());

    let mut csv = Csv::new(&["n", "m", "h"]);
    for n in 0..mean.density.len() {
        csv.row([
            n.to_string(),
            fnum(mean.density.get(n).to_f64()),
            fnum(haar.get(n).to_f64()),
        ]);
    }
    write_artifact(dir, "mean.csv", &csv.into_string())?;

    let report = json!({
        "command": "mean",
        "backend": "rational",
        "family": family_label(cfg),
        "config": cfg.raw,
        "level": level,
        "alpha_l1": jf(mean.alpha_l1.to_f64()),
        "alpha_l2_sq": jf(mean.alpha_l2_sq.to_f64()),
        "method": "exact",
        "verification": {
            "normalization_error": jf(mean.normalization_error.to_f64().abs()),
            "idempotency_l1": jf(mean.idempotency_l1.to_f64()),
            "eigen_residual": jf(mean.eigen_residual.to_f64()),
        },
    });
    write_json(dir, "mean_report.json", &report)?;

    println!(
        "mean at level {level}: {} terms, exact arithmetic, all residuals {}",
        mean.density.len(),
        if mean.normalization_error.to_f64() == 0.0
            && mean.idempotency_l1.to_f64() == 0.0
            && mean.eigen_residual.to_f64() == 0.0
        {
            "exactly zero"
        } else {
            "nonzero (see mean_report.json)"
        }
    );
    Ok(())
}
