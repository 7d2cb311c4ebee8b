//! Classification of families and per-character amenability verdicts.
//!
//! The decision procedure mirrors the structure of the underlying
//! theory: a character either is the identity (always amenable), grows
//! beyond the dual (no character at all), lies in ℓ¹ ∩ ℓ² and is
//! isolated in the support (unique mean, constructed explicitly as
//! `m = α / ‖α‖₂²` and verified), or falls under the Nevai-class rules
//! where boundedness of the Haar weights decides amenability. Everything
//! else is reported inconclusive, with the evidence attached.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

// Provides f64 methods (abs, sqrt, …) when building without std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::coeffs::{RecurrenceCoefficients, SymmetricParams};
use crate::measure::{convolve, fourier_with, translate, SequenceMeasure};
use crate::scalar::Scalar;
use crate::spectral::{
    evaluate_character, evaluate_character_backward, is_isolated, orthonormalize,
    SupportEstimate,
};
use crate::table::{ConvolutionTable, HaarWeights};
use crate::{Error, Result};

/// Asymptotic class flags with the numeric evidence used to set them.
#[derive(Debug, Clone)]
pub struct ClassFlags {
    pub window: usize,
    pub ctol: f64,
    /// `a_n, c_n → 0`, `b_n → 1`.
    pub compact_type: bool,
    /// `λ_n → ½`, `β_n → 0`.
    pub nevai_m01: bool,
    /// `Σ (|Δλ| + |Δβ|)` Cauchy over the window.
    pub bounded_variation: bool,
    /// Haar weights bounded in trend over the window.
    pub haar_bounded: bool,
    /// Max of `a_n`, `c_n`, `|1 - b_n|` over the last quarter.
    pub compact_deviation: f64,
    /// Whether the declared tail rule already implies the compact limits.
    pub compact_by_tail_rule: bool,
    /// Max of `|λ_n - ½|`, `|β_n|` over the last quarter.
    pub nevai_deviation: f64,
    /// Increase of the BV partial sums over `[window/2, window]`.
    pub bv_increment: f64,
    pub haar_sup: f64,
    pub haar_sup_half: f64,
    /// Affine normalization `x̃ = (x - shift) / scale` mapping the
    /// essential spectrum onto `[-1, 1]`: `scale = 2·lim λ`,
    /// `shift = lim β`, estimated over the last quarter.
    pub scale: f64,
    pub shift: f64,
}

impl ClassFlags {
    pub fn x_tilde(&self, x: f64) -> f64 {
        if self.scale.abs() > 1e-300 {
            (x - self.shift) / self.scale
        } else {
            x
        }
    }
}

/// Classify a polynomial family over a coefficient window.
pub fn classify_family(
    coeffs: &RecurrenceCoefficients<f64>,
    window: usize,
    ctol: f64,
) -> Result<ClassFlags> {
    const MIN_WINDOW: usize = 16;
    if window < MIN_WINDOW {
        return Err(Error::WindowTooSmall { window, min: MIN_WINDOW });
    }
    let sys = orthonormalize(coeffs);
    let quarter = window - window / 4;

    let mut compact_deviation = 0.0f64;
    for n in quarter..window {
        let (a, b, c) = coeffs.abc(n);
        compact_deviation = compact_deviation.max(a).max(c).max((1.0 - b).abs());
    }
    let compact_by_tail_rule = matches!(
        coeffs.known_limits(),
        Some((a, b, c)) if a == 0.0 && b == 1.0 && c == 0.0
    );
    let compact_type = compact_by_tail_rule || compact_deviation <= ctol;

    let mut nevai_deviation = 0.0f64;
    let mut lambda_mean = 0.0f64;
    let mut beta_mean = 0.0f64;
    for n in quarter..window {
        let l = sys.lambda(n);
        let b = sys.beta(n);
        nevai_deviation = nevai_deviation.max((l - 0.5).abs()).max(b.abs());
        lambda_mean += l;
        beta_mean += b;
    }
    let tail_len = (window - quarter) as f64;
    lambda_mean /= tail_len;
    beta_mean /= tail_len;
    let nevai_m01 = nevai_deviation <= ctol;

    let mut bv_increment = 0.0f64;
    for n in window / 2..window {
        bv_increment += (sys.lambda(n + 1) - sys.lambda(n)).abs()
            + (sys.beta(n + 1) - sys.beta(n)).abs();
    }
    let bounded_variation = bv_increment <= ctol;

    let haar = HaarWeights::from_recurrence(coeffs, window + 1);
    let sup_of = |upto: usize| -> f64 {
        let mut sup = 0.0f64;
        for n in 0..=upto {
            let h = *haar.get(n);
            if !h.is_finite() {
                return f64::INFINITY;
            }
            sup = sup.max(h);
        }
        sup
    };
    let haar_sup = sup_of(window);
    let haar_sup_half = sup_of(window / 2);
    let haar_bounded = haar_sup.is_finite() && haar_sup <= (1.0 + ctol) * haar_sup_half;

    Ok(ClassFlags {
        window,
        ctol,
        compact_type,
        nevai_m01,
        bounded_variation,
        haar_bounded,
        compact_deviation,
        compact_by_tail_rule,
        nevai_deviation,
        bv_increment,
        haar_sup,
        haar_sup_half,
        scale: 2.0 * lambda_mean,
        shift: beta_mean,
    })
}

/// A norm that may fail to converge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormValue {
    Converged(f64),
    Divergent,
}

impl NormValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            NormValue::Converged(v) => Some(*v),
            NormValue::Divergent => None,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, NormValue::Converged(_))
    }
}

/// How character values were evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    /// Forward three-term recurrence.
    Forward,
    /// Backward Miller recurrence (used at ℓ²-type points, where the
    /// forward direction is unstable).
    Backward,
    /// Closed-form/exact data (symmetric families).
    Exact,
}

impl EvalMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EvalMethod::Forward => "forward",
            EvalMethod::Backward => "backward",
            EvalMethod::Exact => "exact",
        }
    }
}

/// ℓ¹/ℓ² data of a character with the tail evidence used.
#[derive(Debug, Clone)]
pub struct CharacterNorms {
    pub l1: NormValue,
    pub l2_sq: NormValue,
    /// Empirical per-term ratio of the ℓ¹ terms `|p_n(x)| h(n)`,
    /// estimated blockwise over the last half of the window.
    pub ratio: f64,
    /// `(|x̃| + √(x̃² - 1))⁻¹` when `|x̃| > 1`: the asymptotic ratio a
    /// genuine ℓ²-point must approach.
    pub ratio_closed_form: Option<f64>,
    pub terms: usize,
    pub method: EvalMethod,
    /// Boundary residual of the backward evaluation (atom detector).
    pub boundary_residual: f64,
    /// `sup |p_n(x)|` over the last quarter (dual-membership evidence).
    pub sup_tail: f64,
}

/// Options for norm computation and mean construction.
#[derive(Debug, Clone)]
pub struct MeanOptions {
    /// Window size `N` (number of recurrence terms). Minimum 32.
    pub terms: usize,
    /// Safety margin: convergence requires per-term ratio ≤ 1 - margin.
    pub margin: f64,
    /// Residual threshold below which the backward evaluation is trusted.
    pub boundary_tol: f64,
    /// ℓ¹(h) mass allowed in the discarded tail of a constructed mean.
    pub tail_target: f64,
    /// Verify the translation eigen-property for `y ≤ verify_max` against
    /// indicator densities of `{0, …, verify_max}`.
    pub verify_max: usize,
    /// Cap on the linearization-table size used for verification.
    pub max_table_levels: usize,
}

impl Default for MeanOptions {
    fn default() -> Self {
        Self {
            terms: 512,
            margin: 0.05,
            boundary_tol: 1e-6,
            tail_target: 1e-10,
            verify_max: 10,
            max_table_levels: 512,
        }
    }
}

/// Pairing `⟨f, g⟩ = Σ f(n) g(n) h(n)` of two finitely supported
/// densities (zero beyond their stored lengths).
fn pair<S: Scalar>(
    f: &SequenceMeasure<S>,
    g: &SequenceMeasure<S>,
    haar: &HaarWeights<S>,
) -> S {
    let len = f.len().min(g.len());
    let mut acc = S::zero();
    for n in 0..len {
        acc = acc + f.get(n) * g.get(n) * haar.get(n);
    }
    acc
}

struct ChosenEval {
    values: Vec<f64>,
    method: EvalMethod,
    boundary_residual: f64,
}

fn choose_evaluation(
    coeffs: &RecurrenceCoefficients<f64>,
    x: f64,
    terms: usize,
    boundary_tol: f64,
) -> ChosenEval {
    let backward = evaluate_character_backward(coeffs, x, terms);
    if backward.boundary_residual <= boundary_tol {
        return ChosenEval {
            values: backward.values,
            method: EvalMethod::Backward,
            boundary_residual: backward.boundary_residual,
        };
    }
    ChosenEval {
        values: evaluate_character(coeffs, &x, terms).values,
        method: EvalMethod::Forward,
        boundary_residual: backward.boundary_residual,
    }
}

struct TailSummary {
    partial: f64,
    per_term_ratio: f64,
    tail_bound: f64,
    converged: bool,
}

/// Blockwise geometric tail analysis of a nonnegative term sequence.
/// Robust against the sign oscillation and isolated zeros of character
/// values, unlike a single-term ratio.
fn analyze_terms(terms: &[f64], margin: f64) -> TailSummary {
    let n = terms.len();
    let block = n / 4;
    let s1: f64 = terms[n - 2 * block..n - block].iter().sum();
    let s2: f64 = terms[n - block..].iter().sum();
    let partial: f64 = terms.iter().sum();
    if !(partial.is_finite() && s1.is_finite() && s2.is_finite()) {
        return TailSummary {
            partial: f64::INFINITY,
            per_term_ratio: f64::INFINITY,
            tail_bound: f64::INFINITY,
            converged: false,
        };
    }
    if s2 == 0.0 {
        // Finite support (within resolution): nothing beyond the window.
        return TailSummary {
            partial,
            per_term_ratio: 0.0,
            tail_bound: 0.0,
            converged: true,
        };
    }
    if s1 == 0.0 {
        return TailSummary {
            partial,
            per_term_ratio: f64::INFINITY,
            tail_bound: f64::INFINITY,
            converged: false,
        };
    }
    let block_ratio = s2 / s1;
    let per_term_ratio = block_ratio.powf(1.0 / block as f64);
    let converged = per_term_ratio <= 1.0 - margin;
    let tail_bound = if block_ratio < 1.0 {
        s2 * block_ratio / (1.0 - block_ratio)
    } else {
        f64::INFINITY
    };
    TailSummary { partial, per_term_ratio, tail_bound, converged }
}

/// Compute ℓ¹ and ℓ² character norms with geometric tail bounds;
/// divergence is a value, not an error. `x_tilde` is the normalized
/// spectral variable used for the closed-form ratio.
pub fn character_norms(
    coeffs: &RecurrenceCoefficients<f64>,
    haar: &HaarWeights<f64>,
    x: f64,
    x_tilde: f64,
    opts: &MeanOptions,
) -> Result<CharacterNorms> {
    let n = opts.terms;
    if n < 32 {
        return Err(Error::WindowTooSmall { window: n, min: 32 });
    }
    if haar.len() < n {
        return Err(Error::TableExhausted { needed: n, max_level: haar.len() });
    }
    let eval = choose_evaluation(coeffs, x, n, opts.boundary_tol);
    Ok(norms_from_values(&eval, haar, x_tilde, opts))
}

fn norms_from_values(
    eval: &ChosenEval,
    haar: &HaarWeights<f64>,
    x_tilde: f64,
    opts: &MeanOptions,
) -> CharacterNorms {
    let n = eval.values.len();
    let t1: Vec<f64> = (0..n).map(|i| eval.values[i].abs() * haar.get(i)).collect();
    let t2: Vec<f64> = (0..n)
        .map(|i| eval.values[i] * eval.values[i] * haar.get(i))
        .collect();
    let a1 = analyze_terms(&t1, opts.margin);
    let a2 = analyze_terms(&t2, opts.margin);
    let mut sup_tail = 0.0f64;
    for v in &eval.values[n - n / 4..] {
        if !v.is_finite() {
            sup_tail = f64::INFINITY;
            break;
        }
        sup_tail = sup_tail.max(v.abs());
    }
    let ratio_closed_form = if x_tilde.abs() > 1.0 {
        Some(1.0 / (x_tilde.abs() + (x_tilde * x_tilde - 1.0).sqrt()))
    } else {
        None
    };
    CharacterNorms {
        l1: if a1.converged {
            NormValue::Converged(a1.partial + a1.tail_bound)
        } else {
            NormValue::Divergent
        },
        l2_sq: if a2.converged {
            NormValue::Converged(a2.partial + a2.tail_bound)
        } else {
            NormValue::Divergent
        },
        ratio: a1.per_term_ratio,
        ratio_closed_form,
        terms: n,
        method: eval.method,
        boundary_residual: eval.boundary_residual,
        sup_tail,
    }
}

/// Verification residuals attached to a constructed mean.
#[derive(Debug, Clone)]
pub struct MeanVerification {
    /// `|⟨m, α⟩ - 1|`.
    pub normalization: f64,
    /// `‖m*m - m‖` in ℓ¹(h).
    pub idempotency_l1: f64,
    /// `max |⟨m, T_y f⟩ - α(y) ⟨m, f⟩|` over the test set.
    pub eigen_residual: f64,
    pub table_levels: usize,
}

/// An explicitly constructed α-mean `m = α / ‖α‖₂²`.
#[derive(Debug, Clone)]
pub struct AlphaMean {
    pub x: f64,
    /// Density `m(n)` against the Haar weights, truncated where the
    /// geometric tail bound drops below the target.
    pub density: SequenceMeasure<f64>,
    pub alpha_l1: f64,
    pub alpha_l2_sq: f64,
    pub truncation: usize,
    /// ℓ¹(h) bound on the discarded tail of `m`.
    pub tail_bound: f64,
    pub method: EvalMethod,
    pub verification: MeanVerification,
}

/// Construct and verify the α-mean at `x` for a polynomial family.
/// Fails with [`Error::NotL2`] when `‖α‖₂²` does not converge (then no
/// mean of this form exists) — in particular always at `x = 1` on an
/// infinite family.
pub fn construct_mean(
    coeffs: &RecurrenceCoefficients<f64>,
    x: f64,
    x_tilde: f64,
    opts: &MeanOptions,
) -> Result<AlphaMean> {
    let n = opts.terms;
    if n < 32 {
        return Err(Error::WindowTooSmall { window: n, min: 32 });
    }
    let haar = HaarWeights::from_recurrence(coeffs, 2 * n);
    let eval = choose_evaluation(coeffs, x, n, opts.boundary_tol);
    let norms = norms_from_values(&eval, &haar, x_tilde, opts);
    let Some(l2) = norms.l2_sq.value() else {
        return Err(Error::NotL2 { x });
    };
    let l1 = norms.l1.value().unwrap_or(f64::INFINITY);

    // Truncate where the remaining ℓ¹(h) mass of m is below target.
    let m_terms: Vec<f64> = (0..n)
        .map(|i| eval.values[i].abs() * haar.get(i) / l2)
        .collect();
    let beyond: f64 = match norms.l1 {
        NormValue::Converged(total) => {
            let partial: f64 = m_terms.iter().sum::<f64>() * l2;
            ((total - partial) / l2).max(0.0)
        }
        NormValue::Divergent => f64::INFINITY,
    };
    let mut suffix = beyond;
    let mut cut = n;
    while cut > 1 && suffix + m_terms[cut - 1] <= opts.tail_target {
        suffix += m_terms[cut - 1];
        cut -= 1;
    }
    let tail_bound = suffix;
    let density = SequenceMeasure::new(
        (0..cut).map(|i| eval.values[i] / l2).collect(),
    );
    let truncation = density.len();

    // Verification.
    let levels = truncation
        .max(opts.verify_max + 1)
        .min(opts.max_table_levels.max(opts.verify_max + 1));
    let table = ConvolutionTable::polynomial(coeffs, levels)?;
    let vhaar = HaarWeights::from_recurrence(coeffs, 2 * levels + opts.verify_max + 2);
    let alpha = &eval.values;

    let mut pairing = 0.0f64;
    for (i, v) in density.values().iter().enumerate() {
        pairing += v * alpha[i] * vhaar.get(i);
    }
    let normalization = (pairing - 1.0).abs();

    let truncated = if truncation > levels {
        SequenceMeasure::new(density.values()[..levels].to_vec())
    } else {
        density.clone()
    };
    let mm = convolve(&truncated, &truncated, &table, &vhaar)?;
    let idempotency_l1 = mm.sub(&truncated).l1_norm(&vhaar);

    let mut eigen_residual = 0.0f64;
    for y in 0..=opts.verify_max {
        let ay = alpha[y];
        for i in 0..=opts.verify_max {
            let f = SequenceMeasure::indicator(i);
            let tf = translate(y, &f, &table, &vhaar)?;
            let lhs = pair(&truncated, &tf, &vhaar);
            let rhs = ay * pair(&truncated, &f, &vhaar);
            eigen_residual = eigen_residual.max((lhs - rhs).abs());
        }
    }

    Ok(AlphaMean {
        x,
        density,
        alpha_l1: l1,
        alpha_l2_sq: l2,
        truncation,
        tail_bound,
        method: eval.method,
        verification: MeanVerification {
            normalization,
            idempotency_l1,
            eigen_residual,
            table_levels: levels,
        },
    })
}

/// Exact α-mean data for a symmetric family at a level character.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMean<S> {
    pub level: usize,
    pub density: SequenceMeasure<S>,
    pub alpha_l1: S,
    pub alpha_l2_sq: S,
    pub normalization_error: S,
    pub idempotency_l1: S,
    pub eigen_residual: S,
}

/// Construct the mean of the level-`ℓ` character
/// `α = (1, …, 1, -b_ℓ, 0, …)` of a symmetric family; exact under exact
/// scalars. Level 0 is the identity character (`α ≡ 1 ∉ ℓ²`).
pub fn construct_symmetric_mean<S: Scalar>(
    params: &SymmetricParams<S>,
    level: usize,
) -> Result<SymmetricMean<S>> {
    if level == 0 {
        return Err(Error::NotL2 { x: 1.0 });
    }
    let haar = HaarWeights::from_symmetric(params, 2 * level + 2);
    let table = ConvolutionTable::symmetric(params, level + 2)?;
    let mut alpha_values = vec![S::one(); level + 1];
    alpha_values[level] = S::zero() - params.b(level);
    let alpha = SequenceMeasure::new(alpha_values);
    let l1 = alpha.l1_norm(&haar);
    let l2 = alpha.l2_norm_sq(&haar);
    let density = alpha.scale(&(S::one() / l2.clone()));

    let normalization_error = fourier_with(&density, alpha.values(), &haar) - S::one();
    let mm = convolve(&density, &density, &table, &haar)?;
    let idempotency_l1 = mm.sub(&density).l1_norm(&haar);

    let mut eigen_residual = S::zero();
    for y in 0..=level {
        let ay = alpha.get(y);
        for i in 0..=level {
            let f = SequenceMeasure::indicator(i);
            let tf = translate(y, &f, &table, &haar)?;
            let lhs = pair(&density, &tf, &haar);
            let rhs = ay.clone() * pair(&density, &f, &haar);
            let r = (lhs - rhs).abs();
            if r > eigen_residual {
                eigen_residual = r;
            }
        }
    }

    Ok(SymmetricMean {
        level,
        density,
        alpha_l1: l1,
        alpha_l2_sq: l2,
        normalization_error,
        idempotency_l1,
        eigen_residual,
    })
}

/// Per-character classification outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    IdentityAlwaysAmenable,
    UniqueMean,
    Amenable,
    NotAmenable,
    OutsideDual,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::IdentityAlwaysAmenable => "IDENTITY_ALWAYS_AMENABLE",
            Verdict::UniqueMean => "UNIQUE_MEAN",
            Verdict::Amenable => "AMENABLE",
            Verdict::NotAmenable => "NOT_AMENABLE",
            Verdict::OutsideDual => "OUTSIDE_DUAL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Classification report for one character parameter.
#[derive(Debug, Clone)]
pub struct AmenabilityReport {
    pub x: f64,
    pub x_tilde: f64,
    pub verdict: Verdict,
    /// The decision clause applied, as an auditable string.
    pub clause: String,
    pub norms: Option<CharacterNorms>,
    pub isolated: Option<bool>,
    pub mean: Option<AlphaMean>,
}

/// Options for [`verdict_polynomial`].
#[derive(Debug, Clone)]
pub struct VerdictOptions {
    pub mean: MeanOptions,
    /// Isolation separation.
    pub sep: f64,
    /// Dual-membership growth bound `B`.
    pub growth_bound: f64,
    /// |x - 1| below this is the identity character.
    pub identity_tol: f64,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self {
            mean: MeanOptions::default(),
            sep: 1e-3,
            growth_bound: 1e3,
            identity_tol: 1e-12,
        }
    }
}

/// Decision procedure for a polynomial family at the character
/// parameter `x`. Clauses, in order: (a) identity character;
/// (b) unbounded character values — outside the dual; (c) ℓ¹ ∩ ℓ² with
/// isolation — unique mean, constructed and attached; (d)/(e) Nevai
/// class with bounded variation and `x̃` interior — Haar boundedness
/// decides; (f) inconclusive.
pub fn verdict_polynomial(
    coeffs: &RecurrenceCoefficients<f64>,
    flags: &ClassFlags,
    support: &SupportEstimate,
    x: f64,
    opts: &VerdictOptions,
) -> Result<AmenabilityReport> {
    let x_tilde = flags.x_tilde(x);
    if (x - 1.0).abs() <= opts.identity_tol {
        return Ok(AmenabilityReport {
            x,
            x_tilde,
            verdict: Verdict::IdentityAlwaysAmenable,
            clause: "identity-character".into(),
            norms: None,
            isolated: None,
            mean: None,
        });
    }
    let haar = HaarWeights::from_recurrence(coeffs, opts.mean.terms);
    let norms = character_norms(coeffs, &haar, x, x_tilde, &opts.mean)?;
    let isolated = is_isolated(x, support, opts.sep);

    if norms.sup_tail > opts.growth_bound {
        return Ok(AmenabilityReport {
            x,
            x_tilde,
            verdict: Verdict::OutsideDual,
            clause: format!(
                "outside-dual:character-growth>{:e}",
                opts.growth_bound
            ),
            norms: Some(norms),
            isolated: Some(isolated),
            mean: None,
        });
    }

    if norms.l1.is_converged() && norms.l2_sq.is_converged() && isolated {
        return match construct_mean(coeffs, x, x_tilde, &opts.mean) {
            Ok(mean) => Ok(AmenabilityReport {
                x,
                x_tilde,
                verdict: Verdict::UniqueMean,
                clause: "unique-mean:l1l2-converged+isolated".into(),
                norms: Some(norms),
                isolated: Some(true),
                mean: Some(mean),
            }),
            Err(e) => Ok(AmenabilityReport {
                x,
                x_tilde,
                verdict: Verdict::Inconclusive,
                clause: format!("inconclusive:mean-construction-failed:{e}"),
                norms: Some(norms),
                isolated: Some(true),
                mean: None,
            }),
        };
    }

    if flags.nevai_m01 && flags.bounded_variation && x_tilde.abs() < 1.0 {
        if !flags.haar_bounded {
            return Ok(AmenabilityReport {
                x,
                x_tilde,
                verdict: Verdict::NotAmenable,
                clause: "nevai-bv-interior:haar-unbounded".into(),
                norms: Some(norms),
                isolated: Some(isolated),
                mean: None,
            });
        }
        return Ok(AmenabilityReport {
            x,
            x_tilde,
            verdict: Verdict::Amenable,
            clause: "nevai-bv-interior:haar-bounded".into(),
            norms: Some(norms),
            isolated: Some(isolated),
            mean: None,
        });
    }

    Ok(AmenabilityReport {
        x,
        x_tilde,
        verdict: Verdict::Inconclusive,
        clause: "inconclusive:no-clause-applies".into(),
        norms: Some(norms),
        isolated: Some(isolated),
        mean: None,
    })
}

/// Verdict for a symmetric family at the level-`ℓ` character. Every
/// nontrivial level character has finite support, hence lies in
/// ℓ¹ ∩ ℓ², and is structurally isolated in the dual; the mean is
/// constructed exactly and converted to floating point for the report.
pub fn verdict_symmetric<S: Scalar>(
    params: &SymmetricParams<S>,
    level: usize,
) -> Result<AmenabilityReport> {
    if level == 0 {
        return Ok(AmenabilityReport {
            x: 0.0,
            x_tilde: 0.0,
            verdict: Verdict::IdentityAlwaysAmenable,
            clause: "identity-character:level-0".into(),
            norms: None,
            isolated: None,
            mean: None,
        });
    }
    let exact = construct_symmetric_mean(params, level)?;
    let l1 = exact.alpha_l1.to_f64();
    let l2 = exact.alpha_l2_sq.to_f64();
    let norms = CharacterNorms {
        l1: NormValue::Converged(l1),
        l2_sq: NormValue::Converged(l2),
        ratio: 0.0,
        ratio_closed_form: None,
        terms: level + 1,
        method: EvalMethod::Exact,
        boundary_residual: 0.0,
        sup_tail: 1.0,
    };
    Ok(AmenabilityReport {
        x: level as f64,
        x_tilde: level as f64,
        verdict: Verdict::UniqueMean,
        clause: "unique-mean:finite-support+structurally-isolated".into(),
        norms: Some(norms),
        isolated: Some(true),
        mean: Some(AlphaMean {
            x: level as f64,
            density: exact.density.to_f64(),
            alpha_l1: l1,
            alpha_l2_sq: l2,
            truncation: level + 1,
            tail_bound: 0.0,
            method: EvalMethod::Exact,
            verification: MeanVerification {
                normalization: exact.normalization_error.to_f64().abs(),
                idempotency_l1: exact.idempotency_l1.to_f64(),
                eigen_residual: exact.eigen_residual.to_f64(),
                table_levels: level + 2,
            },
        }),
    })
}

/// Consistency check: when every sampled nontrivial character has a
/// unique mean, the identity parameter must lie in the support closure.
#[derive(Debug, Clone)]
pub struct CorollaryOutcome {
    /// All sampled nontrivial characters had verdict UNIQUE_MEAN.
    pub applicable: bool,
    /// Distance from 1 to the estimated support, when measurable.
    pub identity_distance: Option<f64>,
    pub pass: bool,
    pub detail: String,
}

/// Check the support-closure consequence over a set of reports.
/// `support` is `None` for symmetric families, where the identity is
/// the accumulation point of the level characters by construction.
pub fn corollary_check(
    reports: &[AmenabilityReport],
    support: Option<&SupportEstimate>,
    closure_tol: f64,
) -> CorollaryOutcome {
    let nontrivial: Vec<&AmenabilityReport> = reports
        .iter()
        .filter(|r| r.verdict != Verdict::IdentityAlwaysAmenable)
        .collect();
    let applicable = !nontrivial.is_empty()
        && nontrivial.iter().all(|r| r.verdict == Verdict::UniqueMean);
    if !applicable {
        return CorollaryOutcome {
            applicable: false,
            identity_distance: None,
            pass: true,
            detail: "vacuous: not every sampled nontrivial character has a unique mean".into(),
        };
    }
    match support {
        None => CorollaryOutcome {
            applicable: true,
            identity_distance: Some(0.0),
            pass: true,
            detail: "identity is the accumulation point of the level characters".into(),
        },
        Some(est) => {
            let mut dist = f64::INFINITY;
            if let Some((lo, hi)) = est.essential {
                dist = if 1.0 < lo {
                    lo - 1.0
                } else if 1.0 > hi {
                    1.0 - hi
                } else {
                    0.0
                };
            }
            for mp in &est.mass_points {
                dist = dist.min((mp.x - 1.0).abs());
            }
            let pass = dist <= closure_tol;
            CorollaryOutcome {
                applicable: true,
                identity_distance: Some(dist),
                pass,
                detail: format!("distance from 1 to estimated support: {dist:e}"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::TailRule;
    use crate::scalar::Rational;
    use crate::spectral::{estimate_support, SupportOptions};
    use num_traits::{One, Zero};

    fn rat(p: i64, q: i64) -> Rational {
        Rational::ratio(p, q)
    }

    fn signed_atom_family() -> RecurrenceCoefficients<f64> {
        RecurrenceCoefficients::explicit(
            vec![2.0, 0.25],
            vec![-1.0, 0.5],
            vec![0.25],
            TailRule::Constant,
        )
        .unwrap()
    }

    #[test]
    fn classification_of_presets() {
        let t = classify_family(&RecurrenceCoefficients::chebyshev_t(), 512, 1e-4).unwrap();
        assert!(t.nevai_m01 && t.bounded_variation && t.haar_bounded && !t.compact_type);
        assert!((t.scale - 1.0).abs() < 1e-12 && t.shift.abs() < 1e-12);

        let u = classify_family(&RecurrenceCoefficients::chebyshev_u(), 512, 1e-4).unwrap();
        assert!(u.nevai_m01 && u.bounded_variation && !u.haar_bounded && !u.compact_type);

        let g = classify_family(
            &RecurrenceCoefficients::geometric_compact(0.5).unwrap(),
            512,
            1e-4,
        )
        .unwrap();
        assert!(g.compact_type && g.compact_by_tail_rule);
        assert!(!g.nevai_m01 && !g.haar_bounded);
        assert!(g.bounded_variation);

        assert!(matches!(
            classify_family(&RecurrenceCoefficients::chebyshev_t(), 8, 1e-4),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn norms_diverge_at_identity_and_interior_points() {
        let coeffs = RecurrenceCoefficients::<f64>::chebyshev_t();
        let haar = HaarWeights::from_recurrence(&coeffs, 512);
        let opts = MeanOptions::default();
        for x in [1.0f64, 0.3, -0.6] {
            let n = character_norms(&coeffs, &haar, x, x, &opts).unwrap();
            assert!(!n.l1.is_converged(), "x = {x}");
            assert!(!n.l2_sq.is_converged(), "x = {x}");
        }
    }

    #[test]
    fn norms_at_the_signed_atom_match_closed_forms() {
        // ‖α‖₁ = 3, ‖α‖₂² = 3/2, per-term ratio exactly 1/3 at x = -5/3.
        let coeffs = signed_atom_family();
        let haar = HaarWeights::from_recurrence(&coeffs, 512);
        let opts = MeanOptions::default();
        let n = character_norms(&coeffs, &haar, -5.0 / 3.0, -5.0 / 3.0, &opts).unwrap();
        assert_eq!(n.method, EvalMethod::Backward);
        assert!((n.l1.value().unwrap() - 3.0).abs() < 1e-9, "{:?}", n.l1);
        assert!((n.l2_sq.value().unwrap() - 1.5).abs() < 1e-9, "{:?}", n.l2_sq);
        assert!((n.ratio - 1.0 / 3.0).abs() < 1e-3, "{}", n.ratio);
        let cf = n.ratio_closed_form.unwrap();
        assert!((cf - 1.0 / 3.0).abs() < 1e-12);
        assert!((n.ratio - cf).abs() / cf < 0.05);
    }

    #[test]
    fn mean_at_the_signed_atom_verifies() {
        let coeffs = signed_atom_family();
        let mean = construct_mean(&coeffs, -5.0 / 3.0, -5.0 / 3.0, &MeanOptions::default())
            .unwrap();
        // m(n) = p_n(-5/3) / (3/2) = (-1/3)^n · 2/3.
        assert!((mean.alpha_l2_sq - 1.5).abs() < 1e-10);
        assert!((mean.density.get(0) - 2.0 / 3.0).abs() < 1e-10);
        assert!((mean.density.get(1) + 2.0 / 9.0).abs() < 1e-10);
        assert!(mean.tail_bound <= 1e-10);
        assert!(mean.verification.normalization < 1e-10);
        assert!(mean.verification.idempotency_l1 < 1e-9);
        assert!(mean.verification.eigen_residual < 1e-9);
    }

    #[test]
    fn mean_fails_not_l2_at_identity() {
        let coeffs = RecurrenceCoefficients::<f64>::chebyshev_t();
        assert!(matches!(
            construct_mean(&coeffs, 1.0, 1.0, &MeanOptions::default()),
            Err(Error::NotL2 { .. })
        ));
    }

    #[test]
    fn symmetric_means_are_exact() {
        // b ≡ 1, level 1: α = (1, -1), ‖α‖₂² = 2, m = (1/2, -1/2).
        let p1 = SymmetricParams::new(vec![Rational::one()]).unwrap();
        let m = construct_symmetric_mean(&p1, 1).unwrap();
        assert_eq!(m.alpha_l2_sq, Rational::from_int(2));
        assert_eq!(m.density.values(), &[rat(1, 2), rat(-1, 2)]);
        assert_eq!(m.normalization_error, Rational::zero());
        assert_eq!(m.idempotency_l1, Rational::zero());
        assert_eq!(m.eigen_residual, Rational::zero());

        // b ≡ 1/2, deeper level: still exactly zero residuals.
        let p2 = SymmetricParams::new(vec![rat(1, 2)]).unwrap();
        for level in 1..5 {
            let m = construct_symmetric_mean(&p2, level).unwrap();
            assert_eq!(m.normalization_error, Rational::zero(), "level {level}");
            assert_eq!(m.idempotency_l1, Rational::zero(), "level {level}");
            assert_eq!(m.eigen_residual, Rational::zero(), "level {level}");
        }
        assert!(matches!(
            construct_symmetric_mean(&p2, 0),
            Err(Error::NotL2 { .. })
        ));
    }

    #[test]
    fn verdict_matrix_on_presets() {
        let opts = VerdictOptions::default();
        let t = RecurrenceCoefficients::<f64>::chebyshev_t();
        let tf = classify_family(&t, 512, 1e-4).unwrap();
        let ts = estimate_support(&orthonormalize(&t), &[128, 256], &SupportOptions::default())
            .unwrap();
        let r = verdict_polynomial(&t, &tf, &ts, 0.3, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Amenable, "{}", r.clause);
        let r = verdict_polynomial(&t, &tf, &ts, 1.0, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::IdentityAlwaysAmenable);
        let r = verdict_polynomial(&t, &tf, &ts, 5.0, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::OutsideDual, "{}", r.clause);

        let u = RecurrenceCoefficients::<f64>::chebyshev_u();
        let uf = classify_family(&u, 512, 1e-4).unwrap();
        let us = estimate_support(&orthonormalize(&u), &[128, 256], &SupportOptions::default())
            .unwrap();
        let r = verdict_polynomial(&u, &uf, &us, 0.3, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::NotAmenable, "{}", r.clause);
    }

    #[test]
    fn verdict_unique_mean_at_signed_atom() {
        let coeffs = signed_atom_family();
        let flags = classify_family(&coeffs, 512, 1e-4).unwrap();
        let sys = orthonormalize(&coeffs);
        let est = estimate_support(&sys, &[200, 400], &SupportOptions::default()).unwrap();
        assert_eq!(est.mass_points.len(), 1, "{:?}", est.mass_points);
        let x = est.mass_points[0].x;
        assert!((x + 5.0 / 3.0).abs() < 1e-9, "{x}");
        assert!((est.mass_points[0].weight - 2.0 / 3.0).abs() < 1e-9);
        let r = verdict_polynomial(&coeffs, &flags, &est, x, &VerdictOptions::default())
            .unwrap();
        assert_eq!(r.verdict, Verdict::UniqueMean, "{}", r.clause);
        let mean = r.mean.unwrap();
        assert!(mean.verification.idempotency_l1 < 1e-9);
    }

    #[test]
    fn corollary_branches() {
        // Vacuous: mixed verdicts.
        let coeffs = RecurrenceCoefficients::<f64>::chebyshev_t();
        let flags = classify_family(&coeffs, 512, 1e-4).unwrap();
        let est = estimate_support(
            &orthonormalize(&coeffs),
            &[128, 256],
            &SupportOptions::default(),
        )
        .unwrap();
        let reports = vec![
            verdict_polynomial(&coeffs, &flags, &est, 0.3, &VerdictOptions::default()).unwrap(),
        ];
        let c = corollary_check(&reports, Some(&est), 0.05);
        assert!(!c.applicable && c.pass);

        // Symmetric: all unique, structural closure.
        let params = SymmetricParams::new(vec![0.5f64]).unwrap();
        let reports: Vec<AmenabilityReport> = (1..4)
            .map(|l| verdict_symmetric(&params, l).unwrap())
            .collect();
        let c = corollary_check(&reports, None, 0.05);
        assert!(c.applicable && c.pass);

        // Applicable with an M(0,1)-anchored support: 1 is an endpoint of
        // the essential interval, distance 0.
        let signed = signed_atom_family();
        let sflags = classify_family(&signed, 512, 1e-4).unwrap();
        let sest = estimate_support(
            &orthonormalize(&signed),
            &[200, 400],
            &SupportOptions::default(),
        )
        .unwrap();
        let r = verdict_polynomial(
            &signed,
            &sflags,
            &sest,
            sest.mass_points[0].x,
            &VerdictOptions::default(),
        )
        .unwrap();
        let c = corollary_check(&[r], Some(&sest), 0.05);
        assert!(c.applicable && c.pass, "{}", c.detail);
    }
}
