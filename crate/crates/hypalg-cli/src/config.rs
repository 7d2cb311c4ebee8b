//! Config file schema, parsing and validation.
//!
//! The config is a single JSON document in which every number is written
//! as a string (`"0.3"`, `"1e-12"`, `"1/3"`), so values survive parsing
//! exactly under the rational backend and are parsed once, uniformly,
//! under the float backend.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use hypalg_core::{
    orthonormalize, preset, Family, OrthonormalSystem, PresetParams, RecurrenceCoefficients,
    Scalar, SymmetricParams, TailRule,
};

/// A failure carrying the process exit code.
///
/// Codes: 1 config/usage, 2 axiom failure, 3 numerical failure,
/// 4 construction impossible.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    pub fn construction(message: impl Into<String>) -> Self {
        Self { code: 4, message: message.into() }
    }

    pub fn from_core(err: hypalg_core::Error) -> Self {
        use hypalg_core::Error as E;
        let code = match err {
            E::UnknownPreset { .. } | E::InvalidParameter { .. } => 1,
            E::TableExhausted { .. }
            | E::EigensolverFailure { .. }
            | E::OrderTooSmall { .. }
            | E::WindowTooSmall { .. }
            | E::NonFinite { .. } => 3,
            E::NotL2 { .. } | E::DegenerateTable { .. } => 4,
        };
        Self { code, message: err.to_string() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

pub type CliResult<T> = Result<T, Failure>;

fn parse_num<S: Scalar>(text: &str, field: &str) -> CliResult<S> {
    S::parse(text)
        .map_err(|_| Failure::config(format!("field `{field}`: cannot parse number `{text}`")))
}

fn parse_seq<S: Scalar>(xs: &[String], field: &str) -> CliResult<Vec<S>> {
    xs.iter().map(|x| parse_num(x, field)).collect()
}

// ---------------------------------------------------------------------
// Raw (serde) layer.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    family: RawFamily,
    #[serde(default)]
    max_level: Option<usize>,
    #[serde(default)]
    truncations: Option<Vec<usize>>,
    #[serde(default)]
    tolerances: Option<serde_json::Map<String, serde_json::Value>>,
    #[serde(default)]
    scan: Option<RawScan>,
    #[serde(default)]
    arithmetic: Option<String>,
    #[serde(default)]
    output: Option<String>,
    #[serde(default)]
    table_cap: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    kind: String,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    q: Option<String>,
    #[serde(default)]
    a: Option<Vec<String>>,
    #[serde(default)]
    b: Option<Vec<String>>,
    #[serde(default)]
    c: Option<Vec<String>>,
    #[serde(default)]
    tail: Option<RawTail>,
    #[serde(default)]
    lambda: Option<Vec<String>>,
    #[serde(default)]
    beta: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTail {
    rule: String,
    #[serde(default)]
    factor: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScan {
    #[serde(default)]
    x_min: Option<String>,
    #[serde(default)]
    x_max: Option<String>,
    #[serde(default)]
    step: Option<String>,
    #[serde(default)]
    points: Option<Vec<String>>,
}

// ---------------------------------------------------------------------
// Typed layer.

#[derive(Debug, Clone)]
pub enum TailSpec {
    Constant,
    Geometric { factor: String },
}

/// Family description with numbers kept as source strings, parsed per
/// backend on demand.
#[derive(Debug, Clone)]
pub enum FamilySpec {
    Preset { name: String, q: Option<String>, b: Option<Vec<String>> },
    Explicit { a: Vec<String>, b: Vec<String>, c: Vec<String>, tail: TailSpec },
    Symmetric { b: Vec<String> },
    Orthonormal { lambda: Vec<String>, beta: Vec<String> },
}

impl FamilySpec {
    pub fn is_symmetric(&self) -> bool {
        match self {
            FamilySpec::Symmetric { .. } => true,
            FamilySpec::Preset { name, .. } => name == "symmetric",
            _ => false,
        }
    }

    pub fn is_orthonormal(&self) -> bool {
        matches!(self, FamilySpec::Orthonormal { .. })
    }

    /// Resolve to a convolution family under the scalar backend `S`.
    pub fn family<S: Scalar>(&self) -> CliResult<Family<S>> {
        match self {
            FamilySpec::Preset { name, q, b } => {
                let params = PresetParams {
                    q: q.as_deref().map(|v| parse_num(v, "family.q")).transpose()?,
                    b: b.as_deref().map(|v| parse_seq(v, "family.b")).transpose()?,
                };
                preset(name, params).map_err(Failure::from_core)
            }
            FamilySpec::Explicit { a, b, c, tail } => {
                let tail = match tail {
                    TailSpec::Constant => TailRule::Constant,
                    TailSpec::Geometric { factor } => TailRule::Geometric {
                        factor: parse_num(factor, "family.tail.factor")?,
                    },
                };
                RecurrenceCoefficients::explicit(
                    parse_seq(a, "family.a")?,
                    parse_seq(b, "family.b")?,
                    parse_seq(c, "family.c")?,
                    tail,
                )
                .map(Family::Polynomial)
                .map_err(Failure::from_core)
            }
            FamilySpec::Symmetric { b } => SymmetricParams::new(parse_seq(b, "family.b")?)
                .map(Family::Symmetric)
                .map_err(Failure::from_core),
            FamilySpec::Orthonormal { .. } => Err(Failure::config(
                "orthonormal systems have no convolution family; \
                 use the spectrum/analyze/mean commands",
            )),
        }
    }

    /// Resolve the symmetric parameters, or fail as a usage error.
    pub fn symmetric<S: Scalar>(&self) -> CliResult<SymmetricParams<S>> {
        match self.family::<S>()? {
            Family::Symmetric(params) => Ok(params),
            Family::Polynomial(_) => {
                Err(Failure::config("this command path expects a symmetric family"))
            }
        }
    }

    /// The orthonormal system (λ, β) of the family, for spectral work.
    /// Always floating point. Fails for symmetric families, whose dual
    /// is not parameterized by a real interval.
    pub fn system(&self) -> CliResult<OrthonormalSystem> {
        match self {
            FamilySpec::Orthonormal { lambda, beta } => OrthonormalSystem::from_lambda_beta(
                parse_seq(lambda, "family.lambda")?,
                parse_seq(beta, "family.beta")?,
            )
            .map_err(Failure::from_core),
            spec if spec.is_symmetric() => Err(Failure::config(
                "spectral commands are not defined for symmetric families; \
                 their characters are indexed by level (use analyze/mean with --x <level>)",
            )),
            _ => match self.family::<f64>()? {
                Family::Polynomial(coeffs) => Ok(orthonormalize(&coeffs)),
                Family::Symmetric(_) => unreachable!("guarded above"),
            },
        }
    }
}

/// All tolerances and thresholds, with their defaults.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Axiom tolerance (float backend).
    pub tol: f64,
    /// Classification tolerance for tail statistics.
    pub ctol: f64,
    /// Isolation separation in the spectral variable.
    pub sep: f64,
    /// Cross-truncation eigenvalue matching tolerance.
    pub match_tol: f64,
    /// Convergence margin for norm ratio tests.
    pub margin: f64,
    /// Dual-membership growth bound B.
    pub growth_bound: f64,
    /// Backward-evaluation residual threshold.
    pub boundary_tol: f64,
    /// ℓ¹(h) mass allowed in a discarded mean tail.
    pub tail_target: f64,
    /// Margin beyond [-1, 1] before an eigenvalue counts as outside.
    pub outside_eps: f64,
    /// Distance bound for the support-closure consistency check.
    pub closure_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            ctol: 1e-4,
            sep: 1e-3,
            match_tol: 1e-6,
            margin: 0.05,
            growth_bound: 1e3,
            boundary_tol: 1e-6,
            tail_target: 1e-10,
            outside_eps: 1e-3,
            closure_tol: 0.05,
        }
    }
}

impl Tolerances {
    fn apply(&mut self, map: &serde_json::Map<String, serde_json::Value>) -> CliResult<()> {
        for (key, value) in map {
            let text = value.as_str().ok_or_else(|| {
                Failure::config(format!("tolerances.{key}: expected a number string"))
            })?;
            let v: f64 = parse_num(text, &format!("tolerances.{key}"))?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(Failure::config(format!(
                    "tolerances.{key} must be positive and finite, got {text}"
                )));
            }
            match key.as_str() {
                "tol" => self.tol = v,
                "ctol" => self.ctol = v,
                "sep" => self.sep = v,
                "match_tol" => self.match_tol = v,
                "margin" => self.margin = v,
                "B" | "growth_bound" => self.growth_bound = v,
                "boundary_tol" => self.boundary_tol = v,
                "tail_target" => self.tail_target = v,
                "outside_eps" => self.outside_eps = v,
                "closure_tol" => self.closure_tol = v,
                other => {
                    return Err(Failure::config(format!("unknown tolerance `{other}`")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Float,
    Rational,
}

impl Backend {
    pub fn parse(text: &str) -> CliResult<Self> {
        match text {
            "float" => Ok(Backend::Float),
            "rational" => Ok(Backend::Rational),
            other => Err(Failure::config(format!(
                "arithmetic backend must be `float` or `rational`, got `{other}`"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Backend::Float => "float",
            Backend::Rational => "rational",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ScanSpec {
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub step: Option<f64>,
    pub points: Vec<f64>,
}

impl ScanSpec {
    /// Expand into the ordered list of sample points: the arithmetic
    /// grid (when fully specified) followed by the explicit points.
    pub fn grid(&self) -> CliResult<Vec<f64>> {
        let mut xs = Vec::new();
        match (self.x_min, self.x_max, self.step) {
            (Some(lo), Some(hi), Some(step)) => {
                if !(step > 0.0) || hi < lo {
                    return Err(Failure::config(
                        "scan grid needs x_min <= x_max and step > 0",
                    ));
                }
                // Tolerate float endpoints: include hi when it lands
                // within half a step of the last grid point.
                let count = ((hi - lo) / step + 1e-9).floor() as usize;
                for i in 0..=count {
                    xs.push(lo + i as f64 * step);
                }
            }
            (None, None, None) => {}
            _ => {
                return Err(Failure::config(
                    "scan grid needs all of x_min, x_max, step (or none of them)",
                ));
            }
        }
        xs.extend_from_slice(&self.points);
        Ok(xs)
    }
}

/// Validated configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub family: FamilySpec,
    pub max_level: usize,
    pub truncations: Vec<usize>,
    pub tol: Tolerances,
    pub scan: ScanSpec,
    pub backend: Backend,
    pub output: Option<PathBuf>,
    /// Row cap for the emitted `table.csv`.
    pub table_cap: usize,
    /// The parsed config document, echoed into reports.
    pub raw: serde_json::Value,
}

pub fn load(path: &Path) -> CliResult<Config> {
    let text = fs::read_to_string(path).map_err(|e| {
        Failure::config(format!("cannot read config `{}`: {e}", path.display()))
    })?;
    from_str(&text)
}

pub fn from_str(text: &str) -> CliResult<Config> {
    let raw_value: serde_json::Value = serde_json::from_str(text).map_err(|e| {
        Failure::config(format!(
            "config parse error at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    let raw: RawConfig = serde_json::from_value(raw_value.clone())
        .map_err(|e| Failure::config(format!("config field error: {e}")))?;

    let family = build_family_spec(&raw.family)?;

    let mut truncations = raw.truncations.unwrap_or_else(|| vec![200, 400]);
    truncations.sort_unstable();
    truncations.dedup();
    if truncations.is_empty() || truncations.contains(&0) {
        return Err(Failure::config("truncations must be positive"));
    }

    let top_truncation = *truncations.last().unwrap();
    let max_level = match raw.max_level {
        Some(n) => {
            if n < top_truncation {
                return Err(Failure::config(format!(
                    "max_level {n} is below the largest truncation {top_truncation}"
                )));
            }
            n
        }
        None => top_truncation.max(64),
    };

    let mut tol = Tolerances::default();
    if let Some(map) = &raw.tolerances {
        tol.apply(map)?;
    }

    let scan = match &raw.scan {
        None => ScanSpec::default(),
        Some(rs) => ScanSpec {
            x_min: rs.x_min.as_deref().map(|v| parse_num(v, "scan.x_min")).transpose()?,
            x_max: rs.x_max.as_deref().map(|v| parse_num(v, "scan.x_max")).transpose()?,
            step: rs.step.as_deref().map(|v| parse_num(v, "scan.step")).transpose()?,
            points: rs
                .points
                .as_deref()
                .map(|v| parse_seq(v, "scan.points"))
                .transpose()?
                .unwrap_or_default(),
        },
    };

    let backend = match raw.arithmetic.as_deref() {
        None => Backend::Float,
        Some(text) => Backend::parse(text)?,
    };

    Ok(Config {
        family,
        max_level,
        truncations,
        tol,
        scan,
        backend,
        output: raw.output.map(PathBuf::from),
        table_cap: raw.table_cap.unwrap_or(16),
        raw: raw_value,
    })
}

fn build_family_spec(raw: &RawFamily) -> CliResult<FamilySpec> {
    let none_of = |fields: &[(&str, bool)]| -> CliResult<()> {
        for (name, present) in fields {
            if *present {
                return Err(Failure::config(format!(
                    "family.{name} is not a `{}` field",
                    raw.kind
                )));
            }
        }
        Ok(())
    };
    match raw.kind.as_str() {
        "preset" => {
            none_of(&[
                ("a", raw.a.is_some()),
                ("c", raw.c.is_some()),
                ("tail", raw.tail.is_some()),
                ("lambda", raw.lambda.is_some()),
                ("beta", raw.beta.is_some()),
            ])?;
            let name = raw
                .name
                .clone()
                .ok_or_else(|| Failure::config("family.name is required for kind `preset`"))?;
            Ok(FamilySpec::Preset { name, q: raw.q.clone(), b: raw.b.clone() })
        }
        "explicit" => {
            none_of(&[
                ("name", raw.name.is_some()),
                ("q", raw.q.is_some()),
                ("lambda", raw.lambda.is_some()),
                ("beta", raw.beta.is_some()),
            ])?;
            let missing = |f: &str| Failure::config(format!("family.{f} is required for kind `explicit`"));
            let tail = match &raw.tail {
                None => TailSpec::Constant,
                Some(RawTail { rule, factor }) => match rule.as_str() {
                    "constant" => TailSpec::Constant,
                    "geometric" => TailSpec::Geometric {
                        factor: factor.clone().ok_or_else(|| {
                            Failure::config("family.tail.factor is required for geometric tails")
                        })?,
                    },
                    other => {
                        return Err(Failure::config(format!(
                            "family.tail.rule must be `constant` or `geometric`, got `{other}`"
                        )));
                    }
                },
            };
            Ok(FamilySpec::Explicit {
                a: raw.a.clone().ok_or_else(|| missing("a"))?,
                b: raw.b.clone().ok_or_else(|| missing("b"))?,
                c: raw.c.clone().ok_or_else(|| missing("c"))?,
                tail,
            })
        }
        "symmetric" => {
            none_of(&[
                ("name", raw.name.is_some()),
                ("q", raw.q.is_some()),
                ("a", raw.a.is_some()),
                ("c", raw.c.is_some()),
                ("tail", raw.tail.is_some()),
                ("lambda", raw.lambda.is_some()),
                ("beta", raw.beta.is_some()),
            ])?;
            Ok(FamilySpec::Symmetric {
                b: raw
                    .b
                    .clone()
                    .ok_or_else(|| Failure::config("family.b is required for kind `symmetric`"))?,
            })
        }
        "orthonormal" => {
            none_of(&[
                ("name", raw.name.is_some()),
                ("q", raw.q.is_some()),
                ("a", raw.a.is_some()),
                ("b", raw.b.is_some()),
                ("c", raw.c.is_some()),
                ("tail", raw.tail.is_some()),
            ])?;
            let missing =
                |f: &str| Failure::config(format!("family.{f} is required for kind `orthonormal`"));
            Ok(FamilySpec::Orthonormal {
                lambda: raw.lambda.clone().ok_or_else(|| missing("lambda"))?,
                beta: raw.beta.clone().ok_or_else(|| missing("beta"))?,
            })
        }
        other => Err(Failure::config(format!(
            "family.kind must be one of preset|explicit|symmetric|orthonormal, got `{other}`"
        ))),
    }
}
