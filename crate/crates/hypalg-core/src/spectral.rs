//! Characters, orthonormal systems, quadrature, and support estimation.
//!
//! Characters of a polynomial family are the sequences `n ↦ p_n(x)`; they
//! are evaluated by the forward three-term recurrence, exactly under the
//! rational backend. At points where the character is square-summable the
//! forward recurrence is violently unstable (the character is then the
//! *minimal* solution of the recurrence), so a backward Miller evaluation
//! is provided as well; its boundary residual doubles as an independent
//! detector for such points.
//!
//! The orthonormalized system `q_n = √h(n) p_n` satisfies
//! `x q_n = λ_{n+1} q_{n+1} + β_n q_n + λ_n q_{n-1}`; its Jacobi matrix
//! drives Gaussian quadrature for the orthogonality measure
//! (Golub–Welsch) and, at pairs of truncations, the support estimate
//! that separates essential spectrum from stable mass points.

use alloc::vec;
use alloc::vec::Vec;

// Provides f64 methods (abs, sqrt, …) when building without std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::coeffs::{RecurrenceCoefficients, TailRule};
use crate::measure::SequenceMeasure;
use crate::scalar::Scalar;
use crate::table::HaarWeights;
use crate::tridiag;
use crate::{Error, Result};

/// A character evaluation: the point `x` and the values `p_n(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterEval<S> {
    pub x: S,
    pub values: Vec<S>,
}

/// Forward three-term recurrence for `p_0(x), …, p_{len-1}(x)`.
/// Exact for exact scalars and rational `x`.
pub fn evaluate_character<S: Scalar>(
    coeffs: &RecurrenceCoefficients<S>,
    x: &S,
    len: usize,
) -> CharacterEval<S> {
    let mut values = Vec::with_capacity(len);
    if len == 0 {
        return CharacterEval { x: x.clone(), values };
    }
    values.push(S::one());
    if len == 1 {
        return CharacterEval { x: x.clone(), values };
    }
    let t = (x.clone() - coeffs.b(0)) / coeffs.a(0); // p_1(x)
    values.push(t.clone());
    for n in 1..len - 1 {
        let next = ((t.clone() - coeffs.b(n)) * &values[n] - coeffs.c(n) * &values[n - 1])
            / coeffs.a(n);
        values.push(next);
    }
    CharacterEval { x: x.clone(), values }
}

/// Result of a backward (Miller) evaluation.
#[derive(Debug, Clone)]
pub struct BackwardEval {
    /// `p_n(x)` assuming the minimal solution, normalized to `p_0 = 1`.
    pub values: Vec<f64>,
    /// `|v_1 - p_1(x)|` after normalization. Near zero exactly when the
    /// character itself is the minimal solution (an ℓ²-type point);
    /// `O(1)` otherwise.
    pub boundary_residual: f64,
}

/// Backward recurrence with a guard tail and rescaling. The downward
/// sweep damps the dominant solution, so the result approximates the
/// minimal solution of the recurrence at `x`.
pub fn evaluate_character_backward(
    coeffs: &RecurrenceCoefficients<f64>,
    x: f64,
    len: usize,
) -> BackwardEval {
    let len = len.max(2);
    let guard = 48 + len / 8;
    let top = len + guard;
    let t = (x - coeffs.b(0)) / coeffs.a(0);
    let mut v = vec![0.0f64; top + 1];
    v[top] = 0.0;
    v[top - 1] = 1.0;
    for n in (1..top).rev() {
        // p_{n-1} = ((t - b_n) p_n - a_n p_{n+1}) / c_n
        let next = ((t - coeffs.b(n)) * v[n] - coeffs.a(n) * v[n + 1]) / coeffs.c(n);
        v[n - 1] = next;
        if next.abs() > 1e250 {
            let scale = 1.0 / next.abs();
            for w in v[n - 1..].iter_mut() {
                *w *= scale;
            }
        }
    }
    let head = v[0];
    if head == 0.0 || !head.is_finite() {
        return BackwardEval {
            values: vec![f64::NAN; len],
            boundary_residual: f64::INFINITY,
        };
    }
    let values: Vec<f64> = v[..len].iter().map(|w| w / head).collect();
    let boundary_residual = (values[1] - t).abs();
    BackwardEval { values, boundary_residual }
}

#[derive(Debug, Clone, PartialEq)]
enum OrthSource {
    FromCoeffs(RecurrenceCoefficients<f64>),
    Direct { lambda: Vec<f64>, beta: Vec<f64> },
}

/// The orthonormal recurrence data `(λ_n, β_n)` with `λ_0 = 0`:
/// `x q_n = λ_{n+1} q_{n+1} + β_n q_n + λ_n q_{n-1}`, `q_n = √h(n) p_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalSystem {
    source: OrthSource,
}

/// Compute the orthonormal system of a polynomial family:
/// `λ_1 = a_0 √c_1`, `λ_n = a_0 √(c_n a_{n-1})` for `n ≥ 2`,
/// `β_0 = b_0`, `β_n = a_0 b_n + b_0`.
pub fn orthonormalize(coeffs: &RecurrenceCoefficients<f64>) -> OrthonormalSystem {
    OrthonormalSystem { source: OrthSource::FromCoeffs(coeffs.clone()) }
}

impl OrthonormalSystem {
    /// Directly supplied `(λ, β)` lists; entries beyond the lists repeat
    /// the final value. Requires `λ_0 = 0`, `λ_n > 0` afterwards.
    pub fn from_lambda_beta(lambda: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        let invalid = |what: &str| Error::InvalidParameter { what: what.into() };
        if lambda.len() < 2 || beta.is_empty() {
            return Err(invalid("orthonormal data needs lambda (>= 2 entries) and beta"));
        }
        if lambda[0] != 0.0 {
            return Err(invalid("lambda_0 must be 0"));
        }
        if lambda[1..].iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(invalid("lambda_n must be positive and finite for n >= 1"));
        }
        if beta.iter().any(|v| !v.is_finite()) {
            return Err(invalid("beta entries must be finite"));
        }
        Ok(Self { source: OrthSource::Direct { lambda, beta } })
    }

    /// `λ_n` (`λ_0 = 0`).
    pub fn lambda(&self, n: usize) -> f64 {
        match &self.source {
            OrthSource::FromCoeffs(c) => {
                if n == 0 {
                    0.0
                } else if n == 1 {
                    c.a(0) * c.c(1).sqrt()
                } else {
                    c.a(0) * (c.c(n) * c.a(n - 1)).sqrt()
                }
            }
            OrthSource::Direct { lambda, .. } => {
                if n == 0 {
                    0.0
                } else {
                    lambda[n.min(lambda.len() - 1)]
                }
            }
        }
    }

    /// `β_n`.
    pub fn beta(&self, n: usize) -> f64 {
        match &self.source {
            OrthSource::FromCoeffs(c) => {
                if n == 0 {
                    c.b(0)
                } else {
                    c.a(0) * c.b(n) + c.b(0)
                }
            }
            OrthSource::Direct { beta, .. } => beta[n.min(beta.len() - 1)],
        }
    }

    /// Jacobi matrix data of size `order`: diagonal `β_0..β_{order-1}`,
    /// off-diagonal `λ_1..λ_{order-1}`.
    pub fn jacobi(&self, order: usize) -> (Vec<f64>, Vec<f64>) {
        let d: Vec<f64> = (0..order).map(|n| self.beta(n)).collect();
        let e: Vec<f64> = (1..order).map(|n| self.lambda(n)).collect();
        (d, e)
    }

    /// Structure-relation coefficients of the `q`-system itself:
    /// `q_1 q_n = A_n q_{n+1} + B_n q_n + C_n q_{n-1}` with
    /// `A_0 = λ_1`, `B_0 = β_0`, `A_n = λ_{n+1}/λ_1`, `B_n = (β_n-β_0)/λ_1`,
    /// `C_n = λ_n/λ_1`. The rows are not normalized (the `q_n` are not 1 at
    /// 1), so the result only supports evaluation and table construction;
    /// its Haar weights are identically 1 by orthonormality. Coefficients
    /// beyond `window` continue with a constant tail, which is exact when
    /// the system's own data has a constant tail.
    pub fn q_structure(&self, window: usize) -> Result<RecurrenceCoefficients<f64>> {
        let n = window.max(2);
        let l1 = self.lambda(1);
        let mut a = Vec::with_capacity(n + 1);
        let mut b = Vec::with_capacity(n + 1);
        let mut c = Vec::with_capacity(n);
        a.push(l1);
        b.push(self.beta(0));
        for i in 1..=n {
            a.push(self.lambda(i + 1) / l1);
            b.push((self.beta(i) - self.beta(0)) / l1);
            c.push(self.lambda(i) / l1);
        }
        RecurrenceCoefficients::explicit_unchecked(a, b, c, TailRule::Constant)
    }
}

/// Forward evaluation of `q_0(x), …, q_{len-1}(x)`.
pub fn evaluate_q(sys: &OrthonormalSystem, x: f64, len: usize) -> Vec<f64> {
    let mut values = Vec::with_capacity(len);
    if len == 0 {
        return values;
    }
    values.push(1.0);
    if len == 1 {
        return values;
    }
    values.push((x - sys.beta(0)) / sys.lambda(1));
    for n in 1..len - 1 {
        let next = ((x - sys.beta(n)) * values[n] - sys.lambda(n) * values[n - 1])
            / sys.lambda(n + 1);
        values.push(next);
    }
    values
}

/// Discrete approximation of the orthogonality measure: Gaussian nodes
/// and probability weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Golub–Welsch quadrature of the given order: nodes are the Jacobi
/// matrix eigenvalues (ascending), weights the squared first eigenvector
/// components, normalized to total mass 1.
pub fn quadrature(sys: &OrthonormalSystem, order: usize) -> Result<SpectralMeasure> {
    if order == 0 {
        return Err(Error::InvalidParameter { what: "quadrature order must be >= 1".into() });
    }
    let (d, e) = sys.jacobi(order);
    let (nodes, firsts) = tridiag::eigen_first_row(&d, &e)?;
    let norm: f64 = firsts.iter().map(|z| z * z).sum();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::NonFinite { what: "quadrature weight normalization".into() });
    }
    let weights = firsts.iter().map(|z| z * z / norm).collect();
    Ok(SpectralMeasure { nodes, weights })
}

/// Plancherel comparison: returns `(Σ_n f(n)² h(n), Σ_k w_k f̂(x_k)²)`.
/// Gaussian exactness requires `order ≥ deg f + 1`.
pub fn plancherel_check(
    f: &SequenceMeasure<f64>,
    measure: &SpectralMeasure,
    coeffs: &RecurrenceCoefficients<f64>,
    haar: &HaarWeights<f64>,
) -> Result<(f64, f64)> {
    let required = f.len();
    if measure.nodes.len() < required {
        return Err(Error::OrderTooSmall { required, got: measure.nodes.len() });
    }
    let lhs = f.l2_norm_sq(haar);
    let mut rhs = 0.0;
    for (xk, wk) in measure.nodes.iter().zip(&measure.weights) {
        let chi = evaluate_character(coeffs, xk, f.len());
        let mut hat = 0.0;
        for (n, v) in f.values().iter().enumerate() {
            hat += v * chi.values[n] * haar.get(n);
        }
        rhs += wk * hat * hat;
    }
    Ok((lhs, rhs))
}

/// A detected atom of the orthogonality measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MassPoint {
    pub x: f64,
    pub weight: f64,
    /// Matched across all requested truncations within `match_tol`.
    pub stable: bool,
}

/// Options for [`estimate_support`].
#[derive(Debug, Clone)]
pub struct SupportOptions {
    /// Margin beyond `[-1, 1]` before an eigenvalue counts as outside.
    pub outside_eps: f64,
    /// Cross-truncation matching tolerance.
    pub match_tol: f64,
    /// Minimal separation from the essential interval and between atoms.
    pub sep: f64,
    /// Anchor the essential interval to `[-1, 1]`; `None` = detect from
    /// the tail of `(λ, β)`.
    pub assume_m01: Option<bool>,
    /// Tolerance for that tail detection (`|λ-½|`, `|β|`).
    pub m01_tol: f64,
}

impl Default for SupportOptions {
    fn default() -> Self {
        Self {
            outside_eps: 1e-3,
            match_tol: 1e-6,
            sep: 1e-3,
            assume_m01: None,
            m01_tol: 1e-3,
        }
    }
}

/// Support estimate from truncated Jacobi spectra.
#[derive(Debug, Clone)]
pub struct SupportEstimate {
    pub truncations: Vec<usize>,
    /// Eigenvalues per truncation (ascending), aligned with `truncations`.
    pub eigenvalues: Vec<Vec<f64>>,
    /// Estimated essential interval; `None` when no continuous part is
    /// visible (pure point at these truncations).
    pub essential: Option<(f64, f64)>,
    /// Whether `[-1, 1]` anchoring was applied.
    pub anchored_m01: bool,
    pub mass_points: Vec<MassPoint>,
    pub match_tol: f64,
    pub sep: f64,
}

/// Estimate essential spectrum and mass points from Jacobi truncations.
///
/// Eigenvalues of the largest truncation are classed *stable* when every
/// smaller truncation has an eigenvalue within `match_tol`. For a family
/// anchored to `[-1, 1]`, stable eigenvalues outside
/// `[-1-outside_eps, 1+outside_eps]` become mass points; otherwise the
/// unstable eigenvalues (which drift with truncation, the signature of
/// continuous spectrum) span the essential interval and stable ones at
/// distance ≥ `sep` from it become mass points. Weights come from the
/// squared first eigenvector components of the largest truncation.
pub fn estimate_support(
    sys: &OrthonormalSystem,
    truncations: &[usize],
    opts: &SupportOptions,
) -> Result<SupportEstimate> {
    let mut ts = truncations.to_vec();
    ts.sort_unstable();
    ts.dedup();
    if ts.len() < 2 {
        return Err(Error::InvalidParameter {
            what: "support estimation needs at least two distinct truncation sizes".into(),
        });
    }
    if ts[0] < 2 {
        return Err(Error::InvalidParameter {
            what: "truncation sizes must be at least 2".into(),
        });
    }
    let largest = *ts.last().unwrap();
    let mut eigenvalues: Vec<Vec<f64>> = Vec::with_capacity(ts.len());
    for &n in &ts[..ts.len() - 1] {
        let (d, e) = sys.jacobi(n);
        eigenvalues.push(tridiag::eigenvalues(&d, &e)?);
    }
    let (d, e) = sys.jacobi(largest);
    let (last_vals, firsts) = tridiag::eigen_first_row(&d, &e)?;
    let norm: f64 = firsts.iter().map(|z| z * z).sum();

    let matched = |spectrum: &[f64], x: f64| -> bool {
        let idx = spectrum.partition_point(|v| *v < x);
        let mut best = f64::INFINITY;
        if idx < spectrum.len() {
            best = best.min((spectrum[idx] - x).abs());
        }
        if idx > 0 {
            best = best.min((spectrum[idx - 1] - x).abs());
        }
        best <= opts.match_tol
    };
    let stable: Vec<bool> = last_vals
        .iter()
        .map(|&x| eigenvalues.iter().all(|spec| matched(spec, x)))
        .collect();

    let anchored_m01 = opts.assume_m01.unwrap_or_else(|| {
        let lo = (3 * largest) / 4;
        (lo..largest).all(|n| {
            (sys.lambda(n) - 0.5).abs() <= opts.m01_tol && sys.beta(n).abs() <= opts.m01_tol
        })
    });

    let essential = if anchored_m01 {
        Some((-1.0, 1.0))
    } else {
        let unstable: Vec<f64> = last_vals
            .iter()
            .zip(&stable)
            .filter(|(_, s)| !**s)
            .map(|(v, _)| *v)
            .collect();
        if unstable.is_empty() {
            None
        } else {
            Some((unstable[0], *unstable.last().unwrap()))
        }
    };

    let outside = |x: f64| -> bool {
        match essential {
            Some((lo, hi)) => {
                if anchored_m01 {
                    x < lo - opts.outside_eps || x > hi + opts.outside_eps
                } else {
                    x < lo - opts.sep || x > hi + opts.sep
                }
            }
            None => true,
        }
    };
    let mut candidates: Vec<MassPoint> = Vec::new();
    for (i, &x) in last_vals.iter().enumerate() {
        if stable[i] && outside(x) {
            candidates.push(MassPoint { x, weight: firsts[i] * firsts[i] / norm, stable: true });
        }
    }
    // Enforce pairwise separation: crowded candidates (accumulation, e.g.
    // compact type near 1) are excluded from the atom list but remain
    // visible in the raw spectra.
    let mut mass_points = Vec::with_capacity(candidates.len());
    for (i, mp) in candidates.iter().enumerate() {
        let crowded = candidates
            .iter()
            .enumerate()
            .any(|(j, other)| i != j && (other.x - mp.x).abs() < opts.sep);
        if !crowded {
            mass_points.push(mp.clone());
        }
    }

    eigenvalues.push(last_vals);
    Ok(SupportEstimate {
        truncations: ts,
        eigenvalues,
        essential,
        anchored_m01,
        mass_points,
        match_tol: opts.match_tol,
        sep: opts.sep,
    })
}

/// True iff `x` is one of the stable mass points and lies at distance
/// ≥ `sep` from the essential interval and from every other mass point.
pub fn is_isolated(x: f64, estimate: &SupportEstimate, sep: f64) -> bool {
    let locate_tol = estimate.match_tol.max(1e-12);
    let Some(mp) = estimate
        .mass_points
        .iter()
        .find(|m| (m.x - x).abs() <= locate_tol)
    else {
        return false;
    };
    if !mp.stable {
        return false;
    }
    if let Some((lo, hi)) = estimate.essential {
        let dist = if mp.x < lo {
            lo - mp.x
        } else if mp.x > hi {
            mp.x - hi
        } else {
            0.0
        };
        if dist < sep {
            return false;
        }
    }
    estimate
        .mass_points
        .iter()
        .all(|other| (other.x - mp.x).abs() <= locate_tol || (other.x - mp.x).abs() >= sep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::TailRule;
    use crate::scalar::{pow_usize, Rational};
    use crate::table::HaarWeights;
    use num_traits::One;

    fn rat(p: i64, q: i64) -> Rational {
        Rational::ratio(p, q)
    }

    fn signed_atom_family() -> RecurrenceCoefficients<Rational> {
        // a_0 = 2, b_0 = -1; a_n = c_n = 1/4, b_n = 1/2.
        RecurrenceCoefficients::explicit(
            vec![Rational::from_int(2), rat(1, 4)],
            vec![Rational::from_int(-1), rat(1, 2)],
            vec![rat(1, 4)],
            TailRule::Constant,
        )
        .unwrap()
    }

    #[test]
    fn characters_are_one_at_one() {
        let fams: [RecurrenceCoefficients<Rational>; 3] = [
            RecurrenceCoefficients::chebyshev_u(),
            RecurrenceCoefficients::geometric_compact(rat(3, 7)).unwrap(),
            signed_atom_family(),
        ];
        for f in &fams {
            let chi = evaluate_character(f, &Rational::one(), 40);
            assert!(chi.values.iter().all(|v| *v == Rational::one()));
        }
    }

    #[test]
    fn chebyshev_t_closed_form_values() {
        let f = RecurrenceCoefficients::<f64>::chebyshev_t();
        let chi = evaluate_character(&f, &0.5, 6);
        // T_n(cos θ) = cos nθ with θ = π/3.
        let expect = [1.0, 0.5, -0.5, -1.0, -0.5, 0.5];
        for (v, e) in chi.values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-14);
        }
    }

    #[test]
    fn signed_family_atom_values_are_exact_powers() {
        let f = signed_atom_family();
        let chi = evaluate_character(&f, &rat(-5, 3), 30);
        for (n, v) in chi.values.iter().enumerate() {
            assert_eq!(*v, pow_usize(&rat(-1, 3), n), "n = {n}");
        }
    }

    #[test]
    fn orthonormalize_known_lambdas() {
        let t = orthonormalize(&RecurrenceCoefficients::<f64>::chebyshev_t());
        assert_eq!(t.lambda(0), 0.0);
        assert!((t.lambda(1) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((t.lambda(2) - 0.5).abs() < 1e-15);
        assert!((t.lambda(9) - 0.5).abs() < 1e-15);
        assert_eq!(t.beta(0), 0.0);
        assert_eq!(t.beta(5), 0.0);
        // Chebyshev-U is exactly orthonormal-free: λ ≡ ½.
        let u = orthonormalize(&RecurrenceCoefficients::<f64>::chebyshev_u());
        for n in 1..20 {
            assert!((u.lambda(n) - 0.5).abs() < 1e-15, "n = {n}");
        }
        // Signed family: λ = (0, 1, ½, ½, ...), β = (-1, 0, 0, ...).
        let s = orthonormalize(&signed_atom_family().to_f64());
        assert!((s.lambda(1) - 1.0).abs() < 1e-15);
        assert!((s.lambda(4) - 0.5).abs() < 1e-15);
        assert!((s.beta(0) + 1.0).abs() < 1e-15);
        assert!(s.beta(3).abs() < 1e-15);
    }

    #[test]
    fn q_matches_scaled_p() {
        for coeffs in [
            RecurrenceCoefficients::<f64>::chebyshev_u(),
            RecurrenceCoefficients::geometric_compact(0.3).unwrap(),
        ] {
            let sys = orthonormalize(&coeffs);
            let haar = HaarWeights::from_recurrence(&coeffs, 100);
            for x in [0.3f64, -0.77] {
                let q = evaluate_q(&sys, x, 100);
                let p = evaluate_character(&coeffs, &x, 100);
                let mut compared = 0usize;
                for n in 0..100 {
                    // Compact-type Haar weights overflow f64 around
                    // n ≈ 35; compare only while the scale is sane.
                    if *haar.get(n) > 1e100 || q[n].abs() > 1e100 {
                        break;
                    }
                    let expect = haar.get(n).sqrt() * p.values[n];
                    let scale = expect.abs().max(1.0);
                    assert!(
                        (q[n] - expect).abs() / scale < 1e-8,
                        "n = {n}: {} vs {expect}",
                        q[n]
                    );
                    compared += 1;
                }
                // Geometric-compact h(n) crosses 1e100 near n = 20.
                assert!(compared >= 18, "only {compared} comparisons");
            }
        }
    }

    #[test]
    fn quadrature_small_orders() {
        // Order 1: single node at β_0.
        let s = orthonormalize(&signed_atom_family().to_f64());
        let m = quadrature(&s, 1).unwrap();
        assert_eq!(m.nodes.len(), 1);
        assert!((m.nodes[0] + 1.0).abs() < 1e-14);
        assert!((m.weights[0] - 1.0).abs() < 1e-14);
        // First moment equals β_0 at any order.
        let m = quadrature(&s, 24).unwrap();
        let first: f64 = m.nodes.iter().zip(&m.weights).map(|(x, w)| x * w).sum();
        assert!((first + 1.0).abs() < 1e-12, "{first}");
        // Chebyshev-T order 3: nodes ±√3/2, 0 with flat weights 1/3.
        let t = orthonormalize(&RecurrenceCoefficients::<f64>::chebyshev_t());
        let m = quadrature(&t, 3).unwrap();
        let r = 3.0f64.sqrt() / 2.0;
        for (node, expect) in m.nodes.iter().zip([-r, 0.0, r]) {
            assert!((node - expect).abs() < 1e-13);
        }
        for w in &m.weights {
            assert!((w - 1.0 / 3.0).abs() < 1e-13);
        }
    }

    #[test]
    fn quadrature_integrates_orthogonality_relations() {
        let coeffs = RecurrenceCoefficients::<f64>::chebyshev_u();
        let sys = orthonormalize(&coeffs);
        let haar = HaarWeights::from_recurrence(&coeffs, 32);
        let order = 24;
        let m = quadrature(&sys, order).unwrap();
        let upto = order / 2 - 1;
        for i in 0..=upto {
            for j in 0..=upto {
                let mut acc = 0.0;
                for (x, w) in m.nodes.iter().zip(&m.weights) {
                    let chi = evaluate_character(&coeffs, x, upto + 1);
                    acc += w * chi.values[i] * chi.values[j];
                }
                let expect = if i == j { 1.0 / haar.get(i) } else { 0.0 };
                assert!((acc - expect).abs() < 1e-9, "({i},{j}): {acc} vs {expect}");
            }
        }
    }

    #[test]
    fn plancherel_reference_values() {
        let coeffs = RecurrenceCoefficients::<f64>::chebyshev_t();
        let sys = orthonormalize(&coeffs);
        let haar = HaarWeights::from_recurrence(&coeffs, 8);
        let m = quadrature(&sys, 8).unwrap();
        let d0 = SequenceMeasure::point(0, &haar);
        let (l, r) = plancherel_check(&d0, &m, &coeffs, &haar).unwrap();
        assert!((l - 1.0).abs() < 1e-14 && (r - 1.0).abs() < 1e-12);
        let f = SequenceMeasure::indicator(1);
        let (l, r) = plancherel_check(&f, &m, &coeffs, &haar).unwrap();
        assert!((l - 2.0).abs() < 1e-14, "{l}");
        assert!((r - 2.0).abs() < 1e-12, "{r}");
        // Order too small to integrate f̂² exactly.
        let tiny = quadrature(&sys, 1).unwrap();
        assert!(matches!(
            plancherel_check(&f, &tiny, &coeffs, &haar),
            Err(Error::OrderTooSmall { required: 2, got: 1 })
        ));
    }

    #[test]
    fn support_of_chebyshev_t_has_no_atoms() {
        let sys = orthonormalize(&RecurrenceCoefficients::<f64>::chebyshev_t());
        let est = estimate_support(&sys, &[120, 240], &SupportOptions::default()).unwrap();
        assert!(est.anchored_m01);
        assert_eq!(est.essential, Some((-1.0, 1.0)));
        assert!(est.mass_points.is_empty(), "{:?}", est.mass_points);
    }

    #[test]
    fn inflated_system_has_two_symmetric_atoms() {
        let sys = OrthonormalSystem::from_lambda_beta(vec![0.0, 1.0, 0.5], vec![0.0]).unwrap();
        let est = estimate_support(&sys, &[200, 400], &SupportOptions::default()).unwrap();
        assert!(est.anchored_m01);
        assert_eq!(est.mass_points.len(), 2, "{:?}", est.mass_points);
        let x = 2.0 / 3.0f64.sqrt();
        assert!((est.mass_points[0].x + x).abs() < 1e-10);
        assert!((est.mass_points[1].x - x).abs() < 1e-10);
        for mp in &est.mass_points {
            assert!(mp.stable);
            assert!((mp.weight - 1.0 / 3.0).abs() < 1e-10, "{}", mp.weight);
        }
        assert!(is_isolated(est.mass_points[1].x, &est, 1e-3));
        assert!(!is_isolated(0.5, &est, 1e-3));
        assert!(!is_isolated(1.0, &est, 1e-3));
    }

    #[test]
    fn backward_evaluation_detects_the_atom() {
        let coeffs = signed_atom_family().to_f64();
        let atom = evaluate_character_backward(&coeffs, -5.0 / 3.0, 60);
        assert!(atom.boundary_residual < 1e-12, "{}", atom.boundary_residual);
        for (n, v) in atom.values.iter().enumerate().take(40) {
            let expect = (-1.0f64 / 3.0).powi(n as i32);
            assert!(
                (v - expect).abs() <= 1e-13 * expect.abs().max(1e-6),
                "n = {n}: {v} vs {expect}"
            );
        }
        // Inside the essential interval the minimal solution does not
        // satisfy the character boundary condition.
        let inside = evaluate_character_backward(&coeffs, 0.5, 60);
        assert!(inside.boundary_residual > 1e-3, "{}", inside.boundary_residual);
    }

    #[test]
    fn support_needs_two_truncations() {
        let sys = orthonormalize(&RecurrenceCoefficients::<f64>::chebyshev_t());
        assert!(matches!(
            estimate_support(&sys, &[200], &SupportOptions::default()),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn q_structure_reproduces_q_values() {
        let sys = OrthonormalSystem::from_lambda_beta(vec![0.0, 1.0, 0.5], vec![0.0]).unwrap();
        let qc = sys.q_structure(16).unwrap();
        // Haar weights of the q-structure are identically 1.
        let h = HaarWeights::from_recurrence(&qc, 12);
        for n in 0..12 {
            assert!((h.get(n) - 1.0).abs() < 1e-14);
        }
        for x in [0.25f64, 2.0 / 3.0f64.sqrt() * 1.0] {
            let direct = evaluate_q(&sys, x, 16);
            let via = evaluate_character(&qc, &x, 16);
            for n in 0..16 {
                assert!((direct[n] - via.values[n]).abs() < 1e-12);
            }
        }
    }
}
