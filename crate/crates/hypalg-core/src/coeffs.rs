//! Coefficient families that generate hypergroup structures.
//!
//! A polynomial family is described by recurrence coefficients
//! `(a_n, b_n, c_n)` for
//!
//! ```text
//! p_1 p_n = a_n p_{n+1} + b_n p_n + c_n p_{n-1}      (n ≥ 1)
//! p_0 = 1,   p_1(x) = (x - b_0) / a_0
//! ```
//!
//! normalized so that `a_0 + b_0 = 1` and `a_n + b_n + c_n = 1`, which pins
//! `p_n(1) = 1`. A symmetric family is described by a sequence
//! `b_n ∈ (0, 1]` from which level weights `c_n` are derived.
//!
//! Coefficients are available for every index: presets use closed forms, and
//! explicitly listed coefficients carry a mandatory tail rule (constant or
//! geometric) describing their continuation. The tail rule is what makes the
//! asymptotic classifiers well defined for explicit input.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;

use crate::scalar::{pow_usize, Scalar};
use crate::{Error, Result};

/// Normalization slack accepted for inexact scalars. Exact scalars are
/// validated with zero tolerance.
const NORMALIZATION_TOL: f64 = 1e-12;

/// Continuation rule for explicitly listed coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum TailRule<S> {
    /// Repeat the final listed `(a, b, c)` forever.
    Constant,
    /// `a_n` and `c_n` decay geometrically from their final listed values;
    /// `b_n = 1 - a_n - c_n` keeps the normalization.
    Geometric { factor: S },
}

#[derive(Debug, Clone, PartialEq)]
enum CoeffKind<S> {
    ChebyshevT,
    ChebyshevU,
    GeometricCompact { q: S },
    Explicit {
        a: Vec<S>,
        b: Vec<S>,
        c: Vec<S>, // c[i] is the coefficient c_{i+1}
        tail: TailRule<S>,
    },
}

/// Recurrence coefficients of a polynomial family, with total coverage of
/// `n ∈ ℕ₀` (closed form or list + tail rule).
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceCoefficients<S> {
    kind: CoeffKind<S>,
}

/// Materialized window of coefficients, `a[n]`, `b[n]`, `c[n]` directly
/// indexable for `n < len`. `c[0]` is a zero placeholder (unused).
#[derive(Debug, Clone)]
pub struct CoeffWindow<S> {
    pub a: Vec<S>,
    pub b: Vec<S>,
    pub c: Vec<S>,
}

impl<S: Scalar> RecurrenceCoefficients<S> {
    /// Chebyshev family of the first kind: `a_0 = 1`, `b ≡ 0`,
    /// `a_n = c_n = 1/2`.
    pub fn chebyshev_t() -> Self {
        Self { kind: CoeffKind::ChebyshevT }
    }

    /// Chebyshev family of the second kind: `a_n = (n+2)/(2n+2)`,
    /// `c_n = n/(2n+2)`, `b ≡ 0`.
    pub fn chebyshev_u() -> Self {
        Self { kind: CoeffKind::ChebyshevU }
    }

    /// Compact-type family with geometric coefficient decay:
    /// `a_n = c_n = q^n`, `b_n = 1 - 2 q^n` for `n ≥ 1`, `a_0 = 1`, `b_0 = 0`.
    ///
    /// Requires `q ∈ (0, 1)`. Note that nonnegativity of the derived
    /// linearization coefficients is *not* guaranteed; run
    /// [`crate::verify_axioms`] to find out.
    pub fn geometric_compact(q: S) -> Result<Self> {
        if !(q > S::zero() && q < S::one()) {
            return Err(Error::InvalidParameter {
                what: "geometric-compact requires q in (0, 1)".to_owned(),
            });
        }
        Ok(Self { kind: CoeffKind::GeometricCompact { q } })
    }

    /// Explicitly listed coefficients with a mandatory tail rule.
    ///
    /// Shapes: `a` and `b` both cover `n = 0..=N`, `c` covers `n = 1..=N`
    /// (so `a.len() == b.len() == c.len() + 1`), with `N ≥ 1`. Validates
    /// `a_n > 0`, `c_n > 0`, the normalization rows, and the tail factor.
    /// `b_n` may be negative: such families fail the hypergroup axioms but
    /// remain meaningful for signed exploration.
    pub fn explicit(a: Vec<S>, b: Vec<S>, c: Vec<S>, tail: TailRule<S>) -> Result<Self> {
        let invalid = |what: &str| Error::InvalidParameter { what: what.to_owned() };
        if a.len() < 2 || a.len() != b.len() || a.len() != c.len() + 1 {
            return Err(invalid(
                "explicit lists must satisfy a.len() == b.len() == c.len() + 1 >= 2",
            ));
        }
        let tol = normalization_tol::<S>();
        let row_ok = |sum: S| -> bool { (sum - S::one()).abs() <= tol };
        if !row_ok(a[0].clone() + &b[0]) {
            return Err(invalid("a_0 + b_0 must equal 1"));
        }
        for n in 1..a.len() {
            if a[n] <= S::zero() {
                return Err(invalid("a_n must be positive for n >= 1"));
            }
            if c[n - 1] <= S::zero() {
                return Err(invalid("c_n must be positive for n >= 1"));
            }
            if !row_ok(a[n].clone() + &b[n] + &c[n - 1]) {
                return Err(invalid("a_n + b_n + c_n must equal 1 for n >= 1"));
            }
        }
        if a[0] <= S::zero() {
            return Err(invalid("a_0 must be positive"));
        }
        if let TailRule::Geometric { factor } = &tail {
            if !(*factor > S::zero() && *factor <= S::one()) {
                return Err(invalid("geometric tail factor must lie in (0, 1]"));
            }
        }
        Ok(Self { kind: CoeffKind::Explicit { a, b, c, tail } })
    }

    /// Explicit lists without the normalization check. Used for structure
    /// relations of orthonormal systems (`q_1 q_n = A_n q_{n+1} + B_n q_n +
    /// C_n q_{n-1}`), whose rows do not sum to 1 because `q_n(1) ≠ 1`.
    /// Shape and positivity of `a`, `c` are still enforced.
    pub(crate) fn explicit_unchecked(
        a: Vec<S>,
        b: Vec<S>,
        c: Vec<S>,
        tail: TailRule<S>,
    ) -> Result<Self> {
        let invalid = |what: &str| Error::InvalidParameter { what: what.to_owned() };
        if a.len() < 2 || a.len() != b.len() || a.len() != c.len() + 1 {
            return Err(invalid(
                "explicit lists must satisfy a.len() == b.len() == c.len() + 1 >= 2",
            ));
        }
        if a.iter().any(|v| *v <= S::zero()) || c.iter().any(|v| *v <= S::zero()) {
            return Err(invalid("a_n and c_n must be positive"));
        }
        if let TailRule::Geometric { factor } = &tail {
            if !(*factor > S::zero() && *factor <= S::one()) {
                return Err(invalid("geometric tail factor must lie in (0, 1]"));
            }
        }
        Ok(Self { kind: CoeffKind::Explicit { a, b, c, tail } })
    }

    /// `a_n`.
    pub fn a(&self, n: usize) -> S {
        match &self.kind {
            CoeffKind::ChebyshevT => {
                if n == 0 {
                    S::one()
                } else {
                    S::ratio(1, 2)
                }
            }
            CoeffKind::ChebyshevU => S::ratio(n as i64 + 2, 2 * n as i64 + 2),
            CoeffKind::GeometricCompact { q } => {
                if n == 0 {
                    S::one()
                } else {
                    pow_usize(q, n)
                }
            }
            CoeffKind::Explicit { a, tail, .. } => {
                let last = a.len() - 1;
                if n <= last {
                    a[n].clone()
                } else {
                    match tail {
                        TailRule::Constant => a[last].clone(),
                        TailRule::Geometric { factor } => {
                            a[last].clone() * pow_usize(factor, n - last)
                        }
                    }
                }
            }
        }
    }

    /// `b_n`.
    pub fn b(&self, n: usize) -> S {
        match &self.kind {
            CoeffKind::ChebyshevT | CoeffKind::ChebyshevU => S::zero(),
            CoeffKind::GeometricCompact { q } => {
                if n == 0 {
                    S::zero()
                } else {
                    S::one() - S::ratio(2, 1) * pow_usize(q, n)
                }
            }
            CoeffKind::Explicit { b, tail, .. } => {
                let last = b.len() - 1;
                if n <= last {
                    b[n].clone()
                } else {
                    match tail {
                        TailRule::Constant => b[last].clone(),
                        TailRule::Geometric { .. } => S::one() - self.a(n) - self.c(n),
                    }
                }
            }
        }
    }

    /// `c_n` for `n ≥ 1`; returns `0` at `n = 0` (unused slot).
    pub fn c(&self, n: usize) -> S {
        if n == 0 {
            return S::zero();
        }
        match &self.kind {
            CoeffKind::ChebyshevT => S::ratio(1, 2),
            CoeffKind::ChebyshevU => S::ratio(n as i64, 2 * n as i64 + 2),
            CoeffKind::GeometricCompact { q } => pow_usize(q, n),
            CoeffKind::Explicit { c, tail, .. } => {
                let last = c.len(); // index of the final listed c_n
                if n <= last {
                    c[n - 1].clone()
                } else {
                    match tail {
                        TailRule::Constant => c[last - 1].clone(),
                        TailRule::Geometric { factor } => {
                            c[last - 1].clone() * pow_usize(factor, n - last)
                        }
                    }
                }
            }
        }
    }

    pub fn abc(&self, n: usize) -> (S, S, S) {
        (self.a(n), self.b(n), self.c(n))
    }

    /// Materialize `a_n, b_n, c_n` for `n < len` (geometric powers computed
    /// incrementally).
    pub fn window(&self, len: usize) -> CoeffWindow<S> {
        let mut w = CoeffWindow {
            a: Vec::with_capacity(len),
            b: Vec::with_capacity(len),
            c: Vec::with_capacity(len),
        };
        match &self.kind {
            CoeffKind::GeometricCompact { q } => {
                let mut p = S::one(); // q^n
                for n in 0..len {
                    if n == 0 {
                        w.a.push(S::one());
                        w.b.push(S::zero());
                        w.c.push(S::zero());
                    } else {
                        p = p * q;
                        w.a.push(p.clone());
                        w.b.push(S::one() - S::ratio(2, 1) * &p);
                        w.c.push(p.clone());
                    }
                }
            }
            _ => {
                for n in 0..len {
                    w.a.push(self.a(n));
                    w.b.push(self.b(n));
                    w.c.push(self.c(n));
                }
            }
        }
        w
    }

    /// Limits of `(a_n, b_n, c_n)` when the family's definition implies them.
    pub fn known_limits(&self) -> Option<(S, S, S)> {
        match &self.kind {
            CoeffKind::ChebyshevT | CoeffKind::ChebyshevU => {
                Some((S::ratio(1, 2), S::zero(), S::ratio(1, 2)))
            }
            CoeffKind::GeometricCompact { .. } => Some((S::zero(), S::one(), S::zero())),
            CoeffKind::Explicit { a, b, c, tail } => match tail {
                TailRule::Constant => Some((
                    a.last().unwrap().clone(),
                    b.last().unwrap().clone(),
                    c.last().unwrap().clone(),
                )),
                TailRule::Geometric { factor } => {
                    if *factor == S::one() {
                        Some((
                            a.last().unwrap().clone(),
                            b.last().unwrap().clone(),
                            c.last().unwrap().clone(),
                        ))
                    } else {
                        Some((S::zero(), S::one(), S::zero()))
                    }
                }
            },
        }
    }

    /// Same family with every coefficient converted to `f64`.
    pub fn to_f64(&self) -> RecurrenceCoefficients<f64> {
        let kind = match &self.kind {
            CoeffKind::ChebyshevT => CoeffKind::ChebyshevT,
            CoeffKind::ChebyshevU => CoeffKind::ChebyshevU,
            CoeffKind::GeometricCompact { q } => {
                CoeffKind::GeometricCompact { q: q.to_f64() }
            }
            CoeffKind::Explicit { a, b, c, tail } => CoeffKind::Explicit {
                a: a.iter().map(Scalar::to_f64).collect(),
                b: b.iter().map(Scalar::to_f64).collect(),
                c: c.iter().map(Scalar::to_f64).collect(),
                tail: match tail {
                    TailRule::Constant => TailRule::Constant,
                    TailRule::Geometric { factor } => {
                        TailRule::Geometric { factor: factor.to_f64() }
                    }
                },
            },
        };
        RecurrenceCoefficients { kind }
    }

    /// Short descriptor used in reports.
    pub fn describe(&self) -> &'static str {
        match &self.kind {
            CoeffKind::ChebyshevT => "chebyshev-t",
            CoeffKind::ChebyshevU => "chebyshev-u",
            CoeffKind::GeometricCompact { .. } => "geometric-compact",
            CoeffKind::Explicit { .. } => "explicit",
        }
    }
}

fn normalization_tol<S: Scalar>() -> S {
    if S::EXACT {
        S::zero()
    } else {
        S::from_f64(NORMALIZATION_TOL).unwrap()
    }
}

/// Parameters of a symmetric (totally ordered) family: `b_n ∈ (0, 1]` for
/// `n ≥ 1`, continued by repeating the final entry.
///
/// Level weights follow as `c_0 = 1`, `c_n = (c_0 + … + c_{n-1}) / b_n`, and
/// the Haar weight is `h(n) = c_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricParams<S> {
    b: Vec<S>,
}

impl<S: Scalar> SymmetricParams<S> {
    pub fn new(b: Vec<S>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::InvalidParameter {
                what: "symmetric family needs at least one b value".to_owned(),
            });
        }
        if !b.iter().all(|v| *v > S::zero() && *v <= S::one()) {
            return Err(Error::InvalidParameter {
                what: "symmetric family requires b_n in (0, 1]".to_owned(),
            });
        }
        Ok(Self { b })
    }

    /// `b_n` for `n ≥ 1`.
    pub fn b(&self, n: usize) -> S {
        assert!(n >= 1, "b is indexed from 1");
        self.b[(n - 1).min(self.b.len() - 1)].clone()
    }

    /// Level weights `c_0 .. c_{len-1}` (exact in `S`).
    pub fn weights(&self, len: usize) -> Vec<S> {
        let mut c = Vec::with_capacity(len);
        if len == 0 {
            return c;
        }
        c.push(S::one());
        let mut partial = S::one(); // c_0 + ... + c_{n-1}
        for n in 1..len {
            let cn = partial.clone() / self.b(n);
            partial = partial + &cn;
            c.push(cn);
        }
        c
    }

    pub fn to_f64(&self) -> SymmetricParams<f64> {
        SymmetricParams { b: self.b.iter().map(Scalar::to_f64).collect() }
    }
}

/// A coefficient family of either construction kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Family<S> {
    Polynomial(RecurrenceCoefficients<S>),
    Symmetric(SymmetricParams<S>),
}

/// Optional arguments for [`preset`].
#[derive(Debug, Clone)]
pub struct PresetParams<S> {
    /// Decay base for `geometric-compact`.
    pub q: Option<S>,
    /// `b`-sequence for `symmetric`.
    pub b: Option<Vec<S>>,
}

impl<S> Default for PresetParams<S> {
    fn default() -> Self {
        Self { q: None, b: None }
    }
}

/// Look up a named preset family.
///
/// Known names: `chebyshev-t`, `chebyshev-u`, `geometric-compact` (needs
/// `q`), `symmetric` (needs `b`).
pub fn preset<S: Scalar>(name: &str, params: PresetParams<S>) -> Result<Family<S>> {
    match name {
        "chebyshev-t" => Ok(Family::Polynomial(RecurrenceCoefficients::chebyshev_t())),
        "chebyshev-u" => Ok(Family::Polynomial(RecurrenceCoefficients::chebyshev_u())),
        "geometric-compact" => {
            let q = params.q.ok_or_else(|| Error::InvalidParameter {
                what: "geometric-compact needs parameter q".to_owned(),
            })?;
            Ok(Family::Polynomial(RecurrenceCoefficients::geometric_compact(q)?))
        }
        "symmetric" => {
            let b = params.b.ok_or_else(|| Error::InvalidParameter {
                what: "symmetric needs parameter b (sequence)".to_owned(),
            })?;
            Ok(Family::Symmetric(SymmetricParams::new(b)?))
        }
        other => Err(Error::UnknownPreset { name: String::from(other) }),
    }
}
