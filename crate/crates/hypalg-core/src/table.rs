//! Linearization tables, Haar weights, and axiom verification.
//!
//! For a polynomial family the products expand as
//! `p_j p_k = Σ_n g(j,k,n) p_n` with support contained in
//! `[|j-k|, j+k]`. The table stores these linearization coefficients
//! row by row; they are computed by ascending in `j` with the structure
//! relation, so each row follows from the two rows below it.
//!
//! For a symmetric family the structure is given in closed form:
//! `ε_j * ε_k = ε_max(j,k)` for `j ≠ k` and
//! `ε_n * ε_n = Σ_{i<n} (c_i/c_n) ε_i + (1 - b_n) ε_n`.
//!
//! Symmetry `g(j,k,·) = g(k,j,·)` and finite support hold by
//! construction, and associativity is inherited from the generating
//! algebra, so [`verify_axioms`] checks the remaining content of the
//! hypergroup axioms: finiteness, nonnegativity, row mass `1`, and the
//! identity row `g(0,k,·) = δ_k`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::coeffs::{CoeffWindow, Family, RecurrenceCoefficients, SymmetricParams};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// One linearization row: the coefficients of `p_j p_k` (or `ε_j * ε_k`)
/// over the window `[start, start + len - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row<S> {
    start: usize,
    g: Vec<S>,
}

impl<S: Scalar> Row<S> {
    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.start + self.g.len() - 1
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    /// Coefficient at absolute index `n` (zero outside the window).
    pub fn get(&self, n: usize) -> S {
        if n < self.start || n - self.start >= self.g.len() {
            S::zero()
        } else {
            self.g[n - self.start].clone()
        }
    }

    /// Iterate `(n, coefficient)` over the stored window.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &S)> {
        self.g.iter().enumerate().map(move |(i, v)| (self.start + i, v))
    }

    pub fn as_slice(&self) -> &[S] {
        &self.g
    }
}

/// Which construction produced a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Polynomial,
    Symmetric,
}

/// Eagerly materialized linearization table for indices `j, k < levels`.
#[derive(Debug, Clone)]
pub struct ConvolutionTable<S> {
    kind: TableKind,
    levels: usize,
    rows: Vec<Row<S>>, // triangular: row (j, k) with j <= k at k(k+1)/2 + j
}

impl<S: Scalar> ConvolutionTable<S> {
    /// Build the polynomial table up to (but excluding) `levels`.
    pub fn polynomial(coeffs: &RecurrenceCoefficients<S>, levels: usize) -> Result<Self> {
        Self::check_levels(levels)?;
        let mut rows = Vec::with_capacity(levels * (levels + 1) / 2);
        polynomial_rows(coeffs, levels, |_, _, row| {
            rows.push(row.clone());
            true
        });
        Ok(Self { kind: TableKind::Polynomial, levels, rows })
    }

    /// Build the symmetric table up to (but excluding) `levels`.
    pub fn symmetric(params: &SymmetricParams<S>, levels: usize) -> Result<Self> {
        Self::check_levels(levels)?;
        let mut rows = Vec::with_capacity(levels * (levels + 1) / 2);
        symmetric_rows(params, levels, |_, _, row| {
            rows.push(row.clone());
            true
        });
        Ok(Self { kind: TableKind::Symmetric, levels, rows })
    }

    /// Build for either family kind.
    pub fn from_family(family: &Family<S>, levels: usize) -> Result<Self> {
        match family {
            Family::Polynomial(coeffs) => Self::polynomial(coeffs, levels),
            Family::Symmetric(params) => Self::symmetric(params, levels),
        }
    }

    fn check_levels(levels: usize) -> Result<()> {
        if levels == 0 {
            return Err(Error::InvalidParameter {
                what: "table needs at least one level".into(),
            });
        }
        Ok(())
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    /// The row of `p_j p_k`. Panics if `max(j, k) >= levels`.
    pub fn row(&self, j: usize, k: usize) -> &Row<S> {
        let (j, k) = if j <= k { (j, k) } else { (k, j) };
        assert!(
            k < self.levels,
            "table holds levels < {}, asked for ({}, {})",
            self.levels,
            j,
            k
        );
        &self.rows[k * (k + 1) / 2 + j]
    }

    /// `g(j, k, n)`, zero outside the support window.
    pub fn g(&self, j: usize, k: usize, n: usize) -> S {
        self.row(j, k).get(n)
    }
}

/// Generate polynomial rows `(j, k)` for `k < levels`, `j <= k`, in order of
/// ascending `k` then ascending `j`. Memory stays `O(row)`: only the two
/// previous rows of the current column are retained. The visitor returns
/// `false` to stop early; the function reports whether it ran to completion.
pub(crate) fn polynomial_rows<S: Scalar, F>(
    coeffs: &RecurrenceCoefficients<S>,
    levels: usize,
    mut visit: F,
) -> bool
where
    F: FnMut(usize, usize, &Row<S>) -> bool,
{
    // Coefficient indices reach m + 1 <= j + k + 2 <= 2 * levels.
    let win: CoeffWindow<S> = coeffs.window(2 * levels + 1);
    for k in 0..levels {
        let row0 = Row { start: k, g: vec![S::one()] };
        if !visit(0, k, &row0) {
            return false;
        }
        if k == 0 {
            continue;
        }
        let row1 = Row {
            start: k - 1,
            g: vec![win.c[k].clone(), win.b[k].clone(), win.a[k].clone()],
        };
        if !visit(1, k, &row1) {
            return false;
        }
        let mut prev = row0;
        let mut curr = row1;
        for j in 1..k {
            // p_{j+1} p_k = (p_1 (p_j p_k) - b_j p_j p_k - c_j p_{j-1} p_k) / a_j.
            let start = k - j - 1;
            let end = k + j + 1;
            let mut g = Vec::with_capacity(end - start + 1);
            for m in start..=end {
                // Coefficient of p_m in p_1 * (p_j p_k).
                let mut coef = win.c[m + 1].clone() * curr.get(m + 1);
                if m >= 1 {
                    coef = coef + win.b[m].clone() * curr.get(m);
                }
                if m >= 2 {
                    coef = coef + win.a[m - 1].clone() * curr.get(m - 1);
                }
                if m == 1 {
                    coef = coef + curr.get(0); // p_1 p_0 = p_1
                }
                let val = (coef - win.b[j].clone() * curr.get(m) - win.c[j].clone() * prev.get(m))
                    / &win.a[j];
                g.push(val);
            }
            let next = Row { start, g };
            if !visit(j + 1, k, &next) {
                return false;
            }
            prev = curr;
            curr = next;
        }
    }
    true
}

/// Generate symmetric rows in the same order as [`polynomial_rows`].
pub(crate) fn symmetric_rows<S: Scalar, F>(
    params: &SymmetricParams<S>,
    levels: usize,
    mut visit: F,
) -> bool
where
    F: FnMut(usize, usize, &Row<S>) -> bool,
{
    let c = params.weights(levels);
    for k in 0..levels {
        for j in 0..k {
            let row = Row { start: k, g: vec![S::one()] };
            if !visit(j, k, &row) {
                return false;
            }
        }
        let diag = if k == 0 {
            Row { start: 0, g: vec![S::one()] }
        } else {
            let mut g: Vec<S> = (0..k).map(|i| c[i].clone() / &c[k]).collect();
            g.push(S::one() - params.b(k));
            Row { start: 0, g }
        };
        if !visit(k, k, &diag) {
            return false;
        }
    }
    true
}

/// Haar weights `h(n)`, normalized with `h(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarWeights<S> {
    h: Vec<S>,
}

impl<S: Scalar> HaarWeights<S> {
    /// From recurrence coefficients: `h(0) = 1`, `h(1) = 1/c_1`,
    /// `h(n+1) = h(n) a_n / c_{n+1}`.
    pub fn from_recurrence(coeffs: &RecurrenceCoefficients<S>, len: usize) -> Self {
        let mut h = Vec::with_capacity(len);
        if len == 0 {
            return Self { h };
        }
        h.push(S::one());
        if len > 1 {
            h.push(S::one() / coeffs.c(1));
        }
        for n in 1..len.saturating_sub(1) {
            let next = h[n].clone() * coeffs.a(n) / coeffs.c(n + 1);
            h.push(next);
        }
        Self { h }
    }

    /// For symmetric families the Haar weight is the level weight itself.
    pub fn from_symmetric(params: &SymmetricParams<S>, len: usize) -> Self {
        Self { h: params.weights(len) }
    }

    pub fn from_family(family: &Family<S>, len: usize) -> Self {
        match family {
            Family::Polynomial(coeffs) => Self::from_recurrence(coeffs, len),
            Family::Symmetric(params) => Self::from_symmetric(params, len),
        }
    }

    /// From a table via `h(n) = 1 / g(n,n,0)`. Fails with
    /// [`Error::DegenerateTable`] if some `g(n,n,0)` is not positive.
    pub fn from_table(table: &ConvolutionTable<S>) -> Result<Self> {
        let mut h = Vec::with_capacity(table.levels());
        for n in 0..table.levels() {
            let g0 = table.g(n, n, 0);
            if g0 <= S::zero() {
                return Err(Error::DegenerateTable { index: n });
            }
            h.push(S::one() / g0);
        }
        Ok(Self { h })
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// `h(n)`. Panics if `n` is beyond the materialized range.
    pub fn get(&self, n: usize) -> &S {
        &self.h[n]
    }

    pub fn as_slice(&self) -> &[S] {
        &self.h
    }

    pub fn to_f64(&self) -> HaarWeights<f64> {
        HaarWeights { h: self.h.iter().map(Scalar::to_f64).collect() }
    }
}

/// Tolerances for axiom verification. `tol` is ignored for exact scalars.
#[derive(Debug, Clone)]
pub struct AxiomParams {
    pub tol: f64,
    /// Stop after recording this many violations.
    pub max_violations: usize,
}

impl Default for AxiomParams {
    fn default() -> Self {
        Self { tol: 1e-12, max_violations: 16 }
    }
}

/// What went wrong, and where in the row.
#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    NonFinite { n: usize },
    Negative { n: usize },
    Mass,
    Identity,
}

/// A single recorded axiom violation in row `(j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomViolation {
    pub j: usize,
    pub k: usize,
    pub kind: ViolationKind,
    /// Offending value (the entry, or the mass deviation) as `f64`.
    pub value: f64,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::NonFinite { n } => {
                write!(f, "g({},{},{}) = {} is not finite", self.j, self.k, n, self.value)
            }
            ViolationKind::Negative { n } => {
                write!(f, "g({},{},{}) = {} is negative", self.j, self.k, n, self.value)
            }
            ViolationKind::Mass => write!(
                f,
                "row ({},{}) total mass deviates from 1 by {}",
                self.j, self.k, self.value
            ),
            ViolationKind::Identity => write!(
                f,
                "identity row ({},{}) is not the point mass at {}",
                self.j, self.k, self.k
            ),
        }
    }
}

/// Outcome of axiom verification over all rows with `j <= k < levels`.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub levels: usize,
    pub rows_checked: usize,
    pub violations: Vec<AxiomViolation>,
    /// True when verification stopped early at `max_violations`.
    pub truncated: bool,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&AxiomViolation> {
        self.violations.first()
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pass() {
            write!(
                f,
                "pass: {} rows verified up to level {}",
                self.rows_checked, self.levels
            )
        } else {
            write!(
                f,
                "fail: {} violation(s) in {} rows up to level {}{}",
                self.violations.len(),
                self.rows_checked,
                self.levels,
                if self.truncated { " (stopped early)" } else { "" }
            )
        }
    }
}

struct RowChecker {
    tol: f64,
    max_violations: usize,
    report: AxiomReport,
}

impl RowChecker {
    fn new(levels: usize, params: &AxiomParams) -> Self {
        Self {
            tol: params.tol,
            max_violations: params.max_violations.max(1),
            report: AxiomReport {
                levels,
                rows_checked: 0,
                violations: Vec::new(),
                truncated: false,
            },
        }
    }

    /// Returns false once the violation budget is exhausted.
    fn check<S: Scalar>(&mut self, j: usize, k: usize, row: &Row<S>) -> bool {
        self.report.rows_checked += 1;
        let neg_tol = if S::EXACT { S::zero() } else { S::from_f64(-self.tol).unwrap() };
        let mut sum = S::zero();
        for (n, v) in row.iter() {
            if !v.is_finite() {
                self.push(j, k, ViolationKind::NonFinite { n }, v.to_f64());
            } else if *v < neg_tol {
                self.push(j, k, ViolationKind::Negative { n }, v.to_f64());
            }
            sum = sum + v;
        }
        let dev = sum - S::one();
        let mass_bad = if S::EXACT {
            dev != S::zero()
        } else {
            !dev.is_finite() || dev.abs().to_f64() > self.tol
        };
        if mass_bad {
            self.push(j, k, ViolationKind::Mass, dev.to_f64());
        }
        if j == 0 && (row.start() != k || row.len() != 1 || row.get(k) != S::one()) {
            self.push(j, k, ViolationKind::Identity, row.get(k).to_f64());
        }
        self.report.violations.len() < self.max_violations
    }

    fn push(&mut self, j: usize, k: usize, kind: ViolationKind, value: f64) {
        if self.report.violations.len() < self.max_violations {
            self.report.violations.push(AxiomViolation { j, k, kind, value });
        }
    }

    fn finish(mut self, completed: bool) -> AxiomReport {
        self.report.truncated = !completed;
        self.report
    }
}

/// Verify the hypergroup axioms on a materialized table.
pub fn verify_axioms<S: Scalar>(table: &ConvolutionTable<S>, params: &AxiomParams) -> AxiomReport {
    let mut checker = RowChecker::new(table.levels(), params);
    let mut completed = true;
    'outer: for k in 0..table.levels() {
        for j in 0..=k {
            if !checker.check(j, k, table.row(j, k)) {
                completed = false;
                break 'outer;
            }
        }
    }
    checker.finish(completed)
}

/// Verify the hypergroup axioms for a family up to `levels` without
/// materializing the table (memory stays `O(row)`). Stops early once
/// `max_violations` are recorded, which keeps exact-arithmetic runs on
/// failing families cheap: coefficients past the first witness can grow
/// without bound.
pub fn verify_family<S: Scalar>(
    family: &Family<S>,
    levels: usize,
    params: &AxiomParams,
) -> AxiomReport {
    let mut checker = RowChecker::new(levels, params);
    let completed = match family {
        Family::Polynomial(coeffs) => {
            polynomial_rows(coeffs, levels, |j, k, row| checker.check(j, k, row))
        }
        Family::Symmetric(sym) => {
            symmetric_rows(sym, levels, |j, k, row| checker.check(j, k, row))
        }
    };
    checker.finish(completed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::TailRule;
    use crate::scalar::Rational;
    use num_traits::{One, Zero};

    fn rat(p: i64, q: i64) -> Rational {
        Rational::ratio(p, q)
    }

    #[test]
    fn chebyshev_t_matches_product_formula() {
        // p_j p_k = 1/2 p_{k-j} + 1/2 p_{k+j} for 1 <= j <= k.
        let coeffs = RecurrenceCoefficients::<Rational>::chebyshev_t();
        let table = ConvolutionTable::polynomial(&coeffs, 12).unwrap();
        for k in 0..12usize {
            for j in 0..=k {
                let row = table.row(j, k);
                if j == 0 {
                    assert_eq!(row.get(k), Rational::one());
                    assert_eq!(row.len(), 1);
                } else {
                    for (n, v) in row.iter() {
                        let expect = if n == k - j || n == k + j {
                            rat(1, 2)
                        } else {
                            Rational::zero()
                        };
                        assert_eq!(*v, expect, "g({j},{k},{n})");
                    }
                }
            }
        }
    }

    #[test]
    fn chebyshev_u_matches_closed_form() {
        // g(j,k,n) = (n+1) / ((j+1)(k+1)) for n = k-j, k-j+2, ..., k+j.
        let coeffs = RecurrenceCoefficients::<Rational>::chebyshev_u();
        let table = ConvolutionTable::polynomial(&coeffs, 9).unwrap();
        for k in 0..9usize {
            for j in 0..=k {
                let row = table.row(j, k);
                for (n, v) in row.iter() {
                    let expect = if n >= k - j && n <= k + j && (n + j + k) % 2 == 0 {
                        rat(n as i64 + 1, ((j + 1) * (k + 1)) as i64)
                    } else {
                        Rational::zero()
                    };
                    assert_eq!(*v, expect, "g({j},{k},{n})");
                }
            }
        }
    }

    #[test]
    fn symmetric_rows_have_unit_mass_and_level_haar() {
        let params = SymmetricParams::new(vec![rat(1, 2)]).unwrap();
        let table = ConvolutionTable::symmetric(&params, 10).unwrap();
        let report = verify_axioms(&table, &AxiomParams::default());
        assert!(report.pass(), "{report}");
        let h = HaarWeights::from_table(&table).unwrap();
        let c = params.weights(10);
        assert_eq!(h.as_slice(), &c[..]);
    }

    #[test]
    fn haar_from_table_matches_recurrence() {
        let coeffs = RecurrenceCoefficients::<Rational>::chebyshev_u();
        let table = ConvolutionTable::polynomial(&coeffs, 12).unwrap();
        let from_table = HaarWeights::from_table(&table).unwrap();
        let from_rec = HaarWeights::from_recurrence(&coeffs, 12);
        assert_eq!(from_table, from_rec);
        // Closed form h(n) = (n+1)^2.
        for n in 0..12usize {
            let sq = ((n + 1) * (n + 1)) as i64;
            assert_eq!(*from_rec.get(n), Rational::from_int(sq));
        }
        // Chebyshev-T: h = (1, 2, 2, ...).
        let t = RecurrenceCoefficients::<Rational>::chebyshev_t();
        let h = HaarWeights::from_recurrence(&t, 8);
        assert_eq!(*h.get(0), Rational::one());
        for n in 1..8usize {
            assert_eq!(*h.get(n), Rational::from_int(2));
        }
    }

    #[test]
    fn chebyshev_axioms_pass_exactly() {
        for family in [
            Family::Polynomial(RecurrenceCoefficients::<Rational>::chebyshev_t()),
            Family::Polynomial(RecurrenceCoefficients::<Rational>::chebyshev_u()),
        ] {
            let report = verify_family(&family, 40, &AxiomParams::default());
            assert!(report.pass(), "{report}");
            assert_eq!(report.rows_checked, 40 * 41 / 2);
        }
    }

    #[test]
    fn geometric_compact_half_fails_with_exact_witness() {
        let coeffs = RecurrenceCoefficients::geometric_compact(rat(1, 2)).unwrap();
        let table = ConvolutionTable::polynomial(&coeffs, 6).unwrap();
        // Independent hand computation: g(2,2,2) = -3/16.
        assert_eq!(table.g(2, 2, 2), rat(-3, 16));
        let report = verify_family(
            &Family::Polynomial(coeffs),
            6,
            &AxiomParams { tol: 0.0, max_violations: 1 },
        );
        let first = report.first().expect("must find a violation");
        assert_eq!((first.j, first.k), (2, 2));
        assert_eq!(first.kind, ViolationKind::Negative { n: 2 });
        assert_eq!(first.value, -0.1875);
    }

    #[test]
    fn signed_family_fails_at_2_2_2() {
        // a_0 = 2, b_0 = -1, then a_n = c_n = 1/4, b_n = 1/2: the signed
        // family whose spectral measure carries an atom outside [-1, 1].
        // Hand expansion of p_2^2 gives g(2,2,2) = -1/2.
        let coeffs = RecurrenceCoefficients::explicit(
            vec![Rational::from_int(2), rat(1, 4)],
            vec![Rational::from_int(-1), rat(1, 2)],
            vec![rat(1, 4)],
            TailRule::Constant,
        )
        .unwrap();
        let table = ConvolutionTable::polynomial(&coeffs, 5).unwrap();
        assert_eq!(table.g(2, 2, 2), rat(-1, 2));
        assert_eq!(table.g(2, 2, 0), rat(1, 4));
        assert_eq!(table.g(2, 2, 4), rat(1, 4));
        let h = HaarWeights::from_recurrence(&coeffs, 5);
        assert_eq!(*h.get(1), Rational::from_int(4));
        assert_eq!(*h.get(4), Rational::from_int(4));
        let report = verify_family(
            &Family::Polynomial(coeffs),
            5,
            &AxiomParams::default(),
        );
        assert!(!report.pass());
    }

    #[test]
    fn float_and_exact_tables_agree() {
        let q = rat(2, 5);
        let exact = RecurrenceCoefficients::geometric_compact(q).unwrap();
        let approx = exact.to_f64();
        let te = ConvolutionTable::polynomial(&exact, 8).unwrap();
        let tf = ConvolutionTable::polynomial(&approx, 8).unwrap();
        for k in 0..8usize {
            for j in 0..=k {
                for (n, v) in te.row(j, k).iter() {
                    let diff = (v.to_f64() - tf.g(j, k, n)).abs();
                    assert!(diff < 1e-13, "g({j},{k},{n}) diff {diff}");
                }
            }
        }
    }

    #[test]
    fn early_stop_truncates_report() {
        let coeffs = RecurrenceCoefficients::geometric_compact(rat(1, 2)).unwrap();
        let report = verify_family(
            &Family::Polynomial(coeffs),
            40,
            &AxiomParams { tol: 0.0, max_violations: 3 },
        );
        assert!(!report.pass());
        assert!(report.truncated);
        assert_eq!(report.violations.len(), 3);
        assert!(report.rows_checked < 40 * 41 / 2);
    }
}
