//! Finitely supported densities and the measure-algebra operations.
//!
//! A [`SequenceMeasure`] stores values `f(n)` interpreted as a density
//! against the Haar weights, so the measure of `{n}` is `f(n) h(n)`.
//! Convolution, translation, and the Fourier pairing all follow from the
//! linearization table:
//!
//! ```text
//! (f * g)(n) = Σ_{j,k} f(j) g(k) h(j) h(k) g(j,k,n) / h(n)
//! (T_x f)(n) = Σ_k   f(k) g(x,k,n) h(k) / h(n)
//! f̂(x)      = Σ_n   f(n) p_n(x) h(n)
//! ```
//!
//! The translation formula is the convolution with the normalized point
//! density at `x`; by the adjoint identity `g(x,k,n) h(k) / h(n) = g(x,n,k)`
//! it agrees with the direct definition `Σ_t f(t) g(x,n,t)` while needing
//! table rows only up to `max(x, supp f)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::coeffs::RecurrenceCoefficients;
use crate::scalar::Scalar;
use crate::spectral::evaluate_character;
use crate::table::{ConvolutionTable, HaarWeights};
use crate::{Error, Result};

/// A density with finite support `[0, len)` against the Haar weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceMeasure<S> {
    values: Vec<S>,
}

impl<S: Scalar> SequenceMeasure<S> {
    pub fn new(values: Vec<S>) -> Self {
        let mut m = Self { values };
        m.trim();
        m
    }

    /// The zero density.
    pub fn zero() -> Self {
        Self { values: Vec::new() }
    }

    /// Indicator density of `{n}`: value 1 at `n` (measure mass `h(n)`).
    pub fn indicator(n: usize) -> Self {
        let mut values = vec![S::zero(); n + 1];
        values[n] = S::one();
        Self { values }
    }

    /// Normalized point density at `n`: value `1/h(n)` (measure mass 1,
    /// the image of `ε_n` as a density).
    pub fn point(n: usize, haar: &HaarWeights<S>) -> Self {
        let mut values = vec![S::zero(); n + 1];
        values[n] = S::one() / haar.get(n).clone();
        Self { values }
    }

    fn trim(&mut self) {
        while matches!(self.values.last(), Some(v) if *v == S::zero()) {
            self.values.pop();
        }
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// One past the largest index that may carry mass.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, n: usize) -> S {
        self.values.get(n).cloned().unwrap_or_else(S::zero)
    }

    /// `Σ_n f(n) h(n)` (the total measure).
    pub fn total(&self, haar: &HaarWeights<S>) -> S {
        let mut acc = S::zero();
        for (n, v) in self.values.iter().enumerate() {
            acc = acc + v.clone() * haar.get(n);
        }
        acc
    }

    /// `Σ_n |f(n)| h(n)`.
    pub fn l1_norm(&self, haar: &HaarWeights<S>) -> S {
        let mut acc = S::zero();
        for (n, v) in self.values.iter().enumerate() {
            acc = acc + v.clone().abs() * haar.get(n);
        }
        acc
    }

    /// `Σ_n f(n)² h(n)`.
    pub fn l2_norm_sq(&self, haar: &HaarWeights<S>) -> S {
        let mut acc = S::zero();
        for (n, v) in self.values.iter().enumerate() {
            acc = acc + v.clone() * v * haar.get(n);
        }
        acc
    }

    pub fn scale(&self, factor: &S) -> Self {
        Self {
            values: self.values.iter().map(|v| v.clone() * factor).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.values.len().max(other.values.len());
        let mut values = Vec::with_capacity(len);
        for n in 0..len {
            values.push(self.get(n) - other.get(n));
        }
        Self::new(values)
    }

    pub fn to_f64(&self) -> SequenceMeasure<f64> {
        SequenceMeasure {
            values: self.values.iter().map(Scalar::to_f64).collect(),
        }
    }
}

fn ensure_levels(needed: usize, available: usize) -> Result<()> {
    if needed > available {
        return Err(Error::TableExhausted { needed, max_level: available });
    }
    Ok(())
}

/// Convolution of densities. Requires table levels ≥ `max(len f, len g)`
/// and Haar weights covering the combined support.
pub fn convolve<S: Scalar>(
    f: &SequenceMeasure<S>,
    g: &SequenceMeasure<S>,
    table: &ConvolutionTable<S>,
    haar: &HaarWeights<S>,
) -> Result<SequenceMeasure<S>> {
    if f.is_empty() || g.is_empty() {
        return Ok(SequenceMeasure::zero());
    }
    let out_len = f.len() + g.len() - 1;
    ensure_levels(f.len().max(g.len()), table.levels())?;
    ensure_levels(out_len, haar.len())?;
    let mut out = vec![S::zero(); out_len];
    for (j, fj) in f.values().iter().enumerate() {
        if *fj == S::zero() {
            continue;
        }
        let fj_h = fj.clone() * haar.get(j);
        for (k, gk) in g.values().iter().enumerate() {
            if *gk == S::zero() {
                continue;
            }
            let w = fj_h.clone() * gk.clone() * haar.get(k);
            for (n, gv) in table.row(j, k).iter() {
                out[n] = out[n].clone() + w.clone() * gv;
            }
        }
    }
    for (n, v) in out.iter_mut().enumerate() {
        *v = v.clone() / haar.get(n).clone();
    }
    Ok(SequenceMeasure::new(out))
}

/// Translation `T_x f`. Requires table levels ≥ `max(x + 1, len f)` and
/// Haar weights covering `[0, x + len f)`.
pub fn translate<S: Scalar>(
    x: usize,
    f: &SequenceMeasure<S>,
    table: &ConvolutionTable<S>,
    haar: &HaarWeights<S>,
) -> Result<SequenceMeasure<S>> {
    if f.is_empty() {
        return Ok(SequenceMeasure::zero());
    }
    let out_len = x + f.len();
    ensure_levels((x + 1).max(f.len()), table.levels())?;
    ensure_levels(out_len, haar.len())?;
    let mut out = vec![S::zero(); out_len];
    for (k, fk) in f.values().iter().enumerate() {
        if *fk == S::zero() {
            continue;
        }
        let w = fk.clone() * haar.get(k);
        for (n, gv) in table.row(x, k).iter() {
            out[n] = out[n].clone() + w.clone() * gv;
        }
    }
    for (n, v) in out.iter_mut().enumerate() {
        *v = v.clone() / haar.get(n).clone();
    }
    Ok(SequenceMeasure::new(out))
}

/// Fourier transform of `f` at the character parameter `x`:
/// `f̂(x) = Σ_n f(n) p_n(x) h(n)`.
pub fn fourier<S: Scalar>(
    f: &SequenceMeasure<S>,
    coeffs: &RecurrenceCoefficients<S>,
    haar: &HaarWeights<S>,
    x: &S,
) -> S {
    let chi = evaluate_character(coeffs, x, f.len());
    fourier_with(f, &chi.values, haar)
}

/// Fourier pairing against precomputed character values.
pub fn fourier_with<S: Scalar>(
    f: &SequenceMeasure<S>,
    chi: &[S],
    haar: &HaarWeights<S>,
) -> S {
    let mut acc = S::zero();
    for (n, v) in f.values().iter().enumerate() {
        acc = acc + v.clone() * &chi[n] * haar.get(n);
    }
    acc
}
