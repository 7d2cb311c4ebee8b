//! Symmetric tridiagonal eigensolver.
//!
//! Implicit-shift QL iteration in the classical EISPACK/`tqli` style,
//! with an optional accumulation of the first row of the eigenvector
//! matrix — the only part Golub–Welsch quadrature needs. Rotations
//! right-multiply the accumulated matrix and touch two columns at a
//! time, so the first row can be carried alone.
//!
//! A Sturm-sequence bisection solver is included as an independent
//! cross-check; it shares no code with the QL path.

use alloc::vec;
use alloc::vec::Vec;

// Provides f64 methods (abs, sqrt, …) when building without std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Deflation threshold: an off-diagonal entry `e[m]` is treated as zero
/// when `|e[m]| <= DEFLATION_TOL * (|d[m]| + |d[m+1]|)`. Machine epsilon,
/// as in the EISPACK original: anything looser caps eigenvalue accuracy
/// at the threshold itself.
const DEFLATION_TOL: f64 = f64::EPSILON;

/// Iteration budget per eigenvalue before reporting failure.
const MAX_ITER: usize = 50;

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d`
/// (length `n`) and off-diagonal `e` (length `n - 1`), ascending.
pub fn eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let mut d = d.to_vec();
    let mut e = e.to_vec();
    e.push(0.0); // scratch slot used by the sweep
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Eigenvalues (ascending) paired with the first component of each
/// normalized eigenvector. Squaring the components gives the
/// Golub–Welsch quadrature weights up to normalization.
pub fn eigen_first_row(d: &[f64], e: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = d.len();
    let mut d = d.to_vec();
    let mut e = e.to_vec();
    e.push(0.0); // scratch slot used by the sweep
    let mut z = vec![0.0; n];
    if n > 0 {
        z[0] = 1.0;
    }
    ql_implicit(&mut d, &mut e, Some(&mut z))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let vals = order.iter().map(|&i| d[i]).collect();
    let firsts = order.iter().map(|&i| z[i]).collect();
    Ok((vals, firsts))
}

// `e` holds the n - 1 off-diagonal entries plus one trailing scratch
// slot the sweep writes through (`e[i + 1]` with `i + 1 == m == n - 1`).
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    debug_assert_eq!(e.len(), n);
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            // Find the first negligible off-diagonal at or above l.
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= DEFLATION_TOL * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_ITER {
                return Err(Error::EigensolverFailure { index: l, iterations: iter });
            }
            // Wilkinson-style shift from the leading 2x2 block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Recover from underflow: skip the rest of the sweep.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// All eigenvalues by Sturm-sequence bisection (independent oracle for
/// the QL path). Ascending order.
pub fn sturm_eigenvalues(d: &[f64], e: &[f64]) -> Vec<f64> {
    let n = d.len();
    if n == 0 {
        return Vec::new();
    }
    // Gershgorin bounds.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
        let right = if i < n - 1 { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - left - right);
        hi = hi.max(d[i] + left + right);
    }
    let scale = hi.abs().max(lo.abs()).max(1.0);
    let count_below = |x: f64| -> usize {
        // Number of eigenvalues < x = number of negative pivots in the
        // LDLᵗ factorization of (A - xI).
        let mut count = 0usize;
        let mut q = d[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            if q == 0.0 {
                q = f64::EPSILON * scale;
            }
            q = d[i] - x - e[i - 1] * e[i - 1] / q;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut a = lo;
        let mut b = hi;
        // Bisection until floating resolution.
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if count_below(mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}
