//! Computational harmonic analysis on discrete commutative hypergroups
//! whose underlying set is the nonnegative integers.
//!
//! A hypergroup structure on `ℕ₀` is a convolution `ε_j * ε_k = Σ_n g(j,k,n) ε_n`
//! where every product of point masses is a finitely supported probability
//! measure. Two construction routes are provided:
//!
//! * **Polynomial families** ([`coeffs::RecurrenceCoefficients`]): linearization
//!   coefficients of an orthogonal polynomial sequence `(p_n)` normalized by
//!   `p_n(1) = 1` and generated by the three-term recurrence
//!   `p_1 p_n = a_n p_{n+1} + b_n p_n + c_n p_{n-1}`.
//! * **Totally ordered ("symmetric") families** ([`coeffs::SymmetricParams`]):
//!   `ε_n * ε_m = ε_max(n,m)` off the diagonal, with diagonal products spreading
//!   mass over lower levels.
//!
//! On top of the convolution algebra the crate computes Haar weights, Fourier
//! transforms against the character family, Gaussian quadrature of the
//! orthogonality (Plancherel) measure via the Golub–Welsch method, spectral
//! support estimates from truncated Jacobi matrices, and classification of
//! characters by amenability properties: existence and uniqueness of
//! translation-invariant α-means.
//!
//! The algebra layer is generic over a [`scalar::Scalar`] backend: `f64` for
//! fast approximate work and [`scalar::Rational`] for exact arithmetic. The
//! crate is `no_std`-compatible (requires `alloc`); disable the default `std`
//! feature for embedded use.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod amenability;
pub mod coeffs;
pub mod measure;
pub mod scalar;
pub mod spectral;
pub mod table;
pub mod tridiag;

pub use amenability::{
    character_norms, classify_family, construct_mean, construct_symmetric_mean, corollary_check,
    verdict_polynomial, verdict_symmetric, AlphaMean, AmenabilityReport, CharacterNorms,
    ClassFlags, CorollaryOutcome, EvalMethod, MeanOptions, MeanVerification, NormValue,
    SymmetricMean, Verdict, VerdictOptions,
};
pub use coeffs::{
    preset, CoeffWindow, Family, PresetParams, RecurrenceCoefficients, SymmetricParams, TailRule,
};
pub use measure::{convolve, fourier, fourier_with, translate, SequenceMeasure};
pub use scalar::{format_f64, parse_all, ParseNumberError, Rational, Scalar};
pub use spectral::{
    estimate_support, evaluate_character, evaluate_character_backward, evaluate_q, is_isolated,
    orthonormalize, plancherel_check, quadrature, BackwardEval, CharacterEval, MassPoint,
    OrthonormalSystem, SpectralMeasure, SupportEstimate, SupportOptions,
};
pub use table::{
    verify_axioms, verify_family, AxiomParams, AxiomReport, AxiomViolation, ConvolutionTable,
    HaarWeights, Row, TableKind, ViolationKind,
};
pub use tridiag::{eigen_first_row, eigenvalues, sturm_eigenvalues};

use alloc::string::String;
use core::fmt;

/// Errors surfaced by construction and analysis routines.
///
/// Sign failures of the hypergroup axioms are deliberately *not* an error:
/// tables for coefficient families that fail nonnegativity still build, so the
/// algebra of signed families can be explored; [`verify_axioms`] reports the
/// violations instead.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An operation needed a table row beyond the materialized level.
    TableExhausted { needed: usize, max_level: usize },
    /// `g(n,n,0)` vanished or went negative, so no Haar weight exists there.
    DegenerateTable { index: usize },
    /// Preset name not recognized.
    UnknownPreset { name: String },
    /// A parameter failed validation (range, normalization, shape).
    InvalidParameter { what: String },
    /// The QL iteration failed to converge on some eigenvalue.
    EigensolverFailure { index: usize, iterations: usize },
    /// Quadrature order too small for the requested exactness degree.
    OrderTooSmall { required: usize, got: usize },
    /// The character at this point is not square-summable against the Haar
    /// weights, so no mean can be constructed from it.
    NotL2 { x: f64 },
    /// Classification window too short for tail statistics.
    WindowTooSmall { window: usize, min: usize },
    /// A non-finite value appeared where a finite one was required.
    NonFinite { what: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::TableExhausted { needed, max_level } => write!(
                f,
                "convolution table exhausted: index {needed} requested, materialized to {max_level}"
            ),
            Error::DegenerateTable { index } => write!(
                f,
                "degenerate table: g({index},{index},0) is zero or negative, Haar weight undefined"
            ),
            Error::UnknownPreset { name } => write!(f, "unknown preset `{name}`"),
            Error::InvalidParameter { what } => write!(f, "invalid parameter: {what}"),
            Error::EigensolverFailure { index, iterations } => write!(
                f,
                "eigensolver failed to converge on eigenvalue {index} after {iterations} iterations"
            ),
            Error::OrderTooSmall { required, got } => write!(
                f,
                "quadrature order {got} too small: need at least {required} for exactness"
            ),
            Error::NotL2 { x } => write!(
                f,
                "character at x = {x} is not square-summable; no alpha-mean exists in L1"
            ),
            Error::WindowTooSmall { window, min } => {
                write!(f, "classification window {window} too small (minimum {min})")
            }
            Error::NonFinite { what } => write!(f, "non-finite value in {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
