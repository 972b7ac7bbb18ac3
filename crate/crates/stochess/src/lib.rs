//! Banded tetradiagonal lower-Hessenberg operators built from
//! multiple-orthogonality weight systems, the two stochastic matrices
//! diagonally similar to them, and the dynamics of the associated Markov
//! chains.
//!
//! The pipeline: a weight pair on `[0,1]` produces an interleaved moment
//! matrix, its Gauss–Borel (LDU) factorization yields the type II polynomials
//! `B_n` and type I linear-form data, the similarity `H = S Λ S⁻¹` gives a
//! banded lower-Hessenberg operator with bands `{-2,-1,0,+1}` and unit
//! superdiagonal, and the evaluations at `x = 1` turn `H` into a dual pair of
//! stochastic matrices. Downstream modules compute r-step transition
//! probabilities (spectral integral vs. truncated matrix powers), classify
//! recurrence/transience, verify the asymptotic duality, and simulate
//! trajectories.
//!
//! Everything runs either exactly (big rationals) or at tagged
//! multiprecision, selected per call through the [`scalar::Scalar`] trait.

pub mod classical;
pub mod error;
pub mod gauss_borel;
pub mod jp;
pub mod kmg;
pub mod moments;
pub mod pipeline;
pub mod quadrature;
pub mod scalar;
pub mod sim;
pub mod special;
pub mod stochastic;
pub mod weights;

pub use error::{Error, Result};
pub use scalar::{ExactScalar, PrecisionScalar, Scalar};
