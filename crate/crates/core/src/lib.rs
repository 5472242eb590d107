//! Least-squares optimal dictionaries with prescribed vector lengths.
//!
//! Given the mean and covariance of a random vector `V` in `R^n` and a
//! non-increasing profile of squared lengths `c_1 >= ... >= c_K > 0`, this
//! crate computes a center `c*` and dictionary vectors `d_1..d_K` with
//! `<d_i, d_i> = c_i` that minimise the expected squared norm of the
//! minimum-norm coefficient vector `r` solving `sum_i r_i d_i = V - c*`.
//!
//! The pipeline is:
//!
//! 1. [`spectral::spectral_decompose`] the covariance and keep the
//!    effective rank `m`.
//! 2. [`majorization::collapse_lengths`] the profile to length `m`.
//! 3. Solve the chain-ordered quadratic program with
//!    [`chain_qp::solve_chain_qp`] (pool-adjacent-violators) and read off
//!    the block partition and optimal frame spectrum.
//! 4. Lift the frame operator `M* = sum lambda_i u_i u_i^T` to vectors of
//!    the prescribed lengths with [`rank_one`], which in turn relies on the
//!    prescribed-diagonal orthonormal basis sweep of [`schur_horn`].
//!
//! [`verify`] holds independent checks (Monte-Carlo cost, tight-frame
//! residual, a grid oracle for the quadratic program and a robustness
//! sweep).
//!
//! The crate is `no_std` and only needs `alloc`. Enable the `std` feature
//! to let dependencies use the standard library.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod chain_qp;
pub mod dictionary;
mod error;
mod linalg;
pub mod majorization;
pub mod rank_one;
pub mod samples;
pub mod schur_horn;
pub mod spectral;
mod tolerance;
pub mod verify;

pub use crate::chain_qp::{ChainQpProblem, ChainQpSolution, OptimalSpectrum};
pub use crate::dictionary::{Design, Dictionary, Encoding};
pub use crate::error::{Error, Result};
pub use crate::majorization::{BlockPartition, LengthProfile, RealSequence};
pub use crate::rank_one::Rank1Decomposition;
pub use crate::samples::{CovarianceDivisor, SampleSet};
pub use crate::schur_horn::{PrescribedBasis, SweepStep};
pub use crate::spectral::{MomentEstimate, SpectralData};
pub use crate::tolerance::Tolerances;

pub use nalgebra::{DMatrix, DVector};
