//! Cuntz-algebra quantization of polynomial observables.
//!
//! Observables on the phase space `R^{2n}` (and on a finite truncation of
//! white-noise space) are sent to coefficient matrices over the matrix units
//! `S_i S_j^*` of a Cuntz family. Every operator carries a certified
//! *window*: the block of indices on which the finite computation equals the
//! untruncated infinite matrix, so algebraic identities can be checked
//! exactly.
//!
//! The crate is `no_std` (it needs `alloc`); file formats, the command line
//! and randomized suites live in the `cuntzq` companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod basis;
pub mod ccr;
pub mod cuntz;
pub mod error;
pub mod graded;
pub mod hermite;
pub mod poly;
pub mod quantizer;
pub mod report;
pub mod scalar;
pub mod sparse;
pub mod white_noise;

#[cfg(any(test, feature = "testkit"))]
pub mod testkit;

pub use basis::{BasisCoeffs, BasisElement, BasisSpec, HermiteBasis, Normalization, Weight};
pub use error::Error;
pub use graded::{GradedBasis, HermiteKind};
pub use poly::{MultiIndex, Polynomial};
pub use quantizer::{PhaseSpace, QuantizationSetting};
pub use report::Check;
pub use scalar::{CRational, Complex64, Rational, Scalar, Surd};
pub use sparse::CoeffMatrix;

pub type Result<T, E = Error> = core::result::Result<T, E>;
