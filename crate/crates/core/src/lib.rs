//! Numerical toolkit for slice hyperholomorphic functions of a quaternionic
//! variable: quaternion matrices and their complex embedding, power series
//! with the star product, reproducing kernels on the right half-space,
//! Blaschke factors, state-space realizations and Hardy-space quadrature.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blaschke;
pub mod error;
pub mod hardy;
pub mod kernel;
pub mod qlinalg;
pub mod quat;
pub mod realization;
pub mod sample;
pub mod slicefn;

pub use error::{QsliceError, Result};
pub use qlinalg::{QMatrix, Signature};
pub use quat::{Quaternion, SliceCoordinates, UnitImaginary};
pub use slicefn::{PowerSeries, SliceMatrixFn, StarValue};
