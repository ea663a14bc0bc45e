// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod constants;
pub mod counterexample;
pub mod error;
pub mod measure_space;
pub mod mesh;
pub mod quadrature;
pub mod special_fn;
pub mod verify;

pub use error::{Error, Result};
