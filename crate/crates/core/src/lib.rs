#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod cli;
pub mod constructor;
pub mod error;
pub mod expr;
pub mod extreal;
pub mod operators;
pub mod quadrature;
pub mod riesz;
pub mod verifier;

pub use error::{Error, Result};
