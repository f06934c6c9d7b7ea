#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod expr;
pub mod interp;
pub mod kernel;
pub mod linalg;
pub mod metrics;
pub mod pso;
pub mod report;
pub mod rng;
pub mod svm;
pub mod tuning;

pub use error::{Error, Result};
