// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dd;
pub mod error;
pub mod farfield;
pub mod fields;
pub mod forward;
pub mod geometry;
pub mod indicator;
pub mod real;
pub mod specialfun;
pub mod trace;

pub use error::{Error, Result};

/// Crate version, recorded in output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
