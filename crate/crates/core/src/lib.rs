//! Edgeworth expansions for one-parameter posterior distributions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

use serde::Serialize;

pub mod edgeworth;
pub mod error;
pub mod laplace;
pub mod models;
pub mod momentalg;
pub mod numdiff;
pub mod parallel;
pub mod posterior;
pub mod quadrature;
pub mod report;
pub mod specialfn;

pub use error::{Error, ErrorCategory, Result};

/// Asymptotic order `n^{-m/2}` carried by a term or quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HalfOrder(pub u32);

impl HalfOrder {
    /// The exponent of `n`, `-m/2`.
    pub fn exponent(self) -> f64 {
        -(self.0 as f64) / 2.0
    }
}
