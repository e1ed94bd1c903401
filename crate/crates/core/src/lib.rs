//! Positive radial solutions of `Δu = a(|x|) h(u) + b(|x|) g(u)` on `R^N`,
//! their envelope estimates, and the stochastic production-planning problem
//! whose Hamilton–Jacobi–Bellman equation reduces to this form.

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod nonlinearity;
pub mod planning;
pub mod quadrature;
pub mod radial;
pub mod sim;

pub use error::{Error, Result};
