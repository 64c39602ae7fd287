//! Stein's-method error bounds for approximating the law of a sum of
//! independent non-negative integer random variables
//! `W = ξ_1 + … + ξ_n` by a Poisson law and by a Poisson-convoluted-geometric
//! law, together with the exact machinery needed to check them: truncated
//! PMF algebra, total variation distances and PGF quotient coefficients.
//!
//! The crate is organised bottom-up:
//!
//! - [`pmf`]: component families, truncated PMFs, convolution and total
//!   variation distances.
//! - [`gcoeff`]: the coefficient streams of `ψ'(w)/ψ(w)` for each family,
//!   by closed form and by power-series division.
//! - [`moments`]: mean, variance and the second and third factorial
//!   cumulants of `W`.
//! - [`stein`]: Stein operators, the zero-expectation checker, the Poisson
//!   solution bounds and the perturbation combinator.
//! - [`bounds`]: the published error bounds and comparison bounds.
//! - [`cli`]: the `stein-approx` command-line front end.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod gcoeff;
pub mod moments;
pub mod pmf;
pub mod stein;

pub use error::{Error, Result};
pub use pmf::{ComponentFamily, TruncatedPmf};
