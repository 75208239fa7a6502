//! Exact machinery for homogeneous real polynomials whose large powers have
//! all positive coefficients.
//!
//! The crate is `no_std` (it needs `alloc`). It covers:
//!
//! - [`poly`]: sparse exact-rational polynomials, the expression grammar,
//!   rational / complex / interval evaluation and formal calculus.
//! - [`conditions`]: deciders for the three positivity conditions and the
//!   associated Hermitian bihomogeneous form.
//! - [`eventual`]: power scans of `p^m * q` and Pólya exponents.
//! - [`geometry`]: supports, Newton-polytope dimension, difference lattices,
//!   the `J_f` matrix and its finite-difference cross-check.
//! - [`spectral`]: polynomial matrices over the nonnegative integers and
//!   their Perron root function.
//!
//! Enable the `parallel` feature to spread the Pos3 grid and box work over a
//! rayon pool. Results do not depend on the thread count.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod conditions;
pub mod error;
pub mod eventual;
pub mod geometry;
pub mod poly;
pub mod spectral;

mod par;

pub use error::{Error, Result};
pub use poly::{Degree, Interval, MultiIndex, Polynomial, Rational};
