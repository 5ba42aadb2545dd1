//! Computational toolkit for quadratic exponential sums and their value
//! distributions.
//!
//! The crate is organised in layers:
//!
//! * [`numtheory`] — exact integer arithmetic: gcd, modular inverses,
//!   totients, primality, Jacobi symbols and the ±1/±i sign factors.
//! * [`expsums`] — finite exponential sums: incomplete and classical Gauss
//!   sums, theta sums, Kloosterman/Salié sums, mean squares and the
//!   long-range weighted sums.
//! * [`theta`] — Hermite functions, Hermite expansions of weight functions,
//!   theta series on the upper half-plane and the half-integral-weight
//!   automorphy factor.
//! * [`metaplectic`] — the upper half-plane action, Iwasawa coordinates,
//!   the universal-cover group law, explicit lifts of rational horocycle
//!   points and fundamental-domain reduction.
//! * [`distexp`] — statistical experiment drivers: empirical distributions,
//!   reference sampling, Kolmogorov–Smirnov distances, tail-exponent fits,
//!   sign-class tests and equidistribution checks.
//! * [`verify`] — the invariant suites exposed by the `gausslab verify` CLI
//!   command and reused by the acceptance tests.
//!
//! Experiment drivers are data-parallel over residues (or sample points)
//! via `rayon` when the default `parallel` feature is enabled; building with
//! `--no-default-features` yields a purely sequential crate with the same
//! API and bit-identical results.

pub mod distexp;
pub mod error;
pub mod exec;
pub mod expsums;
pub mod metaplectic;
pub mod numtheory;
pub mod quadrature;
pub mod theta;
pub mod util;
pub mod verify;

pub use error::{Error, Result};
pub use exec::ExecPolicy;

/// Complex double shorthand used throughout the crate.
pub type Complex = num_complex::Complex64;
