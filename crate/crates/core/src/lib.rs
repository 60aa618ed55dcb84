//! Desk-scale laboratory for Rankin-Selberg convolutions over cyclic number
//! fields.
//!
//! The library builds fully computable automorphic representations over Q
//! (Dirichlet characters, level-one cusp forms, explicit Satake tables),
//! base-changes them to cyclic extensions presented by characters, forms
//! Rankin-Selberg coefficient streams, and measures prime-number-theorem
//! asymptotics, base-change factorization identities, and twisted-equivalence
//! structure numerically.
//!
//! Module map:
//!
//! - [`arithmetic`] — sieve, von Mangoldt, modular arithmetic, compensated sums
//! - [`characters`] — Dirichlet characters of prime conductor
//! - [`fields`] — cyclic extensions and prime-splitting invariants
//! - [`reps`] — Satake-parameter providers, twisting, base change
//! - [`rankin`] — convolution coefficients, Euler factors, streams
//! - [`pnt`] — partial sums, main terms, diagnostics, error-curve fits
//! - [`equivalence`] — twisted-equivalence detection and pair structure
//! - [`config`] — JSON specs for fields, representations, and pairs

pub mod arithmetic;
pub mod characters;
pub mod config;
pub mod equivalence;
pub mod error;
pub mod fields;
pub mod pnt;
pub mod rankin;
pub mod reps;

pub use error::{Error, Result};

/// Complex scalar used throughout (double precision).
pub type Complex = num_complex::Complex64;
