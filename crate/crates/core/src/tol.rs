//! Numeric tolerances shared across the crate.

/// Construction invariants: normalization, hermiticity, idempotence, isometry.
pub const CONSTRUCTION: f64 = 1e-12;

/// Comparing computed probabilities against exact fractions.
pub const PROBABILITY: f64 = 1e-9;

/// A conditional probability at or above `1 - CERTAINTY` is a certainty.
pub const CERTAINTY: f64 = 1e-9;

/// Smallest eigenvalue accepted for a positive semidefinite matrix.
pub const PSD: f64 = 1e-10;

/// Branches at or below this probability are treated as impossible.
pub const ZERO_BRANCH: f64 = 1e-12;

/// Orthonormality of caller-supplied measurement bases and basis vectors.
pub const BASIS: f64 = 1e-9;
