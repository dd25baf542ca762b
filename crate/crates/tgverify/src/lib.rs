//! Numerical certification of totally geodesic vector-field graphs in
//! tangent bundles carrying g-natural metrics.
//!
//! Given a Riemannian manifold `(M, g)` presented in a single chart, a
//! vector field `u` on `M`, and a g-natural metric `G` on the tangent
//! bundle `TM` described by six generator weights `a1, a2, a3, b1, b2, b3`
//! of `t = g(u, u)`, this crate decides numerically whether the graph
//! `x ↦ (x, u(x))` is a totally geodesic submanifold of `(TM, G)`.
//!
//! Two independent computational routes are kept deliberately separate:
//!
//! * closed-form expansions of the second fundamental form and the
//!   obstruction fields `T_W`, `T_V` ([`submanifold`]), and
//! * a brute-force oracle that assembles the `2n x 2n` bundle metric in
//!   coordinates, differentiates it numerically for its Christoffel
//!   symbols, and covariantly differentiates lifted frames along curves
//!   ([`tangent_bundle`], [`submanifold::sff_oracle`]).
//!
//! Agreement between the two routes on randomized sweeps is the main
//! correctness argument; the test suite and the companion CLI both lean
//! on it.

pub mod diff;
pub mod error;
pub mod gnatural;
pub mod manifold;
pub mod submanifold;
pub mod tangent_bundle;

pub use error::{Error, Result};

/// Tolerances used across the crate. Anything compared against the
/// finite-difference oracle gets the loosest rung; exact linear algebra
/// the tightest.
pub mod tol {
    /// Orthogonality / linear-algebra identities.
    pub const LINALG: f64 = 1e-9;
    /// Analytic-vs-analytic comparisons (dual-number derivatives).
    pub const ANALYTIC: f64 = 1e-6;
    /// Anything involving a finite-difference oracle.
    pub const ORACLE: f64 = 1e-5;
    /// Non-degeneracy threshold for generator scalars `a(t)`, `F(t)`.
    pub const NONDEGENERACY: f64 = 1e-10;
    /// Condition-number ceiling before a matrix counts as singular.
    pub const MAX_CONDITION: f64 = 1e12;
}
