//! Numerical machinery for ensembles of `n` non-intersecting squared Bessel
//! bridges that start at a common point `a > 0` and are pinned to `0`.
//!
//! The crate is organised around the objects that describe the large-`n`
//! behaviour of such ensembles:
//!
//! * [`model`] — modified-Bessel weights, the four-term recurrence for the
//!   associated average characteristic polynomials, its scaled coefficient
//!   limits, and overflow-safe polynomial evaluation;
//! * [`polyzeros`] — real-zero extraction by interlacing-bracketed bisection,
//!   zero bounds, an Aberth–Ehrlich complex root finder and finite-`n`
//!   banded-Toeplitz spectra;
//! * [`symbol`] — the cubic symbol `A_s(z)`, its ordered roots, the
//!   equimodularity sets `Γ₁(s)`, `Γ₂(s)` and the edge curves
//!   `β(s), γ(s), η(s)` with their inverses;
//! * [`measures`] — densities, masses and transforms of the limit measures
//!   `μ₁ˢ, μ₂ˢ`, their averages `ν₁^ξ, ν₂^ξ`, the constraint `σ`, the
//!   external field `V` (closed form and quadrature) and the
//!   Marchenko–Pastur limit;
//! * [`equilibrium`] — logarithmic potentials, energy functionals and
//!   numerical verification of the Euler–Lagrange variational conditions;
//! * [`sim`] — Monte-Carlo simulation of the non-intersecting bridges via a
//!   complex matrix (Laguerre) bridge together with envelope statistics;
//! * [`accept`] — the acceptance suite wiring all of the above together.
//!
//! Shared numerical utilities live in [`quad`] (adaptive Gauss–Kronrod
//! quadrature), [`cubic`] (closed-form cubic solver) and [`special`]
//! (modified Bessel functions of the first kind).

pub mod accept;
pub mod cubic;
pub mod equilibrium;
pub mod measures;
pub mod model;
pub mod polyzeros;
pub mod quad;
pub mod sim;
pub mod special;
pub mod symbol;

pub use model::{CoeffSource, CoeffTriple, FiniteParams, ScaledParams};
pub use symbol::{EdgeCurves, SymbolRoots};
