//! Quantum torus and quantum group algorithms at odd roots of unity.
//!
//! Layering, bottom-up:
//! - [`cyc`]: exact arithmetic in the cyclotomic field Q(ω).
//! - [`scalars`]: the numeric root-of-unity context (ω, A, q) and q-calculus.
//! - [`torus`]: quantum tori attached to triangulated surfaces, Weyl-ordered
//!   monomials, and gluing of triangulations.
//! - [`qgroup`]: the quantum group embedded in the once-punctured-torus
//!   quantum torus: presentation, Hopf structure, center.
//! - [`reps`]: weight modules, standard (quantum-torus) modules, the
//!   translation between the two, and classical-shadow invariants.
//! - [`cg`]: Clebsch–Gordan decomposition of tensor products of cyclic and
//!   semi-cyclic modules.
//! - [`braiding`]: braiding operators from quantum dilogarithms and the
//!   Drinfel'd-style R-matrix, with Yang–Baxter checks.
//! - [`braid`]: colored braid evaluation and closure invariants.

pub mod cyc;
pub mod scalars;
pub mod torus;
pub mod qgroup;
pub mod reps;
pub mod cg;
pub mod braiding;
pub mod contraction_oracle;
pub mod braid;

pub use scalars::RootContext;
pub use torus::{TorusElement, Triangulation};
