//! Numerical laboratory for ∂t u − Δp u = λ|u|^{p−2}u + f on intervals and radial balls:
//! exact solutions, an implicit solver, discrete maximum and comparison principle checks,
//! and reproducible counterexample scenarios.

pub mod closed_forms;
pub mod elliptic;
pub mod error;
pub mod grid;
pub mod numerics;
pub mod ode;
pub mod parabolic;
pub mod principles;
pub mod problem;
pub mod scenarios;

pub use error::{Error, Result};
pub use grid::{sample, sup_diff, sup_norm, Field, Geometry, Grid, SpaceTimeField, TimeMesh};
pub use problem::{Boundary, ProblemSpec, Reaction, Source};
