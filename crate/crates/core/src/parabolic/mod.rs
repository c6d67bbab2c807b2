//! Time-dependent problems: the implicit stepper, residual certification, reaction terms
//! and the linearized flux matrix.

pub mod linearization;
pub mod reaction;
pub mod residual;
pub mod stepper;

pub use linearization::{linearization_matrix, LinearizationMatrix};
pub use reaction::{one_sided_lipschitz_bound, reaction_eval, reaction_outside_theory};
pub use residual::{residual_field, residual_slice};
pub use stepper::{solve_parabolic, step_implicit_euler, ParabolicSolution, StepReport, MAX_SUBSTEPS};
