//! Stationary problems: the discrete operator, the energy, λ1, the extinction profile, the
//! saddle construction and energy minimization.

pub mod eigen;
pub mod energy;
pub mod minimize;
pub mod operator;
pub mod profile;
pub mod saddle;

pub use eigen::{lambda1_rayleigh, lambda1_shooting, rayleigh_quotient, shooting_eigenfunction};
pub use energy::{elliptic_residual, energy, energy_gradient, EnergySpec};
pub use minimize::{minimize_energy, minimize_energy_with, solve_logistic, MinimizeOptions, Minimized};
pub use operator::{discrete_p_laplacian, flux, flux_derivative, flux_inverse, solve_dirichlet, Stencil};
pub use profile::{profile_amplitude, profile_boundary_miss, solve_profile_bvp};
pub use saddle::{
    build_saddle_construction, build_saddle_construction_with_blend, cutoff, saddle_exponent,
    zeta, SaddleConstruction, W0Profile,
};
