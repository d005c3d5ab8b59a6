//! The metaplectic representation on Gaussian-type states.
//!
//! States are c·p(x)·e^{−xᵀMx/2} with Re M ≻ 0. Generators, quadratic Fourier transforms and
//! their products act in closed form; continuous lifts of unitary paths fix the sign ambiguity
//! of Mp(2n) → Sp(2n).

pub mod element;
pub mod gaussian;
pub mod generator;
pub mod hermite;
pub mod lift;
pub mod quadratic;

pub use element::MetaplecticElement;
pub use gaussian::{gaussian_integral, DistributionKind, DistributionState, GaussianAmplitude};
pub use generator::{apply_generator, apply_generator_to_distribution, Generator};
pub use hermite::{hermite_state, level_basis, level_dimension};
pub use lift::{lift_frame_path, FramePathLift};
pub use quadratic::{
    apply_quad_fourier, mu_hat, mu_hat_composed, quad_fourier_from_symplectic, solve_branch, QuadraticFourier,
};
