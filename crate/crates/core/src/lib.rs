//! Dynamics of a resonantly driven three-level lambda system with
//! relaxation.
//!
//! Level 0 (ground) is coupled to level 1 by a laser of Rabi frequency `W`.
//! Level 1 relaxes to 0 at `1/T1` and to level 2 at `k21`; level 2 returns to
//! 0 at `k02`; the 0–1 coherence dephases at `1/T2`. Only four real variables
//! matter, `(rho00, rhoB, rho11, rho22)`, which evolve under a constant 4×4
//! generator `L`.
//!
//! - [`model`]: parameters, reduced state and generator.
//! - [`steady_state`]: closed-form long-time limit and the `rho22`/`rho00`
//!   crossover.
//! - [`spectrum`]: eigenvalues of `L`, weak-field limits, complex-pair onset.
//! - [`integrator`]: RK4 evolution and the exact modal propagator.
//! - [`analysis`]: decay-constant fits and drive sweeps.
//! - [`fullsystem`]: the nine-element density matrix, used to check the
//!   reduction to four variables.
//!
//! Units are ns for time, 1/ns for rates and rad/ns for `W`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cubic;
pub mod error;
pub mod fullsystem;
pub mod integrator;
pub mod model;
pub mod ode;
pub mod spectrum;
pub mod steady_state;

pub use analysis::{effective_initial_decay, fit_decay_constant, sweep, DecayFit, SweepRow};
pub use error::{Error, Result};
pub use fullsystem::{decoupling_residual, evolve_full, reduce, FullState, FullTrajectory};
pub use integrator::{
    conservation_residual, evolve, evolve_sampled, exact_solution, InitialCondition,
    ModalExpansion, Sampling, Trajectory,
};
pub use model::{
    build_generator, default_params, rabi_frequency, Component, DensityVector, GeneratorMatrix,
    SystemParams,
};
pub use num_complex::Complex64;
pub use spectrum::{complex_onset, eigenvalues, trace_residual, weak_field_limits, Spectrum};
pub use steady_state::{crossover_omega, steady_state, Crossover, SteadyState};
