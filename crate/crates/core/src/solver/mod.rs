//! Time integration of the ε-system and of the rough limit equation.

mod checkpoint;
mod config;
mod energy;
mod forcing;
mod stepper;
mod trajectory;

pub use checkpoint::{noise_hash, read_checkpoint, write_checkpoints};
pub use config::{Scheme, SolverConfig};
pub use energy::{energy_audit, richardson_ratio, EnergyReport};
pub use forcing::NoiseForcing;
pub use stepper::{
    default_initial_field, noise_field, run_epsilon_system, run_limit_davie, step_epsilon_system,
    step_limit_davie,
};
pub use trajectory::{RunMetadata, Trajectory};
