//! Stochastic-mechanics dwell times: a Crank–Nicolson wave packet supplies
//! the osmotic and current velocities, Langevin paths sample the density.

mod grid;
mod paths;
pub mod persist;
mod tdse;
mod velocity;

pub use grid::{grid_potential, region_ii, GridSpec, WavePacketSpec};
pub use paths::{
    backward_paths, backward_transmitted_paths, dwell_time, forward_paths, noise_increment, path_seed, tau_crossing, tau_nelson,
    DensitySampler, Exclusion, PathEnsemble, PathOptions, SamplePath, TauNelson, MIN_TRANSMITTED_WEIGHT,
};
pub use tdse::{propagate, propagate_free, WaveField, EDGE_DENSITY_LIMIT, NORM_DRIFT_LIMIT};
pub use velocity::{velocities, VelocitySample, CLAMP_SPEED, NODE_FLOOR};
