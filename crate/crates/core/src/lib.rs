//! Traversal time of a particle through an oscillating one-dimensional
//! barrier, computed three independent ways: Floquet-sideband scattering
//! with visibility extraction ([`sideband`]), WKB quadratures ([`wkb`]) and
//! stochastic-mechanics sample paths ([`nelson`]).
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the usual double-precision instantiations.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0)` also rejects NaN

pub mod bessel;
mod error;
pub mod linalg;
pub mod nelson;
pub mod physics;
pub mod profile;
pub mod quadrature;
mod scalar;
pub mod sideband;
pub mod wkb;

pub use error::{Error, Result};
pub use scalar::{sinhc, Scalar};

pub use physics::{BarrierKind, BarrierSpec, Channel, ChannelSet, IncidentSpec, PhysicalUnits};
pub use profile::{PotentialProfile, SampledProfile};
pub use sideband::{ScatteringSolution, SolveMethod, TraversalTimeEstimate, VisibilityReading};

pub type Units = PhysicalUnits<f64>;
pub type Barrier = BarrierSpec<f64>;
pub type Incident = IncidentSpec<f64>;
pub type Channels = ChannelSet<f64>;
pub type Profile = PotentialProfile<f64>;
pub type Solution = ScatteringSolution<f64>;
pub type WkbResult = wkb::WkbSolution<f64>;
pub type Grid = nelson::GridSpec<f64>;
pub type Packet = nelson::WavePacketSpec<f64>;
pub type Field = nelson::WaveField<f64>;
pub type Ensemble = nelson::PathEnsemble<f64>;

pub type Units32 = PhysicalUnits<f32>;
pub type Barrier32 = BarrierSpec<f32>;
pub type Solution32 = ScatteringSolution<f32>;
pub type Profile32 = PotentialProfile<f32>;
