//! Core model for stochastic bounded confidence (SBC) opinion dynamics.
//!
//! This crate is `no_std` (it needs `alloc`) and holds everything that is
//! pure computation:
//!
//! * [`influence`] and [`noise`]: parametric influence functions and symmetric
//!   noise models for opinion-difference increments.
//! * [`rng`]: seeded, stream-split random sources and the [`rng::Variates`]
//!   abstraction the state machines draw from.
//! * [`dynamics`]: the two-agent difference process and the bistar
//!   leader/follower process.
//! * [`bounds`]: log-domain evaluation of the finite-time concentration
//!   bounds, with a per-precondition validity report.
//! * [`oracle`]: exact laws of the processes for lattice noise, by dynamic
//!   programming over the reachable lattice.
//!
//! IO, Monte Carlo orchestration and the CLI live in the `sbc` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod dynamics;
pub mod influence;
pub mod noise;
pub mod oracle;
pub mod rng;

mod math;

pub use bounds::{BoundError, BoundResult, Check, ScheduleParams, Theorem};
pub use dynamics::{BistarState, BistarSystem, DiffState, NoiseMode, PathKind, SamplePath, TwoAgentSystem};
pub use influence::{InfluenceError, InfluenceFunction, Stability};
pub use noise::{NoiseError, NoiseModel};
pub use rng::{Mirrored, RandomSource, Variates};
