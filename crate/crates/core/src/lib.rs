//! Set Membership global optimization of Lipschitz-continuous black-box
//! functions.
//!
//! The optimizer keeps every evaluated sample, estimates a Lipschitz constant
//! from them, and derives guaranteed-style lower and upper envelopes of the
//! cost from cones anchored at the samples. Each new point is either an
//! exploitation point near the best sample, where the lower envelope promises
//! enough improvement, or an exploration midpoint where the envelopes are
//! furthest apart.
//!
//! ```
//! use smgo::{run, EngineConfig, SearchSpace};
//!
//! let space = SearchSpace::cube(-1.0, 1.0, 2).unwrap();
//! let config = EngineConfig { budget: 80, ..EngineConfig::default() };
//! let out = run(|x: &[f64]| x[0].powi(2) + (x[1] - 0.5).powi(2), &[vec![0.7, -0.2]], config, space).unwrap();
//! assert!(out.best.z < 1e-2);
//! ```
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` / `*32` aliases name the common instantiations.

pub mod bench;
pub mod bounds;
pub mod engine;
pub mod error;
pub mod gap;
pub mod history;
pub mod scalar;
pub mod space;

pub use bounds::{
    init_gamma, lower_bound, uncertainty, update_gamma, upper_bound, CachedBound, ConeRecord,
};
pub use engine::{
    exploitation_candidates, improvement_met, run, select_exploitation, Engine, EngineConfig,
    ExplorationPool, IterationReport, MidpointKey, Mode, PoolCandidate, Prediction, RunOutcome,
};
pub use error::{Result, SmgoError};
pub use gap::{gap_upper_bound, GapCertificate};
pub use history::{History, Sample};
pub use scalar::Scalar;
pub use space::{SearchSpace, VERTEX_CAP};

pub type Engine64 = Engine<f64>;
pub type Engine32 = Engine<f32>;
pub type EngineConfig64 = EngineConfig<f64>;
pub type EngineConfig32 = EngineConfig<f32>;
pub type History64 = History<f64>;
pub type History32 = History<f32>;
pub type Sample64 = Sample<f64>;
pub type Sample32 = Sample<f32>;
pub type SearchSpace64 = SearchSpace<f64>;
pub type SearchSpace32 = SearchSpace<f32>;
pub type GapCertificate64 = GapCertificate<f64>;
