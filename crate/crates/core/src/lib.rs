//! Exact and stochastic laboratory for the rendezvous game on `n` discrete locations.
//!
//! Two players each pick a location every round; their private numberings are
//! matched by a uniformly random permutation (the binding). The crate computes
//! waiting-time statistics exactly over all bindings, checks the inequality
//! chain behind the symmetric lower bound, simulates canonical strategies and
//! searches for good symmetric strategies.

pub mod bounds;
pub mod error;
pub mod exact;
pub mod format;
pub mod model;
pub mod montecarlo;
pub mod optimizer;
mod par;
pub mod rational;
pub mod strategy;
pub mod zoo;

pub use error::{Error, Result};
pub use exact::{Engine, ExactConfig, ExactEngine, MomentReport, PairEvaluation, SurvivalCurve};
pub use model::{classify, pair_set, play, Binding, PairSet, Tactic, TacticKind};
pub use rational::Q;
pub use strategy::{ItinerarySampler, Strategy};
