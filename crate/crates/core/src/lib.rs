//! Simulation and a-posteriori analysis of 2-person differential interactive
//! games with intention fields.
//!
//! The crate is organised around one pipeline:
//!
//! * [`dynamics`] integrates the coupled state / intention-field system
//!   `φ̇ = Φ̃(φ, ξ, u₁, u₂)`, `ξ̇ = Ξ(ξ, φ, u₁, u₂)` whose controls are
//!   ε-represented feedbacks `uᵢ = uᵢ(u°ᵢ, φ-jet, ξ; εᵢ)`, and reduces
//!   exponential-memory feedbacks to that form.
//! * [`epsilon`] recovers the hidden ε-parameters from a recorded trajectory
//!   and makes frozen-ε short-term predictions.
//! * [`dialogue`] runs discrete-time dialogues whose utterances are epoch
//!   functionals of continuous intention-field dynamics.
//! * [`verbalization`] segments a continuous trajectory into epochs, fits a
//!   recursion between consecutive utterance features and scores how well a
//!   hidden dialogue explains the game.
//! * [`scenarios`] holds the frozen, seeded catalog every test and the CLI
//!   run against.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dialogue;
pub mod dynamics;
pub mod epsilon;
mod error;
pub mod hypothesis;
pub mod quadrature;
pub mod rng;
pub mod scenarios;
pub mod signal;
pub mod verbalization;

pub use dynamics::{
    augment_memory_feedback, eval_feedback, simulate, step_integrate, AffineFeedback,
    CustomFeedback, Dimensions, FeedbackArgs, FeedbackFamily, GameDefinition, GameState,
    MemoryFeedbackSpec, MemoryKernel, PlayerMemory, Simulator, Trajectory,
};
pub use error::{Error, Result, Stage};
pub use signal::{Signal, SignalRef};

/// Dense column vector used for every state, control and parameter sample.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix used for feedback gains and linear maps.
pub type Matrix = nalgebra::DMatrix<f64>;

/// Tolerance used when matching continuous times against a uniform grid.
pub const TIME_TOLERANCE: f64 = 1e-9;
