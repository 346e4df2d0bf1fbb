//! The coupled state / intention-field system and its integration.
//!
//! A game is written in intention-field form
//!
//! ```text
//! φ̇ = Φ̃(φ, ξ, u₁, u₂)
//! ξ̇ = Ξ(ξ, φ, u₁, u₂)
//! uᵢ = uᵢ(u°ᵢ, [φ, φ̇, …, φ⁽ᵏ⁾], ξ; εᵢ)
//! ```
//!
//! where `ξ` is a finite truncation of the intention field and the feedbacks
//! are ε-represented: a known function of free controls, state jets and an
//! unknown parameter `εᵢ(t)`.

mod feedback;
mod integrate;
mod memory;
mod trajectory;

use std::fmt;
use std::sync::Arc;

pub use feedback::{
    eval_feedback, AffineFeedback, CustomFeedback, FeedbackArgs, FeedbackFamily, FeedbackMap,
};
pub use integrate::{grid_jet, simulate, step_integrate, step_integrate_with_jet, Simulator};
pub use memory::{
    augment_memory_feedback, BaseDynamics, DirectMap, MemoryFeedbackSpec, MemoryKernel,
    ObservationMap, PlayerMemory,
};
pub use trajectory::Trajectory;
pub(crate) use trajectory::{grid_index, whole_steps};

use crate::{Error, Matrix, Result, Vector};

/// Highest φ-derivative a feedback may read (estimated by finite differences).
pub const MAX_JET_ORDER: usize = 2;

/// `(φ, ξ, u₁, u₂) → φ̇`.
pub type PhiDynamics = Arc<dyn Fn(&Vector, &Vector, &Vector, &Vector) -> Vector + Send + Sync>;
/// `(ξ, φ, u₁, u₂) → ξ̇`.
pub type XiDynamics = Arc<dyn Fn(&Vector, &Vector, &Vector, &Vector) -> Vector + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dimensions {
    pub state: usize,
    pub intention: usize,
    pub controls: [usize; 2],
    pub epsilon: [usize; 2],
    pub jet_order: usize,
}

impl Dimensions {
    /// All-scalar game with `k = 0`.
    pub fn scalar() -> Self {
        Self {
            state: 1,
            intention: 1,
            controls: [1, 1],
            epsilon: [1, 1],
            jet_order: 0,
        }
    }
}

/// A complete continuous game: dynamics maps, feedback families, dimensions.
///
/// Immutable after construction; clones share the dynamics closures.
#[derive(Clone)]
pub struct GameDefinition {
    dims: Dimensions,
    phi_dynamics: PhiDynamics,
    xi_dynamics: XiDynamics,
    feedback: [FeedbackFamily; 2],
}

impl fmt::Debug for GameDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GameDefinition")
            .field("dims", &self.dims)
            .field("feedback", &self.feedback)
            .finish_non_exhaustive()
    }
}

impl GameDefinition {
    pub fn new(
        dims: Dimensions,
        phi_dynamics: impl Fn(&Vector, &Vector, &Vector, &Vector) -> Vector + Send + Sync + 'static,
        xi_dynamics: impl Fn(&Vector, &Vector, &Vector, &Vector) -> Vector + Send + Sync + 'static,
        feedback: [FeedbackFamily; 2],
    ) -> Result<Self> {
        Self::from_arcs(
            dims,
            Arc::new(phi_dynamics),
            Arc::new(xi_dynamics),
            feedback,
        )
    }

    pub fn from_arcs(
        dims: Dimensions,
        phi_dynamics: PhiDynamics,
        xi_dynamics: XiDynamics,
        feedback: [FeedbackFamily; 2],
    ) -> Result<Self> {
        let named = [
            ("state_dim", dims.state),
            ("intention_dim", dims.intention),
            ("control_dim[0]", dims.controls[0]),
            ("control_dim[1]", dims.controls[1]),
            ("epsilon_dim[0]", dims.epsilon[0]),
            ("epsilon_dim[1]", dims.epsilon[1]),
        ];
        if let Some((name, _)) = named.iter().find(|(_, d)| *d == 0) {
            return Err(Error::InvalidInput(format!("{name} must be >= 1")));
        }
        if dims.jet_order > MAX_JET_ORDER {
            return Err(Error::InvalidInput(format!(
                "jet order {} exceeds the supported maximum {MAX_JET_ORDER}",
                dims.jet_order
            )));
        }
        for (i, fam) in feedback.iter().enumerate() {
            if fam.control_dim() != dims.controls[i] {
                return Err(Error::dims(
                    format!("player {i} control"),
                    dims.controls[i],
                    fam.control_dim(),
                ));
            }
            if fam.epsilon_dim() != dims.epsilon[i] {
                return Err(Error::dims(
                    format!("player {i} ε"),
                    dims.epsilon[i],
                    fam.epsilon_dim(),
                ));
            }
            if let Some(a) = fam.as_affine() {
                if a.p().ncols() != dims.state {
                    return Err(Error::dims(
                        format!("player {i} gain P columns"),
                        dims.state,
                        a.p().ncols(),
                    ));
                }
                if a.q().ncols() != dims.intention {
                    return Err(Error::dims(
                        format!("player {i} gain Q columns"),
                        dims.intention,
                        a.q().ncols(),
                    ));
                }
            }
        }
        Ok(Self {
            dims,
            phi_dynamics,
            xi_dynamics,
            feedback,
        })
    }

    pub fn dims(&self) -> &Dimensions {
        &self.dims
    }

    pub fn feedback(&self, player: usize) -> &FeedbackFamily {
        &self.feedback[player]
    }

    pub fn feedbacks(&self) -> &[FeedbackFamily; 2] {
        &self.feedback
    }

    /// Per-player ε-recovery support (affine family with full-column-rank R).
    pub fn recovery_supported(&self) -> [bool; 2] {
        [0, 1].map(|i| {
            self.feedback[i]
                .as_affine()
                .is_some_and(AffineFeedback::recovery_supported)
        })
    }

    /// Realized control of `player`; `phi_jet` must hold `jet_order + 1` entries.
    pub fn eval_feedback(
        &self,
        player: usize,
        u_free: &Vector,
        phi_jet: &[Vector],
        xi: &Vector,
        epsilon: &Vector,
    ) -> Result<Vector> {
        if phi_jet.len() != self.dims.jet_order + 1 {
            return Err(Error::dims(
                "φ-jet length",
                self.dims.jet_order + 1,
                phi_jet.len(),
            ));
        }
        if let Some(bad) = phi_jet.iter().find(|p| p.len() != self.dims.state) {
            return Err(Error::dims("φ-jet entry", self.dims.state, bad.len()));
        }
        if xi.len() != self.dims.intention {
            return Err(Error::dims("ξ", self.dims.intention, xi.len()));
        }
        eval_feedback(&self.feedback[player], u_free, phi_jet, xi, epsilon)
    }

    pub fn phi_rate(&self, phi: &Vector, xi: &Vector, u1: &Vector, u2: &Vector) -> Result<Vector> {
        let rate = (self.phi_dynamics)(phi, xi, u1, u2);
        if rate.len() != self.dims.state {
            return Err(Error::dims("Φ̃ output", self.dims.state, rate.len()));
        }
        Ok(rate)
    }

    pub fn xi_rate(&self, xi: &Vector, phi: &Vector, u1: &Vector, u2: &Vector) -> Result<Vector> {
        let rate = (self.xi_dynamics)(xi, phi, u1, u2);
        if rate.len() != self.dims.intention {
            return Err(Error::dims("Ξ output", self.dims.intention, rate.len()));
        }
        Ok(rate)
    }
}

/// `(time, φ, ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    pub time: f64,
    pub phi: Vector,
    pub xi: Vector,
}

impl GameState {
    pub fn new(time: f64, phi: Vector, xi: Vector) -> Result<Self> {
        let state = Self { time, phi, xi };
        if !state.is_finite() {
            return Err(Error::InvalidInput(
                "game state entries must be finite".into(),
            ));
        }
        Ok(state)
    }

    pub fn is_finite(&self) -> bool {
        self.time.is_finite()
            && self.phi.iter().all(|x| x.is_finite())
            && self.xi.iter().all(|x| x.is_finite())
    }
}

/// Linear dynamics
///
/// ```text
/// φ̇ = A·φ + B₁·u₁ + B₂·u₂ + C·ξ
/// ξ̇ = D·ξ + E·φ + F₁·u₁ + F₂·u₂
/// ```
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub a: Matrix,
    pub b: [Matrix; 2],
    pub c: Matrix,
    pub d: Matrix,
    pub e: Matrix,
    pub f: [Matrix; 2],
}

impl LinearSystem {
    pub fn dims(&self, epsilon: [usize; 2]) -> Dimensions {
        Dimensions {
            state: self.a.nrows(),
            intention: self.d.nrows(),
            controls: [self.b[0].ncols(), self.b[1].ncols()],
            epsilon,
            jet_order: 0,
        }
    }

    /// Builds a game with the given feedback families.
    pub fn into_game(self, feedback: [FeedbackFamily; 2]) -> Result<GameDefinition> {
        let dims = self.dims([feedback[0].epsilon_dim(), feedback[1].epsilon_dim()]);
        let (n, m) = (dims.state, dims.intention);
        let shapes = [
            ("A", &self.a, n, n),
            ("B1", &self.b[0], n, dims.controls[0]),
            ("B2", &self.b[1], n, dims.controls[1]),
            ("C", &self.c, n, m),
            ("D", &self.d, m, m),
            ("E", &self.e, m, n),
            ("F1", &self.f[0], m, dims.controls[0]),
            ("F2", &self.f[1], m, dims.controls[1]),
        ];
        for (name, mat, rows, cols) in shapes {
            if mat.shape() != (rows, cols) {
                return Err(Error::InvalidInput(format!(
                    "linear system matrix {name} has shape {:?}, expected ({rows}, {cols})",
                    mat.shape()
                )));
            }
        }
        let phi_sys = Arc::new(self);
        let xi_sys = Arc::clone(&phi_sys);
        GameDefinition::new(
            dims,
            move |phi, xi, u1, u2| {
                &phi_sys.a * phi + &phi_sys.b[0] * u1 + &phi_sys.b[1] * u2 + &phi_sys.c * xi
            },
            move |xi, phi, u1, u2| {
                &xi_sys.d * xi + &xi_sys.e * phi + &xi_sys.f[0] * u1 + &xi_sys.f[1] * u2
            },
            feedback,
        )
    }
}
