//! Reduction of exponential-memory feedbacks to intention-field form.
//!
//! A player whose control reads a convolution of the state history,
//!
//! ```text
//! uᵢ(t) = hᵢ(u°ᵢ(t), zᵢ(t)),   zᵢ(t) = Σⱼ cⱼ ∫₀ᵗ e^{−λⱼ(t−τ)} gᵢ(φ(τ)) dτ,
//! ```
//!
//! is rewritten with one filter state per kernel term, `ξ̇ⱼ = −λⱼ ξⱼ + gᵢ(φ)`,
//! so that `zᵢ = Σⱼ cⱼ ξⱼ` and the feedback becomes differential. With
//! `ξ(0) = 0` the augmented game reproduces the memory system with an empty
//! pre-history.

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result, Vector};

use super::{CustomFeedback, Dimensions, FeedbackFamily, GameDefinition};

/// Memoryless state dynamics `(φ, u₁, u₂) → φ̇`.
pub type BaseDynamics = Arc<dyn Fn(&Vector, &Vector, &Vector) -> Vector + Send + Sync>;

/// One term `c · e^{−λ s}` of a memory kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryKernel {
    pub weight: f64,
    pub decay: f64,
}

pub type ObservationMap = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
pub type DirectMap = Arc<dyn Fn(&Vector, &Vector) -> Vector + Send + Sync>;

#[derive(Clone)]
pub struct PlayerMemory {
    pub kernels: Vec<MemoryKernel>,
    pub observation_dim: usize,
    /// `g(φ)`, the filtered observation.
    pub observation: ObservationMap,
    pub control_dim: usize,
    /// `h(u°, z)`, the direct map from free control and filtered value to `u`.
    pub direct: DirectMap,
}

impl fmt::Debug for PlayerMemory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlayerMemory")
            .field("kernels", &self.kernels)
            .field("observation_dim", &self.observation_dim)
            .field("control_dim", &self.control_dim)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub struct MemoryFeedbackSpec {
    pub state_dim: usize,
    pub players: [PlayerMemory; 2],
}

impl MemoryFeedbackSpec {
    fn validate(&self) -> Result<()> {
        if self.state_dim == 0 {
            return Err(Error::InvalidInput("state_dim must be >= 1".into()));
        }
        for (i, p) in self.players.iter().enumerate() {
            if p.observation_dim == 0 || p.control_dim == 0 {
                return Err(Error::InvalidInput(format!(
                    "player {i}: observation and control dimensions must be >= 1"
                )));
            }
            if let Some(k) = p
                .kernels
                .iter()
                .find(|k| !(k.decay > 0.0) || !k.decay.is_finite())
            {
                return Err(Error::InvalidInput(format!(
                    "player {i}: kernel decay rate {} is not a stable filter (needs λ > 0)",
                    k.decay
                )));
            }
            if let Some(k) = p.kernels.iter().find(|k| !k.weight.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "player {i}: kernel weight {} is not finite",
                    k.weight
                )));
            }
        }
        Ok(())
    }
}

/// Offset of each player's first filter block inside ξ, plus the total size.
fn layout(spec: &MemoryFeedbackSpec) -> ([usize; 2], usize) {
    let sizes = spec
        .players
        .each_ref()
        .map(|p| p.kernels.len() * p.observation_dim);
    ([0, sizes[0]], sizes[0] + sizes[1])
}

fn filtered(player: &PlayerMemory, offset: usize, xi: &Vector) -> Vector {
    let d = player.observation_dim;
    let mut z = Vector::zeros(d);
    for (j, k) in player.kernels.iter().enumerate() {
        z += xi.rows(offset + j * d, d) * k.weight;
    }
    z
}

/// Builds the intention-field form of a game with exponential-memory feedbacks.
///
/// ξ stacks one filter block per `(player, kernel term)`, player 0 first. A
/// game without any kernel term keeps a single inert ξ component. The
/// resulting feedbacks ignore ε (declared with dimension 1).
pub fn augment_memory_feedback(
    base_state_dynamics: impl Fn(&Vector, &Vector, &Vector) -> Vector + Send + Sync + 'static,
    spec: MemoryFeedbackSpec,
) -> Result<GameDefinition> {
    spec.validate()?;
    let (offsets, filter_dim) = layout(&spec);
    let intention_dim = filter_dim.max(1);
    let spec = Arc::new(spec);

    let feedback = [0, 1].map(|i| -> FeedbackFamily {
        let spec = Arc::clone(&spec);
        let offset = offsets[i];
        CustomFeedback::new(spec.players[i].control_dim, 1, move |args| {
            let player = &spec.players[i];
            let z = filtered(player, offset, args.xi);
            (player.direct)(args.u_free, &z)
        })
        .into()
    });

    let xi_spec = Arc::clone(&spec);
    let xi_dynamics = move |xi: &Vector, phi: &Vector, _u1: &Vector, _u2: &Vector| {
        let mut rate = Vector::zeros(intention_dim);
        for (i, player) in xi_spec.players.iter().enumerate() {
            let d = player.observation_dim;
            let g = (player.observation)(phi);
            for (j, k) in player.kernels.iter().enumerate() {
                let at = offsets[i] + j * d;
                let block = g.clone() - xi.rows(at, d) * k.decay;
                rate.rows_mut(at, d).copy_from(&block);
            }
        }
        rate
    };

    let dims = Dimensions {
        state: spec.state_dim,
        intention: intention_dim,
        controls: [spec.players[0].control_dim, spec.players[1].control_dim],
        epsilon: [1, 1],
        jet_order: 0,
    };
    GameDefinition::new(
        dims,
        move |phi, _xi, u1, u2| base_state_dynamics(phi, u1, u2),
        xi_dynamics,
        feedback,
    )
}
