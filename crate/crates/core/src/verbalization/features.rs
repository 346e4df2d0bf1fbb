use crate::dialogue::EpochTrace;
use crate::dynamics::Trajectory;
use crate::epsilon::EpsilonEstimate;
use crate::quadrature::trapezoid_mean;
use crate::{Error, Result, Vector, TIME_TOLERANCE};

use super::{Partition, VerbalizationConfig};

/// Epoch functionals read from a partitioned trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct UtteranceFeatures {
    /// ωₙ: mean ε̂₁ ⊕ mean ε̂₂ (⊕ mean φ when configured).
    pub omega: Vec<Vector>,
    /// vₙ: mean u°₁ ⊕ mean u°₂.
    pub v: Vec<Vector>,
    /// Epoch-mean φ, the state argument of the recursion map.
    pub phi_mean: Vec<Vector>,
}

fn concat(parts: &[Vector]) -> Vector {
    let len = parts.iter().map(|p| p.len()).sum();
    Vector::from_iterator(len, parts.iter().flat_map(|p| p.iter().copied()))
}

pub fn extract_utterance_features(
    traj: &Trajectory,
    eps_est: &EpsilonEstimate,
    partition: &Partition,
    cfg: &VerbalizationConfig,
) -> Result<UtteranceFeatures> {
    let grid_matches = eps_est.len() == traj.len()
        && (eps_est.dt - traj.dt()).abs() <= TIME_TOLERANCE
        && (eps_est.t0 - traj.t0()).abs() <= TIME_TOLERANCE
        && (partition.dt() - traj.dt()).abs() <= TIME_TOLERANCE
        && (partition.t0() - traj.t0()).abs() <= TIME_TOLERANCE;
    let last = *partition
        .indices()
        .last()
        .expect("partitions are non-empty");
    if !grid_matches || last >= traj.len() {
        return Err(Error::InvalidInput(
            "partition or ε-estimate does not match the trajectory grid".into(),
        ));
    }

    let eps = [
        eps_est.epsilon_hat[0].as_slice(),
        eps_est.epsilon_hat[1].as_slice(),
    ];
    let mut out = UtteranceFeatures {
        omega: Vec::with_capacity(partition.epoch_count()),
        v: Vec::with_capacity(partition.epoch_count()),
        phi_mean: Vec::with_capacity(partition.epoch_count()),
    };
    for w in partition.indices().windows(2) {
        let epoch = EpochTrace::from_trajectory(traj, eps, w[0], w[1])?;
        let e1 = trapezoid_mean(&epoch.epsilon[0], epoch.dt)?;
        let e2 = trapezoid_mean(&epoch.epsilon[1], epoch.dt)?;
        let phi = trapezoid_mean(&epoch.phi, epoch.dt)?;
        let v1 = trapezoid_mean(&epoch.u_free[0], epoch.dt)?;
        let v2 = trapezoid_mean(&epoch.u_free[1], epoch.dt)?;
        let omega = if cfg.feature_spec.omega_includes_phi {
            concat(&[e1, e2, phi.clone()])
        } else {
            concat(&[e1, e2])
        };
        let v = concat(&[v1, v2]);
        if omega
            .iter()
            .chain(v.iter())
            .chain(phi.iter())
            .any(|x| !x.is_finite())
        {
            return Err(Error::InvalidInput(format!(
                "non-finite epoch feature on [{}, {}]",
                epoch.start, epoch.end
            )));
        }
        out.omega.push(omega);
        out.v.push(v);
        out.phi_mean.push(phi);
    }
    Ok(out)
}
