//! Unravelling a hidden dialogue from a continuous game trajectory.
//!
//! A trajectory is declared verbalizable relative to a fixed feature family
//! and threshold: the recovered ε̂ is segmented into epochs, each epoch is
//! summarised by utterance features (ωₙ from ε̂ means, vₙ from free-control
//! means, φ̄ₙ from the state), an affine recursion
//! `ωₙ = A·ω_{n−1} + B·vₙ + C·φ̄ₙ + c` is fitted by least squares, and its
//! coefficient of determination is compared with the threshold.

mod features;
mod recursion;
mod segment;
mod symbols;

use std::collections::BTreeMap;

pub use features::{extract_utterance_features, UtteranceFeatures};
pub use recursion::{fit_recursion_map, RecursionFit, RecursionMap};
pub use segment::{detect_change_points, segment_epochs, Partition};
pub use symbols::{symbolize_transcript, SymbolSequence};

use crate::dynamics::{GameDefinition, Trajectory};
use crate::epsilon::estimate_epsilon;
use crate::{Error, Result, Stage, Vector};

/// Which epoch functionals form ωₙ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FeatureSpec {
    /// Append the epoch-mean φ to ωₙ. Off by default: φ̄ₙ is already a
    /// regressor, so including it as a target is fitted identically.
    pub omega_includes_phi: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerbalizationConfig {
    pub min_epoch_len: f64,
    pub changepoint_penalty: f64,
    pub feature_spec: FeatureSpec,
    pub score_threshold: f64,
    pub symbol_bins: u32,
}

impl Default for VerbalizationConfig {
    fn default() -> Self {
        Self {
            min_epoch_len: 0.5,
            changepoint_penalty: 0.01,
            feature_spec: FeatureSpec::default(),
            score_threshold: 0.95,
            symbol_bins: 4,
        }
    }
}

impl VerbalizationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_epoch_len > 0.0) || !self.min_epoch_len.is_finite() {
            return Err(Error::InvalidInput(format!(
                "min_epoch_len must be positive, got {}",
                self.min_epoch_len
            )));
        }
        if !(self.changepoint_penalty > 0.0) || !self.changepoint_penalty.is_finite() {
            return Err(Error::InvalidInput(format!(
                "changepoint_penalty must be positive, got {}",
                self.changepoint_penalty
            )));
        }
        if !(self.score_threshold > 0.0 && self.score_threshold < 1.0) {
            return Err(Error::InvalidInput(format!(
                "score_threshold must lie in (0, 1), got {}",
                self.score_threshold
            )));
        }
        if self.symbol_bins == 0 {
            return Err(Error::InvalidInput("symbol_bins must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerbalizationResult {
    pub partition: Partition,
    pub omega_seq: Vec<Vector>,
    pub v_seq: Vec<Vector>,
    pub phi_features: Vec<Vector>,
    pub fitted_map: RecursionMap,
    pub residuals: Vec<f64>,
    pub score: f64,
    pub threshold: f64,
    pub verbalizable: bool,
    pub symbols: Vec<u64>,
    pub bigrams: BTreeMap<(u64, u64), usize>,
}

/// estimate ε → segment → extract features → fit recursion → symbolize.
///
/// A trajectory without any change point yields a single epoch; it is
/// explained by the holding recursion `ωₙ = ω_{n−1}` and scores 1.
pub fn verbalize(
    traj: &Trajectory,
    game: &GameDefinition,
    cfg: &VerbalizationConfig,
) -> Result<VerbalizationResult> {
    cfg.validate()?;
    let eps_est = estimate_epsilon(traj, game).map_err(Error::at_stage(Stage::Estimate))?;
    let partition = segment_epochs(&eps_est, cfg).map_err(Error::at_stage(Stage::Segment))?;
    let features = extract_utterance_features(traj, &eps_est, &partition, cfg)
        .map_err(Error::at_stage(Stage::Features))?;

    let (fitted_map, residuals, score) = if partition.epoch_count() == 1 {
        let map = RecursionMap::hold(
            features.omega[0].len(),
            features.v[0].len(),
            features.phi_mean[0].len(),
        );
        (map, Vec::new(), 1.0)
    } else {
        let fit = fit_recursion_map(&features.omega, &features.v, &features.phi_mean)
            .map_err(Error::at_stage(Stage::Fit))?;
        (fit.map, fit.residuals, fit.score)
    };
    let symbols = symbolize_transcript(&features.omega, cfg.symbol_bins)
        .map_err(Error::at_stage(Stage::Symbolize))?;

    Ok(VerbalizationResult {
        partition,
        omega_seq: features.omega,
        v_seq: features.v,
        phi_features: features.phi_mean,
        fitted_map,
        residuals,
        score,
        threshold: cfg.score_threshold,
        verbalizable: score >= cfg.score_threshold,
        symbols: symbols.symbols,
        bigrams: symbols.bigrams,
    })
}
