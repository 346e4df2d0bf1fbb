//! JSON report schemas (all carry `schema_version`).

use igame_core::dialogue::DialogueTranscript;
use igame_core::epsilon::{EpsilonEstimate, PredictionReport};
use igame_core::hypothesis::TableRow;
use igame_core::verbalization::VerbalizationResult;
use igame_core::{Matrix, Vector};
use serde::Serialize;

use crate::io::SCHEMA_VERSION;

fn vec(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

fn vecs(vs: &[Vector]) -> Vec<Vec<f64>> {
    vs.iter().map(vec).collect()
}

/// Row-major nested arrays.
fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[derive(Debug, Serialize)]
pub struct Source {
    pub scenario: String,
    pub seed: Option<u64>,
    /// Ingested trajectory file, if any.
    pub input: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct EstimateReport {
    pub schema_version: u32,
    pub source: Source,
    pub t0: f64,
    pub dt: f64,
    pub rank_ok: [bool; 2],
    pub epsilon_hat: [Vec<Vec<f64>>; 2],
    pub residual_norm: [Vec<f64>; 2],
    pub max_residual: f64,
}

impl EstimateReport {
    pub fn new(source: Source, est: &EpsilonEstimate) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            source,
            t0: est.t0,
            dt: est.dt,
            rank_ok: est.rank_ok,
            epsilon_hat: [vecs(&est.epsilon_hat[0]), vecs(&est.epsilon_hat[1])],
            residual_norm: est.residual_norm.clone(),
            max_residual: est
                .residual_norm
                .iter()
                .flatten()
                .copied()
                .fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AnchorEntry {
    pub anchor: f64,
    pub max_error: Option<f64>,
    pub error: Option<String>,
    pub frozen_epsilon: Option<[Vec<f64>; 2]>,
    pub times: Vec<f64>,
    pub predicted_phi: Vec<Vec<f64>>,
    pub actual_phi: Vec<Vec<f64>>,
    pub error_profile: Vec<f64>,
}

impl AnchorEntry {
    pub fn ok(r: &PredictionReport) -> Self {
        Self {
            anchor: r.anchor_time,
            max_error: Some(r.max_error()),
            error: None,
            frozen_epsilon: Some([vec(&r.frozen_epsilon[0]), vec(&r.frozen_epsilon[1])]),
            times: r.times.clone(),
            predicted_phi: vecs(&r.predicted_phi),
            actual_phi: vecs(&r.actual_phi),
            error_profile: r.error_profile.clone(),
        }
    }

    pub fn failed(anchor: f64, err: &igame_core::Error) -> Self {
        Self {
            anchor,
            max_error: None,
            error: Some(err.to_string()),
            frozen_epsilon: None,
            times: Vec::new(),
            predicted_phi: Vec::new(),
            actual_phi: Vec::new(),
            error_profile: Vec::new(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PredictReport {
    pub schema_version: u32,
    pub source: Source,
    pub horizon: f64,
    pub anchors: Vec<AnchorEntry>,
}

#[derive(Debug, Serialize)]
pub struct UtteranceEntry {
    pub index: usize,
    pub start: f64,
    pub end: f64,
    pub state: Vec<f64>,
    pub control: [Vec<f64>; 2],
}

#[derive(Debug, Serialize)]
pub struct DialogueReport {
    pub schema_version: u32,
    pub source: Source,
    pub epochs: usize,
    pub utterances: Vec<UtteranceEntry>,
    pub step_residuals: Vec<f64>,
    pub residual_max: Option<f64>,
    pub residual_mean: Option<f64>,
}

impl DialogueReport {
    pub fn new(source: Source, t: &DialogueTranscript) -> Self {
        let n = t.step_residuals.len();
        Self {
            schema_version: SCHEMA_VERSION,
            source,
            epochs: t.utterances.len(),
            utterances: t
                .utterances
                .iter()
                .map(|u| UtteranceEntry {
                    index: u.index,
                    start: u.epoch.0,
                    end: u.epoch.1,
                    state: vec(&u.state),
                    control: [vec(&u.control[0]), vec(&u.control[1])],
                })
                .collect(),
            step_residuals: t.step_residuals.clone(),
            residual_max: (n > 0).then(|| t.step_residuals.iter().copied().fold(0.0, f64::max)),
            residual_mean: (n > 0).then(|| t.step_residuals.iter().sum::<f64>() / n as f64),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MapEntry {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct BigramEntry {
    pub from: u64,
    pub to: u64,
    pub count: usize,
}

#[derive(Debug, Serialize)]
pub struct VerbalizeReport {
    pub schema_version: u32,
    pub source: Source,
    pub boundaries: Vec<f64>,
    pub omega: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub phi_features: Vec<Vec<f64>>,
    pub fitted_map: MapEntry,
    pub residuals: Vec<f64>,
    pub score: f64,
    pub threshold: f64,
    pub verbalizable: bool,
    pub symbols: Vec<u64>,
    pub bigrams: Vec<BigramEntry>,
}

impl VerbalizeReport {
    pub fn new(source: Source, r: &VerbalizationResult) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            source,
            boundaries: r.partition.boundaries(),
            omega: vecs(&r.omega_seq),
            v: vecs(&r.v_seq),
            phi_features: vecs(&r.phi_features),
            fitted_map: MapEntry {
                a: rows(&r.fitted_map.a),
                b: rows(&r.fitted_map.b),
                c: rows(&r.fitted_map.c),
                bias: vec(&r.fitted_map.bias),
            },
            residuals: r.residuals.clone(),
            score: r.score,
            threshold: r.threshold,
            verbalizable: r.verbalizable,
            symbols: r.symbols.clone(),
            bigrams: r
                .bigrams
                .iter()
                .map(|(&(from, to), &count)| BigramEntry { from, to, count })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TableReport<'a> {
    pub schema_version: u32,
    pub threshold: f64,
    pub rows: &'a [TableRow],
}
