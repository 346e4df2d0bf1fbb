//! Batch verbalizability verdicts over the scenario catalog.

use std::fmt::Write as _;

use serde::Serialize;

use crate::scenarios::{build_scenario, Scenario, ScenarioOverrides, CATALOG};
use crate::verbalization::{verbalize, VerbalizationConfig};
use crate::{Error, Result, Stage};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub scenario: String,
    /// "game" or "dialogue".
    pub kind: &'static str,
    pub epochs: usize,
    /// `None` when too few epochs were found to fit a recursion.
    pub score: Option<f64>,
    pub verbalizable: Option<bool>,
    pub distinct_symbols: Option<usize>,
}

/// Verbalizes every catalog scenario with default overrides, in catalog order.
///
/// A scenario whose partition has too few epochs for the recursion fit gets
/// a row without a verdict; any other failure aborts the table.
pub fn verbalizability_table(cfg: &VerbalizationConfig) -> Result<Vec<TableRow>> {
    CATALOG
        .iter()
        .map(|name| {
            let scenario = build_scenario(name, &ScenarioOverrides::default())?;
            let kind = match scenario {
                Scenario::Game(_) => "game",
                Scenario::Dialogue(_) => "dialogue",
            };
            let (game, traj) = scenario.continuous()?;
            let result = match verbalize(&traj, &game, cfg) {
                Ok(r) => r,
                Err(Error::Stage {
                    stage: Stage::Fit,
                    source,
                }) if matches!(*source, Error::Underdetermined { .. }) => {
                    let Error::Underdetermined { epochs, .. } = *source else {
                        unreachable!()
                    };
                    return Ok(TableRow {
                        scenario: name.to_string(),
                        kind,
                        epochs,
                        score: None,
                        verbalizable: None,
                        distinct_symbols: None,
                    });
                }
                Err(e) => return Err(e),
            };
            let mut symbols = result.symbols.clone();
            symbols.sort_unstable();
            symbols.dedup();
            Ok(TableRow {
                scenario: name.to_string(),
                kind,
                epochs: result.partition.epoch_count(),
                score: Some(result.score),
                verbalizable: Some(result.verbalizable),
                distinct_symbols: Some(symbols.len()),
            })
        })
        .collect()
}

/// Fixed-width plain-text rendering; scores are printed with 6 decimals.
/// Underdetermined rows show `-` for score and symbols.
pub fn render_table(rows: &[TableRow], threshold: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# verbalizability (threshold {threshold:.2})");
    let _ = writeln!(
        out,
        "{:<20} {:<9} {:>6} {:>10} {:>15} {:>8}",
        "scenario", "kind", "epochs", "score", "verbalizable", "symbols"
    );
    for r in rows {
        let score = r
            .score
            .map_or_else(|| "-".to_string(), |s| format!("{s:.6}"));
        let verdict = match r.verbalizable {
            Some(true) => "yes",
            Some(false) => "no",
            None => "underdetermined",
        };
        let symbols = r
            .distinct_symbols
            .map_or_else(|| "-".to_string(), |n| n.to_string());
        let _ = writeln!(
            out,
            "{:<20} {:<9} {:>6} {:>10} {:>15} {:>8}",
            r.scenario, r.kind, r.epochs, score, verdict, symbols
        );
    }
    out
}
