//! The five commands. Each returns the files it wrote.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use igame_core::dialogue::DialogueTranscript;
use igame_core::epsilon::{estimate_epsilon, freeze_and_predict};
use igame_core::hypothesis::{render_table, verbalizability_table};
use igame_core::scenarios::{build_scenario, Scenario};
use igame_core::verbalization::verbalize;
use igame_core::{GameDefinition, SignalRef, Trajectory};

use crate::config::{CommandName, RunConfig};
use crate::error::invalid;
use crate::io::{read_trajectory, write_json, write_trajectory, SCHEMA_VERSION};
use crate::report::{
    AnchorEntry, DialogueReport, EstimateReport, PredictReport, Source, TableReport,
    VerbalizeReport,
};

/// Scenario name that makes `verbalize` sweep the whole catalog.
pub const ALL_SCENARIOS: &str = "all";

#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: CommandName,
    pub config: RunConfig,
    pub out: PathBuf,
}

pub fn execute(inv: &Invocation) -> Result<Vec<PathBuf>> {
    let cfg = &inv.config;
    if let Some(declared) = cfg.command {
        if declared != inv.command {
            return Err(invalid(format!(
                "config is for `{}` but `{}` was invoked",
                declared.as_str(),
                inv.command.as_str()
            )));
        }
    }
    let name = cfg.scenario.as_deref().ok_or_else(|| {
        invalid("no scenario given (use --scenario or the config's scenario key)")
    })?;

    if name == ALL_SCENARIOS {
        if inv.command != CommandName::Verbalize {
            return Err(invalid("scenario `all` is only valid for verbalize"));
        }
        if cfg.analysis.input.is_some() {
            return Err(invalid(
                "analysis.input cannot be combined with scenario `all`",
            ));
        }
        let vcfg = cfg.verbalization_config()?;
        create_out(&inv.out)?;
        return catalog_table(&vcfg, &inv.out);
    }

    let overrides = cfg.scenario_overrides()?;
    let scenario = build_scenario(name, &overrides).map_err(|e| invalid(e.to_string()))?;
    if inv.command == CommandName::Simulate && cfg.analysis.input.is_some() {
        return Err(invalid("analysis.input is not used by simulate"));
    }
    match inv.command {
        CommandName::Simulate => {
            create_out(&inv.out)?;
            let (_, traj) = scenario.continuous().context("simulation failed")?;
            let path = inv.out.join("trajectory.csv");
            write_trajectory(&traj, &path, Some(name), Some(seed(&scenario)))?;
            Ok(vec![path.clone(), crate::io::metadata_path(&path)])
        }
        CommandName::Estimate => {
            let (game, traj, source) = analysed(&scenario, cfg)?;
            create_out(&inv.out)?;
            let est = estimate_epsilon(&traj, &game).context("ε estimation failed")?;
            let path = inv.out.join("estimate.json");
            write_json(&path, &EstimateReport::new(source, &est))?;
            Ok(vec![path])
        }
        CommandName::Predict => predict(&scenario, cfg, &inv.out),
        CommandName::Dialogue => {
            let Scenario::Dialogue(d) = &scenario else {
                return Err(invalid(format!(
                    "scenario `{name}` is not a dialogue scenario"
                )));
            };
            if cfg.analysis.input.is_some() {
                return Err(invalid("analysis.input is not used by dialogue"));
            }
            create_out(&inv.out)?;
            let transcript: DialogueTranscript = d.run().context("dialogue failed")?;
            let trace = inv.out.join("dialogue_trace.csv");
            write_trajectory(&transcript.trace, &trace, Some(name), Some(d.seed))?;
            let path = inv.out.join("transcript.json");
            write_json(
                &path,
                &DialogueReport::new(source_of(&scenario, None), &transcript),
            )?;
            Ok(vec![path, trace.clone(), crate::io::metadata_path(&trace)])
        }
        CommandName::Verbalize => {
            let vcfg = cfg.verbalization_config()?;
            let (game, traj, source) = analysed(&scenario, cfg)?;
            create_out(&inv.out)?;
            let result = verbalize(&traj, &game, &vcfg).context("verbalization failed")?;
            let path = inv.out.join("verbalization.json");
            write_json(&path, &VerbalizeReport::new(source, &result))?;
            Ok(vec![path])
        }
    }
}

fn create_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))
}

fn seed(s: &Scenario) -> u64 {
    match s {
        Scenario::Game(g) => g.seed,
        Scenario::Dialogue(d) => d.seed,
    }
}

fn source_of(s: &Scenario, input: Option<&Path>) -> Source {
    Source {
        scenario: s.name().to_string(),
        seed: Some(seed(s)),
        input: input.map(|p| p.display().to_string()),
    }
}

fn game_of(s: &Scenario) -> &GameDefinition {
    match s {
        Scenario::Game(g) => &g.game,
        Scenario::Dialogue(d) => d.definition.game(),
    }
}

fn free_controls(s: &Scenario) -> &[SignalRef; 2] {
    match s {
        Scenario::Game(g) => &g.u_free,
        Scenario::Dialogue(d) => &d.u_free,
    }
}

/// Rejects games whose feedbacks do not admit ε-recovery.
fn check_recovery(game: &GameDefinition) -> Result<()> {
    for (i, supported) in game.recovery_supported().into_iter().enumerate() {
        if game.feedback(i).as_affine().is_none() {
            return Err(invalid(format!(
                "player {} feedback is not affine; ε-recovery unsupported",
                i + 1
            )));
        }
        if !supported {
            return Err(invalid(format!(
                "player {} ε-gain R is rank deficient; ε-recovery unsupported",
                i + 1
            )));
        }
    }
    Ok(())
}

fn check_dims(game: &GameDefinition, traj: &Trajectory) -> Result<()> {
    let d = game.dims();
    let widths = [
        ("phi", d.state, traj.phi()[0].len()),
        ("xi", d.intention, traj.xi()[0].len()),
        ("u1", d.controls[0], traj.u_realized(0)[0].len()),
        ("u2", d.controls[1], traj.u_realized(1)[0].len()),
        ("ufree1", d.controls[0], traj.u_free(0)[0].len()),
        ("ufree2", d.controls[1], traj.u_free(1)[0].len()),
    ];
    for (what, expected, got) in widths {
        if expected != got {
            return Err(invalid(format!(
                "input has {got} {what}_* columns but the scenario game expects {expected}"
            )));
        }
    }
    Ok(())
}

/// The scenario's game and the trajectory to analyse: ingested when
/// `analysis.input` is set, simulated otherwise.
fn analysed(scenario: &Scenario, cfg: &RunConfig) -> Result<(GameDefinition, Trajectory, Source)> {
    let game = game_of(scenario).clone();
    check_recovery(&game)?;
    match &cfg.analysis.input {
        Some(input) => {
            let traj = read_trajectory(input)?;
            check_dims(&game, &traj)?;
            Ok((game, traj, source_of(scenario, Some(input))))
        }
        None => {
            let (_, traj) = scenario.continuous().context("simulation failed")?;
            Ok((game, traj, source_of(scenario, None)))
        }
    }
}

fn predict(scenario: &Scenario, cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let (default_anchors, default_horizon) = match scenario {
        Scenario::Game(g) => (g.anchors.clone(), Some(g.horizon)),
        Scenario::Dialogue(_) => (Vec::new(), None),
    };
    let anchors = cfg.analysis.anchors.clone().unwrap_or(default_anchors);
    let horizon = cfg
        .analysis
        .horizon
        .or(default_horizon)
        .ok_or_else(|| invalid("analysis.horizon is required for this scenario"))?;
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(invalid(format!(
            "analysis.horizon must be positive, got {horizon}"
        )));
    }
    let (game, traj, source) = analysed(scenario, cfg)?;
    create_out(out)?;
    let entries = anchors
        .iter()
        .map(
            |&a| match freeze_and_predict(&game, &traj, a, horizon, free_controls(scenario)) {
                Ok(r) => AnchorEntry::ok(&r),
                Err(e) => AnchorEntry::failed(a, &e),
            },
        )
        .collect();
    let path = out.join("prediction.json");
    write_json(
        &path,
        &PredictReport {
            schema_version: SCHEMA_VERSION,
            source,
            horizon,
            anchors: entries,
        },
    )?;
    Ok(vec![path])
}

fn catalog_table(
    vcfg: &igame_core::verbalization::VerbalizationConfig,
    out: &Path,
) -> Result<Vec<PathBuf>> {
    let rows = verbalizability_table(vcfg).context("catalog verbalization failed")?;
    let text = out.join("verbalizability_table.txt");
    std::fs::write(&text, render_table(&rows, vcfg.score_threshold))
        .with_context(|| format!("writing {}", text.display()))?;
    let json = out.join("verbalizability_table.json");
    write_json(
        &json,
        &TableReport {
            schema_version: SCHEMA_VERSION,
            threshold: vcfg.score_threshold,
            rows: &rows,
        },
    )?;
    Ok(vec![text, json])
}
