//! Trajectory CSV files and their JSON metadata sidecars.
//!
//! Column order: `time`, `phi_*`, `xi_*`, `u1_*`, `u2_*`, `eps1_*`, `eps2_*`,
//! `ufree1_*`, `ufree2_*`. The ε columns are present only when the true ε is
//! known. Values use 17 significant digits so that reading reproduces the
//! written `f64`s exactly.

use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use igame_core::{Trajectory, Vector};
use serde::{Deserialize, Serialize};

use crate::error::invalid;

pub const SCHEMA_VERSION: u32 = 1;

/// Column groups in file order, with whether ingestion requires them.
const GROUPS: [(&str, bool); 8] = [
    ("phi", true),
    ("xi", true),
    ("u1", true),
    ("u2", true),
    ("eps1", false),
    ("eps2", false),
    ("ufree1", true),
    ("ufree2", true),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetadata {
    pub schema_version: u32,
    pub scenario: Option<String>,
    pub seed: Option<u64>,
    pub t0: f64,
    pub dt: f64,
    pub rows: usize,
    pub columns: Vec<String>,
}

/// `trajectory.csv` → `trajectory.meta.json`.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

fn group_columns(traj: &Trajectory) -> Vec<(&'static str, Vec<&[Vector]>)> {
    let mut groups: Vec<(&'static str, Vec<&[Vector]>)> = vec![
        ("phi", vec![traj.phi()]),
        ("xi", vec![traj.xi()]),
        ("u1", vec![traj.u_realized(0)]),
        ("u2", vec![traj.u_realized(1)]),
    ];
    if let (Some(e1), Some(e2)) = (traj.epsilon_truth(0), traj.epsilon_truth(1)) {
        groups.push(("eps1", vec![e1]));
        groups.push(("eps2", vec![e2]));
    }
    groups.push(("ufree1", vec![traj.u_free(0)]));
    groups.push(("ufree2", vec![traj.u_free(1)]));
    groups
}

pub fn column_names(traj: &Trajectory) -> Vec<String> {
    let mut names = vec!["time".to_string()];
    for (prefix, series) in group_columns(traj) {
        let width = series[0].first().map_or(0, |v| v.len());
        names.extend((0..width).map(|k| format!("{prefix}_{k}")));
    }
    names
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the CSV and its metadata sidecar.
pub fn write_trajectory(
    traj: &Trajectory,
    csv_path: &Path,
    scenario: Option<&str>,
    seed: Option<u64>,
) -> Result<TrajectoryMetadata> {
    let columns = column_names(traj);
    let mut w = csv::Writer::from_path(csv_path)
        .with_context(|| format!("creating {}", csv_path.display()))?;
    w.write_record(&columns)?;
    let groups = group_columns(traj);
    let mut row = Vec::with_capacity(columns.len());
    for n in 0..traj.len() {
        row.clear();
        row.push(fmt(traj.time(n)));
        for (_, series) in &groups {
            row.extend(series[0][n].iter().map(|&x| fmt(x)));
        }
        w.write_record(&row)?;
    }
    w.flush()
        .with_context(|| format!("writing {}", csv_path.display()))?;

    let meta = TrajectoryMetadata {
        schema_version: SCHEMA_VERSION,
        scenario: scenario.map(str::to_string),
        seed,
        t0: traj.t0(),
        dt: traj.dt(),
        rows: traj.len(),
        columns,
    };
    write_json(&metadata_path(csv_path), &meta)?;
    Ok(meta)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    std::io::Write::flush(&mut w).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Column indices of `prefix_0, prefix_1, …` in header order.
fn locate(header: &csv::StringRecord, prefix: &str) -> Result<Vec<usize>> {
    let mut found = Vec::new();
    for (pos, name) in header.iter().enumerate() {
        let Some(k) = name.strip_prefix(prefix).and_then(|r| r.strip_prefix('_')) else {
            continue;
        };
        let k: usize = k
            .parse()
            .map_err(|_| invalid(format!("malformed column name {name:?}")))?;
        found.push((k, pos));
    }
    found.sort_unstable();
    if found.iter().enumerate().any(|(i, &(k, _))| i != k) {
        return Err(invalid(format!(
            "columns {prefix}_* must be numbered 0, 1, … without gaps"
        )));
    }
    Ok(found.into_iter().map(|(_, pos)| pos).collect())
}

/// Reads a trajectory CSV. Grid parameters come from the metadata sidecar when
/// present and are otherwise inferred from the time column.
pub fn read_trajectory(csv_path: &Path) -> Result<Trajectory> {
    let file = File::open(csv_path)
        .map_err(|e| invalid(format!("cannot open {}: {e}", csv_path.display())))?;
    let mut reader = csv::Reader::from_reader(file);
    let header = reader
        .headers()
        .map_err(|e| invalid(format!("{}: unreadable header: {e}", csv_path.display())))?
        .clone();
    let time_col = header
        .iter()
        .position(|h| h == "time")
        .ok_or_else(|| invalid(format!("{}: missing time column", csv_path.display())))?;
    let mut cols = Vec::with_capacity(GROUPS.len());
    for (prefix, required) in GROUPS {
        let idx = locate(&header, prefix)?;
        if required && idx.is_empty() {
            let what = match prefix {
                "u1" | "u2" => "realized-control",
                "ufree1" | "ufree2" => "free-control",
                _ => "state",
            };
            return Err(invalid(format!(
                "{}: missing {what} columns {prefix}_*",
                csv_path.display()
            )));
        }
        cols.push(idx);
    }
    if cols[4].is_empty() != cols[5].is_empty() {
        return Err(invalid("eps1_* and eps2_* columns must appear together"));
    }

    let mut times = Vec::new();
    let mut data: Vec<Vec<Vector>> = vec![Vec::new(); GROUPS.len()];
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| invalid(format!("{}: {e}", csv_path.display())))?;
        let parse = |pos: usize| -> Result<f64> {
            let field = record.get(pos).unwrap_or("");
            field.trim().parse::<f64>().map_err(|_| {
                invalid(format!(
                    "{}: row {}: cannot parse {field:?}",
                    csv_path.display(),
                    line + 1
                ))
            })
        };
        times.push(parse(time_col)?);
        for (g, idx) in cols.iter().enumerate() {
            if idx.is_empty() {
                continue;
            }
            let v = idx.iter().map(|&p| parse(p)).collect::<Result<Vec<_>>>()?;
            data[g].push(Vector::from_vec(v));
        }
    }
    if times.len() < 2 {
        return Err(invalid(format!(
            "{}: need at least 2 rows",
            csv_path.display()
        )));
    }

    let meta_path = metadata_path(csv_path);
    let (t0, dt) = if meta_path.exists() {
        let text = std::fs::read_to_string(&meta_path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", meta_path.display())))?;
        let meta: TrajectoryMetadata = serde_json::from_str(&text)
            .map_err(|e| invalid(format!("invalid metadata {}: {e}", meta_path.display())))?;
        if meta.schema_version != SCHEMA_VERSION {
            return Err(invalid(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                meta.schema_version
            )));
        }
        (meta.t0, meta.dt)
    } else {
        (
            times[0],
            (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64,
        )
    };
    for (n, &t) in times.iter().enumerate() {
        let expected = t0 + n as f64 * dt;
        if (t - expected).abs() > 1e-9 * (1.0 + expected.abs()) {
            return Err(invalid(format!(
                "{}: time column is not a uniform grid (row {}: {t} vs {expected})",
                csv_path.display(),
                n + 1
            )));
        }
    }

    let mut data = data.into_iter();
    let mut next = || data.next().expect("one series per group");
    let (phi, xi, u1, u2, e1, e2, f1, f2) = (
        next(),
        next(),
        next(),
        next(),
        next(),
        next(),
        next(),
        next(),
    );
    let eps = if e1.is_empty() { None } else { Some([e1, e2]) };
    Trajectory::from_parts(t0, dt, phi, xi, [f1, f2], [u1, u2], eps)
        .map_err(|e| invalid(format!("{}: {e}", csv_path.display())))
}
