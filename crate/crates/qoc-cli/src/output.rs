//! Deterministic file outputs and their parsers.
//!
//! Fixed file names per run directory: `trajectory.csv`, `observables.csv`,
//! `pulse.csv`, `convergence.csv`, `summary.json`, `scan.csv`,
//! `controllability.json`. All floating-point columns carry 15 significant
//! digits; identical configs produce byte-identical files except for the
//! convergence log's `seconds` column.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use qoc_core::controllability::{ConnectivityReport, LieClosureReport};
use qoc_core::dynamics::{ObservableRow, Trajectory};
use qoc_core::krotov::{IterationStats, OptimizationRecord, ScanRow};
use qoc_core::ControlField;

use crate::{CliError, CliResult};

/// 15 significant digits, scientific notation; round-trips through
/// `str::parse::<f64>` to 15-digit accuracy.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.14e}")
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("writing {}: {e}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

/// `t,u_1[,u_2,...]` on the control midpoint grid.
pub fn pulse_csv(field: &ControlField) -> String {
    let mut out = String::from("t");
    for c in 0..field.n_controls() {
        write!(out, ",u_{}", c + 1).unwrap();
    }
    out.push('\n');
    for i in 0..field.grid().n_steps() {
        write!(out, "{}", fmt_f64(field.grid().control_time(i))).unwrap();
        for c in 0..field.n_controls() {
            write!(out, ",{}", fmt_f64(field.samples(c)[i])).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parse a pulse CSV back into per-control sample rows.
pub fn parse_pulse_csv(text: &str) -> CliResult<Vec<Vec<f64>>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Config("pulse file is empty".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first() != Some(&"t") || cols.len() < 2 {
        return Err(CliError::Config(format!(
            "pulse file header must be t,u_1[,u_2,...], got {header}"
        )));
    }
    let n_controls = cols.len() - 1;
    let mut samples = vec![Vec::new(); n_controls];
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n_controls + 1 {
            return Err(CliError::Config(format!(
                "pulse file line {}: expected {} columns, got {}",
                lineno + 2,
                n_controls + 1,
                fields.len()
            )));
        }
        for (f, row) in fields[1..].iter().zip(samples.iter_mut()) {
            let v: f64 = f.parse().map_err(|_| {
                CliError::Config(format!("pulse file line {}: bad number {f}", lineno + 2))
            })?;
            row.push(v);
        }
    }
    Ok(samples)
}

pub fn read_pulse_csv(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read pulse file {}: {e}", path.display())))?;
    parse_pulse_csv(&text)
}

/// `t,p_0,...,p_{d-1},purity[,fidelity]`, one row per state-grid point.
pub fn observables_csv(rows: &[ObservableRow]) -> String {
    let mut out = String::from("t");
    let dim = rows.first().map_or(0, |r| r.populations.len());
    for k in 0..dim {
        write!(out, ",p_{k}").unwrap();
    }
    out.push_str(",purity");
    let with_fidelity = rows.first().is_some_and(|r| r.fidelity.is_some());
    if with_fidelity {
        out.push_str(",fidelity");
    }
    out.push('\n');
    for row in rows {
        write!(out, "{}", fmt_f64(row.t)).unwrap();
        for p in &row.populations {
            write!(out, ",{}", fmt_f64(*p)).unwrap();
        }
        write!(out, ",{}", fmt_f64(row.purity)).unwrap();
        if let Some(f) = row.fidelity {
            write!(out, ",{}", fmt_f64(f)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Full state dump: `t` followed by re/im of every entry, row-major.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let dim = traj.states().first().map_or(0, |s| s.dim());
    let mut out = String::from("t");
    for i in 0..dim {
        for j in 0..dim {
            write!(out, ",re_{i}_{j},im_{i}_{j}").unwrap();
        }
    }
    out.push('\n');
    for (i, state) in traj.states().iter().enumerate() {
        write!(out, "{}", fmt_f64(traj.grid().state_time(i))).unwrap();
        for r in 0..dim {
            for c in 0..dim {
                let z = state.matrix()[(r, c)];
                write!(out, ",{},{}", fmt_f64(z.re), fmt_f64(z.im)).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

/// `iter,F,dF,J_spec,max_du,seconds`.
pub fn convergence_csv(stats: &[IterationStats]) -> String {
    let mut out = String::from("iter,F,dF,J_spec,max_du,seconds\n");
    for s in stats {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            s.iteration,
            fmt_f64(s.fidelity),
            fmt_f64(s.delta_f),
            fmt_f64(s.spectral_penalty),
            fmt_f64(s.max_delta_u),
            fmt_f64(s.seconds)
        )
        .unwrap();
    }
    out
}

/// `T,F,iters,reason`; failed entries carry `NaN` in F and the reason.
pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("T,F,iters,reason\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(r.t_final),
            fmt_f64(r.fidelity),
            r.iterations,
            r.failure.as_deref().unwrap_or("")
        )
        .unwrap();
    }
    out
}

/// Machine-readable optimization summary.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Summary {
    pub final_fidelity: f64,
    pub iterations: usize,
    pub converged: bool,
    pub monotone: bool,
    pub reason: String,
    pub spectral_warning: bool,
    pub lambda_final: f64,
    pub lambda_adaptations: usize,
}

impl Summary {
    pub fn from_record(record: &OptimizationRecord) -> Self {
        Summary {
            final_fidelity: record.final_fidelity(),
            iterations: record.n_iterations(),
            converged: record.converged,
            monotone: record.monotone,
            reason: record.reason.to_string(),
            spectral_warning: record.spectral_warning,
            lambda_final: record.lambda_final,
            lambda_adaptations: record.lambda_adaptations,
        }
    }
}

/// Machine-readable controllability report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ControllabilityJson {
    pub generated_dimension: usize,
    pub full_dimension: usize,
    pub controllable: bool,
    pub generations: usize,
    pub depth_capped: bool,
    pub caveat: String,
    pub components: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl ControllabilityJson {
    pub fn new(lie: &LieClosureReport, conn: &ConnectivityReport) -> Self {
        ControllabilityJson {
            generated_dimension: lie.generated_dimension,
            full_dimension: lie.full_dimension,
            controllable: lie.controllable,
            generations: lie.generations,
            depth_capped: lie.depth_capped,
            caveat: LieClosureReport::caveat().to_string(),
            components: conn.components.clone(),
            edges: conn.edges.clone(),
        }
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(format!("serializing JSON: {e}")))?;
    s.push('\n');
    Ok(s)
}
