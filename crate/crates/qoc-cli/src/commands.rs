//! The four batch commands. Each builds everything it needs from the loaded
//! config, computes in memory, and writes all files at the end.

use std::path::{Path, PathBuf};

use qoc_core::dynamics::{observables, propagate_forward};
use qoc_core::krotov::{krotov_iterate, scan_single, ScanRow, SystemClock};

use crate::config::{controllability_reports, LoadedConfig};
use crate::output;
use crate::{CliError, CliResult};

/// Execution settings shared by all commands.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub out_dir: PathBuf,
    pub threads: usize,
    pub verbose: bool,
}

impl RunContext {
    /// Resolve the worker count: 0 means auto-detect.
    pub fn worker_count(&self) -> usize {
        if self.threads == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            self.threads
        }
    }

    fn ensure_out_dir(&self) -> CliResult<()> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| CliError::Runtime(format!("creating {}: {e}", self.out_dir.display())))
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn say(&self, msg: &str) {
        if self.verbose {
            eprintln!("{msg}");
        }
    }
}

/// Resolve the output directory from the CLI flag or the config.
pub fn resolve_out_dir(loaded: &LoadedConfig, flag: Option<&Path>) -> CliResult<PathBuf> {
    if let Some(dir) = flag {
        return Ok(dir.to_path_buf());
    }
    match &loaded.config.output_dir {
        Some(rel) => Ok(loaded.resolve(rel)),
        None => Err(CliError::Config(
            "no output directory: set `output_dir` in the config or pass --out".into(),
        )),
    }
}

/// Propagate the initial state under the guess field (zero field when no
/// guess is given); writes `trajectory.csv` and `observables.csv`.
pub fn cmd_propagate(loaded: &LoadedConfig, ctx: &RunContext) -> CliResult<()> {
    let (gen, _model) = loaded.generator()?;
    let grid = loaded.grid()?;
    let rho0 = loaded.initial_state(&gen)?;
    let target = loaded.target_state(&gen)?;
    let field = loaded.guess_field(&grid, gen.n_controls(), 1.0)?;
    ctx.say(&format!(
        "propagating dimension-{} system for T = {} in {} steps",
        gen.dim(),
        grid.t_final(),
        grid.n_steps()
    ));
    let traj = propagate_forward(&gen, &field, &rho0)?;
    let rows = observables(&traj, target.as_ref());
    ctx.ensure_out_dir()?;
    output::write_text(&ctx.path("trajectory.csv"), &output::trajectory_csv(&traj))?;
    output::write_text(
        &ctx.path("observables.csv"),
        &output::observables_csv(&rows),
    )?;
    ctx.say("wrote trajectory.csv, observables.csv");
    Ok(())
}

/// Run the optimizer; writes `pulse.csv`, `convergence.csv`, `summary.json`.
pub fn cmd_optimize(loaded: &LoadedConfig, ctx: &RunContext) -> CliResult<()> {
    let (gen, model) = loaded.generator()?;
    let grid = loaded.grid()?;
    let objective = loaded.objective(&gen, model.as_ref())?;
    let options = loaded.krotov_options()?;
    let constraint = loaded.spectral_constraint(&grid)?;
    let guess = loaded.guess_field(&grid, gen.n_controls(), 1.0)?;
    ctx.say(&format!(
        "optimizing: {} iterations max, lambda = {}, goal = {}",
        options.max_iterations, options.lambda, options.fidelity_goal
    ));
    let clock = SystemClock::new();
    let record = krotov_iterate(
        &gen,
        &objective,
        &guess,
        &options,
        constraint.as_ref(),
        &clock,
    )?;
    ctx.say(&format!(
        "finished after {} iterations: F = {:.6}, {}",
        record.n_iterations(),
        record.final_fidelity(),
        record.reason
    ));
    ctx.ensure_out_dir()?;
    output::write_text(&ctx.path("pulse.csv"), &output::pulse_csv(&record.field))?;
    output::write_text(
        &ctx.path("convergence.csv"),
        &output::convergence_csv(&record.iterations),
    )?;
    let summary = output::Summary::from_record(&record);
    output::write_text(
        &ctx.path("summary.json"),
        &output::to_json_pretty(&summary)?,
    )?;
    ctx.say("wrote pulse.csv, convergence.csv, summary.json");
    Ok(())
}

/// Scan over durations; writes `scan.csv`. Entries are independent
/// optimizations and may run on up to `--threads` workers; rows are always
/// written in ascending duration order.
pub fn cmd_scan(loaded: &LoadedConfig, ctx: &RunContext) -> CliResult<()> {
    let (gen, model) = loaded.generator()?;
    let objective = loaded.objective(&gen, model.as_ref())?;
    let options = loaded.krotov_options()?;
    let t_list = loaded.t_list()?;
    let n_steps = loaded.config.grid.n_steps;
    let t_ref = loaded.config.grid.t_final;
    let n_controls = gen.n_controls();

    let guess_builder = |t: f64| -> qoc_core::Result<qoc_core::ControlField> {
        let grid = qoc_core::TimeGrid::new(t, n_steps)?;
        // Parametric amplitudes scale with T_ref / T: stretching a pulse
        // while conserving its area.
        loaded
            .guess_field(&grid, n_controls, t_ref / t)
            .map_err(|e| qoc_core::Error::InvalidParameter(e.to_string()))
    };

    // Fail fast on configs whose guess cannot be built at all (e.g. file
    // guesses, which cannot be rescaled).
    guess_builder(t_list[0]).map_err(|e| CliError::Config(e.to_string()))?;

    let workers = ctx.worker_count().max(1).min(t_list.len());
    ctx.say(&format!(
        "scanning {} durations on {} worker(s)",
        t_list.len(),
        workers
    ));
    let rows: Vec<ScanRow> = if workers <= 1 {
        t_list
            .iter()
            .map(|&t| {
                run_scan_entry(
                    loaded,
                    &gen,
                    &objective,
                    &options,
                    t,
                    n_steps,
                    &guess_builder,
                )
            })
            .collect()
    } else {
        let mut rows: Vec<Option<ScanRow>> = vec![None; t_list.len()];
        let chunk = t_list.len().div_ceil(workers);
        std::thread::scope(|scope| {
            for (slot, ts) in rows.chunks_mut(chunk).zip(t_list.chunks(chunk)) {
                let gen = &gen;
                let objective = &objective;
                let options = &options;
                let guess_builder = &guess_builder;
                scope.spawn(move || {
                    for (out, &t) in slot.iter_mut().zip(ts) {
                        *out = Some(run_scan_entry(
                            loaded,
                            gen,
                            objective,
                            options,
                            t,
                            n_steps,
                            guess_builder,
                        ));
                    }
                });
            }
        });
        rows.into_iter().map(Option::unwrap).collect()
    };
    ctx.ensure_out_dir()?;
    output::write_text(&ctx.path("scan.csv"), &output::scan_csv(&rows))?;
    ctx.say("wrote scan.csv");
    Ok(())
}

fn run_scan_entry(
    loaded: &LoadedConfig,
    gen: &qoc_core::LindbladGenerator,
    objective: &qoc_core::functionals::ControlObjective,
    options: &qoc_core::krotov::KrotovOptions,
    t: f64,
    n_steps: usize,
    guess_builder: &dyn Fn(f64) -> qoc_core::Result<qoc_core::ControlField>,
) -> ScanRow {
    // Spectral filters depend on the grid; rebuild them for this duration.
    let constraint = match qoc_core::TimeGrid::new(t, n_steps)
        .map_err(|e| CliError::Config(e.to_string()))
        .and_then(|grid| loaded.spectral_constraint(&grid))
    {
        Ok(c) => c,
        Err(e) => {
            return ScanRow {
                t_final: t,
                fidelity: f64::NAN,
                iterations: 0,
                failure: Some(e.to_string()),
            }
        }
    };
    let clock = SystemClock::new();
    scan_single(
        gen,
        objective,
        t,
        guess_builder,
        options,
        constraint.as_ref(),
        &clock,
    )
}

/// Lie-rank and connectivity analysis; prints the human-readable report
/// and writes `controllability.json`.
pub fn cmd_controllability(loaded: &LoadedConfig, ctx: &RunContext) -> CliResult<()> {
    let (lie, conn) = controllability_reports(loaded)?;
    println!("{}", qoc_core::controllability::report_summary(&lie));
    println!(
        "connected components over basis states: {:?}",
        conn.components
    );
    println!(
        "note: {}",
        qoc_core::controllability::LieClosureReport::caveat()
    );
    ctx.ensure_out_dir()?;
    let json = output::ControllabilityJson::new(&lie, &conn);
    output::write_text(
        &ctx.path("controllability.json"),
        &output::to_json_pretty(&json)?,
    )?;
    ctx.say("wrote controllability.json");
    Ok(())
}
