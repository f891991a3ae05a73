//! Single runs: resolve a preset or config file, simulate, write artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use nlwr_core::config::resolved_pairs;
use nlwr_core::diagnostics::check_mass;
use nlwr_core::{
    load_config, run_macro, run_micro, to_config_text, ScenarioConfig, SolverKind, PRESETS,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";
pub const DIAGNOSTICS: &str = "diagnostics.csv";
pub const DIAGNOSTICS_RAW: &str = "diagnostics_raw.csv";
pub const RESOLVED: &str = "resolved.cfg";
pub const SNAPSHOT_DIR: &str = "snapshots";

/// Headline numbers of a finished run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub outputs: usize,
    pub ln_l0: f64,
    pub ln_l_end: f64,
    /// Macro only: time steps taken.
    pub steps: Option<usize>,
    /// Macro only: worst per-step mass defect, relative to the initial mass.
    pub worst_step_mass_residual: Option<f64>,
    pub mass_audit_passed: Option<bool>,
    /// Micro only.
    pub vehicles: Option<usize>,
    pub crossings: Option<usize>,
    pub jumps: Option<usize>,
    pub attributed_jumps: Option<usize>,
}

/// Everything needed to audit or re-run a run directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    pub solver: String,
    pub kernel: String,
    /// Every configuration key with its materialized value.
    pub config: BTreeMap<String, String>,
    /// Same content in the config file format; loadable with `run`.
    pub config_text: String,
    pub rhobar: f64,
    pub rho_min0: f64,
    pub rho_max0: f64,
    pub vprime_max: f64,
    /// Paths relative to the run directory.
    pub artifacts: Vec<String>,
    pub wall_time_s: f64,
    pub exit_status: i32,
    pub error: Option<String>,
    pub summary: Option<RunSummary>,
}

impl RunManifest {
    pub fn read(dir: &Path) -> CliResult<Self> {
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::check(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::check(format!("corrupt {}: {e}", path.display())))
    }
}

/// A preset name or the path of a config file.
pub fn resolve(input: &str) -> CliResult<ScenarioConfig> {
    if PRESETS.contains(&input) {
        let cfg = ScenarioConfig::preset(input)?;
        cfg.validate()?;
        return Ok(cfg);
    }
    let path = Path::new(input);
    if !path.exists() {
        return Err(CliError::validation(format!(
            "`{input}` is neither a preset ({}) nor an existing file",
            PRESETS.join(", ")
        )));
    }
    let text = fs::read_to_string(path)?;
    load_config(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

fn write(dir: &Path, name: &str, body: &str, artifacts: &mut Vec<String>) -> CliResult<()> {
    fs::write(dir.join(name), body)?;
    artifacts.push(name.to_string());
    Ok(())
}

fn base_manifest(cfg: &ScenarioConfig) -> CliResult<RunManifest> {
    let rho_min0 = cfg.rho_min();
    Ok(RunManifest {
        scenario: cfg.name.clone(),
        solver: cfg.solver.as_str().into(),
        kernel: cfg.kernel.kind().to_string(),
        config: resolved_pairs(cfg)?
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        config_text: to_config_text(cfg)?,
        rhobar: cfg.rhobar()?,
        rho_min0,
        rho_max0: cfg.init.sup(),
        vprime_max: cfg.velocity.vprime_max(rho_min0)?,
        artifacts: Vec::new(),
        wall_time_s: 0.0,
        exit_status: 0,
        error: None,
        summary: None,
    })
}

fn simulate(cfg: &ScenarioConfig, dir: &Path, manifest: &mut RunManifest) -> CliResult<()> {
    let artifacts = &mut manifest.artifacts;
    match cfg.solver {
        SolverKind::Macro => {
            let run = run_macro(cfg)?;
            let d = &run.diagnostics;
            write(dir, DIAGNOSTICS, &d.to_csv(), artifacts)?;
            write(dir, DIAGNOSTICS_RAW, &d.to_raw_csv(), artifacts)?;
            if cfg.snapshots {
                fs::create_dir_all(dir.join(SNAPSHOT_DIR))?;
                for s in &run.snapshots {
                    let name = format!("{SNAPSHOT_DIR}/{}", s.file_name());
                    write(dir, &name, &s.to_csv(&run.grid), artifacts)?;
                }
            }
            let mass = check_mass(run.initial_mass, &run.flux_log);
            let ln_l = d.ln_l();
            manifest.summary = Some(RunSummary {
                outputs: d.len(),
                ln_l0: ln_l.first().copied().unwrap_or(f64::NAN),
                ln_l_end: ln_l.last().copied().unwrap_or(f64::NAN),
                steps: Some(run.flux_log.len()),
                worst_step_mass_residual: Some(mass.relative),
                mass_audit_passed: Some(mass.passed),
                vehicles: None,
                crossings: None,
                jumps: None,
                attributed_jumps: None,
            });
        }
        SolverKind::Micro => {
            let run = if cfg.trajectory {
                let mut file =
                    std::io::BufWriter::new(fs::File::create(dir.join("trajectory.csv"))?);
                let run = run_micro(cfg, Some(&mut file))?;
                std::io::Write::flush(&mut file)?;
                artifacts.push("trajectory.csv".into());
                run
            } else {
                run_micro(cfg, None)?
            };
            let d = run.diagnostics();
            write(dir, DIAGNOSTICS, &d.to_csv(), artifacts)?;
            write(dir, DIAGNOSTICS_RAW, &d.to_raw_csv(), artifacts)?;
            write(dir, "jumps.csv", &run.jumps_csv(), artifacts)?;
            write(dir, "crossings.csv", &run.crossings_csv(), artifacts)?;
            let ln_l = d.ln_l();
            manifest.summary = Some(RunSummary {
                outputs: d.len(),
                ln_l0: ln_l.first().copied().unwrap_or(f64::NAN),
                ln_l_end: ln_l.last().copied().unwrap_or(f64::NAN),
                steps: None,
                worst_step_mass_residual: None,
                mass_audit_passed: None,
                vehicles: Some(run.vehicles),
                crossings: Some(run.crossings.len()),
                jumps: Some(run.jumps.len()),
                attributed_jumps: Some(run.jumps.iter().filter(|j| j.attributed()).count()),
            });
        }
    }
    Ok(())
}

/// Runs `cfg` into `dir`. The manifest is written even when the solver
/// fails, carrying the error and the exit status.
pub fn run_config(cfg: &ScenarioConfig, dir: &Path) -> CliResult<RunManifest> {
    cfg.validate()?;
    fs::create_dir_all(dir)?;
    let mut manifest = base_manifest(cfg)?;
    let start = Instant::now();
    let outcome = fs::write(dir.join(RESOLVED), &manifest.config_text)
        .map_err(CliError::from)
        .and_then(|()| {
            manifest.artifacts.push(RESOLVED.into());
            simulate(cfg, dir, &mut manifest)
        });
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    if let Err(e) = &outcome {
        manifest.exit_status = e.exit_code();
        manifest.error = Some(e.message.clone());
    }
    fs::write(dir.join(MANIFEST), serde_json::to_string_pretty(&manifest)?)?;
    outcome.map(|()| manifest)
}

/// `run <preset|config> --out <dir> [--snapshots]`.
pub fn run(input: &str, dir: &Path, snapshots: bool) -> CliResult<RunManifest> {
    let mut cfg = resolve(input)?;
    cfg.snapshots |= snapshots;
    run_config(&cfg, dir)
}
