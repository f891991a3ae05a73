//! Cartesian parameter sweeps over a template scenario.
//!
//! Grid spec: `key=v1,v2;key=v1,v2`, keys as in config files. Values of
//! `init.segments` contain commas, so its alternatives are separated by `|`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use nlwr_core::config::{resolved_pairs, KEYS};
use nlwr_core::{load_config, ScenarioConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::runner::{run_config, RunManifest};

pub const INDEX: &str = "index.csv";

/// Parsed grid: keys in the order given, each with its alternatives.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub axes: Vec<(String, Vec<String>)>,
}

impl SweepGrid {
    pub fn parse(spec: &str) -> CliResult<Self> {
        let mut axes: Vec<(String, Vec<String>)> = Vec::new();
        for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, values) = part.split_once('=').ok_or_else(|| {
                CliError::validation(format!("grid entry `{part}` needs `key=values`"))
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) || key == "base" {
                return Err(CliError::validation(format!("unknown sweep key `{key}`")));
            }
            if axes.iter().any(|(k, _)| k == key) {
                return Err(CliError::validation(format!(
                    "sweep key `{key}` given twice"
                )));
            }
            let sep = if key == "init.segments" { '|' } else { ',' };
            let values: Vec<String> = values
                .split(sep)
                .map(|v| v.trim().to_string())
                .filter(|v| !v.is_empty())
                .collect();
            if values.is_empty() {
                return Err(CliError::validation(format!(
                    "sweep key `{key}` has no values"
                )));
            }
            axes.push((key.to_string(), values));
        }
        if axes.is_empty() {
            return Err(CliError::validation("empty sweep grid"));
        }
        Ok(Self { axes })
    }

    /// All combinations, last axis varying fastest.
    pub fn points(&self) -> Vec<Vec<(String, String)>> {
        let mut points: Vec<Vec<(String, String)>> = vec![Vec::new()];
        for (key, values) in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push((key.clone(), v.clone()));
                        q
                    })
                })
                .collect();
        }
        points
    }
}

/// Template with `overrides` applied, re-parsed and validated.
pub fn apply(
    template: &ScenarioConfig,
    overrides: &[(String, String)],
) -> CliResult<ScenarioConfig> {
    let mut pairs: BTreeMap<&str, String> = resolved_pairs(template)?.into_iter().collect();
    for (k, v) in overrides {
        let key = KEYS
            .iter()
            .find(|known| *known == k)
            .ok_or_else(|| CliError::validation(format!("unknown sweep key `{k}`")))?;
        pairs.insert(key, v.clone());
    }
    let text: String = pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    Ok(load_config(&text)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub index: usize,
    pub dir: PathBuf,
    pub overrides: Vec<(String, String)>,
    pub exit_status: i32,
    pub error: Option<String>,
    pub manifest: Option<RunManifest>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn index_csv(grid: &SweepGrid, entries: &[SweepEntry]) -> String {
    let mut out = String::from("run,dir,exit_status");
    for (k, _) in &grid.axes {
        out.push(',');
        out.push_str(&csv_field(k));
    }
    out.push_str(",lnL0,lnL_end,wall_time_s,error\n");
    for e in entries {
        let name = e
            .dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        out.push_str(&format!("{},{},{}", e.index, name, e.exit_status));
        for (_, v) in &e.overrides {
            out.push(',');
            out.push_str(&csv_field(v));
        }
        let summary = e.manifest.as_ref().and_then(|m| m.summary.as_ref());
        let (l0, lend) = summary
            .map(|s| (s.ln_l0, s.ln_l_end))
            .unwrap_or((f64::NAN, f64::NAN));
        let wall = e
            .manifest
            .as_ref()
            .map(|m| m.wall_time_s)
            .unwrap_or(f64::NAN);
        out.push_str(&format!(
            ",{l0},{lend},{wall},{}\n",
            csv_field(e.error.as_deref().unwrap_or(""))
        ));
    }
    out
}

/// Runs every grid point into `out/run_NNN` on `jobs` worker threads. A
/// failing point is recorded in its entry and in `index.csv`; the others
/// still run. The index is written once, in grid order, after all runs end.
pub fn sweep(
    template: &ScenarioConfig,
    grid: &SweepGrid,
    out: &Path,
    jobs: usize,
) -> CliResult<Vec<SweepEntry>> {
    let points = grid.points();
    fs::create_dir_all(out)?;
    let width = points.len().saturating_sub(1).to_string().len().max(3);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::runtime(format!("cannot start worker pool: {e}")))?;
    let entries: Vec<SweepEntry> = pool.install(|| {
        points
            .into_par_iter()
            .enumerate()
            .map(|(index, overrides)| {
                let dir = out.join(format!("run_{index:0width$}"));
                let outcome = apply(template, &overrides).and_then(|cfg| {
                    let mut cfg = cfg;
                    cfg.name = format!("{}-{index:0width$}", template.name);
                    run_config(&cfg, &dir)
                });
                let (exit_status, error, manifest) = match outcome {
                    Ok(m) => (0, None, Some(m)),
                    Err(e) => (e.exit_code(), Some(e.message), None),
                };
                SweepEntry {
                    index,
                    dir,
                    overrides,
                    exit_status,
                    error,
                    manifest,
                }
            })
            .collect()
    });
    fs::write(out.join(INDEX), index_csv(grid, &entries))?;
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_expands_in_order() {
        let g =
            SweepGrid::parse("kernel.kind=constant,linear,concave; grid.dx=0.01,0.005").unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(
            pts[0],
            vec![
                ("kernel.kind".into(), "constant".into()),
                ("grid.dx".into(), "0.01".into())
            ]
        );
        assert_eq!(pts[5][0].1, "concave");
        assert_eq!(pts[5][1].1, "0.005");
    }

    #[test]
    fn bad_grids_are_rejected() {
        for spec in ["", " ; ", "kernel.kind", "speed=1,2", "eta=", "eta=1;eta=2"] {
            let err = SweepGrid::parse(spec).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{spec}");
        }
    }

    #[test]
    fn segments_use_bar_separator() {
        let g = SweepGrid::parse("init.segments=(0, 1), (inf, 0.5)|(0, 0.8), (inf, 0.5)").unwrap();
        assert_eq!(g.axes[0].1.len(), 2);
        let t = ScenarioConfig::preset("fig1-const").unwrap();
        let cfg = apply(&t, &g.points()[1]).unwrap();
        assert_eq!(cfg.init.sup(), 0.8);
    }

    #[test]
    fn failures_are_isolated() {
        let out = tempfile::tempdir().unwrap();
        let mut t = ScenarioConfig::preset("fig1-const").unwrap();
        t.grid.t_end = 0.5;
        t.grid.dx = 0.05;
        // vbar = 1 is infeasible, the other point runs
        let g = SweepGrid::parse("vbar=0.5,1").unwrap();
        let entries = sweep(&t, &g, out.path(), 2).unwrap();
        assert_eq!(entries[0].exit_status, 0);
        assert_eq!(entries[1].exit_status, 1);
        let index = fs::read_to_string(out.path().join(INDEX)).unwrap();
        let lines: Vec<&str> = index.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("run,dir,exit_status,vbar,"));
        assert!(lines[1].starts_with("0,run_000,0,0.5,"));
        assert!(lines[2].starts_with("1,run_001,1,1,"));
        assert!(out.path().join("run_000/manifest.json").is_file());
    }

    #[test]
    fn kernel_sweep_matches_single_runs() {
        let out = tempfile::tempdir().unwrap();
        let mut t = ScenarioConfig::preset("fig1-const").unwrap();
        t.grid.t_end = 1.0;
        t.grid.dx = 0.05;
        let g = SweepGrid::parse("kernel.kind=constant,linear,concave").unwrap();
        let entries = sweep(&t, &g, out.path(), 3).unwrap();
        assert!(entries.iter().all(|e| e.exit_status == 0));
        let single = tempfile::tempdir().unwrap();
        let mut lin = t.clone();
        lin.kernel = nlwr_core::Kernel::linear(1.0).unwrap();
        run_config(&lin, single.path()).unwrap();
        assert_eq!(
            fs::read(out.path().join("run_001/diagnostics.csv")).unwrap(),
            fs::read(single.path().join("diagnostics.csv")).unwrap()
        );
    }
}
