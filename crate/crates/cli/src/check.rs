//! Audits a run directory from its files alone.

use std::fs;
use std::path::Path;

use nlwr_core::diagnostics::{parse_diagnostics_csv, DiagnosticsRow, MASS_TOL, MAX_PRINCIPLE_TOL};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::runner::{RunManifest, DIAGNOSTICS};

/// Relative slack of the decay-bound comparison.
pub const BOUND_RTOL: f64 = 1e-6;
/// Additive slack in `ln L` for the particle model's bound comparison.
pub const MICRO_BOUND_SLACK: f64 = 0.1;
/// Tolerated increase of `ln L` between outputs before `L` counts as growing.
pub const MONOTONE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckItem {
    pub name: &'static str,
    /// Hard checks decide the exit status; soft ones are reported only.
    pub hard: bool,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub dir: String,
    pub scenario: String,
    pub solver: String,
    pub kernel: String,
    pub passed: bool,
    pub checks: Vec<CheckItem>,
}

impl CheckReport {
    pub fn item(&self, name: &str) -> Option<&CheckItem> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn bound_dominance(rows: &[DiagnosticsRow], slack: f64, hard: bool) -> CheckItem {
    let mut worst = f64::NEG_INFINITY;
    let mut at = f64::NAN;
    let mut missing = 0;
    for r in rows {
        if r.ln_l.is_nan() {
            // L == 0 lies under any bound
            continue;
        }
        if r.ln_l_bound.is_nan() {
            missing += 1;
            continue;
        }
        let excess = r.ln_l - r.ln_l_bound;
        if excess > worst {
            worst = excess;
            at = r.t;
        }
    }
    let passed = missing == 0 && !(worst > slack);
    CheckItem {
        name: "bound_dominance",
        hard,
        passed,
        detail: if missing > 0 {
            format!("{missing} rows lack a bound value")
        } else {
            format!("max lnL - lnL_bound = {worst:.3e} at t = {at} (slack {slack:.3e})")
        },
    }
}

fn max_principle(rows: &[DiagnosticsRow], m: &RunManifest, hard: bool) -> CheckItem {
    let mut under = 0.0_f64;
    let mut over = 0.0_f64;
    for r in rows {
        under = under.max(m.rho_min0 - r.rho_min_obs);
        over = over.max(r.rho_max_obs - m.rho_max0);
        if r.rho_min_obs.is_nan() || r.rho_max_obs.is_nan() {
            under = f64::INFINITY;
        }
    }
    CheckItem {
        name: "max_principle",
        hard,
        passed: under <= MAX_PRINCIPLE_TOL && over <= MAX_PRINCIPLE_TOL,
        detail: format!(
            "undershoot {under:.3e} below {}, overshoot {over:.3e} above {}",
            m.rho_min0, m.rho_max0
        ),
    }
}

fn mass(rows: &[DiagnosticsRow]) -> CheckItem {
    let worst = rows
        .iter()
        .map(|r| {
            if r.mass_residual.is_nan() {
                f64::INFINITY
            } else {
                r.mass_residual.abs()
            }
        })
        .fold(0.0, f64::max);
    CheckItem {
        name: "mass",
        hard: true,
        passed: worst <= MASS_TOL,
        detail: format!("max relative mass residual {worst:.3e} (tolerance {MASS_TOL:e})"),
    }
}

fn monotone(rows: &[DiagnosticsRow]) -> CheckItem {
    let mut worst = f64::NEG_INFINITY;
    let mut at = f64::NAN;
    for w in rows.windows(2) {
        let (a, b) = (w[0].ln_l, w[1].ln_l);
        if b.is_nan() {
            continue;
        }
        let rise = if a.is_nan() { f64::INFINITY } else { b - a };
        if rise > worst {
            worst = rise;
            at = w[1].t;
        }
    }
    CheckItem {
        name: "monotone_l",
        hard: true,
        passed: !(worst > MONOTONE_TOL),
        detail: format!("largest rise of lnL between outputs {worst:.3e} at t = {at}"),
    }
}

/// Rules: the decay bound is proven only for the constant kernel, so it is
/// hard there and soft otherwise; particle runs report everything soft
/// except completion.
pub fn check(dir: &Path) -> CliResult<CheckReport> {
    let manifest = RunManifest::read(dir)?;
    let mut checks = vec![CheckItem {
        name: "run_completed",
        hard: true,
        passed: manifest.exit_status == 0,
        detail: manifest
            .error
            .clone()
            .unwrap_or_else(|| format!("exit status {}", manifest.exit_status)),
    }];

    let path = dir.join(DIAGNOSTICS);
    let rows = match fs::read_to_string(&path) {
        Ok(text) => parse_diagnostics_csv(&text)
            .map_err(|e| CliError::check(format!("corrupt {}: {e}", path.display())))?,
        Err(e) if manifest.exit_status != 0 => {
            let _ = e;
            Vec::new()
        }
        Err(e) => {
            return Err(CliError::check(format!(
                "cannot read {}: {e}",
                path.display()
            )))
        }
    };
    if manifest.exit_status == 0 && rows.is_empty() {
        return Err(CliError::check(format!("{} has no rows", path.display())));
    }

    let is_macro = manifest.solver == "macro";
    let constant = manifest.kernel == "constant";
    if !rows.is_empty() {
        if is_macro {
            checks.push(bound_dominance(&rows, (1.0 + BOUND_RTOL).ln(), constant));
            checks.push(max_principle(&rows, &manifest, true));
            checks.push(mass(&rows));
            if constant {
                checks.push(monotone(&rows));
            }
        } else {
            checks.push(bound_dominance(&rows, MICRO_BOUND_SLACK, false));
            checks.push(max_principle(&rows, &manifest, false));
        }
    }

    let passed = checks.iter().all(|c| c.passed || !c.hard);
    Ok(CheckReport {
        dir: dir.display().to_string(),
        scenario: manifest.scenario,
        solver: manifest.solver,
        kernel: manifest.kernel,
        passed,
        checks,
    })
}
