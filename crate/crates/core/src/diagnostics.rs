//! Moving-window Lyapunov functionals, the exponential decay bound, residuals
//! of the constant-kernel identities for `V_x` and `V_t`, and the
//! maximum-principle and conservation audits.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::macro_solver::{FluxRecord, GridSpec, Snapshot};
use crate::model::{Kernel, KernelKind, VelocityModel};

/// Slack for the maximum-principle audit.
pub const MAX_PRINCIPLE_TOL: f64 = 1e-12;
/// Relative tolerance for the mass audit.
pub const MASS_TOL: f64 = 1e-9;
/// Fraction of `eta` dropped at each window end before evaluating identity
/// residuals. The density jumps at `beta(t)`; near `beta - eta` that jump sits
/// at the end of the look-ahead stencil, and the scheme smears it over a layer
/// whose width shrinks only like `sqrt(dx)`.
pub const IDENTITY_MARGIN: f64 = 0.2;

/// Leader trajectory `beta(t) = b + vbar t` and window length `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowParams {
    pub b: f64,
    pub vbar: f64,
    pub eta: f64,
}

impl WindowParams {
    pub fn new(b: f64, vbar: f64, eta: f64) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(Error::Config(format!(
                "window length must be positive, got {eta}"
            )));
        }
        if !(vbar >= 0.0) {
            return Err(Error::Config(format!(
                "leader speed must be nonnegative, got {vbar}"
            )));
        }
        Ok(Self { b, vbar, eta })
    }

    pub fn beta(&self, t: f64) -> f64 {
        self.b + self.vbar * t
    }
}

/// `[beta(t) - eta, beta(t)]`.
pub fn window(t: f64, params: &WindowParams) -> (f64, f64) {
    let beta = params.beta(t);
    (beta - params.eta, beta)
}

/// Exact integral of `f(values[j])` over `[lo, hi]` for data constant on
/// each cell.
fn window_integral(
    grid: &GridSpec,
    values: &[f64],
    lo: f64,
    hi: f64,
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    let slack = 1e-12 * grid.dx;
    if lo < grid.x_left - slack || hi > grid.x_right() + slack || values.len() != grid.n_cells {
        return Err(Error::WindowCoverage {
            lo,
            hi,
            x_left: grid.x_left,
            x_right: grid.x_right(),
        });
    }
    if hi <= lo {
        return Ok(0.0);
    }
    let first = (((lo - grid.x_left) / grid.dx).floor().max(0.0) as usize).min(grid.n_cells - 1);
    let mut total = 0.0;
    for (j, &value) in values.iter().enumerate().skip(first) {
        let a = grid.edge(j);
        if a >= hi {
            break;
        }
        let overlap = grid.edge(j + 1).min(hi) - a.max(lo);
        if overlap > 0.0 {
            total += overlap * f(value);
        }
    }
    Ok(total)
}

/// `L(t) = int_{beta-eta}^{beta} (V - vbar)^2 dx` for cellwise speeds.
pub fn lyapunov_velocity(
    grid: &GridSpec,
    speed: &[f64],
    t: f64,
    params: &WindowParams,
    vbar: f64,
) -> Result<f64> {
    let (lo, hi) = window(t, params);
    window_integral(grid, speed, lo, hi, |v| (v - vbar) * (v - vbar))
}

/// `L~(t) = int_{beta-eta}^{beta} (rho - rho_bar)^2 dx`.
pub fn lyapunov_density(
    grid: &GridSpec,
    rho: &[f64],
    t: f64,
    params: &WindowParams,
    rhobar: f64,
) -> Result<f64> {
    let (lo, hi) = window(t, params);
    window_integral(grid, rho, lo, hi, |r| (r - rhobar) * (r - rhobar))
}

/// Decay bound `L0 exp(2 v'_max rho_min t / eta)`.
pub fn exp_bound(l0: f64, t: f64, eta: f64, vprime_max: f64, rho_min: f64) -> Result<f64> {
    if !(rho_min > 0.0) {
        return Err(Error::Domain {
            what: "rho_min",
            value: rho_min,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }
    if !(vprime_max < 0.0) {
        return Err(Error::Domain {
            what: "v'_max",
            value: vprime_max,
            lo: f64::NEG_INFINITY,
            hi: 0.0,
        });
    }
    if !(eta > 0.0) || !(l0 >= 0.0) {
        return Err(Error::Config(format!(
            "exp_bound needs eta > 0 and L0 >= 0 (eta = {eta}, L0 = {l0})"
        )));
    }
    Ok(l0 * (2.0 * vprime_max * rho_min * t / eta).exp())
}

/// `R(t, x) = (int_x^beta rho dy + (x + eta - beta) rho_bar) / eta`, the
/// constant-kernel average with `rho = rho_bar` ahead of the leader.
pub fn nonlocal_argument_r(
    grid: &GridSpec,
    rho: &[f64],
    kernel: &Kernel,
    t: f64,
    x: f64,
    params: &WindowParams,
    rhobar: f64,
) -> Result<f64> {
    if kernel.kind() != KernelKind::Constant {
        return Err(Error::Unsupported(format!(
            "R(t, x) is defined for the constant kernel only, got {}",
            kernel.kind()
        )));
    }
    let (lo, beta) = window(t, params);
    let tol = 1e-12 * params.eta.max(1.0);
    if x < lo - tol || x > beta + tol {
        return Err(Error::Domain {
            what: "x",
            value: x,
            lo,
            hi: beta,
        });
    }
    let inner = window_integral(grid, rho, x.min(beta), beta, |r| r)?;
    Ok((inner + (x + params.eta - beta) * rhobar) / params.eta)
}

/// Cells lying completely inside the window shrunk by `IDENTITY_MARGIN * eta`
/// at both ends, keeping one neighbour on each side. Half-open index range.
fn interior_cells(grid: &GridSpec, t: f64, params: &WindowParams) -> std::ops::Range<usize> {
    let (lo, hi) = window(t, params);
    let margin = IDENTITY_MARGIN * params.eta;
    let first = ((lo + margin - grid.x_left) / grid.dx - 1e-9)
        .ceil()
        .max(1.0) as usize;
    let end = ((hi - margin - grid.x_left) / grid.dx + 1e-9)
        .floor()
        .max(0.0) as usize;
    let end = end.min(grid.n_cells.saturating_sub(1));
    first..end.max(first)
}

/// `max_j |(V_{j+1} - V_{j-1}) / 2dx - (rho_bar - rho) v'(R) / eta|` at the
/// interfaces `x_{j+1/2}` of interior window cells, with `rho` the mean of
/// the two neighbours of the interface.
pub fn space_identity_residual(
    grid: &GridSpec,
    snap: &Snapshot,
    params: &WindowParams,
    model: &VelocityModel,
    rhobar: f64,
) -> Result<f64> {
    let kernel = Kernel::constant(params.eta)?;
    let mut worst: f64 = 0.0;
    for j in interior_cells(grid, snap.t, params) {
        let x = grid.edge(j + 1);
        let r = nonlocal_argument_r(grid, &snap.rho, &kernel, snap.t, x, params, rhobar)?;
        let lhs = (snap.speed[j + 1] - snap.speed[j - 1]) / (2.0 * grid.dx);
        let rho_face = 0.5 * (snap.rho[j] + snap.rho[j + 1]);
        let rhs = (rhobar - rho_face) * model.deriv(r) / params.eta;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// `max_j |dV_j/dt - (rho_j V_j - vbar rho_bar) v'(R) / eta|` with the time
/// derivative taken across the outer snapshots.
pub fn time_identity_residual(
    grid: &GridSpec,
    snaps: [&Snapshot; 3],
    params: &WindowParams,
    model: &VelocityModel,
    rhobar: f64,
    vbar: f64,
) -> Result<f64> {
    let [before, mid, after] = snaps;
    let span = after.t - before.t;
    if !(span > 0.0) {
        return Err(Error::Config(
            "snapshots must be in increasing time order".into(),
        ));
    }
    let kernel = Kernel::constant(params.eta)?;
    let mut worst: f64 = 0.0;
    for j in interior_cells(grid, mid.t, params) {
        let x = grid.edge(j + 1);
        let r = nonlocal_argument_r(grid, &mid.rho, &kernel, mid.t, x, params, rhobar)?;
        let lhs = (after.speed[j] - before.speed[j]) / span;
        let rhs = (mid.rho[j] * mid.speed[j] - vbar * rhobar) * model.deriv(r) / params.eta;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Both identity residuals at the middle snapshot.
pub fn identity_residuals(
    grid: &GridSpec,
    snaps: [&Snapshot; 3],
    params: &WindowParams,
    model: &VelocityModel,
    rhobar: f64,
    vbar: f64,
) -> Result<(f64, f64)> {
    let rx = space_identity_residual(grid, snaps[1], params, model, rhobar)?;
    let rt = time_identity_residual(grid, snaps, params, model, rhobar, vbar)?;
    Ok((rx, rt))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxPrincipleReport {
    /// `max(0, rho_min0 - min rho)` over all states.
    pub worst_undershoot: f64,
    /// `max(0, max rho - rho_max0)` over all states.
    pub worst_overshoot: f64,
    pub passed: bool,
}

/// Scans density arrays against the extremes of the initial data.
pub fn check_max_principle<'a, I>(states: I, rho_min0: f64, rho_max0: f64) -> MaxPrincipleReport
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let (mut under, mut over) = (0.0_f64, 0.0_f64);
    for rho in states {
        for &r in rho {
            under = under.max(rho_min0 - r);
            over = over.max(r - rho_max0);
            if r.is_nan() {
                under = f64::INFINITY;
            }
        }
    }
    MaxPrincipleReport {
        worst_undershoot: under,
        worst_overshoot: over,
        passed: under <= MAX_PRINCIPLE_TOL && over <= MAX_PRINCIPLE_TOL,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassReport {
    /// Largest `|M_n - M_0 - sum dt (F_in - F_out)|` over steps.
    pub max_residual: f64,
    pub relative: f64,
    pub passed: bool,
}

/// Flux-form audit: interior mass change against the cumulative boundary
/// flux, step by step.
pub fn check_mass(initial_mass: f64, log: &[FluxRecord]) -> MassReport {
    let mut boundary = 0.0;
    let mut worst: f64 = 0.0;
    for rec in log {
        boundary += rec.dt * (rec.inflow - rec.outflow);
        let residual = rec.mass - initial_mass - boundary;
        worst = worst.max(residual.abs());
        if residual.is_nan() {
            worst = f64::INFINITY;
        }
    }
    let relative = worst / initial_mass.abs();
    MassReport {
        max_residual: worst,
        relative,
        passed: relative <= MASS_TOL,
    }
}

/// Diagnostics at one output time. Raw (not logarithmic) values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub l: f64,
    pub l_bound: f64,
    pub l_tilde: f64,
    pub rho_min_obs: f64,
    pub rho_max_obs: f64,
    /// Conservation defect relative to the initial interior mass.
    pub mass_residual: f64,
    pub res_dx_v: f64,
    pub res_dt_v: f64,
}

pub const DIAGNOSTICS_HEADER: &str =
    "t,lnL,lnL_bound,lnL_tilde,rho_min_obs,rho_max_obs,mass_residual,res_dxV,res_dtV";

fn ln_or_nan(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NAN
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsSeries {
    pub records: Vec<DiagnosticsRecord>,
}

/// One parsed row of a diagnostics CSV (logarithmic columns).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub ln_l: f64,
    pub ln_l_bound: f64,
    pub ln_l_tilde: f64,
    pub rho_min_obs: f64,
    pub rho_max_obs: f64,
    pub mass_residual: f64,
    pub res_dx_v: f64,
    pub res_dt_v: f64,
}

impl DiagnosticsSeries {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn ln_l(&self) -> Vec<f64> {
        self.records.iter().map(|r| ln_or_nan(r.l)).collect()
    }

    pub fn ln_l_tilde(&self) -> Vec<f64> {
        self.records.iter().map(|r| ln_or_nan(r.l_tilde)).collect()
    }

    /// Record closest to time `t`.
    pub fn at(&self, t: f64) -> Option<&DiagnosticsRecord> {
        self.records
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }

    /// Logarithmic CSV; `NaN` wherever a value is undefined.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(DIAGNOSTICS_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.t,
                ln_or_nan(r.l),
                ln_or_nan(r.l_bound),
                ln_or_nan(r.l_tilde),
                r.rho_min_obs,
                r.rho_max_obs,
                r.mass_residual,
                r.res_dx_v,
                r.res_dt_v
            );
        }
        out
    }

    /// Raw values, `t,L,L_bound,L_tilde`.
    pub fn to_raw_csv(&self) -> String {
        let mut out = String::from("t,L,L_bound,L_tilde\n");
        for r in &self.records {
            let _ = writeln!(out, "{},{},{},{}", r.t, r.l, r.l_bound, r.l_tilde);
        }
        out
    }
}

/// Parses a diagnostics CSV written by [`DiagnosticsSeries::to_csv`].
pub fn parse_diagnostics_csv(text: &str) -> Result<Vec<DiagnosticsRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == DIAGNOSTICS_HEADER => {}
        Some((_, h)) => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("unexpected header `{h}`"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                msg: "empty diagnostics file".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: i + 1,
                msg: format!("bad number: {e}"),
            })?;
        if vals.len() != 9 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected 9 columns, found {}", vals.len()),
            });
        }
        rows.push(DiagnosticsRow {
            t: vals[0],
            ln_l: vals[1],
            ln_l_bound: vals[2],
            ln_l_tilde: vals[3],
            rho_min_obs: vals[4],
            rho_max_obs: vals[5],
            mass_residual: vals[6],
            res_dx_v: vals[7],
            res_dt_v: vals[8],
        });
    }
    Ok(rows)
}

/// Least-squares slope of `y` against `t` over points with `t` in `[a, b]`
/// and finite `y`.
pub fn fitted_slope(t: &[f64], y: &[f64], a: f64, b: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(y)
        .filter(|(&ti, &yi)| ti >= a - 1e-9 && ti <= b + 1e-9 && yi.is_finite())
        .map(|(&ti, &yi)| (ti, yi))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    Some(sxy / sxx)
}
