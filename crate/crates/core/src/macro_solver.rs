//! Upwind finite-volume scheme for the nonlocal LWR model on a truncated
//! uniform grid.
//!
//! Cell `j` carries `rho_j`; its speed `V_j = v(sum_k gamma_k rho_{j+k+1})`
//! looks strictly downstream, so `V_j` is the nonlocal speed at the right
//! interface `x_{j+1/2}` and the flux through that interface is `V_j rho_j`.
//! Stencil entries past the last cell read the right ghost value `rho_bar`.
//! The flux into cell 0 uses the far-field density `rho_0(x_left)` with the
//! stencil anchored at cell 0.

use crate::diagnostics::{
    exp_bound, identity_residuals, lyapunov_density, lyapunov_velocity, DiagnosticsRecord,
    DiagnosticsSeries, WindowParams,
};
use crate::error::{Error, Result};
use crate::model::{kernel_weights, KernelKind, VelocityModel, WeightTable};
use crate::scenario::ScenarioConfig;

/// Slack on the density bounds checked after every step.
pub const BOUND_SLACK: f64 = 1e-12;

/// Uniform grid of `n_cells` cells starting at `x_left`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_left: f64,
    pub dx: f64,
    pub n_cells: usize,
}

impl GridSpec {
    pub fn new(x_left: f64, dx: f64, n_cells: usize) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) || !x_left.is_finite() || n_cells == 0 {
            return Err(Error::Config(format!(
                "invalid grid: x_left = {x_left}, dx = {dx}, n_cells = {n_cells}"
            )));
        }
        Ok(Self {
            x_left,
            dx,
            n_cells,
        })
    }

    /// Grid whose cell edges include `anchor` and which covers at least
    /// `[lo, hi]`.
    pub fn aligned(anchor: f64, lo: f64, hi: f64, dx: f64) -> Result<Self> {
        let left_cells = ((anchor - lo) / dx - 1e-9).ceil().max(0.0) as usize;
        let right_cells = ((hi - anchor) / dx - 1e-9).ceil().max(0.0) as usize;
        Self::new(
            anchor - left_cells as f64 * dx,
            dx,
            left_cells + right_cells,
        )
    }

    pub fn x_right(&self) -> f64 {
        self.edge(self.n_cells)
    }

    /// Left edge of cell `j` (`j = n_cells` gives the right boundary).
    #[inline]
    pub fn edge(&self, j: usize) -> f64 {
        self.x_left + j as f64 * self.dx
    }

    #[inline]
    pub fn center(&self, j: usize) -> f64 {
        self.x_left + (j as f64 + 0.5) * self.dx
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacroState {
    pub rho: Vec<f64>,
    pub t: f64,
    pub step: u64,
    /// Far-field density feeding the first cell.
    pub left_ghost: f64,
    /// Density ahead of the grid, `rho_bar`.
    pub right_ghost: f64,
}

impl MacroState {
    /// Exact cell averages of a piecewise-constant profile.
    pub fn from_profile(
        grid: &GridSpec,
        profile: &crate::scenario::InitialProfile,
        rhobar: f64,
    ) -> Self {
        let rho = (0..grid.n_cells)
            .map(|j| profile.cell_average(grid.edge(j), grid.edge(j + 1)))
            .collect();
        Self {
            rho,
            t: 0.0,
            step: 0,
            left_ghost: profile.cell_average(grid.x_left - grid.dx, grid.x_left),
            right_ghost: rhobar,
        }
    }

    pub fn uniform(grid: &GridSpec, value: f64) -> Self {
        Self {
            rho: vec![value; grid.n_cells],
            t: 0.0,
            step: 0,
            left_ghost: value,
            right_ghost: value,
        }
    }

    /// `sum_j rho_j dx`.
    pub fn mass(&self, dx: f64) -> f64 {
        self.rho.iter().sum::<f64>() * dx
    }

    pub fn min(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.rho.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Nonlocal speeds for one state.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NonlocalSpeeds {
    /// `V_{-1}`, used for the flux into cell 0.
    pub upstream: f64,
    /// `V_j` per cell.
    pub cells: Vec<f64>,
}

impl NonlocalSpeeds {
    pub fn max(&self) -> f64 {
        self.cells.iter().copied().fold(self.upstream, f64::max)
    }

    fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.upstream).chain(self.cells.iter().copied())
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0_f64; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..n {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Fills `out` with the weighted downstream averages `A_{-1}, A_0, ..,
/// A_{N-1}` (length `N + 1`), clamped to `[0, rho_max]` so rounding in
/// `sum gamma_k` cannot leave the speed law's domain.
fn nonlocal_averages_into(
    state: &MacroState,
    weights: &WeightTable,
    rho_max: f64,
    ext: &mut Vec<f64>,
    out: &mut Vec<f64>,
) {
    let n = state.rho.len();
    let k = weights.len();
    ext.clear();
    ext.extend_from_slice(&state.rho);
    ext.resize(n + k, state.right_ghost);
    out.clear();
    out.extend((0..=n).map(|m| dot(&weights.gamma, &ext[m..m + k]).clamp(0.0, rho_max)));
}

/// Downstream averages `A_{-1}, .., A_{N-1}`; `V_j = v(A_j)`.
pub fn nonlocal_averages(state: &MacroState, weights: &WeightTable, rho_max: f64) -> Vec<f64> {
    let mut ext = Vec::new();
    let mut out = Vec::new();
    nonlocal_averages_into(state, weights, rho_max, &mut ext, &mut out);
    out
}

pub fn nonlocal_velocities(
    state: &MacroState,
    weights: &WeightTable,
    model: &VelocityModel,
) -> NonlocalSpeeds {
    let avg = nonlocal_averages(state, weights, model.rho_max());
    NonlocalSpeeds {
        upstream: model.speed(avg[0]),
        cells: avg[1..].iter().map(|&a| model.speed(a)).collect(),
    }
}

/// Adaptive step `cfl_factor * dx / max_j V_j`, never above `10 dx / v(0)`.
pub fn cfl_dt(speeds: &NonlocalSpeeds, dx: f64, cfl_factor: f64, v0: f64) -> Result<f64> {
    if !(cfl_factor > 0.0 && cfl_factor <= 1.0) {
        return Err(Error::Config(format!(
            "cfl factor must lie in (0, 1], got {cfl_factor}"
        )));
    }
    for (i, v) in speeds.iter().enumerate() {
        if !(v >= 0.0) {
            return Err(Error::NegativeSpeed { index: i, speed: v });
        }
    }
    let cap = 10.0 * dx / v0;
    let vmax = speeds.max();
    if vmax <= 0.0 {
        return Ok(cap);
    }
    Ok((cfl_factor * dx / vmax).min(cap))
}

/// Step size below which the upwind update is monotone for any data in
/// `[0, rho_max]`: `dx / (v(0) + gamma_0 sup|v'| rho_max)`.
///
/// The speed-only bound of [`cfl_dt`] can exceed this once every speed is
/// well below `v(0)`; steps then oscillate at fronts and overshoot `rho_max`.
pub fn monotone_dt(weights: &WeightTable, model: &VelocityModel) -> f64 {
    let gamma0 = weights.gamma.first().copied().unwrap_or(0.0);
    weights.dx / (model.v0() + gamma0 * model.lipschitz() * model.rho_max())
}

/// Boundary fluxes of one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepFluxes {
    /// `F_{-1/2}`.
    pub inflow: f64,
    /// `F_{N-1/2}`.
    pub outflow: f64,
}

fn apply_update(
    state: &MacroState,
    speeds: &NonlocalSpeeds,
    dx: f64,
    dt: f64,
    rho_max: f64,
) -> Result<(MacroState, StepFluxes)> {
    let lambda = dt / dx;
    let inflow = speeds.upstream * state.left_ghost;
    let mut rho = Vec::with_capacity(state.rho.len());
    let mut f_left = inflow;
    let step = state.step + 1;
    for (j, (&r, &v)) in state.rho.iter().zip(&speeds.cells).enumerate() {
        let f_right = v * r;
        let new = r - lambda * (f_right - f_left);
        if !(new > 0.0 && new <= rho_max + BOUND_SLACK) {
            return Err(Error::MaxPrinciple {
                step,
                cell: j,
                rho: new,
            });
        }
        rho.push(new);
        f_left = f_right;
    }
    Ok((
        MacroState {
            rho,
            t: state.t + dt,
            step,
            left_ghost: state.left_ghost,
            right_ghost: state.right_ghost,
        },
        StepFluxes {
            inflow,
            outflow: f_left,
        },
    ))
}

/// One explicit step in flux form. `dt` must respect the CFL bound with
/// factor 1.
pub fn godunov_step(
    state: &MacroState,
    weights: &WeightTable,
    model: &VelocityModel,
    dt: f64,
) -> Result<(MacroState, StepFluxes)> {
    let speeds = nonlocal_velocities(state, weights, model);
    let vmax = speeds.max();
    if vmax > 0.0 {
        let bound = weights.dx / vmax;
        if dt > bound * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt, bound });
        }
    }
    apply_update(state, &speeds, weights.dx, dt, model.rho_max())
}

/// Per-step record for the flux-form mass audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxRecord {
    /// Time after the step.
    pub t: f64,
    pub dt: f64,
    pub inflow: f64,
    pub outflow: f64,
    /// Interior mass after the step.
    pub mass: f64,
}

/// Stateful driver around [`godunov_step`] that reuses buffers and keeps the
/// speeds of the current state.
#[derive(Debug, Clone)]
pub struct MacroSolver {
    grid: GridSpec,
    weights: WeightTable,
    model: VelocityModel,
    cfl: f64,
    state: MacroState,
    averages: Vec<f64>,
    speeds: NonlocalSpeeds,
    ext: Vec<f64>,
    flux_log: Vec<FluxRecord>,
    initial_mass: f64,
    dt_cap: f64,
}

impl MacroSolver {
    pub fn new(
        grid: GridSpec,
        weights: WeightTable,
        model: VelocityModel,
        state: MacroState,
        cfl: f64,
    ) -> Result<Self> {
        if state.rho.len() != grid.n_cells {
            return Err(Error::Config(format!(
                "state has {} cells, grid has {}",
                state.rho.len(),
                grid.n_cells
            )));
        }
        if (weights.dx - grid.dx).abs() > 1e-15 * grid.dx {
            return Err(Error::Config(
                "weight table built for a different dx".into(),
            ));
        }
        if grid.n_cells < weights.len() {
            return Err(Error::Config(format!(
                "grid has {} cells, fewer than the {}-cell stencil",
                grid.n_cells,
                weights.len()
            )));
        }
        let initial_mass = state.mass(grid.dx);
        let mut solver = Self {
            grid,
            weights,
            model,
            cfl,
            state,
            averages: Vec::new(),
            speeds: NonlocalSpeeds::default(),
            ext: Vec::new(),
            flux_log: Vec::new(),
            initial_mass,
            dt_cap: f64::INFINITY,
        };
        solver.dt_cap = monotone_dt(&solver.weights, &solver.model);
        solver.refresh_speeds();
        Ok(solver)
    }

    fn refresh_speeds(&mut self) {
        nonlocal_averages_into(
            &self.state,
            &self.weights,
            self.model.rho_max(),
            &mut self.ext,
            &mut self.averages,
        );
        self.speeds.upstream = self.model.speed(self.averages[0]);
        self.speeds.cells.clear();
        let model = &self.model;
        self.speeds
            .cells
            .extend(self.averages[1..].iter().map(|&a| model.speed(a)));
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn state(&self) -> &MacroState {
        &self.state
    }

    pub fn speeds(&self) -> &NonlocalSpeeds {
        &self.speeds
    }

    /// Downstream averages `A_{-1}, .., A_{N-1}` of the current state.
    pub fn averages(&self) -> &[f64] {
        &self.averages
    }

    pub fn flux_log(&self) -> &[FluxRecord] {
        &self.flux_log
    }

    pub fn initial_mass(&self) -> f64 {
        self.initial_mass
    }

    /// Adaptive step: [`cfl_dt`] limited by [`monotone_dt`].
    pub fn dt(&self) -> Result<f64> {
        let dt = cfl_dt(&self.speeds, self.grid.dx, self.cfl, self.model.v0())?;
        Ok(dt.min(self.dt_cap))
    }

    /// Steps with the adaptive CFL size until `t_target`, clipping the last
    /// step to land on it exactly.
    pub fn advance_to(&mut self, t_target: f64) -> Result<()> {
        while self.state.t < t_target {
            let mut dt = self.dt()?;
            let remaining = t_target - self.state.t;
            let landing = dt >= remaining - 1e-12 * t_target.abs().max(1.0);
            if landing {
                dt = remaining;
            }
            self.step_with(dt)?;
            if landing {
                self.state.t = t_target;
            }
        }
        Ok(())
    }

    /// One step of size `dt` using the cached speeds.
    pub fn step_with(&mut self, dt: f64) -> Result<StepFluxes> {
        let (next, fluxes) = apply_update(
            &self.state,
            &self.speeds,
            self.grid.dx,
            dt,
            self.model.rho_max(),
        )?;
        self.state = next;
        self.flux_log.push(FluxRecord {
            t: self.state.t,
            dt,
            inflow: fluxes.inflow,
            outflow: fluxes.outflow,
            mass: self.state.mass(self.grid.dx),
        });
        self.refresh_speeds();
        Ok(fluxes)
    }
}

/// Cell data at one output time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub rho: Vec<f64>,
    pub speed: Vec<f64>,
}

impl Snapshot {
    /// CSV with header `x,rho,V`, one row per cell center.
    pub fn to_csv(&self, grid: &GridSpec) -> String {
        let mut out = String::with_capacity(self.rho.len() * 48);
        out.push_str("x,rho,V\n");
        for (j, (r, v)) in self.rho.iter().zip(&self.speed).enumerate() {
            out.push_str(&format!("{},{},{}\n", grid.center(j), r, v));
        }
        out
    }

    /// `snap_t<time with 4 decimals>.csv`.
    pub fn file_name(&self) -> String {
        format!("snap_t{:.4}.csv", self.t)
    }
}

#[derive(Debug, Clone)]
pub struct MacroRun {
    pub grid: GridSpec,
    pub rhobar: f64,
    pub rho_min0: f64,
    pub rho_max0: f64,
    pub vprime_max: f64,
    pub initial_mass: f64,
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: DiagnosticsSeries,
    pub flux_log: Vec<FluxRecord>,
}

/// Grid implied by the configuration, checked against the far-field rule.
pub fn scenario_grid(config: &ScenarioConfig) -> Result<GridSpec> {
    let dx = config.grid.dx;
    let eta = config.eta();
    let lo = config
        .grid
        .x_left
        .unwrap_or_else(|| config.far_field_left());
    let hi = config
        .grid
        .x_right
        .unwrap_or_else(|| config.far_field_right());
    let grid = GridSpec::aligned(config.b, lo, hi, dx)?;
    let beta_end = config.b + config.vbar * config.grid.t_end;
    let slack = 1e-9 * dx;
    if grid.x_right() + slack < beta_end + eta {
        return Err(Error::Config(format!(
            "grid too small: right edge {} must lie at least eta beyond the final leader position {}",
            grid.x_right(),
            beta_end
        )));
    }
    if grid.x_left > config.far_field_left() + dx {
        return Err(Error::Config(format!(
            "grid too small: left edge {} lies inside the far-field bound {}",
            grid.x_left,
            config.far_field_left()
        )));
    }
    Ok(grid)
}

/// Runs the macroscopic scenario, recording diagnostics at every output time.
/// Snapshots are retained when `config.snapshots` is set.
pub fn run_macro(config: &ScenarioConfig) -> Result<MacroRun> {
    config.validate()?;
    let rhobar = config.rhobar()?;
    let grid = scenario_grid(config)?;
    let weights = kernel_weights(&config.kernel, grid.dx)?;
    let state = MacroState::from_profile(&grid, &config.init, rhobar);
    let model = config.velocity.clone();
    let rho_min0 = config.rho_min();
    let rho_max0 = config.init.sup();
    let vprime_max = model.vprime_max(rho_min0)?;
    let params = WindowParams::new(config.b, config.vbar, config.eta())?;
    let identities = config.kernel.kind() == KernelKind::Constant;

    let mut solver = MacroSolver::new(grid, weights, model.clone(), state, config.grid.cfl)?;
    let initial_mass = solver.initial_mass();

    let times = config.output_times();
    let mut snapshots = Vec::new();
    let mut records: Vec<DiagnosticsRecord> = Vec::with_capacity(times.len());
    // rolling window of the last two snapshots for the identity residuals
    let mut prev: Option<Snapshot> = None;
    let mut cur: Option<Snapshot> = None;
    let mut l0 = None;

    for &t in &times {
        solver.advance_to(t)?;
        let snap = Snapshot {
            t,
            rho: solver.state().rho.clone(),
            speed: solver.speeds().cells.clone(),
        };
        let l = lyapunov_velocity(&grid, &snap.speed, t, &params, config.vbar)?;
        let l_tilde = lyapunov_density(&grid, &snap.rho, t, &params, rhobar)?;
        let l0 = *l0.get_or_insert(l);
        let mass_now = solver.state().mass(grid.dx);
        let boundary: f64 = solver
            .flux_log()
            .iter()
            .map(|f| f.dt * (f.inflow - f.outflow))
            .sum();
        let state = solver.state();
        records.push(DiagnosticsRecord {
            t,
            l,
            l_bound: exp_bound(l0, t, config.eta(), vprime_max, rho_min0)?,
            l_tilde,
            rho_min_obs: state.min(),
            rho_max_obs: state.max(),
            mass_residual: (mass_now - initial_mass - boundary) / initial_mass,
            res_dx_v: f64::NAN,
            res_dt_v: f64::NAN,
        });

        if identities {
            if let (Some(p), Some(c)) = (&prev, &cur) {
                let (rx, rt) =
                    identity_residuals(&grid, [p, c, &snap], &params, &model, rhobar, config.vbar)?;
                let rec = records.len() - 2;
                records[rec].res_dx_v = rx;
                records[rec].res_dt_v = rt;
            }
        }
        if config.snapshots {
            snapshots.push(snap.clone());
        }
        prev = cur.take();
        cur = Some(snap);
    }

    Ok(MacroRun {
        grid,
        rhobar,
        rho_min0,
        rho_max0,
        vprime_max,
        initial_mass,
        snapshots,
        diagnostics: DiagnosticsSeries { records },
        flux_log: solver.flux_log().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Kernel;
    use approx::assert_abs_diff_eq;

    fn two_cell_weights() -> WeightTable {
        WeightTable {
            gamma: vec![0.5, 0.5],
            dx: 0.5,
            eta: 1.0,
            tail_mass: 0.0,
        }
    }

    fn hand_state() -> MacroState {
        MacroState {
            rho: vec![1.0, 1.0, 0.5, 0.5, 0.5],
            t: 0.0,
            step: 0,
            left_ghost: 1.0,
            right_ghost: 0.5,
        }
    }

    fn lin() -> VelocityModel {
        VelocityModel::linear(1.0, 1.0).unwrap()
    }

    #[test]
    fn hand_evaluated_speeds() {
        let v = nonlocal_velocities(&hand_state(), &two_cell_weights(), &lin());
        assert_eq!(v.cells, vec![0.25, 0.5, 0.5, 0.5, 0.5]);
        assert_eq!(v.upstream, 0.0);
    }

    #[test]
    fn equilibrium_speeds() {
        let grid = GridSpec::new(-2.0, 0.01, 400).unwrap();
        let w = kernel_weights(&Kernel::concave(1.0).unwrap(), 0.01).unwrap();
        let s = MacroState::uniform(&grid, 0.5);
        let v = nonlocal_velocities(&s, &w, &lin());
        for &x in v.cells.iter().chain([v.upstream].iter()) {
            assert_abs_diff_eq!(x, 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn cfl_examples() {
        let s = NonlocalSpeeds {
            upstream: 0.0,
            cells: vec![0.25, 0.5],
        };
        assert_eq!(cfl_dt(&s, 0.5, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(cfl_dt(&s, 0.5, 0.5, 1.0).unwrap(), 0.5);
        let still = NonlocalSpeeds {
            upstream: 0.0,
            cells: vec![0.0; 3],
        };
        assert_eq!(cfl_dt(&still, 0.5, 1.0, 1.0).unwrap(), 5.0);
        let bad = NonlocalSpeeds {
            upstream: 0.0,
            cells: vec![0.1, -0.1],
        };
        assert!(matches!(
            cfl_dt(&bad, 0.5, 1.0, 1.0),
            Err(Error::NegativeSpeed { index: 2, .. })
        ));
    }

    #[test]
    fn hand_evaluated_step() {
        let state = hand_state();
        let (next, fluxes) = godunov_step(&state, &two_cell_weights(), &lin(), 0.25).unwrap();
        assert_eq!(next.rho, vec![0.875, 0.875, 0.625, 0.5, 0.5]);
        assert_eq!(fluxes.inflow, 0.0);
        assert_eq!(fluxes.outflow, 0.25);
        let dm = next.mass(0.5) - state.mass(0.5);
        assert_abs_diff_eq!(dm, -0.0625, epsilon = 1e-15);
        assert_abs_diff_eq!(dm, 0.25 * (fluxes.inflow - fluxes.outflow), epsilon = 1e-15);
        assert_eq!(next.t, 0.25);
        assert_eq!(next.step, 1);
    }

    #[test]
    fn equilibrium_is_fixed_point() {
        let grid = GridSpec::new(0.0, 0.01, 300).unwrap();
        for kind in [
            KernelKind::Constant,
            KernelKind::Linear,
            KernelKind::Concave,
        ] {
            let w = kernel_weights(&Kernel::new(kind, 1.0).unwrap(), 0.01).unwrap();
            let s = MacroState::uniform(&grid, 0.37);
            let model = VelocityModel::linear(1.0, 1.0).unwrap();
            for dt in [1e-4, 0.003, 0.01] {
                let (next, _) = godunov_step(&s, &w, &model, dt).unwrap();
                assert_eq!(next.rho, s.rho, "{kind} dt={dt}");
            }
        }
    }

    #[test]
    fn monotone_cap() {
        let w = kernel_weights(&Kernel::constant(1.0).unwrap(), 0.005).unwrap();
        assert_abs_diff_eq!(monotone_dt(&w, &lin()), 0.005 / 1.005, epsilon = 1e-15);
        // hand weights: 0.5 / (1 + 0.5)
        assert_abs_diff_eq!(
            monotone_dt(&two_cell_weights(), &lin()),
            1.0 / 3.0,
            epsilon = 1e-15
        );

        // all speeds at 0.5 would allow dt = 2 dx; the cap wins
        let grid = GridSpec::new(-2.0, 0.005, 800).unwrap();
        let s = MacroSolver::new(grid, w, lin(), MacroState::uniform(&grid, 0.5), 1.0).unwrap();
        assert_abs_diff_eq!(s.dt().unwrap(), 0.005 / 1.005, epsilon = 1e-15);
    }

    #[test]
    fn cfl_violation_is_rejected() {
        let err = godunov_step(&hand_state(), &two_cell_weights(), &lin(), 1.5).unwrap_err();
        assert!(matches!(err, Error::CflViolation { .. }));
    }

    #[test]
    fn overshoot_aborts_with_cell_and_step() {
        // a concentrated bump upstream of a near-jam region overfills cell 1
        let state = MacroState {
            rho: vec![0.2, 0.99, 0.99, 0.99, 0.99],
            t: 0.0,
            step: 41,
            left_ghost: 0.2,
            right_ghost: 0.99,
        };
        let weights = WeightTable {
            gamma: vec![0.5, 0.5],
            dx: 0.5,
            eta: 1.0,
            tail_mass: 0.0,
        };
        let speeds = NonlocalSpeeds {
            upstream: 0.8,
            cells: vec![0.8, 0.0, 0.0, 0.0, 0.0],
        };
        let err = apply_update(&state, &speeds, weights.dx, 0.5, 1.0).unwrap_err();
        match err {
            Error::MaxPrinciple { step, cell, rho } => {
                assert_eq!(step, 42);
                assert_eq!(cell, 1);
                assert!(rho > 1.0);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn aligned_grid_contains_anchor() {
        let g = GridSpec::aligned(0.0, -22.0, 12.0, 5e-3).unwrap();
        assert_eq!(g.n_cells, 6800);
        assert_eq!(g.edge(4400), 0.0);
        assert_abs_diff_eq!(g.x_left, -22.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.x_right(), 12.0, epsilon = 1e-12);
    }

    #[test]
    fn solver_lands_on_targets() {
        let grid = GridSpec::new(-3.0, 0.05, 100).unwrap();
        let w = kernel_weights(&Kernel::constant(1.0).unwrap(), 0.05).unwrap();
        let init =
            crate::scenario::InitialProfile::new(vec![(0.0, 1.0), (f64::INFINITY, 0.5)]).unwrap();
        let state = MacroState::from_profile(&grid, &init, 0.5);
        let mut solver = MacroSolver::new(grid, w, lin(), state, 1.0).unwrap();
        solver.advance_to(0.3).unwrap();
        assert_eq!(solver.state().t, 0.3);
        solver.advance_to(0.7).unwrap();
        assert_eq!(solver.state().t, 0.7);
        let log = solver.flux_log();
        assert!(log.iter().all(|f| f.dt > 0.0));
    }

    #[test]
    fn snapshot_csv_layout() {
        let grid = GridSpec::new(0.0, 0.5, 2).unwrap();
        let s = Snapshot {
            t: 1.25,
            rho: vec![0.5, 1.0],
            speed: vec![0.5, 0.0],
        };
        assert_eq!(s.to_csv(&grid), "x,rho,V\n0.25,0.5,0.5\n0.75,1,0\n");
        assert_eq!(s.file_name(), "snap_t1.2500.csv");
    }
}
