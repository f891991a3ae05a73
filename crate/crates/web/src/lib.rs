//! Browser bindings: a stepping macro simulation for a canvas plot, a
//! particle `ln L` trace, and the kernel weights.
//!
//! Everything is plain Rust underneath; the `#[wasm_bindgen]` constructors
//! only turn error strings into JS exceptions, so the logic is tested natively.

use nlwr_core::{
    exp_bound, kernel_weights as core_weights, lyapunov_velocity, macro_solver::scenario_grid,
    run_micro, InitialProfile, Kernel, KernelKind, MacroSolver, MacroState, ScenarioConfig,
    WindowParams,
};
use wasm_bindgen::prelude::*;

/// Visible part of the road behind and ahead of the leader's start.
const VIEW_BEHIND: f64 = 6.0;
const VIEW_AHEAD: f64 = 2.0;
/// The grid is sized so the window stays inside it until this time.
pub const DEMO_T_END: f64 = 30.0;

fn kind_of(name: &str) -> Result<KernelKind, String> {
    match name {
        "constant" => Ok(KernelKind::Constant),
        "linear" => Ok(KernelKind::Linear),
        "concave" => Ok(KernelKind::Concave),
        other => Err(format!(
            "unknown kernel `{other}` (constant, linear, concave)"
        )),
    }
}

fn jam_config(kernel: &str, eta: f64, vbar: f64, dx: f64) -> Result<ScenarioConfig, String> {
    let mut cfg = ScenarioConfig::jam_release(kind_of(kernel)?);
    cfg.kernel = Kernel::new(cfg.kernel.kind(), eta).map_err(|e| e.to_string())?;
    cfg.vbar = vbar;
    cfg.grid.dx = dx;
    cfg.grid.t_end = DEMO_T_END;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

/// Jam release behind a leader driving at `vbar`, advanced on demand.
#[wasm_bindgen]
pub struct MacroSim {
    solver: MacroSolver,
    params: WindowParams,
    vbar: f64,
    eta: f64,
    vprime_max: f64,
    rho_min0: f64,
    l0: f64,
    first_cell: usize,
    last_cell: usize,
}

impl MacroSim {
    pub fn create(kernel: &str, eta: f64, vbar: f64, dx: f64) -> Result<MacroSim, String> {
        let cfg = jam_config(kernel, eta, vbar, dx)?;
        let err = |e: nlwr_core::Error| e.to_string();
        let rhobar = cfg.rhobar().map_err(err)?;
        let grid = scenario_grid(&cfg).map_err(err)?;
        let weights = core_weights(&cfg.kernel, dx).map_err(err)?;
        let state = MacroState::from_profile(&grid, &cfg.init, rhobar);
        let solver = MacroSolver::new(grid, weights, cfg.velocity.clone(), state, cfg.grid.cfl)
            .map_err(err)?;
        let params = WindowParams::new(cfg.b, vbar, eta).map_err(err)?;
        let l0 =
            lyapunov_velocity(&grid, &solver.speeds().cells, 0.0, &params, vbar).map_err(err)?;
        let cell = |x: f64| (((x - grid.x_left) / dx).round().max(0.0) as usize).min(grid.n_cells);
        Ok(MacroSim {
            vprime_max: cfg.velocity.vprime_max(cfg.rho_min()).map_err(err)?,
            rho_min0: cfg.rho_min(),
            first_cell: cell(cfg.b - VIEW_BEHIND),
            last_cell: cell(cfg.b + VIEW_AHEAD),
            solver,
            params,
            vbar,
            eta,
            l0,
        })
    }

    pub fn try_advance(&mut self, dt: f64) -> Result<(), String> {
        let target = self.solver.state().t + dt;
        self.solver.advance_to(target).map_err(|e| e.to_string())
    }

    pub fn try_ln_l(&self) -> Result<f64, String> {
        let t = self.solver.state().t;
        lyapunov_velocity(
            self.solver.grid(),
            &self.solver.speeds().cells,
            t,
            &self.params,
            self.vbar,
        )
        .map(f64::ln)
        .map_err(|e| e.to_string())
    }
}

#[wasm_bindgen]
impl MacroSim {
    /// `kernel` is `constant`, `linear` or `concave`.
    #[wasm_bindgen(constructor)]
    pub fn new(kernel: &str, eta: f64, vbar: f64, dx: f64) -> Result<MacroSim, JsError> {
        Self::create(kernel, eta, vbar, dx).map_err(|e| JsError::new(&e))
    }

    /// Steps until the clock has moved on by `dt`.
    pub fn advance(&mut self, dt: f64) -> Result<(), JsError> {
        self.try_advance(dt).map_err(|e| JsError::new(&e))
    }

    pub fn time(&self) -> f64 {
        self.solver.state().t
    }

    /// Current front of the leader.
    pub fn beta(&self) -> f64 {
        self.params.beta(self.time())
    }

    /// Cell centres of the visible road.
    pub fn x(&self) -> Vec<f64> {
        let grid = self.solver.grid();
        (self.first_cell..self.last_cell)
            .map(|j| grid.center(j))
            .collect()
    }

    pub fn density(&self) -> Vec<f64> {
        self.solver.state().rho[self.first_cell..self.last_cell].to_vec()
    }

    pub fn velocity(&self) -> Vec<f64> {
        self.solver.speeds().cells[self.first_cell..self.last_cell].to_vec()
    }

    /// `ln L`; `-inf` once the window is at equilibrium.
    #[wasm_bindgen(js_name = lnL)]
    pub fn ln_l(&self) -> f64 {
        self.try_ln_l().unwrap_or(f64::NAN)
    }

    /// `ln` of the exponential decay bound at the current time.
    pub fn bound(&self) -> f64 {
        exp_bound(
            self.l0,
            self.time(),
            self.eta,
            self.vprime_max,
            self.rho_min0,
        )
        .map(f64::ln)
        .unwrap_or(f64::NAN)
    }
}

/// `[t0, lnL0, bound0, t1, ...]` for the particle model of the jam release.
pub fn micro_trace_native(
    kernel: &str,
    eta: f64,
    vbar: f64,
    h: f64,
    t_end: f64,
    cadence: f64,
) -> Result<Vec<f64>, String> {
    let mut cfg = jam_config(kernel, eta, vbar, 5e-3)?;
    cfg.solver = nlwr_core::SolverKind::Micro;
    cfg.micro_h = h;
    cfg.grid.t_end = t_end;
    cfg.cadence = cadence;
    cfg.validate().map_err(|e| e.to_string())?;
    let run = run_micro(&cfg, None).map_err(|e| e.to_string())?;
    Ok(run
        .records
        .iter()
        .flat_map(|r| [r.t, r.l.ln(), r.l_bound.ln()])
        .collect())
}

#[wasm_bindgen(js_name = microTrace)]
pub fn micro_trace(
    kernel: &str,
    eta: f64,
    vbar: f64,
    h: f64,
    t_end: f64,
    cadence: f64,
) -> Result<Vec<f64>, JsError> {
    micro_trace_native(kernel, eta, vbar, h, t_end, cadence).map_err(|e| JsError::new(&e))
}

pub fn kernel_weights_native(kind: &str, eta: f64, dx: f64) -> Result<Vec<f64>, String> {
    let kernel = Kernel::new(kind_of(kind)?, eta).map_err(|e| e.to_string())?;
    core_weights(&kernel, dx)
        .map(|w| w.gamma)
        .map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = kernelWeights)]
pub fn kernel_weights(kind: &str, eta: f64, dx: f64) -> Result<Vec<f64>, JsError> {
    kernel_weights_native(kind, eta, dx).map_err(|e| JsError::new(&e))
}

/// Exact initial profile used by the demo, as `(upper edge, value)` pairs.
#[wasm_bindgen(js_name = initialSegments)]
pub fn initial_segments() -> Vec<f64> {
    let init: InitialProfile = ScenarioConfig::jam_release(KernelKind::Constant).init;
    init.segments().iter().flat_map(|&(x, v)| [x, v]).collect()
}
