//! Scenario description shared by both solvers, plus the built-in presets.

use crate::error::{Assumption, Error, Result};
use crate::model::{stencil_len, validate_kernel, Kernel, KernelKind, VelocityModel};

/// Piecewise-constant density: `value[0]` on `(-inf, upper[0]]`, `value[i]` on
/// `(upper[i-1], upper[i]]`; the last upper bound is `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialProfile {
    segments: Vec<(f64, f64)>,
}

impl InitialProfile {
    /// Builds a profile from `(x_upper, value)` pairs. A final segment with
    /// an infinite upper bound is required.
    pub fn new(segments: Vec<(f64, f64)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Config("initial profile has no segments".into()));
        }
        for w in segments.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::Config(format!(
                    "segment bounds must increase strictly ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(upper, _)) = segments.last() {
            if upper != f64::INFINITY {
                return Err(Error::Config(
                    "the last initial segment must extend to +inf".into(),
                ));
            }
        }
        if let Some(&(_, v)) = segments.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Config(format!("non-finite initial density {v}")));
        }
        Ok(Self { segments })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            segments: vec![(f64::INFINITY, value)],
        }
    }

    pub fn segments(&self) -> &[(f64, f64)] {
        &self.segments
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.segments
            .iter()
            .find(|(upper, _)| x <= *upper)
            .map(|&(_, v)| v)
            .unwrap_or(self.segments[self.segments.len() - 1].1)
    }

    /// Exact `int_a^b rho_0`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut lower = f64::NEG_INFINITY;
        let mut total = 0.0;
        for &(upper, value) in &self.segments {
            let lo = a.max(lower);
            let hi = b.min(upper);
            if hi > lo {
                total += value * (hi - lo);
            }
            if upper >= b {
                break;
            }
            lower = upper;
        }
        total
    }

    pub fn cell_average(&self, a: f64, b: f64) -> f64 {
        self.integral(a, b) / (b - a)
    }

    pub fn inf(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.1)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn sup(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.1)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Values taken on a set of positive length inside `[x, +inf)`.
    pub fn values_from(&self, x: f64) -> impl Iterator<Item = f64> + '_ {
        self.segments
            .iter()
            .filter(move |&&(upper, _)| upper > x)
            .map(|&(_, value)| value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Macro,
    Micro,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Macro => "macro",
            SolverKind::Micro => "micro",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSettings {
    pub dx: f64,
    pub t_end: f64,
    pub cfl: f64,
    /// Overrides for the truncated domain; `None` means the far-field default.
    pub x_left: Option<f64>,
    pub x_right: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub name: String,
    pub solver: SolverKind,
    pub velocity: VelocityModel,
    pub kernel: Kernel,
    pub vbar: f64,
    pub b: f64,
    pub init: InitialProfile,
    pub grid: GridSettings,
    /// Time between output records.
    pub cadence: f64,
    pub snapshots: bool,
    /// Mass carried by one vehicle in the microscopic model.
    pub micro_h: f64,
    pub trajectory: bool,
}

pub const PRESETS: [&str; 5] = ["fig1-const", "fig1-lin", "fig1-conc", "fig2", "fig3-micro"];

impl ScenarioConfig {
    /// Jam start-up: `rho_0 = 1` behind `b = 0`, `v = 1 - rho`, `vbar = 0.5`,
    /// `eta = 1`, `dx = 5e-3`, up to `t = 20`.
    pub fn jam_release(kernel: KernelKind) -> Self {
        Self {
            name: format!("jam-{kernel}"),
            solver: SolverKind::Macro,
            velocity: VelocityModel::linear(1.0, 1.0).expect("valid law"),
            kernel: Kernel::new(kernel, 1.0).expect("valid kernel"),
            vbar: 0.5,
            b: 0.0,
            init: InitialProfile::new(vec![(0.0, 1.0), (f64::INFINITY, 0.5)]).expect("valid"),
            grid: GridSettings {
                dx: 5e-3,
                t_end: 20.0,
                cfl: 1.0,
                x_left: None,
                x_right: None,
            },
            cadence: 0.1,
            snapshots: false,
            micro_h: 0.01,
            trajectory: false,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        let mut cfg = match name {
            "fig1-const" => Self::jam_release(KernelKind::Constant),
            "fig1-lin" => Self::jam_release(KernelKind::Linear),
            "fig1-conc" => Self::jam_release(KernelKind::Concave),
            "fig2" => {
                let mut c = Self::jam_release(KernelKind::Constant);
                c.init =
                    InitialProfile::new(vec![(-0.5, 0.01), (0.0, 0.35), (f64::INFINITY, 0.5)])?;
                c.cadence = 0.01;
                c
            }
            "fig3-micro" => {
                let mut c = Self::jam_release(KernelKind::Constant);
                c.solver = SolverKind::Micro;
                // Fine enough that one vehicle crossing a window edge stands
                // out from the smooth decay between two outputs.
                c.cadence = 0.005;
                c
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown preset `{other}` (known: {})",
                    PRESETS.join(", ")
                )))
            }
        };
        cfg.name = name.to_string();
        Ok(cfg)
    }

    /// Equilibrium density for the target speed.
    pub fn rhobar(&self) -> Result<f64> {
        self.velocity.velocity_inverse(self.vbar)
    }

    /// `inf rho_0`, the lower bound of the maximum principle.
    pub fn rho_min(&self) -> f64 {
        self.init.inf()
    }

    pub fn eta(&self) -> f64 {
        self.kernel.eta()
    }

    /// Checks every modelling assumption and the numerical settings.
    pub fn validate(&self) -> Result<()> {
        let v0 = self.velocity.v0();
        if !(self.vbar >= 0.0) {
            return Err(Error::Domain {
                what: "vbar",
                value: self.vbar,
                lo: 0.0,
                hi: v0,
            });
        }
        let rhobar = self.rhobar()?;

        let report = validate_kernel(&self.kernel, 1001)?;
        if !report.passed() {
            return Err(Error::assumption(
                Assumption::Kernel,
                format!(
                    "{} kernel: nonnegative={}, non-increasing={}, integral={}",
                    self.kernel.kind(),
                    report.nonnegative,
                    report.non_increasing,
                    report.integral
                ),
            ));
        }

        let rho_max = self.velocity.rho_max();
        for &(_, value) in self.init.segments() {
            if !(value > 0.0 && value <= rho_max) {
                return Err(Error::assumption(
                    Assumption::InitialData,
                    format!("initial density {value} outside (0, {rho_max}]"),
                ));
            }
        }
        if let Some(v) = self
            .init
            .values_from(self.b)
            .find(|v| (v - rhobar).abs() > 1e-12)
        {
            return Err(Error::assumption(
                Assumption::InitialData,
                format!(
                    "rho_0 must equal rho_bar = {rhobar} for x >= b = {}, found {v}",
                    self.b
                ),
            ));
        }
        self.velocity.vprime_max(self.rho_min())?;

        let g = &self.grid;
        if !(g.dx > 0.0 && g.dx.is_finite()) {
            return Err(Error::Config(format!(
                "grid.dx must be positive, got {}",
                g.dx
            )));
        }
        if stencil_len(self.eta(), g.dx) == 0 {
            return Err(Error::Config(format!(
                "grid.dx = {} exceeds eta = {}: empty stencil",
                g.dx,
                self.eta()
            )));
        }
        if !(g.t_end > 0.0 && g.t_end.is_finite()) {
            return Err(Error::Config(format!(
                "grid.t_end must be positive, got {}",
                g.t_end
            )));
        }
        if !(g.cfl > 0.0 && g.cfl <= 1.0) {
            return Err(Error::Config(format!(
                "grid.cfl must lie in (0, 1], got {}",
                g.cfl
            )));
        }
        if !(self.cadence > 0.0 && self.cadence <= g.t_end) {
            return Err(Error::Config(format!(
                "output.cadence must lie in (0, t_end], got {}",
                self.cadence
            )));
        }
        if self.solver == SolverKind::Micro && !(self.micro_h > 0.0 && self.micro_h <= self.eta()) {
            return Err(Error::Config(format!(
                "micro.h = {} must lie in (0, eta = {}]",
                self.micro_h,
                self.eta()
            )));
        }
        Ok(())
    }

    /// Far-field left edge: upstream waves travel no faster than `v(0)`.
    pub fn far_field_left(&self) -> f64 {
        self.b - self.velocity.v0() * self.grid.t_end - 2.0 * self.eta()
    }

    /// Right edge keeping the final window `2 eta` inside the boundary.
    pub fn far_field_right(&self) -> f64 {
        self.b + self.vbar * self.grid.t_end + 2.0 * self.eta()
    }

    /// Output times `0, cadence, 2 cadence, ..., t_end`.
    pub fn output_times(&self) -> Vec<f64> {
        let n = (self.grid.t_end / self.cadence - 1e-9).ceil() as usize;
        let mut times: Vec<f64> = (0..n).map(|k| k as f64 * self.cadence).collect();
        times.push(self.grid.t_end);
        times
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_integrals() {
        let p = InitialProfile::new(vec![(-0.5, 0.01), (0.0, 0.35), (f64::INFINITY, 0.5)]).unwrap();
        assert_eq!(p.value_at(-0.5), 0.01);
        assert_eq!(p.value_at(-0.25), 0.35);
        assert_eq!(p.value_at(0.0), 0.35);
        assert_eq!(p.value_at(3.0), 0.5);
        assert!((p.integral(-1.0, 1.0) - (0.005 + 0.175 + 0.5)).abs() < 1e-15);
        assert!((p.cell_average(-0.1, 0.1) - 0.425).abs() < 1e-15);
        assert_eq!(p.inf(), 0.01);
        assert_eq!(p.sup(), 0.5);
        assert_eq!(p.values_from(-0.1).collect::<Vec<_>>(), vec![0.35, 0.5]);
        assert_eq!(p.values_from(0.0).collect::<Vec<_>>(), vec![0.5]);
        assert_eq!(p.values_from(0.1).collect::<Vec<_>>(), vec![0.5]);
    }

    #[test]
    fn profile_rejects_bad_segments() {
        assert!(InitialProfile::new(vec![]).is_err());
        assert!(InitialProfile::new(vec![(0.0, 1.0)]).is_err());
        assert!(InitialProfile::new(vec![(1.0, 1.0), (0.0, 1.0), (f64::INFINITY, 0.5)]).is_err());
    }

    #[test]
    fn presets_validate() {
        for name in PRESETS {
            let cfg = ScenarioConfig::preset(name).unwrap();
            cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(cfg.name, name);
        }
        assert!(ScenarioConfig::preset("fig4").is_err());
    }

    #[test]
    fn fig1_parameters() {
        let cfg = ScenarioConfig::preset("fig1-const").unwrap();
        assert_eq!(cfg.grid.dx, 5e-3);
        assert_eq!(cfg.eta(), 1.0);
        assert_eq!(cfg.vbar, 0.5);
        assert_eq!(cfg.rhobar().unwrap(), 0.5);
        assert_eq!(cfg.rho_min(), 0.5);
        assert_eq!(cfg.far_field_left(), -22.0);
        assert_eq!(cfg.far_field_right(), 12.0);
    }

    #[test]
    fn initial_data_must_match_equilibrium_ahead() {
        let mut cfg = ScenarioConfig::preset("fig1-const").unwrap();
        cfg.init = InitialProfile::new(vec![(0.5, 1.0), (f64::INFINITY, 0.5)]).unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(matches!(
            err,
            Error::Assumption {
                assumption: Assumption::InitialData,
                ..
            }
        ));
    }

    #[test]
    fn free_flow_target_is_infeasible() {
        let mut cfg = ScenarioConfig::preset("fig1-const").unwrap();
        cfg.vbar = 1.0;
        assert!(matches!(
            cfg.validate(),
            Err(Error::ControlInfeasible { .. })
        ));
    }

    #[test]
    fn output_times_hit_t_end() {
        let cfg = ScenarioConfig::preset("fig1-const").unwrap();
        let t = cfg.output_times();
        assert_eq!(t.len(), 201);
        assert_eq!(t[0], 0.0);
        assert_eq!(*t.last().unwrap(), 20.0);
        assert!((t[37] - 3.7).abs() < 1e-12);
    }
}
