//! Follow-the-leader particle model whose continuum limit is the nonlocal
//! LWR equation.
//!
//! Each vehicle carries mass `h`; the density on the gap `[x_i, x_{i+1})` is
//! `h / (x_{i+1} - x_i)` and equals `rho_bar` ahead of the leader. Vehicle
//! `i` drives at `v` of the kernel-weighted average of that reconstruction
//! over `[x_i, x_i + eta]`. The leader follows `b + vbar t` exactly.

use std::io::Write;

use crate::diagnostics::{exp_bound, window, DiagnosticsRecord, DiagnosticsSeries, WindowParams};
use crate::error::{Error, Result};
use crate::model::{Kernel, VelocityModel};
use crate::scenario::{InitialProfile, ScenarioConfig};

/// Fraction of the no-overtaking step used by [`micro_dt`].
pub const MICRO_CFL: f64 = 0.5;
/// Retries after an ordering failure, halving `dt` each time.
pub const MAX_HALVINGS: u32 = 20;
/// Neighbourhood (in output intervals, each side) for the local slope used by
/// jump detection.
pub const SLOPE_NEIGHBOURHOOD: usize = 10;
/// A jump is a change in `ln L` above this multiple of the local slope times
/// the output interval.
pub const JUMP_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct MicroState {
    /// Ascending positions; the last entry is the leader.
    pub positions: Vec<f64>,
    pub h: f64,
    pub t: f64,
    pub step: u64,
    pub vbar: f64,
    pub b: f64,
}

impl MicroState {
    pub fn leader(&self) -> f64 {
        *self.positions.last().expect("at least the leader")
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `h / gap` for every follower.
    pub fn densities(&self) -> Vec<f64> {
        self.positions
            .windows(2)
            .map(|w| self.h / (w[1] - w[0]))
            .collect()
    }
}

/// Places the leader at `b` and followers upstream so that every gap holds
/// mass `h` of `profile`, until `x_left` is passed.
pub fn micro_init(
    profile: &InitialProfile,
    h: f64,
    b: f64,
    vbar: f64,
    x_left: f64,
    eta: f64,
) -> Result<MicroState> {
    if !(h > 0.0) {
        return Err(Error::Config(format!(
            "vehicle mass h must be positive, got {h}"
        )));
    }
    if h > eta {
        return Err(Error::Config(format!(
            "vehicle mass h = {h} exceeds eta = {eta}: stencil under-resolved"
        )));
    }
    if profile.segments().iter().any(|s| !(s.1 > 0.0)) {
        return Err(Error::Config("initial profile must be positive".into()));
    }
    if !(x_left < b) {
        return Err(Error::Config(format!(
            "x_left = {x_left} must lie behind b = {b}"
        )));
    }

    // lower edges of the segments, for walking leftwards
    let segs = profile.segments();
    let lower_of = |idx: usize| {
        if idx == 0 {
            f64::NEG_INFINITY
        } else {
            segs[idx - 1].0
        }
    };
    let segment_of = |x: f64| {
        // segment containing points just left of x
        segs.iter()
            .position(|&(upper, _)| x <= upper)
            .unwrap_or(segs.len() - 1)
    };

    let mut rev = vec![b];
    let mut q = b;
    // anchor of the current run of gaps lying inside a single segment
    let mut anchor: Option<(f64, usize, usize)> = None; // (start, segment, count)
    while q >= x_left {
        let idx = segment_of(q);
        let density = segs[idx].1;
        let lo = lower_of(idx);
        let spacing = h / density;
        if q - spacing >= lo {
            let (start, count) = match anchor {
                Some((s, seg, c)) if seg == idx => (s, c + 1),
                _ => (q, 1),
            };
            anchor = Some((start, idx, count));
            q = start - count as f64 * spacing;
        } else {
            // gap straddles one or more segment edges
            anchor = None;
            let mut remaining = h;
            let mut cur = q;
            let mut i = idx;
            loop {
                let d = segs[i].1;
                let lo = lower_of(i);
                let avail = d * (cur - lo);
                if remaining <= avail {
                    cur -= remaining / d;
                    break;
                }
                remaining -= avail;
                cur = lo;
                i -= 1;
            }
            q = cur;
        }
        rev.push(q);
    }
    rev.reverse();
    Ok(MicroState {
        positions: rev,
        h,
        t: 0.0,
        step: 0,
        vbar,
        b,
    })
}

/// Speeds of all vehicles; the leader's entry is `vbar`.
pub fn micro_velocities(
    state: &MicroState,
    kernel: &Kernel,
    model: &VelocityModel,
    rhobar: f64,
) -> Vec<f64> {
    let x = &state.positions;
    let n = x.len();
    let eta = kernel.eta();
    let rho_max = model.rho_max();
    let mut out = Vec::with_capacity(n);
    for i in 0..n - 1 {
        let xi = x[i];
        let mut avg = 0.0;
        let mut m = i;
        while m + 1 < n {
            let (a, b) = (x[m] - xi, x[m + 1] - xi);
            if a >= eta {
                break;
            }
            let density = state.h / (x[m + 1] - x[m]);
            avg += density * kernel.mass(a, b.min(eta));
            m += 1;
        }
        let reach = x[n - 1] - xi;
        if reach < eta {
            avg += rhobar * kernel.mass(reach, eta);
        }
        out.push(model.speed(avg.clamp(0.0, rho_max)));
    }
    out.push(state.vbar);
    out
}

/// `0.5 h / (rho_max max V)`, capped at `10 h / v(0)` for a standing queue.
pub fn micro_dt(speeds: &[f64], h: f64, model: &VelocityModel) -> f64 {
    let vmax = speeds.iter().copied().fold(0.0, f64::max);
    let cap = 10.0 * h / model.v0();
    if vmax <= 0.0 {
        cap
    } else {
        (MICRO_CFL * h / (model.rho_max() * vmax)).min(cap)
    }
}

fn euler_update(state: &MicroState, speeds: &[f64], dt: f64) -> Result<MicroState> {
    let n = state.positions.len();
    let t = state.t + dt;
    let step = state.step + 1;
    let mut positions: Vec<f64> = state
        .positions
        .iter()
        .zip(speeds)
        .map(|(x, v)| x + dt * v)
        .collect();
    positions[n - 1] = state.b + state.vbar * t;
    for (i, w) in positions.windows(2).enumerate() {
        let gap = w[1] - w[0];
        if !(gap > 0.0) {
            return Err(Error::Ordering {
                step,
                vehicle: i + 1,
                gap,
            });
        }
    }
    Ok(MicroState {
        positions,
        h: state.h,
        t,
        step,
        vbar: state.vbar,
        b: state.b,
    })
}

/// Explicit Euler step for followers; the leader is placed analytically.
pub fn micro_step(
    state: &MicroState,
    kernel: &Kernel,
    model: &VelocityModel,
    rhobar: f64,
    dt: f64,
) -> Result<MicroState> {
    let speeds = micro_velocities(state, kernel, model, rhobar);
    euler_update(state, &speeds, dt)
}

fn lyapunov_from_speeds(state: &MicroState, speeds: &[f64], params: &WindowParams) -> f64 {
    let (lo, hi) = window(state.t, params);
    let x = &state.positions;
    let mut total = 0.0;
    for i in 0..x.len() - 1 {
        if x[i] >= lo && x[i] < hi {
            let d = speeds[i] - params.vbar;
            total += d * d * (x[i + 1] - x[i]);
        }
    }
    total
}

/// `sum_{x_i in [beta - eta, beta)} (V_i - vbar)^2 (x_{i+1} - x_i)`.
pub fn micro_lyapunov(
    state: &MicroState,
    kernel: &Kernel,
    model: &VelocityModel,
    params: &WindowParams,
    rhobar: f64,
) -> f64 {
    let speeds = micro_velocities(state, kernel, model, rhobar);
    lyapunov_from_speeds(state, &speeds, params)
}

fn in_window(x: f64, t: f64, params: &WindowParams) -> bool {
    let (lo, hi) = window(t, params);
    x >= lo && x < hi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowEdge {
    Rear,
    Front,
}

/// A follower entering or leaving the window during one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Time at the end of the step in which membership changed.
    pub t: f64,
    pub vehicle: usize,
    pub entered: bool,
    pub edge: WindowEdge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicroRecord {
    pub t: f64,
    pub l: f64,
    pub l_bound: f64,
    pub in_window: usize,
    pub rho_min_obs: f64,
    pub rho_max_obs: f64,
}

/// Discontinuity of `ln L` between two consecutive output times.
#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub t_start: f64,
    pub t_end: f64,
    pub delta_ln_l: f64,
    /// Crossings that happened within `(t_start, t_end]`.
    pub crossings: Vec<Crossing>,
}

impl Jump {
    pub fn attributed(&self) -> bool {
        !self.crossings.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct MicroRun {
    pub records: Vec<MicroRecord>,
    pub crossings: Vec<Crossing>,
    pub jumps: Vec<Jump>,
    pub vehicles: usize,
    pub rhobar: f64,
    pub rho_min0: f64,
    pub vprime_max: f64,
    pub final_state: MicroState,
}

impl MicroRun {
    /// Records in the shared diagnostics layout; columns without a micro
    /// counterpart are `NaN`.
    pub fn diagnostics(&self) -> DiagnosticsSeries {
        DiagnosticsSeries {
            records: self
                .records
                .iter()
                .map(|r| DiagnosticsRecord {
                    t: r.t,
                    l: r.l,
                    l_bound: r.l_bound,
                    l_tilde: f64::NAN,
                    rho_min_obs: r.rho_min_obs,
                    rho_max_obs: r.rho_max_obs,
                    mass_residual: f64::NAN,
                    res_dx_v: f64::NAN,
                    res_dt_v: f64::NAN,
                })
                .collect(),
        }
    }

    pub fn jumps_csv(&self) -> String {
        let mut out = String::from("t_start,t_end,delta_lnL,crossings,vehicles\n");
        for j in &self.jumps {
            let ids: Vec<String> = j.crossings.iter().map(|c| c.vehicle.to_string()).collect();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                j.t_start,
                j.t_end,
                j.delta_ln_l,
                j.crossings.len(),
                ids.join(";")
            ));
        }
        out
    }

    pub fn crossings_csv(&self) -> String {
        let mut out = String::from("t,vehicle,entered,edge\n");
        for c in &self.crossings {
            let edge = match c.edge {
                WindowEdge::Rear => "rear",
                WindowEdge::Front => "front",
            };
            out.push_str(&format!("{},{},{},{}\n", c.t, c.vehicle, c.entered, edge));
        }
        out
    }
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

/// Flags output intervals where `|d ln L| > JUMP_FACTOR * s * dt`, with `s`
/// the median `|d ln L / dt|` over the neighbouring intervals, and attaches
/// the crossings inside each flagged interval.
pub fn detect_jumps(times: &[f64], ln_l: &[f64], crossings: &[Crossing]) -> Vec<Jump> {
    let n = times.len().min(ln_l.len());
    if n < 3 {
        return Vec::new();
    }
    let rates: Vec<f64> = (0..n - 1)
        .map(|k| ((ln_l[k + 1] - ln_l[k]) / (times[k + 1] - times[k])).abs())
        .collect();
    let mut jumps = Vec::new();
    for k in 0..n - 1 {
        let delta = ln_l[k + 1] - ln_l[k];
        if !delta.is_finite() {
            continue;
        }
        let lo = k.saturating_sub(SLOPE_NEIGHBOURHOOD);
        let hi = (k + SLOPE_NEIGHBOURHOOD + 1).min(n - 1);
        let neighbours: Vec<f64> = (lo..hi)
            .filter(|&m| m != k && rates[m].is_finite())
            .map(|m| rates[m])
            .collect();
        let Some(slope) = median(neighbours) else {
            continue;
        };
        let dt = times[k + 1] - times[k];
        if delta.abs() > JUMP_FACTOR * slope * dt {
            let hits = crossings
                .iter()
                .filter(|c| c.t > times[k] && c.t <= times[k + 1])
                .copied()
                .collect();
            jumps.push(Jump {
                t_start: times[k],
                t_end: times[k + 1],
                delta_ln_l: delta,
                crossings: hits,
            });
        }
    }
    jumps
}

/// Runs the microscopic scenario. When `trajectory` is given, `t,i,x,V` rows
/// are written to it at every output time.
pub fn run_micro(
    config: &ScenarioConfig,
    mut trajectory: Option<&mut dyn Write>,
) -> Result<MicroRun> {
    config.validate()?;
    let rhobar = config.rhobar()?;
    let model = &config.velocity;
    let kernel = &config.kernel;
    let x_left = config
        .grid
        .x_left
        .unwrap_or_else(|| config.far_field_left());
    let mut state = micro_init(
        &config.init,
        config.micro_h,
        config.b,
        config.vbar,
        x_left,
        config.eta(),
    )?;
    let params = WindowParams::new(config.b, config.vbar, config.eta())?;
    let rho_min0 = config.rho_min();
    let vprime_max = model.vprime_max(rho_min0)?;

    if let Some(w) = trajectory.as_deref_mut() {
        writeln!(w, "t,i,x,V")?;
    }

    let times = config.output_times();
    let mut records = Vec::with_capacity(times.len());
    let mut crossings = Vec::new();
    let mut speeds = micro_velocities(&state, kernel, model, rhobar);
    let mut member: Vec<bool> = state.positions[..state.len() - 1]
        .iter()
        .map(|&x| in_window(x, 0.0, &params))
        .collect();
    let mut l0 = None;

    for &t_out in &times {
        while state.t < t_out {
            let remaining = t_out - state.t;
            let mut dt = micro_dt(&speeds, state.h, model);
            let mut landing = dt >= remaining - 1e-12 * t_out.max(1.0);
            if landing {
                dt = remaining;
            }
            let mut halvings = 0;
            let next = loop {
                match euler_update(&state, &speeds, dt) {
                    Ok(s) => break s,
                    Err(e @ Error::Ordering { .. }) => {
                        if halvings == MAX_HALVINGS {
                            return Err(e);
                        }
                        halvings += 1;
                        dt *= 0.5;
                        landing = false;
                    }
                    Err(e) => return Err(e),
                }
            };
            state = next;
            if landing {
                state.t = t_out;
                let last = state.len() - 1;
                state.positions[last] = state.b + state.vbar * t_out;
            }
            let (lo, hi) = window(state.t, &params);
            for (i, flag) in member.iter_mut().enumerate() {
                let x = state.positions[i];
                let now = x >= lo && x < hi;
                if now != *flag {
                    let edge = if (x - lo).abs() <= (x - hi).abs() {
                        WindowEdge::Rear
                    } else {
                        WindowEdge::Front
                    };
                    crossings.push(Crossing {
                        t: state.t,
                        vehicle: i,
                        entered: now,
                        edge,
                    });
                    *flag = now;
                }
            }
            speeds = micro_velocities(&state, kernel, model, rhobar);
        }

        let l = lyapunov_from_speeds(&state, &speeds, &params);
        let l0 = *l0.get_or_insert(l);
        let dens = state.densities();
        records.push(MicroRecord {
            t: t_out,
            l,
            l_bound: exp_bound(l0, t_out, config.eta(), vprime_max, rho_min0)?,
            in_window: member.iter().filter(|&&m| m).count(),
            rho_min_obs: dens.iter().copied().fold(f64::INFINITY, f64::min),
            rho_max_obs: dens.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
        if let Some(w) = trajectory.as_deref_mut() {
            for (i, (x, v)) in state.positions.iter().zip(&speeds).enumerate() {
                writeln!(w, "{t_out},{i},{x},{v}")?;
            }
        }
    }

    let ts: Vec<f64> = records.iter().map(|r| r.t).collect();
    let ln_l: Vec<f64> = records
        .iter()
        .map(|r| if r.l > 0.0 { r.l.ln() } else { f64::NAN })
        .collect();
    let jumps = detect_jumps(&ts, &ln_l, &crossings);
    let vehicles = state.len();
    Ok(MicroRun {
        records,
        crossings,
        jumps,
        vehicles,
        rhobar,
        rho_min0,
        vprime_max,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn lin() -> VelocityModel {
        VelocityModel::linear(1.0, 1.0).unwrap()
    }

    fn jam() -> InitialProfile {
        InitialProfile::new(vec![(0.0, 1.0), (f64::INFINITY, 0.5)]).unwrap()
    }

    #[test]
    fn init_spacing_follows_density() {
        let s = micro_init(&jam(), 0.01, 0.0, 0.5, -0.5, 1.0).unwrap();
        assert_eq!(s.leader(), 0.0);
        let n = s.len();
        assert_abs_diff_eq!(s.positions[n - 2], -0.01, epsilon = 1e-15);
        assert_abs_diff_eq!(s.positions[n - 3], -0.02, epsilon = 1e-15);
        assert!(s.positions[0] < -0.5);
        for d in s.densities() {
            assert_abs_diff_eq!(d, 1.0, epsilon = 1e-9);
        }

        let half = micro_init(&InitialProfile::constant(0.5), 0.01, 0.0, 0.5, -0.5, 1.0).unwrap();
        let n = half.len();
        assert_abs_diff_eq!(
            half.positions[n - 1] - half.positions[n - 2],
            0.02,
            epsilon = 1e-15
        );
    }

    #[test]
    fn init_straddles_segment_edges() {
        let p = InitialProfile::new(vec![(-0.5, 0.25), (0.0, 1.0), (f64::INFINITY, 0.5)]).unwrap();
        let s = micro_init(&p, 0.1, 0.0, 0.5, -2.0, 1.0).unwrap();
        // every gap holds exactly one vehicle of mass
        for w in s.positions.windows(2) {
            assert_abs_diff_eq!(p.integral(w[0], w[1]), 0.1, epsilon = 1e-12);
        }
    }

    #[test]
    fn init_rejects_coarse_vehicles() {
        assert!(micro_init(&jam(), 1.5, 0.0, 0.5, -3.0, 1.0).is_err());
    }

    #[test]
    fn jam_packing_is_valid() {
        let s = micro_init(&InitialProfile::constant(1.0), 0.01, 0.0, 0.0, -1.0, 1.0).unwrap();
        for d in s.densities() {
            assert_abs_diff_eq!(d, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn equilibrium_speeds_and_translation() {
        let k = Kernel::constant(1.0).unwrap();
        let s = micro_init(&InitialProfile::constant(0.5), 0.01, 0.0, 0.5, -3.0, 1.0).unwrap();
        let v = micro_velocities(&s, &k, &lin(), 0.5);
        for x in &v {
            assert_abs_diff_eq!(*x, 0.5, epsilon = 1e-12);
        }
        let next = micro_step(&s, &k, &lin(), 0.5, 0.01).unwrap();
        for (a, b) in s.positions.iter().zip(&next.positions) {
            assert_abs_diff_eq!(b - a, 0.005, epsilon = 1e-12);
        }
        let params = WindowParams::new(0.0, 0.5, 1.0).unwrap();
        assert!(micro_lyapunov(&s, &k, &lin(), &params, 0.5) < 1e-20);
    }

    #[test]
    fn speeds_at_jam_release() {
        let k = Kernel::constant(1.0).unwrap();
        let s = micro_init(&jam(), 0.01, 0.0, 0.5, -2.0, 1.0).unwrap();
        let v = micro_velocities(&s, &k, &lin(), 0.5);
        for (x, v) in s.positions.iter().zip(&v) {
            if (-1.0..0.0).contains(x) {
                assert_abs_diff_eq!(*v, 0.5 + 0.5 * x, epsilon = 0.01);
            }
        }
    }

    #[test]
    fn packed_gap_gives_jam_speed() {
        let k = Kernel::constant(0.05).unwrap();
        let s = MicroState {
            positions: vec![0.0, 0.1, 0.2],
            h: 0.1,
            t: 0.0,
            step: 0,
            vbar: 0.5,
            b: 0.2,
        };
        let v = micro_velocities(&s, &k, &lin(), 0.5);
        assert_abs_diff_eq!(v[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn lone_follower_uses_one_segment_average() {
        // gap 0.4 at density 0.25 (h = 0.1), then rho_bar = 0.5 ahead
        let k = Kernel::constant(1.0).unwrap();
        let s = MicroState {
            positions: vec![-0.4, 0.0],
            h: 0.1,
            t: 0.0,
            step: 0,
            vbar: 0.5,
            b: 0.0,
        };
        let v = micro_velocities(&s, &k, &lin(), 0.5);
        let avg = 0.4 * 0.25 + 0.6 * 0.5;
        assert_abs_diff_eq!(v[0], 1.0 - avg, epsilon = 1e-15);
        let next = micro_step(&s, &k, &lin(), 0.5, 0.1).unwrap();
        assert_abs_diff_eq!(next.positions[0], -0.4 + 0.1 * (1.0 - avg), epsilon = 1e-15);
        assert_abs_diff_eq!(next.positions[1], 0.05, epsilon = 1e-15);
    }

    #[test]
    fn zero_dt_keeps_state() {
        let k = Kernel::constant(1.0).unwrap();
        let s = micro_init(&jam(), 0.01, 0.0, 0.5, -2.0, 1.0).unwrap();
        let next = micro_step(&s, &k, &lin(), 0.5, 0.0).unwrap();
        assert_eq!(next.positions, s.positions);
        assert_eq!(next.t, s.t);
    }

    #[test]
    fn overtaking_is_reported() {
        let s = MicroState {
            positions: vec![0.0, 0.01, 1.0],
            h: 0.01,
            t: 0.0,
            step: 3,
            vbar: 0.5,
            b: 1.0,
        };
        let err = euler_update(&s, &[1.0, 0.0, 0.5], 0.02).unwrap_err();
        assert!(matches!(
            err,
            Error::Ordering {
                step: 4,
                vehicle: 1,
                ..
            }
        ));
    }

    #[test]
    fn initial_lyapunov_is_riemann_sum() {
        let k = Kernel::constant(1.0).unwrap();
        let params = WindowParams::new(0.0, 0.5, 1.0).unwrap();
        // oracle: sum over x = -0.01 m, m = 1..=100, of (0.5 x)^2 * 0.01
        let oracle: f64 = (1..=100)
            .map(|m| (0.5 * 0.01 * m as f64).powi(2) * 0.01)
            .sum();
        let s = micro_init(&jam(), 0.01, 0.0, 0.5, -2.0, 1.0).unwrap();
        let l = micro_lyapunov(&s, &k, &lin(), &params, 0.5);
        assert_abs_diff_eq!(l, oracle, epsilon = 1e-10);

        // h -> 0 approaches 1/12
        let fine = micro_init(&jam(), 1e-4, 0.0, 0.5, -1.1, 1.0).unwrap();
        let l = micro_lyapunov(&fine, &k, &lin(), &params, 0.5);
        assert!((l - 1.0 / 12.0).abs() < 1e-4, "{l}");
    }

    #[test]
    fn jump_detection_on_sawtooth() {
        let times: Vec<f64> = (0..60).map(|k| k as f64 * 0.01).collect();
        let mut ln_l: Vec<f64> = times.iter().map(|t| -2.0 - t).collect();
        for v in ln_l.iter_mut().skip(30) {
            *v -= 0.5;
        }
        let crossings = vec![Crossing {
            t: 0.295,
            vehicle: 7,
            entered: false,
            edge: WindowEdge::Rear,
        }];
        let jumps = detect_jumps(&times, &ln_l, &crossings);
        assert_eq!(jumps.len(), 1);
        assert!(jumps[0].attributed());
        assert_abs_diff_eq!(jumps[0].t_end, 0.3, epsilon = 1e-12);
        assert!(detect_jumps(&times, &ln_l, &[])
            .iter()
            .all(|j| !j.attributed()));
    }
}
