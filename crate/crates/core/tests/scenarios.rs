use nlwr_core::diagnostics::{check_mass, fitted_slope};
use nlwr_core::*;

fn coarse(name: &str, dx: f64, t_end: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::preset(name).unwrap();
    cfg.grid.dx = dx;
    cfg.grid.t_end = t_end;
    cfg
}

#[test]
fn jam_release_decays_under_the_bound() {
    let run = run_macro(&coarse("fig1-const", 0.02, 8.0)).unwrap();
    let d = &run.diagnostics;
    let l0 = d.records[0].l;
    assert!((l0 - 1.0 / 12.0).abs() < 0.02 / 12.0 * 10.0);
    for pair in d.records.windows(2) {
        assert!(pair[1].l <= pair[0].l, "L grew at t = {}", pair[1].t);
    }
    for r in &d.records {
        assert!(r.l <= r.l_bound * (1.0 + 1e-6), "t = {}", r.t);
        assert!(r.rho_min_obs >= 0.5 - 1e-12 && r.rho_max_obs <= 1.0 + 1e-12);
    }
    let slope = fitted_slope(&d.times(), &d.ln_l(), 4.0, 8.0).unwrap();
    assert!(slope < -0.8, "slope {slope}");
    assert!(check_mass(run.initial_mass, &run.flux_log).passed);
}

#[test]
fn identity_residuals_recorded_for_constant_kernel_only() {
    let c = run_macro(&coarse("fig1-const", 0.02, 1.0)).unwrap();
    let inner = &c.diagnostics.records[1..c.diagnostics.len() - 1];
    assert!(inner
        .iter()
        .all(|r| r.res_dx_v.is_finite() && r.res_dt_v.is_finite()));
    assert!(c.diagnostics.records[0].res_dx_v.is_nan());
    let l = run_macro(&coarse("fig1-lin", 0.02, 1.0)).unwrap();
    assert!(l.diagnostics.records.iter().all(|r| r.res_dx_v.is_nan()));
}

#[test]
fn density_functional_starts_at_closed_form() {
    // (0.01 - 0.5)^2 * 0.5 + (0.35 - 0.5)^2 * 0.5 = 0.1313
    let run = run_macro(&coarse("fig2", 0.01, 0.2)).unwrap();
    let lt0 = run.diagnostics.records[0].l_tilde;
    assert!((lt0 - 0.1313).abs() < 1e-12, "{lt0}");
}

#[test]
fn snapshots_cover_every_output_time() {
    let mut cfg = coarse("fig1-conc", 0.05, 1.0);
    cfg.snapshots = true;
    cfg.cadence = 0.25;
    let run = run_macro(&cfg).unwrap();
    let times: Vec<f64> = run.snapshots.iter().map(|s| s.t).collect();
    assert_eq!(times, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    assert_eq!(run.snapshots[4].file_name(), "snap_t1.0000.csv");
}

#[test]
fn micro_run_keeps_order_and_logs_crossings() {
    let mut cfg = coarse("fig3-micro", 0.005, 2.0);
    cfg.micro_h = 0.02;
    let mut traj = Vec::new();
    let run = run_micro(&cfg, Some(&mut traj)).unwrap();
    let fin = &run.final_state;
    assert!(fin.positions.windows(2).all(|w| w[1] > w[0]));
    assert!((fin.leader() - 1.0).abs() < 1e-12);
    assert!(!run.crossings.is_empty());
    let text = String::from_utf8(traj).unwrap();
    assert!(text.starts_with("t,i,x,V\n"));
}

#[test]
fn resolved_text_reruns_identically() {
    let cfg = coarse("fig1-lin", 0.02, 2.0);
    let again = load_config(&to_config_text(&cfg).unwrap()).unwrap();
    let a = run_macro(&cfg).unwrap();
    let b = run_macro(&again).unwrap();
    assert_eq!(a.diagnostics.to_csv(), b.diagnostics.to_csv());
}

#[test]
fn infeasible_and_invalid_inputs_are_validation_errors() {
    let mut cfg = ScenarioConfig::preset("fig1-const").unwrap();
    cfg.vbar = 1.0;
    let err = run_macro(&cfg).unwrap_err();
    assert!(err.is_validation());

    let err = load_config("eta = -1").unwrap_err();
    assert!(err.is_validation(), "{err}");
}
