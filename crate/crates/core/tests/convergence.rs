//! Refining the grid shrinks the change in `ln L` at fixed times.

use nlwr_core::{run_macro, ScenarioConfig};

fn ln_l_at(dx: f64, times: &[f64]) -> Vec<f64> {
    let mut cfg = ScenarioConfig::preset("fig1-const").unwrap();
    cfg.grid.dx = dx;
    let run = run_macro(&cfg).unwrap();
    times
        .iter()
        .map(|&t| {
            let r = run.diagnostics.at(t).unwrap();
            assert!((r.t - t).abs() < 1e-9);
            r.l.ln()
        })
        .collect()
}

#[test]
fn ln_l_converges_under_refinement() {
    let times = [5.0, 10.0, 20.0];
    let runs: Vec<Vec<f64>> = std::thread::scope(|s| {
        let handles: Vec<_> = [0.01, 0.005, 0.0025]
            .map(|dx| s.spawn(move || ln_l_at(dx, &times)))
            .into_iter()
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for (k, t) in times.iter().enumerate() {
        let coarse = (runs[0][k] - runs[1][k]).abs();
        let fine = (runs[1][k] - runs[2][k]).abs();
        assert!(fine < coarse, "t = {t}: {coarse} then {fine}");
    }
}
