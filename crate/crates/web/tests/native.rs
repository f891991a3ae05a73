use nlwr_web::{initial_segments, kernel_weights_native, micro_trace_native, MacroSim};

#[test]
fn weights_sum_to_one() {
    for kind in ["constant", "linear", "concave"] {
        let w = kernel_weights_native(kind, 1.0, 0.01).unwrap();
        assert_eq!(w.len(), 100);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12, "{kind}");
    }
    assert!(kernel_weights_native("gauss", 1.0, 0.01).is_err());
}

#[test]
fn macro_sim_decays_under_bound() {
    let mut sim = MacroSim::create("constant", 1.0, 0.5, 0.02).unwrap();
    let x = sim.x();
    assert_eq!(x.len(), sim.density().len());
    assert_eq!(x.len(), sim.velocity().len());
    assert!(x[0] < -5.9 && *x.last().unwrap() > 1.9);
    let l0 = sim.ln_l();
    assert!((sim.bound() - l0).abs() < 1e-12);
    sim.advance(3.0).unwrap();
    assert!((sim.time() - 3.0).abs() < 1e-12);
    assert!((sim.beta() - 1.5).abs() < 1e-12);
    assert!(sim.ln_l() < l0 - 1.0);
    assert!(sim.ln_l() <= sim.bound() + 1e-6);
    assert!(sim
        .density()
        .iter()
        .all(|r| (0.5 - 1e-12..=1.0 + 1e-12).contains(r)));
}

#[test]
fn macro_sim_rejects_bad_input() {
    assert!(MacroSim::create("wavy", 1.0, 0.5, 0.01).is_err());
    assert!(MacroSim::create("constant", 1.0, 1.0, 0.01).is_err());
    assert!(MacroSim::create("constant", -1.0, 0.5, 0.01).is_err());
}

#[test]
fn micro_trace_is_triples() {
    let tr = micro_trace_native("constant", 1.0, 0.5, 0.05, 2.0, 0.1).unwrap();
    assert_eq!(tr.len() % 3, 0);
    assert_eq!(tr.len() / 3, 21);
    assert_eq!(tr[0], 0.0);
    assert!((tr[1] - tr[2]).abs() < 1e-12);
    assert!(tr[tr.len() - 2] < tr[1]);
}

#[test]
fn initial_segments_are_pairs() {
    assert_eq!(initial_segments(), vec![0.0, 1.0, f64::INFINITY, 0.5]);
}
