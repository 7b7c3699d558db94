use std::f64::consts::PI;

use qsc_core::adiabatic::*;
use qsc_core::graph::{gen_star, Graph};
use qsc_core::seed;
use qsc_core::stats::log_log_slope;

fn k2() -> Graph {
    Graph::complete(2).unwrap()
}

/// Reference steps keep `4Δh` near 1/200.
fn reference_steps(s: &Schedule) -> usize {
    (s.total_time * s.delta * 800.0) as usize
}

#[test]
fn k2_exact_run_reaches_mis() {
    let s = Schedule::for_graph(2, 1).with_total_time(16.0);
    let r = run_exact(&k2(), &s, reference_steps(&s)).unwrap();
    let p = &r.law.probabilities;
    assert!(p[1] + p[2] > 0.99, "weight on 01/10: {}", p[1] + p[2]);
    assert!((r.law.figure_of_merit - (p[1] + p[2])).abs() < 1e-12);
}

#[test]
fn slow_schedule_keeps_violation_weight_small() {
    let s = Schedule::for_graph(2, 1)
        .with_total_time(16.0)
        .with_delta(160.0);
    let r = run_exact(&k2(), &s, reference_steps(&s)).unwrap();
    assert!(r.peak_violation < 1e-4, "peak {}", r.peak_violation);
}

#[test]
fn edgeless_graph_flips_every_qubit() {
    let g = Graph::empty(4).unwrap();
    let r = run_exact(&g, &Schedule::for_graph(4, 1), 2000).unwrap();
    assert!((r.law.size_probabilities[4] - 1.0).abs() < 1e-10);
    let t = run_trotter(
        &g,
        &Schedule::for_graph(4, 50),
        QscMode::Off,
        &mut seed::rng(0),
    )
    .unwrap();
    assert!((t.law.size_probabilities[4] - 1.0).abs() < 1e-10);
}

#[test]
fn triangle_figure_of_merit_grows_with_time() {
    let g = Graph::complete(3).unwrap();
    let mut last = 0.0;
    for total in [1.0, 4.0, 9.0] {
        let s = Schedule::for_graph(3, 1)
            .with_total_time(total)
            .with_delta(9.0);
        let r = run_exact(&g, &s, reference_steps(&s)).unwrap();
        assert!(
            r.law.figure_of_merit >= last - 1e-9,
            "T = {total}: {}",
            r.law.figure_of_merit
        );
        last = r.law.figure_of_merit;
    }
    assert!(last > 0.99, "T = 9: {last}");
}

#[test]
fn singlet_energy_is_constant() {
    let s = Schedule::for_graph(2, 1).with_total_time(16.0);
    let singlet = [0.0, 1.0, -1.0, 0.0].map(|x: f64| x / 2f64.sqrt());
    for k in 0..=32 {
        let t = k as f64 * 0.5;
        let h = moving_frame_hamiltonian(t, &s);
        let (values, vectors) = hermitian_spectrum(&h);
        let (best, overlap) = (0..4)
            .map(|c| {
                (
                    c,
                    (0..4)
                        .map(|r| vectors[(r, c)] * singlet[r])
                        .sum::<qsc_core::sim::C64>()
                        .norm(),
                )
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!(overlap > 1.0 - 1e-10, "t = {t}: overlap {overlap}");
        assert!(
            (values[best] + s.delta).abs() < 1e-8,
            "t = {t}: {}",
            values[best]
        );
    }
}

#[test]
fn leakage_gap_is_four_delta_at_slow_rates() {
    let delta = 1.0;
    for (theta, phi) in [(0.3, 0.0), (1.2, 2.0), (2.9, -1.0)] {
        let rate = 1e-4;
        let (values, vectors) =
            hermitian_spectrum(&moving_frame_hamiltonian_at(theta, phi, rate, rate, delta));
        let top = vectors[(3, 3)].norm_sqr();
        assert!(top > 1.0 - 1e-6, "|11⟩ weight of top state {top}");
        let gap = values[3] - values[0];
        assert!((gap - 4.0 * delta).abs() < 1e-3, "gap {gap}");
    }
    let (values, _) = hermitian_spectrum(&moving_frame_hamiltonian_at(0.7, 0.4, 0.0, 0.0, 2.0));
    for (v, e) in values.iter().zip([-2.0, -2.0, -2.0, 6.0]) {
        assert!((v - e).abs() < 1e-12);
    }
}

#[test]
fn moving_frame_generator_matches_midpoint_evolution() {
    // one short step under the frame generator equals the frame change
    let s = Schedule::for_graph(2, 1).with_total_time(4.0);
    let (t, h) = (1.1, 1e-4);
    let gen = moving_frame_hamiltonian(t + 0.5 * h, &s);
    let mut psi = qsc_core::sim::StateVector::basis(2, 1).unwrap();
    let before = psi.clone();
    psi.apply_1q_all(&s.u_b(t + h).dagger().mul(&s.u_b(t)));
    let phases: Vec<_> = constraint_energies(&k2(), s.delta)
        .iter()
        .map(|&e| qsc_core::sim::C64::from_polar(1.0, -h * e))
        .collect();
    psi.apply_diagonal_phase(&phases).unwrap();
    let i = qsc_core::sim::C64::new(0.0, 1.0);
    for r in 0..4 {
        let deriv: qsc_core::sim::C64 =
            (0..4).map(|c| -i * gen[(r, c)] * before.amplitude(c)).sum();
        let fd = (psi.amplitude(r) - before.amplitude(r)) / h;
        assert!(
            (deriv - fd).norm() < 1e-2 * (1.0 + s.delta),
            "row {r}: {deriv} vs {fd}"
        );
    }
}

fn convergence_slope(g: &Graph) -> f64 {
    let base = Schedule::for_graph(g.n(), 1);
    let a = 320.0 * base.total_time * base.delta;
    let reference = exact_propagator(g, &base, (a * 300.0) as usize).unwrap();
    let (mut dts, mut dists) = (Vec::new(), Vec::new());
    for m in [1.0, 2.0, 5.0, 10.0] {
        let s = base.with_trotter_steps((a * m) as usize);
        dts.push(s.dt());
        dists.push(propagator_distance(
            &trotter_propagator(g, &s).unwrap(),
            &reference,
        ));
    }
    log_log_slope(&dts, &dists)
}

#[test]
fn trotter_error_is_first_order_on_k2() {
    let slope = convergence_slope(&k2());
    assert!((slope - 1.0).abs() <= 0.15, "slope {slope}");
}

#[test]
fn trotter_error_is_first_order_on_p3() {
    let slope = convergence_slope(&Graph::path(3).unwrap());
    assert!((slope - 1.0).abs() <= 0.15, "slope {slope}");
}

#[test]
fn both_product_forms_agree() {
    for g in [k2(), Graph::path(3).unwrap(), gen_star(3).unwrap()] {
        for nt in [7, 40, 300] {
            let s = Schedule::for_graph(g.n(), nt);
            let lab = run_trotter_lab_form(&g, &s).unwrap().probabilities();
            let frame = run_trotter(&g, &s, QscMode::Off, &mut seed::rng(0))
                .unwrap()
                .law
                .probabilities;
            for (a, b) in lab.iter().zip(&frame) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn single_edge_recovery_is_exact() {
    for nt in [8, 40, 200] {
        let s = Schedule::for_graph(2, nt);
        let r = run_trotter(&k2(), &s, QscMode::IsolatedEdge, &mut seed::rng(nt as u64)).unwrap();
        assert!(!r.post_round_violation.is_empty());
        assert!(r.post_round_violation.iter().all(|&w| w < 1e-12));
    }
}

#[test]
fn correction_helps_on_four_leaf_star() {
    let g = gen_star(4).unwrap();
    let s = Schedule::for_graph(5, 100);
    let off = average_law(&g, &s, QscMode::Off, 1, 3).unwrap();
    let on = average_law(&g, &s, QscMode::IsolatedEdge, 50, 3).unwrap();
    assert!(
        on.figure_of_merit >= off.figure_of_merit,
        "{} < {}",
        on.figure_of_merit,
        off.figure_of_merit
    );
    assert!(on.violation_weight < off.violation_weight);
}

#[test]
fn correction_runs_are_reproducible() {
    let g = gen_star(3).unwrap();
    let s = Schedule::for_graph(4, 60);
    let a = run_trotter(&g, &s, QscMode::IsolatedEdge, &mut seed::rng(11)).unwrap();
    let b = run_trotter(&g, &s, QscMode::IsolatedEdge, &mut seed::rng(11)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn isolated_edge_track() {
    let s = Schedule::for_graph(2, 1)
        .with_total_time(16.0)
        .with_delta(1600.0);
    let times: Vec<f64> = (0..=64).map(|k| k as f64 * 0.25).collect();
    let states = isolated_edge_states(&s, &times).unwrap();
    assert!((states[0].probabilities()[0] - 1.0).abs() < 1e-15);
    for (t, psi) in times.iter().zip(&states) {
        assert!(
            (psi.norm_sqr() - 1.0).abs() < 1e-12,
            "norm {}",
            psi.norm_sqr()
        );
        assert!(psi.probabilities()[3] < 1e-6, "t = {t}");
    }
    let single = isolated_edge_state(times[10], &s).unwrap();
    assert!(single.fidelity(&states[10]) > 1.0 - 1e-8);
    assert!(isolated_edge_states(&s, &[2.0, 1.0]).is_err());
}

#[test]
fn literal_rate_convention() {
    let s = Schedule::for_graph(2, 10).with_theta(ThetaConvention::LiteralRate);
    let t = s.total_time;
    assert!((s.theta(t) - PI * t / 2.0).abs() < 1e-12);
    assert!((s.theta_dot(1.5) - PI * 1.5 / t).abs() < 1e-12);
    assert_eq!(
        "literal-rate".parse::<ThetaConvention>().unwrap(),
        ThetaConvention::LiteralRate
    );
    assert!("quadratic".parse::<ThetaConvention>().is_err());
}

#[test]
fn size_guard() {
    let g = Graph::empty(13).unwrap();
    assert!(run_exact(&g, &Schedule::for_graph(13, 1), 10).is_err());
}
