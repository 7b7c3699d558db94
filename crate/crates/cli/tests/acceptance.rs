//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Set `ACCEPTANCE_ONLY=4,13` to run a subset while iterating locally.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use qsc_cli::config::{self, ExperimentConfig};
use qsc_cli::summary::read_summary;
use qsc_cli::{run, SummaryRow};
use qsc_core::adiabatic::{
    average_law, exact_propagator, hermitian_spectrum, moving_frame_hamiltonian,
    moving_frame_hamiltonian_at, propagator_distance, run_exact, trotter_propagator, QscMode,
    Schedule,
};
use qsc_core::graph::{gen_regular, gen_star, Graph};
use qsc_core::prep2q::{label_index, prepare_two_qubit};
use qsc_core::prs::{empirical_distribution, sample_once, HaltCondition};
use qsc_core::qsc::{
    check_alpha_halt_structure, prepare_distribution, round_distribution_equivalence,
    verify_gibbs_law, AncillaMode,
};
use qsc_core::seed;
use qsc_core::sim::{StateVector, C64};
use qsc_core::stabilizer::{
    build_stabilizer, build_syndrome_unitary, check_stabilizer_algebra, Constraint,
};
use qsc_core::stats::log_log_slope;
use rand::Rng;
use rand_distr::StandardNormal;

type Outcome = (bool, String);

fn law_graphs() -> Vec<(&'static str, Graph)> {
    vec![
        ("K2", Graph::complete(2).unwrap()),
        ("P3", Graph::path(3).unwrap()),
        ("C5", Graph::cycle(5).unwrap()),
        ("triangle", Graph::complete(3).unwrap()),
        ("Petersen", Graph::petersen()),
    ]
}

fn gibbs_law_exactness() -> Outcome {
    let (mut worst_dev, mut worst_leak): (f64, f64) = (0.0, 0.0);
    for (_, g) in law_graphs() {
        for lambda in [0.3, 1.0, 2.0] {
            for s in 0..5 {
                let r = prepare_distribution(
                    &g,
                    lambda,
                    HaltCondition::full(),
                    s,
                    AncillaMode::Implicit,
                )
                .unwrap();
                let dev = verify_gibbs_law(&r, &g, lambda).unwrap();
                worst_dev = worst_dev.max(dev.max_deviation);
                worst_leak = worst_leak.max(dev.non_is_weight);
            }
        }
    }
    (
        worst_dev < 1e-9 && worst_leak < 1e-12,
        format!("max deviation {worst_dev:.2e} (< 1e-9), non-IS weight {worst_leak:.2e} (< 1e-12)"),
    )
}

fn round_equivalence() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, g) in [
        ("K2", Graph::complete(2).unwrap()),
        ("P3", Graph::path(3).unwrap()),
    ] {
        for lambda in [0.5, 1.0] {
            let cmp = round_distribution_equivalence(&g, lambda, 10_000, 11).unwrap();
            ok &= cmp.test.p_value > 1e-3;
            parts.push(format!("{name} λ={lambda}: p={:.3}", cmp.test.p_value));
        }
    }
    (ok, format!("{} (each > 1e-3)", parts.join(", ")))
}

fn classical_law() -> Outcome {
    let mut graphs = law_graphs();
    graphs.push(("3-regular-12", gen_regular(12, 3, 5).unwrap()));
    let mut min_p: f64 = 1.0;
    for (k, (_, g)) in graphs.iter().enumerate() {
        for (j, lambda) in [0.3, 1.0, 2.0].into_iter().enumerate() {
            let law = empirical_distribution(g, lambda, 30_000, 100 * k as u64 + j as u64).unwrap();
            min_p = min_p.min(law.test.p_value);
        }
    }
    (
        min_p > 1e-3,
        format!("smallest chi-square p-value {min_p:.4} over 18 cases (> 1e-3)"),
    )
}

struct PresetRun {
    first: PathBuf,
    identical: bool,
    detail: String,
}

fn preset_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("presets")
}

fn run_preset(path: &Path, out: &Path) -> ExperimentConfig {
    let mut overrides = toml::Table::new();
    overrides.insert(
        "out_dir".into(),
        toml::Value::String(out.display().to_string()),
    );
    let cfg = config::load(path, overrides).unwrap();
    run(&cfg, cfg.command).unwrap();
    cfg
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

/// Every preset, run twice into separate directories.
fn presets() -> &'static BTreeMap<String, PresetRun> {
    static RUNS: OnceLock<BTreeMap<String, PresetRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let root = std::env::temp_dir().join(format!("qsc-acceptance-{}", std::process::id()));
        let mut paths: Vec<PathBuf> = fs::read_dir(preset_dir())
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        paths.sort();
        paths
            .into_iter()
            .map(|p| {
                let name = p.file_stem().unwrap().to_string_lossy().into_owned();
                let (a, b) = (root.join(&name).join("a"), root.join(&name).join("b"));
                run_preset(&p, &a);
                run_preset(&p, &b);
                let (fa, fb) = (dir_bytes(&a), dir_bytes(&b));
                let identical = !fa.is_empty() && fa == fb;
                let detail = format!(
                    "{name}: {} files {}",
                    fa.len(),
                    if identical { "identical" } else { "DIFFER" }
                );
                (
                    name,
                    PresetRun {
                        first: a,
                        identical,
                        detail,
                    },
                )
            })
            .collect()
    })
}

fn preset_summary(name: &str) -> Vec<SummaryRow> {
    let run = &presets()[name];
    read_summary(fs::File::open(run.first.join("summary.csv")).unwrap()).unwrap()
}

fn mean_slope(rows: &[&SummaryRow]) -> f64 {
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let means: Vec<f64> = rows.iter().map(|r| r.mean_rounds.unwrap()).collect();
    log_log_slope(&ns, &means)
}

fn regular_scaling() -> Outcome {
    let rows = preset_summary("fig4_right_regular");
    let mut ok = true;
    let mut parts = Vec::new();
    let mut lambdas: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    lambdas.dedup();
    for &lambda in lambdas.iter().filter(|&&l| l <= 0.7 + 1e-12) {
        let series: Vec<&SummaryRow> = rows.iter().filter(|r| r.lambda == lambda).collect();
        let slope = mean_slope(&series);
        ok &= slope < 1.0;
        parts.push(format!("λ={lambda}: {slope:.2}"));
    }
    let at = |n: usize| {
        rows.iter()
            .find(|r| r.lambda == 1.0 && r.n == n)
            .and_then(|r| r.mean_rounds)
            .unwrap()
    };
    let ratio = at(80) / at(40);
    ok &= ratio > 2.0;
    (
        ok,
        format!(
            "slopes for λ ≤ 0.7 [{}] (< 1.0); λ=1 mean(80)/mean(40) = {ratio:.1} (> 2)",
            parts.join(", ")
        ),
    )
}

fn planar_scaling() -> Outcome {
    let d2 = preset_summary("fig3_planar_d2");
    let slope = mean_slope(
        &d2.iter()
            .filter(|r| (10..=80).contains(&r.n))
            .collect::<Vec<_>>(),
    );
    let d4 = preset_summary("fig3_planar_d4");
    let censored: Vec<(usize, u64)> = d4
        .iter()
        .filter(|r| (30..=80).contains(&r.n) && r.censored_count > 0)
        .map(|r| (r.n, r.censored_count))
        .collect();
    (
        slope < 0.5 && !censored.is_empty(),
        format!("d=2 log-log slope {slope:.2} (< 0.5); d=4 censored (n, count) at cap 5e5: {censored:?} (nonempty)"),
    )
}

fn alpha_halting() -> Outcome {
    let rows = preset_summary("fig4_left_alpha");
    let slope = mean_slope(&rows.iter().collect::<Vec<_>>());
    let mut runs = 0;
    let mut structured = true;
    for n in [4usize, 6, 8, 10] {
        for t in 0..50 {
            let g = gen_regular(n, 3, seed::derive(77, &[n as u64, t])).unwrap();
            let halt = HaltCondition::alpha_fraction(0.10).unwrap();
            let r = prepare_distribution(&g, 1.0, halt, t, AncillaMode::Implicit).unwrap();
            structured &= check_alpha_halt_structure(&r, &g).unwrap();
            runs += 1;
        }
    }
    (
        slope <= 1.0 && structured,
        format!("α=0.10 log-log slope {slope:.2} (≤ 1.0); structure check on {runs} quantum runs n ≤ 10: {structured}"),
    )
}

fn single_edge_rounds() -> Outcome {
    let g = Graph::complete(2).unwrap();
    let trials = 100_000u64;
    let sigma = ((0.25 / 0.5625) / trials as f64).sqrt();
    let classical: f64 = (0..trials)
        .map(|t| {
            sample_once(&g, 1.0, HaltCondition::full(), t)
                .unwrap()
                .rounds as f64
        })
        .sum::<f64>()
        / trials as f64;
    let quantum: f64 = (0..trials)
        .map(|t| {
            prepare_distribution(&g, 1.0, HaltCondition::full(), t, AncillaMode::Implicit)
                .unwrap()
                .rounds as f64
        })
        .sum::<f64>()
        / trials as f64;
    let target = 4.0 / 3.0;
    (
        (classical - target).abs() < 3.0 * sigma && (quantum - target).abs() < 3.0 * sigma,
        format!(
            "classical {classical:.4}, quantum {quantum:.4}, target 1.3333 ± {:.4} (3σ)",
            3.0 * sigma
        ),
    )
}

fn printed_syndrome() -> Vec<Vec<u8>> {
    let swapped = [(6, 7), (10, 11), (12, 13), (14, 15)];
    (0..16)
        .map(|r| {
            (0..16)
                .map(|c| {
                    let partner = swapped.iter().find_map(|&(a, b)| {
                        if r == a {
                            Some(b)
                        } else if r == b {
                            Some(a)
                        } else {
                            None
                        }
                    });
                    u8::from(partner.map_or(r == c, |p| p == c))
                })
                .collect()
        })
        .collect()
}

fn stabilizer_matrices() -> Outcome {
    let edge = build_stabilizer(&Constraint::is_edge()).diagonal() == [1, 1, 1, -1];
    let a6 = build_stabilizer(&Constraint::one_hot(3).unwrap()).diagonal()
        == [-1, 1, 1, -1, 1, -1, -1, -1];
    let a8 = build_syndrome_unitary(&Constraint::at_most_one(3).unwrap()).to_dense()
        == printed_syndrome();
    let mut shipped = vec![Constraint::is_edge()];
    for k in 1..=6 {
        shipped.push(Constraint::one_hot(k).unwrap());
        shipped.push(Constraint::at_most_one(k).unwrap());
    }
    let mut rng = seed::rng(8);
    let random: Vec<Constraint> = (0..100)
        .map(|_| {
            let k = rng.random_range(1..=6);
            Constraint::from_truth_table((0..1 << k).map(|_| rng.random()).collect(), "random")
                .unwrap()
        })
        .collect();
    let algebra = shipped.iter().chain(&random).all(|c| {
        let k = c.arity();
        let g = build_syndrome_unitary(c);
        check_stabilizer_algebra(&[(c.clone(), (0..k).collect())], k)
            .unwrap()
            .passed()
            && g.is_permutation()
            && g.is_involution()
    });
    let pairs = random.chunks(2).all(|p| {
        let n = p[0].arity() + p[1].arity();
        let items = vec![
            (p[0].clone(), (0..p[0].arity()).collect()),
            (p[1].clone(), (p[0].arity()..n).rev().collect()),
        ];
        check_stabilizer_algebra(&items, n).unwrap().passed()
    });
    (
        edge && a6 && a8 && algebra && pairs,
        format!(
            "edge diag {edge}, one-hot(3) diagonal {a6}, 16×16 syndrome {a8}, algebra on {} shipped + 100 random {algebra}, jointly placed pairs {pairs}",
            shipped.len()
        ),
    )
}

fn adiabatic_exactness() -> Outcome {
    let g = Graph::complete(2).unwrap();
    let s = Schedule::for_graph(2, 1).with_total_time(16.0);
    let substeps = (s.total_time * s.delta * 800.0) as usize;
    let r = run_exact(&g, &s, substeps).unwrap();
    let weight = r.law.probabilities[1] + r.law.probabilities[2];
    let singlet = [0.0, 1.0, -1.0, 0.0].map(|x: f64| x / 2f64.sqrt());
    let mut singlet_err: f64 = 0.0;
    for k in 0..=32 {
        let (values, vectors) = hermitian_spectrum(&moving_frame_hamiltonian(k as f64 * 0.5, &s));
        let best = (0..4)
            .max_by(|&a, &b| {
                let ov = |c: usize| {
                    (0..4)
                        .map(|r| vectors[(r, c)] * singlet[r])
                        .sum::<C64>()
                        .norm()
                };
                ov(a).total_cmp(&ov(b))
            })
            .unwrap();
        singlet_err = singlet_err.max((values[best] + s.delta).abs());
    }
    let mut gap_err: f64 = 0.0;
    for (theta, phi) in [(0.3, 0.0), (1.2, 2.0), (2.9, -1.0)] {
        let (values, _) =
            hermitian_spectrum(&moving_frame_hamiltonian_at(theta, phi, 1e-4, 1e-4, 1.0));
        gap_err = gap_err.max((values[3] - values[0] - 4.0).abs());
    }
    (
        weight >= 0.99 && singlet_err < 1e-8 && gap_err < 1e-3,
        format!("K2 T=16 weight on 01/10 {weight:.5} (≥ 0.99); singlet energy error {singlet_err:.1e} (< 1e-8); gap error {gap_err:.1e} (< 1e-3)"),
    )
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

fn trotter_convergence() -> Outcome {
    let k2 = convergence_slope(&Graph::complete(2).unwrap());
    let p3 = convergence_slope(&Graph::path(3).unwrap());
    (
        (k2 - 1.0).abs() <= 0.15 && (p3 - 1.0).abs() <= 0.15,
        format!("slopes K2 {k2:.3}, P3 {p3:.3} (1.0 ± 0.15)"),
    )
}

fn correction_on_stars() -> Outcome {
    let trials = 32;
    let mut ok = true;
    let mut parts = Vec::new();
    for leaves in [4usize, 5] {
        let g = gen_star(leaves).unwrap();
        let base = Schedule::for_graph(g.n(), 1);
        let mut best = (0, f64::NEG_INFINITY);
        for nt in [25, 50, 100, 200, 400, 800, 1600] {
            let s = base
                .with_trotter_steps(nt)
                .with_qsc_interval(qsc_core::adiabatic::default_qsc_interval(nt));
            let off = average_law(&g, &s, QscMode::Off, trials, 5).unwrap();
            let on = average_law(&g, &s, QscMode::IsolatedEdge, trials, 5).unwrap();
            let gain = on.figure_of_merit - off.figure_of_merit;
            if gain > best.1 {
                best = (nt, gain);
            }
        }
        let start = (16.0 * base.total_time * base.delta) as usize;
        let tvs: Vec<f64> = (0..4)
            .map(|k| {
                let nt = start * 4usize.pow(k);
                let s = base
                    .with_trotter_steps(nt)
                    .with_qsc_interval(qsc_core::adiabatic::default_qsc_interval(nt));
                let off = average_law(&g, &s, QscMode::Off, trials, 6).unwrap();
                let on = average_law(&g, &s, QscMode::IsolatedEdge, trials, 6).unwrap();
                on.tv_distance(&off)
            })
            .collect();
        // Trend over the sweep: single steps can tick up through the
        // measurement-disturbance bump and the finite-trajectory noise floor.
        let nts: Vec<f64> = (0..4).map(|k| (start * 4usize.pow(k)) as f64).collect();
        let trend = log_log_slope(&nts, &tvs);
        let decreasing = trend < 0.0 && tvs[3] < tvs[0];
        ok &= best.1 >= 0.1 && decreasing;
        parts.push(format!(
            "{leaves}-leaf: best gain {:.3} at N_T={} (≥ 0.1), TV from N_T={start} ×4: {:?}, log-log trend {trend:.2} (< 0, last < first)",
            best.1,
            best.0,
            tvs.iter().map(|t| format!("{t:.3}")).collect::<Vec<_>>()
        ));
    }
    (ok, parts.join("; "))
}

fn two_qubit_preparation() -> Outcome {
    let mut rng = seed::rng(2024);
    let mut worst: f64 = 1.0;
    for _ in 0..100 {
        let mut v = [C64::new(0.0, 0.0); 4];
        for a in v.iter_mut() {
            *a = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps = v.map(|a| a / norm);
        let seq = prepare_two_qubit(amps[0], amps[1], amps[2], amps[3]).unwrap();
        let mut psi = StateVector::zero(2).unwrap();
        seq.apply(&mut psi, 0, 1).unwrap();
        let mut want = vec![C64::new(0.0, 0.0); 4];
        for (k, a) in amps.iter().enumerate() {
            want[label_index(k & 2 != 0, k & 1 != 0, 0, 1)] = *a;
        }
        worst = worst.min(psi.fidelity(&StateVector::from_amplitudes(want).unwrap()));
    }
    (
        worst >= 1.0 - 1e-10,
        format!(
            "worst fidelity over 100 Haar targets 1 - {:.1e} (≥ 1 - 1e-10)",
            1.0 - worst
        ),
    )
}

fn preset_determinism() -> Outcome {
    let runs = presets();
    (
        !runs.is_empty() && runs.values().all(|r| r.identical),
        runs.values()
            .map(|r| r.detail.clone())
            .collect::<Vec<_>>()
            .join("; "),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

#[test]
fn acceptance() {
    let criteria: [Criterion; 13] = [
        (1, "Gibbs-law exactness", gibbs_law_exactness),
        (2, "classical-quantum round equivalence", round_equivalence),
        (3, "classical distribution law", classical_law),
        (4, "3-regular scaling", regular_scaling),
        (5, "planar scaling", planar_scaling),
        (6, "alpha-halting", alpha_halting),
        (7, "single-edge rounds", single_edge_rounds),
        (8, "stabilizer matrices", stabilizer_matrices),
        (9, "adiabatic exactness", adiabatic_exactness),
        (10, "Trotter convergence", trotter_convergence),
        (11, "correction on star graphs", correction_on_stars),
        (12, "two-qubit preparation", two_qubit_preparation),
        (13, "preset determinism", preset_determinism),
    ];
    let only: Option<Vec<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let (pass, detail) = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        // Written to the raw handle so the report survives output capture.
        writeln!(
            std::io::stdout(),
            "criterion {id:>2} {}: {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        )
        .unwrap();
        if !pass {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
