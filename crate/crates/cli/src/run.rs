//! Subcommand implementations. Each writes its artifacts into `out_dir`
//! from a single thread after all trials are collected.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use qsc_core::adiabatic::{
    self, average_law, default_delta, default_qsc_interval, QscMode, Schedule,
};
use qsc_core::graph::{gen_star, Graph};
use qsc_core::prs::{run_trial, sample_with_rng, ExperimentSpec, HaltCondition, RuntimeRecord};
use qsc_core::qsc::{
    check_alpha_halt_structure, gibbs_law, prepare_with_rng, verify_gibbs_law,
    LAW_CHECK_MAX_VERTICES,
};
use qsc_core::seed;
use qsc_core::stabilizer::{build_stabilizer, build_syndrome_unitary, Constraint};
use qsc_core::stats::{chi_square_gof, chi_square_two_sample};
use rand::Rng;
use serde::Serialize;

use crate::config::{Command, ExperimentConfig, QscSetting};
use crate::error::CliError;
use crate::summary::{read_summary, summarize, write_raw, write_summary};
use crate::svg::emit_svg;

pub const RAW_CSV: &str = "raw.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const SCALING_SVG: &str = "scaling.svg";
pub const QSIM_JSON: &str = "qsim.json";
pub const STABILIZER_TXT: &str = "stabilizer.txt";
pub const ADIABATIC_CSV: &str = "adiabatic.csv";

/// Files written by a run, plus warnings worth showing the user.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl RunReport {
    fn write(&mut self, dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = dir.join(name);
        fs::write(&path, bytes)?;
        self.written.push(path);
        Ok(())
    }
}

pub fn run(cfg: &ExperimentConfig, command: Command) -> Result<RunReport, CliError> {
    fs::create_dir_all(&cfg.out_dir)?;
    match command {
        Command::Sample => run_sample(cfg),
        Command::Qsim => run_qsim(cfg),
        Command::Stabilizer => run_stabilizer(cfg),
        Command::Adiabatic => run_adiabatic(cfg),
        Command::Plot => run_plot(cfg),
    }
}

/// Applies `f` to every item on `threads` workers and returns the results
/// in item order. The first error (in item order) wins.
pub fn parallel_map<T, U, F>(items: &[T], threads: usize, f: F) -> Result<Vec<U>, CliError>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U, CliError> + Sync,
{
    if threads <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<U, CliError>>>> =
        Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads.min(items.len()) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= items.len() {
                    break;
                }
                let r = f(&items[k]);
                slots.lock().unwrap()[k] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every item is processed"))
        .collect()
}

fn halt_condition(cfg: &ExperimentConfig) -> Result<HaltCondition, CliError> {
    let halt = match cfg.alpha {
        Some(a) => HaltCondition::alpha_fraction(a)?,
        None => HaltCondition::full(),
    };
    Ok(halt.with_cap(cfg.max_rounds))
}

/// Trial specs in output order: λ as listed, then n, then trial index.
fn sample_specs(cfg: &ExperimentConfig) -> Result<Vec<ExperimentSpec>, CliError> {
    let halt = halt_condition(cfg)?;
    Ok(cfg
        .lambdas
        .iter()
        .map(|&lambda| ExperimentSpec {
            class: cfg.graph_class,
            n_values: cfg.n_values(),
            d: cfg.d,
            lambda,
            halt,
            trials_per_point: cfg.trials,
            base_seed: cfg.seed,
        })
        .collect())
}

/// Per-trial records of a sampling sweep, in deterministic order.
pub fn sample_records(cfg: &ExperimentConfig) -> Result<Vec<RuntimeRecord>, CliError> {
    let specs = sample_specs(cfg)?;
    let jobs: Vec<(usize, usize, u64)> = specs
        .iter()
        .enumerate()
        .flat_map(|(s, spec)| {
            spec.n_values
                .iter()
                .flat_map(move |&n| (0..spec.trials_per_point).map(move |t| (s, n, t)))
        })
        .collect();
    parallel_map(&jobs, cfg.threads, |&(s, n, t)| {
        Ok(run_trial(&specs[s], n, t)?)
    })
}

fn run_sample(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let records = sample_records(cfg)?;
    let rows = summarize(&records);
    let mut report = RunReport::default();
    let mut raw = Vec::new();
    write_raw(&mut raw, &records)?;
    report.write(&cfg.out_dir, RAW_CSV, &raw)?;
    let mut summary = Vec::new();
    write_summary(&mut summary, &rows)?;
    report.write(&cfg.out_dir, SUMMARY_CSV, &summary)?;
    if cfg.svg {
        if rows.iter().any(|r| r.mean_rounds.is_some()) {
            let plot = emit_svg(&rows, cfg.axes.into())?;
            report.warnings.extend(plot.warnings);
            report.write(&cfg.out_dir, SCALING_SVG, plot.document.as_bytes())?;
        } else {
            report
                .warnings
                .push("no finished trials; plot skipped".into());
        }
    }
    Ok(report)
}

fn run_plot(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let input = cfg
        .plot_input
        .clone()
        .unwrap_or_else(|| cfg.out_dir.join(SUMMARY_CSV));
    let file = fs::File::open(&input)
        .map_err(|e| CliError::Config(format!("{}: {e}", input.display())))?;
    let rows = read_summary(file)?;
    let plot = emit_svg(&rows, cfg.axes.into())?;
    let mut report = RunReport {
        warnings: plot.warnings,
        ..Default::default()
    };
    report.write(&cfg.out_dir, SCALING_SVG, plot.document.as_bytes())?;
    Ok(report)
}

/// The single graph used by `qsim` and `adiabatic`: a file, a star, or a
/// generated member of `graph_class` with `n_min` vertices.
pub fn single_graph(cfg: &ExperimentConfig) -> Result<Graph, CliError> {
    if let Some(path) = &cfg.graph_file {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        return Graph::parse_text(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())));
    }
    if let Some(leaves) = cfg.star {
        return Ok(gen_star(leaves)?);
    }
    let key = seed::label_key(cfg.graph_class.label());
    Ok(cfg.graph_class.generate(
        cfg.n_min,
        cfg.d,
        seed::derive(cfg.seed, &[key, cfg.n_min as u64, cfg.d as u64]),
    )?)
}

#[derive(Debug, Serialize)]
struct QsimGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Debug, Serialize)]
struct QsimPoint {
    lambda: f64,
    alpha: Option<f64>,
    trials: u64,
    halted_by: BTreeMap<&'static str, u64>,
    rounds_histogram: BTreeMap<u64, u64>,
    mean_rounds: f64,
    /// Largest |a_s|² deviation from the Gibbs law over Full-halted runs.
    max_law_deviation: Option<f64>,
    max_non_is_weight: Option<f64>,
    /// Every α-halted run has the expected register structure.
    alpha_structure_ok: Option<bool>,
    /// One computational-basis readout per Full-halted run against the
    /// Gibbs law.
    readout_p_value: Option<f64>,
    /// Quantum against classical round counts under the same halting rule.
    rounds_p_value: f64,
}

#[derive(Debug, Serialize)]
struct QsimReport {
    graph: QsimGraph,
    ancilla: &'static str,
    seed: u64,
    points: Vec<QsimPoint>,
}

fn qsim_point(cfg: &ExperimentConfig, g: &Graph, lambda: f64) -> Result<QsimPoint, CliError> {
    if g.n() > LAW_CHECK_MAX_VERTICES {
        return Err(qsc_core::Error::SizeGuard {
            what: "vertex count",
            got: g.n(),
            limit: LAW_CHECK_MAX_VERTICES,
        }
        .into());
    }
    let halt = halt_condition(cfg)?;
    let key = [seed::label_key("qsim"), lambda.to_bits()];
    let mut rounds = Vec::new();
    let mut classical = Vec::new();
    let mut halted_by = BTreeMap::new();
    let (mut max_dev, mut max_leak): (Option<f64>, Option<f64>) = (None, None);
    let mut structure_ok = None;
    let mut readouts = vec![0u64; 1 << g.n()];
    let mut readout_count = 0;
    for trial in 0..cfg.trials {
        let s = seed::derive(cfg.seed, &[key[0], key[1], trial]);
        let mut rng = seed::rng(seed::derive(s, &[0]));
        let r = prepare_with_rng(g, lambda, halt, cfg.ancilla.into(), &mut rng, |_| {})?;
        rounds.push(r.rounds);
        *halted_by.entry(r.halted_by.as_str()).or_insert(0) += 1;
        if cfg.alpha.is_some() {
            let ok = check_alpha_halt_structure(&r, g)?;
            structure_ok = Some(structure_ok.unwrap_or(true) && ok);
        }
        if r.halted_by == qsc_core::HaltReason::Full {
            let dev = verify_gibbs_law(&r, g, lambda)?;
            max_dev = Some(max_dev.unwrap_or(0.0).max(dev.max_deviation));
            max_leak = Some(max_leak.unwrap_or(0.0).max(dev.non_is_weight));
            let u: f64 = rng.random();
            let probs = r.final_state.probabilities();
            let mut acc = 0.0;
            let idx = probs
                .iter()
                .position(|&p| {
                    acc += p;
                    u < acc
                })
                .unwrap_or(probs.len() - 1);
            readouts[idx] += 1;
            readout_count += 1;
        }
        let mut c_rng = seed::rng(seed::derive(s, &[1]));
        classical.push(sample_with_rng(g, lambda, halt, &mut c_rng)?.rounds);
    }
    let readout_p_value = if readout_count > 0 {
        Some(chi_square_gof(&readouts, &gibbs_law(g, lambda)?, 5.0).p_value)
    } else {
        None
    };
    let mut histogram = BTreeMap::new();
    for &r in &rounds {
        *histogram.entry(r).or_insert(0) += 1;
    }
    Ok(QsimPoint {
        lambda,
        alpha: cfg.alpha,
        trials: cfg.trials,
        halted_by,
        mean_rounds: rounds.iter().sum::<u64>() as f64 / rounds.len().max(1) as f64,
        rounds_histogram: histogram,
        max_law_deviation: max_dev,
        max_non_is_weight: max_leak,
        alpha_structure_ok: structure_ok,
        readout_p_value,
        rounds_p_value: chi_square_two_sample(&rounds, &classical, 5.0).p_value,
    })
}

fn run_qsim(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let g = single_graph(cfg)?;
    let points = parallel_map(&cfg.lambdas, cfg.threads, |&l| qsim_point(cfg, &g, l))?;
    let report = QsimReport {
        graph: QsimGraph {
            n: g.n(),
            edges: g.edges().to_vec(),
        },
        ancilla: match cfg.ancilla {
            crate::config::Ancilla::Implicit => "implicit",
            crate::config::Ancilla::Explicit => "explicit",
        },
        seed: cfg.seed,
        points,
    };
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    let mut out = RunReport::default();
    out.write(&cfg.out_dir, QSIM_JSON, json.as_bytes())?;
    Ok(out)
}

/// Stabilizer and syndrome matrices of the configured constraint, as
/// written to `stabilizer.txt`.
pub fn stabilizer_text(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let c = match &cfg.truth_table {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            Constraint::parse_truth_table(&text, path.display().to_string())
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => Constraint::by_name(&cfg.constraint)?,
    };
    Ok(format!(
        "# stabilizer {label}\n{}\n# syndrome {label}\n{}\n",
        build_stabilizer(&c),
        build_syndrome_unitary(&c),
        label = c.label()
    ))
}

fn run_stabilizer(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let text = stabilizer_text(cfg)?;
    let mut out = RunReport::default();
    out.write(&cfg.out_dir, STABILIZER_TXT, text.as_bytes())?;
    Ok(out)
}

/// Schedule of one adiabatic point under the config overrides.
pub fn adiabatic_schedule(cfg: &ExperimentConfig, n: usize, nt: usize) -> Schedule {
    let base = Schedule::for_graph(n, nt);
    let total = cfg.total_time.unwrap_or(base.total_time);
    base.with_total_time(total)
        .with_delta(cfg.delta.unwrap_or(default_delta(total)))
        .with_theta(cfg.theta_convention.into())
        .with_qsc_interval(cfg.qsc_interval.unwrap_or(default_qsc_interval(nt)))
}

/// One row of `adiabatic.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticRow {
    pub n_t: usize,
    pub qsc: QscMode,
    pub law: adiabatic::LawSummary,
}

pub fn adiabatic_rows(cfg: &ExperimentConfig) -> Result<Vec<AdiabaticRow>, CliError> {
    let g = single_graph(cfg)?;
    let modes: &[QscMode] = match cfg.qsc {
        QscSetting::Off => &[QscMode::Off],
        QscSetting::On => &[QscMode::IsolatedEdge],
        QscSetting::Both => &[QscMode::Off, QscMode::IsolatedEdge],
    };
    let jobs: Vec<(usize, QscMode)> = cfg
        .n_t
        .iter()
        .flat_map(|&nt| modes.iter().map(move |&m| (nt, m)))
        .collect();
    parallel_map(&jobs, cfg.threads, |&(nt, qsc)| {
        let sched = adiabatic_schedule(cfg, g.n(), nt);
        let s = seed::derive(cfg.seed, &[seed::label_key("adiabatic"), nt as u64]);
        let law = average_law(&g, &sched, qsc, cfg.trials as usize, s)?;
        Ok(AdiabaticRow { n_t: nt, qsc, law })
    })
}

fn run_adiabatic(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let rows = adiabatic_rows(cfg)?;
    let n = single_graph(cfg)?.n();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "n_t".to_string(),
        "qsc".into(),
        "figure_of_merit".into(),
        "violation_weight".into(),
    ];
    header.extend((0..=n).map(|k| format!("p_size_{k}")));
    w.write_record(&header)?;
    for r in &rows {
        let mut rec = vec![
            r.n_t.to_string(),
            if r.qsc == QscMode::Off { "off" } else { "on" }.to_string(),
            format!("{:.10}", r.law.figure_of_merit),
            format!("{:.10}", r.law.violation_weight),
        ];
        rec.extend(r.law.size_probabilities.iter().map(|p| format!("{p:.10}")));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    let mut out = RunReport::default();
    out.write(&cfg.out_dir, ADIABATIC_CSV, &bytes)?;
    Ok(out)
}
