//! Partial rejection sampling (PRS) of hardcore-model Gibbs distributions
//! over independent sets.
//!
//! Every vertex is drawn independently from Bernoulli(λ/(1+λ)). Each round
//! checks the edges whose state is not yet known; if any edge has both
//! endpoints set, the endpoints `B` and their neighbours `N(B)` are redrawn
//! and the edges touching the redrawn vertices become unknown again. On a
//! clean check the assignment is an exact sample of `λ^{|s|} / Z(λ)`.
//!
//! This is the classical process whose round statistics match the quantum
//! measure-and-reset preparation in [`crate::qsc`].

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    check_lambda, gen_bounded_planar, gen_regular, gen_star, Graph, VertexAssignment, ViolationSet,
};
use crate::seed;
use crate::stats::{chi_square_gof, ChiSquareTest};

/// Largest graph accepted by [`empirical_distribution`].
pub const LAW_MAX_VERTICES: usize = 20;

/// Termination policy for a sampling loop.
///
/// `alpha = None` is full halting (zero violations). A round cap can be
/// combined with either.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HaltCondition {
    pub alpha: Option<f64>,
    pub max_rounds: Option<u64>,
}

impl HaltCondition {
    pub fn full() -> Self {
        HaltCondition::default()
    }

    pub fn alpha_fraction(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidAlpha(alpha));
        }
        Ok(HaltCondition {
            alpha: Some(alpha),
            max_rounds: None,
        })
    }

    pub fn max_rounds(cap: u64) -> Self {
        HaltCondition {
            alpha: None,
            max_rounds: Some(cap.max(1)),
        }
    }

    pub fn with_cap(self, cap: Option<u64>) -> Self {
        HaltCondition {
            max_rounds: cap.map(|c| c.max(1)),
            ..self
        }
    }

    /// Decides whether a check layer with `violating` bad edges out of
    /// `total_edges` ends the loop at round `rounds`.
    pub fn evaluate(
        &self,
        violating: usize,
        total_edges: usize,
        rounds: u64,
    ) -> Option<HaltReason> {
        if violating == 0 {
            return Some(HaltReason::Full);
        }
        if let Some(alpha) = self.alpha {
            if violating as f64 <= alpha * total_edges as f64 {
                return Some(HaltReason::AlphaFraction);
            }
        }
        match self.max_rounds {
            Some(cap) if rounds >= cap => Some(HaltReason::MaxRounds),
            _ => None,
        }
    }
}

/// Which condition ended a sampling loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HaltReason {
    Full,
    AlphaFraction,
    MaxRounds,
}

impl HaltReason {
    pub fn as_str(self) -> &'static str {
        match self {
            HaltReason::Full => "full",
            HaltReason::AlphaFraction => "alpha",
            HaltReason::MaxRounds => "max_rounds",
        }
    }

    pub fn is_censored(self) -> bool {
        self == HaltReason::MaxRounds
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleResult {
    pub assignment: VertexAssignment,
    /// Check layers executed, including the final one.
    pub rounds: u64,
    pub halted_by: HaltReason,
    pub violations_at_halt: ViolationSet,
}

/// Probability that a vertex is drawn into the set.
pub fn inclusion_probability(lambda: f64) -> f64 {
    lambda / (1.0 + lambda)
}

/// One Bernoulli(λ/(1+λ)) draw.
pub fn bernoulli_vertex<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<bool> {
    check_lambda(lambda)?;
    Ok(rng.random::<f64>() < inclusion_probability(lambda))
}

/// [`sample_with_rng`] on a fresh ChaCha stream seeded with `seed`.
pub fn sample_once(g: &Graph, lambda: f64, halt: HaltCondition, seed: u64) -> Result<SampleResult> {
    sample_with_rng(g, lambda, halt, &mut seed::rng(seed))
}

pub fn sample_with_rng<R: Rng + ?Sized>(
    g: &Graph,
    lambda: f64,
    halt: HaltCondition,
    rng: &mut R,
) -> Result<SampleResult> {
    let mut sampler = Sampler::new(g, lambda)?;
    sampler.run(halt, rng, |_, _| {})
}

/// Reusable PRS state; buffers are allocated once per graph.
pub(crate) struct Sampler<'g> {
    g: &'g Graph,
    p: f64,
    bits: Vec<bool>,
    unknown: Vec<usize>,
    edge_mark: Vec<u64>,
    vertex_mark: Vec<u64>,
    epoch: u64,
}

impl<'g> Sampler<'g> {
    pub(crate) fn new(g: &'g Graph, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Sampler {
            g,
            p: inclusion_probability(lambda),
            bits: vec![false; g.n()],
            unknown: Vec::with_capacity(g.edge_count()),
            edge_mark: vec![0; g.edge_count()],
            vertex_mark: vec![0; g.n()],
            epoch: 0,
        })
    }

    /// Runs the loop. `on_reset(bits_before, reset_set)` is invoked before
    /// every redraw.
    pub(crate) fn run<R, F>(
        &mut self,
        halt: HaltCondition,
        rng: &mut R,
        mut on_reset: F,
    ) -> Result<SampleResult>
    where
        R: Rng + ?Sized,
        F: FnMut(&[bool], &[usize]),
    {
        let g = self.g;
        for b in self.bits.iter_mut() {
            *b = rng.random::<f64>() < self.p;
        }
        self.unknown.clear();
        self.unknown.extend(0..g.edge_count());
        let mut violating: Vec<usize> = Vec::new();
        let mut reset: Vec<usize> = Vec::new();
        let mut rounds = 0u64;
        loop {
            rounds += 1;
            violating.clear();
            violating.extend(self.unknown.iter().copied().filter(|&e| {
                let (i, j) = g.edges()[e];
                self.bits[i] && self.bits[j]
            }));
            if let Some(reason) = halt.evaluate(violating.len(), g.edge_count(), rounds) {
                let edges = violating.iter().map(|&e| g.edges()[e]).collect();
                return Ok(SampleResult {
                    assignment: VertexAssignment::new(self.bits.clone()),
                    rounds,
                    halted_by: reason,
                    violations_at_halt: ViolationSet::from_edges(g, edges),
                });
            }
            self.epoch += 1;
            let epoch = self.epoch;
            reset.clear();
            for &e in &violating {
                let (i, j) = g.edges()[e];
                for v in [i, j] {
                    for &u in std::iter::once(&v).chain(g.neighbors(v)) {
                        if self.vertex_mark[u] != epoch {
                            self.vertex_mark[u] = epoch;
                            reset.push(u);
                        }
                    }
                }
            }
            reset.sort_unstable();
            on_reset(&self.bits, &reset);
            self.unknown.clear();
            for &v in &reset {
                self.bits[v] = rng.random::<f64>() < self.p;
                for &e in g.incident_edges(v) {
                    if self.edge_mark[e] != epoch {
                        self.edge_mark[e] = epoch;
                        self.unknown.push(e);
                    }
                }
            }
            self.unknown.sort_unstable();
        }
    }
}

/// Empirical law of Full-halted samples with a chi-square test against the
/// exact Gibbs law `λ^{|s|}/Z(λ)`.
#[derive(Debug, Clone)]
pub struct EmpiricalLaw {
    pub counts: BTreeMap<VertexAssignment, u64>,
    pub trials: u64,
    pub test: ChiSquareTest,
}

impl EmpiricalLaw {
    pub fn frequency(&self, s: &VertexAssignment) -> f64 {
        self.counts.get(s).copied().unwrap_or(0) as f64 / self.trials as f64
    }
}

pub fn empirical_distribution(
    g: &Graph,
    lambda: f64,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalLaw> {
    if g.n() > LAW_MAX_VERTICES {
        return Err(Error::SizeGuard {
            what: "vertex count",
            got: g.n(),
            limit: LAW_MAX_VERTICES,
        });
    }
    check_lambda(lambda)?;
    let sets = g.independent_masks()?;
    let z = g.partition_function(lambda)?;
    let mut rng = seed::rng(seed);
    let mut sampler = Sampler::new(g, lambda)?;
    let mut counts = BTreeMap::new();
    let mut by_mask: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..trials {
        let r = sampler.run(HaltCondition::full(), &mut rng, |_, _| {})?;
        debug_assert!(r.violations_at_halt.is_empty());
        *by_mask.entry(r.assignment.to_mask()).or_default() += 1;
        *counts.entry(r.assignment).or_default() += 1;
    }
    let observed: Vec<u64> = sets
        .iter()
        .map(|m| by_mask.get(m).copied().unwrap_or(0))
        .collect();
    let expected: Vec<f64> = sets
        .iter()
        .map(|m| lambda.powi(m.count_ones() as i32) / z)
        .collect();
    let mut test = chi_square_gof(&observed, &expected, 5.0);
    if observed.iter().sum::<u64>() != trials {
        // A non-independent sample can only come from a broken sampler.
        test.statistic = f64::INFINITY;
        test.p_value = 0.0;
    }
    Ok(EmpiricalLaw {
        counts,
        trials,
        test,
    })
}

/// Random graph family for runtime experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphClass {
    Regular,
    Planar,
    Star,
}

impl GraphClass {
    pub fn label(self) -> &'static str {
        match self {
            GraphClass::Regular => "regular",
            GraphClass::Planar => "planar",
            GraphClass::Star => "star",
        }
    }

    /// `n` is the vertex count; a star on `n` vertices has `n - 1` leaves.
    pub fn generate(self, n: usize, d: usize, seed: u64) -> Result<Graph> {
        match self {
            GraphClass::Regular => gen_regular(n, d, seed),
            GraphClass::Planar => gen_bounded_planar(n, d, seed),
            GraphClass::Star => gen_star(n.saturating_sub(1)),
        }
    }
}

impl std::str::FromStr for GraphClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regular" => Ok(GraphClass::Regular),
            "planar" => Ok(GraphClass::Planar),
            "star" => Ok(GraphClass::Star),
            other => Err(Error::InvalidParameters(format!(
                "unknown graph class {other:?}"
            ))),
        }
    }
}

/// One trial of a runtime experiment; one CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeRecord {
    pub graph_class: String,
    pub n: usize,
    pub d: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub seed: u64,
    pub trial: u64,
    pub rounds: u64,
    pub halted_by: HaltReason,
}

/// Parameters of a runtime sweep over graph sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub class: GraphClass,
    pub n_values: Vec<usize>,
    pub d: usize,
    pub lambda: f64,
    pub halt: HaltCondition,
    pub trials_per_point: u64,
    pub base_seed: u64,
}

impl ExperimentSpec {
    /// Seed of trial `trial` at size `n`. Independent of the other grid
    /// points, so sweeps can be extended without changing old rows.
    pub fn trial_seed(&self, n: usize, trial: u64) -> u64 {
        seed::derive(
            self.base_seed,
            &[
                seed::label_key(self.class.label()),
                n as u64,
                self.d as u64,
                self.lambda.to_bits(),
                self.halt.alpha.unwrap_or(0.0).to_bits(),
                trial,
            ],
        )
    }
}

/// Fresh random graph and one PRS run per trial.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<RuntimeRecord>> {
    let mut records = Vec::with_capacity(spec.n_values.len() * spec.trials_per_point as usize);
    for &n in &spec.n_values {
        for trial in 0..spec.trials_per_point {
            records.push(run_trial(spec, n, trial)?);
        }
    }
    Ok(records)
}

pub fn run_trial(spec: &ExperimentSpec, n: usize, trial: u64) -> Result<RuntimeRecord> {
    let seed = spec.trial_seed(n, trial);
    let graph = spec.class.generate(n, spec.d, seed::derive(seed, &[0]))?;
    let mut rng = seed::rng(seed::derive(seed, &[1]));
    let r = sample_with_rng(&graph, spec.lambda, spec.halt, &mut rng)?;
    Ok(RuntimeRecord {
        graph_class: spec.class.label().to_string(),
        n,
        d: spec.d,
        lambda: spec.lambda,
        alpha: spec.halt.alpha.unwrap_or(0.0),
        seed,
        trial,
        rounds: r.rounds,
        halted_by: r.halted_by,
    })
}
