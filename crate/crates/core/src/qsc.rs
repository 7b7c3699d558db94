//! Measure-and-reset preparation of Gibbs states over independent sets on
//! the statevector simulator.
//!
//! Every vertex qubit starts in `√(1-p)|0⟩ + √p|1⟩` with `p = λ/(1+λ)`.
//! Each round measures the edge projector `|11⟩⟨11|` on every edge whose
//! state is unknown (all edges at first, then the edges touching a reset
//! qubit), in sorted edge order. Violating edges give `B`; every qubit in
//! `B ∪ N(B)` is reset to the initial single-qubit state. On a clean round
//! the register holds `Σ_s √(λ^{|s|}/Z) |s⟩` over independent sets `s`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{check_lambda, Edge, Graph, ViolationSet};
use crate::prs::{inclusion_probability, sample_with_rng, HaltCondition, HaltReason};
use crate::seed;
use crate::sim::{bernoulli_state, StateVector, C64};
use crate::stats::{chi_square_two_sample, ChiSquareTest};

/// Largest edge count for explicit-ancilla execution.
pub const EXPLICIT_MAX_EDGES: usize = 4;
/// Largest graph for which the law checks enumerate all basis states.
pub const LAW_CHECK_MAX_VERTICES: usize = 14;
/// Largest graph for the round-distribution comparison.
pub const ROUND_TEST_MAX_VERTICES: usize = 10;

/// How edge syndromes are extracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AncillaMode {
    /// Direct projective measurement of `|11⟩⟨11|` on the edge.
    #[default]
    Implicit,
    /// One ancilla per edge: Toffoli onto the ancilla, measure it, and
    /// return it to `|0⟩`.
    Explicit,
}

impl std::str::FromStr for AncillaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "implicit" => Ok(AncillaMode::Implicit),
            "explicit" => Ok(AncillaMode::Explicit),
            other => Err(Error::InvalidParameters(format!(
                "unknown ancilla mode {other:?}"
            ))),
        }
    }
}

/// One syndrome readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyndromeRecord {
    pub round: u64,
    pub edge: Edge,
    pub violated: bool,
    /// Born weight of the observed outcome.
    pub probability: f64,
}

#[derive(Debug, Clone)]
pub struct QscRunResult {
    /// Vertex register only; explicit-mode ancillas are traced out (they
    /// are back in `|0⟩` after every readout).
    pub final_state: StateVector,
    pub rounds: u64,
    /// Violations found in each round, the last entry being the halting one.
    pub violation_log: Vec<ViolationSet>,
    pub syndrome_log: Vec<SyndromeRecord>,
    pub halted_by: HaltReason,
}

/// Register state right after the resets of one round.
#[derive(Debug, Clone)]
pub struct RoundSnapshot {
    pub round: u64,
    pub state: StateVector,
    pub violations: ViolationSet,
}

pub fn prepare_distribution(
    g: &Graph,
    lambda: f64,
    halt: HaltCondition,
    seed: u64,
    mode: AncillaMode,
) -> Result<QscRunResult> {
    prepare_with_rng(g, lambda, halt, mode, &mut seed::rng(seed), |_| {})
}

/// Like [`prepare_distribution`], with an observer called after every
/// non-halting round once its resets have been applied.
pub fn prepare_with_rng<R, F>(
    g: &Graph,
    lambda: f64,
    halt: HaltCondition,
    mode: AncillaMode,
    rng: &mut R,
    mut observer: F,
) -> Result<QscRunResult>
where
    R: Rng + ?Sized,
    F: FnMut(&RoundSnapshot),
{
    check_lambda(lambda)?;
    let n = g.n();
    let m = g.edge_count();
    let ancillas = match mode {
        AncillaMode::Implicit => 0,
        AncillaMode::Explicit => {
            if m > EXPLICIT_MAX_EDGES {
                return Err(Error::SizeGuard {
                    what: "edge count in explicit-ancilla mode",
                    got: m,
                    limit: EXPLICIT_MAX_EDGES,
                });
            }
            m
        }
    };
    let vertex_state = bernoulli_state(inclusion_probability(lambda));
    let zero = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let mut init = vec![vertex_state; n];
    init.extend(std::iter::repeat_n(zero, ancillas));
    let mut state = StateVector::init_product(&init)?;

    let mut unknown: Vec<usize> = (0..m).collect();
    let mut violation_log = Vec::new();
    let mut syndrome_log = Vec::new();
    let mut rounds = 0u64;
    loop {
        rounds += 1;
        let mut violating = Vec::new();
        for &e in &unknown {
            let (i, j) = g.edges()[e];
            let outcome = match mode {
                AncillaMode::Implicit => state.measure_edge_projector(i, j, rng)?,
                AncillaMode::Explicit => {
                    let a = n + e;
                    state.apply_toffoli(i, j, a)?;
                    let out = state.measure_qubit(a, rng)?;
                    if out.bit {
                        state.apply_1q(&crate::sim::Gate1Q::x(), a)?;
                    }
                    out
                }
            };
            syndrome_log.push(SyndromeRecord {
                round: rounds,
                edge: (i, j),
                violated: outcome.bit,
                probability: outcome.probability,
            });
            if outcome.bit {
                violating.push((i, j));
            }
        }
        let violations = ViolationSet::from_edges(g, violating);
        let verdict = halt.evaluate(violations.edges.len(), m, rounds);
        violation_log.push(violations.clone());
        if let Some(halted_by) = verdict {
            let final_state = if ancillas > 0 {
                state.truncate_zero_high(n)?
            } else {
                state
            };
            return Ok(QscRunResult {
                final_state,
                rounds,
                violation_log,
                syndrome_log,
                halted_by,
            });
        }
        let reset = violations.reset_set();
        for &v in &reset {
            state.reset_qubit(v, vertex_state, rng)?;
        }
        unknown.clear();
        for &v in &reset {
            unknown.extend_from_slice(g.incident_edges(v));
        }
        unknown.sort_unstable();
        unknown.dedup();
        observer(&RoundSnapshot {
            round: rounds,
            state: if ancillas > 0 {
                state.truncate_zero_high(n)?
            } else {
                state.clone()
            },
            violations,
        });
    }
}

/// Exact Gibbs weights `λ^{|s|}/Z` per basis index, zero off the IS.
pub fn gibbs_law(g: &Graph, lambda: f64) -> Result<Vec<f64>> {
    guard_law(g)?;
    let z = g.partition_function(lambda)?;
    let mut law = vec![0.0; 1 << g.n()];
    for m in g.independent_masks()? {
        law[m as usize] = lambda.powi(m.count_ones() as i32) / z;
    }
    Ok(law)
}

/// Deviation of a final state's Born law from the Gibbs law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawDeviation {
    /// `max_s | |a_s|² - λ^{|s|}[s ∈ IS]/Z |`.
    pub max_deviation: f64,
    /// Total weight on bitstrings that are not independent sets.
    pub non_is_weight: f64,
}

pub fn verify_gibbs_law(r: &QscRunResult, g: &Graph, lambda: f64) -> Result<LawDeviation> {
    if r.halted_by != HaltReason::Full {
        return Err(Error::WrongHalt {
            expected: "full",
            got: r.halted_by.as_str(),
        });
    }
    let law = gibbs_law(g, lambda)?;
    let probs = r.final_state.probabilities();
    let mut max_deviation: f64 = 0.0;
    let mut non_is_weight = 0.0;
    for (idx, (&p, &w)) in probs.iter().zip(&law).enumerate() {
        max_deviation = max_deviation.max((p - w).abs());
        if !g.is_independent_mask(idx as u64) {
            non_is_weight += p;
        }
    }
    Ok(LawDeviation {
        max_deviation,
        non_is_weight,
    })
}

/// Checks the structure of an α-halted register: qubits on violating
/// edges read 1 with certainty, boundary qubits read 0 with certainty, and
/// the rest of the register is supported only on independent sets of the
/// subgraph they induce. A Full-halted run passes vacuously.
pub fn check_alpha_halt_structure(r: &QscRunResult, g: &Graph) -> Result<bool> {
    if r.halted_by == HaltReason::MaxRounds {
        return Err(Error::WrongHalt {
            expected: "alpha or full",
            got: r.halted_by.as_str(),
        });
    }
    let empty = ViolationSet::default();
    let violations = r.violation_log.last().unwrap_or(&empty);
    const TOL: f64 = 1e-12;
    for &v in &violations.endpoints {
        if r.final_state.prob_one(v)? < 1.0 - TOL {
            return Ok(false);
        }
    }
    for &v in &violations.boundary {
        if r.final_state.prob_one(v)? > TOL {
            return Ok(false);
        }
    }
    let excluded: u64 = violations.reset_set().iter().fold(0, |m, &v| m | (1 << v));
    let free_edges: Vec<Edge> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(i, j)| excluded & ((1 << i) | (1 << j)) == 0)
        .collect();
    for (idx, a) in r.final_state.amplitudes().iter().enumerate() {
        if a.norm_sqr() > TOL
            && free_edges
                .iter()
                .any(|&(i, j)| (idx >> i) & 1 == 1 && (idx >> j) & 1 == 1)
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Round-count samples from both samplers and their homogeneity test.
#[derive(Debug, Clone)]
pub struct RoundComparison {
    pub quantum_rounds: Vec<u64>,
    pub classical_rounds: Vec<u64>,
    pub test: ChiSquareTest,
}

impl RoundComparison {
    pub fn quantum_mean(&self) -> f64 {
        mean_u64(&self.quantum_rounds)
    }

    pub fn classical_mean(&self) -> f64 {
        mean_u64(&self.classical_rounds)
    }
}

fn mean_u64(v: &[u64]) -> f64 {
    v.iter().sum::<u64>() as f64 / v.len().max(1) as f64
}

/// Runs `trials` quantum preparations and `trials` classical PRS samples
/// (Full halting) and compares their round-count distributions.
pub fn round_distribution_equivalence(
    g: &Graph,
    lambda: f64,
    trials: u64,
    seed: u64,
) -> Result<RoundComparison> {
    if g.n() > ROUND_TEST_MAX_VERTICES {
        return Err(Error::SizeGuard {
            what: "vertex count",
            got: g.n(),
            limit: ROUND_TEST_MAX_VERTICES,
        });
    }
    let mut q_rng = seed::rng(seed::derive(seed, &[0]));
    let mut c_rng = seed::rng(seed::derive(seed, &[1]));
    let mut quantum_rounds = Vec::with_capacity(trials as usize);
    let mut classical_rounds = Vec::with_capacity(trials as usize);
    for _ in 0..trials {
        let q = prepare_with_rng(
            g,
            lambda,
            HaltCondition::full(),
            AncillaMode::Implicit,
            &mut q_rng,
            |_| {},
        )?;
        quantum_rounds.push(q.rounds);
        let c = sample_with_rng(g, lambda, HaltCondition::full(), &mut c_rng)?;
        classical_rounds.push(c.rounds);
    }
    let test = chi_square_two_sample(&quantum_rounds, &classical_rounds, 5.0);
    Ok(RoundComparison {
        quantum_rounds,
        classical_rounds,
        test,
    })
}

fn guard_law(g: &Graph) -> Result<()> {
    if g.n() > LAW_CHECK_MAX_VERTICES {
        return Err(Error::SizeGuard {
            what: "vertex count",
            got: g.n(),
            limit: LAW_CHECK_MAX_VERTICES,
        });
    }
    Ok(())
}
