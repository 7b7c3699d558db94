//! Non-Abelian adiabatic preparation of maximum independent sets.
//!
//! The constraint Hamiltonian `H_A = −Δ Σ_⟨ij⟩ (Z_i + Z_j − Z_i Z_j)` is
//! fixed and the register is rotated by `U_B(θ(t), φ(t))^{⊗n}`. Every
//! evolution here is carried in the rotating frame `ψ̄ = U_B(t)^† ψ`, which
//! starts at `|0…0⟩` and whose final value is the reported state: the
//! trailing `U_B(T)` is a full flip and is left off.

use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::{Matrix4, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::prep2q::{label_index, prepare_two_qubit};
use crate::sim::{Gate1Q, StateVector, C64};

/// Largest graph the evolutions accept.
pub const MAX_VERTICES: usize = 12;
/// Largest step used for single-edge reference integration.
pub const EDGE_REFERENCE_STEP: f64 = 1e-3;

/// How `θ` depends on time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThetaConvention {
    /// `θ(t) = πt/T`, a constant rate ending at a full flip.
    #[default]
    Linear,
    /// `θ̇ = πt/T`, so `θ(t) = πt²/(2T)`.
    LiteralRate,
}

impl FromStr for ThetaConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(ThetaConvention::Linear),
            "literal-rate" => Ok(ThetaConvention::LiteralRate),
            other => Err(Error::InvalidParameters(format!(
                "unknown theta convention {other:?} (expected linear or literal-rate)"
            ))),
        }
    }
}

impl ThetaConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            ThetaConvention::Linear => "linear",
            ThetaConvention::LiteralRate => "literal-rate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    /// Total time `T`.
    pub total_time: f64,
    /// Constraint energy scale `Δ`.
    pub delta: f64,
    /// Trotter step count `N_T`.
    pub trotter_steps: usize,
    pub theta: ThetaConvention,
    /// Trotter steps between correction rounds.
    pub qsc_interval: usize,
}

impl Schedule {
    /// `T = n²`, `Δ = T` and the default correction interval.
    pub fn for_graph(n: usize, trotter_steps: usize) -> Self {
        let total_time = (n * n) as f64;
        Schedule {
            total_time,
            delta: default_delta(total_time),
            trotter_steps,
            theta: ThetaConvention::Linear,
            qsc_interval: default_qsc_interval(trotter_steps),
        }
    }

    pub fn with_total_time(mut self, total_time: f64) -> Self {
        self.total_time = total_time;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_trotter_steps(mut self, steps: usize) -> Self {
        self.trotter_steps = steps;
        self
    }

    pub fn with_theta(mut self, theta: ThetaConvention) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_qsc_interval(mut self, interval: usize) -> Self {
        self.qsc_interval = interval;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.total_time.is_finite()
            && self.total_time > 0.0
            && self.delta.is_finite()
            && self.delta > 0.0
            && self.trotter_steps > 0
            && self.qsc_interval > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameters(format!(
                "invalid schedule {self:?}"
            )))
        }
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.trotter_steps as f64
    }

    pub fn theta(&self, t: f64) -> f64 {
        match self.theta {
            ThetaConvention::Linear => PI * t / self.total_time,
            ThetaConvention::LiteralRate => PI * t * t / (2.0 * self.total_time),
        }
    }

    pub fn theta_dot(&self, t: f64) -> f64 {
        match self.theta {
            ThetaConvention::Linear => PI / self.total_time,
            ThetaConvention::LiteralRate => PI * t / self.total_time,
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        0.5 * t * t
    }

    pub fn phi_dot(&self, t: f64) -> f64 {
        t
    }

    /// Single-qubit rotation at time `t`.
    pub fn u_b(&self, t: f64) -> Gate1Q {
        u_b_1q(self.theta(t), self.phi(t))
    }

    /// `U_B(t1)^† U_B(t0)`, the frame change between two times.
    fn frame_step(&self, t0: f64, t1: f64) -> Gate1Q {
        self.u_b(t1).dagger().mul(&self.u_b(t0))
    }
}

/// `Δ = T`: the `4Δ` gap then exceeds the largest `φ̇ = T` by a factor four.
pub fn default_delta(total_time: f64) -> f64 {
    total_time
}

/// Every 10 steps or every `N_T/4` steps, whichever is smaller.
pub fn default_qsc_interval(trotter_steps: usize) -> usize {
    (trotter_steps / 4).clamp(1, 10)
}

/// `[[−cos(θ/2), e^{iφ} sin(θ/2)], [e^{−iφ} sin(θ/2), cos(θ/2)]]`.
pub fn u_b_1q(theta: f64, phi: f64) -> Gate1Q {
    let (s, c) = (0.5 * theta).sin_cos();
    let e = C64::from_polar(1.0, phi);
    Gate1Q([[C64::new(-c, 0.0), e * s], [e.conj() * s, C64::new(c, 0.0)]])
}

fn d_theta_u_b(theta: f64, phi: f64) -> Gate1Q {
    let (s, c) = (0.5 * theta).sin_cos();
    let e = C64::from_polar(1.0, phi);
    Gate1Q([
        [C64::new(0.5 * s, 0.0), e * (0.5 * c)],
        [e.conj() * (0.5 * c), C64::new(-0.5 * s, 0.0)],
    ])
}

fn d_phi_u_b(theta: f64, phi: f64) -> Gate1Q {
    let s = (0.5 * theta).sin();
    let e = C64::from_polar(1.0, phi);
    let i = C64::new(0.0, 1.0);
    Gate1Q([
        [C64::new(0.0, 0.0), i * e * s],
        [-i * e.conj() * s, C64::new(0.0, 0.0)],
    ])
}

/// Diagonal of `H_A` in the computational basis.
pub fn constraint_energies(g: &Graph, delta: f64) -> Vec<f64> {
    (0..1usize << g.n())
        .map(|idx| {
            g.edges()
                .iter()
                .map(|&(i, j)| {
                    if (idx >> i) & 1 == 1 && (idx >> j) & 1 == 1 {
                        3.0 * delta
                    } else {
                        -delta
                    }
                })
                .sum()
        })
        .collect()
}

fn phases(energies: &[f64], h: f64) -> Vec<C64> {
    energies
        .iter()
        .map(|&e| C64::from_polar(1.0, -h * e))
        .collect()
}

fn guard(g: &Graph) -> Result<()> {
    if g.n() > MAX_VERTICES {
        return Err(Error::SizeGuard {
            what: "adiabatic vertex count",
            got: g.n(),
            limit: MAX_VERTICES,
        });
    }
    Ok(())
}

/// Weight on bitstrings violating at least one edge.
pub fn violation_weight(g: &Graph, probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .enumerate()
        .filter(|&(idx, _)| !g.is_independent_mask(idx as u64))
        .map(|(_, p)| p)
        .sum()
}

fn violating_indices(g: &Graph) -> Vec<usize> {
    (0..1usize << g.n())
        .filter(|&idx| !g.is_independent_mask(idx as u64))
        .collect()
}

fn weight_on(psi: &StateVector, indices: &[usize]) -> f64 {
    indices.iter().map(|&k| psi.amplitude(k).norm_sqr()).sum()
}

/// Summary of a computational-basis law.
#[derive(Debug, Clone, PartialEq)]
pub struct LawSummary {
    /// Probability per basis index.
    pub probabilities: Vec<f64>,
    /// `size_probabilities[k]` is the weight on independent sets of size `k`.
    pub size_probabilities: Vec<f64>,
    pub violation_weight: f64,
    pub figure_of_merit: f64,
}

impl LawSummary {
    pub fn new(g: &Graph, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != 1 << g.n() {
            return Err(Error::DimensionMismatch {
                expected: 1 << g.n(),
                got: probabilities.len(),
            });
        }
        let mut size_probabilities = vec![0.0; g.n() + 1];
        for (idx, &p) in probabilities.iter().enumerate() {
            if g.is_independent_mask(idx as u64) {
                size_probabilities[idx.count_ones() as usize] += p;
            }
        }
        let figure_of_merit = figure_of_merit(&probabilities, g)?;
        Ok(LawSummary {
            violation_weight: violation_weight(g, &probabilities),
            probabilities,
            size_probabilities,
            figure_of_merit,
        })
    }

    /// Total-variation distance between two laws on the same register.
    pub fn tv_distance(&self, other: &LawSummary) -> f64 {
        0.5 * self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

/// `Σ_s P(s)·|s|·[s independent] / |MIS|`; violating outcomes count zero.
pub fn figure_of_merit(probabilities: &[f64], g: &Graph) -> Result<f64> {
    if g.n() > crate::prs::LAW_MAX_VERTICES {
        return Err(Error::SizeGuard {
            what: "figure-of-merit vertex count",
            got: g.n(),
            limit: crate::prs::LAW_MAX_VERTICES,
        });
    }
    let mis = g.mis_size()?;
    let total: f64 = probabilities
        .iter()
        .enumerate()
        .filter(|&(idx, _)| g.is_independent_mask(idx as u64))
        .map(|(idx, p)| p * idx.count_ones() as f64)
        .sum();
    Ok(if mis == 0 { 1.0 } else { total / mis as f64 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticResult {
    pub final_state: StateVector,
    pub law: LawSummary,
    /// Largest violating weight seen at any step.
    pub peak_violation: f64,
    /// `(step, edge)` for every recovery applied.
    pub recovery_log: Vec<(usize, Edge)>,
    /// Violating weight right after each correction round.
    pub post_round_violation: Vec<f64>,
}

impl AdiabaticResult {
    fn finish(
        g: &Graph,
        state: StateVector,
        peak: f64,
        log: Vec<(usize, Edge)>,
        rounds: Vec<f64>,
    ) -> Result<Self> {
        let law = LawSummary::new(g, state.probabilities())?;
        Ok(AdiabaticResult {
            final_state: state,
            law,
            peak_violation: peak,
            recovery_log: log,
            post_round_violation: rounds,
        })
    }
}

/// Midpoint integrator for the frame state over `[t0, t1]` in `steps` steps.
struct ExactStepper<'a> {
    sched: &'a Schedule,
    energies: Vec<f64>,
}

impl<'a> ExactStepper<'a> {
    fn new(g: &Graph, sched: &'a Schedule) -> Self {
        ExactStepper {
            sched,
            energies: constraint_energies(g, sched.delta),
        }
    }

    /// Each step is `[U(t+h)^† U(t_m)] e^{−ihH_A} [U(t_m)^† U(t)]`, which is
    /// second order in `h`.
    fn advance<F: FnMut(&StateVector)>(
        &self,
        psi: &mut StateVector,
        t0: f64,
        t1: f64,
        steps: usize,
        mut each: F,
    ) -> Result<()> {
        let h = (t1 - t0) / steps as f64;
        let ph = phases(&self.energies, h);
        for k in 0..steps {
            let t = t0 + k as f64 * h;
            let tm = t + 0.5 * h;
            let tn = if k + 1 == steps { t1 } else { t + h };
            psi.apply_1q_all(&self.sched.frame_step(t, tm));
            psi.apply_diagonal_phase(&ph)?;
            psi.apply_1q_all(&self.sched.frame_step(tm, tn));
            each(psi);
        }
        Ok(())
    }
}

/// Reference evolution with `substeps` midpoint steps over `[0, T]`.
pub fn run_exact(g: &Graph, sched: &Schedule, substeps: usize) -> Result<AdiabaticResult> {
    guard(g)?;
    sched.validate()?;
    let mut psi = StateVector::zero(g.n())?;
    let mut peak = 0.0f64;
    let bad = violating_indices(g);
    ExactStepper::new(g, sched).advance(&mut psi, 0.0, sched.total_time, substeps.max(1), |s| {
        peak = peak.max(weight_on(s, &bad));
    })?;
    AdiabaticResult::finish(g, psi, peak, Vec::new(), Vec::new())
}

/// Frame-state propagator of [`run_exact`], column `k` being the image of
/// basis state `k`.
pub fn exact_propagator(g: &Graph, sched: &Schedule, substeps: usize) -> Result<Vec<Vec<C64>>> {
    guard(g)?;
    sched.validate()?;
    let stepper = ExactStepper::new(g, sched);
    (0..1usize << g.n())
        .map(|k| {
            let mut psi = StateVector::basis(g.n(), k)?;
            stepper.advance(&mut psi, 0.0, sched.total_time, substeps.max(1), |_| {})?;
            Ok(psi.amplitudes().to_vec())
        })
        .collect()
}

/// Exact single-edge frame states at the sorted times `checkpoints`.
pub fn isolated_edge_states(sched: &Schedule, checkpoints: &[f64]) -> Result<Vec<StateVector>> {
    sched.validate()?;
    let edge = Graph::complete(2)?;
    let stepper = ExactStepper::new(&edge, sched);
    // keep both the gap phase and the frame rotation per step small
    let h = EDGE_REFERENCE_STEP
        .min(0.005 / sched.delta)
        .min(0.02 / sched.phi_dot(sched.total_time).max(1.0));
    let mut psi = StateVector::zero(2)?;
    let mut t = 0.0;
    let mut out = Vec::with_capacity(checkpoints.len());
    for &c in checkpoints {
        if !(c >= t && c <= sched.total_time + 1e-12) {
            return Err(Error::InvalidParameters(format!(
                "checkpoint {c} outside [{t}, {}] or unsorted",
                sched.total_time
            )));
        }
        if c > t {
            let steps = ((c - t) / h).ceil().max(1.0) as usize;
            stepper.advance(&mut psi, t, c, steps, |_| {})?;
            psi.renormalize()?;
            t = c;
        }
        out.push(psi.clone());
    }
    Ok(out)
}

/// Single-edge frame state at time `t`.
pub fn isolated_edge_state(t: f64, sched: &Schedule) -> Result<StateVector> {
    Ok(isolated_edge_states(sched, &[t])?.remove(0))
}

/// Whether correction rounds run during Trotter evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QscMode {
    #[default]
    Off,
    /// Reset violated edges to the projected isolated-edge state.
    IsolatedEdge,
}

impl FromStr for QscMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "off" => Ok(QscMode::Off),
            "on" => Ok(QscMode::IsolatedEdge),
            other => Err(Error::InvalidParameters(format!(
                "qsc must be on or off, got {other:?}"
            ))),
        }
    }
}

/// Recovery amplitudes `(α, β, γ, η)` for labels `00, 01, 10, 11`: the
/// isolated-edge state with its `|11⟩` part removed and renormalized.
fn recovery_target(edge_state: &StateVector) -> Result<[C64; 4]> {
    let a = edge_state.amplitudes();
    let (alpha, beta, gamma) = (
        a[0],
        a[label_index(false, true, 0, 1)],
        a[label_index(true, false, 0, 1)],
    );
    let norm = (alpha.norm_sqr() + beta.norm_sqr() + gamma.norm_sqr()).sqrt();
    if norm < 1e-12 {
        return Err(Error::VanishingBranch);
    }
    Ok([alpha / norm, beta / norm, gamma / norm, C64::new(0.0, 0.0)])
}

/// Trotterized evolution. Each step applies
/// `δU_A(n) = e^{−i dt H_A} U_B(n dt)^† U_B((n−1) dt)`; with correction on,
/// every `qsc_interval` steps each edge is checked in sorted order and a
/// violated edge is reset and re-prepared in the isolated-edge state.
pub fn run_trotter<R: Rng + ?Sized>(
    g: &Graph,
    sched: &Schedule,
    qsc: QscMode,
    rng: &mut R,
) -> Result<AdiabaticResult> {
    guard(g)?;
    sched.validate()?;
    let dt = sched.dt();
    let nt = sched.trotter_steps;
    let ph = phases(&constraint_energies(g, sched.delta), dt);
    let round_steps: Vec<usize> = match qsc {
        QscMode::Off => Vec::new(),
        QscMode::IsolatedEdge => (1..=nt).filter(|s| s % sched.qsc_interval == 0).collect(),
    };
    let times: Vec<f64> = round_steps.iter().map(|&s| s as f64 * dt).collect();
    let targets = isolated_edge_states(sched, &times)?
        .iter()
        .map(recovery_target)
        .collect::<Result<Vec<_>>>()?;

    let bad = violating_indices(g);
    let mut psi = StateVector::zero(g.n())?;
    let mut peak = 0.0f64;
    let mut log = Vec::new();
    let mut rounds = Vec::with_capacity(round_steps.len());
    let mut next_round = 0;
    for n in 1..=nt {
        psi.apply_1q_all(&sched.frame_step((n - 1) as f64 * dt, n as f64 * dt));
        psi.apply_diagonal_phase(&ph)?;
        peak = peak.max(weight_on(&psi, &bad));
        if round_steps.get(next_round) == Some(&n) {
            let [a, b, c, d] = targets[next_round];
            let seq = prepare_two_qubit(a, b, c, d)?;
            for &(i, j) in g.edges() {
                if psi.measure_edge_projector(i, j, rng)?.bit {
                    let zero = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
                    psi.reset_qubit(i, zero, rng)?;
                    psi.reset_qubit(j, zero, rng)?;
                    seq.apply(&mut psi, i, j)?;
                    log.push((n, (i, j)));
                }
            }
            rounds.push(weight_on(&psi, &bad));
            next_round += 1;
        }
    }
    AdiabaticResult::finish(g, psi, peak, log, rounds)
}

/// Laboratory-frame product `Π_n U_B(n dt) e^{−i dt H_A} U_B(n dt)^†`
/// applied to `U_B(0)|0…0⟩`, then mapped back by `U_B(T)^†`.
pub fn run_trotter_lab_form(g: &Graph, sched: &Schedule) -> Result<StateVector> {
    guard(g)?;
    sched.validate()?;
    let dt = sched.dt();
    let ph = phases(&constraint_energies(g, sched.delta), dt);
    let mut psi = StateVector::zero(g.n())?;
    psi.apply_1q_all(&sched.u_b(0.0));
    for n in 1..=sched.trotter_steps {
        let u = sched.u_b(n as f64 * dt);
        psi.apply_1q_all(&u.dagger());
        psi.apply_diagonal_phase(&ph)?;
        psi.apply_1q_all(&u);
    }
    psi.apply_1q_all(&sched.u_b(sched.total_time).dagger());
    Ok(psi)
}

/// Propagator of bare [`run_trotter`], column-wise like [`exact_propagator`].
pub fn trotter_propagator(g: &Graph, sched: &Schedule) -> Result<Vec<Vec<C64>>> {
    guard(g)?;
    sched.validate()?;
    let dt = sched.dt();
    let ph = phases(&constraint_energies(g, sched.delta), dt);
    let steps: Vec<Gate1Q> = (1..=sched.trotter_steps)
        .map(|n| sched.frame_step((n - 1) as f64 * dt, n as f64 * dt))
        .collect();
    (0..1usize << g.n())
        .map(|k| {
            let mut psi = StateVector::basis(g.n(), k)?;
            for u in &steps {
                psi.apply_1q_all(u);
                psi.apply_diagonal_phase(&ph)?;
            }
            Ok(psi.amplitudes().to_vec())
        })
        .collect()
}

/// Frobenius distance between two column-stored propagators.
pub fn propagator_distance(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()))
        .sum::<f64>()
        .sqrt()
}

/// Law averaged over `trials` independent runs; the bare evolution is
/// deterministic and runs once.
pub fn average_law(
    g: &Graph,
    sched: &Schedule,
    qsc: QscMode,
    trials: usize,
    seed: u64,
) -> Result<LawSummary> {
    let runs = if qsc == QscMode::Off {
        1
    } else {
        trials.max(1)
    };
    let mut acc = vec![0.0; 1 << g.n()];
    for trial in 0..runs {
        let mut rng = crate::seed::rng(crate::seed::derive(seed, &[trial as u64]));
        let r = run_trotter(g, sched, qsc, &mut rng)?;
        for (a, p) in acc.iter_mut().zip(r.final_state.probabilities()) {
            *a += p;
        }
    }
    acc.iter_mut().for_each(|a| *a /= runs as f64);
    LawSummary::new(g, acc)
}

/// `H_A + θ̇ A_θ + φ̇ A_φ` for one edge, with `A_x = −i U^† ∂_x U` and
/// `U = U_B ⊗ U_B`. Basis index `x + 2y` for label `xy`.
pub fn moving_frame_hamiltonian(t: f64, sched: &Schedule) -> Matrix4<C64> {
    moving_frame_hamiltonian_at(
        sched.theta(t),
        sched.phi(t),
        sched.theta_dot(t),
        sched.phi_dot(t),
        sched.delta,
    )
}

/// [`moving_frame_hamiltonian`] with explicit angles and rates.
pub fn moving_frame_hamiltonian_at(
    theta: f64,
    phi: f64,
    theta_dot: f64,
    phi_dot: f64,
    delta: f64,
) -> Matrix4<C64> {
    let u = u_b_1q(theta, phi).dagger();
    let a_theta = connection(&u, &d_theta_u_b(theta, phi));
    let a_phi = connection(&u, &d_phi_u_b(theta, phi));
    let energies = constraint_energies(&Graph::complete(2).expect("K2"), delta);
    let mut h = Matrix4::from_fn(|r, c| {
        if r == c {
            C64::new(energies[r], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    for (a, rate) in [(a_theta, theta_dot), (a_phi, phi_dot)] {
        h += lift(&a) * C64::new(rate, 0.0);
    }
    h
}

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn hermitian_spectrum(h: &Matrix4<C64>) -> (Vec<f64>, Matrix4<C64>) {
    let eig = SymmetricEigen::new(*h);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = Matrix4::from_fn(|r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `−i u_dag · du` for one qubit.
fn connection(u_dag: &Gate1Q, du: &Gate1Q) -> Gate1Q {
    let m = u_dag.mul(du).0;
    let mi = C64::new(0.0, -1.0);
    Gate1Q([[mi * m[0][0], mi * m[0][1]], [mi * m[1][0], mi * m[1][1]]])
}

/// `a ⊗ 1 + 1 ⊗ a` on two qubits.
fn lift(a: &Gate1Q) -> Matrix4<C64> {
    Matrix4::from_fn(|r, c| {
        let (r0, r1, c0, c1) = (r & 1, r >> 1, c & 1, c >> 1);
        let mut v = C64::new(0.0, 0.0);
        if r1 == c1 {
            v += a.0[r0][c0];
        }
        if r0 == c0 {
            v += a.0[r1][c1];
        }
        v
    })
}
