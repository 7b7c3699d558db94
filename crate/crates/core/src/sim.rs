//! Dense statevector simulator with mid-circuit measurement and reset.
//!
//! Qubit `q` is bit `q` of the basis index (qubit 0 least significant).
//! Operations mutate the state in place.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Hard limit on register size.
pub const MAX_QUBITS: usize = 26;
/// Branch weights below this are treated as impossible outcomes.
pub const BRANCH_EPS: f64 = 1e-14;
/// Amplitudes below this are omitted from dumps.
pub const DUMP_EPS: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// 2×2 complex matrix, row major: `m[row][col]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate1Q(pub [[C64; 2]; 2]);

impl Gate1Q {
    pub fn identity() -> Self {
        Gate1Q([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn x() -> Self {
        Gate1Q([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn z() -> Self {
        Gate1Q([[ONE, ZERO], [ZERO, -ONE]])
    }

    pub fn h() -> Self {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Gate1Q([[s, s], [s, -s]])
    }

    /// `exp(-i θ Y / 2)`.
    pub fn ry(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Gate1Q([
            [C64::new(c, 0.0), C64::new(-s, 0.0)],
            [C64::new(s, 0.0), C64::new(c, 0.0)],
        ])
    }

    /// `exp(-i θ Z / 2)`.
    pub fn rz(theta: f64) -> Self {
        Gate1Q([
            [C64::from_polar(1.0, -theta / 2.0), ZERO],
            [ZERO, C64::from_polar(1.0, theta / 2.0)],
        ])
    }

    /// A unitary whose first column is the unit vector `(a0, a1)`, i.e. it
    /// maps `|0⟩` to `a0|0⟩ + a1|1⟩`.
    pub fn preparing(state: [C64; 2]) -> Result<Self> {
        let [a0, a1] = state;
        let norm = a0.norm_sqr() + a1.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Gate1Q([[a0, -a1.conj()], [a1, a0.conj()]]))
    }

    pub fn dagger(&self) -> Self {
        let m = self.0;
        Gate1Q([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn mul(&self, rhs: &Gate1Q) -> Self {
        let (a, b) = (self.0, rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Gate1Q(out)
    }

    pub fn apply_to(&self, v: [C64; 2]) -> [C64; 2] {
        let m = self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Largest entry of `|U†U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.dagger().mul(self).0;
        let mut err: f64 = 0.0;
        for (r, row) in p.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let target = if r == c { ONE } else { ZERO };
                err = err.max((v - target).norm());
            }
        }
        err
    }
}

/// Outcome of a single projective measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOutcome {
    pub bit: bool,
    /// Born weight of the observed branch before collapse.
    pub probability: f64,
}

/// Normalized state of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_size(n_qubits)?;
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(StateVector { n_qubits, amps })
    }

    /// Computational basis state with index `index`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n_qubits)?;
        if index >= s.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: s.amps.len(),
                got: index,
            });
        }
        s.amps[0] = ZERO;
        s.amps[index] = ONE;
        Ok(s)
    }

    /// Tensor product of single-qubit states; entry `q` is qubit `q`.
    pub fn init_product(states: &[[C64; 2]]) -> Result<Self> {
        check_size(states.len())?;
        for s in states {
            let norm = s[0].norm_sqr() + s[1].norm_sqr();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(Error::NotNormalized(norm));
            }
        }
        let mut amps = vec![ONE];
        for s in states {
            // New qubit becomes the most significant bit so far.
            let mut next = Vec::with_capacity(amps.len() * 2);
            next.extend(amps.iter().map(|a| a * s[0]));
            next.extend(amps.iter().map(|a| a * s[1]));
            amps = next;
        }
        let mut out = StateVector {
            n_qubits: states.len(),
            amps,
        };
        out.renormalize()?;
        Ok(out)
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = amps.len().trailing_zeros() as usize;
        if amps.is_empty() || 1 << n_qubits != amps.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits.max(1),
                got: amps.len(),
            });
        }
        check_size(n_qubits)?;
        let s = StateVector { n_qubits, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Born probabilities of all basis states.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Probability that qubit `q` reads 1.
    pub fn prob_one(&self, q: usize) -> Result<f64> {
        self.check_qubit(q)?;
        let bit = 1 << q;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply_1q(&mut self, g: &Gate1Q, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let m = g.0;
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    /// Applies the same gate to every qubit.
    pub fn apply_1q_all(&mut self, g: &Gate1Q) {
        for q in 0..self.n_qubits {
            self.apply_1q(g, q).expect("qubit in range");
        }
    }

    /// Applies `g` to `target` on the branch where `control` is 1.
    pub fn apply_controlled_1q(&mut self, g: &Gate1Q, control: usize, target: usize) -> Result<()> {
        self.check_distinct(&[control, target])?;
        let m = g.0;
        let (cbit, tbit) = (1 << control, 1 << target);
        for i in 0..self.amps.len() {
            if i & cbit != 0 && i & tbit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | tbit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | tbit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    pub fn apply_toffoli(&mut self, c1: usize, c2: usize, target: usize) -> Result<()> {
        self.check_distinct(&[c1, c2, target])?;
        let controls = (1 << c1) | (1 << c2);
        let tbit = 1 << target;
        for i in 0..self.amps.len() {
            if i & controls == controls && i & tbit == 0 {
                self.amps.swap(i, i | tbit);
            }
        }
        Ok(())
    }

    /// Multiplies amplitude `i` by `phases[i]`; every factor must be unimodular.
    pub fn apply_diagonal_phase(&mut self, phases: &[C64]) -> Result<()> {
        if phases.len() != self.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                got: phases.len(),
            });
        }
        if let Some((index, z)) = phases
            .iter()
            .enumerate()
            .find(|(_, z)| (z.norm() - 1.0).abs() > 1e-12)
        {
            return Err(Error::NotUnimodular {
                index,
                modulus: z.norm(),
            });
        }
        for (a, z) in self.amps.iter_mut().zip(phases) {
            *a *= z;
        }
        Ok(())
    }

    /// Applies a dense `2^k × 2^k` row-major matrix to `qubits`, where local
    /// index bit `j` is `qubits[j]`.
    pub fn apply_matrix(&mut self, matrix: &[C64], qubits: &[usize]) -> Result<()> {
        self.check_distinct(qubits)?;
        let k = qubits.len();
        let dim = 1 << k;
        if matrix.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: matrix.len(),
            });
        }
        let mask: usize = qubits.iter().map(|&q| 1 << q).sum();
        let scatter = |local: usize| -> usize {
            qubits
                .iter()
                .enumerate()
                .filter(|(j, _)| (local >> j) & 1 == 1)
                .map(|(_, &q)| 1 << q)
                .sum()
        };
        let offsets: Vec<usize> = (0..dim).map(scatter).collect();
        let mut local_in = vec![ZERO; dim];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (l, &off) in offsets.iter().enumerate() {
                local_in[l] = self.amps[base | off];
            }
            for (r, &off) in offsets.iter().enumerate() {
                let row = &matrix[r * dim..(r + 1) * dim];
                self.amps[base | off] = row.iter().zip(&local_in).map(|(m, a)| m * a).sum();
            }
        }
        Ok(())
    }

    /// Projective Z measurement of qubit `q`; consumes exactly one uniform.
    pub fn measure_qubit<R: Rng + ?Sized>(
        &mut self,
        q: usize,
        rng: &mut R,
    ) -> Result<MeasurementOutcome> {
        let p1 = self.prob_one(q)?;
        let bit = 1 << q;
        let outcome = choose_branch(p1, rng.random::<f64>())?;
        self.collapse(
            |i| (i & bit != 0) == outcome,
            if outcome { p1 } else { 1.0 - p1 },
        )?;
        Ok(MeasurementOutcome {
            bit: outcome,
            probability: if outcome { p1 } else { 1.0 - p1 },
        })
    }

    /// Measures the projector `|11⟩⟨11|` on qubits `(i, j)` without an
    /// ancilla; outcome 1 means both qubits are 1. Consumes one uniform.
    pub fn measure_edge_projector<R: Rng + ?Sized>(
        &mut self,
        i: usize,
        j: usize,
        rng: &mut R,
    ) -> Result<MeasurementOutcome> {
        self.check_distinct(&[i, j])?;
        let both = (1 << i) | (1 << j);
        let p1: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(k, _)| k & both == both)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        let outcome = choose_branch(p1, rng.random::<f64>())?;
        self.collapse(
            |k| (k & both == both) == outcome,
            if outcome { p1 } else { 1.0 - p1 },
        )?;
        Ok(MeasurementOutcome {
            bit: outcome,
            probability: if outcome { p1 } else { 1.0 - p1 },
        })
    }

    /// Measures `q`, flips it back to `|0⟩` if needed, then prepares
    /// `target` on it.
    pub fn reset_qubit<R: Rng + ?Sized>(
        &mut self,
        q: usize,
        target: [C64; 2],
        rng: &mut R,
    ) -> Result<MeasurementOutcome> {
        let prep = Gate1Q::preparing(target)?;
        let m = self.measure_qubit(q, rng)?;
        if m.bit {
            self.apply_1q(&Gate1Q::x(), q)?;
        }
        self.apply_1q(&prep, q)?;
        Ok(m)
    }

    /// One line per amplitude above [`DUMP_EPS`]: `bitstring re im`, with
    /// the bitstring in qubit order (qubit 0 first).
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() >= DUMP_EPS {
                let bits: String = (0..self.n_qubits)
                    .map(|q| if (i >> q) & 1 == 1 { '1' } else { '0' })
                    .collect();
                out.push_str(&format!("{bits} {:.12e} {:.12e}\n", a.re, a.im));
            }
        }
        out
    }

    /// The state of the first `n_keep` qubits, assuming the remaining ones
    /// are in `|0⟩` (amplitudes with any high bit set must vanish).
    pub fn truncate_zero_high(&self, n_keep: usize) -> Result<StateVector> {
        let keep = 1 << n_keep;
        let leak: f64 = self.amps[keep..].iter().map(|a| a.norm_sqr()).sum();
        if leak > 1e-12 {
            return Err(Error::NotNormalized(1.0 - leak));
        }
        StateVector::from_amplitudes(self.amps[..keep].to_vec())
    }

    /// Appends `extra` qubits in `|0⟩` as the most significant bits.
    pub fn extend_zero(&self, extra: usize) -> Result<StateVector> {
        check_size(self.n_qubits + extra)?;
        let mut amps = self.amps.clone();
        amps.resize(1 << (self.n_qubits + extra), ZERO);
        Ok(StateVector {
            n_qubits: self.n_qubits + extra,
            amps,
        })
    }

    fn collapse<F: Fn(usize) -> bool>(&mut self, keep: F, weight: f64) -> Result<()> {
        if weight < BRANCH_EPS {
            return Err(Error::VanishingBranch);
        }
        let scale = 1.0 / weight.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if keep(i) {
                *a *= scale;
            } else {
                *a = ZERO;
            }
        }
        Ok(())
    }

    /// Rescales to unit norm, removing accumulated rounding drift.
    pub fn renormalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr();
        if norm < BRANCH_EPS {
            return Err(Error::NotNormalized(norm));
        }
        let scale = 1.0 / norm.sqrt();
        for a in &mut self.amps {
            *a *= scale;
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    fn check_distinct(&self, qubits: &[usize]) -> Result<()> {
        for (k, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..k].contains(&q) {
                return Err(Error::IndexCollision(qubits.to_vec()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::SizeGuard {
            what: "qubit count",
            got: n,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Outcome 1 iff `u < p1`, with near-impossible branches excluded.
fn choose_branch(p1: f64, u: f64) -> Result<bool> {
    let p0 = 1.0 - p1;
    match (p0 < BRANCH_EPS, p1 < BRANCH_EPS) {
        (true, true) => Err(Error::VanishingBranch),
        (true, false) => Ok(true),
        (false, true) => Ok(false),
        (false, false) => Ok(u < p1),
    }
}

/// Single-qubit state `√(1-p)|0⟩ + √p|1⟩`.
pub fn bernoulli_state(p: f64) -> [C64; 2] {
    [C64::new((1.0 - p).sqrt(), 0.0), C64::new(p.sqrt(), 0.0)]
}
