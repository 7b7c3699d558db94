//! Stabilizers and syndrome-extraction unitaries for Boolean constraints.
//!
//! For a constraint `c` over `k` bits, the stabilizer is the diagonal
//! operator with `+1` on satisfying bitstrings and `-1` on violating ones,
//! and the syndrome unitary flips an ancilla exactly on violating inputs.
//!
//! Index conventions: constraint variable `j` is bit `j` of a stabilizer
//! index, so variable `k-1` is the leftmost printed qubit. For syndrome
//! unitaries the ancilla is bit 0 and variable `j` is bit `j+1`, i.e.
//! index `(b << 1) | a`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sim::MAX_QUBITS;

/// Largest arity for dense matrix construction.
pub const MAX_ARITY: usize = 10;

/// Boolean constraint on `k` bits stored as its truth table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    arity: usize,
    table: Vec<bool>,
    label: String,
}

impl Constraint {
    pub fn from_fn<F: Fn(&[bool]) -> bool>(
        arity: usize,
        label: impl Into<String>,
        predicate: F,
    ) -> Result<Self> {
        guard_arity(arity)?;
        let table = (0..1usize << arity)
            .map(|b| {
                let bits: Vec<bool> = (0..arity).map(|j| (b >> j) & 1 == 1).collect();
                predicate(&bits)
            })
            .collect();
        Ok(Constraint {
            arity,
            table,
            label: label.into(),
        })
    }

    /// `table[b]` is the predicate on bitstring index `b`.
    pub fn from_truth_table(table: Vec<bool>, label: impl Into<String>) -> Result<Self> {
        let arity = table.len().trailing_zeros() as usize;
        if table.is_empty() || 1 << arity != table.len() || arity == 0 {
            return Err(Error::InvalidParameters(format!(
                "truth table length must be 2^k with k >= 1, got {}",
                table.len()
            )));
        }
        guard_arity(arity)?;
        Ok(Constraint {
            arity,
            table,
            label: label.into(),
        })
    }

    /// Parses one `0`/`1` value per non-empty line.
    pub fn parse_truth_table(text: &str, label: impl Into<String>) -> Result<Self> {
        let mut table = Vec::new();
        for (k, line) in text.lines().enumerate() {
            match line.trim() {
                "" => continue,
                "0" => table.push(false),
                "1" => table.push(true),
                other => {
                    return Err(Error::Parse {
                        line: k + 1,
                        message: format!("expected 0 or 1, got {other:?}"),
                    })
                }
            }
        }
        Self::from_truth_table(table, label)
    }

    /// Independent-set edge constraint `¬(b0 ∧ b1)`.
    pub fn is_edge() -> Self {
        Self::from_fn(2, "is-edge", |b| !(b[0] && b[1])).expect("arity 2")
    }

    /// Exactly one of `k` bits set.
    pub fn one_hot(k: usize) -> Result<Self> {
        Self::from_fn(k, format!("one-hot-{k}"), |b| {
            b.iter().filter(|&&x| x).count() == 1
        })
    }

    /// At most one of `k` bits set.
    pub fn at_most_one(k: usize) -> Result<Self> {
        Self::from_fn(k, format!("at-most-one-{k}"), |b| {
            b.iter().filter(|&&x| x).count() <= 1
        })
    }

    pub fn always_true(k: usize) -> Result<Self> {
        Self::from_fn(k, format!("true-{k}"), |_| true)
    }

    /// Resolves `is-edge`, `one-hot-K` and `at-most-one-K`.
    pub fn by_name(name: &str) -> Result<Self> {
        if name == "is-edge" {
            return Ok(Self::is_edge());
        }
        let parse_k = |rest: &str| {
            rest.parse::<usize>().map_err(|_| {
                Error::InvalidParameters(format!("bad arity in constraint name {name:?}"))
            })
        };
        if let Some(rest) = name.strip_prefix("one-hot-") {
            return Self::one_hot(parse_k(rest)?);
        }
        if let Some(rest) = name.strip_prefix("at-most-one-") {
            return Self::at_most_one(parse_k(rest)?);
        }
        Err(Error::InvalidParameters(format!(
            "unknown constraint {name:?}"
        )))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn holds(&self, index: usize) -> bool {
        self.table[index]
    }

    pub fn truth_table(&self) -> &[bool] {
        &self.table
    }
}

fn guard_arity(k: usize) -> Result<()> {
    if k == 0 || k > MAX_ARITY {
        return Err(Error::SizeGuard {
            what: "constraint arity",
            got: k,
            limit: MAX_ARITY,
        });
    }
    Ok(())
}

/// Diagonal ±1 stabilizer of dimension `2^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerMatrix {
    diag: Vec<i8>,
}

impl StabilizerMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[i8] {
        &self.diag
    }

    pub fn entry(&self, row: usize, col: usize) -> i8 {
        if row == col {
            self.diag[row]
        } else {
            0
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<i8>> {
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| self.entry(r, c)).collect())
            .collect()
    }
}

impl fmt::Display for StabilizerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rows(f, &self.to_dense())
    }
}

/// Permutation matrix of dimension `2^{k+1}`, stored as `perm[col] = row`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeUnitary {
    perm: Vec<usize>,
}

impl SyndromeUnitary {
    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Image of basis state `col`.
    pub fn image(&self, col: usize) -> usize {
        self.perm[col]
    }

    pub fn entry(&self, row: usize, col: usize) -> u8 {
        u8::from(self.perm[col] == row)
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| self.entry(r, c)).collect())
            .collect()
    }

    /// Complex row-major form for [`crate::sim::StateVector::apply_matrix`].
    pub fn to_complex(&self) -> Vec<Complex64> {
        let d = self.dim();
        let mut m = vec![Complex64::new(0.0, 0.0); d * d];
        for (col, &row) in self.perm.iter().enumerate() {
            m[row * d + col] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.dim()];
        self.perm
            .iter()
            .all(|&r| r < seen.len() && !std::mem::replace(&mut seen[r], true))
    }

    pub fn is_involution(&self) -> bool {
        self.perm
            .iter()
            .enumerate()
            .all(|(c, &r)| self.perm[r] == c)
    }
}

impl fmt::Display for SyndromeUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rows(f, &self.to_dense())
    }
}

fn write_rows<T: fmt::Display>(f: &mut fmt::Formatter<'_>, rows: &[Vec<T>]) -> fmt::Result {
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(f, "{}", line.join(" "))?;
    }
    Ok(())
}

/// `Σ_{b ∈ V_c} P^b − Σ_{b ∉ V_c} P^b`: a projector sum over all bitstrings.
pub fn build_stabilizer(c: &Constraint) -> StabilizerMatrix {
    StabilizerMatrix {
        diag: c.table.iter().map(|&ok| if ok { 1 } else { -1 }).collect(),
    }
}

/// `Σ_{b ∈ V_c} P^b ⊗ 1 + Σ_{b ∉ V_c} P^b ⊗ X` with the ancilla as bit 0.
pub fn build_syndrome_unitary(c: &Constraint) -> SyndromeUnitary {
    let perm = (0..2usize << c.arity)
        .map(|idx| if c.holds(idx >> 1) { idx } else { idx ^ 1 })
        .collect();
    SyndromeUnitary { perm }
}

/// Outcome of [`check_stabilizer_algebra`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraReport {
    pub stabilizers: usize,
    /// Every embedded operator is ±1 diagonal.
    pub diagonal_pm_one: bool,
    /// `S_a S_b = S_b S_a` for all pairs.
    pub commute: bool,
    /// `S² = 1` for each.
    pub involutive: bool,
    /// Products of pairs act as +1 on the joint +1 eigenspace.
    pub closed_on_code_space: bool,
    /// Dimension of the joint +1 eigenspace.
    pub code_space_dim: usize,
}

impl AlgebraReport {
    pub fn passed(&self) -> bool {
        self.diagonal_pm_one && self.commute && self.involutive && self.closed_on_code_space
    }
}

/// Embeds each constraint on its qubit placement (`placement[j]` carries
/// variable `j`) in an `n_total`-qubit register and checks the stabilizer
/// group properties on the embedded operators.
pub fn check_stabilizer_algebra(
    items: &[(Constraint, Vec<usize>)],
    n_total: usize,
) -> Result<AlgebraReport> {
    if n_total > MAX_QUBITS {
        return Err(Error::SizeGuard {
            what: "qubit count",
            got: n_total,
            limit: MAX_QUBITS,
        });
    }
    let dim = 1usize << n_total;
    let mut embedded: Vec<Vec<i8>> = Vec::with_capacity(items.len());
    for (c, placement) in items {
        if placement.len() != c.arity() {
            return Err(Error::DimensionMismatch {
                expected: c.arity(),
                got: placement.len(),
            });
        }
        for (k, &q) in placement.iter().enumerate() {
            if q >= n_total {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    n_qubits: n_total,
                });
            }
            if placement[..k].contains(&q) {
                return Err(Error::IndexCollision(placement.clone()));
            }
        }
        let s = build_stabilizer(c);
        embedded.push(
            (0..dim)
                .map(|idx| {
                    let local = placement
                        .iter()
                        .enumerate()
                        .fold(0, |acc, (j, &q)| acc | (((idx >> q) & 1) << j));
                    s.diagonal()[local]
                })
                .collect(),
        );
    }
    let diagonal_pm_one = embedded
        .iter()
        .all(|d| d.iter().all(|&x| x == 1 || x == -1));
    let involutive = embedded.iter().all(|d| d.iter().all(|&x| x * x == 1));
    // Diagonal operators commute entrywise.
    let commute = true;
    let mut closed = true;
    let code: Vec<usize> = (0..dim)
        .filter(|&i| embedded.iter().all(|d| d[i] == 1))
        .collect();
    for a in 0..embedded.len() {
        for b in a + 1..embedded.len() {
            let (x, y) = (&embedded[a], &embedded[b]);
            closed &= code.iter().all(|&i| x[i] * y[i] == 1);
        }
    }
    Ok(AlgebraReport {
        stabilizers: items.len(),
        diagonal_pm_one,
        commute,
        involutive,
        closed_on_code_space: closed,
        code_space_dim: code.len(),
    })
}
