//! Two-qubit state preparation from `|00⟩`.
//!
//! Target `α|00⟩ + β|01⟩ + γ|10⟩ + η|11⟩`, where the first label character
//! is the control qubit. The circuit is `U1` on the control, `U2` on the
//! target, then a controlled `U` on the target:
//!
//! * `U1` is a real rotation splitting the control into weights
//!   `|α|²+|β|²` and `|γ|²+|η|²`;
//! * `U2` prepares the normalized conditional state `(α, β)/n0`;
//! * `U` maps that state to `(γ, η)/n1` when the control is set.

use crate::error::{Error, Result};
use crate::sim::{Gate1Q, StateVector, C64};

/// Below this conditional norm the branch is treated as empty.
const BRANCH_FLOOR: f64 = 1e-15;

/// Gate sequence produced by [`prepare_two_qubit`].
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitSequence {
    pub u1: Gate1Q,
    pub u2: Gate1Q,
    pub controlled: Gate1Q,
}

impl TwoQubitSequence {
    /// Applies the sequence; `control` carries the first label character.
    pub fn apply(&self, state: &mut StateVector, control: usize, target: usize) -> Result<()> {
        state.apply_1q(&self.u1, control)?;
        state.apply_1q(&self.u2, target)?;
        state.apply_controlled_1q(&self.controlled, control, target)
    }
}

pub fn prepare_two_qubit(alpha: C64, beta: C64, gamma: C64, eta: C64) -> Result<TwoQubitSequence> {
    let norm = alpha.norm_sqr() + beta.norm_sqr() + gamma.norm_sqr() + eta.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let n0 = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    let n1 = (gamma.norm_sqr() + eta.norm_sqr()).sqrt();
    let scale = 1.0 / (n0 * n0 + n1 * n1).sqrt();
    let u1 = Gate1Q::preparing([C64::new(n0 * scale, 0.0), C64::new(n1 * scale, 0.0)])?;
    let p0 = conditional(alpha, beta, n0)?;
    let p1 = conditional(gamma, eta, n1)?;
    let (u2, controlled) = match (p0, p1) {
        (Some(p0), Some(p1)) => (p0, p1.mul(&p0.dagger())),
        (Some(p0), None) => (p0, Gate1Q::identity()),
        (None, Some(p1)) => (Gate1Q::identity(), p1),
        (None, None) => unreachable!("normalized input has a nonempty branch"),
    };
    Ok(TwoQubitSequence { u1, u2, controlled })
}

fn conditional(a: C64, b: C64, n: f64) -> Result<Option<Gate1Q>> {
    if n < BRANCH_FLOOR {
        return Ok(None);
    }
    let (a, b) = (a / n, b / n);
    let fix = (a.norm_sqr() + b.norm_sqr()).sqrt();
    Gate1Q::preparing([a / fix, b / fix]).map(Some)
}

/// Index of the label `xy` when `x` sits on `control` and `y` on `target`.
pub fn label_index(x: bool, y: bool, control: usize, target: usize) -> usize {
    (usize::from(x) << control) | (usize::from(y) << target)
}
