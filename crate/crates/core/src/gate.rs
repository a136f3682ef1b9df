//! The gate set used by the discrimination and correction circuits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// 1-based qubit index. Qubit 1 is the most significant bit of a basis label.
pub type QubitId = usize;

/// A single unitary gate on one or two qubits.
///
/// Serialized as a flat object tagged by `"gate"`, e.g.
/// `{"gate":"CNOT","c":4,"t":1}` or `{"gate":"PHASE","q":2,"angle":0.5}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate")]
pub enum Gate<T> {
    #[serde(rename = "H")]
    H { q: QubitId },
    #[serde(rename = "X")]
    X { q: QubitId },
    #[serde(rename = "Z")]
    Z { q: QubitId },
    /// `diag(1, e^{i angle})`.
    #[serde(rename = "PHASE")]
    Phase { q: QubitId, angle: T },
    #[serde(rename = "CNOT")]
    Cnot { c: QubitId, t: QubitId },
    #[serde(rename = "CZ")]
    Cz { c: QubitId, t: QubitId },
}

impl<T: Real> Gate<T> {
    pub fn h(q: QubitId) -> Self {
        Gate::H { q }
    }

    pub fn x(q: QubitId) -> Self {
        Gate::X { q }
    }

    pub fn z(q: QubitId) -> Self {
        Gate::Z { q }
    }

    pub fn phase(q: QubitId, angle: T) -> Self {
        Gate::Phase { q, angle }
    }

    pub fn cnot(control: QubitId, target: QubitId) -> Self {
        Gate::Cnot {
            c: control,
            t: target,
        }
    }

    pub fn cz(control: QubitId, target: QubitId) -> Self {
        Gate::Cz {
            c: control,
            t: target,
        }
    }

    /// The gate undoing this one.
    pub fn inverse(&self) -> Self {
        match *self {
            Gate::Phase { q, angle } => Gate::Phase { q, angle: -angle },
            g => g,
        }
    }

    /// Qubits the gate acts on, control first.
    pub fn qubits(&self) -> Vec<QubitId> {
        match *self {
            Gate::H { q } | Gate::X { q } | Gate::Z { q } | Gate::Phase { q, .. } => vec![q],
            Gate::Cnot { c, t } | Gate::Cz { c, t } => vec![c, t],
        }
    }

    /// Checks operands against a register of `num_qubits` qubits.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q == 0 || q > num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::SameQubit(qs[0]));
        }
        Ok(())
    }

    /// Same gate with every qubit id passed through `f`.
    pub fn remap(&self, f: impl Fn(QubitId) -> QubitId) -> Self {
        match *self {
            Gate::H { q } => Gate::H { q: f(q) },
            Gate::X { q } => Gate::X { q: f(q) },
            Gate::Z { q } => Gate::Z { q: f(q) },
            Gate::Phase { q, angle } => Gate::Phase { q: f(q), angle },
            Gate::Cnot { c, t } => Gate::Cnot { c: f(c), t: f(t) },
            Gate::Cz { c, t } => Gate::Cz { c: f(c), t: f(t) },
        }
    }

    pub fn to_f64(&self) -> Gate<f64> {
        match *self {
            Gate::H { q } => Gate::H { q },
            Gate::X { q } => Gate::X { q },
            Gate::Z { q } => Gate::Z { q },
            Gate::Phase { q, angle } => Gate::Phase {
                q,
                angle: angle.to_f64_lossy(),
            },
            Gate::Cnot { c, t } => Gate::Cnot { c, t },
            Gate::Cz { c, t } => Gate::Cz { c, t },
        }
    }
}
