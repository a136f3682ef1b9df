//! The restricted error channel: bit flips and single-qubit phase rotations.
//!
//! Any product of these maps `(|y⟩ ± |ȳ⟩)/√2` to
//! `e^{iγ} (|y'⟩ + e^{iθ}|ȳ'⟩)/√2`, so the state never leaves the (dephased)
//! GBS family. [`predict_effect`] tracks that closed form symbolically and
//! is independent of the statevector path.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{Gate, QubitId};
use crate::gbs::{qubit_mask, GbsLabel};
use crate::scalar::{angle_distance, wrap_angle, Real};
use crate::statevector::StateVector;

/// One elementary error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElementaryError<T> {
    /// Pauli X on qubit `q`.
    BitFlip { q: QubitId },
    /// `diag(1, e^{iδ})` on qubit `q`; `δ = π` is a phase flip.
    PhaseRot { q: QubitId, delta: T },
}

impl<T: Real> ElementaryError<T> {
    pub fn qubit(&self) -> QubitId {
        match *self {
            ElementaryError::BitFlip { q } | ElementaryError::PhaseRot { q, .. } => q,
        }
    }

    pub fn gate(&self) -> Gate<T> {
        match *self {
            ElementaryError::BitFlip { q } => Gate::x(q),
            ElementaryError::PhaseRot { q, delta } => Gate::phase(q, delta),
        }
    }
}

impl<T: Real> fmt::Display for ElementaryError<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ElementaryError::BitFlip { q } => write!(f, "flip {q}"),
            ElementaryError::PhaseRot { q, delta } => write!(f, "rot {q}:{delta}"),
        }
    }
}

/// Ordered list of elementary errors, applied first to last.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ErrorSpec<T> {
    pub ops: Vec<ElementaryError<T>>,
}

impl<T: Real> ErrorSpec<T> {
    pub fn identity() -> Self {
        Self { ops: Vec::new() }
    }

    pub fn new(ops: Vec<ElementaryError<T>>) -> Self {
        Self { ops }
    }

    pub fn flip(mut self, q: QubitId) -> Self {
        self.ops.push(ElementaryError::BitFlip { q });
        self
    }

    pub fn rot(mut self, q: QubitId, delta: T) -> Self {
        self.ops.push(ElementaryError::PhaseRot { q, delta });
        self
    }

    pub fn is_identity(&self) -> bool {
        self.ops.is_empty()
    }

    /// XOR of all flipped qubits as a basis-index mask on `n` qubits.
    pub fn flip_mask(&self, n: usize) -> u64 {
        self.ops.iter().fold(0, |m, op| match *op {
            ElementaryError::BitFlip { q } => m ^ qubit_mask(n, q),
            ElementaryError::PhaseRot { .. } => m,
        })
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self.ops.iter().find(|op| op.qubit() == 0 || op.qubit() > n) {
            Some(op) => Err(Error::QubitOutOfRange {
                qubit: op.qubit(),
                num_qubits: n,
            }),
            None => Ok(()),
        }
    }
}

impl<T: Real> fmt::Display for ErrorSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ops.is_empty() {
            return f.write_str("none");
        }
        for (k, op) in self.ops.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{op}")?;
        }
        Ok(())
    }
}

/// Applies every elementary error in order.
pub fn apply_error<T: Real>(state: &mut StateVector<T>, spec: &ErrorSpec<T>) -> Result<()> {
    spec.validate(state.num_qubits())?;
    for op in &spec.ops {
        state.apply(&op.gate())?;
    }
    Ok(())
}

/// Predicted form `e^{iγ} (|y⟩ + e^{iθ}|ȳ⟩)/√2` after an error, with `y`
/// canonical (qubit-1 bit clear).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction<T> {
    pub support: u64,
    /// `θ` in `(−π, π]`.
    pub relative_phase: T,
    /// `γ` in `(−π, π]`.
    pub global_phase: T,
}

impl<T: Real> Prediction<T> {
    /// Flip pattern relative to the original label, qubit-1 bit always clear.
    pub fn flip_pattern(&self, original: &GbsLabel) -> u64 {
        self.support ^ original.x()
    }

    /// Whether the relative phase moved by `π` (mod `2π`) within `tol`.
    pub fn phase_flipped(&self, original: &GbsLabel, tol: T) -> bool {
        let before = if original.sign().bit() == 1 {
            T::PI()
        } else {
            T::zero()
        };
        angle_distance(self.relative_phase - before, T::PI()) < tol
    }
}

/// Symbolic effect of `spec` on `build(label)`.
///
/// Each branch is carried as `(basis index, phase)`; a flip XORs the index,
/// a rotation adds `δ` to every branch whose index has the qubit set.
pub fn predict_effect<T: Real>(label: &GbsLabel, spec: &ErrorSpec<T>) -> Result<Prediction<T>> {
    let n = label.n();
    spec.validate(n)?;
    let initial = if label.sign().bit() == 1 {
        T::PI()
    } else {
        T::zero()
    };
    let mut branches = [(label.x(), T::zero()), (label.x_bar(), initial)];
    for op in &spec.ops {
        match *op {
            ElementaryError::BitFlip { q } => {
                let m = qubit_mask(n, q);
                for b in &mut branches {
                    b.0 ^= m;
                }
            }
            ElementaryError::PhaseRot { q, delta } => {
                let m = qubit_mask(n, q);
                for b in &mut branches {
                    if b.0 & m != 0 {
                        b.1 = b.1 + delta;
                    }
                }
            }
        }
    }
    if branches[0].0 > branches[1].0 {
        branches.swap(0, 1);
    }
    let [(support, gamma), (_, other)] = branches;
    Ok(Prediction {
        support,
        relative_phase: wrap_angle(other - gamma),
        global_phase: wrap_angle(gamma),
    })
}

/// Distribution of rotation angles for [`random_error`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseModes<T> {
    /// Uniform on `(−π, π]`.
    Uniform,
    /// Drawn uniformly from a fixed set.
    Set(Vec<T>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomErrorConfig<T> {
    /// Upper bound on distinct flipped qubits; clamped to `n`.
    pub max_flips: usize,
    /// Upper bound on rotation ops; rotations of angle zero are dropped.
    pub max_rotations: usize,
    pub phase_modes: PhaseModes<T>,
}

impl<T: Real> RandomErrorConfig<T> {
    /// Up to `n` flips and `n` uniform rotations.
    pub fn for_qubits(n: usize) -> Self {
        Self {
            max_flips: n,
            max_rotations: n,
            phase_modes: PhaseModes::Uniform,
        }
    }
}

/// Reproducible pseudo-random error on `n` qubits.
///
/// Flips hit distinct qubits; rotations pick qubits independently. The ops
/// are interleaved in random order.
pub fn random_error<T: Real>(n: usize, seed: u64, config: &RandomErrorConfig<T>) -> ErrorSpec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_error_with(n, &mut rng, config)
}

/// [`random_error`] drawing from a caller-owned generator.
pub fn random_error_with<T: Real, R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    config: &RandomErrorConfig<T>,
) -> ErrorSpec<T> {
    let mut qubits: Vec<QubitId> = (1..=n).collect();
    let flips = rng.gen_range(0..=config.max_flips.min(n));
    let (chosen, _) = qubits.partial_shuffle(rng, flips);
    let mut ops: Vec<ElementaryError<T>> = chosen
        .iter()
        .map(|&q| ElementaryError::BitFlip { q })
        .collect();

    let rotations = rng.gen_range(0..=config.max_rotations);
    for _ in 0..rotations {
        let q = rng.gen_range(1..=n);
        let delta = match &config.phase_modes {
            PhaseModes::Uniform => {
                // (−π, π]
                let u: f64 = rng.gen();
                T::of(std::f64::consts::PI - u * std::f64::consts::TAU)
            }
            PhaseModes::Set(set) if set.is_empty() => T::zero(),
            PhaseModes::Set(set) => set[rng.gen_range(0..set.len())],
        };
        if delta != T::zero() {
            ops.push(ElementaryError::PhaseRot { q, delta });
        }
    }
    ops.shuffle(rng);
    ErrorSpec { ops }
}
