//! Non-destructive discrimination of generalized Bell states.
//!
//! Each check couples one fresh ancilla to the register, reads it out and
//! discards it. On an exact GBS the readout is deterministic and the system
//! state is left untouched (up to global phase):
//!
//! * phase check: `H(a)`, `CNOT(a → j)` for every system qubit `j`, `H(a)`;
//!   reads `init ⊕ sign bit`.
//! * parity check `i`: `CNOT(i → a)`, `CNOT(i+1 → a)`; reads
//!   `init ⊕ x_i ⊕ x_{i+1}`, the same in both branches since complementary
//!   strings share adjacent parities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{Gate, QubitId};
use crate::gbs::{classify, GbsLabel, Sign};
use crate::scalar::Real;
use crate::statevector::StateVector;

/// Classical record of a part-1 discrimination: the phase bit and the
/// `n − 1` adjacent parities.
///
/// Serialized as `{"phi": 0, "parity": [1, 0, 1]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub phi: u8,
    pub parity: Vec<u8>,
}

impl Signature {
    /// Register size the signature describes.
    pub fn n(&self) -> usize {
        self.parity.len() + 1
    }

    /// Closed form: `φ` is the sign bit, `p_i = x_i ⊕ x_{i+1}`.
    pub fn of_label(label: &GbsLabel) -> Self {
        let parity = (1..label.n())
            .map(|i| label.bit(i) ^ label.bit(i + 1))
            .collect();
        Self {
            phi: label.sign().bit(),
            parity,
        }
    }

    /// Inverse of [`Signature::of_label`]: integrates the parities from `x_1 = 0`.
    pub fn to_label(&self) -> Result<GbsLabel> {
        let n = self.n();
        let mut x = 0u64;
        let mut bit = 0u8;
        for &p in &self.parity {
            bit ^= p & 1;
            x = (x << 1) | u64::from(bit);
        }
        GbsLabel::new(n, x, Sign::from_bit(self.phi))
    }
}

/// Ancilla readout with its Born probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Readout<T> {
    pub bit: u8,
    pub probability: T,
}

/// Gates of the phase check with the ancilla at id `anc`, system qubits `1..=n`.
pub fn phase_gates<T: Real>(n: usize, anc: QubitId) -> Vec<Gate<T>> {
    let mut gates = Vec::with_capacity(n + 2);
    gates.push(Gate::h(anc));
    gates.extend((1..=n).map(|j| Gate::cnot(anc, j)));
    gates.push(Gate::h(anc));
    gates
}

/// Gates of parity check `i` (qubits `i`, `i + 1`) onto ancilla `anc`.
pub fn parity_gates<T: Real>(i: usize, anc: QubitId) -> Vec<Gate<T>> {
    vec![Gate::cnot(i, anc), Gate::cnot(i + 1, anc)]
}

/// Attaches an ancilla in `|init⟩`, runs `gates` (built for that ancilla id),
/// measures and discards it.
pub(crate) fn run_with_ancilla<T: Real, R: Rng + ?Sized>(
    state: &mut StateVector<T>,
    init: u8,
    gates: impl FnOnce(QubitId) -> Vec<Gate<T>>,
    rng: &mut R,
) -> Result<Readout<T>> {
    let anc = state.attach_ancilla(init)?;
    state.apply_all(&gates(anc))?;
    let m = state.measure_qubit(anc, rng)?;
    state.detach_qubit(anc, T::UNITARITY_TOL)?;
    Ok(Readout {
        bit: m.bit,
        probability: m.probability,
    })
}

/// Phase check with the ancilla prepared in `|ancilla_init⟩`.
///
/// On an exact GBS the result is `ancilla_init ⊕ sign bit` with certainty.
/// On other inputs the readout is a Born sample and the state collapses
/// accordingly.
pub fn phase_circuit<T: Real, R: Rng + ?Sized>(
    state: &mut StateVector<T>,
    ancilla_init: u8,
    rng: &mut R,
) -> Result<Readout<T>> {
    let n = state.num_qubits();
    run_with_ancilla(state, ancilla_init, |a| phase_gates(n, a), rng)
}

/// Parity check of qubits `i` and `i + 1`, `1 ≤ i ≤ n − 1`.
pub fn parity_circuit<T: Real, R: Rng + ?Sized>(
    state: &mut StateVector<T>,
    i: usize,
    ancilla_init: u8,
    rng: &mut R,
) -> Result<Readout<T>> {
    let n = state.num_qubits();
    if i == 0 || i >= n {
        return Err(Error::InvalidArgument(format!(
            "parity index {i} outside 1..={}",
            n.saturating_sub(1)
        )));
    }
    run_with_ancilla(state, ancilla_init, |a| parity_gates(i, a), rng)
}

/// Signature plus the probability of every ancilla outcome, phase check first.
#[derive(Clone, Debug, PartialEq)]
pub struct Discrimination<T> {
    pub signature: Signature,
    pub probabilities: Vec<T>,
}

impl<T: Real> Discrimination<T> {
    /// Smallest outcome probability; one for a fully deterministic run.
    pub fn min_probability(&self) -> T {
        self.probabilities.iter().copied().fold(T::one(), T::min)
    }
}

/// Runs the phase check and all `n − 1` parity checks, each with a fresh
/// `|0⟩` ancilla.
pub fn discriminate<T: Real, R: Rng + ?Sized>(
    state: &mut StateVector<T>,
    rng: &mut R,
) -> Result<Discrimination<T>> {
    let n = state.num_qubits();
    let phase = phase_circuit(state, 0, rng)?;
    let mut probabilities = vec![phase.probability];
    let mut parity = Vec::with_capacity(n - 1);
    for i in 1..n {
        let r = parity_circuit(state, i, 0, rng)?;
        parity.push(r.bit);
        probabilities.push(r.probability);
    }
    Ok(Discrimination {
        signature: Signature {
            phi: phase.bit,
            parity,
        },
        probabilities,
    })
}

/// Part-1 discrimination of an exact GBS.
///
/// Fails with [`Error::NotGbs`] unless the input classifies as an exact GBS;
/// the readouts are then deterministic and no randomness is consumed.
pub fn signature_of<T: Real>(state: &mut StateVector<T>) -> Result<Signature> {
    let c = classify(state, T::CLASSIFY_TOL)?;
    if !c.is_exact() {
        return Err(Error::NotGbs(format!(
            "dephased state (relative phase {})",
            c.residual_phase
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    Ok(discriminate(state, &mut rng)?.signature)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbs::build;

    fn label(s: &str) -> GbsLabel {
        s.parse().unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(1)
    }

    #[test]
    fn phase_circuit_examples() {
        let mut s = build::<f64>(&label("2:0:+"));
        assert_eq!(phase_circuit(&mut s, 0, &mut rng()).unwrap().bit, 0);
        let mut s = build::<f64>(&label("2:1:-"));
        assert_eq!(phase_circuit(&mut s, 0, &mut rng()).unwrap().bit, 1);
        // (|000⟩ − |111⟩)/√2 with ancilla |1⟩: 1 ⊕ 1
        let mut s = build::<f64>(&label("3:0:-"));
        let r = phase_circuit(&mut s, 1, &mut rng()).unwrap();
        assert_eq!(r.bit, 0);
        assert!((r.probability - 1.0).abs() < 1e-12);
        // (|00⟩ − |11⟩)/√2: phase bit 1 with certainty
        let mut s = build::<f64>(&label("2:0:-"));
        let r = phase_circuit(&mut s, 0, &mut rng()).unwrap();
        assert_eq!(r.bit, 1);
        assert!((r.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_circuit_examples() {
        let mut s = build::<f64>(&label("2:0:+"));
        assert_eq!(parity_circuit(&mut s, 1, 0, &mut rng()).unwrap().bit, 0);
        let mut s = build::<f64>(&label("2:1:+"));
        assert_eq!(parity_circuit(&mut s, 1, 0, &mut rng()).unwrap().bit, 1);
        // (|010⟩ + |101⟩)/√2, qubits 2 and 3 hold 1 and 0
        let mut s = build::<f64>(&label("3:2:+"));
        assert_eq!(parity_circuit(&mut s, 2, 0, &mut rng()).unwrap().bit, 1);
        assert!(parity_circuit(&mut s, 3, 0, &mut rng()).is_err());
        assert!(parity_circuit(&mut s, 0, 0, &mut rng()).is_err());
    }

    #[test]
    fn signature_examples() {
        let mut s = build::<f64>(&label("2:0:-"));
        let sig = signature_of(&mut s).unwrap();
        assert_eq!(
            sig,
            Signature {
                phi: 1,
                parity: vec![0]
            }
        );

        let mut s = build::<f64>(&label("3:0:+"));
        assert_eq!(
            signature_of(&mut s).unwrap(),
            Signature {
                phi: 0,
                parity: vec![0, 0]
            }
        );

        // (|0110⟩ − |1001⟩)/√2
        let original = build::<f64>(&label("4:6:-"));
        let mut s = original.clone();
        assert_eq!(
            signature_of(&mut s).unwrap(),
            Signature {
                phi: 1,
                parity: vec![1, 0, 1]
            }
        );
        assert!((s.fidelity(&original).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn signature_rejects_non_gbs() {
        let mut s = StateVector::<f64>::new(2).unwrap();
        assert!(matches!(signature_of(&mut s), Err(Error::NotGbs(_))));
        let mut s = build::<f64>(&label("2:0:+"));
        s.apply(&Gate::phase(1, 0.3)).unwrap();
        assert!(matches!(signature_of(&mut s), Err(Error::NotGbs(_))));
    }

    #[test]
    fn signature_json_and_label_inverse() {
        let sig = Signature {
            phi: 0,
            parity: vec![1, 0, 1],
        };
        assert_eq!(
            serde_json::to_string(&sig).unwrap(),
            r#"{"phi":0,"parity":[1,0,1]}"#
        );
        let l = label("4:6:-");
        assert_eq!(Signature::of_label(&l).to_label().unwrap(), l);
    }

    #[test]
    fn dephased_input_is_probabilistic() {
        let mut hits = [0usize; 2];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let mut s = build::<f64>(&label("2:0:+"));
            s.apply(&Gate::phase(2, std::f64::consts::FRAC_PI_2))
                .unwrap();
            let r = phase_circuit(&mut s, 0, &mut rng).unwrap();
            assert!((r.probability - 0.5).abs() < 1e-12);
            hits[r.bit as usize] += 1;
        }
        assert!(hits[0] > 0 && hits[1] > 0);
    }
}
