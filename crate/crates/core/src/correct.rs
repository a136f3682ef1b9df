//! Automated correction of a GBS against a stored part-1 signature.
//!
//! The pipeline has three unitary steps, each driven by an ancilla whose
//! final value is read out only for the report:
//!
//! 1. strip the arbitrary relative phase onto a fresh ancilla
//!    (`H(a)`, `CNOT(a → j)` for all `j`, `CNOT(n → a)`); the ancilla ends in
//!    a product state and is discarded,
//! 2. rerun the phase check with the ancilla prepared in the stored `φ`, then
//!    `CZ(a, n)` restores the original sign,
//! 3. for `i = 1..n−1` in order, rerun parity check `i` with the ancilla
//!    prepared in the stored `p_i`, then `CNOT(a → i+1)`.
//!
//! Step 3 must be sequential: each check reads qubit `i` after it has already
//! been aligned with qubit 1, so every qubit ends with the same flip status as
//! qubit 1 and the register holds `|x⟩` or `|x̄⟩`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discriminate::{discriminate, parity_gates, phase_gates, run_with_ancilla, Signature};
use crate::error::{Error, Result};
use crate::errors::{apply_error, ErrorSpec};
use crate::gate::{Gate, QubitId};
use crate::gbs::{build, classify, ones, GbsClassification, GbsLabel, Sign};
use crate::scalar::Real;
use crate::statevector::StateVector;

/// Which steps of the pipeline run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Steps 1–3; corrects arbitrary phase errors and bit flips.
    Full,
    /// Steps 2–3 only; the input must already be an exact GBS.
    Discrete,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::Discrete => "discrete",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Mode::Full),
            "discrete" => Ok(Mode::Discrete),
            _ => Err(Error::InvalidArgument(format!("unknown mode `{s}`"))),
        }
    }
}

/// Ordering of the step-3 parity checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ParityStrategy {
    /// Read, then correct, one pair at a time.
    #[default]
    Sequential,
    /// Read every parity before applying any correction. Does not restore
    /// the state in general; kept to exhibit the failure.
    Batch,
}

/// Classical bits kept from part 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredReference {
    pub signature: Signature,
}

impl StoredReference {
    pub fn new(signature: Signature) -> Self {
        Self { signature }
    }

    pub fn n(&self) -> usize {
        self.signature.n()
    }
}

/// Output of step 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Step1Result<T> {
    pub system: StateVector<T>,
    /// Normalized state of the discarded ancilla, up to global phase.
    pub ancilla_m: [Complex<T>; 2],
    /// Purity of the ancilla's reduced state before it was discarded.
    pub ancilla_purity: T,
}

/// Syndrome read from the correction ancillas.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionReport {
    pub phi_f: u8,
    pub p_f: Vec<u8>,
    pub restored_sign: Sign,
    /// Flipped qubits relative to qubit 1, as a basis-index mask (qubit 1 is
    /// the most significant of `n` bits and is always clear).
    pub relative_flip_pattern: u64,
}

impl CorrectionReport {
    /// Whether nothing was detected: no phase mismatch and no flips.
    pub fn is_trivial(&self, mode: Mode) -> bool {
        let phase_ok = match mode {
            Mode::Full => true,
            Mode::Discrete => self.phi_f == 0,
        };
        phase_ok && self.p_f.iter().all(|&b| b == 0) && self.relative_flip_pattern == 0
    }
}

/// Flip pattern `f` with `f_1 = 0` and `f_{i+1} = p_f[i]`.
pub fn flip_pattern_from_syndrome(p_f: &[u8]) -> u64 {
    p_f.iter()
        .fold(0u64, |acc, &b| (acc << 1) | u64::from(b & 1))
}

/// Normalizes a flip mask on `n` qubits so qubit 1 is unflipped.
pub fn normalize_flip_mask(mask: u64, n: usize) -> u64 {
    if mask >> (n - 1) & 1 == 1 {
        mask ^ ones(n)
    } else {
        mask
    }
}

/// Step-1 gates on system qubits `1..=n` with the ancilla at `anc`.
pub fn strip_phase_gates<T: Real>(n: usize, anc: QubitId) -> Vec<Gate<T>> {
    let mut gates = Vec::with_capacity(n + 2);
    gates.push(Gate::h(anc));
    gates.extend((1..=n).map(|j| Gate::cnot(anc, j)));
    gates.push(Gate::cnot(n, anc));
    gates
}

/// Step-2 gates: the phase check followed by `CZ(anc, n)`.
pub fn fix_phase_gates<T: Real>(n: usize, anc: QubitId) -> Vec<Gate<T>> {
    let mut gates = phase_gates(n, anc);
    gates.push(Gate::cz(anc, n));
    gates
}

/// Step-3 gates for pair `i`: parity check `i` followed by `CNOT(anc → i+1)`.
pub fn fix_bit_gates<T: Real>(i: usize, anc: QubitId) -> Vec<Gate<T>> {
    let mut gates = parity_gates(i, anc);
    gates.push(Gate::cnot(anc, i + 1));
    gates
}

/// Step 1: moves the relative phase of `e^{iγ}(|y⟩ + e^{iθ}|ȳ⟩)/√2` onto an
/// ancilla, leaving `(|y⟩ + |ȳ⟩)/√2`.
///
/// The ancilla ends in `(|0⟩ + e^{iθ}|1⟩)/√2` when qubit `n` of `y` is 0 and
/// in `(e^{iθ}|0⟩ + |1⟩)/√2` otherwise. Inputs outside the dephased-GBS
/// family leave it entangled and fail with [`Error::EntangledDetach`].
pub fn step1_strip_phase<T: Real>(mut state: StateVector<T>) -> Result<Step1Result<T>> {
    let n = state.num_qubits();
    let anc = state.attach_ancilla(0)?;
    state.apply_all(&strip_phase_gates(n, anc))?;
    let ancilla_purity = state.purity(anc)?;
    let ancilla_m = state.detach_qubit(anc, T::UNITARITY_TOL)?;
    Ok(Step1Result {
        system: state,
        ancilla_m,
        ancilla_purity,
    })
}

/// Step 2: compares the current phase bit with `stored_phi` and applies `Z`
/// on qubit `n` through a controlled gate when they differ. Returns `φ^f`.
pub fn step2_fix_phase<T: Real, R: Rng + ?Sized>(
    state: &mut StateVector<T>,
    stored_phi: u8,
    rng: &mut R,
) -> Result<u8> {
    let n = state.num_qubits();
    Ok(run_with_ancilla(state, stored_phi, |a| fix_phase_gates(n, a), rng)?.bit)
}

fn check_parity_len<T: Real>(state: &StateVector<T>, stored_p: &[u8]) -> Result<()> {
    let n = state.num_qubits();
    if stored_p.len() + 1 != n {
        return Err(Error::InvalidArgument(format!(
            "{} stored parities for a {n}-qubit register",
            stored_p.len()
        )));
    }
    Ok(())
}

/// Step 3: the sequential parity cascade. Returns `p^f`.
pub fn step3_fix_bits<T: Real, R: Rng + ?Sized>(
    state: &mut StateVector<T>,
    stored_p: &[u8],
    rng: &mut R,
) -> Result<Vec<u8>> {
    check_parity_len(state, stored_p)?;
    let mut p_f = Vec::with_capacity(stored_p.len());
    for (k, &p) in stored_p.iter().enumerate() {
        let i = k + 1;
        p_f.push(run_with_ancilla(state, p, |a| fix_bit_gates(i, a), rng)?.bit);
    }
    Ok(p_f)
}

/// Step 3 with every parity read before any correction.
pub fn step3_fix_bits_batch<T: Real, R: Rng + ?Sized>(
    state: &mut StateVector<T>,
    stored_p: &[u8],
    rng: &mut R,
) -> Result<Vec<u8>> {
    check_parity_len(state, stored_p)?;
    let ancillas = stored_p
        .iter()
        .map(|&p| state.attach_ancilla(p))
        .collect::<Result<Vec<_>>>()?;
    for (k, &a) in ancillas.iter().enumerate() {
        state.apply_all(&parity_gates(k + 1, a))?;
    }
    for (k, &a) in ancillas.iter().enumerate() {
        state.apply(&Gate::cnot(a, k + 2))?;
    }
    let mut p_f = Vec::with_capacity(ancillas.len());
    for &a in &ancillas {
        p_f.push(state.measure_qubit(a, rng)?.bit);
    }
    for &a in ancillas.iter().rev() {
        state.detach_qubit(a, T::UNITARITY_TOL)?;
    }
    Ok(p_f)
}

/// Pipeline options beyond the mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorrectionOptions {
    pub mode: Mode,
    pub parity: ParityStrategy,
}

impl From<Mode> for CorrectionOptions {
    fn from(mode: Mode) -> Self {
        Self {
            mode,
            parity: ParityStrategy::Sequential,
        }
    }
}

/// Runs the correction pipeline in place.
pub fn correct_full<T: Real, R: Rng + ?Sized>(
    state: &mut StateVector<T>,
    reference: &StoredReference,
    mode: Mode,
    rng: &mut R,
) -> Result<CorrectionReport> {
    correct_with(state, reference, mode.into(), rng)
}

/// [`correct_full`] with an explicit parity strategy.
pub fn correct_with<T: Real, R: Rng + ?Sized>(
    state: &mut StateVector<T>,
    reference: &StoredReference,
    options: CorrectionOptions,
    rng: &mut R,
) -> Result<CorrectionReport> {
    let n = state.num_qubits();
    if reference.n() != n {
        return Err(Error::NotGbs(format!(
            "stored reference is for {} qubits, register has {n}",
            reference.n()
        )));
    }
    let stored = &reference.signature;
    match options.mode {
        Mode::Full => {
            let taken = std::mem::replace(state, StateVector::new(1)?);
            *state = step1_strip_phase(taken)?.system;
        }
        Mode::Discrete => {
            let c = classify(state, T::CLASSIFY_TOL)?;
            if !c.is_exact() {
                return Err(Error::NotGbs(
                    "discrete mode needs an exact GBS; use full mode for arbitrary phases".into(),
                ));
            }
        }
    }
    let phi_f = step2_fix_phase(state, stored.phi, rng)?;
    // Z fires iff φ^f = 1. Full mode enters step 2 with sign + (step 1),
    // discrete mode with sign φ^f ⊕ φ.
    let incoming = match options.mode {
        Mode::Full => 0,
        Mode::Discrete => phi_f ^ stored.phi,
    };
    let restored_sign = Sign::from_bit(incoming ^ phi_f);
    let p_f = match options.parity {
        ParityStrategy::Sequential => step3_fix_bits(state, &stored.parity, rng)?,
        ParityStrategy::Batch => step3_fix_bits_batch(state, &stored.parity, rng)?,
    };
    Ok(CorrectionReport {
        relative_flip_pattern: flip_pattern_from_syndrome(&p_f),
        phi_f,
        p_f,
        restored_sign,
    })
}

/// Everything observed during one end-to-end protocol run.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolOutcome<T> {
    /// `|⟨build(label)|final⟩|`.
    pub fidelity: T,
    pub signature: Signature,
    pub report: CorrectionReport,
    /// Smallest Born probability among the part-1 readouts.
    pub part1_min_probability: T,
    pub after_error: GbsClassification<T>,
    pub after_correction: Option<GbsClassification<T>>,
    pub final_state: StateVector<T>,
}

/// Part 1 on `build(label)`, then `spec`, then part 2.
pub fn run_protocol<T: Real>(
    label: &GbsLabel,
    spec: &ErrorSpec<T>,
    options: impl Into<CorrectionOptions>,
    rng_seed: u64,
) -> Result<ProtocolOutcome<T>> {
    let options = options.into();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let original = build::<T>(label);
    let mut state = original.clone();

    let part1 = discriminate(&mut state, &mut rng)?;
    let reference = StoredReference::new(part1.signature.clone());

    apply_error(&mut state, spec)?;
    let after_error = classify(&state, T::CLASSIFY_TOL)?;

    let report = correct_with(&mut state, &reference, options, &mut rng)?;
    let fidelity = original.fidelity(&state)?;
    let part1_min_probability = part1.min_probability();
    Ok(ProtocolOutcome {
        fidelity,
        signature: part1.signature,
        report,
        part1_min_probability,
        after_error,
        after_correction: classify(&state, T::CLASSIFY_TOL).ok(),
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbs::build;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn label(s: &str) -> GbsLabel {
        s.parse().unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(3)
    }

    fn dephased(l: &str, delta: f64) -> StateVector<f64> {
        let l = label(l);
        let mut s = build::<f64>(&l);
        // phase on the |x̄⟩ branch only: rotate every qubit set in x̄ by δ / popcount
        let k = l.x_bar().count_ones() as f64;
        for q in 1..=l.n() {
            if l.x_bar() >> (l.n() - q) & 1 == 1 {
                s.apply(&Gate::phase(q, delta / k)).unwrap();
            }
        }
        s
    }

    fn ket_fid(a: [Complex<f64>; 2], b: [Complex<f64>; 2]) -> f64 {
        (a[0].conj() * b[0] + a[1].conj() * b[1]).norm()
    }

    #[test]
    fn step1_bell_minus_dephased() {
        let d = 0.83;
        // (|00⟩ − e^{iδ}|11⟩)/√2
        let s = dephased("2:0:-", d);
        let out = step1_strip_phase(s).unwrap();
        let target = build::<f64>(&label("2:0:+"));
        assert!((out.system.fidelity(&target).unwrap() - 1.0).abs() < 1e-12);
        let r = FRAC_1_SQRT_2;
        let expect = [Complex::new(r, 0.0), Complex::from_polar(-r, d)];
        assert!((ket_fid(out.ancilla_m, expect) - 1.0).abs() < 1e-12);
        assert!(out.ancilla_purity > 1.0 - 1e-12);
    }

    #[test]
    fn step1_swapped_ancilla_when_last_qubit_set() {
        let d = -1.9;
        // (|01⟩ + e^{iδ}|10⟩)/√2: qubit 2 of y = 01 is set
        let l = label("2:1:+");
        let mut s = build::<f64>(&l);
        s.apply(&Gate::phase(1, d)).unwrap();
        let out = step1_strip_phase(s).unwrap();
        assert!((out.system.fidelity(&build(&l)).unwrap() - 1.0).abs() < 1e-12);
        let r = FRAC_1_SQRT_2;
        let expect = [Complex::from_polar(r, d), Complex::new(r, 0.0)];
        assert!((ket_fid(out.ancilla_m, expect) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn step1_clean_ghz() {
        let ghz = build::<f64>(&label("3:0:+"));
        let out = step1_strip_phase(ghz.clone()).unwrap();
        assert!((out.system.fidelity(&ghz).unwrap() - 1.0).abs() < 1e-12);
        let r = FRAC_1_SQRT_2;
        let expect = [Complex::new(r, 0.0), Complex::new(r, 0.0)];
        assert!((ket_fid(out.ancilla_m, expect) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn step1_rejects_non_gbs() {
        // (|00⟩ + 2|01⟩)/√5
        let s = StateVector::from_amplitudes(vec![
            Complex::new(1.0, 0.0),
            Complex::new(2.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
        ])
        .unwrap();
        assert!(matches!(
            step1_strip_phase(s),
            Err(Error::EntangledDetach { .. })
        ));
    }

    #[test]
    fn step2_examples() {
        let plus = build::<f64>(&label("2:0:+"));
        let mut s = plus.clone();
        assert_eq!(step2_fix_phase(&mut s, 1, &mut rng()).unwrap(), 1);
        let minus = build::<f64>(&label("2:0:-"));
        assert!((s.fidelity(&minus).unwrap() - 1.0).abs() < 1e-12);

        let mut s = plus.clone();
        assert_eq!(step2_fix_phase(&mut s, 0, &mut rng()).unwrap(), 0);
        assert!((s.fidelity(&plus).unwrap() - 1.0).abs() < 1e-12);

        let psi4 = build::<f64>(&label("2:1:-"));
        let mut s = psi4.clone();
        assert_eq!(step2_fix_phase(&mut s, 1, &mut rng()).unwrap(), 0);
        assert!((s.fidelity(&psi4).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn step3_examples() {
        // (|00⟩ + |11⟩) hit by X on qubit 1
        let original = build::<f64>(&label("2:0:+"));
        let mut s = original.clone();
        s.apply(&Gate::x(1)).unwrap();
        assert_eq!(step3_fix_bits(&mut s, &[0], &mut rng()).unwrap(), vec![1]);
        assert!((s.fidelity(&original).unwrap() - 1.0).abs() < 1e-12);

        let psi3 = build::<f64>(&label("2:1:+"));
        let mut s = psi3.clone();
        assert_eq!(step3_fix_bits(&mut s, &[1], &mut rng()).unwrap(), vec![0]);
        assert!((s.fidelity(&psi3).unwrap() - 1.0).abs() < 1e-12);

        // (|010⟩ + |101⟩) with flips on qubits 2 and 3: f = (0, 1, 1)
        let original = build::<f64>(&label("3:2:+"));
        let mut s = original.clone();
        s.apply(&Gate::x(2)).unwrap();
        s.apply(&Gate::x(3)).unwrap();
        assert_eq!(
            step3_fix_bits(&mut s, &[1, 1], &mut rng()).unwrap(),
            vec![1, 1]
        );
        assert!((s.fidelity(&original).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn step3_rejects_wrong_length() {
        let mut s = build::<f64>(&label("3:0:+"));
        assert!(step3_fix_bits(&mut s, &[0], &mut rng()).is_err());
    }

    #[test]
    fn batch_parity_fails_where_sequential_succeeds() {
        // GHZ with flips on qubits 2 and 3
        let original = build::<f64>(&label("3:0:+"));
        let mut damaged = original.clone();
        damaged.apply(&Gate::x(2)).unwrap();
        damaged.apply(&Gate::x(3)).unwrap();

        let mut seq = damaged.clone();
        step3_fix_bits(&mut seq, &[0, 0], &mut rng()).unwrap();
        assert!((seq.fidelity(&original).unwrap() - 1.0).abs() < 1e-12);

        let mut batch = damaged;
        step3_fix_bits_batch(&mut batch, &[0, 0], &mut rng()).unwrap();
        assert!(batch.fidelity(&original).unwrap() < 1e-12);
    }

    #[test]
    fn correct_full_ghz_mixed_error() {
        let l = label("3:0:+");
        let spec = ErrorSpec::identity().flip(2).rot(3, PI / 3.0);
        let out = run_protocol::<f64>(&l, &spec, Mode::Full, 11).unwrap();
        assert!((out.fidelity - 1.0).abs() < 1e-10);
        assert_eq!(out.report.phi_f, 0);
        assert_eq!(out.report.restored_sign, Sign::Plus);
        // f = (0, 1, 0)
        assert_eq!(out.report.p_f, vec![1, 0]);
        assert_eq!(out.report.relative_flip_pattern, 0b010);
    }

    #[test]
    fn clean_state_both_modes() {
        let l = label("2:0:-");
        let full = run_protocol::<f64>(&l, &ErrorSpec::identity(), Mode::Full, 0).unwrap();
        assert!((full.fidelity - 1.0).abs() < 1e-12);
        assert_eq!(full.report.phi_f, 1);
        assert_eq!(full.report.p_f, vec![0]);
        assert_eq!(full.report.relative_flip_pattern, 0);
        assert_eq!(full.report.restored_sign, Sign::Minus);

        let discrete = run_protocol::<f64>(&l, &ErrorSpec::identity(), Mode::Discrete, 0).unwrap();
        assert!((discrete.fidelity - 1.0).abs() < 1e-12);
        assert_eq!(discrete.report.phi_f, 0);
        assert!(discrete.report.is_trivial(Mode::Discrete));
        assert_eq!(discrete.report.restored_sign, Sign::Minus);
    }

    #[test]
    fn discrete_phase_flip() {
        let l = label("2:0:+");
        let out =
            run_protocol::<f64>(&l, &ErrorSpec::identity().rot(1, PI), Mode::Discrete, 5).unwrap();
        assert_eq!(out.report.phi_f, 1);
        assert!((out.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn discrete_rejects_dephased_input() {
        let l = label("2:0:+");
        let err = run_protocol::<f64>(&l, &ErrorSpec::identity().rot(1, 0.5), Mode::Discrete, 5);
        assert!(matches!(err, Err(Error::NotGbs(_))));
    }

    #[test]
    fn discrete_bit_flip_on_minus_state() {
        let l = label("3:1:-");
        let out =
            run_protocol::<f64>(&l, &ErrorSpec::identity().flip(1), Mode::Discrete, 1).unwrap();
        assert!((out.fidelity - 1.0).abs() < 1e-12);
        // {1} normalizes to {2, 3}
        assert_eq!(
            out.report.relative_flip_pattern,
            normalize_flip_mask(0b100, 3)
        );
        assert_eq!(out.report.relative_flip_pattern, 0b011);
    }

    #[test]
    fn reference_size_mismatch() {
        let mut s = build::<f64>(&label("3:0:+"));
        let reference = StoredReference::new(Signature {
            phi: 0,
            parity: vec![0],
        });
        assert!(matches!(
            correct_full(&mut s, &reference, Mode::Full, &mut rng()),
            Err(Error::NotGbs(_))
        ));
    }

    #[test]
    fn syndrome_helpers() {
        assert_eq!(flip_pattern_from_syndrome(&[1, 0, 1]), 0b0101);
        assert_eq!(normalize_flip_mask(0b1100, 4), 0b0011);
        assert_eq!(normalize_flip_mask(0b0110, 4), 0b0110);
    }

    #[test]
    fn report_json_round_trip() {
        let r = CorrectionReport {
            phi_f: 1,
            p_f: vec![1, 0],
            restored_sign: Sign::Minus,
            relative_flip_pattern: 0b010,
        };
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<CorrectionReport>(&text).unwrap(), r);
    }
}
