//! Generalized Bell states `(|x⟩ ± |x̄⟩)/√2`.
//!
//! A label is kept canonical: the most significant bit of `x` (qubit 1) is
//! zero, so `x < x̄` and the `2^n` labels of an `n`-qubit register are
//! `x ∈ [0, 2^{n-1})` times the two signs.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gate::QubitId;
use crate::scalar::{angle_distance, wrap_angle, Real};
use crate::statevector::{StateVector, MAX_QUBITS};

/// Relative sign between the `|x⟩` and `|x̄⟩` branches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    /// `0` for `+`, `1` for `−`; the phase bit a discrimination circuit reads.
    pub fn bit(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Self {
        if bit & 1 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn flipped(self) -> Self {
        Sign::from_bit(self.bit() ^ 1)
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// All-ones mask on `n` bits.
pub fn ones(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Bitwise complement of `x` on `n` bits.
pub fn complement(x: u64, n: usize) -> u64 {
    x ^ ones(n)
}

/// Value of qubit `q` (1-based, qubit 1 = MSB) in basis index `x`.
pub fn qubit_bit(x: u64, n: usize, q: QubitId) -> u8 {
    ((x >> (n - q)) & 1) as u8
}

/// Mask selecting qubit `q` in an `n`-qubit basis index.
pub fn qubit_mask(n: usize, q: QubitId) -> u64 {
    1u64 << (n - q)
}

/// Identifies one of the `2^n` generalized Bell states on `n` qubits.
///
/// Text form is `n:x:±`, e.g. `3:0:+` for the GHZ state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GbsLabel {
    n: usize,
    x: u64,
    sign: Sign,
}

impl GbsLabel {
    /// Canonical label; `x` must have its qubit-1 bit clear.
    pub fn new(n: usize, x: u64, sign: Sign) -> Result<Self> {
        if !(2..=MAX_QUBITS).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "GBS needs 2..={MAX_QUBITS} qubits, got {n}"
            )));
        }
        if x >= 1u64 << (n - 1) {
            return Err(Error::LabelOutOfRange {
                label: x,
                num_qubits: n,
            });
        }
        Ok(Self { n, x, sign })
    }

    /// Label of `(|y⟩ ± |ȳ⟩)/√2` for any `y < 2^n`, folding `y` onto its
    /// canonical representative. The sign is unchanged by the fold:
    /// `|ȳ⟩ ± |y⟩ = ±(|y⟩ ± |ȳ⟩)`.
    pub fn from_support(n: usize, y: u64, sign: Sign) -> Result<Self> {
        if !(2..=MAX_QUBITS).contains(&n) {
            return Self::new(n, y, sign);
        }
        if y >= 1u64 << n {
            return Err(Error::LabelOutOfRange {
                label: y,
                num_qubits: n,
            });
        }
        Self::new(n, y.min(complement(y, n)), sign)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn x_bar(&self) -> u64 {
        complement(self.x, self.n)
    }

    /// Bit of qubit `q` in `x`.
    pub fn bit(&self, q: QubitId) -> u8 {
        qubit_bit(self.x, self.n, q)
    }

    pub fn with_sign(self, sign: Sign) -> Self {
        Self { sign, ..self }
    }
}

impl fmt::Display for GbsLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.n, self.x, self.sign.as_char())
    }
}

impl FromStr for GbsLabel {
    type Err = Error;

    /// Parses `n:x:+` / `n:x:-`. A non-canonical `x` (qubit 1 set) is folded
    /// onto its complement.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidArgument(format!(
                "malformed GBS label `{s}` (expected n:x:+ or n:x:-)"
            ))
        };
        let mut parts = s.trim().split(':');
        let (Some(n), Some(x), Some(sign), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        let x: u64 = x.trim().parse().map_err(|_| bad())?;
        let sign = match sign.trim() {
            "+" => Sign::Plus,
            "-" => Sign::Minus,
            _ => return Err(bad()),
        };
        Self::from_support(n, x, sign)
    }
}

impl Serialize for GbsLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GbsLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// How closely a recognised state matches an exact GBS.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GbsKind {
    ExactPlus,
    ExactMinus,
    Dephased,
}

/// Result of recognising `e^{iγ} (|x⟩ + e^{iθ}|x̄⟩)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbsClassification<T> {
    /// Canonical support; the sign is the nearer of `+`/`−` to `θ` for dephased states.
    pub label: GbsLabel,
    /// Phase of the `|x̄⟩` amplitude relative to `|x⟩`, in `(−π, π]`.
    pub residual_phase: T,
    /// Phase of the `|x⟩` amplitude.
    pub global_phase: T,
    pub kind: GbsKind,
}

impl<T: Real> GbsClassification<T> {
    pub fn is_exact(&self) -> bool {
        self.kind != GbsKind::Dephased
    }
}

/// `(|x⟩ ± |x̄⟩)/√2` for `label`.
pub fn build<T: Real>(label: &GbsLabel) -> StateVector<T> {
    let mut amps = vec![Complex::zero(); 1usize << label.n];
    let r = T::FRAC_1_SQRT_2();
    amps[label.x as usize] = Complex::new(r, T::zero());
    amps[label.x_bar() as usize] = match label.sign {
        Sign::Plus => Complex::new(r, T::zero()),
        Sign::Minus => Complex::new(-r, T::zero()),
    };
    StateVector::from_amplitudes(amps).expect("GBS amplitudes are normalized")
}

/// Recognises a (possibly dephased) GBS.
///
/// Succeeds iff exactly two amplitudes exceed `tol` in magnitude, they sit at
/// complementary indices, and both have magnitude `1/√2` within `tol`.
pub fn classify<T: Real>(state: &StateVector<T>, tol: T) -> Result<GbsClassification<T>> {
    let n = state.num_qubits();
    if n < 2 {
        return Err(Error::NotGbs(format!("{n}-qubit register")));
    }
    let mut support = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > tol)
        .map(|(i, _)| i as u64);
    let (Some(a), Some(b), None) = (support.next(), support.next(), support.next()) else {
        return Err(Error::NotGbs(
            "support is not exactly two basis states".into(),
        ));
    };
    if b != complement(a, n) {
        return Err(Error::NotGbs(format!(
            "support {{{a}, {b}}} is not a complementary pair"
        )));
    }
    let (amp_x, amp_bar) = (state.amplitude(a as usize), state.amplitude(b as usize));
    let r = T::FRAC_1_SQRT_2();
    if (amp_x.norm() - r).abs() > tol || (amp_bar.norm() - r).abs() > tol {
        return Err(Error::NotGbs("branch magnitudes differ from 1/√2".into()));
    }
    let global_phase = amp_x.arg();
    let residual_phase = wrap_angle(amp_bar.arg() - global_phase);
    let kind = if residual_phase.abs() < tol {
        GbsKind::ExactPlus
    } else if angle_distance(residual_phase, T::PI()) < tol {
        GbsKind::ExactMinus
    } else {
        GbsKind::Dephased
    };
    let sign = if residual_phase.abs() <= T::FRAC_PI_2() {
        Sign::Plus
    } else {
        Sign::Minus
    };
    Ok(GbsClassification {
        label: GbsLabel::new(n, a, sign)?,
        residual_phase,
        global_phase,
        kind,
    })
}

/// All `2^n` canonical labels, ordered by `x` then sign.
pub fn enumerate(n: usize) -> Result<Vec<GbsLabel>> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "GBS needs 2..={MAX_QUBITS} qubits, got {n}"
        )));
    }
    Ok((0..1u64 << (n - 1))
        .flat_map(|x| [Sign::Plus, Sign::Minus].map(|s| GbsLabel { n, x, sign: s }))
        .collect())
}

/// Whether two labels denote the same physical state.
pub fn same_state(a: &GbsLabel, b: &GbsLabel) -> bool {
    a == b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::Gate;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn label(n: usize, x: u64, sign: Sign) -> GbsLabel {
        GbsLabel::new(n, x, sign).unwrap()
    }

    #[test]
    fn build_examples() {
        let r = FRAC_1_SQRT_2;
        let s = build::<f64>(&label(2, 0, Sign::Plus));
        assert_eq!(s.amplitude(0).re, r);
        assert_eq!(s.amplitude(3).re, r);
        let s = build::<f64>(&label(2, 1, Sign::Minus));
        assert_eq!(s.amplitude(1).re, r);
        assert_eq!(s.amplitude(2).re, -r);
        let ghz = build::<f64>(&label(3, 0, Sign::Plus));
        assert_eq!(ghz.amplitude(0).re, r);
        assert_eq!(ghz.amplitude(7).re, r);
        assert_eq!(
            ghz.amplitudes().iter().filter(|a| a.norm() > 0.0).count(),
            2
        );
    }

    #[test]
    fn label_invariants() {
        assert!(GbsLabel::new(2, 2, Sign::Plus).is_err());
        assert!(GbsLabel::new(1, 0, Sign::Plus).is_err());
        let l = GbsLabel::from_support(3, 0b101, Sign::Minus).unwrap();
        assert_eq!((l.x(), l.x_bar(), l.sign()), (0b010, 0b101, Sign::Minus));
        assert_eq!(complement(0b010, 3), 0b101);
        assert!(GbsLabel::from_support(2, 4, Sign::Plus).is_err());
    }

    #[test]
    fn label_text_form() {
        let l: GbsLabel = "3:0:+".parse().unwrap();
        assert_eq!(l, label(3, 0, Sign::Plus));
        assert_eq!(l.to_string(), "3:0:+");
        let folded: GbsLabel = "2:2:-".parse().unwrap();
        assert_eq!(folded, label(2, 1, Sign::Minus));
        for bad in ["3:0", "3:0:*", "x:0:+", "2:9:+", "3:0:+:1", "1:0:+"] {
            assert!(bad.parse::<GbsLabel>().is_err(), "{bad}");
        }
        assert_eq!(serde_json::to_string(&l).unwrap(), "\"3:0:+\"");
    }

    #[test]
    fn classify_examples() {
        let c = classify(&build::<f64>(&label(2, 1, Sign::Plus)), 1e-9).unwrap();
        assert_eq!(c.label, label(2, 1, Sign::Plus));
        assert_eq!(c.kind, GbsKind::ExactPlus);
        assert!(c.residual_phase.abs() < 1e-12);

        // (|00⟩ + e^{iπ/3}|11⟩)/√2 by explicit amplitude assignment
        let r = FRAC_1_SQRT_2;
        let z = Complex::zero();
        let s = StateVector::from_amplitudes(vec![
            Complex::new(r, 0.0),
            z,
            z,
            Complex::from_polar(r, PI / 3.0),
        ])
        .unwrap();
        let c = classify(&s, 1e-9).unwrap();
        assert_eq!(c.label.x(), 0);
        assert_eq!(c.kind, GbsKind::Dephased);
        assert!((c.residual_phase - PI / 3.0).abs() < 1e-12);

        let s =
            StateVector::from_amplitudes(vec![Complex::new(r, 0.0), Complex::new(r, 0.0), z, z])
                .unwrap();
        assert!(matches!(classify(&s, 1e-9), Err(Error::NotGbs(_))));
    }

    #[test]
    fn classify_rejects_unequal_weights_and_wide_support() {
        let z = Complex::zero();
        let s = StateVector::from_amplitudes(vec![
            Complex::new(0.6, 0.0),
            z,
            z,
            Complex::new(0.8, 0.0),
        ])
        .unwrap();
        assert!(classify(&s, 1e-9).is_err());
        let s = StateVector::<f64>::new(2)
            .unwrap()
            .apply_gate(&Gate::h(1))
            .unwrap()
            .apply_gate(&Gate::h(2))
            .unwrap();
        assert!(classify(&s, 1e-9).is_err());
        assert!(classify(&StateVector::<f64>::new(2).unwrap(), 1e-9).is_err());
    }

    #[test]
    fn minus_state_reports_pi_not_minus_pi() {
        let c = classify(&build::<f64>(&label(4, 3, Sign::Minus)), 1e-9).unwrap();
        assert_eq!(c.kind, GbsKind::ExactMinus);
        assert_eq!(c.residual_phase, PI);
    }

    #[test]
    fn enumerate_counts() {
        let two = enumerate(2).unwrap();
        assert_eq!(
            two,
            vec![
                label(2, 0, Sign::Plus),
                label(2, 0, Sign::Minus),
                label(2, 1, Sign::Plus),
                label(2, 1, Sign::Minus)
            ]
        );
        assert_eq!(enumerate(3).unwrap().len(), 8);
        assert!(enumerate(1).is_err());
    }

    #[test]
    fn same_state_examples() {
        let a = label(2, 0, Sign::Plus);
        assert!(same_state(&a, &a));
        assert!(!same_state(&a, &a.with_sign(Sign::Minus)));
        let m = build::<f64>(&label(2, 1, Sign::Minus));
        let mut neg = m.clone();
        neg.scale(Complex::new(-1.0, 0.0));
        let (ca, cb) = (classify(&m, 1e-9).unwrap(), classify(&neg, 1e-9).unwrap());
        assert!(same_state(&ca.label, &cb.label));
        assert!((m.fidelity(&neg).unwrap() - 1.0).abs() < 1e-12);
        assert!((cb.global_phase.abs() - PI).abs() < 1e-12);
    }
}
