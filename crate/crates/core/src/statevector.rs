//! Dense statevector register.
//!
//! Bit convention: in a register of `n` qubits, qubit `j` (1-based) is bit
//! `n - j` of the basis index. Qubit 1 is therefore the most significant bit
//! and the integer `x` of a ket `|x⟩` is its amplitude index. Ancillas are
//! appended as the highest qubit id, i.e. the new least significant bit.

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::gate::{Gate, QubitId};
use crate::scalar::Real;

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 30;

/// Outcome of a single-qubit projective measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurement<T> {
    pub bit: u8,
    /// Born probability of the outcome that was obtained.
    pub probability: T,
}

/// A normalized complex amplitude vector over `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    num_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::basis_state(num_qubits, 0)
    }

    pub fn basis_state(num_qubits: usize, label: u64) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::UnsupportedSize(num_qubits));
        }
        let dim = 1usize << num_qubits;
        if label >= dim as u64 {
            return Err(Error::LabelOutOfRange { label, num_qubits });
        }
        let mut amps = vec![Complex::zero(); dim];
        amps[label as usize] = Complex::one();
        Ok(Self { num_qubits, amps })
    }

    /// Builds a state from raw amplitudes, normalizing them.
    ///
    /// The length must be a power of two; an all-zero vector is rejected.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::UnsupportedSize(num_qubits));
        }
        let mut state = Self { num_qubits, amps };
        let norm = state.norm();
        if norm == T::zero() || !norm.is_finite() {
            return Err(Error::InvalidArgument("amplitudes have zero norm".into()));
        }
        state.scale(Complex::new(norm.recip(), T::zero()));
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amps[index]
    }

    pub fn norm(&self) -> T {
        self.amps
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
            .sqrt()
    }

    /// Multiplies every amplitude by `factor`. Callers keep the norm at one.
    pub fn scale(&mut self, factor: Complex<T>) {
        for a in &mut self.amps {
            *a = *a * factor;
        }
    }

    #[inline]
    fn bit_of(&self, q: QubitId) -> usize {
        1usize << (self.num_qubits - q)
    }

    pub fn check_qubit(&self, q: QubitId) -> Result<()> {
        if q == 0 || q > self.num_qubits {
            Err(Error::QubitOutOfRange {
                qubit: q,
                num_qubits: self.num_qubits,
            })
        } else {
            Ok(())
        }
    }

    /// Applies one gate in place.
    pub fn apply(&mut self, gate: &Gate<T>) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match *gate {
            Gate::H { q } => {
                let s = T::FRAC_1_SQRT_2();
                let m = self.bit_of(q);
                for i in (0..self.dim()).filter(|i| i & m == 0) {
                    let (a0, a1) = (self.amps[i], self.amps[i | m]);
                    self.amps[i] = (a0 + a1).scale(s);
                    self.amps[i | m] = (a0 - a1).scale(s);
                }
            }
            Gate::X { q } => {
                let m = self.bit_of(q);
                for i in (0..self.dim()).filter(|i| i & m == 0) {
                    self.amps.swap(i, i | m);
                }
            }
            Gate::Z { q } => {
                let m = self.bit_of(q);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::Phase { q, angle } => {
                let m = self.bit_of(q);
                let w = Complex::from_polar(T::one(), angle);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a = *a * w;
                    }
                }
            }
            Gate::Cnot { c, t } => {
                let (mc, mt) = (self.bit_of(c), self.bit_of(t));
                for i in (0..self.dim()).filter(|i| i & mc != 0 && i & mt == 0) {
                    self.amps.swap(i, i | mt);
                }
            }
            Gate::Cz { c, t } => {
                let mask = self.bit_of(c) | self.bit_of(t);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies gates in order.
    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate<T>>) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Consuming form of [`StateVector::apply`].
    pub fn apply_gate(mut self, gate: &Gate<T>) -> Result<Self> {
        self.apply(gate)?;
        Ok(self)
    }

    /// Appends a qubit prepared in `|bit⟩` as the new highest id and returns that id.
    pub fn attach_ancilla(&mut self, bit: u8) -> Result<QubitId> {
        if self.num_qubits + 1 > MAX_QUBITS {
            return Err(Error::UnsupportedSize(self.num_qubits + 1));
        }
        let offset = usize::from(bit & 1);
        let mut amps = vec![Complex::zero(); self.dim() * 2];
        for (i, a) in self.amps.iter().enumerate() {
            amps[2 * i + offset] = *a;
        }
        self.amps = amps;
        self.num_qubits += 1;
        Ok(self.num_qubits)
    }

    /// Reduced 2×2 density matrix of qubit `q`, `rho[r][c] = Σ a_r conj(a_c)`.
    pub fn reduced_density_matrix(&self, q: QubitId) -> Result<[[Complex<T>; 2]; 2]> {
        self.check_qubit(q)?;
        let m = self.bit_of(q);
        let mut rho = [[Complex::zero(); 2]; 2];
        for i in (0..self.dim()).filter(|i| i & m == 0) {
            let (a0, a1) = (self.amps[i], self.amps[i | m]);
            rho[0][0] = rho[0][0] + a0 * a0.conj();
            rho[0][1] = rho[0][1] + a0 * a1.conj();
            rho[1][0] = rho[1][0] + a1 * a0.conj();
            rho[1][1] = rho[1][1] + a1 * a1.conj();
        }
        Ok(rho)
    }

    /// `tr(ρ_q²)`; one iff qubit `q` is unentangled with the rest.
    pub fn purity(&self, q: QubitId) -> Result<T> {
        let rho = self.reduced_density_matrix(q)?;
        let two = T::one() + T::one();
        Ok(rho[0][0].re * rho[0][0].re + rho[1][1].re * rho[1][1].re + two * rho[0][1].norm_sqr())
    }

    /// Removes qubit `q` from a product state, returning its normalized
    /// `[amp0, amp1]` (defined up to global phase).
    ///
    /// Fails with [`Error::EntangledDetach`] when the purity of the qubit's
    /// reduced state is below `1 - tol`.
    pub fn detach_qubit(&mut self, q: QubitId, tol: T) -> Result<[Complex<T>; 2]> {
        if self.num_qubits < 2 {
            return Err(Error::UnsupportedSize(self.num_qubits - 1));
        }
        let rho = self.reduced_density_matrix(q)?;
        let purity = self.purity(q)?;
        if purity < T::one() - tol {
            return Err(Error::EntangledDetach {
                qubit: q,
                purity: purity.to_f64_lossy(),
            });
        }
        // Column of the larger diagonal entry spans the (pure) qubit state.
        let k = if rho[0][0].re >= rho[1][1].re { 0 } else { 1 };
        let s = rho[k][k].re.sqrt();
        let mut qubit = [rho[0][k].unscale(s), rho[1][k].unscale(s)];
        let qn = (qubit[0].norm_sqr() + qubit[1].norm_sqr()).sqrt();
        qubit = [qubit[0].unscale(qn), qubit[1].unscale(qn)];

        // Remainder is ⟨qubit|ψ⟩ contracted on q.
        let m = self.bit_of(q);
        let low = m - 1;
        let mut rest = Vec::with_capacity(self.dim() / 2);
        for r in 0..self.dim() / 2 {
            let i0 = ((r & !low) << 1) | (r & low);
            let a = qubit[0].conj() * self.amps[i0] + qubit[1].conj() * self.amps[i0 | m];
            rest.push(a);
        }
        let rn = rest
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
            .sqrt();
        for a in &mut rest {
            *a = a.unscale(rn);
        }
        self.amps = rest;
        self.num_qubits -= 1;
        Ok(qubit)
    }

    /// Probability of reading `1` on qubit `q`.
    pub fn prob_one(&self, q: QubitId) -> Result<T> {
        self.check_qubit(q)?;
        let m = self.bit_of(q);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m != 0)
            .fold(T::zero(), |acc, (_, a)| acc + a.norm_sqr()))
    }

    /// Born-rule measurement of qubit `q` in the computational basis; the state
    /// is projected and renormalized.
    ///
    /// An outcome with probability one (within the unitarity tolerance) is
    /// returned without consuming randomness, so it does not depend on the rng.
    pub fn measure_qubit<R: Rng + ?Sized>(
        &mut self,
        q: QubitId,
        rng: &mut R,
    ) -> Result<Measurement<T>> {
        let p1 = self.prob_one(q)?.min(T::one());
        let tol = T::UNITARITY_TOL;
        let bit = if p1 >= T::one() - tol {
            1
        } else if p1 <= tol {
            0
        } else {
            let u: f64 = rng.gen();
            u8::from(u < p1.to_f64_lossy())
        };
        let probability = if bit == 1 { p1 } else { T::one() - p1 };
        let m = self.bit_of(q);
        let keep = if bit == 1 { m } else { 0 };
        let inv = probability.sqrt().recip();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m == keep {
                *a = a.scale(inv);
            } else {
                *a = Complex::zero();
            }
        }
        Ok(Measurement { bit, probability })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b))
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm().min(T::one()))
    }
}

/// Free-function form of [`StateVector::basis_state`].
pub fn basis_state<T: Real>(num_qubits: usize, label: u64) -> Result<StateVector<T>> {
    StateVector::basis_state(num_qubits, label)
}

/// Free-function form of [`StateVector::fidelity`].
pub fn fidelity<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    a.fidelity(b)
}
