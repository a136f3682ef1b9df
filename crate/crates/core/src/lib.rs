//! Statevector simulation of non-destructive discrimination and automated
//! error correction for generalized Bell states (GBS),
//! `(|x⟩ ± |x̄⟩)/√2` on `n` qubits.
//!
//! * [`statevector`]: dense register and gate kernel (qubit 1 is the MSB).
//! * [`gbs`]: labels, construction and recognition of GBS.
//! * [`discriminate`]: ancilla phase and parity checks, the part-1 signature.
//! * [`errors`]: bit flips, phase rotations, and a closed-form effect oracle.
//! * [`correct`]: the three-step correction pipeline and end-to-end runs.
//! * [`trace`]: JSON gate-list export of the circuits.
//!
//! Everything numeric is generic over [`Real`] (`f32`/`f64`); the `*64`
//! aliases below fix the scalar to `f64`.
//!
//! ```
//! use gbs_qec::{run_protocol, ErrorSpec64, GbsLabel, Mode};
//!
//! let ghz: GbsLabel = "3:0:+".parse().unwrap();
//! let error = ErrorSpec64::identity().flip(2).rot(3, 1.0);
//! let out = run_protocol(&ghz, &error, Mode::Full, 7).unwrap();
//! assert!((out.fidelity - 1.0).abs() < 1e-10);
//! ```

pub mod correct;
pub mod discriminate;
pub mod error;
pub mod errors;
pub mod gate;
pub mod gbs;
pub mod scalar;
pub mod statevector;
pub mod trace;

pub use correct::{
    correct_full, correct_with, run_protocol, step1_strip_phase, step2_fix_phase, step3_fix_bits,
    step3_fix_bits_batch, CorrectionOptions, CorrectionReport, Mode, ParityStrategy,
    ProtocolOutcome, Step1Result, StoredReference,
};
pub use discriminate::{
    discriminate, parity_circuit, phase_circuit, signature_of, Discrimination, Readout, Signature,
};
pub use error::{Error, Result};
pub use errors::{
    apply_error, predict_effect, random_error, ElementaryError, ErrorSpec, PhaseModes, Prediction,
    RandomErrorConfig,
};
pub use gate::{Gate, QubitId};
pub use gbs::{build, classify, enumerate, same_state, GbsClassification, GbsKind, GbsLabel, Sign};
pub use scalar::Real;
pub use statevector::{basis_state, fidelity, Measurement, StateVector};

pub type StateVector64 = StateVector<f64>;
pub type StateVector32 = StateVector<f32>;
pub type Gate64 = Gate<f64>;
pub type ErrorSpec64 = ErrorSpec<f64>;
pub type ElementaryError64 = ElementaryError<f64>;
pub type GbsClassification64 = GbsClassification<f64>;
pub type Prediction64 = Prediction<f64>;
pub type Step1Result64 = Step1Result<f64>;
pub type ProtocolOutcome64 = ProtocolOutcome<f64>;
pub type Complex64 = num_complex::Complex<f64>;
