use thiserror::Error;

/// Failures reported by the simulator and the protocol.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("basis label {label} out of range for {num_qubits} qubits")]
    LabelOutOfRange { label: u64, num_qubits: usize },

    #[error("register size {0} not supported (expected 1..={max})", max = crate::statevector::MAX_QUBITS)]
    UnsupportedSize(usize),

    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("control and target coincide on qubit {0}")]
    SameQubit(usize),

    /// The qubit could not be factored out of the register; a protocol violation.
    #[error("qubit {qubit} is entangled with the rest of the register (purity {purity:.3e})")]
    EntangledDetach { qubit: usize, purity: f64 },

    #[error("state is not a generalized Bell state: {0}")]
    NotGbs(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
