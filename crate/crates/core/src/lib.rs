//! Grover-style MAX-CUT search for near-term quantum hardware.
//!
//! The crate builds the full pipeline around two flavors of cut oracle:
//!
//! * an exact accumulator oracle that counts cut edges into a small binary
//!   register and flips the sign of every coloring whose cut meets a
//!   threshold, driving a classical binary search for the maximum cut, and
//! * a subdivided phase oracle that rotates each basis state by `e^{i k θ}`
//!   (`k` = cut size), trading oracle exactness for a circuit that fits
//!   near-term two-qubit budgets.
//!
//! Everything downstream of the oracles is here as well: a dense statevector
//! simulator with a stochastic Pauli trajectory noise model, hardware-shaped
//! gate synthesis over the {U1, U2, U3, CX} set, closed-form amplitude
//! analytics, and measurement-error mitigation.
//!
//! Qubit index 0 is the least significant bit of a basis-state index, and
//! printed bitstrings list qubit 0 leftmost. All gates are applied in program
//! order (a `Circuit`'s unitary is the ordered product of its gates acting on
//! column vectors).

pub mod circuit;
pub mod graph;
pub mod grover;
pub mod mitigation;
pub mod presets;
pub mod qasm;
pub mod sim;
pub mod synth;
pub mod topology;

pub use circuit::{Circuit, Gate, Metrics, QubitRole};
pub use graph::{Coloring, Graph};
pub use sim::{Counts, Distribution, NoiseModel, StateVector};

/// Error taxonomy shared by the whole crate.
///
/// The CLI maps `InvalidArgument`/`ResourceLimit` to exit code 2 and
/// `InvalidCircuit`/`SynthesisFailure` to exit code 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("synthesis failure: {0}")]
    SynthesisFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
