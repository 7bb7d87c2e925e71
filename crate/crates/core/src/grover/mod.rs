//! The two MAX-CUT solvers.
//!
//! The exact pipeline counts cut edges into an accumulator, flips the sign
//! of every coloring at or above a threshold, and finds the maximum cut by
//! binary search on that threshold. The subdivided pipeline skips the
//! counter: each edge contributes a phase of theta directly, so a coloring
//! with k cut edges picks up e^{i k theta}, and one oracle + diffusion
//! round amplifies the extremes. A virtual vertex pins one color, halving
//! the register and turning every edge at that vertex into a plain U1.

mod analytics;
mod build;
mod exact;
mod oracle;
mod search;

pub use analytics::{
    alpha_avg, amplitude_factor, one_round_state_probability, optimize_theta,
    success_probability, theta_sweep, OracleKind, ThetaPlan,
};
pub use build::{build_full_circuit, SolverCircuit};
pub use exact::{
    build_exact_circuit, build_exact_oracle, exact_grover_once, grover_iterations,
    planned_iterations, ExactLayout,
};
pub use oracle::{build_phase_oracle, reduced_coloring, OracleFlavor, PhaseOracle};
pub use search::{
    threshold_binary_search, ColoringSampler, IdealSampler, NoisySampler, SearchOutcome,
    SearchRound,
};
