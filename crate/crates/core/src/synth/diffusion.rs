//! The inversion-about-the-mean operator.
//!
//! `D = H^n (2|0..0><0..0| - I) H^n` up to global phase. The projector core
//! is a multi-controlled Z with open controls; instead of X-conjugating the
//! H sandwich we fold each HX/XH pair into ZH/HZ, which costs U1+U2 per
//! qubit rather than U3+U2. The circuit therefore implements -D and the
//! block records the pi of global phase.

use crate::circuit::{Circuit, Gate, RtofVariant};
use crate::synth::toffoli::{cnx, mcx, toffoli_swap};
use crate::synth::Block;
use crate::{Error, Result};

/// How the multi-controlled-Z core is lowered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffusionMode {
    /// Linear-connectivity form: [`toffoli_swap`] for three data qubits,
    /// [`cnx`] above that. Cheapest in CX but ends with a wire swap, which
    /// the block reports for decoding.
    Swap(RtofVariant),
    /// Plain [`mcx`] core: no permutation, at the price of more CX. Used
    /// where a clean unitary matters more than the gate budget.
    Exact,
}

/// Builds the diffusion operator over data qubits `0..n_data`.
///
/// Work qubits, when the core needs them, sit at `n_data..` and must be
/// |0>; they are returned to |0>. The returned block carries
/// `global_phase = pi` and, in swap mode with three or more data qubits,
/// the built-in transposition of the two highest data wires.
pub fn diffusion(n_data: usize, mode: DiffusionMode) -> Result<Block> {
    if n_data < 2 {
        return Err(Error::arg("diffusion needs at least two data qubits"));
    }
    let ancillas: Vec<usize> = match mode {
        DiffusionMode::Swap(_) if n_data >= 4 => (n_data..2 * n_data - 3).collect(),
        DiffusionMode::Exact if n_data >= 4 => (n_data..2 * n_data - 3).collect(),
        _ => Vec::new(),
    };
    let width = n_data + ancillas.len();
    let mut c = Circuit::new(width);
    for q in 0..n_data {
        c.push(Gate::z(q));
        c.push(Gate::h(q));
    }
    let mut permutation = None;
    match (mode, n_data) {
        (_, 2) => {
            c.push(Gate::h(1));
            c.push(Gate::Cx { c: 0, t: 1 });
            c.push(Gate::h(1));
        }
        (DiffusionMode::Swap(_), 3) => {
            c.push(Gate::h(2));
            c.extend(toffoli_swap(0, 1, 2)?.circuit.gates);
            c.push(Gate::h(1));
            permutation = Some((1, 2));
        }
        (DiffusionMode::Swap(variant), n) => {
            let data: Vec<usize> = (0..n).collect();
            c.push(Gate::h(n - 1));
            c.extend(cnx(&data, &ancillas, variant)?.circuit.gates);
            c.push(Gate::h(n - 2));
            permutation = Some((n - 2, n - 1));
        }
        (DiffusionMode::Exact, n) => {
            let controls: Vec<usize> = (0..n - 1).collect();
            c.push(Gate::h(n - 1));
            c.extend(mcx(&controls, n - 1, &ancillas)?.circuit.gates);
            c.push(Gate::h(n - 1));
        }
    }
    for q in 0..n_data {
        c.push(Gate::h(q));
        c.push(Gate::z(q));
    }
    let block = Block::new(c, format!("diffusion({n_data})")).phase(std::f64::consts::PI);
    Ok(match permutation {
        Some((a, b)) => block.swapping(a, b),
        None => block,
    })
}
