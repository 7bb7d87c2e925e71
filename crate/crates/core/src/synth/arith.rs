//! Reversible accumulator arithmetic and the threshold phase shift.
//!
//! These are the pieces of the exact oracle: a ripple increment on a little
//! counter register, the per-edge sub-oracle that bumps the counter when an
//! edge is cut, and the diagonal that flips the sign of every counter value
//! at or above a threshold.

use crate::circuit::{Circuit, Gate};
use crate::synth::toffoli::mcx;
use crate::synth::{distinct, span, Block};
use crate::{Error, Result};

fn all_of(groups: &[&[usize]]) -> Vec<usize> {
    groups.iter().flat_map(|g| g.iter().copied()).collect()
}

/// |x> -> |x+1 mod 2^m> on `register` (bit 0 least significant).
///
/// Ripple form: the top bit flips when all lower bits are set, and so on
/// down, ending with a plain X on bit 0. Registers of m bits need
/// `max(m-3, 0)` work qubits for the widest [`mcx`].
pub fn increment(register: &[usize], work: &[usize]) -> Result<Block> {
    increment_impl(None, register, work)
}

/// [`increment`] applied only when `flag` is set.
pub fn controlled_increment(flag: usize, register: &[usize], work: &[usize]) -> Result<Block> {
    increment_impl(Some(flag), register, work)
}

fn increment_impl(flag: Option<usize>, register: &[usize], work: &[usize]) -> Result<Block> {
    if register.is_empty() {
        return Err(Error::arg("increment needs a nonempty register"));
    }
    let mut operands = all_of(&[register, work]);
    if let Some(f) = flag {
        operands.push(f);
    }
    distinct(&operands, "increment")?;
    let m = register.len();
    let widest = m - 1 + flag.map_or(0, |_| 1);
    if work.len() < widest.saturating_sub(2) {
        return Err(Error::arg(format!(
            "increment over {m} bits needs {} work qubits, got {}",
            widest.saturating_sub(2),
            work.len()
        )));
    }
    let mut c = Circuit::new(span(&operands));
    for k in (1..m).rev() {
        let mut controls: Vec<usize> = Vec::with_capacity(k + 1);
        controls.extend(flag);
        controls.extend_from_slice(&register[..k]);
        c.extend(mcx(&controls, register[k], work)?.circuit.gates);
    }
    match flag {
        Some(f) => c.push(Gate::Cx { c: f, t: register[0] }),
        None => c.push(Gate::x(register[0])),
    }
    let name = match flag {
        Some(_) => format!("controlled-increment({m})"),
        None => format!("increment({m})"),
    };
    Ok(Block::new(c, name))
}

/// One edge of the cut counter: adds 1 to `acc` exactly when qubits `a` and
/// `b` disagree. The flag computes a XOR b, drives a controlled increment,
/// and is uncomputed, so the block is its own inverse on the flag wire and
/// exact everywhere.
pub fn cut_suboracle(
    a: usize,
    b: usize,
    flag: usize,
    acc: &[usize],
    work: &[usize],
) -> Result<Block> {
    let operands = all_of(&[&[a, b, flag], acc, work]);
    distinct(&operands, "cut_suboracle")?;
    let mut c = Circuit::new(span(&operands));
    c.push(Gate::Cx { c: a, t: flag });
    c.push(Gate::Cx { c: b, t: flag });
    c.extend(controlled_increment(flag, acc, work)?.circuit.gates);
    c.push(Gate::Cx { c: b, t: flag });
    c.push(Gate::Cx { c: a, t: flag });
    Ok(Block::new(c, "cut-suboracle"))
}

/// Diagonal sign flip on every `register` value `s >= t`.
///
/// The interval `[t, 2^m)` is split into its canonical dyadic subcubes (at
/// most m of them); each subcube becomes a multi-controlled Z with open
/// controls realized by X conjugation. `t = 0` flips everything, which is a
/// global -1 spelled as two ZX pairs on the low bit.
pub fn pshift(t: u64, register: &[usize], work: &[usize]) -> Result<Block> {
    let operands = all_of(&[register, work]);
    distinct(&operands, "pshift")?;
    let m = register.len();
    if m == 0 || m > 63 {
        return Err(Error::arg("pshift register must hold 1..=63 bits"));
    }
    if t >= 1u64 << m {
        return Err(Error::arg(format!(
            "pshift threshold {t} out of range for {m} bits"
        )));
    }
    let mut c = Circuit::new(span(&operands));
    if t == 0 {
        let q = register[0];
        c.push(Gate::z(q));
        c.push(Gate::x(q));
        c.push(Gate::z(q));
        c.push(Gate::x(q));
        return Ok(Block::new(c, "pshift(0)"));
    }

    // Walk the dyadic cover of [t, 2^m): the cube anchored at `cur` spans
    // 2^(trailing zeros of cur) values and fixes every bit above that.
    let mut cur = t;
    while cur < 1u64 << m {
        let z = cur.trailing_zeros() as usize;
        let fixed: Vec<(usize, bool)> = (z..m)
            .map(|i| (register[i], cur >> i & 1 == 1))
            .collect();
        let max_controls = fixed.len() - 1;
        if work.len() < max_controls.saturating_sub(2) {
            return Err(Error::arg(format!(
                "pshift({t}) over {m} bits needs {} work qubits, got {}",
                max_controls.saturating_sub(2),
                work.len()
            )));
        }
        for &(q, v) in &fixed {
            if !v {
                c.push(Gate::x(q));
            }
        }
        let (&(target, _), controls) = fixed.split_last().expect("nonempty cube");
        if controls.is_empty() {
            c.push(Gate::z(target));
        } else {
            let control_qubits: Vec<usize> = controls.iter().map(|&(q, _)| q).collect();
            c.push(Gate::h(target));
            c.extend(mcx(&control_qubits, target, work)?.circuit.gates);
            c.push(Gate::h(target));
        }
        for &(q, v) in &fixed {
            if !v {
                c.push(Gate::x(q));
            }
        }
        cur += 1u64 << z;
    }
    Ok(Block::new(c, format!("pshift({t})")))
}
