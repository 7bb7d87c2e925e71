//! Gate synthesis over the hardware basis.
//!
//! Every builder returns a [`Block`]: a lowered circuit plus its declared
//! semantic, CX count, and two bookkeeping fields that downstream code must
//! respect. `global_phase` records the scalar the circuit carries relative
//! to the declared unitary, and `permutation` records a trailing wire swap
//! for the constructions that buy a CX by relabeling instead of routing.
//! Formally, `circuit = e^{i·global_phase} · SWAP(permutation) · semantic`.

pub mod approx;
pub mod arith;
pub mod diffusion;
pub mod toffoli;

use crate::circuit::{Circuit, Gate, MacroKind};
use crate::{Error, Result};

/// A synthesized gate sequence with its contract.
#[derive(Debug, Clone)]
pub struct Block {
    pub circuit: Circuit,
    /// What the block implements, in words.
    pub semantic: String,
    pub cx_count: usize,
    /// True when the block matches its semantic only up to relative phases
    /// on some basis states (the magnitudes always match).
    pub relative_phase: bool,
    /// Angle φ with `circuit = e^{iφ} · SWAP · semantic`; 0 when exact.
    pub global_phase: f64,
    /// A trailing wire transposition, if the construction ends with one.
    pub permutation: Option<(usize, usize)>,
}

impl Block {
    pub(crate) fn new(circuit: Circuit, semantic: impl Into<String>) -> Block {
        let cx_count = circuit.cx_count();
        Block {
            circuit,
            semantic: semantic.into(),
            cx_count,
            relative_phase: false,
            global_phase: 0.0,
            permutation: None,
        }
    }

    pub(crate) fn relative(mut self) -> Block {
        self.relative_phase = true;
        self
    }

    pub(crate) fn phase(mut self, phi: f64) -> Block {
        self.global_phase = phi;
        self
    }

    pub(crate) fn swapping(mut self, a: usize, b: usize) -> Block {
        self.permutation = Some((a, b));
        self
    }
}

pub(crate) fn span(qubits: &[usize]) -> usize {
    qubits.iter().copied().max().map_or(0, |m| m + 1)
}

pub(crate) fn distinct(qubits: &[usize], what: &str) -> Result<()> {
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != qubits.len() {
        return Err(Error::arg(format!("{what} operands must be distinct")));
    }
    Ok(())
}

/// Controlled phase `diag(1, 1, 1, e^{iθ})` from two CX.
///
/// The sequence is the symmetric-convention controlled Rz core
/// (`CX, U1(∓θ/2), CX` around the target) together with the control-side
/// `U1(θ/2)` that turns it into the controlled-phase form; at θ = π it is
/// exactly CZ. Control and target are interchangeable.
pub fn crz(control: usize, target: usize, theta: f64) -> Result<Block> {
    distinct(&[control, target], "crz")?;
    let mut c = Circuit::new(span(&[control, target]));
    c.push(Gate::U1 { q: control, lambda: theta / 2.0 });
    c.push(Gate::Cx { c: control, t: target });
    c.push(Gate::U1 { q: target, lambda: -theta / 2.0 });
    c.push(Gate::Cx { c: control, t: target });
    c.push(Gate::U1 { q: target, lambda: theta / 2.0 });
    Ok(Block::new(c, format!("controlled-phase({theta})")))
}

/// One subdivided-phase edge term: `diag(1, e^{iθ}, e^{iθ}, 1)` on `(a, b)`,
/// i.e. phase `e^{iθ}` exactly when the two qubits disagree. Four CX: two
/// X-conjugated [`crz`] factors, one per disagreement pattern.
pub fn sub_oracle_phase(a: usize, b: usize, theta: f64) -> Result<Block> {
    distinct(&[a, b], "sub_oracle_phase")?;
    let mut c = Circuit::new(span(&[a, b]));
    c.push(Gate::x(b));
    c.extend(crz(b, a, theta)?.circuit.gates);
    c.push(Gate::x(b));
    c.push(Gate::x(a));
    c.extend(crz(a, b, theta)?.circuit.gates);
    c.push(Gate::x(a));
    Ok(Block::new(c, format!("edge-phase({theta})")))
}

/// Replaces every macro with its synthesized block. Gates that are already
/// in the hardware basis pass through unchanged.
pub fn lower(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(circuit.n_qubits);
    out.labels = circuit.labels.clone();
    for g in &circuit.gates {
        match g {
            Gate::Macro { kind, qubits } => {
                let block = match kind {
                    MacroKind::Toffoli => toffoli::toffoli_6cx(qubits[0], qubits[1], qubits[2])?,
                    MacroKind::Rtof(v) => {
                        toffoli::rtof(*v, qubits[0], qubits[1], qubits[2])?
                    }
                    MacroKind::ToffoliSwap => {
                        toffoli::toffoli_swap(qubits[0], qubits[1], qubits[2])?
                    }
                    MacroKind::Cnx { n, variant } => {
                        toffoli::cnx(&qubits[..n + 1], &qubits[n + 1..], *variant)?
                    }
                };
                out.extend(block.circuit.gates);
            }
            other => out.push(other.clone()),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::StateVector;
    use num_complex::Complex64;

    /// Phase of basis column `index` for a diagonal circuit.
    fn diagonal_entry(circuit: &Circuit, index: usize) -> Complex64 {
        let mut sv = StateVector::basis(circuit.n_qubits, index).unwrap();
        sv.apply_circuit(circuit).unwrap();
        let amp = sv.amps()[index];
        assert!(
            (amp.norm() - 1.0).abs() < 1e-12,
            "circuit is not diagonal at {index}: |amp| = {}",
            amp.norm()
        );
        sv.amps()
            .iter()
            .enumerate()
            .for_each(|(i, a)| assert!(i == index || a.norm() < 1e-12));
        amp
    }

    #[test]
    fn crz_is_controlled_phase() {
        let theta = 0.77;
        let b = crz(0, 1, theta).unwrap();
        assert_eq!(b.cx_count, 2);
        assert!(!b.relative_phase);
        for (index, expect) in [
            (0b00, 0.0),
            (0b01, 0.0),
            (0b10, 0.0),
            (0b11, theta),
        ] {
            let amp = diagonal_entry(&b.circuit, index);
            let want = Complex64::from_polar(1.0, expect);
            assert!((amp - want).norm() < 1e-12, "index {index}");
        }
    }

    #[test]
    fn crz_at_pi_is_cz() {
        let b = crz(0, 1, std::f64::consts::PI).unwrap();
        for index in 0..4 {
            let amp = diagonal_entry(&b.circuit, index);
            let want = if index == 3 { -1.0 } else { 1.0 };
            assert!((amp - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn sub_oracle_phases_disagreement() {
        let theta = std::f64::consts::FRAC_PI_2;
        let b = sub_oracle_phase(0, 1, theta).unwrap();
        assert_eq!(b.cx_count, 4);
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        for (index, want) in [(0b00, one), (0b01, i), (0b10, i), (0b11, one)] {
            let amp = diagonal_entry(&b.circuit, index);
            assert!((amp - want).norm() < 1e-12, "index {index}: {amp}");
        }
    }

    #[test]
    fn operands_must_differ() {
        assert!(crz(1, 1, 0.1).is_err());
        assert!(sub_oracle_phase(2, 2, 0.1).is_err());
    }
}
