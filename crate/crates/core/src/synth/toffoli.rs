//! Toffoli-family synthesis: the 6-CX exact Toffoli, 3-CX relative-phase
//! variants, the 7-CX Toffoli with built-in SWAP, and the multi-controlled
//! X ladder built from them.

use crate::circuit::{Circuit, Gate, RtofVariant};
use crate::synth::{distinct, Block};
use crate::{Error, Result};

fn circuit_over(qubits: &[usize]) -> Circuit {
    let span = qubits.iter().copied().max().map_or(0, |m| m + 1);
    Circuit::new(span)
}

/// Exact Toffoli, six CX and a T-count of seven. Standard decomposition.
pub fn toffoli_6cx(c0: usize, c1: usize, t: usize) -> Result<Block> {
    distinct(&[c0, c1, t], "toffoli")?;
    let mut c = circuit_over(&[c0, c1, t]);
    c.push(Gate::h(t));
    c.push(Gate::Cx { c: c1, t });
    c.push(Gate::tdg(t));
    c.push(Gate::Cx { c: c0, t });
    c.push(Gate::t(t));
    c.push(Gate::Cx { c: c1, t });
    c.push(Gate::tdg(t));
    c.push(Gate::Cx { c: c0, t });
    c.push(Gate::t(c1));
    c.push(Gate::t(t));
    c.push(Gate::h(t));
    c.push(Gate::Cx { c: c0, t: c1 });
    c.push(Gate::t(c0));
    c.push(Gate::tdg(c1));
    c.push(Gate::Cx { c: c0, t: c1 });
    Ok(Block::new(c, "toffoli"))
}

/// Relative-phase Toffoli, three CX.
///
/// Both variants flip the target exactly when both controls are set and act
/// as the identity on the magnitudes everywhere else; they differ in which
/// relative phases they leave behind.
///
/// * `IX`: 2 U2 + 4 U1 around the CXs (the controlled-controlled-iX
///   family). On the target wire the control patterns act as I, I, Z, Y for
///   (c0,c1) = (0,0), (0,1), (1,0), (1,1).
/// * `M`: 4 U3 (Ry rotations). Control patterns act as I, I, Z, X, i.e. the
///   only deviation from a true Toffoli is a sign flip on |c0=1, c1=0, t=1>.
///
/// Both place their CXs on the pairs (c0,t) and (c1,t), so the target sits
/// in the middle of a hardware line.
pub fn rtof(variant: RtofVariant, c0: usize, c1: usize, t: usize) -> Result<Block> {
    distinct(&[c0, c1, t], "rtof")?;
    let mut c = circuit_over(&[c0, c1, t]);
    match variant {
        RtofVariant::IX => {
            c.push(Gate::h(t));
            c.push(Gate::t(t));
            c.push(Gate::Cx { c: c1, t });
            c.push(Gate::tdg(t));
            c.push(Gate::Cx { c: c0, t });
            c.push(Gate::t(t));
            c.push(Gate::Cx { c: c1, t });
            c.push(Gate::tdg(t));
            c.push(Gate::h(t));
        }
        RtofVariant::M => {
            let q = std::f64::consts::FRAC_PI_4;
            c.push(Gate::ry(t, q));
            c.push(Gate::Cx { c: c1, t });
            c.push(Gate::ry(t, q));
            c.push(Gate::Cx { c: c0, t });
            c.push(Gate::ry(t, -q));
            c.push(Gate::Cx { c: c1, t });
            c.push(Gate::ry(t, -q));
        }
    }
    let name = match variant {
        RtofVariant::IX => "rtof_ix",
        RtofVariant::M => "rtof_m",
    };
    Ok(Block::new(c, name).relative())
}

/// Toffoli with a built-in SWAP of `c1` and `t`, seven CX on the line
/// c0 - c1 - t: `circuit = SWAP(c1,t) · CCX(c0,c1 -> t)` exactly.
///
/// Construction: conjugating by H on the target turns the job into
/// SWAP·CCZ, which is a CX word plus diagonal phases. The word
/// [c0->c1, t->c1, c0->c1, c1->t, t->c1, c0->c1, c0->c1] nets to SWAP(c1,t)
/// while wire c1 walks through all four parities x0⊕x1, x0⊕x1⊕x2, x1⊕x2,
/// x0⊕x2; a T or T† at each visit plus an opening T per qubit accumulates
/// exactly the CCZ phase polynomial
/// (π/4)(x0+x1+x2-(x0⊕x1)-(x1⊕x2)-(x0⊕x2)+(x0⊕x1⊕x2)). The open H lands on
/// t and the closing H on c1, where the swapped target ends up.
pub fn toffoli_swap(c0: usize, c1: usize, t: usize) -> Result<Block> {
    distinct(&[c0, c1, t], "toffoli_swap")?;
    let mut c = circuit_over(&[c0, c1, t]);
    c.push(Gate::h(t));
    c.push(Gate::t(c0));
    c.push(Gate::t(c1));
    c.push(Gate::t(t));
    c.push(Gate::Cx { c: c0, t: c1 });
    c.push(Gate::tdg(c1));
    c.push(Gate::Cx { c: t, t: c1 });
    c.push(Gate::t(c1));
    c.push(Gate::Cx { c: c0, t: c1 });
    c.push(Gate::tdg(c1));
    c.push(Gate::Cx { c: c1, t });
    c.push(Gate::Cx { c: t, t: c1 });
    c.push(Gate::Cx { c: c0, t: c1 });
    c.push(Gate::tdg(c1));
    c.push(Gate::Cx { c: c0, t: c1 });
    c.push(Gate::h(c1));
    Ok(Block::new(c, "toffoli+swap(c1,t)").swapping(c1, t))
}

/// Exact multi-controlled X. With `k` controls the cost is `X`, `CX`, one
/// Toffoli, or a compute/uncompute chain of `2k-3` Toffolis using `k-2`
/// work qubits (which must start in |0> and are always returned to |0>).
pub fn mcx(controls: &[usize], target: usize, work: &[usize]) -> Result<Block> {
    let mut all = controls.to_vec();
    all.push(target);
    all.extend_from_slice(work);
    distinct(&all, "mcx")?;
    let k = controls.len();
    let needed = k.saturating_sub(2);
    if work.len() < needed {
        return Err(Error::arg(format!(
            "mcx with {k} controls needs {needed} work qubits, got {}",
            work.len()
        )));
    }
    let mut c = circuit_over(&all);
    match k {
        0 => c.push(Gate::x(target)),
        1 => c.push(Gate::Cx { c: controls[0], t: target }),
        2 => c.extend(toffoli_6cx(controls[0], controls[1], target)?.circuit.gates),
        _ => {
            // w[i] accumulates the AND of the first i+2 controls.
            let mut compute: Vec<(usize, usize, usize)> = Vec::new();
            compute.push((controls[0], controls[1], work[0]));
            for i in 2..k - 1 {
                compute.push((work[i - 2], controls[i], work[i - 1]));
            }
            for &(a, b, t) in &compute {
                c.extend(toffoli_6cx(a, b, t)?.circuit.gates);
            }
            c.extend(
                toffoli_6cx(work[k - 3], controls[k - 1], target)?.circuit.gates,
            );
            for &(a, b, t) in compute.iter().rev() {
                c.extend(toffoli_6cx(a, b, t)?.circuit.gates);
            }
        }
    }
    Ok(Block::new(c, format!("c{k}x")))
}

/// C^n X with a built-in SWAP of the last two data qubits, `6n-5` CX.
///
/// `data` holds the `n` controls followed by the target; `ancilla` holds
/// `n-2` work qubits. A chain of relative-phase Toffolis folds the controls
/// pairwise into the ancillas, a [`toffoli_swap`] applies the final AND to
/// the target, and the chain is undone with exact inverses. The relative
/// phases cancel because each chain gate is conjugated around operations
/// that preserve every wire its phase polynomial reads, so on ancilla |0>
/// the whole block equals `SWAP(data[n-1], data[n]) · C^nX` exactly;
/// ancillas return to |0> for every input.
pub fn cnx(data: &[usize], ancilla: &[usize], variant: RtofVariant) -> Result<Block> {
    if data.len() < 4 {
        return Err(Error::arg("cnx needs n >= 3 (at least four data qubits)"));
    }
    let n = data.len() - 1;
    if ancilla.len() != n - 2 {
        return Err(Error::arg(format!(
            "cnx over {n} controls needs {} ancillas, got {}",
            n - 2,
            ancilla.len()
        )));
    }
    let mut all = data.to_vec();
    all.extend_from_slice(ancilla);
    distinct(&all, "cnx")?;

    let mut chain: Vec<Block> = Vec::new();
    chain.push(rtof(variant, data[0], data[1], ancilla[0])?);
    for k in 0..n.saturating_sub(3) {
        chain.push(rtof(variant, ancilla[k], data[k + 2], ancilla[k + 1])?);
    }

    let mut c = circuit_over(&all);
    for b in &chain {
        c.extend(b.circuit.gates.iter().cloned());
    }
    c.extend(toffoli_swap(ancilla[n - 3], data[n - 1], data[n])?.circuit.gates);
    for b in chain.iter().rev() {
        c.extend(b.circuit.dagger()?.gates);
    }

    let expected = 6 * n - 5;
    debug_assert_eq!(c.cx_count(), expected);
    Ok(Block::new(c, format!("c{n}x+swap")).swapping(data[n - 1], data[n]))
}
