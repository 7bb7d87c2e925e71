//! Gate-level circuit IR over the hardware basis {U1, U2, U3, CX}.
//!
//! Angles follow the OpenQASM 2 convention:
//!
//! ```text
//! U1(λ) = diag(1, e^{iλ})
//! U2(φ,λ) = U3(π/2, φ, λ)
//! U3(θ,φ,λ) = [[cos(θ/2),          -e^{iλ} sin(θ/2)],
//!              [e^{iφ} sin(θ/2),   e^{i(λ+φ)} cos(θ/2)]]
//! ```
//!
//! so `H = U2(0,π)`, `X = U3(π,0,π)`, `Ry(θ) = U3(θ,0,0)`, `T = U1(π/4)`,
//! `Z = U1(π)`. Macro gates are named multi-qubit placeholders; they must be
//! lowered by the synthesis module before simulation or export.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::{Error, Result};

/// Relative-phase Toffoli flavor used by macro lowering and the diffusion
/// builder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RtofVariant {
    /// Controlled-controlled-iX family: 2 U2 + 4 U1 around 3 CX.
    IX,
    /// The 4-Ry flavor that flips exactly |101> (c0=1, c1=0, t=1).
    M,
}

/// Named multi-qubit placeholder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MacroKind {
    /// Exact Toffoli; qubits `[c0, c1, t]`.
    Toffoli,
    /// Relative-phase Toffoli; qubits `[c0, c1, t]`.
    Rtof(RtofVariant),
    /// Toffoli followed by SWAP(c1, t); qubits `[c0, c1, t]`.
    ToffoliSwap,
    /// C^n X with a built-in SWAP of the last two data qubits; qubits are
    /// `n+1` data wires followed by `n-2` work wires.
    Cnx { n: usize, variant: RtofVariant },
}

impl MacroKind {
    pub fn name(&self) -> &'static str {
        match self {
            MacroKind::Toffoli => "toffoli",
            MacroKind::Rtof(RtofVariant::IX) => "rtof_ix",
            MacroKind::Rtof(RtofVariant::M) => "rtof_m",
            MacroKind::ToffoliSwap => "toffoli_swap",
            MacroKind::Cnx { .. } => "cnx",
        }
    }

    /// Expected operand count.
    pub fn arity(&self) -> usize {
        match self {
            MacroKind::Cnx { n, .. } => (n + 1) + (n - 2),
            _ => 3,
        }
    }
}

/// One gate in the IR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    U1 { q: usize, lambda: f64 },
    U2 { q: usize, phi: f64, lambda: f64 },
    U3 { q: usize, theta: f64, phi: f64, lambda: f64 },
    Cx { c: usize, t: usize },
    Macro { kind: MacroKind, qubits: Vec<usize> },
}

impl Gate {
    pub fn h(q: usize) -> Gate {
        Gate::U2 { q, phi: 0.0, lambda: std::f64::consts::PI }
    }

    pub fn x(q: usize) -> Gate {
        Gate::U3 { q, theta: std::f64::consts::PI, phi: 0.0, lambda: std::f64::consts::PI }
    }

    pub fn z(q: usize) -> Gate {
        Gate::U1 { q, lambda: std::f64::consts::PI }
    }

    pub fn t(q: usize) -> Gate {
        Gate::U1 { q, lambda: std::f64::consts::FRAC_PI_4 }
    }

    pub fn tdg(q: usize) -> Gate {
        Gate::U1 { q, lambda: -std::f64::consts::FRAC_PI_4 }
    }

    pub fn ry(q: usize, theta: f64) -> Gate {
        Gate::U3 { q, theta, phi: 0.0, lambda: 0.0 }
    }

    /// Qubits the gate touches, in operand order.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::U1 { q, .. } | Gate::U2 { q, .. } | Gate::U3 { q, .. } => vec![*q],
            Gate::Cx { c, t } => vec![*c, *t],
            Gate::Macro { qubits, .. } => qubits.clone(),
        }
    }

    pub fn is_macro(&self) -> bool {
        matches!(self, Gate::Macro { .. })
    }

    /// Exact inverse. Macros are rejected: lower first, then invert.
    pub fn dagger(&self) -> Result<Gate> {
        Ok(match self {
            Gate::U1 { q, lambda } => Gate::U1 { q: *q, lambda: -lambda },
            // U3(θ,φ,λ)† = U3(-θ,-λ,-φ); U2 is U3 with θ = π/2.
            Gate::U2 { q, phi, lambda } => Gate::U3 {
                q: *q,
                theta: -std::f64::consts::FRAC_PI_2,
                phi: -lambda,
                lambda: -phi,
            },
            Gate::U3 { q, theta, phi, lambda } => {
                Gate::U3 { q: *q, theta: -theta, phi: -lambda, lambda: -phi }
            }
            Gate::Cx { c, t } => Gate::Cx { c: *c, t: *t },
            Gate::Macro { kind, .. } => {
                return Err(Error::InvalidCircuit(format!(
                    "cannot invert unlowered macro {}",
                    kind.name()
                )))
            }
        })
    }
}

/// Role labels for solver-built registers; carried for reporting only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitRole {
    Data,
    Ancilla,
    Accumulator,
    Flag,
    Work,
}

/// An ordered gate list on `n_qubits` wires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<usize, QubitRole>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Circuit {
        Circuit { n_qubits, gates: Vec::new(), labels: BTreeMap::new() }
    }

    /// Appends a gate after range-checking its operands.
    pub fn push(&mut self, gate: Gate) {
        for q in gate.qubits() {
            assert!(q < self.n_qubits, "gate touches qubit {q} of {}", self.n_qubits);
        }
        if let Gate::Cx { c, t } = gate {
            assert_ne!(c, t, "CX control equals target");
        }
        if let Gate::Macro { kind, ref qubits } = gate {
            assert_eq!(qubits.len(), kind.arity(), "{} arity", kind.name());
            let mut sorted = qubits.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), qubits.len(), "{} operands repeat", kind.name());
        }
        self.gates.push(gate);
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) {
        for g in gates {
            self.push(g);
        }
    }

    pub fn label(&mut self, q: usize, role: QubitRole) {
        assert!(q < self.n_qubits);
        self.labels.insert(q, role);
    }

    pub fn has_macros(&self) -> bool {
        self.gates.iter().any(Gate::is_macro)
    }

    /// Exact inverse circuit: reversed order, each gate daggered. Fails on
    /// unlowered macros.
    pub fn dagger(&self) -> Result<Circuit> {
        let mut inv = Circuit::new(self.n_qubits);
        inv.labels = self.labels.clone();
        for g in self.gates.iter().rev() {
            inv.push(g.dagger()?);
        }
        Ok(inv)
    }

    pub fn cx_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cx { .. })).count()
    }

    /// Qubits touched by at least one gate.
    pub fn touched_qubits(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n_qubits];
        for g in &self.gates {
            for q in g.qubits() {
                seen[q] = true;
            }
        }
        (0..self.n_qubits).filter(|&q| seen[q]).collect()
    }

    /// Two-qubit depth: the longest chain of CX gates sharing qubits, i.e.
    /// each qubit carries a counter and a CX sets both endpoints to
    /// `max(c, t) + 1`. Single-qubit gates do not advance depth.
    pub fn two_qubit_depth(&self) -> usize {
        let mut depth = vec![0usize; self.n_qubits];
        let mut max = 0;
        for g in &self.gates {
            if let Gate::Cx { c, t } = g {
                let d = depth[*c].max(depth[*t]) + 1;
                depth[*c] = d;
                depth[*t] = d;
                max = max.max(d);
            }
        }
        max
    }

    /// Remaps every gate through `map` (logical index -> physical index) onto
    /// a register of `n_physical` wires.
    pub fn remap(&self, map: &[usize], n_physical: usize) -> Result<Circuit> {
        if map.len() != self.n_qubits {
            return Err(Error::arg("qubit map length does not match circuit"));
        }
        let mut seen = vec![false; n_physical];
        for &p in map {
            if p >= n_physical {
                return Err(Error::arg(format!("mapped qubit {p} outside 0..{n_physical}")));
            }
            if seen[p] {
                return Err(Error::arg(format!("qubit map repeats physical qubit {p}")));
            }
            seen[p] = true;
        }
        let mut out = Circuit::new(n_physical);
        for (&q, &role) in &self.labels {
            out.labels.insert(map[q], role);
        }
        for g in &self.gates {
            out.push(match g {
                Gate::U1 { q, lambda } => Gate::U1 { q: map[*q], lambda: *lambda },
                Gate::U2 { q, phi, lambda } => {
                    Gate::U2 { q: map[*q], phi: *phi, lambda: *lambda }
                }
                Gate::U3 { q, theta, phi, lambda } => {
                    Gate::U3 { q: map[*q], theta: *theta, phi: *phi, lambda: *lambda }
                }
                Gate::Cx { c, t } => Gate::Cx { c: map[*c], t: map[*t] },
                Gate::Macro { kind, qubits } => Gate::Macro {
                    kind: *kind,
                    qubits: qubits.iter().map(|&q| map[q]).collect(),
                },
            });
        }
        Ok(out)
    }
}

/// Gate census and hardware-shaped size metrics.
///
/// `m_data` counts data-labeled qubits when labels are present, otherwise all
/// touched qubits; `kq = cx_count * m_data`. `kq_touched` is the same product
/// over all touched qubits, reported alongside because the two differ as soon
/// as a circuit borrows ancillas (`ancilla_sensitive` flags that).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub n_qubits: usize,
    pub m_touched: usize,
    pub m_data: usize,
    pub u1_count: usize,
    pub u2_count: usize,
    pub u3_count: usize,
    pub cx_count: usize,
    pub two_qubit_depth: usize,
    pub quantum_volume: u64,
    pub kq: usize,
    pub kq_touched: usize,
    pub ancilla_sensitive: bool,
}

/// Computes [`Metrics`] for a lowered circuit.
///
/// Quantum volume uses the common square estimate `2^min(m, d)` with
/// `m` = touched qubits and `d` = two-qubit depth.
pub fn circuit_metrics(circuit: &Circuit) -> Result<Metrics> {
    if circuit.has_macros() {
        return Err(Error::InvalidCircuit(
            "metrics need a lowered circuit; macros present".into(),
        ));
    }
    let (mut u1, mut u2, mut u3, mut cx) = (0, 0, 0, 0);
    for g in &circuit.gates {
        match g {
            Gate::U1 { .. } => u1 += 1,
            Gate::U2 { .. } => u2 += 1,
            Gate::U3 { .. } => u3 += 1,
            Gate::Cx { .. } => cx += 1,
            Gate::Macro { .. } => unreachable!(),
        }
    }
    let touched = circuit.touched_qubits();
    let m_touched = touched.len();
    let m_data = if circuit.labels.is_empty() {
        m_touched
    } else {
        touched
            .iter()
            .filter(|q| matches!(circuit.labels.get(q), Some(QubitRole::Data) | None))
            .count()
    };
    let d = circuit.two_qubit_depth();
    let qv_exp = m_touched.min(d).min(63);
    Ok(Metrics {
        n_qubits: circuit.n_qubits,
        m_touched,
        m_data,
        u1_count: u1,
        u2_count: u2,
        u3_count: u3,
        cx_count: cx,
        two_qubit_depth: d,
        quantum_volume: 1u64 << qv_exp,
        kq: cx * m_data,
        kq_touched: cx * m_touched,
        ancilla_sensitive: m_data != m_touched,
    })
}

impl Metrics {
    /// Whether the circuit fits the rough noise budget `m * d < 1/eps_eff`.
    /// The boundary case counts as infeasible.
    pub fn feasible(&self, eps_eff: f64) -> Result<bool> {
        if !(eps_eff > 0.0 && eps_eff <= 1.0) {
            return Err(Error::arg(format!(
                "effective error rate {eps_eff} outside (0, 1]"
            )));
        }
        Ok(((self.m_touched * self.two_qubit_depth) as f64) < 1.0 / eps_eff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> Circuit {
        let mut c = Circuit::new(2);
        c.push(Gate::h(0));
        c.push(Gate::Cx { c: 0, t: 1 });
        c
    }

    #[test]
    fn metrics_bell() {
        let m = circuit_metrics(&bell()).unwrap();
        assert_eq!(m.m_touched, 2);
        assert_eq!(m.cx_count, 1);
        assert_eq!(m.two_qubit_depth, 1);
        assert_eq!(m.quantum_volume, 2);
        assert_eq!(m.kq, 2);
    }

    #[test]
    fn depth_counts_only_cx_chains() {
        let mut c = Circuit::new(3);
        c.push(Gate::Cx { c: 0, t: 1 });
        c.push(Gate::Cx { c: 1, t: 2 });
        c.push(Gate::Cx { c: 0, t: 1 });
        // Parallel pair on fresh counters would be depth 1; this chains.
        assert_eq!(c.two_qubit_depth(), 3);

        let mut p = Circuit::new(4);
        p.push(Gate::Cx { c: 0, t: 1 });
        p.push(Gate::Cx { c: 2, t: 3 });
        assert_eq!(p.two_qubit_depth(), 1);
    }

    #[test]
    fn single_qubit_gates_do_not_move_depth_or_kq() {
        let mut c = bell();
        let before = circuit_metrics(&c).unwrap();
        c.push(Gate::t(0));
        c.push(Gate::h(1));
        let after = circuit_metrics(&c).unwrap();
        assert_eq!(before.two_qubit_depth, after.two_qubit_depth);
        assert_eq!(before.kq, after.kq);
        assert_eq!(before.quantum_volume, after.quantum_volume);
    }

    #[test]
    fn quantum_volume_is_square_min() {
        // 3 qubits but depth 1: QV = 2^1.
        let mut c = Circuit::new(3);
        c.push(Gate::Cx { c: 0, t: 1 });
        c.push(Gate::h(2));
        assert_eq!(circuit_metrics(&c).unwrap().quantum_volume, 2);
    }

    #[test]
    fn labels_split_kq_variants() {
        let mut c = Circuit::new(3);
        c.push(Gate::Cx { c: 0, t: 2 });
        c.push(Gate::Cx { c: 1, t: 2 });
        c.label(0, QubitRole::Data);
        c.label(1, QubitRole::Data);
        c.label(2, QubitRole::Ancilla);
        let m = circuit_metrics(&c).unwrap();
        assert_eq!(m.m_data, 2);
        assert_eq!(m.m_touched, 3);
        assert_eq!(m.kq, 4);
        assert_eq!(m.kq_touched, 6);
        assert!(m.ancilla_sensitive);
    }

    #[test]
    fn metrics_reject_macros() {
        let mut c = Circuit::new(3);
        c.push(Gate::Macro { kind: MacroKind::Toffoli, qubits: vec![0, 1, 2] });
        assert!(matches!(circuit_metrics(&c), Err(Error::InvalidCircuit(_))));
    }

    #[test]
    fn feasibility_boundary_is_infeasible() {
        let mut c = Circuit::new(3);
        for _ in 0..3 {
            c.push(Gate::Cx { c: 0, t: 1 });
            c.push(Gate::Cx { c: 1, t: 2 });
        }
        let m = circuit_metrics(&c).unwrap();
        assert_eq!(m.m_touched * m.two_qubit_depth, 18);
        assert!(m.feasible(1.0 / 18.1).unwrap());
        // Exactly m*d = 1/eps is not feasible.
        assert!(!m.feasible(1.0 / 18.0).unwrap());
        assert!(!m.feasible(1.0 / 17.0).unwrap());
        assert!(m.feasible(0.01).unwrap());
        assert!(m.feasible(1e-9).unwrap());
        assert!(matches!(m.feasible(0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(m.feasible(1.5), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn dagger_reverses_and_inverts() {
        let mut c = Circuit::new(2);
        c.push(Gate::U1 { q: 0, lambda: 0.3 });
        c.push(Gate::Cx { c: 0, t: 1 });
        let inv = c.dagger().unwrap();
        assert_eq!(inv.gates[0], Gate::Cx { c: 0, t: 1 });
        assert_eq!(inv.gates[1], Gate::U1 { q: 0, lambda: -0.3 });
    }

    #[test]
    fn remap_checks_injectivity() {
        let c = bell();
        assert!(c.remap(&[0, 0], 2).is_err());
        assert!(c.remap(&[0, 5], 3).is_err());
        let r = c.remap(&[2, 0], 3).unwrap();
        assert_eq!(r.gates[1], Gate::Cx { c: 2, t: 0 });
    }
}
