//! The subdivided phase oracle.

use std::collections::BTreeMap;

use crate::circuit::{Circuit, Gate};
use crate::graph::{Coloring, Graph};
use crate::synth::approx::sub_oracle_approx;
use crate::synth::sub_oracle_phase;
use crate::{Error, Result};

/// How edge phase terms between two live qubits are synthesized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleFlavor {
    /// Four CX per edge, exact diagonal.
    Exact4Cx,
    /// Two CX per edge from the fitted ansatz; the seed feeds the fitter.
    Approx2Cx { seed: u64 },
}

/// A built phase oracle together with its register bookkeeping.
#[derive(Debug, Clone)]
pub struct PhaseOracle {
    pub circuit: Circuit,
    pub theta: f64,
    /// Vertex pinned to color 0 and dropped from the register, if any.
    pub virtual_vertex: Option<usize>,
    /// Vertex -> data qubit, for every vertex that holds a qubit.
    pub qubit_of_vertex: BTreeMap<usize, usize>,
    /// 1.0 for the exact flavor; the worst fitted edge otherwise.
    pub min_fidelity: f64,
}

/// Assigns data qubits to vertices, skipping the pinned one.
fn vertex_map(graph: &Graph, virtual_vertex: Option<usize>) -> BTreeMap<usize, usize> {
    let mut map = BTreeMap::new();
    let mut q = 0;
    for v in 0..graph.n() {
        if Some(v) != virtual_vertex {
            map.insert(v, q);
            q += 1;
        }
    }
    map
}

/// Builds the diagonal `|x> -> e^{i cut(x) theta} |x>` on the data register.
///
/// With a virtual vertex the register holds `|V|-1` qubits and each edge at
/// that vertex is cut exactly when its other endpoint is colored 1, so the
/// edge term collapses to `U1(theta)` there; every remaining edge gets a
/// two-qubit phase block of the chosen flavor.
pub fn build_phase_oracle(
    graph: &Graph,
    theta: f64,
    virtual_vertex: Option<usize>,
    flavor: OracleFlavor,
) -> Result<PhaseOracle> {
    if let Some(v) = virtual_vertex {
        if v >= graph.n() {
            return Err(Error::arg(format!(
                "virtual vertex {v} not in a graph on {} vertices",
                graph.n()
            )));
        }
    }
    let qubit_of_vertex = vertex_map(graph, virtual_vertex);
    let mut circuit = Circuit::new(qubit_of_vertex.len());
    let mut min_fidelity = 1.0f64;
    for &(u, w) in graph.edges() {
        if Some(u) == virtual_vertex || Some(w) == virtual_vertex {
            let live = if Some(u) == virtual_vertex { w } else { u };
            circuit.push(Gate::U1 { q: qubit_of_vertex[&live], lambda: theta });
            continue;
        }
        let (a, b) = (qubit_of_vertex[&u], qubit_of_vertex[&w]);
        match flavor {
            OracleFlavor::Exact4Cx => {
                circuit.extend(sub_oracle_phase(a, b, theta)?.circuit.gates);
            }
            OracleFlavor::Approx2Cx { seed } => {
                let fitted = sub_oracle_approx(a, b, theta, seed)?;
                min_fidelity = min_fidelity.min(fitted.fidelity);
                circuit.extend(fitted.block.circuit.gates);
            }
        }
    }
    Ok(PhaseOracle { circuit, theta, virtual_vertex, qubit_of_vertex, min_fidelity })
}

/// Expands a reduced-register basis index back into a full coloring, with
/// the virtual vertex colored 0. Data qubit i carries the i-th surviving
/// vertex in ascending order.
pub fn reduced_coloring(graph: &Graph, virtual_vertex: usize, index: u64) -> Result<Coloring> {
    if virtual_vertex >= graph.n() {
        return Err(Error::arg("virtual vertex out of range"));
    }
    let mut mask = 0u64;
    let mut bit = 0;
    for v in 0..graph.n() {
        if v == virtual_vertex {
            continue;
        }
        if index >> bit & 1 == 1 {
            mask |= 1 << v;
        }
        bit += 1;
    }
    Ok(Coloring::from_mask(mask, graph.n()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::StateVector;
    use num_complex::Complex64;

    fn oracle_phase(oracle: &PhaseOracle, graph: &Graph, index: u64) -> (f64, usize) {
        let n = oracle.circuit.n_qubits;
        let mut sv = StateVector::basis(n, index as usize).unwrap();
        sv.apply_circuit(&oracle.circuit).unwrap();
        let amp = sv.amps()[index as usize];
        assert!((amp.norm() - 1.0).abs() < 1e-10, "oracle not diagonal");
        let coloring = match oracle.virtual_vertex {
            Some(v) => reduced_coloring(graph, v, index).unwrap(),
            None => Coloring::from_mask(index, graph.n()),
        };
        (amp.arg(), graph.cut_value(&coloring).unwrap())
    }

    #[test]
    fn star_oracle_is_cx_free() {
        let g = Graph::star(4).unwrap();
        let o = build_phase_oracle(&g, 0.7, Some(0), OracleFlavor::Exact4Cx).unwrap();
        assert_eq!(o.circuit.cx_count(), 0);
        assert_eq!(o.circuit.n_qubits, 4);
        for index in 0..16u64 {
            let (phase, cut) = oracle_phase(&o, &g, index);
            let want = Complex64::from_polar(1.0, 0.7 * cut as f64);
            let got = Complex64::from_polar(1.0, phase);
            assert!((want - got).norm() < 1e-10, "index {index}");
        }
    }

    #[test]
    fn triangle_oracle_phases_cut() {
        let g = Graph::from_name("k3").unwrap();
        let theta = std::f64::consts::PI / 3.0;
        let o = build_phase_oracle(&g, theta, None, OracleFlavor::Exact4Cx).unwrap();
        assert_eq!(o.circuit.cx_count(), 12);
        for index in 0..8u64 {
            let (phase, cut) = oracle_phase(&o, &g, index);
            let diff = (phase - theta * cut as f64).rem_euclid(2.0 * std::f64::consts::PI);
            let diff = diff.min(2.0 * std::f64::consts::PI - diff);
            assert!(diff < 1e-10, "index {index}: phase {phase}, cut {cut}");
        }
    }

    #[test]
    fn triangle_oracle_with_virtual_vertex() {
        let g = Graph::from_name("k3").unwrap();
        let theta = 0.5;
        let o = build_phase_oracle(&g, theta, Some(1), OracleFlavor::Exact4Cx).unwrap();
        // Edges (0,1) and (1,2) collapse to U1s; only (0,2) needs CX.
        assert_eq!(o.circuit.cx_count(), 4);
        assert_eq!(o.circuit.n_qubits, 2);
        for index in 0..4u64 {
            let (phase, cut) = oracle_phase(&o, &g, index);
            let want = Complex64::from_polar(1.0, theta * cut as f64);
            assert!((want - Complex64::from_polar(1.0, phase)).norm() < 1e-10);
        }
    }

    #[test]
    fn approx_flavor_counts_and_fidelity() {
        let g = Graph::from_name("k3").unwrap();
        let o = build_phase_oracle(
            &g,
            std::f64::consts::FRAC_PI_4,
            None,
            OracleFlavor::Approx2Cx { seed: 11 },
        )
        .unwrap();
        assert_eq!(o.circuit.cx_count(), 6);
        assert!(o.min_fidelity >= 0.99, "min fidelity {}", o.min_fidelity);
    }

    #[test]
    fn virtual_vertex_must_exist() {
        let g = Graph::from_name("k2").unwrap();
        assert!(build_phase_oracle(&g, 0.1, Some(5), OracleFlavor::Exact4Cx).is_err());
    }

    #[test]
    fn reduced_coloring_inserts_zero() {
        let g = Graph::star(4).unwrap();
        let c = reduced_coloring(&g, 0, 0b1111).unwrap();
        assert_eq!(c.to_string(), "01111");
        let c = reduced_coloring(&g, 2, 0b0011).unwrap();
        // Qubits 0,1 -> vertices 0,1; qubits 2,3 -> vertices 3,4.
        assert_eq!(c.to_string(), "11000");
    }
}
