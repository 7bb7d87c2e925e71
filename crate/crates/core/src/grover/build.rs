//! Assembly of the complete phase-oracle solver circuit.
//!
//! One build does the whole journey from graph to hardware: pin the highest
//! degree vertex as the virtual vertex, prepare the reduced register in
//! uniform superposition, alternate oracle and diffusion for the requested
//! number of rounds, and place the result onto a coupling map. The swap-type
//! diffusion ends in a wire transposition instead of undoing it with CX, so
//! the builder threads a slot-to-wire permutation through the rounds,
//! feeding each oracle the current wire of every data slot and remembering
//! where each slot finally lands for measurement decoding.

use std::collections::{BTreeMap, BTreeSet};

use crate::circuit::{circuit_metrics, Circuit, Gate, Metrics, QubitRole};
use crate::graph::{Coloring, Graph};
use crate::sim::{run_ideal, Distribution};
use crate::synth::diffusion::{diffusion, DiffusionMode};
use crate::topology::Topology;
use crate::{Error, Result};

use super::oracle::{build_phase_oracle, reduced_coloring, OracleFlavor};

/// A placed solver circuit with everything needed to decode its output.
#[derive(Debug, Clone)]
pub struct SolverCircuit {
    /// The lowered, placed circuit over the physical register.
    pub circuit: Circuit,
    pub theta: f64,
    pub iterations: usize,
    /// Vertex pinned to color 0 and absent from the register.
    pub virtual_vertex: usize,
    /// Vertex -> data slot (bit position in decoded outcomes).
    pub qubit_of_vertex: BTreeMap<usize, usize>,
    /// Logical wire -> physical qubit.
    pub placement: Vec<usize>,
    /// Data slot -> physical qubit holding it after the final round.
    pub slot_qubits: Vec<usize>,
    pub n_data: usize,
    /// 1.0 for the exact oracle; the worst fitted edge otherwise.
    pub min_fidelity: f64,
    /// Scalar phase the circuit carries relative to (D O)^r applied to
    /// uniform. Irrelevant to measurements, recorded for unitary checks.
    pub global_phase: f64,
}

/// Highest-degree vertex, lowest index on ties.
pub fn pick_virtual_vertex(graph: &Graph) -> usize {
    (0..graph.n()).max_by_key(|&v| (graph.degree(v), std::cmp::Reverse(v))).unwrap_or(0)
}

/// Builds the placed `r`-round solver for `graph` at phase unit `theta`.
///
/// With no topology the logical wires are kept as physical qubits 0..w.
/// With one, an injective wire assignment is searched for in lexicographic
/// order; failure to cover every CX with a coupled pair is a synthesis
/// error naming the offending requirement.
pub fn build_full_circuit(
    graph: &Graph,
    theta: f64,
    mode: DiffusionMode,
    flavor: OracleFlavor,
    topology: Option<&Topology>,
    iterations: usize,
) -> Result<SolverCircuit> {
    if iterations == 0 {
        return Err(Error::arg("solver needs at least one round"));
    }
    if graph.edge_count() == 0 {
        return Err(Error::arg("solver needs a graph with at least one edge"));
    }
    let virtual_vertex = pick_virtual_vertex(graph);
    let oracle = build_phase_oracle(graph, theta, Some(virtual_vertex), flavor)?;
    let n_data = graph.n() - 1;
    debug_assert_eq!(oracle.circuit.n_qubits, n_data);

    // The one-qubit register needs no multi-controlled core: the inversion
    // about |+> is H Z H.
    let diff = if n_data == 1 {
        let mut c = Circuit::new(1);
        c.extend([Gate::h(0), Gate::z(0), Gate::h(0)]);
        crate::synth::Block::new(c, "diffusion on one qubit")
    } else {
        diffusion(n_data, mode)?
    };
    let width = diff.circuit.n_qubits.max(n_data);

    let mut logical = Circuit::new(width);
    for w in 0..width {
        logical.label(w, if w < n_data { QubitRole::Data } else { QubitRole::Ancilla });
    }
    for w in 0..n_data {
        logical.push(Gate::h(w));
    }

    // sigma[slot] = wire currently holding that slot.
    let mut sigma: Vec<usize> = (0..n_data).collect();
    let mut global_phase = 0.0;
    for _ in 0..iterations {
        logical.extend(oracle.circuit.remap(&sigma, width)?.gates);
        logical.extend(diff.circuit.gates.iter().cloned());
        if let Some((a, b)) = diff.permutation {
            for w in &mut sigma {
                if *w == a {
                    *w = b;
                } else if *w == b {
                    *w = a;
                }
            }
        }
        global_phase += diff.global_phase;
    }

    let (placement, n_physical) = match topology {
        None => ((0..width).collect::<Vec<_>>(), width),
        Some(topo) => (find_placement(&logical, topo)?, topo.n()),
    };
    let circuit = logical.remap(&placement, n_physical)?;
    let slot_qubits: Vec<usize> = sigma.iter().map(|&w| placement[w]).collect();

    Ok(SolverCircuit {
        circuit,
        theta,
        iterations,
        virtual_vertex,
        qubit_of_vertex: oracle.qubit_of_vertex,
        placement,
        slot_qubits,
        n_data,
        min_fidelity: oracle.min_fidelity,
        global_phase,
    })
}

impl SolverCircuit {
    pub fn metrics(&self) -> Result<Metrics> {
        circuit_metrics(&self.circuit)
    }

    /// Ideal measurement distribution over the data slots. Outcome bit i is
    /// data slot i, so indices feed [`reduced_coloring`] directly.
    pub fn data_distribution(&self) -> Result<Distribution> {
        run_ideal(&self.circuit)?.probabilities().marginal(&self.slot_qubits)
    }

    /// Expands a measured reduced index into a full coloring.
    pub fn coloring_of(&self, graph: &Graph, reduced_index: u64) -> Result<Coloring> {
        reduced_coloring(graph, self.virtual_vertex, reduced_index)
    }
}

/// Lexicographically first injective wire assignment putting every CX on a
/// coupled pair.
fn find_placement(logical: &Circuit, topo: &Topology) -> Result<Vec<usize>> {
    let width = logical.n_qubits;
    if topo.n() < width {
        return Err(Error::SynthesisFailure(format!(
            "circuit needs {width} qubits, coupling map has {}",
            topo.n()
        )));
    }
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for g in &logical.gates {
        if let Gate::Cx { c, t } = g {
            pairs.insert((*c.min(t), *c.max(t)));
        }
    }
    let mut assign: Vec<usize> = Vec::with_capacity(width);
    let mut used = vec![false; topo.n()];
    if backtrack(width, &pairs, topo, &mut assign, &mut used) {
        return Ok(assign);
    }
    Err(Error::SynthesisFailure(format!(
        "no placement of {width} wires onto the coupling map satisfies the {} \
         CX adjacency requirements: {:?}",
        pairs.len(),
        pairs.iter().collect::<Vec<_>>(),
    )))
}

fn backtrack(
    width: usize,
    pairs: &BTreeSet<(usize, usize)>,
    topo: &Topology,
    assign: &mut Vec<usize>,
    used: &mut [bool],
) -> bool {
    let wire = assign.len();
    if wire == width {
        return true;
    }
    for p in 0..topo.n() {
        if used[p] {
            continue;
        }
        let fits = (0..wire).all(|w2| {
            !pairs.contains(&(w2.min(wire), w2.max(wire))) || topo.has_edge(assign[w2], p)
        });
        if fits {
            used[p] = true;
            assign.push(p);
            if backtrack(width, pairs, topo, assign, used) {
                return true;
            }
            assign.pop();
            used[p] = false;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::RtofVariant;
    use crate::grover::analytics::{one_round_state_probability, success_probability};
    use std::f64::consts::PI;

    fn swap_ix() -> DiffusionMode {
        DiffusionMode::Swap(RtofVariant::IX)
    }

    #[test]
    fn virtual_vertex_is_max_degree_lowest_index() {
        assert_eq!(pick_virtual_vertex(&Graph::star(4).unwrap()), 0);
        assert_eq!(pick_virtual_vertex(&Graph::from_name("path:4").unwrap()), 1);
        assert_eq!(pick_virtual_vertex(&Graph::from_name("k3").unwrap()), 0);
    }

    #[test]
    fn k13_budget_and_placement() {
        let g = Graph::star(3).unwrap();
        let s = build_full_circuit(
            &g,
            PI / 3.0,
            swap_ix(),
            OracleFlavor::Exact4Cx,
            Some(&Topology::t5()),
            1,
        )
        .unwrap();
        let m = s.metrics().unwrap();
        assert_eq!(m.cx_count, 7);
        assert_eq!(m.m_data, 3);
        assert_eq!(m.kq, 21);
        assert_eq!(s.placement, vec![0, 1, 2]);
        // The three-qubit diffusion ends swapping wires 1 and 2.
        assert_eq!(s.slot_qubits, vec![0, 2, 1]);
    }

    #[test]
    fn k14_budget_and_placement() {
        let g = Graph::star(4).unwrap();
        let s = build_full_circuit(
            &g,
            PI / 4.0,
            swap_ix(),
            OracleFlavor::Exact4Cx,
            Some(&Topology::t5()),
            1,
        )
        .unwrap();
        let m = s.metrics().unwrap();
        assert_eq!(m.cx_count, 13);
        assert_eq!(m.m_data, 4);
        assert_eq!(m.m_touched, 5);
        assert_eq!(m.kq, 52);
        assert!(m.ancilla_sensitive);
        assert_eq!(s.placement, vec![0, 2, 3, 4, 1]);
        assert_eq!(s.virtual_vertex, 0);
    }

    #[test]
    fn one_round_distribution_matches_closed_form() {
        for (name, theta) in [("k13", PI / 3.0), ("k14", PI / 4.0), ("k3", 0.37 * PI)] {
            let g = Graph::from_name(name).unwrap();
            let s = build_full_circuit(
                &g,
                theta,
                swap_ix(),
                OracleFlavor::Exact4Cx,
                None,
                1,
            )
            .unwrap();
            let dist = s.data_distribution().unwrap();
            for idx in 0..1u64 << s.n_data {
                let coloring = s.coloring_of(&g, idx).unwrap();
                let k = g.cut_value(&coloring).unwrap();
                // Reduced-register states carry twice the full-space
                // per-state probability (half the states, same shape).
                let want = 2.0 * one_round_state_probability(&g, theta, k).unwrap();
                let got = dist.prob(idx as usize);
                assert!(
                    (got - want).abs() < 1e-9,
                    "{name} idx {idx}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn k14_success_state_probability() {
        let g = Graph::star(4).unwrap();
        let s = build_full_circuit(
            &g,
            PI / 4.0,
            swap_ix(),
            OracleFlavor::Exact4Cx,
            Some(&Topology::t5()),
            1,
        )
        .unwrap();
        let dist = s.data_distribution().unwrap();
        // The one reduced solution is all leaves colored 1: index 0b1111.
        let p = dist.prob(15);
        let want = (33.0 + 12.0 * 2f64.sqrt()) / 256.0;
        assert!((p - want).abs() < 1e-9, "p = {p}");
        assert!((p - success_probability(&g, PI / 4.0).unwrap()).abs() < 1e-9);
        let best = s.coloring_of(&g, 15).unwrap();
        assert_eq!(best.to_string(), "01111");
        assert_eq!(g.cut_value(&best).unwrap(), 4);
    }

    #[test]
    fn multi_round_swap_agrees_with_exact_mode() {
        let theta = 0.3 * PI;
        for (name, rounds) in [("path:4", 2), ("k14", 3), ("k3", 2)] {
            let g = Graph::from_name(name).unwrap();
            let swap = build_full_circuit(
                &g,
                theta,
                DiffusionMode::Swap(RtofVariant::M),
                OracleFlavor::Exact4Cx,
                None,
                rounds,
            )
            .unwrap();
            let exact = build_full_circuit(
                &g,
                theta,
                DiffusionMode::Exact,
                OracleFlavor::Exact4Cx,
                None,
                rounds,
            )
            .unwrap();
            let a = swap.data_distribution().unwrap();
            let b = exact.data_distribution().unwrap();
            for i in 0..a.probs().len() {
                assert!(
                    (a.probs()[i] - b.probs()[i]).abs() < 1e-9,
                    "{name} round {rounds} idx {i}"
                );
            }
        }
    }

    #[test]
    fn k2_one_qubit_pipeline() {
        let g = Graph::from_name("k2").unwrap();
        let s = build_full_circuit(
            &g,
            PI / 2.0,
            swap_ix(),
            OracleFlavor::Exact4Cx,
            Some(&Topology::t5()),
            1,
        )
        .unwrap();
        assert_eq!(s.n_data, 1);
        assert_eq!(s.metrics().unwrap().cx_count, 0);
        let dist = s.data_distribution().unwrap();
        assert!((dist.prob(0) - 0.5).abs() < 1e-12);
        assert!((dist.prob(1) - 0.5).abs() < 1e-12);
        assert_eq!(s.coloring_of(&g, 1).unwrap().to_string(), "01");
    }

    #[test]
    fn approx_flavor_tracks_fidelity_and_stays_close() {
        let g = Graph::from_name("k3").unwrap();
        let theta = PI / 4.0;
        let exact = build_full_circuit(
            &g,
            theta,
            swap_ix(),
            OracleFlavor::Exact4Cx,
            None,
            1,
        )
        .unwrap();
        let approx = build_full_circuit(
            &g,
            theta,
            swap_ix(),
            OracleFlavor::Approx2Cx { seed: 11 },
            None,
            1,
        )
        .unwrap();
        assert!(approx.min_fidelity >= 0.99);
        assert!(approx.metrics().unwrap().cx_count < exact.metrics().unwrap().cx_count);
        let a = exact.data_distribution().unwrap();
        let b = approx.data_distribution().unwrap();
        let tv = a.tv_distance(&b).unwrap();
        assert!(tv < 0.05, "tv = {tv}");
    }

    #[test]
    fn unplaceable_circuit_is_a_synthesis_error() {
        let g = Graph::from_name("complete:5").unwrap();
        let err = build_full_circuit(
            &g,
            0.2,
            swap_ix(),
            OracleFlavor::Exact4Cx,
            Some(&Topology::t5()),
            1,
        )
        .unwrap_err();
        assert!(matches!(err, Error::SynthesisFailure(_)), "{err}");
    }

    #[test]
    fn bad_arguments_are_rejected() {
        let g = Graph::star(4).unwrap();
        assert!(build_full_circuit(&g, 0.5, swap_ix(), OracleFlavor::Exact4Cx, None, 0).is_err());
        let lonely = Graph::new(3, &[]).unwrap();
        assert!(
            build_full_circuit(&lonely, 0.5, swap_ix(), OracleFlavor::Exact4Cx, None, 1).is_err()
        );
    }

    #[test]
    fn no_topology_keeps_identity_placement() {
        let g = Graph::star(4).unwrap();
        let s =
            build_full_circuit(&g, 0.5, swap_ix(), OracleFlavor::Exact4Cx, None, 1).unwrap();
        assert_eq!(s.placement, vec![0, 1, 2, 3, 4]);
        assert_eq!(s.circuit.n_qubits, 5);
    }
}
