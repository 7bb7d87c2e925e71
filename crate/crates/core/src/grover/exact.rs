//! The exact accumulator oracle and its Grover loop.

use crate::circuit::{Circuit, Gate};
use crate::graph::Graph;
use crate::sim::{run_ideal, Distribution};
use crate::synth::arith::{cut_suboracle, pshift};
use crate::synth::diffusion::{diffusion, DiffusionMode};
use crate::{Error, Result};

/// Register plan for the exact oracle.
///
/// Data qubits sit first (one per vertex), then the accumulator counting
/// cut edges, one flag qubit for the per-edge XOR, and shared work qubits
/// sized for the widest multi-controlled gate in either the counter or the
/// diffusion core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactLayout {
    pub n_vertices: usize,
    pub m_acc: usize,
    pub t: u64,
    n_work: usize,
}

impl ExactLayout {
    pub fn for_graph(graph: &Graph, t: u64) -> Result<ExactLayout> {
        let edges = graph.edge_count();
        if edges == 0 {
            return Err(Error::arg("exact oracle needs at least one edge"));
        }
        if t > edges as u64 {
            return Err(Error::arg(format!(
                "threshold {t} exceeds edge count {edges}"
            )));
        }
        let m_acc = usize::BITS as usize - (edges).leading_zeros() as usize;
        let n = graph.n();
        let n_work = m_acc.saturating_sub(2).max(n.saturating_sub(3));
        Ok(ExactLayout { n_vertices: n, m_acc, t, n_work })
    }

    pub fn data(&self) -> Vec<usize> {
        (0..self.n_vertices).collect()
    }

    pub fn acc(&self) -> Vec<usize> {
        (self.n_vertices..self.n_vertices + self.m_acc).collect()
    }

    pub fn flag(&self) -> usize {
        self.n_vertices + self.m_acc
    }

    pub fn work(&self) -> Vec<usize> {
        let base = self.n_vertices + self.m_acc + 1;
        (base..base + self.n_work).collect()
    }

    pub fn width(&self) -> usize {
        self.n_vertices + self.m_acc + 1 + self.n_work
    }
}

/// Sign flip on every coloring cutting at least `layout.t` edges.
///
/// Sequence: count every edge into the accumulator, apply the threshold
/// phase, uncompute the count in exact reverse. Accumulator, flag, and work
/// end in |0> for every input, so the data register sees a clean diagonal.
pub fn build_exact_oracle(graph: &Graph, layout: &ExactLayout) -> Result<Circuit> {
    if layout.n_vertices != graph.n()
        || layout.m_acc < usize::BITS as usize - graph.edge_count().leading_zeros() as usize
    {
        return Err(Error::arg("layout does not fit the graph"));
    }
    let acc = layout.acc();
    let work = layout.work();
    let mut c = Circuit::new(layout.width());
    let mut edge_blocks = Vec::with_capacity(graph.edge_count());
    for &(u, w) in graph.edges() {
        let block = cut_suboracle(u, w, layout.flag(), &acc, &work)?;
        c.extend(block.circuit.gates.iter().cloned());
        edge_blocks.push(block);
    }
    c.extend(pshift(layout.t, &acc, &work)?.circuit.gates);
    for block in edge_blocks.iter().rev() {
        c.extend(block.circuit.dagger()?.gates);
    }
    Ok(c)
}

/// Full exact-search circuit: uniform data prep, then `iterations` rounds
/// of oracle + diffusion. Zero iterations builds the bare preparation
/// (that is what a zero-round plan means physically). Width is
/// `layout.width()`; measurement stays with the caller.
pub fn build_exact_circuit(
    graph: &Graph,
    t: u64,
    iterations: usize,
) -> Result<(Circuit, ExactLayout)> {
    let layout = ExactLayout::for_graph(graph, t)?;
    let oracle = build_exact_oracle(graph, &layout)?;
    let diff = diffusion(layout.n_vertices, DiffusionMode::Exact)?;
    // The diffusion block allocates its work qubits right after its data
    // qubits; route them onto the layout's shared work register.
    let mut diff_map: Vec<usize> = layout.data();
    diff_map.extend(layout.work().into_iter().take(diff.circuit.n_qubits - layout.n_vertices));
    let diff_placed = diff.circuit.remap(&diff_map, layout.width())?;

    let mut c = Circuit::new(layout.width());
    for q in layout.data() {
        c.push(Gate::h(q));
    }
    for _ in 0..iterations {
        c.extend(oracle.gates.iter().cloned());
        c.extend(diff_placed.gates.iter().cloned());
    }
    Ok((c, layout))
}

/// Ideal distribution over colorings after `iterations` exact Grover
/// rounds at threshold `t`.
pub fn exact_grover_once(graph: &Graph, t: u64, iterations: usize) -> Result<Distribution> {
    if iterations == 0 {
        return Err(Error::arg("iterations must be at least 1"));
    }
    let (circuit, layout) = build_exact_circuit(graph, t, iterations)?;
    let sv = run_ideal(&circuit)?;
    sv.probabilities().marginal(&layout.data())
}

/// Iteration count for amplifying `n_marked` of `space` states: the usual
/// floor((pi/4) sqrt(N/m)), floored at one round. Zero means "do not run
/// Grover at all, sample uniformly": that covers both nothing-marked and
/// the half-or-more-marked regime, where a single round can push the
/// marked probability to zero (on the triangle graph it does exactly
/// that).
pub fn grover_iterations(n_marked: u64, space: u64) -> usize {
    if n_marked == 0 || 2 * n_marked >= space {
        return 0;
    }
    let ratio = space as f64 / n_marked as f64;
    (((std::f64::consts::FRAC_PI_4) * ratio.sqrt()).floor() as usize).max(1)
}

/// [`grover_iterations`] fed by the classical cut census for threshold `t`.
pub fn planned_iterations(graph: &Graph, t: u64) -> Result<usize> {
    let marked = graph.count_cut_at_least(t as usize)?;
    Ok(grover_iterations(marked, 1u64 << graph.n()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Coloring;
    use crate::sim::StateVector;

    #[test]
    fn layout_sizes() {
        let g = Graph::star(4).unwrap();
        let l = ExactLayout::for_graph(&g, 4).unwrap();
        assert_eq!(l.m_acc, 3);
        assert_eq!(l.width(), 5 + 3 + 1 + 2);
        assert_eq!(l.flag(), 8);
        let g2 = Graph::from_name("k2").unwrap();
        let l2 = ExactLayout::for_graph(&g2, 1).unwrap();
        assert_eq!(l2.m_acc, 1);
        assert!(ExactLayout::for_graph(&g2, 2).is_err());
    }

    #[test]
    fn oracle_marks_threshold_colorings() {
        let g = Graph::from_name("k2").unwrap();
        let layout = ExactLayout::for_graph(&g, 1).unwrap();
        let oracle = build_exact_oracle(&g, &layout).unwrap();
        for x in 0..4usize {
            let mut sv = StateVector::basis(oracle.n_qubits, x).unwrap();
            sv.apply_circuit(&oracle).unwrap();
            let amp = sv.amps()[x];
            let cut = g.cut_value(&Coloring::from_mask(x as u64, 2)).unwrap();
            let want = if cut >= 1 { -1.0 } else { 1.0 };
            assert!(
                (amp - num_complex::Complex64::new(want, 0.0)).norm() < 1e-10,
                "x={x} amp={amp}"
            );
        }
    }

    #[test]
    fn star_oracle_marks_the_two_solutions() {
        let g = Graph::star(4).unwrap();
        let layout = ExactLayout::for_graph(&g, 4).unwrap();
        let oracle = build_exact_oracle(&g, &layout).unwrap();
        for x in [0b01111u64, 0b10000, 0, 0b00001, 0b11111] {
            let mut sv = StateVector::basis(oracle.n_qubits, x as usize).unwrap();
            sv.apply_circuit(&oracle).unwrap();
            let amp = sv.amps()[x as usize];
            // Vertex i is data qubit i; 01111 as a coloring string is the
            // basis index with bits 1..4 set.
            let coloring = Coloring::from_mask(x, 5);
            let want = if g.cut_value(&coloring).unwrap() >= 4 { -1.0 } else { 1.0 };
            assert!(
                (amp - num_complex::Complex64::new(want, 0.0)).norm() < 1e-10,
                "x={x:#07b} amp={amp}"
            );
        }
    }

    #[test]
    fn k14_single_round_probability() {
        let g = Graph::star(4).unwrap();
        let dist = exact_grover_once(&g, 4, 1).unwrap();
        let p = dist.prob_of("01111").unwrap() + dist.prob_of("10000").unwrap();
        // (2/32) |2*(28/32) + 1|^2 = 15.125/32.
        assert!((p - 15.125 / 32.0).abs() < 1e-9, "p = {p}");
    }

    #[test]
    fn k2_single_round_probability() {
        let g = Graph::from_name("k2").unwrap();
        let dist = exact_grover_once(&g, 1, 1).unwrap();
        let p = dist.prob_of("01").unwrap() + dist.prob_of("10").unwrap();
        assert!((p - 0.5).abs() < 1e-9, "p = {p}");
    }

    #[test]
    fn above_max_cut_stays_uniform() {
        let g = Graph::from_name("k3").unwrap();
        let dist = exact_grover_once(&g, 3, 1).unwrap();
        for x in 0..8 {
            assert!((dist.prob(x) - 0.125).abs() < 1e-9);
        }
    }

    #[test]
    fn ancillas_return_to_zero() {
        let g = Graph::from_name("k3").unwrap();
        let (circuit, layout) = build_exact_circuit(&g, 2, 1).unwrap();
        let sv = run_ideal(&circuit).unwrap();
        let data_mass: f64 = sv
            .amps()
            .iter()
            .enumerate()
            .filter(|(i, _)| i >> layout.n_vertices == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        assert!((data_mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn iteration_policy() {
        assert_eq!(grover_iterations(0, 32), 0);
        assert_eq!(grover_iterations(16, 32), 0);
        assert_eq!(grover_iterations(6, 8), 0);
        assert_eq!(grover_iterations(2, 32), 3);
        assert_eq!(grover_iterations(1, 4), 1);
        let g = Graph::star(4).unwrap();
        assert_eq!(planned_iterations(&g, 4).unwrap(), 3);
        // Beyond the max cut nothing is marked: uniform sampling.
        assert_eq!(planned_iterations(&g, 5).unwrap(), 0);
    }
}
