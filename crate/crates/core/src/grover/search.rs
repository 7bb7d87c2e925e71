//! Threshold binary search over the exact oracle.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;

use crate::graph::{Coloring, Graph};
use crate::sim::{run_noisy, shot_rng, Distribution, NoiseModel};
use crate::{Error, Result};

use super::exact::{build_exact_circuit, exact_grover_once, planned_iterations};

/// Yields one measured coloring per call for a given threshold.
pub trait ColoringSampler {
    fn sample(&mut self, graph: &Graph, t: u64) -> Result<Coloring>;
    /// Short label for traces and reports.
    fn describe(&self) -> String;
}

/// Samples from the ideal statevector distribution of the exact pipeline.
///
/// Iteration counts come from [`planned_iterations`]; a plan of zero rounds
/// samples the uniform distribution directly. Distributions are cached per
/// threshold, draws are seeded substreams, so a run is reproducible.
pub struct IdealSampler {
    seed: u64,
    shot: u64,
    cache: BTreeMap<u64, (Distribution, usize)>,
}

impl IdealSampler {
    pub fn new(seed: u64) -> IdealSampler {
        IdealSampler { seed, shot: 0, cache: BTreeMap::new() }
    }

    /// The iteration count the sampler used for threshold `t`, if known.
    pub fn iterations_used(&self, t: u64) -> Option<usize> {
        self.cache.get(&t).map(|(_, iters)| *iters)
    }
}

impl ColoringSampler for IdealSampler {
    fn sample(&mut self, graph: &Graph, t: u64) -> Result<Coloring> {
        if let std::collections::btree_map::Entry::Vacant(slot) = self.cache.entry(t) {
            let iters = planned_iterations(graph, t)?;
            let dist = if iters == 0 {
                Distribution::uniform(graph.n())
            } else {
                exact_grover_once(graph, t, iters)?
            };
            slot.insert((dist, iters));
        }
        let (dist, _) = &self.cache[&t];
        let mut rng = shot_rng(self.seed, self.shot);
        self.shot += 1;
        let index = dist.sample_index(rng.random::<f64>());
        Ok(Coloring::from_mask(index as u64, graph.n()))
    }

    fn describe(&self) -> String {
        "ideal".into()
    }
}

/// Samples by running the exact circuit under a trajectory noise model,
/// readout errors included; the accumulator and work bits are traced out of
/// each shot.
pub struct NoisySampler {
    noise: NoiseModel,
    seed: u64,
    shot: u64,
}

impl NoisySampler {
    pub fn new(noise: NoiseModel, seed: u64) -> NoisySampler {
        NoisySampler { noise, seed, shot: 0 }
    }
}

impl ColoringSampler for NoisySampler {
    fn sample(&mut self, graph: &Graph, t: u64) -> Result<Coloring> {
        // A zero-round plan measures the bare preparation, the physical
        // counterpart of the ideal sampler's uniform draw.
        let iters = planned_iterations(graph, t)?;
        let (circuit, layout) = build_exact_circuit(graph, t, iters)?;
        let seed = self.seed.wrapping_add(self.shot.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        self.shot += 1;
        let counts = run_noisy(&circuit, &self.noise, 1, seed)?;
        let data = counts.marginal(&layout.data())?;
        let bits = data.counts.keys().next().expect("one shot").clone();
        Coloring::parse(&bits)
    }

    fn describe(&self) -> String {
        "noisy".into()
    }
}

/// One bisection round of the search.
#[derive(Debug, Clone, Serialize)]
pub struct SearchRound {
    pub t: u64,
    /// Grover rounds the plan called for (0 = uniform sampling).
    pub iterations: usize,
    /// Every measured coloring, in draw order.
    pub samples: Vec<String>,
    /// Best cut among this round's samples.
    pub best_cut: u64,
    /// Whether any sample cut at least `t` edges.
    pub legal: bool,
}

/// Search result: the best coloring ever measured plus the full trace.
#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    pub best_coloring: String,
    pub best_cut: u64,
    pub rounds: Vec<SearchRound>,
}

impl SearchOutcome {
    pub fn coloring(&self) -> Result<Coloring> {
        Coloring::parse(&self.best_coloring)
    }
}

/// Bisects the threshold over `[1, |E|]`, drawing `samples_per_round`
/// colorings at each midpoint. A round is legal when any sample cuts at
/// least `t` edges; legal rounds raise the window, illegal rounds lower
/// it. The search keeps the best coloring across every sample it ever saw,
/// so the answer can exceed the last legal threshold.
pub fn threshold_binary_search(
    graph: &Graph,
    sampler: &mut dyn ColoringSampler,
    samples_per_round: u32,
) -> Result<SearchOutcome> {
    if samples_per_round == 0 {
        return Err(Error::arg("need at least one sample per round"));
    }
    if graph.edge_count() == 0 {
        return Ok(SearchOutcome {
            best_coloring: Coloring::from_mask(0, graph.n()).to_string(),
            best_cut: 0,
            rounds: Vec::new(),
        });
    }
    let mut lo = 1u64;
    let mut hi = graph.edge_count() as u64;
    let mut visited = BTreeSet::new();
    let mut best: Option<(u64, Coloring)> = None;
    let mut rounds = Vec::new();
    while lo <= hi {
        let t = lo + (hi - lo) / 2;
        if !visited.insert(t) {
            break;
        }
        let iterations = planned_iterations(graph, t)?;
        let mut samples = Vec::with_capacity(samples_per_round as usize);
        let mut round_best = 0u64;
        for _ in 0..samples_per_round {
            let coloring = sampler.sample(graph, t)?;
            let cut = graph.cut_value(&coloring)? as u64;
            round_best = round_best.max(cut);
            if best.as_ref().is_none_or(|(c, _)| cut > *c) {
                best = Some((cut, coloring));
            }
            samples.push(coloring.to_string());
        }
        let legal = round_best >= t;
        rounds.push(SearchRound { t, iterations, samples, best_cut: round_best, legal });
        if legal {
            lo = t + 1;
        } else {
            hi = t - 1;
        }
    }
    let (best_cut, coloring) = best.expect("at least one round sampled");
    Ok(SearchOutcome {
        best_coloring: coloring.to_string(),
        best_cut,
        rounds,
    })
}
