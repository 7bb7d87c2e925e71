//! Undirected simple graphs and exhaustive cut statistics.
//!
//! Vertices are `0..n`. A two-coloring is a bit per vertex; the cut value of
//! a coloring is the number of edges whose endpoints differ. Everything here
//! is desk scale: the brute-force routines enumerate all `2^n` colorings and
//! refuse to run past `n = 30`.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

use crate::{Error, Result};

/// Hard ceiling for exhaustive enumeration.
const MAX_BRUTE_FORCE_VERTICES: usize = 30;

/// An undirected simple graph with vertices `0..n`.
///
/// Serialized form is `{"n": 5, "edges": [[0,1],[1,2]]}`. Edges are stored
/// with the smaller endpoint first and sorted, so two graphs with the same
/// edge set compare equal regardless of input order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = Error;
    fn try_from(r: GraphRepr) -> Result<Graph> {
        Graph::new(r.n, &r.edges)
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> GraphRepr {
        GraphRepr { n: g.n, edges: g.edges }
    }
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges, and endpoints
    /// outside `0..n`.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::arg(format!(
                    "edge ({u},{v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::arg(format!("self-loop at vertex {u}")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::arg(format!("duplicate edge ({},{})", key.0, key.1)));
            }
        }
        let edges: Vec<_> = seen.into_iter().collect();
        Ok(Graph { n, edges })
    }

    /// Star graph `K_{1,k}`: vertex 0 is the center, vertices `1..=k` leaves.
    pub fn star(k: usize) -> Result<Graph> {
        if k == 0 {
            return Err(Error::arg("star needs at least one leaf"));
        }
        let edges: Vec<_> = (1..=k).map(|v| (0, v)).collect();
        Graph::new(k + 1, &edges)
    }

    /// Path on `n` vertices (`n-1` edges).
    pub fn path(n: usize) -> Result<Graph> {
        if n < 2 {
            return Err(Error::arg("path needs at least two vertices"));
        }
        let edges: Vec<_> = (0..n - 1).map(|v| (v, v + 1)).collect();
        Graph::new(n, &edges)
    }

    /// Cycle on `n` vertices.
    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(Error::arg("cycle needs at least three vertices"));
        }
        let mut edges: Vec<_> = (0..n - 1).map(|v| (v, v + 1)).collect();
        edges.push((n - 1, 0));
        Graph::new(n, &edges)
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Result<Graph> {
        if n < 2 {
            return Err(Error::arg("complete graph needs at least two vertices"));
        }
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::new(n, &edges)
    }

    /// Parses a named constructor: `k13`, `k14`, `k1n:<leaves>`, `path:<n>`,
    /// `cycle:<n>`, `complete:<n>`.
    pub fn from_name(name: &str) -> Result<Graph> {
        let parse = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| Error::arg(format!("bad size in graph name {name:?}")))
        };
        match name {
            "k13" => Graph::star(3),
            "k14" => Graph::star(4),
            "k2" => Graph::complete(2),
            "k3" => Graph::complete(3),
            _ => {
                if let Some(rest) = name.strip_prefix("k1n:") {
                    Graph::star(parse(rest)?)
                } else if let Some(rest) = name.strip_prefix("path:") {
                    Graph::path(parse(rest)?)
                } else if let Some(rest) = name.strip_prefix("cycle:") {
                    Graph::cycle(parse(rest)?)
                } else if let Some(rest) = name.strip_prefix("complete:") {
                    Graph::complete(parse(rest)?)
                } else {
                    Err(Error::arg(format!("unknown graph name {name:?}")))
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// A vertex of maximum degree (the smallest index among ties).
    pub fn max_degree_vertex(&self) -> usize {
        (0..self.n).max_by_key(|&v| (self.degree(v), std::cmp::Reverse(v))).unwrap_or(0)
    }

    /// True when every vertex is reachable from vertex 0 (single component).
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                let w = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// True when the star fast path applies: one center adjacent to all other
    /// vertices and no other edges.
    pub fn is_star(&self) -> Option<usize> {
        if self.n < 2 || self.edges.len() != self.n - 1 {
            return None;
        }
        let center = self.max_degree_vertex();
        if self.degree(center) != self.n - 1 {
            return None;
        }
        Some(center)
    }

    /// Cut value of a coloring: the number of edges with differently colored
    /// endpoints.
    pub fn cut_value(&self, coloring: &Coloring) -> Result<usize> {
        if coloring.len() != self.n {
            return Err(Error::arg(format!(
                "coloring has {} bits, graph has {} vertices",
                coloring.len(),
                self.n
            )));
        }
        Ok(self.cut_of_mask(coloring.mask()))
    }

    fn cut_of_mask(&self, mask: u64) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| ((mask >> u) ^ (mask >> v)) & 1 == 1)
            .count()
    }

    fn check_brute_force_size(&self) -> Result<()> {
        if self.n > MAX_BRUTE_FORCE_VERTICES {
            return Err(Error::ResourceLimit(format!(
                "exhaustive cut enumeration asked for {} vertices (limit {})",
                self.n, MAX_BRUTE_FORCE_VERTICES
            )));
        }
        Ok(())
    }

    /// Exhaustive maximum cut: the maximum value and every coloring achieving
    /// it. The argmax set always has even size because complementing a
    /// coloring preserves its cut.
    pub fn brute_force_maxcut(&self) -> Result<MaxCut> {
        self.check_brute_force_size()?;
        let mut best = 0usize;
        let mut argmax = Vec::new();
        for mask in 0..(1u64 << self.n) {
            let cut = self.cut_of_mask(mask);
            if cut > best {
                best = cut;
                argmax.clear();
            }
            if cut == best {
                argmax.push(Coloring::from_mask(mask, self.n));
            }
        }
        Ok(MaxCut { value: best, colorings: argmax })
    }

    /// Histogram of cut values over all `2^n` colorings. Entry `k` counts the
    /// colorings with cut exactly `k`; entries sum to `2^n`.
    pub fn cut_histogram(&self) -> Result<Vec<u64>> {
        self.check_brute_force_size()?;
        let mut hist = vec![0u64; self.edges.len() + 1];
        for mask in 0..(1u64 << self.n) {
            hist[self.cut_of_mask(mask)] += 1;
        }
        Ok(hist)
    }

    /// Number of colorings with cut value at least `t`.
    pub fn count_cut_at_least(&self, t: usize) -> Result<u64> {
        let hist = self.cut_histogram()?;
        Ok(hist.iter().skip(t).sum())
    }
}

/// Result of [`Graph::brute_force_maxcut`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxCut {
    pub value: usize,
    pub colorings: Vec<Coloring>,
}

/// A two-coloring of vertices, one bit per vertex.
///
/// Bit `i` is vertex `i`'s color. Displayed with vertex 0 leftmost, matching
/// the crate-wide bitstring convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coloring {
    mask: u64,
    len: usize,
}

impl Coloring {
    pub fn from_mask(mask: u64, len: usize) -> Coloring {
        assert!(len <= 64, "coloring too wide");
        let mask = if len == 64 { mask } else { mask & ((1u64 << len) - 1) };
        Coloring { mask, len }
    }

    /// Parses a bitstring with vertex 0 leftmost, e.g. `"0111"`.
    pub fn parse(s: &str) -> Result<Coloring> {
        let mut mask = 0u64;
        let mut len = 0usize;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => mask |= 1 << i,
                _ => return Err(Error::arg(format!("bad coloring character {c:?}"))),
            }
            len = i + 1;
        }
        if len == 0 || len > 64 {
            return Err(Error::arg("coloring must have 1..=64 bits"));
        }
        Ok(Coloring { mask, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn bit(&self, v: usize) -> bool {
        (self.mask >> v) & 1 == 1
    }

    /// The complementary coloring (all bits flipped).
    pub fn complement(&self) -> Coloring {
        Coloring::from_mask(!self.mask, self.len)
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in 0..self.len {
            write!(f, "{}", if self.bit(v) { '1' } else { '0' })?;
        }
        Ok(())
    }
}
