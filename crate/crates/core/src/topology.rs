//! Hardware coupling maps and validation.
//!
//! A topology is an undirected coupling graph over physical qubits. Checking
//! is validate-only: a circuit either fits (every CX lands on a coupled pair,
//! in either direction) or the violating gates are reported. No routing is
//! attempted.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

use crate::circuit::{Circuit, Gate};
use crate::{Error, Result};

/// An undirected coupling map. Serialized as `{"n": 5, "edges": [[0,1],...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TopologyRepr", into = "TopologyRepr")]
pub struct Topology {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct TopologyRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<TopologyRepr> for Topology {
    type Error = Error;
    fn try_from(r: TopologyRepr) -> Result<Topology> {
        Topology::new(r.n, &r.edges)
    }
}

impl From<Topology> for TopologyRepr {
    fn from(t: Topology) -> TopologyRepr {
        TopologyRepr { n: t.n, edges: t.edges.into_iter().collect() }
    }
}

impl Topology {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Topology> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::arg(format!(
                    "coupling ({a},{b}) has an endpoint outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::arg(format!("coupling self-loop at {a}")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Topology { n, edges: set })
    }

    /// Linear chain of `n` qubits.
    pub fn line(n: usize) -> Result<Topology> {
        if n < 2 {
            return Err(Error::arg("line topology needs at least two qubits"));
        }
        let edges: Vec<_> = (0..n - 1).map(|q| (q, q + 1)).collect();
        Topology::new(n, &edges)
    }

    /// The 5-qubit T-shaped device layout: couplings (0,1), (1,2), (1,3),
    /// (3,4).
    pub fn t5() -> Topology {
        Topology::new(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// All CX gates that do not sit on a coupled pair. Empty means the
    /// circuit fits. Macros are rejected because their CX footprint is not
    /// known until lowering.
    pub fn check(&self, circuit: &Circuit) -> Result<Vec<Violation>> {
        if circuit.has_macros() {
            return Err(Error::InvalidCircuit(
                "topology check needs a lowered circuit; macros present".into(),
            ));
        }
        if circuit.n_qubits > self.n {
            return Err(Error::arg(format!(
                "circuit uses {} qubits, topology has {}",
                circuit.n_qubits, self.n
            )));
        }
        let mut violations = Vec::new();
        for (i, g) in circuit.gates.iter().enumerate() {
            if let Gate::Cx { c, t } = g {
                if !self.has_edge(*c, *t) {
                    violations.push(Violation { gate_index: i, control: *c, target: *t });
                }
            }
        }
        Ok(violations)
    }

    /// Errors with the violating gate list unless the circuit fits.
    pub fn validate(&self, circuit: &Circuit) -> Result<()> {
        let violations = self.check(circuit)?;
        if violations.is_empty() {
            return Ok(());
        }
        let listed: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        Err(Error::SynthesisFailure(format!(
            "{} CX gate(s) off the coupling map: {}",
            listed.len(),
            listed.join(", ")
        )))
    }
}

/// A CX that does not sit on a coupled pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub gate_index: usize,
    pub control: usize,
    pub target: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gate {} cx({},{})", self.gate_index, self.control, self.target)
    }
}
