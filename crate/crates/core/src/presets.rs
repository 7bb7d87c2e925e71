//! Named noise models and coupling maps.
//!
//! Two 5-qubit calibration snapshots ship as noise presets a and b, both on
//! the same T-shaped coupling map ("t5"). Topology presets also include
//! plain lines and "tree-embed:<n>": the exact interaction tree the n-data-
//! qubit diffusion needs, numbered so the solver's wire order is already a
//! valid placement (data wires first, then the ancilla spine).

use std::collections::BTreeMap;

use crate::sim::NoiseModel;
use crate::topology::Topology;
use crate::{Error, Result};

/// Noise preset names understood by [`noise_preset`].
pub const NOISE_PRESETS: [&str; 2] = ["preset-a", "preset-b"];

/// Looks up a noise model by preset name.
///
/// `preset-a` and `preset-b` are 5-qubit device calibration tables (per
/// qubit U2/U3/readout error, per coupled pair CX error) for the "t5" map.
pub fn noise_preset(name: &str) -> Result<NoiseModel> {
    let model = match name {
        "preset-a" => NoiseModel {
            u2_error: vec![3.04e-4, 3.32e-4, 3.67e-4, 3.79e-4, 3.77e-4],
            u3_error: vec![6.09e-4, 6.63e-4, 7.33e-4, 7.58e-4, 7.53e-4],
            readout_error: vec![1.80e-2, 2.80e-2, 2.80e-2, 3.40e-2, 4.90e-2],
            cx_error: cx_table(&[
                ((0, 1), 7.22e-3),
                ((1, 2), 9.55e-3),
                ((1, 3), 1.34e-2),
                ((3, 4), 7.35e-3),
            ]),
        },
        "preset-b" => NoiseModel {
            u2_error: vec![5.31e-4, 3.35e-4, 5.51e-4, 3.22e-4, 4.26e-4],
            u3_error: vec![1.06e-3, 6.70e-4, 1.10e-3, 6.45e-4, 8.52e-4],
            readout_error: vec![2.75e-2, 4.13e-2, 2.50e-2, 2.50e-2, 4.00e-2],
            cx_error: cx_table(&[
                ((0, 1), 7.67e-3),
                ((1, 2), 9.62e-3),
                ((1, 3), 1.13e-2),
                ((3, 4), 7.71e-3),
            ]),
        },
        "noiseless" | "none" => NoiseModel::noiseless(),
        other => {
            return Err(Error::arg(format!(
                "unknown noise preset '{other}' (try preset-a, preset-b, noiseless)"
            )))
        }
    };
    model.validate()?;
    Ok(model)
}

fn cx_table(rows: &[((usize, usize), f64)]) -> BTreeMap<(usize, usize), f64> {
    rows.iter().copied().collect()
}

/// Looks up a coupling map by preset name: `t5`, `line:<n>`, or
/// `tree-embed:<n>` with n the number of data qubits.
pub fn topology_preset(name: &str) -> Result<Topology> {
    if name == "t5" {
        return Ok(Topology::t5());
    }
    if let Some(rest) = name.strip_prefix("line:") {
        let n = parse_count(rest, name)?;
        return Topology::line(n);
    }
    if let Some(rest) = name.strip_prefix("tree-embed:") {
        let n = parse_count(rest, name)?;
        return tree_embed(n);
    }
    Err(Error::arg(format!(
        "unknown topology preset '{name}' (try t5, line:<n>, tree-embed:<n>)"
    )))
}

fn parse_count(text: &str, name: &str) -> Result<usize> {
    text.parse::<usize>()
        .map_err(|_| Error::arg(format!("preset '{name}' needs an integer parameter")))
}

/// The diffusion interaction tree for `n_data` data qubits.
///
/// Wires 0..n are the data register and n..2n-3 the ancilla spine, mirroring
/// the solver's numbering. Edges: data 0 and 1 hang off the first ancilla,
/// each later ancilla picks up the next data qubit, and the last two data
/// qubits chain off the end of the spine. For n = 4 this is the T shape
/// ("t5" up to relabeling); below 4 no ancillas exist and the tree is a line.
pub fn tree_embed(n_data: usize) -> Result<Topology> {
    if n_data == 0 {
        return Err(Error::arg("tree-embed needs at least one data qubit"));
    }
    if n_data <= 3 {
        return Topology::line(n_data);
    }
    let n = n_data;
    let a = |k: usize| n + k;
    let mut edges = vec![(0, a(0)), (1, a(0))];
    for k in 0..n.saturating_sub(4) {
        edges.push((a(k), a(k + 1)));
        edges.push((k + 2, a(k + 1)));
    }
    edges.push((n - 2, a(n - 4)));
    edges.push((n - 2, n - 1));
    Topology::new(2 * n - 3, &edges)
}
