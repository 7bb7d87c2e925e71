//! Measurement-error mitigation and feasibility analytics.
//!
//! The calibration model is `c_noisy = M c_ideal` with M a confusion matrix
//! whose column j is the observed distribution after preparing basis state
//! j. Undoing it never inverts M directly (M need not be invertible):
//! mitigation solves the constrained least squares
//! `min ||M p - raw||_2  s.t.  p >= 0, sum p = 1` by projected gradient on
//! the probability simplex.

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::sim::{run_noisy, Distribution, NoiseModel};
use crate::{Error, Result};

/// Largest register a calibration matrix is built for (2^n x 2^n entries).
pub const MAX_CALIBRATION_QUBITS: usize = 10;

/// A measured confusion matrix. `columns[j][i]` is the probability of
/// reading outcome `i` when basis state `j` was prepared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CalibrationRepr", into = "CalibrationRepr")]
pub struct CalibrationMatrix {
    n_qubits: usize,
    columns: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct CalibrationRepr {
    n_qubits: usize,
    columns: Vec<Vec<f64>>,
}

impl TryFrom<CalibrationRepr> for CalibrationMatrix {
    type Error = Error;
    fn try_from(r: CalibrationRepr) -> Result<CalibrationMatrix> {
        CalibrationMatrix::new(r.n_qubits, r.columns)
    }
}

impl From<CalibrationMatrix> for CalibrationRepr {
    fn from(m: CalibrationMatrix) -> CalibrationRepr {
        CalibrationRepr { n_qubits: m.n_qubits, columns: m.columns }
    }
}

impl CalibrationMatrix {
    /// Wraps raw columns, checking shape and that each column is a
    /// distribution (entries >= 0, sum 1 within 1e-9).
    pub fn new(n_qubits: usize, columns: Vec<Vec<f64>>) -> Result<CalibrationMatrix> {
        let dim = 1usize << n_qubits;
        if columns.len() != dim {
            return Err(Error::arg(format!(
                "calibration matrix needs {dim} columns, got {}",
                columns.len()
            )));
        }
        for (j, col) in columns.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::arg(format!("column {j} has length {}", col.len())));
            }
            if col.iter().any(|&x| x < 0.0 || !x.is_finite()) {
                return Err(Error::arg(format!("column {j} has a negative or non-finite entry")));
            }
            let sum: f64 = col.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::arg(format!("column {j} sums to {sum}, not 1")));
            }
        }
        Ok(CalibrationMatrix { n_qubits, columns })
    }

    pub fn identity(n_qubits: usize) -> CalibrationMatrix {
        let dim = 1usize << n_qubits;
        let columns = (0..dim)
            .map(|j| {
                let mut col = vec![0.0; dim];
                col[j] = 1.0;
                col
            })
            .collect();
        CalibrationMatrix { n_qubits, columns }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.columns[col][row]
    }

    /// M p for a probability vector p.
    fn apply(&self, p: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        let mut out = vec![0.0; dim];
        for (j, col) in self.columns.iter().enumerate() {
            let pj = p[j];
            if pj != 0.0 {
                for i in 0..dim {
                    out[i] += col[i] * pj;
                }
            }
        }
        out
    }

    /// M^T v.
    fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        self.columns.iter().map(|col| col.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Builds M by preparing each basis state and measuring under `noise`.
///
/// The preparation X gates are treated as noiseless so the matrix isolates
/// measurement error; only the per-qubit readout flips act. Deterministic
/// for a fixed seed. Use [`build_calibration_matrix_with_gates`] to let the
/// preparation gates suffer gate noise too.
pub fn build_calibration_matrix(
    noise: &NoiseModel,
    n_qubits: usize,
    shots: u64,
    seed: u64,
) -> Result<CalibrationMatrix> {
    let readout_only = NoiseModel {
        u2_error: Vec::new(),
        u3_error: Vec::new(),
        readout_error: noise.readout_error.clone(),
        cx_error: std::collections::BTreeMap::new(),
    };
    calibrate(&readout_only, n_qubits, shots, seed)
}

/// Same measurement as [`build_calibration_matrix`] but with the full noise
/// model active during state preparation.
pub fn build_calibration_matrix_with_gates(
    noise: &NoiseModel,
    n_qubits: usize,
    shots: u64,
    seed: u64,
) -> Result<CalibrationMatrix> {
    calibrate(noise, n_qubits, shots, seed)
}

fn calibrate(
    noise: &NoiseModel,
    n_qubits: usize,
    shots: u64,
    seed: u64,
) -> Result<CalibrationMatrix> {
    if n_qubits == 0 || n_qubits > MAX_CALIBRATION_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "calibration supports 1..={MAX_CALIBRATION_QUBITS} qubits, got {n_qubits}"
        )));
    }
    if shots == 0 {
        return Err(Error::arg("calibration needs at least one shot"));
    }
    let dim = 1usize << n_qubits;
    let mut columns = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut prep = Circuit::new(n_qubits);
        for q in 0..n_qubits {
            if j >> q & 1 == 1 {
                prep.push(crate::circuit::Gate::x(q));
            }
        }
        let col_seed = seed ^ (j as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let counts = run_noisy(&prep, noise, shots, col_seed)?;
        columns.push(counts.to_distribution(n_qubits)?.probs().to_vec());
    }
    CalibrationMatrix::new(n_qubits, columns)
}

/// Outcome of one mitigation solve.
#[derive(Debug, Clone, Serialize)]
pub struct MitigatedResult {
    pub raw: Distribution,
    pub mitigated: Distribution,
    /// `||M p - raw||_2` at the solution.
    pub residual: f64,
    /// Set when M looks ill-conditioned or the solver hit its iteration
    /// cap; the constrained solution is still returned.
    pub warning: Option<String>,
}

/// Solves `min ||M p - raw||_2` over the probability simplex.
///
/// Projected gradient with a Lipschitz step from a power-iteration estimate
/// of ||M||_2^2. Never inverts M.
pub fn mitigate(matrix: &CalibrationMatrix, raw: &Distribution) -> Result<MitigatedResult> {
    let dim = matrix.dim();
    if raw.probs().len() != dim {
        return Err(Error::arg(format!(
            "distribution over {} outcomes does not match a {dim}-dim calibration matrix",
            raw.probs().len()
        )));
    }
    let target = raw.probs().to_vec();

    // Largest singular value squared, for the gradient step size.
    let mut v = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut sigma_sq = 1.0f64;
    for _ in 0..50 {
        let w = matrix.apply_transpose(&matrix.apply(&v));
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-300 {
            break;
        }
        sigma_sq = norm;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
    }
    let step = 1.0 / (2.0 * sigma_sq.max(1e-12));

    let mut p = target.clone();
    project_simplex(&mut p);
    let max_iters = 20_000;
    let mut converged = false;
    for _ in 0..max_iters {
        let residual_vec: Vec<f64> =
            matrix.apply(&p).iter().zip(&target).map(|(a, b)| a - b).collect();
        let grad = matrix.apply_transpose(&residual_vec);
        let mut next: Vec<f64> =
            p.iter().zip(&grad).map(|(pi, gi)| pi - 2.0 * step * gi).collect();
        project_simplex(&mut next);
        let moved: f64 =
            next.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        p = next;
        if moved < 1e-13 {
            converged = true;
            break;
        }
    }

    let residual = matrix
        .apply(&p)
        .iter()
        .zip(&target)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let min_diag = (0..dim).map(|i| matrix.entry(i, i)).fold(f64::INFINITY, f64::min);
    let warning = if min_diag < 0.1 {
        Some(format!("calibration matrix is ill-conditioned (diagonal entry {min_diag:.3})"))
    } else if !converged {
        Some(format!("solver stopped at the {max_iters}-iteration cap"))
    } else {
        None
    };

    Ok(MitigatedResult {
        raw: raw.clone(),
        mitigated: Distribution::from_probs(matrix.n_qubits, p)?,
        residual,
        warning,
    })
}

/// Euclidean projection onto `{p : p >= 0, sum p = 1}`.
fn project_simplex(v: &mut [f64]) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cum += u;
        let candidate = (cum - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            tau = candidate;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - tau).max(0.0);
    }
}

/// KL divergence in both common bases.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KlDivergence {
    pub nats: f64,
    pub bits: f64,
}

/// `sum p_i log(p_i / q_i)` with additive smoothing `1e-9` on zero entries
/// of q. Clamped at zero: the smoothing can otherwise push an exact match
/// a rounding error below it.
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<KlDivergence> {
    if p.probs().len() != q.probs().len() {
        return Err(Error::arg("KL divergence needs matching outcome spaces"));
    }
    const EPS: f64 = 1e-9;
    let mut nats = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi > 0.0 {
            let q_smoothed = if qi > 0.0 { qi } else { EPS };
            nats += pi * (pi / q_smoothed).ln();
        }
    }
    let nats = nats.max(0.0);
    Ok(KlDivergence { nats, bits: nats / std::f64::consts::LN_2 })
}

/// The `m d < 1/eps_eff` feasibility check for a circuit under a noise
/// model, with the inputs it was made from.
#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    /// Touched qubits.
    pub m: usize,
    /// Two-qubit depth.
    pub d: usize,
    pub md: usize,
    pub eps_eff: f64,
    /// None when the effective error rate is zero (always feasible).
    pub inv_eps_eff: Option<f64>,
    pub feasible: bool,
}

/// Evaluates the noise budget `m * d` against `1/eps_eff`, with `eps_eff`
/// the mean CX error over the coupled pairs the circuit uses. The boundary
/// `m * d = 1/eps_eff` counts as infeasible.
pub fn feasibility_report(circuit: &Circuit, noise: &NoiseModel) -> Result<FeasibilityReport> {
    let m = circuit.touched_qubits().len();
    let d = circuit.two_qubit_depth();
    let md = m * d;
    let eps_eff = noise.effective_cx_rate(circuit);
    let (inv, feasible) = if eps_eff == 0.0 {
        (None, true)
    } else {
        let inv = 1.0 / eps_eff;
        (Some(inv), (md as f64) < inv)
    };
    Ok(FeasibilityReport { m, d, md, eps_eff, inv_eps_eff: inv, feasible })
}
