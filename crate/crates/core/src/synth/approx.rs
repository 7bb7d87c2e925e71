//! Two-CX approximation of the edge phase term.
//!
//! The exact sub-oracle costs four CX. A generic two-qubit ansatz with two
//! CX covers enough of SU(4) to hit the diagonal target
//! diag(1, e^{i·theta}, e^{i·theta}, 1) to better than 99% fidelity, and in
//! fact exactly: conjugating a lone U1(theta) on the low qubit by CX
//! reproduces the diagonal, so the fit has a perfect optimum. The fitter is
//! a multi-start Nelder-Mead over the 16 ansatz parameters; fidelity is the
//! phase-invariant overlap |Tr(T^dag U)| / 4.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate};
use crate::sim::StateVector;
use crate::synth::{distinct, span, Block};
use crate::Result;

const N_PARAMS: usize = 16;
const STARTS: u64 = 16;
const MAX_ITERS: usize = 4000;
const FIT_TOL: f64 = 1e-10;

/// A fitted two-CX block together with how well it matched.
#[derive(Debug, Clone)]
pub struct ApproxOracle {
    pub block: Block,
    /// |Tr(T^dag U)| / 4 against the exact edge phase.
    pub fidelity: f64,
    pub params: [f64; N_PARAMS],
}

fn ansatz(params: &[f64]) -> Circuit {
    let p = params;
    let mut c = Circuit::new(2);
    c.push(Gate::U3 { q: 0, theta: p[0], phi: p[1], lambda: p[2] });
    c.push(Gate::U3 { q: 1, theta: p[3], phi: p[4], lambda: p[5] });
    c.push(Gate::Cx { c: 0, t: 1 });
    c.push(Gate::U1 { q: 0, lambda: p[6] });
    c.push(Gate::U3 { q: 1, theta: p[7], phi: p[8], lambda: p[9] });
    c.push(Gate::Cx { c: 0, t: 1 });
    c.push(Gate::U3 { q: 0, theta: p[10], phi: p[11], lambda: p[12] });
    c.push(Gate::U3 { q: 1, theta: p[13], phi: p[14], lambda: p[15] });
    c
}

/// Overlap of the ansatz at `params` with diag(1, e^it, e^it, 1).
fn fidelity_against_target(params: &[f64], theta: f64) -> f64 {
    let c = ansatz(params);
    let target_diag = [0.0, theta, theta, 0.0];
    let mut trace = Complex64::new(0.0, 0.0);
    for (j, &phase) in target_diag.iter().enumerate() {
        let mut sv = StateVector::basis(2, j).expect("two qubits");
        sv.apply_circuit(&c).expect("basis gates only");
        trace += sv.amps()[j] * Complex64::from_polar(1.0, -phase);
    }
    trace.norm() / 4.0
}

/// Plain Nelder-Mead on `cost`, returning the best vertex found.
fn nelder_mead(
    cost: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), cost(x0)));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        let f = cost(&v);
        simplex.push((v, f));
    }
    for _ in 0..MAX_ITERS {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[n].1);
        if best < 1e-13 || worst - best < FIT_TOL * 1e-2 {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|(v, _)| v[d]).sum::<f64>() / n as f64)
            .collect();
        let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
        };
        let reflected = lerp(&centroid, &simplex[n].0, -1.0);
        let fr = cost(&reflected);
        if fr < simplex[0].1 {
            let expanded = lerp(&centroid, &simplex[n].0, -2.0);
            let fe = cost(&expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }
        let contracted = if fr < simplex[n].1 {
            lerp(&centroid, &simplex[n].0, -0.5)
        } else {
            lerp(&centroid, &simplex[n].0, 0.5)
        };
        let fc = cost(&contracted);
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (contracted, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            entry.0 = lerp(&anchor, &entry.0, 0.5);
            entry.1 = cost(&entry.0);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

/// Fits the 16-parameter two-CX ansatz to the edge phase at `theta`.
///
/// Start 0 is the analytic seed (a bare U1 between the CXs), the remaining
/// starts are random; the search stops early once a start converges to the
/// exact optimum. Deterministic for a fixed seed.
pub fn fit_sub_oracle(theta: f64, seed: u64) -> ApproxOracle {
    let cost = |p: &[f64]| 1.0 - fidelity_against_target(p, theta);

    let mut warm = [0.0; N_PARAMS];
    warm[8] = theta;

    let mut best_params = warm.to_vec();
    let mut best_cost = cost(&best_params);
    for start in 0..=STARTS {
        let x0: Vec<f64> = if start == 0 {
            warm.to_vec()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(start);
            (0..N_PARAMS)
                .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect()
        };
        let (x, f) = nelder_mead(&cost, &x0, 0.3);
        if f < best_cost {
            best_cost = f;
            best_params = x;
        }
        if best_cost < 1e-12 {
            break;
        }
    }

    let mut params = [0.0; N_PARAMS];
    params.copy_from_slice(&best_params);
    let fidelity = fidelity_against_target(&params, theta);
    let block = Block::new(ansatz(&params), format!("approx-edge-phase({theta})"));
    ApproxOracle { block, fidelity, params }
}

/// [`fit_sub_oracle`] placed on qubits `(a, b)`.
pub fn sub_oracle_approx(a: usize, b: usize, theta: f64, seed: u64) -> Result<ApproxOracle> {
    distinct(&[a, b], "sub_oracle_approx")?;
    let fitted = fit_sub_oracle(theta, seed);
    let width = span(&[a, b]);
    let circuit = fitted.block.circuit.remap(&[a, b], width)?;
    Ok(ApproxOracle {
        block: Block::new(circuit, fitted.block.semantic.clone()),
        fidelity: fitted.fidelity,
        params: fitted.params,
    })
}
