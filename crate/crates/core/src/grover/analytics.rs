//! Closed-form single-round analysis of the subdivided oracle.
//!
//! Everything here follows from one observation: starting in the uniform
//! state |s>, the oracle O multiplies each basis state by e^{i k theta}
//! (k = its cut), and diffusion D = 2|s><s| - I sends O|s> to
//! 2<a>|s> - O|s> with <a> = <s|O|s> the average applied phase. After one
//! round the amplitude of a coloring with cut k is therefore
//! (2<a> - e^{i k theta}) / sqrt(N), so per-state probabilities, the
//! success probability, and the best theta all reduce to the cut
//! histogram.

use num_complex::Complex64;
use serde::Serialize;

use crate::graph::Graph;
use crate::Result;

/// Which oracle the average is taken over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleKind {
    /// Subdivided phase e^{i k theta}.
    Phase,
    /// Binary sign (-1 for cut >= t, +1 below).
    Exact { t: u64 },
}

/// Mean applied phase over the whole register.
///
/// The mean is the same over the full space and over the reduced
/// (virtual-vertex) space, because complementary colorings share a cut.
pub fn alpha_avg(graph: &Graph, theta: f64, kind: OracleKind) -> Result<Complex64> {
    let hist = graph.cut_histogram()?;
    let n = 2f64.powi(graph.n() as i32);
    match kind {
        OracleKind::Phase => {
            let mut sum = Complex64::new(0.0, 0.0);
            for (k, &count) in hist.iter().enumerate() {
                sum += Complex64::from_polar(count as f64, theta * k as f64);
            }
            Ok(sum / n)
        }
        OracleKind::Exact { t } => {
            let marked = graph.count_cut_at_least(t as usize)? as f64;
            Ok(Complex64::new((n - 2.0 * marked) / n, 0.0))
        }
    }
}

/// |2<a> - e^{i k_max theta}|: the one-round amplitude gain on a maximum
/// cut relative to uniform sampling.
pub fn amplitude_factor(graph: &Graph, theta: f64) -> Result<f64> {
    let k_max = graph.brute_force_maxcut()?.value;
    let alpha = alpha_avg(graph, theta, OracleKind::Phase)?;
    Ok((2.0 * alpha - Complex64::from_polar(1.0, theta * k_max as f64)).norm())
}

/// Probability of measuring one specific coloring with cut `k` after one
/// oracle + diffusion round from uniform.
pub fn one_round_state_probability(graph: &Graph, theta: f64, k: usize) -> Result<f64> {
    let alpha = alpha_avg(graph, theta, OracleKind::Phase)?;
    let amp = 2.0 * alpha - Complex64::from_polar(1.0, theta * k as f64);
    Ok(amp.norm_sqr() / 2f64.powi(graph.n() as i32))
}

/// Total probability over every maximum-cut coloring after one round.
///
/// Counted over the full space; the reduced register gives the same number
/// because both the state count and the space halve.
pub fn success_probability(graph: &Graph, theta: f64) -> Result<f64> {
    let maxcut = graph.brute_force_maxcut()?;
    let per_state = one_round_state_probability(graph, theta, maxcut.value)?;
    Ok(per_state * maxcut.colorings.len() as f64)
}

/// The subdivided-phase plan for a graph.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaPlan {
    /// Unit phase pi / |E|.
    pub theta0: f64,
    pub theta_opt: f64,
    pub k_max: usize,
    /// Amplitude factor at `theta_opt`.
    pub factor: f64,
    pub p_theta0: f64,
    pub p_opt: f64,
    /// Maximum-cut colorings in the full space; the reduced register holds
    /// half of them.
    pub solutions_full: usize,
}

/// Grid search for the theta maximizing the amplitude factor, refined
/// locally to 1e-7.
pub fn optimize_theta(graph: &Graph) -> Result<ThetaPlan> {
    let maxcut = graph.brute_force_maxcut()?;
    if graph.edge_count() == 0 {
        return Err(crate::Error::arg("theta plan needs at least one edge"));
    }
    let hist = graph.cut_histogram()?;
    let n = 2f64.powi(graph.n() as i32);
    let k_max = maxcut.value;
    let factor_at = |theta: f64| -> f64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, &count) in hist.iter().enumerate() {
            sum += Complex64::from_polar(count as f64, theta * k as f64);
        }
        let alpha = sum / n;
        (2.0 * alpha - Complex64::from_polar(1.0, theta * k_max as f64)).norm()
    };

    let step = std::f64::consts::PI * 1e-4;
    let mut best = (step, factor_at(step));
    let mut theta = 2.0 * step;
    while theta < std::f64::consts::PI {
        let f = factor_at(theta);
        if f > best.1 {
            best = (theta, f);
        }
        theta += step;
    }
    // Golden-section refinement on the bracketing interval.
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let mut c = b - golden * (b - a);
    let mut d = a + golden * (b - a);
    let (mut fc, mut fd) = (factor_at(c), factor_at(d));
    while b - a > 1e-8 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = factor_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = factor_at(d);
        }
    }
    let theta_opt = 0.5 * (a + b);
    let theta0 = std::f64::consts::PI / graph.edge_count() as f64;
    Ok(ThetaPlan {
        theta0,
        theta_opt,
        k_max,
        factor: factor_at(theta_opt),
        p_theta0: success_probability(graph, theta0)?,
        p_opt: success_probability(graph, theta_opt)?,
        solutions_full: maxcut.colorings.len(),
    })
}

/// `points` samples of (theta, success probability) with theta running
/// linearly from 0 to pi inclusive.
pub fn theta_sweep(graph: &Graph, points: usize) -> Result<Vec<(f64, f64)>> {
    if points < 2 {
        return Err(crate::Error::arg("sweep needs at least two points"));
    }
    (0..points)
        .map(|i| {
            let theta = std::f64::consts::PI * i as f64 / (points - 1) as f64;
            Ok((theta, success_probability(graph, theta)?))
        })
        .collect()
}
