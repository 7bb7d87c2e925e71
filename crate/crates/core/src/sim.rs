//! Dense statevector simulation, sampling, and stochastic Pauli noise.
//!
//! Qubit `q` is bit `q` of the basis-state index (qubit 0 = least
//! significant). Printed bitstrings list qubit 0 leftmost, so index 6 on
//! three qubits prints as `"011"`.
//!
//! The noise model is trajectory based: after every gate with a nonzero
//! error rate a uniformly random non-identity Pauli (3 choices for a
//! single-qubit gate, 15 for CX) is applied with that probability, and
//! measurement flips each readout bit independently. Every shot consumes an
//! independent, reproducible random substream derived from `(seed, shot)`,
//! so results are bit-identical across runs and insensitive to shot order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::circuit::{Circuit, Gate};
use crate::{Error, Result};

/// Dense amplitudes over `2^n` basis states.
#[derive(Debug, Clone)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Simulation refuses registers beyond this width (`2^24` amplitudes).
const MAX_SIM_QUBITS: usize = 24;

/// Per-shot random substream: one ChaCha8 keyed by the seed, with the shot
/// index as the stream nonce.
pub(crate) fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// Renders a basis-state index with qubit 0 leftmost.
pub fn bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits).map(|q| if (index >> q) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Inverse of [`bitstring`].
pub fn bitstring_index(s: &str) -> Result<(usize, usize)> {
    let mut index = 0usize;
    let mut n = 0usize;
    for (i, c) in s.chars().enumerate() {
        match c {
            '0' => {}
            '1' => index |= 1 << i,
            _ => return Err(Error::arg(format!("bad bitstring character {c:?}"))),
        }
        n = i + 1;
    }
    if n == 0 {
        return Err(Error::arg("empty bitstring"));
    }
    Ok((index, n))
}

/// The 2x2 matrix of a single-qubit gate, `None` for CX and macros.
pub fn single_qubit_matrix(gate: &Gate) -> Option<[[Complex64; 2]; 2]> {
    let u3 = |theta: f64, phi: f64, lambda: f64| {
        let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        [
            [Complex64::new(ct, 0.0), -Complex64::from_polar(st, lambda)],
            [Complex64::from_polar(st, phi), Complex64::from_polar(ct, lambda + phi)],
        ]
    };
    match *gate {
        Gate::U1 { lambda, .. } => Some([
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, lambda)],
        ]),
        Gate::U2 { phi, lambda, .. } => Some(u3(std::f64::consts::FRAC_PI_2, phi, lambda)),
        Gate::U3 { theta, phi, lambda, .. } => Some(u3(theta, phi, lambda)),
        _ => None,
    }
}

impl StateVector {
    /// `|0...0>` on `n_qubits` wires.
    pub fn zero(n_qubits: usize) -> Result<StateVector> {
        if n_qubits > MAX_SIM_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "statevector on {n_qubits} qubits exceeds the {MAX_SIM_QUBITS}-qubit ceiling"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<StateVector> {
        let mut sv = StateVector::zero(n_qubits)?;
        if index >= sv.amps.len() {
            return Err(Error::arg(format!("basis index {index} out of range")));
        }
        sv.amps[0] = Complex64::new(0.0, 0.0);
        sv.amps[index] = Complex64::new(1.0, 0.0);
        Ok(sv)
    }

    /// Uniform superposition `H^n |0>`.
    pub fn uniform(n_qubits: usize) -> Result<StateVector> {
        let mut sv = StateVector::zero(n_qubits)?;
        let a = Complex64::new(1.0 / ((1usize << n_qubits) as f64).sqrt(), 0.0);
        sv.amps.fill(a);
        Ok(sv)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn apply_matrix(&mut self, q: usize, m: &[[Complex64; 2]; 2]) {
        let stride = 1usize << q;
        let size = self.amps.len();
        let mut base = 0;
        while base < size {
            for i in base..base + stride {
                let a0 = self.amps[i];
                let a1 = self.amps[i + stride];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
            base += stride * 2;
        }
    }

    fn apply_cx(&mut self, c: usize, t: usize) {
        let (cb, tb) = (1usize << c, 1usize << t);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    /// Applies one gate. Macros are an error: lower first.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        for q in gate.qubits() {
            if q >= self.n_qubits {
                return Err(Error::InvalidCircuit(format!(
                    "gate touches qubit {q} of a {}-qubit state",
                    self.n_qubits
                )));
            }
        }
        match gate {
            Gate::Cx { c, t } => self.apply_cx(*c, *t),
            Gate::Macro { kind, .. } => {
                return Err(Error::InvalidCircuit(format!(
                    "cannot simulate unlowered macro {}",
                    kind.name()
                )))
            }
            single => {
                let m = single_qubit_matrix(single).expect("single-qubit gate");
                self.apply_matrix(single.qubits()[0], &m);
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits != self.n_qubits {
            return Err(Error::arg(format!(
                "circuit on {} qubits applied to {}-qubit state",
                circuit.n_qubits, self.n_qubits
            )));
        }
        for g in &circuit.gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Measurement probabilities in the computational basis.
    pub fn probabilities(&self) -> Distribution {
        Distribution {
            n_bits: self.n_qubits,
            probs: self.amps.iter().map(|a| a.norm_sqr()).collect(),
        }
    }
}

/// Runs a lowered circuit on `|0...0>`.
pub fn run_ideal(circuit: &Circuit) -> Result<StateVector> {
    let mut sv = StateVector::zero(circuit.n_qubits)?;
    sv.apply_circuit(circuit)?;
    Ok(sv)
}

/// A probability distribution over `2^n` outcomes.
///
/// Serialized as `{"n_bits": n, "probs": {"010": 0.5, ...}}` with exact
/// zeros omitted from the map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRepr", into = "DistributionRepr")]
pub struct Distribution {
    n_bits: usize,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    n_bits: usize,
    probs: BTreeMap<String, f64>,
}

impl TryFrom<DistributionRepr> for Distribution {
    type Error = Error;
    fn try_from(r: DistributionRepr) -> Result<Distribution> {
        let mut probs = vec![0.0; 1usize << r.n_bits];
        for (bits, p) in r.probs {
            let (index, n) = bitstring_index(&bits)?;
            if n != r.n_bits {
                return Err(Error::arg(format!(
                    "outcome '{bits}' has {n} bits, distribution declares {}",
                    r.n_bits
                )));
            }
            probs[index] = p;
        }
        Distribution::from_probs(r.n_bits, probs)
    }
}

impl From<Distribution> for DistributionRepr {
    fn from(d: Distribution) -> DistributionRepr {
        let probs = d
            .probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0.0)
            .map(|(i, &p)| (bitstring(i, d.n_bits), p))
            .collect();
        DistributionRepr { n_bits: d.n_bits, probs }
    }
}

impl Distribution {
    /// Wraps raw probabilities; they must be nonnegative (up to rounding)
    /// and sum to 1 within 1e-9.
    pub fn from_probs(n_bits: usize, probs: Vec<f64>) -> Result<Distribution> {
        if probs.len() != 1usize << n_bits {
            return Err(Error::arg("probability vector length is not 2^n"));
        }
        let mut clean = probs;
        let mut total = 0.0;
        for p in &mut clean {
            if *p < -1e-9 {
                return Err(Error::arg(format!("negative probability {p}")));
            }
            *p = p.max(0.0);
            total += *p;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::arg(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Distribution { n_bits, probs: clean })
    }

    pub fn uniform(n_bits: usize) -> Distribution {
        let len = 1usize << n_bits;
        Distribution { n_bits, probs: vec![1.0 / len as f64; len] }
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn prob_of(&self, bits: &str) -> Result<f64> {
        let (index, n) = bitstring_index(bits)?;
        if n != self.n_bits {
            return Err(Error::arg(format!(
                "bitstring has {n} bits, distribution has {}",
                self.n_bits
            )));
        }
        Ok(self.probs[index])
    }

    /// Marginal distribution over `keep` (output bit `j` = input bit
    /// `keep[j]`), summing out everything else.
    pub fn marginal(&self, keep: &[usize]) -> Result<Distribution> {
        for &q in keep {
            if q >= self.n_bits {
                return Err(Error::arg(format!("marginal bit {q} out of range")));
            }
        }
        let mut probs = vec![0.0; 1 << keep.len()];
        for (i, &p) in self.probs.iter().enumerate() {
            let mut j = 0usize;
            for (out_bit, &q) in keep.iter().enumerate() {
                j |= ((i >> q) & 1) << out_bit;
            }
            probs[j] += p;
        }
        Ok(Distribution { n_bits: keep.len(), probs })
    }

    /// Total variation distance, `0.5 * Σ |p - q|`.
    pub fn tv_distance(&self, other: &Distribution) -> Result<f64> {
        if self.n_bits != other.n_bits {
            return Err(Error::arg("TV distance over mismatched outcome spaces"));
        }
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
            / 2.0)
    }

    /// Inverse-CDF draw: maps a uniform `u` in [0, 1) to an outcome index.
    pub fn sample_index(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.probs.len() - 1
    }

    /// Draws `shots` outcomes; shot `i` uses the substream `(seed, i)`, so
    /// the counts are reproducible and shot-order independent.
    pub fn sample_counts(&self, shots: u64, seed: u64) -> Counts {
        let mut map = BTreeMap::new();
        for shot in 0..shots {
            let mut rng = shot_rng(seed, shot);
            let index = self.sample_index(rng.random::<f64>());
            *map.entry(bitstring(index, self.n_bits)).or_insert(0) += 1;
        }
        Counts { shots, counts: map }
    }
}

/// Measured outcome counts. Serialized as
/// `{"shots": 1024, "counts": {"011": 512, ...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl Counts {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Empirical distribution over `n_bits` outcomes.
    pub fn to_distribution(&self, n_bits: usize) -> Result<Distribution> {
        if self.shots == 0 {
            return Err(Error::arg("cannot normalize zero shots"));
        }
        let mut probs = vec![0.0; 1 << n_bits];
        for (bits, &count) in &self.counts {
            let (index, n) = bitstring_index(bits)?;
            if n != n_bits {
                return Err(Error::arg(format!(
                    "count key {bits:?} has {n} bits, expected {n_bits}"
                )));
            }
            probs[index] += count as f64 / self.shots as f64;
        }
        Distribution::from_probs(n_bits, probs)
    }

    /// Marginal counts over `keep` (same bit-order convention as
    /// [`Distribution::marginal`]).
    pub fn marginal(&self, keep: &[usize]) -> Result<Counts> {
        let mut map: BTreeMap<String, u64> = BTreeMap::new();
        for (bits, &count) in &self.counts {
            let (index, n) = bitstring_index(bits)?;
            for &q in keep {
                if q >= n {
                    return Err(Error::arg(format!("marginal bit {q} out of range")));
                }
            }
            let mut j = 0usize;
            for (out_bit, &q) in keep.iter().enumerate() {
                j |= ((index >> q) & 1) << out_bit;
            }
            *map.entry(bitstring(j, keep.len())).or_insert(0) += count;
        }
        Ok(Counts { shots: self.shots, counts: map })
    }
}

/// Stochastic Pauli noise rates.
///
/// Per-qubit tables index by qubit; a qubit beyond a table falls back to the
/// table mean, so 5-qubit device presets extend to wider solver registers.
/// U1 gates are error free (no pulse). All rates live in `[0, 0.5]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub u2_error: Vec<f64>,
    pub u3_error: Vec<f64>,
    pub readout_error: Vec<f64>,
    #[serde(with = "cx_table")]
    pub cx_error: BTreeMap<(usize, usize), f64>,
}

/// JSON shape for the CX error table: a list of `[a, b, rate]` rows instead
/// of a map, since JSON object keys cannot be qubit pairs.
mod cx_table {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        table: &BTreeMap<(usize, usize), f64>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        let rows: Vec<(usize, usize, f64)> =
            table.iter().map(|(&(a, b), &r)| (a, b, r)).collect();
        rows.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<BTreeMap<(usize, usize), f64>, D::Error> {
        let rows = Vec::<(usize, usize, f64)>::deserialize(de)?;
        Ok(rows.into_iter().map(|(a, b, r)| ((a, b), r)).collect())
    }
}

impl NoiseModel {
    pub fn noiseless() -> NoiseModel {
        NoiseModel {
            u2_error: Vec::new(),
            u3_error: Vec::new(),
            readout_error: Vec::new(),
            cx_error: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |r: f64| (0.0..=0.5).contains(&r);
        for (name, table) in
            [("u2", &self.u2_error), ("u3", &self.u3_error), ("readout", &self.readout_error)]
        {
            if let Some(bad) = table.iter().find(|r| !ok(**r)) {
                return Err(Error::arg(format!("{name} error rate {bad} outside [0, 0.5]")));
            }
        }
        if let Some(((a, b), bad)) = self.cx_error.iter().find(|(_, r)| !ok(**r)) {
            return Err(Error::arg(format!("cx({a},{b}) error rate {bad} outside [0, 0.5]")));
        }
        Ok(())
    }

    fn table_rate(table: &[f64], q: usize) -> f64 {
        if table.is_empty() {
            0.0
        } else {
            table.get(q).copied().unwrap_or_else(|| {
                table.iter().sum::<f64>() / table.len() as f64
            })
        }
    }

    pub fn u2_rate(&self, q: usize) -> f64 {
        Self::table_rate(&self.u2_error, q)
    }

    pub fn u3_rate(&self, q: usize) -> f64 {
        Self::table_rate(&self.u3_error, q)
    }

    pub fn readout_rate(&self, q: usize) -> f64 {
        Self::table_rate(&self.readout_error, q)
    }

    /// Undirected CX rate with mean fallback for unlisted pairs.
    pub fn cx_rate(&self, a: usize, b: usize) -> f64 {
        let key = (a.min(b), a.max(b));
        self.cx_error.get(&key).copied().unwrap_or_else(|| {
            if self.cx_error.is_empty() {
                0.0
            } else {
                self.cx_error.values().sum::<f64>() / self.cx_error.len() as f64
            }
        })
    }

    fn gate_rate(&self, gate: &Gate) -> f64 {
        match gate {
            Gate::U1 { .. } => 0.0,
            Gate::U2 { q, .. } => self.u2_rate(*q),
            Gate::U3 { q, .. } => self.u3_rate(*q),
            Gate::Cx { c, t } => self.cx_rate(*c, *t),
            Gate::Macro { .. } => 0.0,
        }
    }

    /// Mean CX error over the distinct pairs a circuit actually uses; the
    /// effective two-qubit rate for feasibility estimates. Zero when the
    /// circuit has no CX gates.
    pub fn effective_cx_rate(&self, circuit: &Circuit) -> f64 {
        let mut pairs = std::collections::BTreeSet::new();
        for g in &circuit.gates {
            if let Gate::Cx { c, t } = g {
                pairs.insert((*c.min(t), *c.max(t)));
            }
        }
        if pairs.is_empty() {
            return 0.0;
        }
        pairs.iter().map(|&(a, b)| self.cx_rate(a, b)).sum::<f64>() / pairs.len() as f64
    }

    /// The model seen by a qubit subset, reindexed to `0..subset.len()`.
    /// Used to calibrate a measured marginal.
    pub fn subset(&self, qubits: &[usize]) -> NoiseModel {
        let pick = |table: &[f64]| -> Vec<f64> {
            qubits.iter().map(|&q| Self::table_rate(table, q)).collect()
        };
        let mut cx = BTreeMap::new();
        for (i, &a) in qubits.iter().enumerate() {
            for (j, &b) in qubits.iter().enumerate().skip(i + 1) {
                let key = (a.min(b), a.max(b));
                if let Some(&r) = self.cx_error.get(&key) {
                    cx.insert((i.min(j), i.max(j)), r);
                }
            }
        }
        NoiseModel {
            u2_error: pick(&self.u2_error),
            u3_error: pick(&self.u3_error),
            readout_error: pick(&self.readout_error),
            cx_error: cx,
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.u2_error.iter().all(|&r| r == 0.0)
            && self.u3_error.iter().all(|&r| r == 0.0)
            && self.readout_error.iter().all(|&r| r == 0.0)
            && self.cx_error.values().all(|&r| r == 0.0)
    }
}

const PAULI_X: [[Complex64; 2]; 2] = [
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
];
const PAULI_Y: [[Complex64; 2]; 2] = [
    [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
    [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
];
const PAULI_Z: [[Complex64; 2]; 2] = [
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
];

fn apply_pauli(sv: &mut StateVector, q: usize, which: usize) {
    match which {
        1 => sv.apply_matrix(q, &PAULI_X),
        2 => sv.apply_matrix(q, &PAULI_Y),
        3 => sv.apply_matrix(q, &PAULI_Z),
        _ => {}
    }
}

/// Runs a lowered circuit under trajectory noise and samples all qubits.
///
/// Per shot: walk the gate list drawing one uniform per noisy-eligible gate
/// to decide whether its Pauli fires, resimulate the statevector only when
/// at least one fired (otherwise the precomputed ideal distribution is
/// reused; the outcome draw consumes the same stream position either way),
/// then flip each readout bit with its own probability.
pub fn run_noisy(
    circuit: &Circuit,
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Counts> {
    noise.validate()?;
    if circuit.has_macros() {
        return Err(Error::InvalidCircuit(
            "cannot simulate unlowered macros under noise".into(),
        ));
    }
    let n = circuit.n_qubits;
    let ideal = run_ideal(circuit)?.probabilities();
    let rates: Vec<f64> = circuit.gates.iter().map(|g| noise.gate_rate(g)).collect();
    let readout: Vec<f64> = (0..n).map(|q| noise.readout_rate(q)).collect();

    let mut map: BTreeMap<String, u64> = BTreeMap::new();
    let mut fired: Vec<(usize, usize)> = Vec::new();
    for shot in 0..shots {
        let mut rng = shot_rng(seed, shot);
        fired.clear();
        for (gi, &rate) in rates.iter().enumerate() {
            if rate > 0.0 && rng.random::<f64>() < rate {
                let pauli = match circuit.gates[gi] {
                    Gate::Cx { .. } => 1 + rng.random_range(0..15usize),
                    _ => 1 + rng.random_range(0..3usize),
                };
                fired.push((gi, pauli));
            }
        }
        let index = if fired.is_empty() {
            ideal.sample_index(rng.random::<f64>())
        } else {
            let mut sv = StateVector::zero(n)?;
            let mut next = 0usize;
            for (gi, g) in circuit.gates.iter().enumerate() {
                sv.apply(g)?;
                if next < fired.len() && fired[next].0 == gi {
                    let pauli = fired[next].1;
                    next += 1;
                    match g {
                        Gate::Cx { c, t } => {
                            // 15 non-identity pairs, base-4 encoded.
                            apply_pauli(&mut sv, *c, pauli / 4);
                            apply_pauli(&mut sv, *t, pauli % 4);
                        }
                        single => apply_pauli(&mut sv, single.qubits()[0], pauli),
                    }
                }
            }
            sv.probabilities().sample_index(rng.random::<f64>())
        };
        let mut readout_index = index;
        for (q, &r) in readout.iter().enumerate() {
            if r > 0.0 && rng.random::<f64>() < r {
                readout_index ^= 1 << q;
            }
        }
        *map.entry(bitstring(readout_index, n)).or_insert(0) += 1;
    }
    Ok(Counts { shots, counts: map })
}
