//! Batch experiment runner for the grovercut library.
//!
//! Each subcommand builds one experiment, runs it, prints the result JSON to
//! stdout, and writes the same JSON (plus any CSV tables) into the output
//! directory. Runs are deterministic for a fixed spec and seed; the only
//! field that varies is the isolated `timestamp_unix`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use grovercut::circuit::RtofVariant;
use grovercut::graph::Graph;
use grovercut::grover::{
    build_full_circuit, optimize_theta, theta_sweep, threshold_binary_search, ColoringSampler,
    IdealSampler, NoisySampler, OracleFlavor, SolverCircuit,
};
use grovercut::mitigation::{
    build_calibration_matrix, build_calibration_matrix_with_gates, feasibility_report,
    kl_divergence, mitigate,
};
use grovercut::presets::{noise_preset, topology_preset};
use grovercut::sim::{run_noisy, Counts, Distribution, NoiseModel};
use grovercut::synth::diffusion::DiffusionMode;
use grovercut::topology::Topology;
use grovercut::{Error, Result};

#[derive(Parser)]
#[command(name = "grovercut", version, about = "Grover-style MAX-CUT search experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the subdivided-phase circuit and tabulate outcome distributions.
    Solve(SolveArgs),
    /// Run the exact-oracle threshold binary search and dump its trace.
    Exact(ExactArgs),
    /// Emit scalar metrics and a 256-point theta sweep.
    Analyze(AnalyzeArgs),
    /// Export the lowered, placed circuit as OpenQASM 2.0.
    Export(ExportArgs),
    /// Sample a readout calibration matrix for a noise preset.
    Calibrate(CalibrateArgs),
}

/// How edge phase terms are synthesized.
#[derive(Clone, Copy, ValueEnum)]
enum Flavor {
    /// Exact diagonal, four CX per edge.
    Exact4cx,
    /// Fitted ansatz, two CX per edge.
    Approx2cx,
}

/// Which Toffoli-family gates drive the diffusion core.
///
/// `ix` and `m` pick the relative-phase chain variant; `swap` names the
/// same swapping pipeline by its closing gate (for three data qubits the
/// core is that single gate, so the chain variant never comes up).
#[derive(Clone, Copy, ValueEnum)]
enum ToffoliChoice {
    Ix,
    M,
    Swap,
}

impl ToffoliChoice {
    fn mode(self) -> DiffusionMode {
        match self {
            ToffoliChoice::Ix | ToffoliChoice::Swap => DiffusionMode::Swap(RtofVariant::IX),
            ToffoliChoice::M => DiffusionMode::Swap(RtofVariant::M),
        }
    }

    fn name(self) -> &'static str {
        match self {
            ToffoliChoice::Ix => "ix",
            ToffoliChoice::M => "m",
            ToffoliChoice::Swap => "swap",
        }
    }
}

#[derive(Args)]
struct CircuitArgs {
    /// Graph: a named family (k2, k13, k14, k1n:<n>, path:<n>, cycle:<n>,
    /// complete:<n>), a JSON file path, or inline {"n":..,"edges":[[a,b],..]}.
    #[arg(long, default_value = "k13")]
    graph: String,
    /// Phase per cut edge: "theta0" (pi/edges), "opt", a multiple of pi
    /// ("0.25pi"), or plain radians ("0.7854").
    #[arg(long, default_value = "theta0")]
    theta: String,
    /// Edge-phase synthesis flavor.
    #[arg(long, value_enum, default_value_t = Flavor::Exact4cx)]
    oracle: Flavor,
    /// Toffoli family for the diffusion core.
    #[arg(long, value_enum, default_value_t = ToffoliChoice::Ix)]
    toffoli: ToffoliChoice,
    /// Topology preset (t5, line:<n>, tree-embed:<n>) or "none".
    #[arg(long, default_value = "t5")]
    topology: String,
    /// Grover rounds.
    #[arg(long, default_value_t = 1)]
    rounds: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    /// Noise preset (preset-a, preset-b) or "none".
    #[arg(long, default_value = "none")]
    noise: String,
    #[arg(long, default_value_t = 8192)]
    shots: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    /// Graph reference, as for solve.
    #[arg(long, default_value = "k13")]
    graph: String,
    /// Noise preset for the sampler; "none" samples the ideal statevector.
    #[arg(long, default_value = "none")]
    noise: String,
    /// Measured colorings per bisection round.
    #[arg(long, default_value_t = 32)]
    samples: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    /// Noise preset feeding the feasibility rule; "none" for the ideal view.
    #[arg(long, default_value = "none")]
    noise: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Noise preset to characterize.
    #[arg(long, default_value = "preset-a")]
    noise: String,
    #[arg(long, default_value_t = 5)]
    qubits: usize,
    #[arg(long, default_value_t = 16384)]
    shots: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Let preparation gates suffer gate noise instead of isolating readout.
    #[arg(long)]
    gate_noise: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Exact(args) => cmd_exact(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Export(args) => cmd_export(args),
        Command::Calibrate(args) => cmd_calibrate(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidArgument(_) | Error::ResourceLimit(_) => ExitCode::from(2),
                Error::InvalidCircuit(_) | Error::SynthesisFailure(_) => ExitCode::from(3),
            }
        }
    }
}

/// Accepts a named family, a JSON file, or inline JSON.
fn resolve_graph(spec: &str) -> Result<Graph> {
    let trimmed = spec.trim();
    if trimmed.starts_with('{') {
        return serde_json::from_str(trimmed)
            .map_err(|e| Error::InvalidArgument(format!("inline graph JSON: {e}")));
    }
    let path = Path::new(trimmed);
    if path.is_file() {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("reading {}: {e}", path.display())))?;
        return serde_json::from_str(&text)
            .map_err(|e| Error::InvalidArgument(format!("graph file {}: {e}", path.display())));
    }
    Graph::from_name(trimmed)
}

fn resolve_theta(spec: &str, graph: &Graph) -> Result<f64> {
    match spec {
        "theta0" => {
            if graph.edge_count() == 0 {
                return Err(Error::InvalidArgument(
                    "theta0 is undefined for an edgeless graph".into(),
                ));
            }
            Ok(std::f64::consts::PI / graph.edge_count() as f64)
        }
        "opt" => Ok(optimize_theta(graph)?.theta_opt),
        other => {
            let (body, scale) = match other.strip_suffix("pi") {
                Some(body) => (body, std::f64::consts::PI),
                None => (other, 1.0),
            };
            body.trim()
                .parse::<f64>()
                .map(|x| x * scale)
                .map_err(|_| Error::InvalidArgument(format!("cannot parse theta '{other}'")))
        }
    }
}

fn resolve_topology(spec: &str) -> Result<Option<Topology>> {
    if spec == "none" {
        return Ok(None);
    }
    topology_preset(spec).map(Some)
}

fn out_dir(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os("GROVERCUT_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::InvalidArgument(format!("creating {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| Error::InvalidArgument(format!("writing {}: {e}", path.display())))?;
    Ok(path)
}

fn timestamp_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Prints the report to stdout and writes it into the output directory.
fn emit_json(dir: &Path, name: &str, mut report: Value) -> Result<()> {
    report["timestamp_unix"] = json!(timestamp_unix());
    let text = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::InvalidArgument(format!("serializing report: {e}")))?;
    println!("{text}");
    write_file(dir, name, &text)?;
    Ok(())
}

fn build_solver(args: &CircuitArgs, graph: &Graph, theta: f64, seed: u64) -> Result<SolverCircuit> {
    let flavor = match args.oracle {
        Flavor::Exact4cx => OracleFlavor::Exact4Cx,
        Flavor::Approx2cx => OracleFlavor::Approx2Cx { seed },
    };
    let topology = resolve_topology(&args.topology)?;
    build_full_circuit(graph, theta, args.toffoli.mode(), flavor, topology.as_ref(), args.rounds)
}

fn flavor_name(flavor: Flavor) -> &'static str {
    match flavor {
        Flavor::Exact4cx => "exact4cx",
        Flavor::Approx2cx => "approx2cx",
    }
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    if args.shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let graph = resolve_graph(&args.circuit.graph)?;
    let theta = resolve_theta(&args.circuit.theta, &graph)?;
    let solver = build_solver(&args.circuit, &graph, theta, args.seed)?;
    let noise = noise_preset(&args.noise)?;

    let ideal = solver.data_distribution()?;
    let max_cut = graph.brute_force_maxcut()?.value;
    let mut p_success = 0.0;
    for index in 0..ideal.probs().len() {
        let coloring = solver.coloring_of(&graph, index as u64)?;
        if graph.cut_value(&coloring)? == max_cut {
            p_success += ideal.prob(index);
        }
    }

    // One measured table per pipeline: the raw sampled counts, and under
    // noise the noisy and mitigated data-register distributions.
    let (counts, noisy, mitigated, warning) = if noise.is_noiseless() {
        let counts = ideal.sample_counts(args.shots, args.seed);
        (counts, None, None, None)
    } else {
        let full = run_noisy(&solver.circuit, &noise, args.shots, args.seed)?;
        let data_counts = full.marginal(&solver.slot_qubits)?;
        let raw = full.to_distribution(solver.circuit.n_qubits)?;
        let matrix =
            build_calibration_matrix(&noise, solver.circuit.n_qubits, 1 << 14, args.seed ^ 0x5ca1)?;
        let solved = mitigate(&matrix, &raw)?;
        let noisy = raw.marginal(&solver.slot_qubits)?;
        let mitigated = solved.mitigated.marginal(&solver.slot_qubits)?;
        (data_counts, Some(noisy), Some(mitigated), solved.warning)
    };

    // Measured outcomes are cheap to verify classically, so the reported
    // answer is the best cut over the sampled colorings, not the mode.
    let mut best: Option<(usize, u64, grovercut::Coloring)> = None;
    for index in 0..1u64 << solver.n_data {
        let bits = grovercut::sim::bitstring(index as usize, solver.n_data);
        let hits = counts.counts.get(&bits).copied().unwrap_or(0);
        if hits == 0 {
            continue;
        }
        let coloring = solver.coloring_of(&graph, index)?;
        let value = graph.cut_value(&coloring)?;
        if best.as_ref().is_none_or(|(c, h, _)| (value, hits) > (*c, *h)) {
            best = Some((value, hits, coloring));
        }
    }
    let (cut, _, best_coloring) = best.ok_or_else(|| {
        Error::InvalidArgument("no outcomes sampled; increase shots".into())
    })?;

    let metrics = solver.metrics()?;
    let feasibility = feasibility_report(&solver.circuit, &noise)?;
    let dir = out_dir(&args.out);
    write_file(&dir, "solve_counts.csv", &counts_table(&ideal, &counts, &noisy, &mitigated))?;

    let report = json!({
        "schema": 1,
        "command": "solve",
        "method": "subdivided-phase",
        "graph_ref": args.circuit.graph,
        "graph": graph,
        "theta_ref": args.circuit.theta,
        "theta": theta,
        "iterations": solver.iterations,
        "oracle": flavor_name(args.circuit.oracle),
        "toffoli": args.circuit.toffoli.name(),
        "topology": args.circuit.topology,
        "noise": args.noise,
        "shots": args.shots,
        "seed": args.seed,
        "virtual_vertex": solver.virtual_vertex,
        "n_data": solver.n_data,
        "min_fidelity": solver.min_fidelity,
        "metrics": metrics,
        "feasibility": feasibility,
        "success_probability": p_success,
        "best_coloring": best_coloring.to_string(),
        "cut": cut,
        "max_cut": max_cut,
        "counts": counts,
        "distributions": {
            "ideal": ideal,
            "noisy": noisy,
            "mitigated": mitigated,
        },
        "mitigation_warning": warning,
    });
    emit_json(&dir, "solve.json", report)
}

/// Distribution table over the data register, one row per basis state.
fn counts_table(
    ideal: &Distribution,
    counts: &Counts,
    noisy: &Option<Distribution>,
    mitigated: &Option<Distribution>,
) -> String {
    let n_bits = ideal.n_bits();
    let mut table = String::from("bitstring,count,ideal_p");
    if noisy.is_some() {
        table.push_str(",noisy_p,mitigated_p");
    }
    table.push('\n');
    for index in 0..1usize << n_bits {
        let bits = grovercut::sim::bitstring(index, n_bits);
        let count = counts.counts.get(&bits).copied().unwrap_or(0);
        table.push_str(&format!("{bits},{count},{}", ideal.prob(index)));
        if let (Some(n), Some(m)) = (noisy, mitigated) {
            table.push_str(&format!(",{},{}", n.prob(index), m.prob(index)));
        }
        table.push('\n');
    }
    table
}

fn cmd_exact(args: ExactArgs) -> Result<()> {
    if args.samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let graph = resolve_graph(&args.graph)?;
    let noise = noise_preset(&args.noise)?;
    let mut ideal_sampler;
    let mut noisy_sampler;
    let sampler: &mut dyn ColoringSampler = if noise.is_noiseless() {
        ideal_sampler = IdealSampler::new(args.seed);
        &mut ideal_sampler
    } else {
        noisy_sampler = NoisySampler::new(noise, args.seed);
        &mut noisy_sampler
    };
    let kind = sampler.describe();
    let outcome = threshold_binary_search(&graph, sampler, args.samples)?;

    let report = json!({
        "schema": 1,
        "command": "exact",
        "method": "exact-threshold-search",
        "graph_ref": args.graph,
        "graph": graph,
        "sampler": kind,
        "noise": args.noise,
        "samples_per_round": args.samples,
        "seed": args.seed,
        "best_coloring": outcome.best_coloring,
        "best_cut": outcome.best_cut,
        "rounds": outcome.rounds,
    });
    emit_json(&out_dir(&args.out), "exact.json", report)
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let graph = resolve_graph(&args.circuit.graph)?;
    let theta = resolve_theta(&args.circuit.theta, &graph)?;
    let solver = build_solver(&args.circuit, &graph, theta, 7)?;
    let noise = noise_preset(&args.noise)?;

    let plan = optimize_theta(&graph)?;
    let metrics = solver.metrics()?;
    let feasibility = feasibility_report(&solver.circuit, &noise)?;
    let ideal = solver.data_distribution()?;
    let kl = kl_divergence(&Distribution::uniform(solver.n_data), &ideal)?;

    let sweep = theta_sweep(&graph, 256)?;
    let mut csv = String::from("theta,success_probability\n");
    for (t, p) in &sweep {
        csv.push_str(&format!("{t},{p}\n"));
    }
    let dir = out_dir(&args.out);
    write_file(&dir, "analyze_sweep.csv", &csv)?;

    let report = json!({
        "schema": 1,
        "command": "analyze",
        "graph_ref": args.circuit.graph,
        "graph": graph,
        "theta_ref": args.circuit.theta,
        "theta": theta,
        "oracle": flavor_name(args.circuit.oracle),
        "toffoli": args.circuit.toffoli.name(),
        "topology": args.circuit.topology,
        "noise": args.noise,
        "plan": plan,
        "metrics": metrics,
        "feasibility": feasibility,
        "kl_uniform_vs_ideal": kl,
        "sweep_points": sweep.len(),
        "sweep_csv": "analyze_sweep.csv",
    });
    emit_json(&dir, "analyze.json", report)
}

fn cmd_export(args: ExportArgs) -> Result<()> {
    let graph = resolve_graph(&args.circuit.graph)?;
    let theta = resolve_theta(&args.circuit.theta, &graph)?;
    let solver = build_solver(&args.circuit, &graph, theta, 7)?;
    let qasm = grovercut::qasm::export(&solver.circuit)?;
    let path = write_file(&out_dir(&args.out), "export.qasm", &qasm)?;
    eprintln!("wrote {}", path.display());
    print!("{qasm}");
    Ok(())
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<()> {
    if args.shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let noise: NoiseModel = noise_preset(&args.noise)?;
    let matrix = if args.gate_noise {
        build_calibration_matrix_with_gates(&noise, args.qubits, args.shots, args.seed)?
    } else {
        build_calibration_matrix(&noise, args.qubits, args.shots, args.seed)?
    };

    // Per-qubit summary: probability of reading a qubit wrong, averaged
    // over the basis columns where the diagonal says it should be clean.
    let mut readout_summary = BTreeMap::new();
    for q in 0..args.qubits {
        let dim = 1usize << args.qubits;
        let mut wrong = 0.0;
        for col in 0..dim {
            for row in 0..dim {
                if (row ^ col) >> q & 1 == 1 {
                    wrong += matrix.entry(row, col);
                }
            }
        }
        readout_summary.insert(format!("q{q}"), wrong / dim as f64);
    }

    let report = json!({
        "schema": 1,
        "command": "calibrate",
        "noise": args.noise,
        "n_qubits": args.qubits,
        "shots": args.shots,
        "seed": args.seed,
        "gate_noise": args.gate_noise,
        "mean_flip_rate": readout_summary,
        "matrix": matrix,
    });
    emit_json(&out_dir(&args.out), "calibrate.json", report)
}
