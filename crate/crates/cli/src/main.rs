use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use redcard::algebra::{frustration_components, generate_dla, DEFAULT_MAX_DIM};
use redcard::bench::{bench, BenchConfig, BENCH_TARGET};
use redcard::cartan::{CartanStructure, DecomposeOptions};
use redcard::circuits::{build_compressed_tfxy_circuit, build_evolution_circuit, export_qasm, Circuit};
use redcard::models::{Boundary, Family, ModelSpec};
use redcard::optimize::{
    run_redcard_with, run_standard_with, AnsatzKind, Backend, Method, StopRule, SynthesisConfig, SynthesisResult,
};
use redcard::oracle::{circuit_unitary, dense_frobenius_norm, expm_i, to_dense, unitary_distance};
use redcard::qsim::{state_prep_circuit, AncillaMode, ShotConfig};
use redcard::{Error, PauliString, PauliSum};

type CliResult<T> = std::result::Result<T, String>;

fn err(e: Error) -> String {
    e.to_string()
}

#[derive(Parser)]
#[command(name = "redcard", version, about = "Fixed-depth time-evolution circuits from Pauli-sum Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the dynamical Lie algebra of a model.
    Dla(DlaArgs),
    /// Cartan decomposition and fragmentation of k.
    Decompose(DecomposeArgs),
    /// Optimize K and write the result JSON.
    Synthesize(SynthesizeArgs),
    /// Compare emitted circuits against dense exponentials.
    Verify(VerifyArgs),
    /// Write a circuit as QASM.
    Emit(EmitArgs),
    /// Cost-call comparison of the reductive and standard pipelines.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// tfim, tfxy, xy or heisenberg.
    #[arg(long)]
    model: Family,
    #[arg(long)]
    sites: usize,
    /// Coupling used for every axis not set explicitly.
    #[arg(short = 'J', default_value_t = 1.0, allow_negative_numbers = true)]
    j: f64,
    #[arg(long = "Jx", allow_negative_numbers = true)]
    jx: Option<f64>,
    #[arg(long = "Jy", allow_negative_numbers = true)]
    jy: Option<f64>,
    #[arg(long = "Jz", allow_negative_numbers = true)]
    jz: Option<f64>,
    /// Transverse field.
    #[arg(short = 'g', default_value_t = 0.5, allow_negative_numbers = true)]
    g: f64,
    #[arg(long)]
    periodic: bool,
}

impl ModelArgs {
    fn spec(&self) -> ModelSpec {
        let (jx, jy, jz) = (self.jx.unwrap_or(self.j), self.jy.unwrap_or(self.j), self.jz.unwrap_or(self.j));
        let mut spec = match self.model {
            Family::Tfim => ModelSpec::tfim(self.sites, jx, self.g),
            Family::Tfxy => ModelSpec::tfxy(self.sites, jx, jy, self.g),
            Family::Xy => ModelSpec::xy(self.sites, jx, jy),
            Family::Heisenberg => ModelSpec::heisenberg(self.sites, jx, jy, jz),
        };
        if self.periodic {
            spec = spec.periodic();
        }
        spec
    }
}

#[derive(Args, Clone)]
struct StructureArgs {
    #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
    max_dim: usize,
    /// First element of the Cartan subalgebra, e.g. ZIII.
    #[arg(long)]
    seed_string: Option<PauliString>,
    /// Permutation of the generators, e.g. 2,0,1.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<usize>>,
}

impl StructureArgs {
    fn options(&self) -> DecomposeOptions {
        DecomposeOptions { seed: self.seed_string, b_order: self.order.clone() }
    }
}

#[derive(Args)]
struct DlaArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
    max_dim: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    structure: StructureArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendKind {
    Exact,
    Shots,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Redcard,
    Standard,
}

#[derive(Args, Clone)]
struct OptimizerArgs {
    #[arg(long, value_enum, default_value = "exact")]
    backend: BackendKind,
    #[arg(long, default_value_t = 800)]
    shots: u64,
    /// Global depolarizing strength on the shot backend.
    #[arg(long, default_value_t = 0.0)]
    depol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Nearest-neighbour doublet ansatz (TFIM/TFXY only).
    #[arg(long)]
    compressed: bool,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Relative cost-change stop on the exact backend.
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    /// Non-improving sweeps before the shot backend stops.
    #[arg(long, default_value_t = 3)]
    patience: usize,
    /// Sweeps averaged after the shot backend stops.
    #[arg(long, default_value_t = 40)]
    average_sweeps: usize,
    /// Stop once the residual reaches this value.
    #[arg(long)]
    target_residual: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    staging_tol: f64,
}

impl OptimizerArgs {
    fn config(&self, structure: &StructureArgs) -> CliResult<SynthesisConfig> {
        let backend = match self.backend {
            BackendKind::Exact => Backend::Exact,
            BackendKind::Shots => {
                let cfg = ShotConfig { depol: self.depol, ..ShotConfig::new(self.shots, self.seed) };
                cfg.validate().map_err(err)?;
                Backend::Shots(cfg)
            }
        };
        let cfg = SynthesisConfig {
            backend,
            ansatz: if self.compressed { AnsatzKind::Compressed } else { AnsatzKind::Product },
            stop: StopRule {
                rel_tol: self.rel_tol,
                patience: self.patience,
                target_residual: self.target_residual,
                average_sweeps: self.average_sweeps,
            },
            max_iters: self.max_iters,
            staging_tol: self.staging_tol,
            max_dim: structure.max_dim,
            cartan_seed: structure.seed_string,
            b_order: structure.order.clone(),
            ..Default::default()
        };
        Ok(cfg.with_seed(self.seed))
    }
}

#[derive(Args)]
struct SynthesizeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    structure: StructureArgs,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    #[arg(long, value_enum, default_value = "redcard")]
    method: MethodArg,
    /// Result JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the result JSON to stdout.
    #[arg(long)]
    json: bool,
    /// Residual and cost trace per iteration as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    result: PathBuf,
    #[arg(short = 't', value_delimiter = ',', default_values_t = vec![0.1, 1.0, 10.0])]
    times: Vec<f64>,
    /// Emit even if the result did not converge.
    #[arg(long)]
    force: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Qasm,
}

#[derive(Args)]
struct EmitArgs {
    #[arg(long, required_unless_present = "state_prep", conflicts_with = "state_prep")]
    result: Option<PathBuf>,
    /// Prepare (I + σ)/2ⁿ instead of an evolution circuit.
    #[arg(long)]
    state_prep: Option<PauliString>,
    /// One ancilla per reset qubit instead of a single reused one.
    #[arg(long, requires = "state_prep")]
    per_qubit_ancillas: bool,
    #[arg(short = 't', default_value_t = 1.0, allow_negative_numbers = true)]
    time: f64,
    #[arg(long)]
    compressed: bool,
    #[arg(long)]
    force: bool,
    #[arg(long, value_enum, default_value = "qasm")]
    format: Format,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    structure: StructureArgs,
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    first_seed: u64,
    /// Residual that counts as converged.
    #[arg(long, default_value_t = BENCH_TARGET)]
    target_residual: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    /// Per-run table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// What `synthesize` writes and `verify`/`emit` read back.
#[derive(Serialize, Deserialize)]
struct RunRecord {
    command: String,
    model: ModelSpec,
    result: SynthesisResult,
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| format!("writing {}: {e}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| e.to_string())
}

fn read_record(path: &Path) -> CliResult<RunRecord> {
    let text = fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("parsing {}: {e}", path.display()))
}

fn build_hamiltonian(spec: &ModelSpec) -> CliResult<PauliSum> {
    redcard::build(spec).map_err(err)
}

fn rebuild_structure(result: &SynthesisResult) -> CliResult<CartanStructure> {
    let dla = generate_dla(&result.hamiltonian, result.config.max_dim).map_err(err)?;
    CartanStructure::build(&dla, &result.hamiltonian, &result.config.decompose_options()).map_err(err)
}

fn boundary_name(b: Boundary) -> &'static str {
    match b {
        Boundary::Open => "open",
        Boundary::Periodic => "periodic",
    }
}

fn cmd_dla(args: &DlaArgs) -> CliResult<String> {
    let spec = args.model.spec();
    let h = build_hamiltonian(&spec)?;
    let dla = generate_dla(&h, args.max_dim).map_err(err)?;
    let graph = frustration_components(&dla);
    let components: Vec<Vec<String>> = graph
        .components()
        .into_iter()
        .map(|c| c.into_iter().map(|v| dla.basis()[v].to_string()).collect())
        .collect();
    if args.json {
        return to_json(&json!({
            "config": { "command": "dla", "model": spec, "max_dim": args.max_dim },
            "dim": dla.dim(),
            "basis": dla.basis().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "components": components,
            "generator_indices": dla.generator_indices(),
        }));
    }
    let mut out = String::new();
    let _ = writeln!(out, "{} l={} ({})", spec.family, spec.sites, boundary_name(spec.boundary));
    let _ = writeln!(out, "dim {}", dla.dim());
    let sizes: Vec<usize> = components.iter().map(Vec::len).collect();
    let _ = writeln!(out, "frustration components {sizes:?}");
    Ok(out)
}

fn cmd_decompose(args: &DecomposeArgs) -> CliResult<String> {
    let spec = args.model.spec();
    let h = build_hamiltonian(&spec)?;
    let dla = generate_dla(&h, args.structure.max_dim).map_err(err)?;
    let graph = frustration_components(&dla);
    let structure = CartanStructure::build(&dla, &h, &args.structure.options()).map_err(err)?;
    let report = structure.check_ordering(&dla, &graph).map_err(err)?;
    let names = |v: &[PauliString]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>();
    if args.json {
        return to_json(&json!({
            "config": { "command": "decompose", "model": spec, "max_dim": args.structure.max_dim, "options": args.structure.options() },
            "k_dim": structure.k_basis.len(),
            "m_dim": structure.m_basis.len(),
            "h": names(&structure.h_basis),
            "b": names(&structure.b_basis),
            "fragment_sizes": structure.fragment_sizes(),
            "ordering_report": report,
        }));
    }
    let mut out = String::new();
    let _ = writeln!(out, "k {}  m {}  h {}", structure.k_basis.len(), structure.m_basis.len(), structure.h_basis.len());
    for (b, frag) in structure.b_basis.iter().zip(&structure.fragments) {
        let _ = writeln!(out, "{b}: {} angles", frag.len());
    }
    Ok(out)
}

fn trace_csv(result: &SynthesisResult) -> String {
    let mut out = String::from("iteration,fragment,cost,residual\n");
    let mut it = 0;
    for (r, frag) in result.fragments.iter().enumerate() {
        for cost in &frag.cost_trace {
            let res = result.residual_trace.get(it).copied().unwrap_or(f64::NAN);
            let _ = writeln!(out, "{},{},{:e},{:e}", it + 1, r + 1, cost, res);
            it += 1;
        }
    }
    out
}

fn cmd_synthesize(args: &SynthesizeArgs) -> CliResult<String> {
    let spec = args.model.spec();
    let h = build_hamiltonian(&spec)?;
    let config = args.optimizer.config(&args.structure)?;
    let dla = generate_dla(&h, config.max_dim).map_err(err)?;
    let structure = CartanStructure::build(&dla, &h, &config.decompose_options()).map_err(err)?;
    let result = match args.method {
        MethodArg::Redcard => run_redcard_with(&h, &structure, &config),
        MethodArg::Standard => run_standard_with(&h, &structure, &config),
    }
    .map_err(err)?;
    let record = RunRecord { command: "synthesize".into(), model: spec, result };
    let text = to_json(&record)?;
    if let Some(path) = &args.out {
        write_text(path, &text)?;
    }
    if let Some(path) = &args.csv {
        write_text(path, &trace_csv(&record.result))?;
    }
    if args.json {
        return Ok(text);
    }
    let r = &record.result;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "residual {:.3e}  iterations {}  cost calls {}  converged {}",
        r.residual, r.iterations, r.cost_calls, r.converged
    );
    for f in &r.fragments {
        let g = f.generator.map_or_else(|| "-".to_string(), |p| p.to_string());
        let _ = writeln!(out, "{g}: {} angles, {} iterations, {} calls", f.factors.len(), f.iterations, f.cost_calls);
    }
    Ok(out)
}

fn evolution_circuit(record: &RunRecord, t: f64, compressed: bool, force: bool) -> CliResult<Circuit> {
    let structure = rebuild_structure(&record.result)?;
    let compressed = compressed || record.result.ansatz == AnsatzKind::Compressed;
    if compressed {
        build_compressed_tfxy_circuit(&record.result, &structure, t, force).map_err(err)
    } else {
        build_evolution_circuit(&record.result, &structure, t, force).map_err(err)
    }
}

#[derive(Serialize)]
struct VerifyRow {
    t: f64,
    distance: f64,
    bound: f64,
    gate_count: usize,
    within_bound: bool,
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<(String, bool)> {
    let record = read_record(&args.result)?;
    let h = &record.result.hamiltonian;
    let dense = to_dense(h).map_err(err)?;
    let hf = dense_frobenius_norm(h);
    let mut rows = Vec::new();
    for &t in &args.times {
        let c = evolution_circuit(&record, t, false, args.force)?;
        let u = circuit_unitary(&c).map_err(err)?;
        let want = expm_i(&dense, t).map_err(err)?;
        let distance = unitary_distance(&u, &want).map_err(err)?;
        let bound = 10.0 * record.result.residual * hf * t.abs() + 1e-8;
        rows.push(VerifyRow { t, distance, bound, gate_count: c.gate_count(), within_bound: distance <= bound });
    }
    let ok = rows.iter().all(|r| r.within_bound);
    let text = if args.json {
        to_json(&json!({
            "config": { "command": "verify", "result": args.result, "times": args.times, "force": args.force },
            "residual": record.result.residual,
            "rows": rows,
        }))?
    } else {
        let mut out = String::from("t          distance    bound       gates\n");
        for r in &rows {
            let _ = writeln!(out, "{:<10} {:<11.3e} {:<11.3e} {}", r.t, r.distance, r.bound, r.gate_count);
        }
        out
    };
    Ok((text, ok))
}

fn cmd_emit(args: &EmitArgs) -> CliResult<String> {
    let circuit = match (&args.state_prep, &args.result) {
        (Some(sigma), _) => {
            let mode = if args.per_qubit_ancillas { AncillaMode::PerQubit } else { AncillaMode::Single };
            state_prep_circuit(sigma, mode).map_err(err)?
        }
        (None, Some(path)) => evolution_circuit(&read_record(path)?, args.time, args.compressed, args.force)?,
        (None, None) => return Err("either --result or --state-prep is required".into()),
    };
    let text = match args.format {
        Format::Qasm => export_qasm(&circuit),
    };
    match &args.output {
        Some(path) => {
            write_text(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn cmd_bench(args: &BenchArgs) -> CliResult<(String, bool)> {
    let spec = args.model.spec();
    let h = build_hamiltonian(&spec)?;
    let mut config = BenchConfig::new(args.seeds, args.first_seed);
    config.target_residual = args.target_residual;
    config.synthesis.max_iters = args.max_iters;
    config.synthesis.stop.rel_tol = args.rel_tol;
    config.synthesis.max_dim = args.structure.max_dim;
    config.synthesis.cartan_seed = args.structure.seed_string;
    config.synthesis.b_order = args.structure.order.clone();
    let report = bench(&h, &config).map_err(err)?;
    let text = to_json(&json!({ "command": "bench", "model": spec, "report": report }))?;
    if let Some(path) = &args.out {
        write_text(path, &text)?;
    }
    if let Some(path) = &args.csv {
        let mut csv = String::from("seed,method,cost_calls,iterations,residual,converged\n");
        for r in &report.runs {
            let m = match r.method {
                Method::Redcard => "redcard",
                Method::Standard => "standard",
            };
            let _ = writeln!(csv, "{},{},{},{},{:e},{}", r.seed, m, r.cost_calls, r.iterations, r.residual, r.converged);
        }
        write_text(path, &csv)?;
    }
    let ok = report.any_converged();
    if args.json {
        return Ok((text, ok));
    }
    let mut out = String::new();
    for s in [&report.redcard, &report.standard] {
        let _ = writeln!(
            out,
            "{:<9} converged {}/{}  calls {:.1} ± {:.1}  iterations {:.1} ± {:.1}",
            format!("{:?}", s.method).to_lowercase(),
            s.converged,
            s.runs,
            s.mean_calls,
            s.std_calls,
            s.mean_iterations,
            s.std_iterations
        );
    }
    let _ = writeln!(out, "call ratio {:.2}", report.call_ratio);
    Ok((out, ok))
}

/// Accepts `-Jx 0.5` as well as `--Jx 0.5`.
fn normalize_args(args: impl Iterator<Item = String>) -> Vec<String> {
    args.map(|a| {
        for axis in ["Jx", "Jy", "Jz"] {
            if let Some(rest) = a.strip_prefix('-').and_then(|s| s.strip_prefix(axis)) {
                if rest.is_empty() || rest.starts_with('=') {
                    return format!("--{axis}{rest}");
                }
            }
        }
        a
    })
    .collect()
}

fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("REDCARD_THREADS") {
        let n: usize = v.parse().map_err(|_| format!("REDCARD_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            return Err("REDCARD_THREADS must be at least 1".into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<(String, bool)> {
    configure_threads()?;
    match &cli.command {
        Command::Dla(a) => cmd_dla(a).map(|s| (s, true)),
        Command::Decompose(a) => cmd_decompose(a).map(|s| (s, true)),
        Command::Synthesize(a) => cmd_synthesize(a).map(|s| (s, true)),
        Command::Verify(a) => cmd_verify(a),
        Command::Emit(a) => cmd_emit(a).map(|s| (s, true)),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(normalize_args(std::env::args()));
    match run(cli) {
        Ok((text, ok)) => {
            print!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
