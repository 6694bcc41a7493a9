//! Command-line entry point wiring the library modules: file I/O, seeded
//! experiments and JSON/CSV reporting.
//!
//! Exit status: 0 on success, 2 when a certificate was evaluated and
//! refused (distinguishable from a crash), 1 on any error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use garland_lab::cat0;
use garland_lab::complex::{WeightedComplex, WeightedGraph};
use garland_lab::harmonic::{self, EdgeCocycle, TargetClass, VertexMap};
use garland_lab::incidence;
use garland_lab::io as gio;
use garland_lab::models;
use garland_lab::randomgen::{self, PermutationModelParams};
use garland_lab::spectral;
use garland_lab::wirtinger::{self, LoopFamily};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "garland-lab", version, about = "Link spectra, harmonic maps and spectral fixed-point certificates")]
struct Cli {
    /// Sample-level parallelism; record order stays by sample index.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized subcommands; falls back to GARLAND_LAB_SEED,
    /// then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral gap of a graph file, or of the k-cycle.
    Spectra(SpectraArgs),
    /// Certificates and identity/inequality reports on complexes.
    Garland {
        #[command(subcommand)]
        action: GarlandAction,
    },
    /// Synchronous descent flow; trace as CSV (step, energy,
    /// laplacian-norm).
    Flow(FlowArgs),
    /// Cycle-inequality tables and loop-family certificates.
    Wirtinger {
        #[command(subcommand)]
        action: WirtingerAction,
    },
    /// Projective-plane incidence graphs and the building census.
    Incidence(IncidenceArgs),
    /// Permutation-model regular multigraphs: per-sample gaps and summary.
    RandomGraph(RandomGraphArgs),
    /// Density-model random presentations and link-graph verdicts.
    RandomGroup(RandomGroupArgs),
    /// Invariant-bound calculators.
    InBounds(InBoundsArgs),
}

#[derive(Args)]
struct SpectraArgs {
    /// Graph file, or the literal `cycle` together with --k.
    input: Option<String>,
    /// Cycle length for `cycle`.
    #[arg(long)]
    k: Option<usize>,
    /// Print the closed-form cycle value for this k and exit.
    #[arg(long, value_name = "K")]
    closed_form: Option<usize>,
}

#[derive(Subcommand)]
enum GarlandAction {
    /// Evaluate the link-gap fixed-point criterion; exit 2 when refused.
    Certify {
        complex: PathBuf,
        /// Certify against targets of bounded invariant instead of
        /// Hilbert targets.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Energy-decomposition residuals of a map.
    Identity {
        complex: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        cocycle: Option<PathBuf>,
    },
    /// Slack of the quantitative inequality at a given gap floor.
    Inequality {
        complex: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        cocycle: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FlowArgs {
    /// Host file: a `graph` or `complex` header is auto-detected.
    host: PathBuf,
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    cocycle: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Stop once every vertex Laplacian magnitude falls below this.
    #[arg(long, default_value_t = garland_lab::harmonic::HARMONIC_TOL)]
    harmonic_tol: f64,
    /// Write the trace CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum WirtingerAction {
    /// Constants and bounds for the k-cycle; checks a map file when given,
    /// else the regular k-gon.
    Check {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Loop-family averaging bound on a host graph.
    Certificate {
        #[arg(long)]
        graph: PathBuf,
        /// JSON file: {"k": 6, "loops": [[0, 1, ...], ...]}.
        #[arg(long)]
        family: PathBuf,
        /// Distance-class counts N_1,...,N_{k/2}: switches to the
        /// distance-regular averaging bound.
        #[arg(long, value_delimiter = ',')]
        counts: Option<Vec<usize>>,
    },
}

#[derive(Args)]
struct IncidenceArgs {
    #[arg(long)]
    p: u64,
    /// Distance census and both Rayleigh quotients of the link embedding.
    #[arg(long)]
    census: bool,
    /// Eigensolved gap next to the classical formula readings.
    #[arg(long)]
    feit_higman: bool,
    /// Run the generalized-triangle validation.
    #[arg(long)]
    check: bool,
    /// Export the graph in the text format.
    #[arg(long)]
    export: Option<PathBuf>,
}

#[derive(Args)]
struct RandomGraphArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    samples: usize,
    /// Constant of the refined gap threshold.
    #[arg(long, default_value_t = 0.0)]
    c: f64,
    /// Write per-sample gaps as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct RandomGroupArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    density: f64,
    #[arg(long, default_value_t = 1)]
    samples: usize,
    /// Write per-sample verdicts as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct InBoundsArgs {
    /// Closed-form building lower bound at this parameter.
    #[arg(long)]
    p: Option<u64>,
    /// Degrade a scalar gap by an invariant bound: needs --delta.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
}

fn resolve_seed(cli_seed: Option<u64>) -> u64 {
    cli_seed
        .or_else(|| {
            std::env::var("GARLAND_LAB_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0)
}

fn emit(report: serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable report"));
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(1)
}

fn load_map(path: &Path) -> Result<VertexMap, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_cocycle(path: &Path) -> Result<EdgeCocycle, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            return fail(e);
        }
    }
    let seed = resolve_seed(cli.seed);
    match cli.command {
        Command::Spectra(args) => run_spectra(args),
        Command::Garland { action } => run_garland(action),
        Command::Flow(args) => run_flow(args),
        Command::Wirtinger { action } => run_wirtinger(action),
        Command::Incidence(args) => run_incidence(args),
        Command::RandomGraph(args) => run_random_graph(args, seed),
        Command::RandomGroup(args) => run_random_group(args, seed),
        Command::InBounds(args) => run_in_bounds(args),
    }
}

fn run_spectra(args: SpectraArgs) -> ExitCode {
    if let Some(k) = args.closed_form {
        let value = match spectral::cycle_gap_closed_form(k) {
            Ok(v) => v,
            Err(e) => return fail(e),
        };
        emit(json!({
            "version": VERSION,
            "config": {"closed_form": k},
            "lambda": value,
        }));
        return ExitCode::SUCCESS;
    }
    let graph: WeightedGraph = match args.input.as_deref() {
        Some("cycle") => {
            let Some(k) = args.k else {
                return fail("`spectra cycle` needs --k");
            };
            if k < 3 {
                return fail("cycle needs k >= 3");
            }
            models::cycle_graph(k)
        }
        Some(path) => match gio::read_graph(Path::new(path)) {
            Ok(g) => g,
            Err(e) => return fail(e),
        },
        None => return fail("expected a graph file, `cycle --k K`, or --closed-form K"),
    };
    let report = match spectral::scalar_spectral_gap(&graph) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    emit(json!({
        "version": VERSION,
        "config": {"input": args.input, "k": args.k},
        "lambda": report.lambda,
        "connected": report.connected,
        "method": report.method,
        "spectrum": report.spectrum,
    }));
    ExitCode::SUCCESS
}

fn run_garland(action: GarlandAction) -> ExitCode {
    match action {
        GarlandAction::Certify { complex, delta } => {
            let cx = match gio::read_complex(&complex) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let target = match delta {
                Some(delta) => TargetClass::InBounded { delta },
                None => TargetClass::Hilbert,
            };
            let report = match harmonic::fixed_point_certificate(&cx, target) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let granted = report.granted;
            emit(json!({
                "version": VERSION,
                "config": {"complex": complex.display().to_string(), "delta": delta},
                "report": report,
            }));
            if granted {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        GarlandAction::Identity {
            complex,
            map,
            cocycle,
        } => {
            let cx = match gio::read_complex(&complex) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let map_v = match load_map(&map) {
                Ok(m) => m,
                Err(e) => return fail(e),
            };
            let coc = match cocycle.as_deref().map(load_cocycle).transpose() {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let report = match harmonic::garland_identity_check(&cx, &map_v, coc.as_ref()) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            emit(json!({
                "version": VERSION,
                "config": {
                    "complex": complex.display().to_string(),
                    "map": map.display().to_string(),
                    "cocycle": cocycle.map(|p| p.display().to_string()),
                },
                "report": report,
            }));
            ExitCode::SUCCESS
        }
        GarlandAction::Inequality {
            complex,
            map,
            lambda,
            cocycle,
        } => {
            let cx = match gio::read_complex(&complex) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let map_v = match load_map(&map) {
                Ok(m) => m,
                Err(e) => return fail(e),
            };
            let coc = match cocycle.as_deref().map(load_cocycle).transpose() {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let report =
                match harmonic::garland_inequality_check(&cx, &map_v, lambda, coc.as_ref()) {
                    Ok(r) => r,
                    Err(e) => return fail(e),
                };
            emit(json!({
                "version": VERSION,
                "config": {
                    "complex": complex.display().to_string(),
                    "map": map.display().to_string(),
                    "lambda": lambda,
                    "cocycle": cocycle.map(|p| p.display().to_string()),
                },
                "report": report,
            }));
            ExitCode::SUCCESS
        }
    }
}

fn sniff_host(path: &Path) -> Result<WeightedGraph, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let header = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    match header {
        "graph" => gio::parse_graph(&text).map_err(|e| e.to_string()),
        "complex" => {
            let cx: WeightedComplex = gio::parse_complex(&text).map_err(|e| e.to_string())?;
            Ok(cx.skeleton().clone())
        }
        other => Err(format!(
            "{}: expected `graph` or `complex` header, found `{other}`",
            path.display()
        )),
    }
}

fn run_flow(args: FlowArgs) -> ExitCode {
    let host = match sniff_host(&args.host) {
        Ok(h) => h,
        Err(e) => return fail(e),
    };
    let map = match load_map(&args.map) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let cocycle = match args.cocycle.as_deref().map(load_cocycle).transpose() {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let trace = match harmonic::mayer_flow_with_tolerance(
        &host,
        &map,
        args.eta,
        args.steps,
        cocycle.as_ref(),
        args.harmonic_tol,
    ) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let mut csv = String::from("step,energy,laplacian_norm\n");
    for s in &trace.steps {
        csv.push_str(&format!("{},{},{}\n", s.step, s.energy, s.laplacian_norm));
    }
    match args.csv {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, csv) {
                return fail(format!("{}: {e}", path.display()));
            }
        }
        None => print!("{csv}"),
    }
    ExitCode::SUCCESS
}

fn run_wirtinger(action: WirtingerAction) -> ExitCode {
    match action {
        WirtingerAction::Check { k, map } => {
            if k < 4 {
                return fail("wirtinger check needs k >= 4");
            }
            let map_v = match map.as_deref() {
                Some(path) => match load_map(path) {
                    Ok(m) => m,
                    Err(e) => return fail(e),
                },
                None => VertexMap::euclidean(
                    2,
                    (0..k)
                        .map(|i| {
                            let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                            vec![t.cos(), t.sin()]
                        })
                        .collect(),
                ),
            };
            let constants: Vec<f64> = (1..=k)
                .map(|j| wirtinger::wirtinger_constant(k, j).expect("valid j"))
                .collect();
            let report = match wirtinger::wir_check(&map_v) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            emit(json!({
                "version": VERSION,
                "config": {"k": k, "map": map.map(|p| p.display().to_string())},
                "constants": constants,
                "cycle_bound": wirtinger::gromov_cycle_bound(k).expect("k >= 4"),
                "report": report,
            }));
            ExitCode::SUCCESS
        }
        WirtingerAction::Certificate {
            graph,
            family,
            counts,
        } => {
            let host = match gio::read_graph(&graph) {
                Ok(g) => g,
                Err(e) => return fail(e),
            };
            let text = match std::fs::read_to_string(&family) {
                Ok(t) => t,
                Err(e) => return fail(format!("{}: {e}", family.display())),
            };
            let fam: LoopFamily = match serde_json::from_str(&text) {
                Ok(f) => f,
                Err(e) => return fail(format!("{}: {e}", family.display())),
            };
            let config = json!({
                "graph": graph.display().to_string(),
                "family": family.display().to_string(),
                "counts": counts,
            });
            match counts {
                Some(counts) => {
                    let report = match wirtinger::averaged_regular_certificate(
                        &host,
                        &fam.loops,
                        &counts,
                    ) {
                        Ok(r) => r,
                        Err(e) => return fail(e),
                    };
                    emit(json!({
                        "version": VERSION,
                        "config": config,
                        "report": report,
                    }));
                }
                None => {
                    let report = match wirtinger::loop_family_certificate(&host, &fam) {
                        Ok(r) => r,
                        Err(e) => return fail(e),
                    };
                    emit(json!({
                        "version": VERSION,
                        "config": config,
                        "report": report,
                    }));
                }
            }
            ExitCode::SUCCESS
        }
    }
}

fn run_incidence(args: IncidenceArgs) -> ExitCode {
    let inc = match incidence::projective_plane_incidence(args.p) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    let mut report = json!({
        "version": VERSION,
        "config": {
            "p": args.p,
            "census": args.census,
            "feit_higman": args.feit_higman,
            "check": args.check,
        },
        "vertices": inc.graph.vertex_count(),
        "edges": inc.graph.edge_items().len(),
        "valence": args.p + 1,
    });
    if args.census {
        match incidence::building_embedding_rq(args.p) {
            Ok(census) => {
                report["census"] = serde_json::to_value(&census).expect("serializable");
            }
            Err(e) => return fail(e),
        }
    }
    if args.feit_higman {
        match incidence::feit_higman_compare(args.p) {
            Ok(cmp) => {
                report["feit_higman"] = serde_json::to_value(&cmp).expect("serializable");
            }
            Err(e) => return fail(e),
        }
    }
    if args.check {
        match incidence::generalized_triangle_check(&inc.graph) {
            Ok(check) => {
                report["generalized_triangle"] =
                    serde_json::to_value(&check).expect("serializable");
            }
            Err(e) => return fail(e),
        }
    }
    if let Some(path) = args.export {
        if let Err(e) = std::fs::write(&path, gio::graph_to_text(&inc.graph)) {
            return fail(format!("{}: {e}", path.display()));
        }
    }
    emit(report);
    ExitCode::SUCCESS
}

fn run_random_graph(args: RandomGraphArgs, seed: u64) -> ExitCode {
    let params = PermutationModelParams {
        n: args.n,
        d: args.d,
        seed,
    };
    if args.n < 2 || args.d < 1 {
        return fail("need n >= 2 and d >= 1");
    }
    let stats = match randomgen::spectral_statistics(&params, args.samples, args.c) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    if let Some(path) = &args.csv {
        let mut csv = String::from("sample,lambda\n");
        for (i, l) in stats.lambdas.iter().enumerate() {
            csv.push_str(&format!("{i},{l}\n"));
        }
        if let Err(e) = std::fs::write(path, csv) {
            return fail(format!("{}: {e}", path.display()));
        }
    }
    emit(json!({
        "version": VERSION,
        "config": {
            "n": args.n,
            "d": args.d,
            "samples": args.samples,
            "seed": seed,
            "c": args.c,
        },
        "report": stats,
    }));
    ExitCode::SUCCESS
}

fn run_random_group(args: RandomGroupArgs, seed: u64) -> ExitCode {
    let verdicts = match randomgen::zuk_verdict_batch(args.m, args.density, seed, args.samples) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let certified = verdicts.iter().filter(|v| v.certified).count();
    if let Some(path) = &args.csv {
        let mut csv = String::from("sample,lambda,connected,certified\n");
        for (i, v) in verdicts.iter().enumerate() {
            csv.push_str(&format!(
                "{i},{},{},{}\n",
                v.lambda, v.connected, v.certified
            ));
        }
        if let Err(e) = std::fs::write(path, csv) {
            return fail(format!("{}: {e}", path.display()));
        }
    }
    emit(json!({
        "version": VERSION,
        "config": {
            "m": args.m,
            "density": args.density,
            "samples": args.samples,
            "seed": seed,
        },
        "certified_fraction": certified as f64 / args.samples.max(1) as f64,
        "verdicts": verdicts,
    }));
    ExitCode::SUCCESS
}

fn run_in_bounds(args: InBoundsArgs) -> ExitCode {
    let mut report = json!({
        "version": VERSION,
        "config": {"p": args.p, "lambda": args.lambda, "delta": args.delta},
    });
    let mut any = false;
    if let Some(p) = args.p {
        match cat0::in_lower_bound_building(p) {
            Ok(v) => {
                report["building_lower_bound"] = json!(v);
                any = true;
            }
            Err(e) => return fail(e),
        }
    }
    if let (Some(lambda), Some(delta)) = (args.lambda, args.delta) {
        match cat0::gap_bound_from_in(lambda, delta) {
            Ok(v) => {
                report["degraded_gap"] = json!(v);
                report["threshold_exceeded"] = json!(v > 0.5);
                any = true;
            }
            Err(e) => return fail(e),
        }
    }
    if !any {
        return fail("nothing to compute: pass --p and/or --lambda with --delta");
    }
    emit(report);
    ExitCode::SUCCESS
}
