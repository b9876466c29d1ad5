//! Argument parsing and command dispatch for the `ginisplit` binary.
//!
//! Exit codes: 0 on success, 1 for domain errors (unreadable or invalid
//! data, instances that violate a solver's guard, graphs with triangles),
//! 2 for usage errors (unknown flags, missing required options, option
//! values outside their documented range).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ginisplit_core::corpus;
use ginisplit_core::hardness::{
    check_cover_bound, generate_triangle_free, Graph,
};
use ginisplit_core::impurity::{
    entropy_impurity, entropy_impurity_base2, gini_impurity, weighted_gini, CountVector,
    GiniInstance,
};
use ginisplit_core::reduction::{gini_gap_identity, merge_identical, normalize};
use ginisplit_core::solvers::{
    approximation_ratio, solve_brute_force, solve_lloyd, solve_ptas, Objective, PtasConfig,
    SolveResult,
};

use crate::document::InstanceDocument;
use crate::ingest::{ingest_csv, IngestError};
use crate::output::{
    finite_or_null, BenchOutput, BenchRow, BenchSolverRow, BenchSummary, CoverBoundOutput,
    IdentityOutput, ImpurityOutput, ImpurityRow, ReducedDocument, ReducedPoint, SolveOutput,
};

/// Errors split by exit code: usage problems (2) versus data and domain
/// problems (1).
#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Domain(String),
}

impl From<ginisplit_core::Error> for AppError {
    fn from(e: ginisplit_core::Error) -> Self {
        AppError::Domain(e.to_string())
    }
}

impl From<IngestError> for AppError {
    fn from(e: IngestError) -> Self {
        AppError::Domain(e.to_string())
    }
}

/// Group attribute values to minimise total weighted Gini impurity.
#[derive(Debug, Parser)]
#[command(name = "ginisplit", version, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score the impurity of every attribute value and of the whole set
    Impurity(ImpurityArgs),
    /// Find a grouping of minimum total weighted Gini impurity
    Solve(SolveArgs),
    /// Emit the weighted k-means form of an instance
    Reduce(ReduceArgs),
    /// Check the merge identity on a set of same-norm vectors
    VerifyIdentity(VerifyIdentityArgs),
    /// Generate and check worst-case instances from triangle-free graphs
    #[command(subcommand)]
    Hardness(HardnessCommand),
    /// Compare the heuristic solvers against the exact optimum
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input file: a CSV dataset or a JSON instance document
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Input format (inferred from the file extension when omitted)
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// CSV column with the attribute value (default: the first column)
    #[arg(long, value_name = "NAME")]
    attribute_column: Option<String>,
    /// CSV column with the class label (default: the last column)
    #[arg(long, value_name = "NAME")]
    class_column: Option<String>,
}

#[derive(Debug, Args)]
struct ImpurityArgs {
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverKind {
    /// Exhaustive search (exact, instances up to 14 values)
    Brute,
    /// Weighted Lloyd iteration with seeded restarts
    Lloyd,
    /// Sampling-based approximation (groups up to 4)
    Ptas,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Number of groups (required for CSV input, overrides the JSON value)
    #[arg(long, value_parser = parse_positive)]
    k: Option<usize>,
    /// Algorithm to run
    #[arg(long, value_enum)]
    solver: SolverKind,
    /// Base seed for the randomised solvers
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent restarts for lloyd
    #[arg(long, default_value_t = 10, value_parser = parse_positive)]
    restarts: usize,
    /// Accuracy knob for ptas, strictly between 0 and 1
    #[arg(long, default_value_t = 0.1, value_parser = parse_epsilon)]
    epsilon: f64,
    /// Boosting rounds for ptas
    #[arg(long, default_value_t = 20, value_parser = parse_positive)]
    rounds: usize,
    /// Worker threads for parallel solvers (default: one per core)
    #[arg(long, value_parser = parse_positive)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct ReduceArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Number of groups (required for CSV input, overrides the JSON value)
    #[arg(long, value_parser = parse_positive)]
    k: Option<usize>,
    /// Coalesce points with identical normalised coordinates
    #[arg(long)]
    merge_identical: bool,
}

#[derive(Debug, Args)]
struct VerifyIdentityArgs {
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Debug, Subcommand)]
enum HardnessCommand {
    /// Generate a triangle-free graph as an edge-list file
    Gen(HardnessGenArgs),
    /// Check the cover bound and the Gini identity on a graph
    Check(HardnessCheckArgs),
}

#[derive(Debug, Args)]
struct HardnessGenArgs {
    /// Seed for the random generator
    #[arg(long, default_value_t = 0, conflicts_with = "preset")]
    seed: u64,
    /// Vertex count for the random generator
    #[arg(long, default_value_t = 8, value_parser = parse_positive, conflicts_with = "preset")]
    vertices: usize,
    /// Edge probability before triangles are broken, in [0, 1]
    #[arg(long, default_value_t = 0.3, value_parser = parse_probability, conflicts_with = "preset")]
    edge_prob: f64,
    /// Fixed family instead of a random graph:
    /// path:N, cycle:N, star:N, or biclique:A,B
    #[arg(long, value_parser = parse_preset)]
    preset: Option<Graph>,
    /// Write the edge list to this file instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HardnessCheckArgs {
    /// Edge-list file to check
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Number of random instances
    #[arg(long, default_value_t = 20, value_parser = parse_positive)]
    count: usize,
    /// Corpus seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest instance size (the exact oracle handles up to 14)
    #[arg(long, default_value_t = 9, value_parser = parse_positive)]
    max_n: usize,
    /// Largest class count
    #[arg(long, default_value_t = 4, value_parser = parse_positive)]
    max_d: usize,
    /// Largest per-class count
    #[arg(long, default_value_t = 20)]
    max_count: u64,
    /// Smallest group budget
    #[arg(long, default_value_t = 2, value_parser = parse_positive)]
    k_min: usize,
    /// Largest group budget (the sampling solver handles up to 4)
    #[arg(long, default_value_t = 3, value_parser = parse_positive)]
    k_max: usize,
    /// Accuracy knob for the sampling solver
    #[arg(long, default_value_t = 0.1, value_parser = parse_epsilon)]
    epsilon: f64,
    /// Restarts for lloyd
    #[arg(long, default_value_t = 10, value_parser = parse_positive)]
    restarts: usize,
    /// Boosting rounds for the sampling solver
    #[arg(long, default_value_t = 20, value_parser = parse_positive)]
    rounds: usize,
    /// Worker threads (default: one per core)
    #[arg(long, value_parser = parse_positive)]
    threads: Option<usize>,
}

fn parse_epsilon(s: &str) -> Result<f64, String> {
    let value: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(format!("epsilon must lie strictly between 0 and 1, got {value}"))
    }
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let value: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(format!("probability must lie in [0, 1], got {value}"))
    }
}

fn parse_positive(s: &str) -> Result<usize, String> {
    let value: usize = s.parse().map_err(|_| format!("'{s}' is not an integer"))?;
    if value >= 1 {
        Ok(value)
    } else {
        Err("value must be at least 1".into())
    }
}

fn parse_preset(s: &str) -> Result<Graph, String> {
    let (kind, params) = s
        .split_once(':')
        .ok_or_else(|| "expected '<family>:<size>', e.g. path:5".to_string())?;
    let size = |p: &str| -> Result<usize, String> {
        p.parse().map_err(|_| format!("'{p}' is not an integer"))
    };
    let graph = match kind {
        "path" => Graph::path(size(params)?),
        "cycle" => Graph::cycle(size(params)?),
        "star" => Graph::star(size(params)?),
        "biclique" => {
            let (a, b) = params
                .split_once(',')
                .ok_or_else(|| "biclique takes two sizes, e.g. biclique:2,3".to_string())?;
            Graph::complete_bipartite(size(a)?, size(b)?)
        }
        other => {
            return Err(format!(
                "unknown family '{other}' (expected path, cycle, star, or biclique)"
            ))
        }
    };
    graph.map_err(|e| e.to_string())
}

/// Parses the command line and runs it, translating outcomes to exit
/// codes (0 success, 1 domain error, 2 usage error).
pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap prints the message itself and exits 2 on bad usage, 0 on
        // --help / --version.
        Err(e) => e.exit(),
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(AppError::Domain(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), AppError> {
    match command {
        Command::Impurity(args) => cmd_impurity(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Reduce(args) => cmd_reduce(args),
        Command::VerifyIdentity(args) => cmd_verify_identity(args),
        Command::Hardness(HardnessCommand::Gen(args)) => cmd_hardness_gen(args),
        Command::Hardness(HardnessCommand::Check(args)) => cmd_hardness_check(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn resolve_format(input: &InputArgs) -> Result<Format, AppError> {
    if let Some(format) = input.format {
        return Ok(format);
    }
    match input.input.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => Ok(Format::Csv),
        Some(ext) if ext.eq_ignore_ascii_case("json") => Ok(Format::Json),
        _ => Err(AppError::Usage(format!(
            "cannot infer the format of '{}'; pass --format csv or --format json",
            input.input.display()
        ))),
    }
}

/// Loads an instance document from CSV or JSON. For CSV the group budget
/// comes from `--k` (required when `k_required`, else defaulting to 1);
/// for JSON `--k` overrides the document's own value.
fn load_document(
    input: &InputArgs,
    k_flag: Option<usize>,
    k_required: bool,
) -> Result<InstanceDocument, AppError> {
    match resolve_format(input)? {
        Format::Csv => {
            let dataset = ingest_csv(
                &input.input,
                input.attribute_column.as_deref(),
                input.class_column.as_deref(),
            )?;
            let k = match k_flag {
                Some(k) => k,
                None if k_required => {
                    return Err(AppError::Usage(
                        "--k is required for CSV input".into(),
                    ))
                }
                None => 1,
            };
            Ok(InstanceDocument::from_dataset(&dataset, k))
        }
        Format::Json => {
            if input.attribute_column.is_some() || input.class_column.is_some() {
                return Err(AppError::Usage(
                    "--attribute-column and --class-column only apply to CSV input".into(),
                ));
            }
            let display = input.input.display().to_string();
            let text = std::fs::read_to_string(&input.input)
                .map_err(|e| AppError::Domain(format!("{display}: {e}")))?;
            let doc: InstanceDocument = serde_json::from_str(&text)
                .map_err(|e| AppError::Domain(format!("{display}: invalid instance document: {e}")))?;
            doc.validate()
                .map_err(|m| AppError::Domain(format!("{display}: {m}")))?;
            Ok(match k_flag {
                Some(k) => doc.with_k(k),
                None => doc,
            })
        }
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), AppError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::Domain(format!("failed to serialise output: {e}")))?;
    println!("{text}");
    Ok(())
}

/// Runs `f` on a dedicated rayon pool when a thread count is given;
/// otherwise on the global pool.
fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, AppError> {
    match threads {
        None => Ok(f()),
        Some(count) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(count)
                .build()
                .map_err(|e| AppError::Domain(format!("failed to build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn impurity_row(value: String, v: &CountVector) -> Result<ImpurityRow, AppError> {
    Ok(ImpurityRow {
        value,
        counts: v.counts().to_vec(),
        gini: gini_impurity(v)?,
        entropy: entropy_impurity(v)?,
        entropy_bits: entropy_impurity_base2(v)?,
        weighted_gini: weighted_gini(v),
    })
}

fn cmd_impurity(args: ImpurityArgs) -> Result<(), AppError> {
    let doc = load_document(&args.input, None, false)?;
    let values = doc.values.clone();
    let classes = doc.classes.clone();
    // The group budget plays no role here; force the trivial one so that
    // documents written for larger experiments still score.
    let instance = doc.with_k(1).to_instance()?;
    let per_value = instance
        .vectors()
        .iter()
        .zip(values)
        .map(|(v, name)| impurity_row(name, v))
        .collect::<Result<Vec<_>, _>>()?;
    let total = impurity_row("(total)".into(), &instance.total_vector())?;
    print_json(&ImpurityOutput {
        classes,
        per_value,
        total,
    })
}

fn cmd_solve(args: SolveArgs) -> Result<(), AppError> {
    let doc = load_document(&args.input, args.k, true)?;
    let instance = doc.to_instance()?;
    let result: SolveResult = with_threads(args.threads, || match args.solver {
        SolverKind::Brute => solve_brute_force(&instance),
        SolverKind::Lloyd => solve_lloyd(&instance, args.seed, args.restarts),
        SolverKind::Ptas => PtasConfig::new(instance.k(), args.epsilon).and_then(|config| {
            solve_ptas(
                &instance,
                &config.with_seed(args.seed).with_boost_rounds(args.rounds),
            )
        }),
    })??;
    print_json(&SolveOutput {
        instance: doc,
        solver: result.solver_name.to_string(),
        seed: result.seed,
        assignment: result.assignment,
        objective1: result.objective1,
        objective2: result.objective2,
        wall_time_ms: result.wall_time.as_millis() as u64,
    })
}

fn cmd_reduce(args: ReduceArgs) -> Result<(), AppError> {
    let doc = load_document(&args.input, args.k, true)?;
    let instance = doc.to_instance()?;
    let mut km = normalize(&instance);
    if args.merge_identical {
        km = merge_identical(&km).0;
    }
    print_json(&ReducedDocument {
        d: km.d,
        k: km.k,
        points: km
            .points
            .iter()
            .map(|p| ReducedPoint {
                coords: p.coords.clone(),
                weight: p.weight,
                origin: p.origin,
            })
            .collect(),
        total_weight: km.total_weight,
    })
}

fn cmd_verify_identity(args: VerifyIdentityArgs) -> Result<(), AppError> {
    let doc = load_document(&args.input, None, false)?;
    let instance = doc.with_k(1).to_instance()?;
    let check = gini_gap_identity(instance.vectors())?;
    let residual = check.residual();
    let sse_times_norm = check.sse * check.l1_norm as f64;
    let product_residual = (check.gini_gap - sse_times_norm).abs();
    print_json(&IdentityOutput {
        n: instance.len(),
        d: instance.dim(),
        l1_norm: check.l1_norm,
        gini_gap: check.gini_gap,
        sse: check.sse,
        sse_over_norm: check.scaled_sse,
        sse_times_norm,
        residual,
        product_residual,
        holds: residual <= 1e-9,
        product_holds: product_residual <= 1e-9,
    })
}

fn cmd_hardness_gen(args: HardnessGenArgs) -> Result<(), AppError> {
    let graph = match args.preset {
        Some(graph) => graph,
        None => generate_triangle_free(args.seed, args.vertices, args.edge_prob)?,
    };
    let text = graph.to_edge_list();
    match args.out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| AppError::Domain(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_hardness_check(args: HardnessCheckArgs) -> Result<(), AppError> {
    let display = args.graph.display().to_string();
    let text = std::fs::read_to_string(&args.graph)
        .map_err(|e| AppError::Domain(format!("{display}: {e}")))?;
    let graph = Graph::from_edge_list(&text)?;
    let report = check_cover_bound(&graph)?;
    print_json(&CoverBoundOutput {
        num_vertices: report.num_vertices,
        num_edges: report.num_edges,
        cover_size: report.cover_size,
        cover: report.cover.iter().map(|&v| v + 1).collect(),
        kmeans_opt: report.kmeans_opt,
        bound: report.bound,
        bound_holds: report.bound_holds,
        gini_opt: report.gini_opt,
        identity_residual: report.identity_residual,
        identity_holds: report.identity_holds,
    })
}

fn cmd_bench(args: BenchArgs) -> Result<(), AppError> {
    if args.max_n > ginisplit_core::solvers::brute::BRUTE_FORCE_GUARD {
        return Err(AppError::Usage(format!(
            "--max-n must stay within the exact oracle's limit of {}",
            ginisplit_core::solvers::brute::BRUTE_FORCE_GUARD
        )));
    }
    if args.k_max > ginisplit_core::solvers::ptas::SAMPLING_K_GUARD {
        return Err(AppError::Usage(format!(
            "--k-max must stay within the sampling solver's limit of {}",
            ginisplit_core::solvers::ptas::SAMPLING_K_GUARD
        )));
    }
    if args.k_min > args.k_max {
        return Err(AppError::Usage("--k-min must not exceed --k-max".into()));
    }
    if args.k_max > args.max_n {
        return Err(AppError::Usage("--k-max must not exceed --max-n".into()));
    }
    if args.max_count == 0 {
        return Err(AppError::Usage("--max-count must be at least 1".into()));
    }

    let output = with_threads(args.threads, || -> Result<BenchOutput, AppError> {
        let mut rng = corpus::rng(args.seed);
        let mut rows = Vec::with_capacity(args.count);
        let solver_names = ["lloyd", "ptas"];
        let mut exact = [0usize; 2];
        let mut within = [0usize; 2];
        let mut worst: [Option<f64>; 2] = [None, None];
        let mut unbounded = [0usize; 2];

        for id in 0..args.count {
            let instance: GiniInstance = corpus::random_instance(
                &mut rng,
                args.max_n,
                args.max_d,
                args.max_count,
                args.k_min,
                args.k_max,
            );
            let oracle = solve_brute_force(&instance)?;
            let run_seed = args.seed.wrapping_add(id as u64);
            let lloyd = solve_lloyd(&instance, run_seed, args.restarts)?;
            let config = PtasConfig::new(instance.k(), args.epsilon)
                .map_err(|e| AppError::Usage(e.to_string()))?
                .with_seed(run_seed)
                .with_boost_rounds(args.rounds);
            let ptas = solve_ptas(&instance, &config)?;

            let mut solver_rows = Vec::with_capacity(2);
            for (slot, result) in [&lloyd, &ptas].into_iter().enumerate() {
                let ratio1 = approximation_ratio(result, &oracle, Objective::Cost)?;
                let ratio2 = approximation_ratio(result, &oracle, Objective::Gap)?;
                if ratio2 <= 1.0 + 1e-9 {
                    exact[slot] += 1;
                }
                if ratio2 <= 1.1 {
                    within[slot] += 1;
                }
                if ratio2.is_finite() {
                    worst[slot] = Some(worst[slot].map_or(ratio2, |w: f64| w.max(ratio2)));
                } else {
                    unbounded[slot] += 1;
                }
                solver_rows.push(BenchSolverRow {
                    solver: solver_names[slot].into(),
                    objective1: result.objective1,
                    objective2: result.objective2,
                    ratio1: finite_or_null(ratio1),
                    ratio2: finite_or_null(ratio2),
                });
            }
            rows.push(BenchRow {
                id,
                n: instance.len(),
                d: instance.dim(),
                k: instance.k(),
                oracle_objective1: oracle.objective1,
                oracle_objective2: oracle.objective2,
                solvers: solver_rows,
            });
        }

        let summary = solver_names
            .iter()
            .enumerate()
            .map(|(slot, name)| BenchSummary {
                solver: (*name).into(),
                instances: args.count,
                exact: exact[slot],
                within_ten_percent: within[slot],
                worst_ratio2: worst[slot],
                unbounded: unbounded[slot],
            })
            .collect();
        Ok(BenchOutput {
            seed: args.seed,
            count: args.count,
            epsilon: args.epsilon,
            restarts: args.restarts,
            rounds: args.rounds,
            rows,
            summary,
        })
    })??;
    print_json(&output)
}
