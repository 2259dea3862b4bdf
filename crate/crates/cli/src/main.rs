//! `schreier`: sample Schreier expanders, measure their spectra, run seeded
//! experiments and compute trace-method bounds.
//!
//! Generator count convention everywhere: `--gens g` gives degree `2g` for
//! regular graphs and degree `g` on each side of a bipartite graph.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use schreier_core::bounds::{
    binary_vertex_count, bound_merged, bound_prop1, optimize_m, ramanujan_ratio,
    require_binary_field, BipartiteVariant, BoundKind, ImprovedBound,
};
use schreier_core::experiments::{
    compare_models, preset, run_distribution, ExperimentSpec, Histogram, RunOptions, PRESET_NAMES,
};
use schreier_core::field::FieldParams;
use schreier_core::graph::{
    AnyGraph, GeneratorSet, GraphDescriptor, GraphKind, Model, Space, DEFAULT_MATERIALIZE_CAP,
};
use schreier_core::seed::{CHILD_SEED_RULE, PRNG_NAME};
use schreier_core::spectral::{
    dense_second_value, measure, threshold_unit, SolverOptions, SpectrumResult, ThresholdKind,
    DEFAULT_DENSE_CAP, DEFAULT_TOL,
};
use schreier_core::Error;

const TOOL: &str = env!("CARGO_PKG_NAME");
const VERSION: &str = env!("CARGO_PKG_VERSION");
const GENS_CONVENTION: &str = "g generators: regular degree 2g, bipartite degree g per side";

mod exit {
    pub const OTHER: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const VALIDATION: u8 = 3;
    pub const NON_CONVERGENCE: u8 = 4;
    pub const RESOURCE: u8 = 5;
}

#[derive(Parser, Debug)]
#[command(name = "schreier", version, about = "Pseudo-random Schreier expanders over finite fields")]
struct Cli {
    /// Progress messages on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample generators and write a graph descriptor.
    Gen(GenArgs),
    /// Summarize a graph descriptor.
    Inspect(InspectArgs),
    /// Second eigenvalue (regular) or singular value (bipartite) of a descriptor.
    Spectrum(SpectrumArgs),
    /// Seeded Monte Carlo histograms of normalized second values.
    Experiment(ExperimentArgs),
    /// Trace-method and merging upper bounds.
    Bound(BoundArgs),
}

#[derive(Args, Debug, Clone)]
struct SpaceArgs {
    /// gl, toeplitz or perm.
    #[arg(long, default_value = "gl")]
    model: Model,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    k: Option<usize>,
    /// Point count for the permutation model (instead of q, k).
    #[arg(long)]
    n: Option<usize>,
    /// Generator count g (degree 2g regular, g bipartite).
    #[arg(long, default_value_t = 15)]
    gens: usize,
}

impl SpaceArgs {
    fn space(&self) -> Result<Space, Error> {
        match (self.model, self.q, self.k, self.n) {
            (_, Some(q), Some(k), None) => Ok(Space::Field(FieldParams::new(q, k)?)),
            (Model::Permutation, None, None, Some(n)) => Ok(Space::Points(n)),
            (Model::Permutation, _, _, _) => Err(Error::InvalidParams(
                "--model perm needs either --q and --k, or --n".into(),
            )),
            (m, _, _, _) => Err(Error::InvalidParams(format!(
                "--model {m} needs --q and --k (and no --n)"
            ))),
        }
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bipartite graph with edges (x, s_j x).
    #[arg(long)]
    bipartite: bool,
    /// Merge right vertices in blocks of gamma (implies --bipartite).
    #[arg(long)]
    gamma: Option<usize>,
    /// Shuffle right vertices before merging.
    #[arg(long, requires = "gamma")]
    shuffle_seed: Option<u64>,
    /// Descriptor path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an edge list `u v multiplicity`.
    #[arg(long)]
    edges: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InspectArgs {
    descriptor: PathBuf,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    descriptor: PathBuf,
    /// Dense eigendecomposition instead of Lanczos.
    #[arg(long)]
    dense: bool,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Largest vertex count accepted by --dense.
    #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
    dense_cap: usize,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// One of fig1..fig5 with suffix -desk or -full.
    #[arg(long, conflicts_with = "spec")]
    preset: Option<String>,
    /// JSON file holding one spec or a list of specs sharing a bin grid.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// regular, bipartite or merged.
    #[arg(long, default_value = "regular")]
    kind: GraphKind,
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long)]
    gamma: Option<usize>,
    #[arg(long, default_value_t = schreier_core::experiments::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = schreier_core::experiments::DEFAULT_BINS)]
    bins: usize,
    /// Master seed (presets derive one seed per spec from it).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    label: Option<String>,
    /// Store raw samples in the sidecar.
    #[arg(long)]
    keep_samples: bool,
    /// Refuse runs above this many generator applications (trials * n * g).
    #[arg(long)]
    work_budget: Option<u128>,
    #[arg(long, env = "SCHREIER_THREADS")]
    threads: Option<usize>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct BoundArgs {
    /// prop1, regular, bipartite or merged.
    #[arg(long)]
    kind: BoundKind,
    /// Dimension; n = q^k - 1.
    #[arg(long)]
    k: Option<usize>,
    /// Generator count (degree 2d regular, d bipartite); d1 for merged.
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 2)]
    q: u32,
    /// single-normalization or as-printed (bipartite only).
    #[arg(long, default_value = "single-normalization")]
    variant: BipartiteVariant,
    #[arg(long)]
    gamma: Option<usize>,
    /// Normalized second value of the unmerged graph.
    #[arg(long)]
    alpha: Option<f64>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams(_)
            | Error::Singular
            | Error::VertexOutOfRange(_)
            | Error::InvalidGenerators(_)
            | Error::MergeDivisibility { .. } => exit::VALIDATION,
            Error::NonConvergence { .. } | Error::Experiment(_) => exit::NON_CONVERGENCE,
            Error::ResourceCap(_) => exit::RESOURCE,
            _ => exit::OTHER,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: exit::OTHER, message: e.to_string() }
    }
}

fn parse_failure(path: &Path, e: serde_json::Error) -> Failure {
    Failure {
        code: exit::PARSE,
        message: format!("{}: {e}", path.display()),
    }
}

fn validation(msg: impl Into<String>) -> Failure {
    Failure { code: exit::VALIDATION, message: msg.into() }
}

type CmdResult = Result<(), Failure>;

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn write_output(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn read_descriptor(path: &Path) -> Result<GraphDescriptor, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure { code: exit::OTHER, message: format!("{}: {e}", path.display()) })?;
    serde_json::from_str(&text).map_err(|e| parse_failure(path, e))
}

fn tool_meta() -> Value {
    json!({ "tool": TOOL, "version": VERSION })
}

fn graph_facts(graph: &AnyGraph) -> Value {
    let gens = graph.generators();
    let (dl, dr) = graph.degrees();
    let mut facts = json!({
        "type": graph.kind(),
        "model": gens.model(),
        "generators": gens.len(),
        "gens_convention": GENS_CONVENTION,
        "seed": gens.seed(),
    });
    let obj = facts.as_object_mut().unwrap();
    if let Some(p) = gens.field_params() {
        obj.insert("q".into(), json!(p.q()));
        obj.insert("k".into(), json!(p.k()));
    }
    match graph {
        AnyGraph::Regular(g) => {
            obj.insert("n".into(), json!(g.n()));
            obj.insert("degree".into(), json!(g.degree()));
        }
        _ => {
            obj.insert("n".into(), json!(gens.n()));
            let (nl, nr) = match graph {
                AnyGraph::Bipartite(b) => (b.n(), b.n()),
                AnyGraph::Merged(m) => (m.base().n(), m.base().n() / m.gamma()),
                AnyGraph::Regular(_) => unreachable!(),
            };
            obj.insert("left_size".into(), json!(nl));
            obj.insert("right_size".into(), json!(nr));
            obj.insert("left_degree".into(), json!(dl));
            obj.insert("right_degree".into(), json!(dr));
        }
    }
    if let AnyGraph::Merged(m) = graph {
        obj.insert("gamma".into(), json!(m.gamma()));
    }
    facts
}

fn threshold_of(graph: &AnyGraph) -> Result<f64, Error> {
    let (dl, dr) = graph.degrees();
    threshold_unit(match graph {
        AnyGraph::Regular(_) => ThresholdKind::Regular { degree: dl },
        _ => ThresholdKind::Bipartite { left: dl, right: dr },
    })
}

fn cmd_gen(args: &GenArgs) -> CmdResult {
    let space = args.space.space()?;
    let kind = match (args.gamma, args.bipartite) {
        (Some(_), _) => GraphKind::Merged,
        (None, true) => GraphKind::Bipartite,
        (None, false) => GraphKind::Regular,
    };
    let gens = GeneratorSet::sample(args.space.model, space, args.space.gens, args.seed)?;
    let graph = AnyGraph::build(kind, gens, args.gamma, args.shuffle_seed)?;
    let mut desc = graph.to_descriptor();
    let mut meta = graph_facts(&graph);
    let obj = meta.as_object_mut().unwrap();
    obj.insert("tool".into(), tool_meta());
    obj.insert(
        "config".into(),
        json!({
            "model": args.space.model,
            "q": args.space.q,
            "k": args.space.k,
            "n": args.space.n,
            "gens": args.space.gens,
            "seed": args.seed,
            "bipartite": args.bipartite,
            "gamma": args.gamma,
            "shuffle_seed": args.shuffle_seed,
            "prng": PRNG_NAME,
        }),
    );
    desc.meta = Some(meta);
    if let Some(path) = &args.edges {
        let adj = graph.materialize(DEFAULT_MATERIALIZE_CAP)?;
        let file = std::io::BufWriter::new(fs::File::create(path)?);
        adj.write_edge_list(file, kind == GraphKind::Regular)?;
    }
    write_output(args.out.as_deref(), &to_json(&desc))?;
    Ok(())
}

fn cmd_inspect(args: &InspectArgs) -> CmdResult {
    let desc = read_descriptor(&args.descriptor)?;
    let graph = AnyGraph::from_descriptor(&desc)?;
    let mut facts = graph_facts(&graph);
    let obj = facts.as_object_mut().unwrap();
    obj.insert("threshold_unit".into(), json!(threshold_of(&graph)?));
    obj.insert("vertex_count".into(), json!(graph.vertex_count()));
    obj.insert("shuffle_seed".into(), json!(desc.shuffle_seed));
    obj.insert("tool".into(), tool_meta());
    write_output(None, &to_json(&facts))?;
    Ok(())
}

#[derive(Serialize)]
struct SpectrumOutput {
    #[serde(flatten)]
    result: SpectrumResult,
    meta: Value,
}

fn cmd_spectrum(args: &SpectrumArgs) -> CmdResult {
    if !(args.tol > 0.0) {
        return Err(validation("--tol must be positive"));
    }
    let desc = read_descriptor(&args.descriptor)?;
    let graph = AnyGraph::from_descriptor(&desc)?;
    let result = if args.dense {
        dense_second_value(&graph, args.dense_cap)?
    } else {
        measure(&graph, &SolverOptions::with_tol(args.tol)).inspect_err(|e| {
            if let Error::NonConvergence { estimate, residual, iterations } = e {
                eprintln!(
                    "solver did not reach tolerance {}: estimate {estimate}, residual {residual}, {iterations} iterations",
                    args.tol
                );
            }
        })?
    };
    let mut meta = graph_facts(&graph);
    let obj = meta.as_object_mut().unwrap();
    obj.insert("tool".into(), tool_meta());
    obj.insert(
        "config".into(),
        json!({ "dense": args.dense, "tol": args.tol, "dense_cap": args.dense_cap }),
    );
    write_output(None, &to_json(&SpectrumOutput { result, meta }))?;
    Ok(())
}

fn flag_spec(args: &ExperimentArgs) -> Result<ExperimentSpec, Failure> {
    let s = &args.space;
    Ok(ExperimentSpec {
        label: args.label.clone(),
        kind: args.kind,
        model: s.model,
        q: s.q,
        k: s.k,
        n: s.n,
        g: s.gens,
        gamma: args.gamma,
        trials: args.trials,
        bins: args.bins,
        master_seed: args.seed,
        tol: args.tol,
        keep_samples: args.keep_samples,
    })
}

fn read_spec_file(path: &Path) -> Result<Vec<ExperimentSpec>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure { code: exit::OTHER, message: format!("{}: {e}", path.display()) })?;
    let value: Value = serde_json::from_str(&text).map_err(|e| parse_failure(path, e))?;
    if value.is_array() {
        serde_json::from_value(value).map_err(|e| parse_failure(path, e))
    } else {
        serde_json::from_value(value).map(|s| vec![s]).map_err(|e| parse_failure(path, e))
    }
}

fn sidecar(spec: &ExperimentSpec, hist: &Histogram, group: &[String], preset: Option<&str>) -> Value {
    json!({
        "label": hist.label,
        "preset": preset,
        "spec": spec,
        "gens_convention": GENS_CONVENTION,
        "seed_lineage": {
            "master_seed": spec.master_seed,
            "prng": PRNG_NAME,
            "child_seed_rule": CHILD_SEED_RULE,
            "trial_seed": "child_seed(master_seed, t) for t in 0..trials",
        },
        "unit": hist.unit,
        "trials": hist.trials,
        "failures": hist.failures,
        "summary": hist.summary,
        "edges": hist.edges,
        "counts": hist.counts,
        "samples": hist.samples,
        "shared_grid_with": group,
        "tool": tool_meta(),
    })
}

fn cmd_experiment(args: &ExperimentArgs, verbose: bool) -> CmdResult {
    let (name, groups) = match (&args.preset, &args.spec) {
        (Some(name), _) => {
            let p = preset(name, args.seed).map_err(|_| {
                validation(format!(
                    "unknown preset '{name}', expected one of {}",
                    PRESET_NAMES.join(", ")
                ))
            })?;
            (Some(p.name), p.groups)
        }
        (None, Some(path)) => (None, vec![read_spec_file(path)?]),
        (None, None) => (None, vec![vec![flag_spec(args)?]]),
    };
    let opts = RunOptions { threads: args.threads, work_budget: args.work_budget };
    fs::create_dir_all(&args.out_dir)?;
    let mut index = Vec::new();
    for group in groups {
        let labels: Vec<String> = group.iter().map(|s| s.display_label()).collect();
        if verbose {
            eprintln!("running {}", labels.join(", "));
        }
        let hists = if group.len() == 1 {
            vec![run_distribution(&group[0], &opts)?]
        } else {
            compare_models(&group, &opts)?
        };
        for (spec, hist) in group.iter().zip(&hists) {
            let stem = match name {
                Some(p) => format!("{p}-{}", hist.label),
                None => hist.label.clone(),
            };
            let csv = args.out_dir.join(format!("{stem}.csv"));
            let side = args.out_dir.join(format!("{stem}.json"));
            fs::write(&csv, hist.to_csv())?;
            fs::write(&side, to_json(&sidecar(spec, hist, &labels, name)))?;
            index.push(json!({
                "label": hist.label,
                "csv": csv,
                "sidecar": side,
                "mean": hist.summary.mean,
                "ramanujan_fraction": hist.summary.ramanujan_fraction,
                "failures": hist.failures,
            }));
        }
    }
    write_output(None, &to_json(&index))?;
    Ok(())
}

#[derive(Serialize)]
struct BoundOutput {
    kind: BoundKind,
    k: Option<usize>,
    d: usize,
    m_used: usize,
    value: f64,
    ramanujan: f64,
    trace: Vec<schreier_core::bounds::TracePoint>,
    variant: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    meta: Value,
}

fn cmd_bound(args: &BoundArgs) -> CmdResult {
    let need_k = || args.k.ok_or_else(|| validation(format!("--kind {} needs --k", args.kind)));
    let mut out = BoundOutput {
        kind: args.kind,
        k: args.k,
        d: args.d,
        m_used: 0,
        value: 0.0,
        ramanujan: ramanujan_ratio(args.kind, args.d),
        trace: Vec::new(),
        variant: args.kind.to_string(),
        gamma: None,
        alpha: None,
        meta: json!({ "q": args.q, "gens_convention": GENS_CONVENTION, "tool": tool_meta() }),
    };
    match args.kind {
        BoundKind::Prop1 => {
            let k = need_k()?;
            let n = if args.q == 2 {
                binary_vertex_count(k)
            } else {
                FieldParams::new(args.q, 1)?;
                (args.q as f64).powi(k as i32) - 1.0
            };
            out.value = bound_prop1(n, args.d)?;
        }
        BoundKind::Regular | BoundKind::Bipartite => {
            let k = need_k()?;
            require_binary_field(args.q)?;
            let kind = if args.kind == BoundKind::Regular {
                ImprovedBound::Regular
            } else {
                ImprovedBound::Bipartite(args.variant)
            };
            let r = optimize_m(kind, k, args.d)?;
            out.value = r.value;
            out.m_used = r.m_used;
            out.trace = r.trace;
            out.variant = r.variant;
        }
        BoundKind::Merged => {
            let gamma = args.gamma.ok_or_else(|| validation("--kind merged needs --gamma"))?;
            let alpha = args.alpha.ok_or_else(|| validation("--kind merged needs --alpha"))?;
            out.value = bound_merged(args.d, gamma, alpha)?;
            // Non-normalized threshold of the (d, gamma d) biregular graph.
            out.ramanujan = threshold_unit(ThresholdKind::Bipartite {
                left: args.d,
                right: gamma * args.d,
            })?;
            out.gamma = Some(gamma);
            out.alpha = Some(alpha);
        }
    }
    write_output(None, &to_json(&out))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(exit::PARSE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let verbose = cli.verbose > 0;
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Inspect(a) => cmd_inspect(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Experiment(a) => cmd_experiment(a, verbose),
        Command::Bound(a) => cmd_bound(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
