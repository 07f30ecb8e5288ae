//! `topocube`: one subcommand per toolkit module. Every JSON report carries
//! the tool version, the seed and a SHA-256 of the inputs read.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use report::{emit, internal, invalid, to_pretty, CliResult, Inputs, Provenance};
use topocube::complex::{build_complex, components, enumerate_solutions, SolutionSet, DEFAULT_CAP};
use topocube::formula::{
    localize_auxiliaries, pad_to_3cnf, parse_dimacs, split_to_3cnf, word_to_bitstring, Assignment, CnfFormula,
};
use topocube::gadgets::{
    combine, expander_embed, make_gadget_b, make_ring_gadget, ring_certificate, verify_gadget_family, GadgetInstance,
    VarAllocator,
};
use topocube::graph::SimpleGraph;
use topocube::homology::{betti_of_solutions, compare_homology};
use topocube::querymodel::{adversary_run, AdversaryFamily, ScriptedStrategy, Verdict};
use topocube::randomlab::{
    eps_preset_log, expected_faces, face_count, mc_face_survival, mcmc_sample, phi, phi_root, q_exact, q_limit,
    shattering_sweep, sweep_csv, vr_persistence, FaceStatParams, SurvivalVariant, DEFAULT_EPS_GRID,
};
use topocube::spectral::{analyze, config_graph, effective_coupling_bound, WeightedGraph, EXACT_CHEEGER_LIMIT};

#[derive(Parser, Debug)]
#[command(name = "topocube", version, about = "Cubical solution complexes of CNF formulas")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Betti numbers of the solution complex of a DIMACS formula.
    Homology(HomologyArgs),
    /// Face lists of the solution complex as JSON.
    Complex(ComplexArgs),
    /// Rewrites a formula into 3-CNF or localizes shared variables.
    Reduce(ReduceArgs),
    /// Builds and certifies gadget families.
    Gadget(GadgetArgs),
    /// Colouring formula with one XOR cycle gadget per fundamental cycle.
    Expander(ExpanderArgs),
    /// Random 3-SAT statistics, sampling and persistence.
    Randomlab(RandomlabArgs),
    /// Laplacian spectra and conductance of solution graphs.
    Spectral(SpectralArgs),
    /// Plays a scripted query strategy against the subcube adversary.
    Adversary(AdversaryArgs),
}

#[derive(Args, Debug)]
struct HomologyArgs {
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(Args, Debug)]
struct ComplexArgs {
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long)]
    max_dim: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReduceMode {
    Split,
    Pad,
    Localize,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum ReduceEmit {
    Json,
    Dimacs,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long, value_enum, default_value_t = ReduceMode::Split)]
    mode: ReduceMode,
    /// Gadget id per clause, whitespace separated (localize mode).
    #[arg(long)]
    partition: Option<PathBuf>,
    /// Compare Betti numbers before and after.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long, value_enum, default_value_t = ReduceEmit::Json)]
    emit: ReduceEmit,
}

#[derive(Args, Debug)]
struct GadgetArgs {
    #[arg(value_enum)]
    kind: GadgetChoice,
    /// Number of disjoint instances.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Attach certificates.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GadgetChoice {
    B,
    Ring,
}

#[derive(Args, Debug)]
struct ExpanderArgs {
    /// Edge list, one `u v` pair per line.
    #[arg(long)]
    graph: PathBuf,
    /// Pad short clauses so every clause has width 3.
    #[arg(long)]
    strict3: bool,
}

#[derive(Args, Debug)]
struct RandomlabArgs {
    #[command(subcommand)]
    command: LabCommand,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Variant {
    Fixed,
    Exhaustive,
}

#[derive(Subcommand, Debug)]
enum LabCommand {
    /// Probability that a random 3-clause forbids a fixed k-face.
    Q {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Evaluate the large-n limit at this face ratio instead.
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Expected number of surviving k-faces.
    Faces {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
    },
    /// The exponent Φ(γ; α), or its smallest root in γ.
    Phi {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long)]
        root: bool,
    },
    /// Monte-Carlo face survival.
    Mc {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Clause count; defaults to round(alpha n).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Variant::Exhaustive)]
        variant: Variant,
    },
    /// WalkSAT samples of satisfying assignments.
    Sample {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        burn_in: u64,
    },
    /// Vietoris–Rips barcodes of a point set (one bitstring per line) or a sample.
    Vr {
        #[arg(long, conflicts_with = "cnf")]
        points: Option<PathBuf>,
        #[arg(long)]
        cnf: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, value_delimiter = ',')]
        eps_grid: Option<Vec<f64>>,
        /// Use the single scale 3 ln n / n.
        #[arg(long, conflicts_with = "eps_grid")]
        eps_log_preset: bool,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
    },
    /// Solution count, clusters and separations across clause densities (CSV).
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

#[derive(Args, Debug)]
struct SpectralArgs {
    #[command(subcommand)]
    command: SpectralCommand,
}

#[derive(Subcommand, Debug)]
enum SpectralCommand {
    /// Spectrum and conductance of a solution graph or an edge list.
    Analyze {
        #[arg(long, conflicts_with = "graph")]
        cnf: Option<PathBuf>,
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Weight of Hamming-1 edges between solutions.
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Also write the weighted edge list here.
        #[arg(long)]
        edges_out: Option<PathBuf>,
    },
    /// g (n g / Δ)^(w-1).
    CouplingBound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        w: u32,
        #[arg(long)]
        g: f64,
        #[arg(long)]
        delta: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VerdictArg {
    Sat,
    Unsat,
}

#[derive(Args, Debug)]
struct AdversaryArgs {
    /// Number of hidden ring gadgets.
    #[arg(long)]
    m: usize,
    /// Gadget supports to probe, in order (0-based).
    #[arg(long, value_delimiter = ',')]
    probe: Vec<usize>,
    #[arg(long, value_enum, default_value_t = VerdictArg::Sat)]
    verdict: VerdictArg,
    #[arg(long, default_value_t = 64)]
    budget: usize,
    /// Write the transcript as JSON lines here.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code() as u8)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(invalid(anyhow::anyhow!("--threads must be at least 1")));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(internal)?;
    }
    let mut inputs = Inputs::new();
    let (name, body) = match &cli.command {
        Command::Homology(a) => ("homology", cmd_homology(a, &mut inputs)?),
        Command::Complex(a) => ("complex", cmd_complex(a, &mut inputs)?),
        Command::Reduce(a) => {
            let body = cmd_reduce(a, &mut inputs)?;
            if a.emit == ReduceEmit::Dimacs {
                let text = body["dimacs"].as_str().expect("reduce emits dimacs").to_string();
                return emit(cli.out.as_ref(), &text);
            }
            ("reduce", body)
        }
        Command::Gadget(a) => ("gadget", cmd_gadget(a)?),
        Command::Expander(a) => ("expander", cmd_expander(a, &mut inputs)?),
        Command::Randomlab(a) => {
            if let LabCommand::Sweep { n, alpha, trials } = &a.command {
                let rows = shattering_sweep(*n, alpha, *trials, cli.seed).map_err(invalid)?;
                return emit(cli.out.as_ref(), &sweep_csv(&rows));
            }
            ("randomlab", cmd_randomlab(&a.command, cli.seed, &mut inputs)?)
        }
        Command::Spectral(a) => ("spectral", cmd_spectral(&a.command, &mut inputs)?),
        Command::Adversary(a) => ("adversary", cmd_adversary(a)?),
    };
    let prov = Provenance { command: name.to_string(), seed: cli.seed, input_sha256: inputs.digest() };
    emit(cli.out.as_ref(), &to_pretty(&prov.wrap(body)))
}

fn read_cnf(path: &Path, inputs: &mut Inputs) -> CliResult<CnfFormula> {
    let text = inputs.read(path)?;
    parse_dimacs(&text).map_err(|e| invalid(anyhow::Error::new(e).context(format!("parsing {}", path.display()))))
}

fn json<T: serde::Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(internal)
}

fn cmd_homology(a: &HomologyArgs, inputs: &mut Inputs) -> CliResult<Value> {
    let f = read_cnf(&a.cnf, inputs)?;
    let s = enumerate_solutions(&f, a.cap).map_err(invalid)?;
    let betti = betti_of_solutions(&s, a.max_dim);
    let clusters = components(&build_complex(&s, 1.min(s.n())).map_err(internal)?).map_err(internal)?;
    Ok(json!({
        "n": f.num_vars(),
        "clauses": f.clauses().len(),
        "solutions": s.len(),
        "betti": betti.betti,
        "clusters": clusters.len(),
        "min_separation": clusters.min_separation(),
    }))
}

fn cmd_complex(a: &ComplexArgs, inputs: &mut Inputs) -> CliResult<Value> {
    let f = read_cnf(&a.cnf, inputs)?;
    let s = enumerate_solutions(&f, a.cap).map_err(invalid)?;
    let k = build_complex(&s, a.max_dim.unwrap_or(s.n())).map_err(invalid)?;
    let mut v = k.to_json();
    v["face_counts"] = json!(k.face_counts());
    v["euler_characteristic"] = json!(k.euler_characteristic());
    v["complete"] = json!(k.is_complete());
    Ok(v)
}

fn cmd_reduce(a: &ReduceArgs, inputs: &mut Inputs) -> CliResult<Value> {
    let f = read_cnf(&a.cnf, inputs)?;
    let (g, map) = match a.mode {
        ReduceMode::Split => {
            let (g, aux) = split_to_3cnf(&f);
            (g, json(&aux)?)
        }
        ReduceMode::Pad => {
            let (g, aux) = pad_to_3cnf(&f);
            (g, json(&aux)?)
        }
        ReduceMode::Localize => {
            let path = a.partition.as_ref().ok_or_else(|| invalid(anyhow::anyhow!("--partition is required")))?;
            let ids = inputs
                .read(path)?
                .split_whitespace()
                .map(str::parse::<usize>)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| invalid(anyhow::Error::new(e).context("partition entries must be integers")))?;
            let (g, copies) = localize_auxiliaries(&f, &ids).map_err(invalid)?;
            (g, json(&copies)?)
        }
    };
    let comparison =
        if a.verify { Some(json(&compare_homology(&f, &g, a.max_dim, a.cap).map_err(invalid)?)?) } else { None };
    Ok(json!({
        "original_vars": f.num_vars(),
        "reduced_vars": g.num_vars(),
        "reduced_clauses": g.clauses().len(),
        "map": map,
        "comparison": comparison,
        "dimacs": g.to_dimacs(),
    }))
}

fn gadget_json(g: &GadgetInstance) -> Value {
    json!({
        "index": g.index,
        "kind": g.kind,
        "support": g.support,
        "roles": g.roles,
        "cycle_dim": g.cycle_dim,
        "canonical_cycle": g.cycle_patterns(),
    })
}

fn cmd_gadget(a: &GadgetArgs) -> CliResult<Value> {
    if a.count == 0 {
        return Err(invalid(anyhow::anyhow!("--count must be at least 1")));
    }
    let mut alloc = VarAllocator::new(0);
    let gadgets: Vec<GadgetInstance> = (0..a.count)
        .map(|i| match a.kind {
            GadgetChoice::B => make_gadget_b(i, &mut alloc),
            GadgetChoice::Ring => make_ring_gadget(i, &mut alloc),
        })
        .collect();
    let f = combine(&gadgets);
    let mut body = json!({
        "gadgets": gadgets.iter().map(gadget_json).collect::<Vec<_>>(),
        "dimacs": f.to_dimacs(),
    });
    if a.verify {
        body["certificate"] = json(&verify_gadget_family(&f, &gadgets, a.cap).map_err(invalid)?)?;
        if matches!(a.kind, GadgetChoice::Ring) {
            let ring = ring_certificate(a.cap).map_err(invalid)?;
            body["rank"] = json!(ring.printed_rank);
            body["ring"] = json(&ring)?;
        }
    }
    Ok(body)
}

fn cmd_expander(a: &ExpanderArgs, inputs: &mut Inputs) -> CliResult<Value> {
    let text = inputs.read(&a.graph)?;
    let g = SimpleGraph::parse_edge_list(&text).map_err(invalid)?;
    let e = expander_embed(&g).map_err(invalid)?;
    let (formula, padded) = if a.strict3 {
        let (p, aux) = pad_to_3cnf(&e.formula);
        (p, Some(aux.aux_count()))
    } else {
        (e.formula.clone(), None)
    };
    Ok(json!({
        "num_vars": formula.num_vars(),
        "num_clauses": formula.clauses().len(),
        "group_sizes": e.group_sizes,
        "padding_vars": padded,
        "cycles": e.cycles,
        "gadgets": e.gadgets.iter().map(gadget_json).collect::<Vec<_>>(),
        "stats": e.stats,
        "dimacs": formula.to_dimacs(),
    }))
}

fn cmd_randomlab(c: &LabCommand, seed: u64, inputs: &mut Inputs) -> CliResult<Value> {
    match c {
        LabCommand::Q { n, k, gamma } => match (n, k, gamma) {
            (_, _, Some(g)) => Ok(json!({ "mode": "limit", "gamma": g, "q": q_limit(*g).map_err(invalid)? })),
            (Some(n), Some(k), None) => {
                Ok(json!({ "mode": "exact", "n": n, "k": k, "q": q_exact(*n, *k).map_err(invalid)? }))
            }
            _ => Err(invalid(anyhow::anyhow!("give --n and --k, or --gamma"))),
        },
        LabCommand::Faces { n, k, m } => {
            let p = FaceStatParams::new(*n, *k, *m).map_err(invalid)?;
            Ok(
                json!({ "n": n, "k": k, "m": m, "q": q_exact(*n, *k).map_err(invalid)?, "expected": expected_faces(&p).map_err(invalid)? }),
            )
        }
        LabCommand::Phi { alpha, gamma, root } => {
            let mut v = json!({ "alpha": alpha, "gamma": gamma, "phi": phi(*gamma, *alpha).map_err(invalid)? });
            if *root {
                v["root"] = json!(phi_root(*alpha).map_err(invalid)?);
            }
            Ok(v)
        }
        LabCommand::Mc { n, k, m, alpha, trials, variant } => {
            let m = match (m, alpha) {
                (Some(m), _) => *m,
                (None, Some(a)) if a.is_finite() && *a >= 0.0 => (a * *n as f64).round() as usize,
                _ => return Err(invalid(anyhow::anyhow!("give --m or a nonnegative --alpha"))),
            };
            let p = FaceStatParams::new(*n, *k, m).map_err(invalid)?;
            let variant = match variant {
                Variant::Fixed => SurvivalVariant::Fixed,
                Variant::Exhaustive => SurvivalVariant::Exhaustive,
            };
            let est = mc_face_survival(&p, *trials, seed, variant).map_err(invalid)?;
            let closed = expected_faces(&p).map_err(invalid)?;
            let closed = match variant {
                SurvivalVariant::Fixed => closed / face_count(*n, *k),
                SurvivalVariant::Exhaustive => closed,
            };
            Ok(
                json!({ "params": p, "variant": variant, "estimate": est, "closed_form": closed, "sigmas": est.sigmas_from(closed) }),
            )
        }
        LabCommand::Sample { cnf, count, burn_in } => {
            let f = read_cnf(cnf, inputs)?;
            let s = mcmc_sample(&f, *count, *burn_in, seed).map_err(invalid)?;
            let points: Vec<String> = s.points.iter().map(|&w| word_to_bitstring(s.n, w)).collect();
            Ok(json!({ "n": s.n, "steps": s.steps, "points": points }))
        }
        LabCommand::Vr { points, cnf, count, eps_grid, eps_log_preset, max_dim } => {
            let (n, pts) = match (points, cnf) {
                (Some(p), _) => parse_points(&inputs.read(p)?)?,
                (None, Some(c)) => {
                    let f = read_cnf(c, inputs)?;
                    let s = mcmc_sample(&f, *count, 0, seed).map_err(invalid)?;
                    (s.n, s.points)
                }
                (None, None) => return Err(invalid(anyhow::anyhow!("give --points or --cnf"))),
            };
            let grid = if *eps_log_preset {
                vec![eps_preset_log(n.max(2))]
            } else {
                eps_grid.clone().unwrap_or_else(|| DEFAULT_EPS_GRID.to_vec())
            };
            let bars = vr_persistence(&pts, &grid, *max_dim).map_err(invalid)?;
            let distinct = SolutionSet::new(n, pts.clone()).len();
            Ok(json!({ "n": n, "points": pts.len(), "distinct_points": distinct, "eps_grid": grid, "barcodes": bars }))
        }
        LabCommand::Sweep { .. } => unreachable!("sweep writes CSV directly"),
    }
}

fn parse_points(text: &str) -> CliResult<(usize, Vec<u64>)> {
    let mut n = None;
    let mut pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let a = Assignment::from_bitstring(line)
            .ok_or_else(|| invalid(anyhow::anyhow!("line {}: `{line}` is not a bitstring", i + 1)))?;
        if *n.get_or_insert(a.len()) != a.len() {
            return Err(invalid(anyhow::anyhow!("line {}: points must share one length", i + 1)));
        }
        if a.len() > 64 {
            return Err(invalid(anyhow::anyhow!("line {}: points longer than 64 bits", i + 1)));
        }
        pts.push(a.to_word());
    }
    Ok((n.unwrap_or(0), pts))
}

fn cmd_spectral(c: &SpectralCommand, inputs: &mut Inputs) -> CliResult<Value> {
    match c {
        SpectralCommand::Analyze { cnf, graph, g, cap, edges_out } => {
            let (wg, hint) = match (cnf, graph) {
                (Some(p), _) => {
                    let f = read_cnf(p, inputs)?;
                    let wg = config_graph(&f, *g, *cap).map_err(invalid)?;
                    let hint = if wg.len() > EXACT_CHEEGER_LIMIT {
                        let s = enumerate_solutions(&f, *cap).map_err(invalid)?;
                        Some(components(&build_complex(&s, 1.min(s.n())).map_err(internal)?).map_err(internal)?)
                    } else {
                        None
                    };
                    (wg, hint)
                }
                (None, Some(p)) => {
                    let sg = SimpleGraph::parse_edge_list(&inputs.read(p)?).map_err(invalid)?;
                    (WeightedGraph::from_simple_graph(&sg), None)
                }
                (None, None) => return Err(invalid(anyhow::anyhow!("give --cnf or --graph"))),
            };
            let rep = analyze(&wg, hint.as_ref()).map_err(invalid)?;
            if let Some(p) = edges_out {
                emit(Some(p), &wg.to_weighted_edge_list())?;
            }
            json(&rep)
        }
        SpectralCommand::CouplingBound { n, w, g, delta } => {
            let b = effective_coupling_bound(*n, *w, *g, *delta).map_err(invalid)?;
            Ok(json!({ "n": n, "w": w, "g": g, "delta": delta, "bound": b }))
        }
    }
}

fn cmd_adversary(a: &AdversaryArgs) -> CliResult<Value> {
    let family = AdversaryFamily::new(a.m).map_err(invalid)?;
    if let Some(&bad) = a.probe.iter().find(|&&i| i >= a.m) {
        return Err(invalid(anyhow::anyhow!("probe index {bad} outside 0..{}", a.m)));
    }
    let mut strategy = ScriptedStrategy {
        queries: a.probe.iter().map(|&i| family.support_query(i)).collect(),
        verdict: match a.verdict {
            VerdictArg::Sat => Verdict::Sat,
            VerdictArg::Unsat => Verdict::Unsat,
        },
    };
    let rep = adversary_run(a.m, &mut strategy, a.budget).map_err(invalid)?;
    if let Some(p) = &a.transcript {
        emit(Some(p), &rep.transcript_jsonl())?;
    }
    json(&rep)
}
