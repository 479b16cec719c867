mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;
use recsub::algorithms::{GreedyOrder, GreedyTiebreak};
use recsub::bounds::{
    concentration_bound, greedy_expected_bound, required_ck, sampling_approx_ratio, sampling_limit_fraction,
    sampling_lower_bound, upper_bound_estimate,
};
use recsub::experiment::{concentration_check, emit_csv, emit_plotdata, format_csv, run_experiment, ModelSpec};
use recsub::generators::{gen_erdos_renyi, gen_fixed_degree, ErdosRenyiSpec, FixedDegreeSpec};
use recsub::graph::{ratio, validate};
use recsub::io::{read_edge_list, read_subgraph, write_edge_list, write_subgraph};
use recsub::oracle::exact_opt;
use recsub::{solve, Algorithm, BipartiteGraph, Error, ProblemParams, Result, SolverConfig};
use serde::Serialize;

use config::{parse_c_list, PartialSpec};

#[derive(Parser)]
#[command(name = "recsub", version, about = "Recommendation subgraph solvers, bounds and experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random candidate graph and write it as an edge list.
    Gen {
        #[command(subcommand)]
        model: GenModel,
    },
    /// Solve one instance, write the chosen subgraph and print a JSON report.
    Solve(SolveArgs),
    /// Score an existing subgraph against its graph.
    Eval {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        subgraph: PathBuf,
        #[arg(short, long)]
        c: u32,
        #[arg(short, long)]
        a: u32,
    },
    /// Evaluate closed-form bounds.
    Bounds {
        #[command(subcommand)]
        which: BoundsCmd,
    },
    /// Exact optimum of a small graph by exhaustive search with max flow.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(short, long)]
        c: u32,
        #[arg(short, long)]
        a: u32,
        /// Skip the size guard.
        #[arg(long)]
        force: bool,
    },
    /// Run a parameter sweep and write CSV and plot data.
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum GenModel {
    FixedDegree {
        #[arg(short, long)]
        l: usize,
        #[arg(short, long)]
        r: usize,
        #[arg(short, long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    ErdosRenyi {
        #[arg(short, long)]
        l: usize,
        #[arg(short, long)]
        r: usize,
        #[arg(short, long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    FixedDegree,
    ErdosRenyi,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    InputOrder,
    RandomPermutation,
}

#[derive(Clone, Copy, ValueEnum)]
enum TiebreakArg {
    MostCapacity,
    InputOrder,
}

impl From<OrderArg> for GreedyOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::InputOrder => GreedyOrder::InputOrder,
            OrderArg::RandomPermutation => GreedyOrder::RandomPermutation,
        }
    }
}

impl From<TiebreakArg> for GreedyTiebreak {
    fn from(t: TiebreakArg) -> Self {
        match t {
            TiebreakArg::MostCapacity => GreedyTiebreak::MostCapacity,
            TiebreakArg::InputOrder => GreedyTiebreak::InputOrder,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Edge-list file. Without it a graph is generated from --model.
    #[arg(long, conflicts_with = "model")]
    graph: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<ModelKind>,
    #[arg(short, long)]
    l: Option<usize>,
    #[arg(short, long)]
    r: Option<usize>,
    #[arg(short, long)]
    d: Option<usize>,
    #[arg(short, long)]
    p: Option<f64>,
    #[arg(long, value_parser = parse_algo)]
    algo: Algorithm,
    #[arg(short, long)]
    c: u32,
    #[arg(short, long)]
    a: u32,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Seeds both generation and solving.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "input-order")]
    greedy_order: OrderArg,
    #[arg(long, value_enum, default_value = "most-capacity")]
    tiebreak: TiebreakArg,
    /// Where to write the chosen edges.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Smallest ck whose limiting sampling fraction reaches the target, for a = 1..=a-max.
    RequiredCk {
        #[arg(long, default_value_t = 0.95)]
        target: f64,
        #[arg(long, default_value_t = 5)]
        a_max: u32,
    },
    /// Worst-case sampling ratio (a = 1) over a grid of ck.
    ApproxRatio {
        #[arg(long, default_value_t = 0.5)]
        from: f64,
        #[arg(long, default_value_t = 5.0)]
        to: f64,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
    },
    /// Expected sampling coverage for c = 1..=c-max.
    Sampling {
        #[arg(short, long)]
        l: usize,
        #[arg(short, long)]
        r: usize,
        #[arg(short, long, default_value_t = 1)]
        a: u32,
        #[arg(long, default_value_t = 10)]
        c_max: u32,
    },
    /// Expected greedy coverage lower bound on G(l, r, p).
    Greedy {
        #[arg(short, long)]
        l: usize,
        #[arg(short, long)]
        r: usize,
        #[arg(short, long)]
        p: f64,
        #[arg(short, long)]
        c: u32,
        #[arg(short, long)]
        a: u32,
    },
    /// Lower-tail concentration of sampling coverage (a = 1).
    Concentration {
        #[arg(short, long)]
        l: usize,
        #[arg(short, long)]
        r: usize,
        #[arg(short, long)]
        c: u32,
        /// Also measure the tail on this many fixed-degree graphs.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(short, long, default_value_t = 20)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML file with any of the settings below (kebab-case keys).
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_parser = ["fixed-degree", "erdos-renyi", "file"])]
    model: Option<String>,
    #[arg(short, long)]
    l: Option<usize>,
    #[arg(short, long)]
    r: Option<usize>,
    #[arg(short, long)]
    d: Option<usize>,
    #[arg(short, long)]
    p: Option<f64>,
    #[arg(long)]
    path: Option<PathBuf>,
    /// Budgets to sweep: `4`, `1,2,5` or `1..10`.
    #[arg(short, long)]
    c: Option<String>,
    #[arg(short, long)]
    a: Option<u32>,
    #[arg(long, value_delimiter = ',', value_parser = parse_algo)]
    algos: Option<Vec<Algorithm>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum)]
    greedy_order: Option<OrderArg>,
    #[arg(long, value_enum)]
    tiebreak: Option<TiebreakArg>,
    /// Write 0 for elapsed_ms so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
}

fn parse_algo(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable report"));
}

fn load_graph(path: &PathBuf) -> Result<BipartiteGraph> {
    let loaded = read_edge_list(path)?;
    let g = loaded.graph;
    eprintln!("loaded {}: l={} r={} m={}", path.display(), g.l(), g.r(), g.m());
    Ok(g)
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Gen { model } => {
            let (g, out) = match model {
                GenModel::FixedDegree { l, r, d, seed, out } => (gen_fixed_degree(&FixedDegreeSpec { l, r, d, seed })?, out),
                GenModel::ErdosRenyi { l, r, p, seed, out } => (gen_erdos_renyi(&ErdosRenyiSpec { l, r, p, seed })?, out),
            };
            if !g.is_simple() {
                warn!("graph has parallel edges; reading the file back keeps one copy of each");
            }
            write_edge_list(&g, &out)?;
            eprintln!("wrote {}: l={} r={} m={}", out.display(), g.l(), g.r(), g.m());
            Ok(())
        }
        Cmd::Solve(args) => solve_cmd(args),
        Cmd::Eval { graph, subgraph, c, a } => {
            let params = ProblemParams::new(c, a)?;
            let g = load_graph(&graph)?;
            let h = read_subgraph(&subgraph, c as usize)?;
            let violations = validate(&g, &h, c as usize);
            if let Some(first) = violations.first() {
                for v in &violations {
                    eprintln!("{v}");
                }
                return Err(Error::InvalidSubgraph(first.to_string()));
            }
            let covered = recsub::graph::coverage(&g, &h, a)?;
            let upper_bound = upper_bound_estimate(&g, &params);
            print_json(&EvalReport { covered, upper_bound, ratio: ratio(covered, upper_bound), edges: h.edge_count() });
            Ok(())
        }
        Cmd::Bounds { which } => bounds_cmd(which),
        Cmd::Oracle { graph, c, a, force } => {
            let params = ProblemParams::new(c, a)?;
            let g = load_graph(&graph)?;
            let opt = exact_opt(&g, &params, force)?;
            let upper_bound = upper_bound_estimate(&g, &params);
            print_json(&OracleReport { opt, upper_bound });
            Ok(())
        }
        Cmd::Experiment(args) => experiment_cmd(args),
    }
}

#[derive(Serialize)]
struct EvalReport {
    covered: usize,
    upper_bound: usize,
    ratio: f64,
    edges: usize,
}

#[derive(Serialize)]
struct OracleReport {
    opt: usize,
    upper_bound: usize,
}

#[derive(Serialize)]
struct SolveReport {
    algo: Algorithm,
    l: usize,
    r: usize,
    m: usize,
    c: u32,
    a: u32,
    seed: u64,
    #[serde(flatten)]
    report: recsub::CoverageReport,
    stats: recsub::SolveStats,
}

fn solve_cmd(args: SolveArgs) -> Result<()> {
    let params = ProblemParams::new(args.c, args.a)?;
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| Error::Config(format!("--{name} is required with --model")));
    let g = match (&args.graph, args.model) {
        (Some(path), _) => load_graph(path)?,
        (None, Some(ModelKind::FixedDegree)) => {
            let d = need(args.d, "d")?;
            ModelSpec::FixedDegree { l: need(args.l, "l")?, r: need(args.r, "r")?, d }.generate(args.seed)?
        }
        (None, Some(ModelKind::ErdosRenyi)) => {
            let p = args.p.ok_or_else(|| Error::Config("--p is required with --model erdos-renyi".into()))?;
            ModelSpec::ErdosRenyi { l: need(args.l, "l")?, r: need(args.r, "r")?, p }.generate(args.seed)?
        }
        (None, None) => return Err(Error::Config("give --graph or --model".into())),
    };
    for w in params.warnings(&g) {
        warn!("{w}");
    }
    let config = SolverConfig::new(params, args.seed)
        .with_epsilon(args.epsilon)
        .with_greedy(args.greedy_order.into(), args.tiebreak.into());
    let (h, report, stats) = solve(&g, args.algo, &config)?;
    if let Some(out) = &args.out {
        write_subgraph(&h, out)?;
    }
    print_json(&SolveReport {
        algo: args.algo,
        l: g.l(),
        r: g.r(),
        m: g.m(),
        c: args.c,
        a: args.a,
        seed: args.seed,
        report,
        stats,
    });
    Ok(())
}

fn bounds_cmd(which: BoundsCmd) -> Result<()> {
    match which {
        BoundsCmd::RequiredCk { target, a_max } => {
            println!("a,required_ck");
            for a in 1..=a_max {
                println!("{a},{:.2}", required_ck(a, target)?);
            }
        }
        BoundsCmd::ApproxRatio { from, to, step } => {
            if !(step > 0.0 && from > 0.0 && to >= from) {
                return Err(Error::Config("need 0 < from <= to and step > 0".into()));
            }
            println!("ck,approx_ratio");
            let n = ((to - from) / step + 1e-9).floor() as usize;
            for i in 0..=n {
                let ck = from + i as f64 * step;
                println!("{ck:.4},{:.6}", sampling_approx_ratio(ck));
            }
        }
        BoundsCmd::Sampling { l, r, a, c_max } => {
            if l == 0 || r == 0 {
                return Err(Error::Config("l and r must be positive".into()));
            }
            println!("c,ck,expected_covered,limit_fraction");
            for c in 1..=c_max {
                let ck = c as f64 * l as f64 / r as f64;
                println!(
                    "{c},{ck:.4},{:.3},{:.6}",
                    sampling_lower_bound(r as f64, ck, a),
                    sampling_limit_fraction(ck, a)
                );
            }
        }
        BoundsCmd::Greedy { l, r, p, c, a } => {
            let bound = greedy_expected_bound(l as f64, r as f64, p, c, a)?;
            println!("l,r,p,c,a,expected_covered_lower_bound");
            println!("{l},{r},{p},{c},{a},{bound:.3}");
        }
        BoundsCmd::Concentration { l, r, c, trials, d, seed } => {
            if l == 0 || r == 0 {
                return Err(Error::Config("l and r must be positive".into()));
            }
            let ck = c as f64 * l as f64 / r as f64;
            match trials {
                None => {
                    let (threshold, prob) = concentration_bound(r as f64, ck);
                    println!("ck,threshold,prob_bound");
                    println!("{ck:.4},{threshold:.3},{prob:.6e}");
                }
                Some(t) => print_json(&concentration_check((l, r, d), c, t, seed)?),
            }
        }
    }
    Ok(())
}

fn experiment_cmd(args: ExperimentArgs) -> Result<()> {
    let file = match &args.spec {
        Some(p) => PartialSpec::from_file(p)?,
        None => PartialSpec::default(),
    };
    let flags = PartialSpec {
        model: args.model,
        l: args.l,
        r: args.r,
        d: args.d,
        p: args.p,
        path: args.path,
        sweep: None,
        c: args.c.as_deref().map(parse_c_list).transpose().map_err(Error::Config)?,
        a: args.a,
        algos: args.algos,
        trials: args.trials,
        base_seed: args.seed,
        epsilon: args.epsilon,
        greedy_order: args.greedy_order.map(Into::into),
        greedy_tiebreak: args.tiebreak.map(Into::into),
        record_timing: args.no_timing.then_some(false),
    };
    let spec = flags.over(file).resolve()?;
    let out = run_experiment(&spec)?;
    for row in out.rows.iter().filter(|r| r.flagged()) {
        warn!("trial {} c={} a={} {}: covered {} exceeds upper bound {}", row.trial, row.c, row.a, row.algo, row.covered, row.upper_bound);
    }
    match &args.csv {
        Some(path) => emit_csv(&out.rows, path)?,
        None => print!("{}", format_csv(&out.rows)),
    }
    if let Some(path) = &args.plot {
        emit_plotdata(&out.cells, path)?;
    }
    if args.csv.is_some() {
        println!("c,a,algo,mean_ratio,stderr,mean_fraction,skipped");
        for s in &out.cells {
            println!(
                "{},{},{},{:.4},{:.4},{:.4},{}",
                s.c, s.a, s.algo, s.ratio.mean, s.ratio.stderr, s.coverage_fraction.mean, s.skipped
            );
        }
    }
    Ok(())
}
