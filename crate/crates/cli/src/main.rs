use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bandit_range::geometry::{build_slabs, min_hitting_set};
use bandit_range::hard_instances::{gen_lb_1d, gen_lb_dd};
use bandit_range::harness::{
    compare_sample_complexity, run_experiment, ExperimentConfig, InstanceSource, RandomSpec,
    RewardKind,
};
use bandit_range::oracles::verify_answers;
use bandit_range::skyline::skyline_of_arms;
use bandit_range::{
    geometry::arms_in_interval, solve, Algorithm, AnswerSet, ArmStreams, Bandit, BestMethod,
    Instance, Interval, Side,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "bandit-range",
    version,
    about = "PAC range searching over stochastic arms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Interval geometry of an instance.
    Geom {
        #[command(subcommand)]
        what: GeomCommand,
    },
    /// Run one left or right skyline on an interval.
    Skyline(SkylineArgs),
    /// Answer every interval of an instance.
    Solve(SolveArgs),
    /// Check an answer file against true means.
    Verify(VerifyArgs),
    /// Run seeded trial batches and report success statistics.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenType {
    Random,
    Lb1d,
    Lbd,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long = "type", value_enum)]
    kind: GenType,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    q: usize,
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Random instances: cut the span into this many blocks so tau is exact.
    #[arg(long)]
    clusters: Option<usize>,
    /// Random instances: constant rewards instead of Bernoulli.
    #[arg(long)]
    constant: bool,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 0.125)]
    eps: f64,
    #[arg(long, default_value_t = 1)]
    tau: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GeomCommand {
    /// Minimum hitting set and the slabs it induces.
    HittingSet {
        #[arg(long)]
        instance: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

#[derive(clap::Args)]
struct SkylineArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Closed interval as `L,R`.
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    interval: Interval,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long, value_enum, default_value = "left")]
    side: SideArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the run trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_parser = parse_algorithm)]
    algo: Algorithm,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_best, default_value = "median-elim")]
    best: BestMethod,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    answers: PathBuf,
    #[arg(long)]
    eps: f64,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// Experiment config file. Without it, `--instance` and `--algo` are required.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Repeat to compare algorithms on the same instance.
    #[arg(long, value_parser = parse_algorithm)]
    algo: Vec<Algorithm>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_best, default_value = "median-elim")]
    best: BestMethod,
    /// Exit non-zero unless every run reaches this success fraction.
    #[arg(long, default_value_t = 0.0)]
    min_success: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_interval(s: &str) -> Result<Interval, String> {
    let (l, r) = s.split_once(',').ok_or("expected L,R")?;
    let l: f64 = l.trim().parse().map_err(|e| format!("{e}"))?;
    let r: f64 = r.trim().parse().map_err(|e| format!("{e}"))?;
    Interval::new(l, r).map_err(|e| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: bandit_range::Error| e.to_string())
}

fn parse_best(s: &str) -> Result<BestMethod, String> {
    s.parse().map_err(|e: bandit_range::Error| e.to_string())
}

fn emit(value: &impl serde::Serialize, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => {
            std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
        }
        None => print_stdout(&text),
    }
}

/// Prints a line to stdout; a closed pipe is not an error.
fn print_stdout(text: &str) -> Result<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn load(path: &Path) -> Result<Instance> {
    Instance::load(path).with_context(|| format!("loading instance {}", path.display()))
}

fn gen(args: GenArgs) -> Result<ExitCode> {
    let instance = match args.kind {
        GenType::Random => RandomSpec {
            clusters: args.clusters,
            rewards: if args.constant {
                RewardKind::Constant
            } else {
                RewardKind::Bernoulli
            },
            ..RandomSpec::new(args.n, args.q, args.d, args.seed)
        }
        .generate()?,
        GenType::Lb1d => gen_lb_1d(args.m, args.eps, args.tau, args.seed)?,
        GenType::Lbd => gen_lb_dd(args.m, args.eps, args.tau, args.d, args.seed)?,
    };
    let text = instance.to_json()?;
    match args.out {
        Some(path) => std::fs::write(&path, text + "\n")?,
        None => print_stdout(&text)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn geom(what: GeomCommand) -> Result<ExitCode> {
    let GeomCommand::HittingSet { instance } = what;
    let instance = load(&instance)?;
    let hs = min_hitting_set(instance.intervals());
    let slabs = build_slabs(&hs)?;
    let slabs: Vec<_> = slabs
        .slabs
        .iter()
        .map(|s| {
            json!({
                "index": s.index,
                "left": s.left.is_finite().then_some(s.left),
                "right": s.right.is_finite().then_some(s.right),
                "arms": arms_in_interval(&instance, &s.as_interval()).len(),
            })
        })
        .collect();
    emit(
        &json!({ "tau": hs.tau(), "points": hs.points, "slabs": slabs }),
        None,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn skyline(args: SkylineArgs) -> Result<ExitCode> {
    let instance = load(&args.instance)?;
    let bandit = Bandit::new(&instance);
    let side = match args.side {
        SideArg::Left => Side::Left,
        SideArg::Right => Side::Right,
    };
    let arms = arms_in_interval(&bandit, &args.interval);
    let out = skyline_of_arms(
        &bandit,
        &arms,
        side,
        args.eps,
        args.delta,
        &mut ArmStreams::new(args.seed),
    )?;
    if let Some(path) = &args.trace {
        emit(&out.trace, Some(path))?;
    }
    emit(
        &json!({ "arms": out.arms, "estimates": out.estimates, "total_pulls": out.trace.total_pulls }),
        None,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn solve_cmd(args: SolveArgs) -> Result<ExitCode> {
    let instance = load(&args.instance)?;
    let bandit = Bandit::new(&instance);
    let answers = solve(
        &bandit,
        args.algo,
        args.eps,
        args.delta,
        args.best,
        &ArmStreams::new(args.seed),
    )?;
    emit(&answers, args.out.as_deref())?;
    if args.out.is_some() {
        emit(
            &json!({ "total_pulls": answers.total_pulls(), "tau": answers.tau() }),
            None,
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let instance = load(&args.instance)?;
    let text = std::fs::read_to_string(&args.answers)
        .with_context(|| format!("reading {}", args.answers.display()))?;
    let answers = AnswerSet::from_json(&text)?;
    let v = verify_answers(&instance, &answers, args.eps)?;
    emit(&v, None)?;
    Ok(if v.all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn bench(args: BenchArgs) -> Result<ExitCode> {
    let configs: Vec<ExperimentConfig> = match (&args.config, &args.instance) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            vec![serde_json::from_str(&text).context("parsing experiment config")?]
        }
        (None, Some(instance)) => {
            if args.algo.is_empty() {
                bail!("--algo is required without --config");
            }
            let source = InstanceSource::Path {
                path: instance.display().to_string(),
            };
            args.algo
                .iter()
                .map(|&a| ExperimentConfig {
                    best: args.best,
                    trials: args.trials,
                    master_seed: args.seed,
                    ..ExperimentConfig::new(source.clone(), a, args.eps, args.delta)
                })
                .collect()
        }
        (None, None) => bail!("give --config or --instance"),
    };
    let out = args
        .out
        .clone()
        .or_else(|| configs[0].output.clone().map(PathBuf::from));
    if let [config] = configs.as_slice() {
        let report = run_experiment(config)?;
        emit(&report, out.as_deref())?;
        eprintln!(
            "success {:.3} over {} verified trials, mean pulls {:.0}",
            report.aggregate.success_fraction,
            report.aggregate.verified_trials,
            report.aggregate.mean_pulls
        );
        return Ok(if report.meets(args.min_success) {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        });
    }
    let table = compare_sample_complexity(&configs)?;
    emit(&table, out.as_deref())?;
    let ok = table
        .rows
        .iter()
        .all(|r| r.success_fraction >= args.min_success);
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Geom { what } => geom(what),
        Command::Skyline(a) => skyline(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
