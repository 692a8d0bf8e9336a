use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use exitlab::eval::{self, AgentSpec, PayoffTable, DEFAULT_GAMES_PER_PAIR, DEFAULT_POPULATION};
use exitlab::game::GameKind;
use exitlab::io;
use exitlab::par::Execution;
use exitlab::search::DEFAULT_ITERATIONS;
use exitlab::train::{self, TrainConfig, Variant};

#[derive(Parser, Debug)]
#[command(name = "exitlab", version, about = "Expert Iteration self-play training and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train an apprentice by self-play and write checkpoints.
    Train(TrainArgs),
    /// Play a round-robin tournament and write payoff tables.
    Evaluate(EvaluateArgs),
    /// Rank agents by alpha-rank over one or more payoff tables.
    Rank(RankArgs),
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long, value_parser = parse_game)]
    game: GameKind,
    #[arg(long, value_parser = parse_variant)]
    variant: Option<Variant>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "EXITLAB_OUT_DIR", default_value = "runs")]
    out_dir: PathBuf,
    /// Flat `key = value` file applied before command-line settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra settings as `--key=value`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, hide = true)]
    overrides: Vec<String>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long, value_parser = parse_game)]
    game: GameKind,
    /// Checkpoint paths and/or `uct`, `mc-grave`.
    #[arg(long, num_args = 1.., required = true)]
    agents: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_GAMES_PER_PAIR)]
    games_per_pair: usize,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Payoff CSV path; interval and head-to-head reports are written next to it.
    #[arg(long, default_value = "payoffs.csv")]
    out: PathBuf,
    /// Run matches on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("intensity").required(true).args(["alpha", "sweep"])))]
struct RankArgs {
    #[arg(long, num_args = 1.., required = true)]
    payoffs: Vec<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_POPULATION)]
    m: usize,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    sweep: bool,
    /// Directory for per-table rankings and the aggregate table.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn parse_game(s: &str) -> Result<GameKind, String> {
    s.parse().map_err(|e: exitlab::Error| e.to_string())
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: exitlab::Error| e.to_string())
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<exitlab::Error> for Failure {
    fn from(e: exitlab::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn build_config(args: &TrainArgs) -> Result<TrainConfig, Failure> {
    let usage = |e: exitlab::Error| Failure::Usage(e.to_string());
    let mut cfg = TrainConfig::new(args.game, Variant::Exit);
    if let Some(path) = &args.config {
        let text = io::read_to_string(path).map_err(|e| Failure::Runtime(e.into()))?;
        cfg.apply_text(&text)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        cfg.game = args.game;
    }
    if let Some(v) = args.variant {
        cfg.set("variant", v.name()).map_err(usage)?;
    }
    if let Some(e) = args.episodes {
        cfg.episodes = e;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    for o in &args.overrides {
        let (key, value) = o
            .strip_prefix("--")
            .and_then(|kv| kv.split_once('='))
            .ok_or_else(|| Failure::Usage(format!("expected --key=value, got '{o}'")))?;
        cfg.set(key, value).map_err(usage)?;
    }
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn manifest(cfg: &TrainConfig, status: &str, started: u64, finished: Option<u64>, checkpoints: &[PathBuf]) -> String {
    let mut out = format!(
        "run_id = {}-{}-s{}\ngame = {}\nvariant = {}\nseed = {}\nstatus = {status}\nstarted = {started}\n",
        cfg.game, cfg.label, cfg.seed, cfg.game, cfg.label, cfg.seed
    );
    if let Some(f) = finished {
        out.push_str(&format!("finished = {f}\n"));
    }
    for c in checkpoints {
        out.push_str(&format!("checkpoint = {}\n", c.display()));
    }
    out.push_str("\n[config]\n");
    out.push_str(&cfg.to_text());
    out
}

fn cmd_train(args: TrainArgs) -> Result<(), Failure> {
    let cfg = build_config(&args)?;
    let dir = &args.out_dir;
    let manifest_path = dir.join("manifest.txt");
    let started = now();
    io::write_atomic(&manifest_path, manifest(&cfg, "incomplete", started, None, &[]).as_bytes())
        .context("writing manifest")?;
    let paths = train::run_training_with(&cfg, dir, |s| {
        eprintln!(
            "episode {}/{}  T={}  loss={}",
            s.episode,
            cfg.episodes,
            s.duration,
            s.mean_loss.map_or("-".to_string(), |l| format!("{l:.4}"))
        )
    })
    .context("training")?;
    io::write_atomic(
        &manifest_path,
        manifest(&cfg, "complete", started, Some(now()), &paths).as_bytes(),
    )
    .context("writing manifest")?;
    for p in &paths {
        println!("{}", p.display());
    }
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("payoffs");
    path.with_file_name(format!("{stem}_{suffix}.csv"))
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), Failure> {
    if args.games_per_pair == 0 || args.iterations == 0 {
        return Err(Failure::Usage("--games-per-pair and --iterations must be positive".into()));
    }
    let mut agents = args
        .agents
        .iter()
        .map(|a| AgentSpec::parse(a).with_context(|| format!("loading agent '{a}'")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    eval::dedupe_names(&mut agents);
    let exec = if args.sequential { Execution::Sequential } else { Execution::Parallel };
    let table = eval::tournament(&agents, args.game, args.games_per_pair, args.iterations, args.seed, exec)
        .context("tournament")?;
    io::write_atomic(&args.out, table.to_csv().as_bytes())?;
    io::write_atomic(&sibling(&args.out, "intervals"), table.interval_report()?.as_bytes())?;
    io::write_atomic(&sibling(&args.out, "head_to_head"), table.head_to_head_report()?.as_bytes())?;
    print!("{}", table.to_csv());
    Ok(())
}

fn cmd_rank(args: RankArgs) -> Result<(), Failure> {
    if args.m < 2 {
        return Err(Failure::Usage("--m must be at least 2".into()));
    }
    if let Some(a) = args.alpha {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Failure::Usage("--alpha must be positive".into()));
        }
    }
    let mut results = Vec::new();
    for path in &args.payoffs {
        let text = io::read_to_string(path)?;
        let table = PayoffTable::from_csv(&text).with_context(|| format!("reading {}", path.display()))?;
        let result = match args.alpha {
            Some(a) => eval::alpha_rank(&table, a, args.m)?,
            None => eval::alpha_sweep(&table, args.m, Execution::Parallel)?,
        };
        if result.warning {
            eprintln!(
                "warning: {}: no stable top profile over the alpha grid; using alpha = {}",
                path.display(),
                result.alpha
            );
        }
        let out = args.out_dir.join(format!(
            "{}_alpharank.csv",
            path.file_stem().and_then(|s| s.to_str()).unwrap_or("table")
        ));
        io::write_atomic(&out, result.to_csv().as_bytes())?;
        println!("{}: alpha = {}, residual = {:.1e}", path.display(), result.alpha, result.residual);
        results.push(result);
    }
    let rows = eval::aggregate(&results);
    let csv = eval::aggregate_csv(&rows);
    io::write_atomic(&args.out_dir.join("aggregate.csv"), csv.as_bytes())?;
    println!("{:<24} {:>10} {:>16}", "agent", "top ranks", "avg. mass");
    for r in &rows {
        println!("{:<24} {:>10} {:>16.4}", r.name, r.top_ranks, r.mean_mass);
    }
    let total_ranks: usize = rows.iter().map(|r| r.top_ranks).sum();
    let total_mass: f64 = rows.iter().map(|r| r.mean_mass).sum();
    println!("{:<24} {:>10} {:>16.4}", "total", total_ranks, total_mass);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Rank(a) => cmd_rank(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
