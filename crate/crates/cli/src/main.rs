mod config;
mod error;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use noveltest::experiments::{run_comparison_with, write_report, ExperimentError};
use noveltest::games;
use noveltest::search::{neatest_search_with, replay_suite, DynamicTestSuite, Mode, Progress, SearchConfig, SearchError};
use noveltest::vm::{GameInstance, GameSpec};

use config::CliConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "noveltest", version, about = "Evolve neural-network test suites for sprite games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a test suite and write it with its coverage timeline.
    Generate(GenerateArgs),
    /// Re-run a suite's networks and report which targets still pass.
    Replay(ReplayArgs),
    /// Run both modes repeatedly and compare their final coverage.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SearchArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `builtin:maze`, `builtin:clicker` or a path to a game JSON file.
    #[arg(long)]
    game: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Total generations across all targets.
    #[arg(long)]
    budget_gens: Option<u64>,
    /// Wall-clock limit in milliseconds (makes runs irreproducible).
    #[arg(long)]
    budget_ms: Option<u64>,
    #[arg(long)]
    population: Option<usize>,
    /// Generations per target before it is deferred.
    #[arg(long)]
    target_gens: Option<u32>,
    /// Evaluation threads; outputs do not depend on it.
    #[arg(long, env = "NOVELTEST_WORKERS")]
    workers: Option<usize>,
    /// No progress output on standard error.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long)]
    mode: Option<Mode>,
    /// Suite file to write.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Coverage timeline CSV to write.
    #[arg(long)]
    timeline: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    suite: PathBuf,
    #[arg(long)]
    game: String,
    /// Replays per target (at most the number of stored seeds).
    #[arg(long, default_value_t = 10)]
    reps: u32,
    #[arg(long, env = "NOVELTEST_WORKERS")]
    workers: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    search: SearchArgs,
    /// Repetitions per mode, at least 2.
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Replay(a) => replay(a),
        Command::Compare(a) => compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("noveltest: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_game(source: &str) -> Result<GameInstance, CliError> {
    let spec = match source.strip_prefix("builtin:") {
        Some(name) => games::builtin(name).ok_or_else(|| {
            CliError::Config(format!("--game: unknown built-in `{name}` (expected one of {:?})", games::BUILTIN_NAMES))
        })?,
        None => {
            let text = fs::read_to_string(source).map_err(|e| CliError::Io(format!("{source}: {e}")))?;
            GameSpec::from_json(&text).map_err(|e| CliError::Io(format!("{source}: not a game spec: {e}")))?
        }
    };
    GameInstance::load(spec).map_err(|e| CliError::Io(format!("{source}: invalid game spec: {e}")))
}

/// Effective search config: defaults, then the file, then flags.
fn resolve(args: &SearchArgs) -> Result<(CliConfig, SearchConfig), CliError> {
    let file = config::load(args.config.as_deref())?;
    let mut cfg = file.search.clone();
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.budget_gens.is_some() || args.budget_ms.is_some() {
        cfg.budget_generations = args.budget_gens;
        cfg.budget_ms = args.budget_ms;
    }
    if let Some(p) = args.population.or(file.keys.population) {
        cfg.neat.population_size = p;
    }
    if let Some(t) = args.target_gens {
        cfg.target_generations = t;
    }
    cfg.workers = args.workers.or(file.keys.workers);
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok((file, cfg))
}

fn game_source(flag: &Option<String>, file: &CliConfig) -> Result<String, CliError> {
    flag.clone()
        .or_else(|| file.keys.game.clone())
        .ok_or_else(|| CliError::Config("--game is required".into()))
}

fn write(path: &Path, body: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn search_error(e: SearchError) -> CliError {
    match e {
        SearchError::Digest { .. } => CliError::Digest(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn progress_line(p: &Progress) -> String {
    format!(
        "gen {:>4}  target {:>3} ({:>2})  best F {:.4}  covered {}/{}",
        p.generation, p.target, p.target_generation, p.best_fitness, p.covered, p.total
    )
}

fn generate(args: GenerateArgs) -> Result<(), CliError> {
    let (file, mut cfg) = resolve(&args.search)?;
    if let Some(m) = args.mode {
        cfg.mode = m;
    }
    let out = args.out.or(file.keys.out.clone()).ok_or_else(|| CliError::Config("--out is required".into()))?;
    let timeline = args.timeline.or(file.keys.timeline.clone());
    let inst = load_game(&game_source(&args.search.game, &file)?)?;

    let quiet = args.search.quiet;
    let outcome = neatest_search_with(&inst, &cfg, &mut |p| {
        if !quiet {
            eprintln!("{}", progress_line(p));
        }
    })
    .map_err(search_error)?;

    write(&out, &outcome.suite.to_json())?;
    if let Some(path) = timeline {
        let run_id = format!("{}-{}", cfg.mode, cfg.seed);
        write(&path, &outcome.timeline.to_csv(&run_id, cfg.mode.as_str()))?;
    }
    println!(
        "{}: covered {}/{} statements ({:.1}%) in {} generations",
        inst.spec().name,
        outcome.suite.covered(),
        outcome.suite.total_statements,
        100.0 * outcome.suite.coverage(),
        outcome.timeline.points.len()
    );
    Ok(())
}

fn replay(args: ReplayArgs) -> Result<(), CliError> {
    if args.reps == 0 {
        return Err(CliError::Config("--reps must be at least 1".into()));
    }
    if args.workers == Some(0) {
        return Err(CliError::Config("--workers must be positive".into()));
    }
    let text = fs::read_to_string(&args.suite).map_err(|e| CliError::Io(format!("{}: {e}", args.suite.display())))?;
    let suite = DynamicTestSuite::from_json(&text)
        .map_err(|e| CliError::Io(format!("{}: not a suite: {e}", args.suite.display())))?;
    let inst = load_game(&args.game)?;
    let pool = rayon_pool(args.workers)?;
    let report = pool.install(|| replay_suite(&suite, &inst, Some(args.reps))).map_err(search_error)?;

    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{:>6}  {:>7}  result", "target", "passed");
    for t in &report.targets {
        let verdict = if t.pass() { "pass" } else { "FAIL" };
        let _ = writeln!(stdout, "{:>6}  {:>3}/{:<3}  {verdict}", t.target, t.passed, t.reps);
    }
    let failures = report.failures();
    let _ = writeln!(stdout, "{} of {} targets passed", report.targets.len() - failures.len(), report.targets.len());
    if failures.is_empty() {
        Ok(())
    } else {
        let list: Vec<String> = failures.iter().map(ToString::to_string).collect();
        Err(CliError::ReplayFailed(format!("failing targets: {}", list.join(", "))))
    }
}

fn rayon_pool(workers: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn compare(args: CompareArgs) -> Result<(), CliError> {
    let (file, cfg) = resolve(&args.search)?;
    let reps = args.reps.or(file.keys.repetitions).ok_or_else(|| CliError::Config("--reps is required".into()))?;
    if reps < 2 {
        return Err(CliError::Config(format!("--reps must be at least 2 for statistics, got {reps}")));
    }
    let out_dir = args.out_dir.or(file.keys.out_dir.clone()).ok_or_else(|| CliError::Config("--out-dir is required".into()))?;
    let inst = load_game(&game_source(&args.search.game, &file)?)?;

    let quiet = args.search.quiet;
    let report = run_comparison_with(&inst, &cfg, reps, cfg.seed, &mut |mode, rep, p| {
        if !quiet {
            eprintln!("{mode} rep {rep}  {}", progress_line(p));
        }
    })
    .map_err(|e| match e {
        ExperimentError::Search(s) => search_error(s),
        ExperimentError::Io { .. } => CliError::Io(e.to_string()),
        other => CliError::Config(other.to_string()),
    })?;
    write_report(&report, &out_dir).map_err(|e| CliError::Io(e.to_string()))?;

    println!("{}: {} repetitions per mode, seed {}", report.game, reps, report.seed);
    for mode in Mode::ALL {
        let events: Vec<String> = report.events[&mode].iter().map(|(k, v)| format!("{k} {v}/{reps}")).collect();
        println!("  {mode:<8} median coverage {:.4}  {}", report.median(mode), events.join("  "));
    }
    println!("A12(novelty, fitness) = {:.4}  U = {}  p = {:.4}{}", report.a12, report.u, report.p, if report.significant { "  (significant)" } else { "" });
    println!("report written to {}", out_dir.display());
    Ok(())
}
