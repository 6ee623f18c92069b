//! `efl`: run exterior-flow analyses on gallery fixtures or ODE configs.

mod dot;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use efl_core::Error;

use report::Context;

#[derive(Parser)]
#[command(name = "efl", version, about = "Ends, completions and limit sets of finite flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fixture gallery.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
    /// Run the checks listed in a config file on its cell map.
    Analyze {
        config: PathBuf,
        #[command(flatten)]
        out: Output,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// End space of the tower.
    Ends(Job),
    /// Limit and bar-limit sets and the map e0.
    Limits(Job),
    /// Completion of the tower.
    Complete(Job),
    /// One of the completeness checkers.
    Check {
        #[arg(value_enum)]
        which: CheckKind,
        #[command(flatten)]
        job: Job,
    },
    /// Basins of the ends, with sampled walks.
    Basins(Job),
    /// A sampled walk and its end.
    Orbit {
        /// Start cell label.
        #[arg(long)]
        from: String,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        job: Job,
    },
    /// Forward against reversed completions.
    Duality(Job),
}

#[derive(Subcommand)]
enum GalleryAction {
    /// Print fixture names and parameters.
    List,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum CheckKind {
    Complete,
    Thm66,
    Separation,
    Compactness,
}

impl CheckKind {
    fn name(self) -> &'static str {
        match self {
            CheckKind::Complete => "complete",
            CheckKind::Thm66 => "thm66",
            CheckKind::Separation => "separation",
            CheckKind::Compactness => "compactness",
        }
    }
}

#[derive(Args)]
struct Job {
    /// Gallery fixture name.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    fixture: Option<String>,
    /// Fixture parameter (depth, cells or resolution).
    #[arg(long)]
    n: Option<usize>,
    /// ODE config file instead of a fixture.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Tower depth for maps (default: number of cells + 1).
    #[arg(long)]
    depth: Option<usize>,
    /// Seed for sampled walks.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write a DOT graph here.
    #[arg(long)]
    dot: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Analysis(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } => Failure::Usage(e.to_string()),
            Error::UnknownFixture(_) => Failure::Usage(format!("--fixture: {e}")),
            e => Failure::Analysis(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Analysis(e)) => {
            let body = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{body}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gallery { action: GalleryAction::List } => {
            for (name, param) in efl_core::gallery::NAMES {
                match param {
                    Some((p, d)) => println!("{name}\t--n {p} (default {d})"),
                    None => println!("{name}"),
                }
            }
            Ok(())
        }
        Command::Analyze { config, out, depth, seed } => {
            let (ctx, checks) = Context::from_config(&config, depth, seed)?;
            let names: Vec<&str> = checks.iter().map(String::as_str).collect();
            emit(&ctx, &names, &out)
        }
        Command::Ends(job) => single(job, "ends"),
        Command::Limits(job) => single(job, "limits"),
        Command::Complete(job) => single(job, "complete"),
        Command::Check { which, job } => single(job, which.name()),
        Command::Basins(job) => single(job, "basins"),
        Command::Duality(job) => single(job, "duality"),
        Command::Orbit { from, steps, job } => {
            let ctx = context(&job)?;
            let start = ctx
                .space
                .cell(&from)
                .ok_or_else(|| Failure::Usage(format!("--from: `{from}` is not a top cell of {}", ctx.name)))?;
            let result = ctx.orbit(start, steps)?;
            write(&ctx, vec![("orbit", result)], &job.out, true)
        }
    }
}

fn context(job: &Job) -> Result<Context, Failure> {
    match (&job.fixture, &job.config) {
        (Some(name), _) => Ok(Context::from_fixture(name, job.n, job.depth, job.seed)?),
        (None, Some(path)) => {
            if job.n.is_some() {
                return Err(Failure::Usage("--n: only applies to gallery fixtures".into()));
            }
            Ok(Context::from_config(path, job.depth, job.seed)?.0)
        }
        (None, None) => Err(Failure::Usage("--fixture: a fixture or --config is required".into())),
    }
}

fn single(job: Job, check: &str) -> Result<(), Failure> {
    let ctx = context(&job)?;
    emit(&ctx, &[check], &job.out)
}

fn emit(ctx: &Context, checks: &[&str], out: &Output) -> Result<(), Failure> {
    let mut results = Vec::new();
    for &c in checks {
        if ctx.map.is_none() && report::NEEDS_MAP.contains(&c) {
            return Err(Failure::Usage(format!("--fixture: {} has no map, which `{c}` needs", ctx.name)));
        }
        results.push((c, ctx.check(c)?));
    }
    let dynamic = checks.iter().all(|c| report::NEEDS_MAP.contains(c));
    write(ctx, results, out, dynamic)
}

fn write(ctx: &Context, results: Vec<(&str, serde_json::Value)>, out: &Output, dynamic: bool) -> Result<(), Failure> {
    let doc = ctx.document(results);
    let mut text = serde_json::to_string_pretty(&doc).expect("reports serialize");
    text.push('\n');
    match &out.json {
        Some(path) => write_file(path, &text, "--json")?,
        None => print!("{text}"),
    }
    if let Some(path) = &out.dot {
        let graph = match (&ctx.map, dynamic) {
            (Some(map), true) => dot::dynamics(&ctx.space, map),
            _ => dot::component_tree(&ctx.space, &ctx.tower)?,
        };
        write_file(path, &graph, "--dot")?;
    }
    Ok(())
}

fn write_file(path: &Path, text: &str, flag: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{flag}: cannot write {}: {e}", path.display())))
}
