use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use mmlhub::names::EntryKind;
use mmlhub::platform::views::{self, GraphFormat, DEFAULT_NAME_LIMIT, DEFAULT_THEOREM_LIMIT};
use mmlhub::platform::{http, Config, Platform, PlatformError};

#[derive(Parser)]
#[command(name = "mmlhub", version, about = "Annotate, search and explore a library of Mizar articles")]
struct Cli {
    /// Configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Data directory; overrides the configuration.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a directory of .miz files and make it the served corpus.
    Ingest {
        dir: PathBuf,
        #[arg(long, default_value = "unlabeled")]
        label: String,
    },
    #[command(subcommand)]
    Graph(GraphCommand),
    #[command(subcommand)]
    Search(SearchCommand),
    #[command(subcommand)]
    Comments(CommentsCommand),
    /// Start the HTTP service.
    Serve,
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Print the dependency graph.
    Export {
        format: Format,
        #[arg(long)]
        reduced: bool,
    },
    /// Print `NAME<TAB>LAYER` for every article.
    Layers,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
    Sfdp,
}

#[derive(Subcommand)]
enum SearchCommand {
    /// Incremental search over article names and symbols.
    Names {
        query: String,
        #[arg(long, value_parser = ["article", "symbol"])]
        kind: Option<String>,
        #[arg(long, default_value_t = DEFAULT_NAME_LIMIT)]
        limit: usize,
    },
    /// Semantic search over theorem and definition statements.
    Theorems {
        query: String,
        #[arg(long, default_value_t = DEFAULT_THEOREM_LIMIT)]
        limit: usize,
    },
}

#[derive(Subcommand)]
enum CommentsCommand {
    /// Preview how comments would carry over from one corpus to another.
    Rebase { old: PathBuf, new: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_internal() { 2 } else { 1 })
        }
    }
}

fn config(cli: &Cli) -> Result<Config, PlatformError> {
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    }
    .with_env_overrides()?;
    if let Some(data) = &cli.data {
        config.data_dir = data.clone();
    }
    Ok(config)
}

fn open(config: &Config) -> Result<Platform, PlatformError> {
    Platform::open(config)
}

fn check_dir(dir: &Path) -> Result<(), PlatformError> {
    if dir.is_dir() {
        Ok(())
    } else {
        Err(PlatformError::NotFound(format!("directory {}", dir.display())))
    }
}

fn run(cli: Cli) -> Result<(), PlatformError> {
    let config = config(&cli)?;
    match cli.command {
        Command::Ingest { dir, label } => {
            check_dir(&dir)?;
            let platform = open(&config)?;
            let outcome = platform.ingest(&dir, &label)?;
            let report = outcome.report.map(|r| serde_json::to_string(&r).expect("serializable"));
            println!(
                "{{\"state\":{},\"report\":{}}}",
                views::summary_json(&outcome.state),
                report.as_deref().unwrap_or("null")
            );
        }
        Command::Graph(cmd) => {
            let state = open(&config)?.snapshot()?;
            match cmd {
                GraphCommand::Export { format, reduced } => {
                    let format = match format {
                        Format::Dot => GraphFormat::Dot,
                        Format::Json => GraphFormat::Json,
                        Format::Sfdp => GraphFormat::Sfdp,
                    };
                    let text = views::graph_text(&state, format, reduced);
                    if format == GraphFormat::Json {
                        println!("{text}");
                    } else {
                        print!("{text}");
                    }
                }
                GraphCommand::Layers => print!("{}", views::layers_table(&state)),
            }
        }
        Command::Search(cmd) => {
            let state = open(&config)?.snapshot()?;
            match cmd {
                SearchCommand::Names { query, kind, limit } => {
                    let kind = kind.map(|k| k.parse::<EntryKind>()).transpose().map_err(PlatformError::BadRequest)?;
                    println!("{}", views::names_json(&state, &query, kind, limit));
                }
                SearchCommand::Theorems { query, limit } => {
                    println!("{}", views::theorems_json(&state, &query, limit));
                }
            }
        }
        Command::Comments(CommentsCommand::Rebase { old, new }) => {
            check_dir(&old)?;
            check_dir(&new)?;
            let platform = open(&config)?;
            let report = platform.preview_update(&old, &new)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
        }
        Command::Serve => {
            let platform = Arc::new(open(&config)?);
            if platform.snapshot().is_err() {
                log::warn!("no corpus ingested yet; run `mmlhub ingest` first");
            }
            let runtime = tokio::runtime::Runtime::new().map_err(|e| PlatformError::io(Path::new("runtime"), e))?;
            runtime
                .block_on(http::serve(platform, config.listen))
                .map_err(|e| PlatformError::io(Path::new(&config.listen.to_string()), e))?;
        }
    }
    Ok(())
}
