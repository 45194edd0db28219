use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::Context;
use clap::{Parser, Subcommand};
use ldx_cli::commands::{self, Source};
use ldx_cli::server::{self, ServeOptions};
use ldx_cli::session::Seat;
use ldx_core::eval::{BenchConfig, GavelConfig};
use ldx_core::generator::SamplerConfig;
use ldx_core::{compile_str, CompileError, CompiledGame};
use serde_json::json;

#[derive(Parser)]
#[command(name = "ldx", version, about = "Compile, play, benchmark and generate ldx board games")]
struct Cli {
    /// Print errors as JSON on stdout instead of text on stderr.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a game; exit status 1 on errors.
    Validate { file: PathBuf },
    /// Action space, pieces and state layout of a game, as JSON.
    Info { file: PathBuf },
    /// Board topology (coordinates, directions, neighbours) as JSON.
    Topology {
        file: PathBuf,
        /// Print the cell numbering instead of JSON.
        #[arg(long)]
        ascii: bool,
    },
    /// Play a game in the terminal.
    Play {
        file: PathBuf,
        #[arg(long, default_value = "human")]
        p1: Seat,
        #[arg(long, default_value = "mcts:100")]
        p2: Seat,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        max_turns: u32,
    },
    /// Random-play throughput at several batch sizes (CSV on stdout).
    Bench {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 8, 64, 512, 1024])]
        batch_sizes: Vec<usize>,
        #[arg(long, default_value_t = 500)]
        episodes: u64,
        #[arg(long, default_value_t = 100)]
        warmup: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write one `<game>.tsv` per game into this directory.
        #[arg(long)]
        tsv_dir: Option<PathBuf>,
    },
    /// Quality heuristics for games or directories of games.
    Gavel {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 100)]
        games: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Full JSON reports instead of CSV.
        #[arg(long)]
        full: bool,
    },
    /// Sample random programs from the grammar.
    Generate {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        max_depth: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Score every sample and print the aggregate row.
        #[arg(long)]
        evaluate: bool,
        #[arg(long, default_value_t = 100)]
        games: u32,
    },
    /// Run the HTTP/WebSocket play server.
    Serve {
        #[arg(long, env = "LDX_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        games_dir: Option<PathBuf>,
        /// Sessions are restored from and saved to this file.
        #[arg(long)]
        snapshot: Option<PathBuf>,
        /// Idle seconds before a session is dropped.
        #[arg(long, default_value_t = 3600)]
        ttl: u64,
    },
}

enum Failure {
    Compile(CompileError),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Failure {
        Failure::Other(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Other(e.into())
    }
}

fn compile(src: &Source) -> Result<CompiledGame, Failure> {
    compile_str(&src.text).map_err(Failure::Compile)
}

fn print_json(v: &impl serde::Serialize) -> Result<(), Failure> {
    println!("{}", serde_json::to_string_pretty(v).map_err(anyhow::Error::from)?);
    Ok(())
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Validate { file } => {
            let src = commands::load_source(&file)?;
            let game = compile(&src)?;
            println!("ok: {} ({} cells, {} actions)", game.name, game.topology.num_cells, game.codec.size);
        }
        Command::Info { file } => print_json(&commands::info(&compile(&commands::load_source(&file)?)?))?,
        Command::Topology { file, ascii } => {
            let game = compile(&commands::load_source(&file)?)?;
            if ascii {
                print!("{}", commands::render_indices(&game));
            } else {
                print_json(&commands::topology(&game))?;
            }
        }
        Command::Play { file, p1, p2, seed, max_turns } => {
            let game = compile(&commands::load_source(&file)?)?;
            let stdin = io::stdin();
            let mut out = io::stdout();
            commands::play(&game, [p1, p2], seed, max_turns, &mut stdin.lock(), &mut out)?;
        }
        Command::Bench { files, batch_sizes, episodes, warmup, seed, tsv_dir } => {
            let mut games = Vec::new();
            for src in commands::expand_paths(&files)? {
                games.push((src.name.clone(), Arc::new(compile(&src)?)));
            }
            let cfg = BenchConfig { batch_sizes, warmup_episodes: warmup, episodes, seed, ..BenchConfig::default() };
            let rows = commands::bench(&games, &cfg);
            print!("{}", commands::bench_csv(&rows));
            if let Some(dir) = tsv_dir {
                std::fs::create_dir_all(&dir)?;
                for (_, g) in &games {
                    std::fs::write(dir.join(format!("{}.tsv", g.name)), commands::bench_tsv(&rows, &g.name))?;
                }
            }
        }
        Command::Gavel { files, games, seed, full } => {
            let sources = commands::expand_paths(&files)?;
            let cfg = GavelConfig { games, seed, ..GavelConfig::default() };
            let reports = commands::gavel(&sources, &cfg);
            if full {
                print_json(&reports)?;
            } else {
                print!("{}", commands::gavel_csv(&reports));
            }
        }
        Command::Generate { count, max_depth, seed, out, evaluate, games } => {
            let sampler = SamplerConfig { max_depth, ..SamplerConfig::default() };
            let gavel = GavelConfig { games, seed, ..GavelConfig::default() };
            let manifest = commands::generate(&out, count, seed, &sampler, evaluate.then_some(&gavel))?;
            let parsed = manifest.games.iter().filter(|g| g.parses).count();
            eprintln!("wrote {count} programs to {} ({parsed} parse)", out.display());
            if let Some(s) = &manifest.summary {
                let mut w = BufWriter::new(io::stdout());
                writeln!(w, "{}\n{}", ldx_core::generator::GenerationSummary::CSV_HEADER, s.csv_row())?;
            }
        }
        Command::Serve { port, games_dir, snapshot, ttl } => {
            let rt = tokio::runtime::Runtime::new().context("starting runtime")?;
            rt.block_on(server::serve(ServeOptions { port, games_dir, snapshot, ttl: Duration::from_secs(ttl) }))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (value, text) = match &f {
                Failure::Compile(e) => (commands::error_json(e), e.to_string()),
                Failure::Other(e) => (json!({ "kind": "Error", "message": format!("{e:#}") }), format!("{e:#}")),
            };
            if json {
                println!("{}", json!({ "v": 1, "error": value }));
            } else {
                match &f {
                    Failure::Compile(e) => eprintln!("{}: {text}", e.kind()),
                    Failure::Other(_) => eprintln!("error: {text}"),
                }
            }
            ExitCode::FAILURE
        }
    }
}
