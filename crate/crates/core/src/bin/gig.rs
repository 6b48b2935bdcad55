use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use gig::cli::{self, exit, CliError, CliResult, RenderFormat};

#[derive(Parser)]
#[command(name = "gig", version, about = "Exact and simulated statistics of greatest-increase grid digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Render the digraph of a labeling file (CSV rows, top row first).
    Build {
        #[arg(long)]
        labels: std::path::PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
    /// Exact probability that a random labeling contains a directed path.
    PathProb {
        #[arg(long)]
        dims: String,
        /// Whitespace-separated row,col tokens.
        #[arg(long)]
        path: String,
    },
    /// Joint sink probability of a vertex set, or sink-count moments.
    #[command(group(ArgGroup::new("what").required(true).args(["vertices", "moments"])))]
    Sinks {
        #[arg(long)]
        dims: String,
        #[arg(long)]
        vertices: Option<String>,
        #[arg(long)]
        moments: bool,
    },
    /// Connectivity, component-size and series bounds.
    Bounds {
        #[arg(long)]
        dims: Option<String>,
        /// Two coordinates, "r1,c1 r2,c2".
        #[arg(long)]
        connect: Option<String>,
        #[arg(long = "series-eps")]
        series_eps: Option<String>,
    },
    /// Check every closed form against exhaustive enumeration.
    Verify {
        #[arg(long)]
        dims: String,
    },
    /// Monte Carlo estimates from seeded random labelings.
    Simulate {
        #[arg(long)]
        dims: String,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = gig::montecarlo::DEFAULT_SHARDS)]
        shards: usize,
        /// Repeatable: "path:r,c r,c ...", "sinks:r,c ...", "connect:r,c r,c".
        #[arg(long)]
        events: Vec<String>,
    },
}

fn run(command: Command) -> CliResult<(u8, String)> {
    let ok = |s: String| Ok((exit::OK, s));
    match command {
        Command::Build { labels, format } => {
            let text = std::fs::read_to_string(&labels)
                .map_err(|e| CliError::input(format!("{}: {e}", labels.display())))?;
            let format = match format {
                Format::Dot => RenderFormat::Dot,
                Format::Json => RenderFormat::Json,
            };
            ok(cli::cmd_build(&text, format)?)
        }
        Command::PathProb { dims, path } => ok(cli::cmd_path_prob(cli::parse_dims(&dims)?, &path)?),
        Command::Sinks { dims, vertices, moments } => {
            let dims = cli::parse_dims(&dims)?;
            match vertices {
                Some(v) if !moments => ok(cli::cmd_sink_set(dims, &v)?),
                None => ok(cli::cmd_moments(dims)?),
                Some(_) => Err(CliError::input("pass either --vertices or --moments")),
            }
        }
        Command::Bounds { dims, connect, series_eps } => {
            let dims = dims.as_deref().map(cli::parse_dims).transpose()?;
            ok(cli::cmd_bounds(dims, connect.as_deref(), series_eps.as_deref())?)
        }
        Command::Verify { dims } => {
            let oracle = cli::oracle_from_env(std::env::var(cli::ORACLE_CAP_ENV).ok())?;
            cli::cmd_verify(cli::parse_dims(&dims)?, &oracle)
        }
        Command::Simulate { dims, trials, seed, shards, events } => {
            ok(cli::cmd_simulate(cli::parse_dims(&dims)?, trials, seed, shards, &events)?)
        }
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match run(args.command) {
        Ok((code, out)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
