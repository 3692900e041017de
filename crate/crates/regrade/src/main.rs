use clap::{Parser, Subcommand};
use regrade::cli::{
    catalog_entries, cmd_analyze, cmd_classify, cmd_identity, cmd_matrix, render_analysis_text,
    render_classify_text, render_examples_text, render_identity_text, render_json,
    render_matrix_text, Options,
};
use regrade::Error;
use std::io::Write;
use std::process::ExitCode;

/// Exact arithmetic for regular group gradings: structural analysis,
/// commutation matrices, canonical classification, and graded
/// polynomial identities.
#[derive(Parser)]
#[command(name = "regrade", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit JSON instead of aligned text.
    #[arg(long, global = true)]
    json: bool,

    /// Degree bound for regularity sweeps and identity checks.
    #[arg(long, global = true, value_name = "D")]
    max_degree: Option<usize>,

    /// Rank of the truncated Grassmann algebra used for envelopes.
    #[arg(long, global = true, value_name = "K")]
    grassmann_rank: Option<u32>,

    /// Run brute-force cross-checks alongside the structural ones.
    #[arg(long, global = true)]
    oracle: bool,

    /// Include the full matrix entries in matrix output.
    #[arg(long, global = true)]
    dump_matrix: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Full structural report for a catalog entry or JSON descriptor.
    Analyze { input: String },
    /// Commutation-matrix identities and spectral data.
    Matrix { input: String },
    /// Canonical decomposition of an abelian input.
    Classify { input: String },
    /// Decide whether a polynomial is a graded identity of an input.
    Identity { algebra: String, poly: String },
    /// List the built-in catalog.
    Examples,
}

fn run(cli: &Cli) -> regrade::Result<String> {
    let opts = Options {
        json: cli.json,
        max_degree: cli.max_degree,
        grassmann_rank: cli.grassmann_rank,
        oracle: cli.oracle,
        dump_matrix: cli.dump_matrix,
    };
    match &cli.command {
        Command::Analyze { input } => {
            let report = cmd_analyze(input, &opts)?;
            if opts.json {
                render_json(&report)
            } else {
                Ok(render_analysis_text(&report))
            }
        }
        Command::Matrix { input } => {
            let report = cmd_matrix(input, &opts)?;
            if opts.json {
                render_json(&report)
            } else {
                Ok(render_matrix_text(&report))
            }
        }
        Command::Classify { input } => {
            let report = cmd_classify(input)?;
            if opts.json {
                render_json(&report)
            } else {
                Ok(render_classify_text(&report))
            }
        }
        Command::Identity { algebra, poly } => {
            let report = cmd_identity(algebra, poly, &opts)?;
            if opts.json {
                render_json(&report)
            } else {
                Ok(render_identity_text(&report))
            }
        }
        Command::Examples => {
            if opts.json {
                render_json(&catalog_entries())
            } else {
                Ok(render_examples_text())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            // A closed pipe on stdout (e.g. piping into head) is not an
            // error worth reporting.
            let _ = writeln!(std::io::stdout(), "{}", text.trim_end_matches('\n'));
            ExitCode::SUCCESS
        }
        Err(e @ Error::InvariantViolation(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
