//! Command-line front end for `inertia_lab`: inertia of matrix files,
//! witness searches, catalogs, lemma checks and censuses.

pub mod commands;
pub mod error;
pub mod matrix_file;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use inertia_lab::ptrans::DEFAULT_ZERO_TOL;
use inertia_lab::search::witness::{DEFAULT_MARGIN, DEFAULT_MAX_ITERS, DEFAULT_SEPARATION_RATIO};
use inertia_lab::search::SearchConfig;
use inertia_lab::{BipartiteDims, Inertia};

pub use commands::CommandOutput;
pub use error::CliError;
pub use matrix_file::MatrixFile;
pub use report::RunReport;

#[derive(Debug, Parser)]
#[command(name = "inertia-lab", version, about = "Inertia of partial transposes of bipartite states")]
pub struct Cli {
    /// Print the JSON report instead of the text summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inertia of a matrix file and of its partial transpose.
    Inertia {
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        /// Expected factor dimensions; must agree with the file.
        #[arg(long, value_name = "MxN")]
        dims: Option<BipartiteDims>,
        #[arg(long, default_value_t = DEFAULT_ZERO_TOL)]
        zero_tol: f64,
    },
    /// Search for a state whose partial transpose has the target inertia.
    Search {
        #[arg(long, value_name = "MxN")]
        dims: BipartiteDims,
        #[arg(long, value_name = "a,b,c")]
        target: Inertia,
        /// Defaults to 50 up to order 9 and 200 beyond.
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ZERO_TOL)]
        zero_tol: f64,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
        #[arg(long, default_value_t = DEFAULT_SEPARATION_RATIO)]
        separation_ratio: f64,
        /// Witness matrix file written when found.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Known members, exclusions and family arrays.
    Catalog {
        #[arg(long, value_name = "MxN")]
        dims: BipartiteDims,
    },
    /// Randomized checks of the inertia lemmas.
    Verify {
        /// Lemma name, or `all`.
        #[arg(default_value = "all")]
        lemma: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Histogram of partial-transpose inertias over random states.
    Census {
        #[arg(long, value_name = "MxN")]
        dims: BipartiteDims,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// `mixed`, `full`, or comma-separated ranks.
        #[arg(long, default_value = "mixed")]
        ranks: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ZERO_TOL)]
        zero_tol: f64,
        /// CSV output with header `neg,zero,pos,count`.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

pub fn execute(command: &Command) -> Result<CommandOutput, CliError> {
    let start = Instant::now();
    let mut output = match command {
        Command::Inertia { input, dims, zero_tol } => commands::cmd_inertia(input, *dims, *zero_tol),
        Command::Search { dims, target, restarts, max_iters, seed, zero_tol, margin, separation_ratio, out } => {
            let mut config = SearchConfig::new(*dims, *target);
            if let Some(r) = restarts {
                config.restarts = *r;
            }
            config.max_iters = *max_iters;
            config.seed = *seed;
            config.zero_tol = *zero_tol;
            config.margin = *margin;
            config.separation_ratio = *separation_ratio;
            commands::cmd_search(&config, out.as_deref())
        }
        Command::Catalog { dims } => commands::cmd_catalog(*dims),
        Command::Verify { lemma, trials, seed } => commands::cmd_verify(lemma, *trials, *seed),
        Command::Census { dims, samples, ranks, seed, zero_tol, out } => {
            commands::cmd_census(*dims, *samples, ranks, *seed, *zero_tol, out.as_deref())
        }
    }?;
    output.report.duration_seconds = start.elapsed().as_secs_f64();
    Ok(output)
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{rendered}") } else { write!(stdout, "{rendered}") };
            return code;
        }
    };
    let output = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    if let Some(path) = &cli.report {
        if let Err(e) = output.report.write(path) {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    }
    let _ = if cli.json { writeln!(stdout, "{}", output.report.to_json()) } else { write!(stdout, "{}", output.text) };
    output.exit_code
}
