mod commands;
mod expr;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use grouptk::exec::Exec;

/// Computational group theory toolkit.
///
/// Every command prints one JSON report (or plain text with --human).
/// Exit status: 0 when a verdict was computed (including "undetermined"),
/// 1 on malformed input, 2 when a budget ran out.
#[derive(Debug, Parser)]
#[command(name = "grouptk", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Plain-text report instead of JSON.
    #[arg(long, global = true)]
    pub human: bool,
    /// Execution strategy for the data-parallel sweeps.
    #[arg(long, global = true, env = "GROUPTK_EXEC", value_enum, default_value_t = ExecArg::Parallel)]
    pub exec: ExecArg,
    /// Longest accepted input word, in letters.
    #[arg(long, global = true, env = "GROUPTK_MAX_WORD_LENGTH", default_value_t = 100_000)]
    pub max_word_length: usize,
    /// Search nodes allowed for the Coxeter word problem.
    #[arg(long, global = true, env = "GROUPTK_NODE_BUDGET", default_value_t = grouptk::coxeter::DEFAULT_NODE_BUDGET)]
    pub node_budget: usize,
    /// Largest p-adic precision accepted by `abels`.
    #[arg(long, global = true, env = "GROUPTK_MAX_PRECISION", default_value_t = 2048)]
    pub max_precision: u32,
    /// Vertex window for wreath certificates (defaults to N).
    #[arg(long, global = true, env = "GROUPTK_WREATH_WINDOW")]
    pub window: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ExecArg {
    Sequential,
    Parallel,
}

impl From<ExecArg> for Exec {
    fn from(e: ExecArg) -> Exec {
        match e {
            ExecArg::Sequential => Exec::Sequential,
            ExecArg::Parallel => Exec::Parallel,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the C'(1/6) condition for a presentation file.
    CheckC16 { file: PathBuf },
    /// Dehn-reduce a word against a C'(1/6) presentation.
    Dehn { file: PathBuf, word: String },
    /// Check that no relator lies in the normal closure of the others.
    Independent { file: PathBuf },
    /// Emit the relators u_n = [tⁿ x t⁻ⁿ, x], n ≤ N, and certify independence.
    Wreath {
        #[arg(long)]
        n: u64,
        /// Certify only that u_S is not a consequence of the remaining members.
        #[arg(long)]
        drop: Option<u64>,
    },
    /// Word problem in a Coxeter group.
    ///
    /// SPEC is a comma-separated list: a bare order is the default m(s,t),
    /// `d=m` sets the order for |s−t| = d, `s:t=m` sets one pair. Orders are
    /// integers ≥ 2 or `inf`. WORD lists generator indices.
    Coxeter {
        #[arg(long)]
        mu: String,
        word: String,
    },
    /// Hensel certificates for the eigenlines of M₀ = [[0,1],[1,−p³]].
    Abels {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        precision: u32,
        /// Decide whether (A, B) lies in E_I = Z[1/p]² ∩ (D_I + Z_p²), where
        /// D_I is the p-adic eigenline of M₀ for eigenvalue λ_I (I = 1 or 2).
        /// A and B are written `n`, `n/p^e` or `n/D` with D a power of p.
        #[arg(long, num_args = 3, value_names = ["A", "B", "I"], allow_hyphen_values = true)]
        check_eigenline: Option<Vec<String>>,
    },
    /// Evaluate an expression in Thompson's group F.
    Thompson { expr: String },
    /// Enumerate normal subgroups of index ≤ N in the free group of rank M.
    ChabautyScan {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        index: usize,
        /// Basic open set file; each kernel is tested for membership.
        #[arg(long)]
        open_set: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // Usage errors are input errors (status 1); clap would use 2, which is
    // reserved for exhausted budgets.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::CheckC16 { file } => commands::check_c16(file),
        Command::Dehn { file, word } => commands::dehn(&cli.global, file, word),
        Command::Independent { file } => commands::independent(&cli.global, file),
        Command::Wreath { n, drop } => commands::wreath(&cli.global, *n, *drop),
        Command::Coxeter { mu, word } => commands::coxeter(&cli.global, mu, word),
        Command::Abels { p, precision, check_eigenline } => {
            commands::abels(&cli.global, *p, *precision, check_eigenline.as_deref())
        }
        Command::Thompson { expr } => commands::thompson(expr),
        Command::ChabautyScan { rank, index, open_set } => {
            commands::chabauty_scan(&cli.global, *rank, *index, open_set.as_deref())
        }
    };
    match outcome {
        Ok(mut report) => {
            report.timing.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            let text = if cli.global.human { report.to_human() } else { report.to_json() };
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(if report.budget_exceeded.is_some() { 2 } else { 0 })
        }
        Err(commands::Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(commands::Failure::Budget(e)) => {
            eprintln!("budget exceeded: {e}");
            ExitCode::from(2)
        }
    }
}
