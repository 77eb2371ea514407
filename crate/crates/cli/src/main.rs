//! `naecol`: thresholds, fixed points, interpolation bounds, first moments,
//! small random instances and high-precision checks from the command line.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Coloring,
    Nae,
}

impl From<ModelArg> for naecol_core::Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Coloring => naecol_core::Model::Coloring,
            ModelArg::Nae => naecol_core::Model::Nae,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "naecol", version, about = "Satisfiability thresholds for random regular NAE-SAT and hypergraph 2-coloring")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Largest zero d_star of phi_star and the first-moment threshold d_1 for k = 3..15.
    Table {
        /// Bisection tolerance on d.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Fixed point x = Psi_d(x) of the belief-propagation recursion.
    Fixpoint {
        /// Clause size, at least 3.
        #[arg(long)]
        k: u32,
        /// Variable degree; must lie in the admissible window for k.
        #[arg(long)]
        d: f64,
        /// Tolerance on x.
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
    },
    /// phi(d, x); x defaults to the fixed point.
    Phi {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: f64,
        /// Evaluation point in (0, 1/2]; omitted means the fixed point x(k, d).
        #[arg(long)]
        x: Option<f64>,
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
    },
    /// d_star for one k, with the first-moment threshold and every sign change seen.
    Dstar {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Interpolation functional for the cluster measure over a list of betas.
    Interp {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: f64,
        /// Comma-separated inverse temperatures (>= 0).
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
        /// Fixed lambda in (0, 1]; default min(1, beta^-1/2).
        #[arg(long)]
        lambda: Option<f64>,
        /// Factor: coloring, or NAE averaged over random literals.
        #[arg(long, value_enum, default_value_t = ModelArg::Coloring)]
        model: ModelArg,
        /// Tolerance for the fixed point defining the cluster measure.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Exact first-moment terms C(n, t) p_gamma with gamma = t/n.
    Firstmo {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        d: u64,
        /// Add the columns ones, in_window and local_clt.
        #[arg(long)]
        diagnostics: bool,
        /// Write a JSON summary (E Z for both models and their ratio) to this file.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Sample a configuration-model instance and write it in text form.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        /// Master random seed.
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Reject instances with a repeated variable inside a clause.
        #[arg(long)]
        simple: bool,
        /// Rejection budget for --simple.
        #[arg(long, default_value_t = 1000)]
        max_retries: usize,
    },
    /// Exact number of solutions of an instance file (n <= 34).
    Solve {
        /// Instance file.
        file: PathBuf,
    },
    /// Exact log partition function of an instance file (n <= 30).
    Z {
        file: PathBuf,
        /// Comma-separated inverse temperatures (>= 0).
        #[arg(long, value_delimiter = ',', required = true)]
        beta: Vec<f64>,
    },
    /// Fraction of satisfiable sampled instances for each degree.
    Sweep {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Comma-separated degrees.
        #[arg(long, value_delimiter = ',', required = true)]
        ds: Vec<usize>,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModelArg::Coloring)]
        model: ModelArg,
    },
    /// Spread of ln Z / n over sampled instances for each n.
    Concentrate {
        /// Comma-separated instance sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModelArg::Nae)]
        model: ModelArg,
    },
    /// High-precision checks of the numerical inequalities; exits 2 unless all pass.
    Certify {
        /// Evaluate only this check.
        #[arg(long)]
        id: Option<String>,
        /// Working precision in decimal digits (50..=2000).
        #[arg(long, default_value_t = 50)]
        digits: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
