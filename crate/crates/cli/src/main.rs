//! `spt-z2`: reflection index, certificates, modular data, parent
//! Hamiltonians and family scans from the command line.
//!
//! Every command prints one JSON report envelope (or a plain table with
//! `--format table`) and exits with the code of its status.

mod commands;
mod envelope;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spt_z2::hamiltonian::Boundary;
use spt_z2::Config;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "spt-z2", version, about = "Z2 reflection index of translation-invariant MPS")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON file with configuration overrides (applied after SPT_Z2_CONFIG).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,

    /// Parse and validate the input, echo it back and stop.
    #[arg(long, global = true)]
    validate_only: bool,

    /// Worker threads for scans.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(flatten)]
    overrides: Overrides,
}

/// Command-line overrides of [`Config`]; unset flags keep the configured value.
#[derive(Debug, Args, Default)]
pub struct Overrides {
    /// Seed for randomized test panels.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    eps_lin: Option<f64>,
    #[arg(long, global = true)]
    eps_herm: Option<f64>,
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    #[arg(long, global = true)]
    eps_norm: Option<f64>,
    #[arg(long, global = true)]
    peripheral_tol: Option<f64>,
    /// Longest product length of the span search (default k⁴).
    #[arg(long, global = true)]
    l_max: Option<usize>,
    #[arg(long, global = true)]
    window_cap: Option<usize>,
    #[arg(long, global = true)]
    gauge_tol: Option<f64>,
    #[arg(long, global = true)]
    eps_gauge: Option<f64>,
    #[arg(long, global = true)]
    eps_index: Option<f64>,
    #[arg(long, global = true)]
    marginal_tol: Option<f64>,
    #[arg(long, global = true)]
    swap_tol: Option<f64>,
    #[arg(long, global = true)]
    modular_tol: Option<f64>,
    #[arg(long, global = true)]
    panel_size: Option<usize>,
    #[arg(long, global = true)]
    ed_cap: Option<usize>,
    #[arg(long, global = true)]
    kernel_tol_rel: Option<f64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut Config) {
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field { cfg.$field = v; }
            )*};
        }
        set!(
            seed,
            eps_lin,
            eps_herm,
            rank_tol,
            eps_norm,
            peripheral_tol,
            window_cap,
            gauge_tol,
            eps_gauge,
            eps_index,
            marginal_tol,
            swap_tol,
            modular_tol,
            panel_size,
            ed_cap,
            kernel_tol_rel
        );
        if self.l_max.is_some() {
            cfg.l_max = self.l_max;
        }
    }
}

#[derive(Debug, Args)]
pub struct TupleInput {
    /// TupleFile JSON.
    #[arg(value_name = "TUPLE", conflicts_with = "model", required_unless_present = "model")]
    path: Option<PathBuf>,

    /// Built-in model, e.g. `aklt`, `product:1,0`, `deformed-aklt:0.3`.
    #[arg(long)]
    model: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the Z2 reflection index.
    Index {
        #[command(flatten)]
        input: TupleInput,
        /// Group this many sites into one before computing.
        #[arg(long, default_value_t = 1)]
        block: usize,
    },
    /// Primitivity and reflection-invariance certificates.
    Check {
        #[command(flatten)]
        input: TupleInput,
        #[arg(long, default_value_t = 1)]
        block: usize,
    },
    /// Modular data, kappa and swap sign of a bipartite vector.
    Modular {
        /// Vector file {"m", "entries"}.
        #[arg(
            long,
            value_name = "FILE",
            conflicts_with = "from_index",
            required_unless_present = "from_index"
        )]
        vector: Option<PathBuf>,
        /// Index report, TupleFile, or model name whose bond vector is used.
        #[arg(long, value_name = "SRC")]
        from_index: Option<String>,
    },
    /// Parent Hamiltonian and exact diagonalization.
    ParentHam {
        #[command(flatten)]
        input: TupleInput,
        /// Interaction range (default: injectivity length + 1).
        #[arg(long)]
        m: Option<usize>,
        /// Chain length (default: the interaction range).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "open")]
        boundary: Boundary,
    },
    /// Index along a one-parameter family.
    Scan {
        /// Scan spec JSON.
        #[arg(value_name = "SPEC", conflicts_with = "family", required_unless_present = "family")]
        spec: Option<PathBuf>,
        /// Built-in family (`deformed-aklt`, `aklt-breaker`) or a constant model.
        #[arg(long)]
        family: Option<String>,
    },
    /// List built-in models and families.
    Models,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors are input errors; clap's own code 2 would collide
            // with not_primitive
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let env_config = std::env::var_os("SPT_Z2_CONFIG").map(PathBuf::from);
    ExitCode::from(commands::run(cli, env_config))
}
