use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use steiner_laminar::simplex::SolverConfig;
use steiner_laminar::Backend;

#[derive(Debug, Parser)]
#[command(
    name = "steiner-laminar",
    version,
    about = "Exact Steiner trees by laminar-family decomposition"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance and report the optimal tree.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// List the full binary laminar families over `b` commodities.
    Enumerate {
        #[arg(long = "b", value_name = "K")]
        b: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Write the relaxation of every family as a CPLEX LP file.
    ExportLp {
        instance: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// 1-based terminal to root at; defaults to the first terminal.
        #[arg(long)]
        root: Option<usize>,
    },
    /// Cross-check both backends and both exact oracles.
    Verify {
        instance: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Solve every `.stp` file in a directory and tabulate timings.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Dp,
    Lp,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Dp => Backend::Dp,
            BackendArg::Lp => Backend::Lp,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// 1-based terminal to root at; defaults to the first terminal.
    #[arg(long)]
    pub root: Option<usize>,
    #[arg(long, value_enum, default_value_t = BackendArg::Dp)]
    pub backend: BackendArg,
    /// Worker threads; 0 uses one per core.
    #[arg(long, env = "STEINER_LAMINAR_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// Simplex feasibility tolerance.
    #[arg(long, value_name = "TOL")]
    pub tol_feas: Option<f64>,
    /// Distance from 0/1 accepted as integral.
    #[arg(long, value_name = "TOL")]
    pub tol_int: Option<f64>,
    /// Output format; `solve` defaults to json, the others to table.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Keep every family's objective in the report.
    #[arg(long)]
    pub keep_all: bool,
}

impl RunArgs {
    pub fn solver(&self) -> anyhow::Result<SolverConfig> {
        let mut config = SolverConfig::default();
        for (flag, value, slot) in [
            (
                "--tol-feas",
                self.tol_feas,
                &mut config.tolerances.feasibility,
            ),
            (
                "--tol-int",
                self.tol_int,
                &mut config.tolerances.integrality,
            ),
        ] {
            if let Some(v) = value {
                anyhow::ensure!(v > 0.0 && v < 0.5, "{flag} must lie in (0, 0.5), got {v}");
                *slot = v;
            }
        }
        Ok(config)
    }
}
