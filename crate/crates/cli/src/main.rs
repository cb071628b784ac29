mod angle;
mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::report::Ctx;

/// Extremal constants for positive definite functions on finite Gelfand
/// pairs and on spheres.
///
/// Exit status: 0 when every internal cross-check passed, 1 when a
/// cross-check failed, 2 on errors.
#[derive(Parser, Debug)]
#[command(name = "delsarte", version)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Arithmetic for the finite LP; `auto` solves exactly whenever the
    /// spherical functions are rational.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    /// Override for the cross-check tolerance of the command.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Directory that receives the report files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    Float,
    Rational,
}

impl ModeArg {
    pub fn name(self) -> &'static str {
        match self {
            ModeArg::Auto => "auto",
            ModeArg::Float => "float",
            ModeArg::Rational => "rational",
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a group file and print its basic invariants.
    GroupInspect {
        /// Group file, or an inline descriptor such as '{"dihedral": 4}'.
        group: String,
    },
    /// Double cosets, Gelfand verdict and spherical table of (G, K).
    Gelfand {
        group: String,
        /// Elements of K (comma separated).
        #[arg(long, value_delimiter = ',', conflicts_with = "k_gens")]
        k: Vec<usize>,
        /// Generators of K (comma separated).
        #[arg(long, value_delimiter = ',')]
        k_gens: Vec<usize>,
    },
    /// Solve a Delsarte instance file and cross-check the optimum.
    Delsarte {
        instance: PathBuf,
    },
    /// Bracket the Turán constant of spherical caps.
    SphereTuran {
        /// Sphere dimension.
        #[arg(long)]
        d: usize,
        /// Cap parameters, e.g. `pi/4,pi/2,3pi/4`.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        c: Vec<String>,
        /// Truncation degree.
        #[arg(long, default_value_t = 40)]
        n: usize,
        /// Grid intervals on [c, pi].
        #[arg(long, default_value_t = 64)]
        m: usize,
        /// Also solve on the grid with 2M intervals.
        #[arg(long)]
        refine: bool,
        /// Samples per plot-data file.
        #[arg(long, default_value_t = 181)]
        samples: usize,
    },
    /// Convolution square root of a positive definite input.
    ConvRoot {
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        seed: cli.seed,
        mode: cli.mode,
        tol: cli.tol,
        out: cli.out.clone(),
    };
    let result = match &cli.command {
        Command::GroupInspect { group } => commands::group_inspect(&ctx, group),
        Command::Gelfand { group, k, k_gens } => commands::gelfand(&ctx, group, k, k_gens),
        Command::Delsarte { instance } => commands::delsarte(&ctx, instance),
        Command::SphereTuran {
            d,
            c,
            n,
            m,
            refine,
            samples,
        } => commands::sphere_turan(&ctx, *d, c, *n, *m, *refine, *samples),
        Command::ConvRoot { input } => commands::conv_root(&ctx, input),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("cross-check failed; see the report in {}", ctx.out.display());
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
