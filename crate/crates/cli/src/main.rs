//! `idealc`: batch reports for positive definite functions, completion norms,
//! certificates and finite dynamical systems.
//!
//! Every invocation writes one JSON (or CSV) report and exits with 0 on
//! pass/accept, 1 on fail/reject and 2 on usage or input errors.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ideal_core::DEFAULT_BUDGET;

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "idealc", version, about = "Ideal completions of group algebras: batch reports")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// PSD tolerance, relative to the window's largest entry
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub psd_tol: f64,
    /// relative stopping tolerance for eigenvalue iterations
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub eig_tol: f64,
    /// norm differences below this count as truncation error
    #[arg(long, global = true, default_value_t = 0.05)]
    pub gap_tol: f64,
    /// largest number of group elements any ball may hold
    #[arg(long, global = true, env = "IDEALC_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// write the report here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    fn validate(&self) -> Result<(), String> {
        for (name, v) in [("psd-tol", self.psd_tol), ("eig-tol", self.eig_tol), ("gap-tol", self.gap_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("--{name} must be positive, got {v}"));
            }
        }
        if self.budget == 0 {
            return Err("--budget must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Positive-definiteness of a function on a ball window
    PdCheck {
        #[arg(long)]
        group: String,
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = 3)]
        radius: u32,
    },
    /// Conditionally negative type check on a ball window
    CndCheck {
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "wordlength")]
        function: String,
        #[arg(long, default_value_t = 3)]
        radius: u32,
    },
    /// Ideal membership from the function's tail certificate
    Ideal {
        #[arg(long)]
        group: String,
        #[arg(long)]
        function: String,
        /// cc, c0, linf, l2plus, t or lp:<p>
        #[arg(long)]
        ideal: String,
    },
    /// ℓ^p norm: exact partial sum plus certified tail
    LpNorm {
        #[arg(long)]
        group: String,
        #[arg(long)]
        function: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 8)]
        radius: u32,
    },
    /// GNS lower bound for ‖x‖ in the representation of a PD function
    Gns {
        #[arg(long)]
        group: String,
        #[arg(long)]
        function: String,
        #[arg(long, default_value = "gensum")]
        element: String,
        #[arg(long, default_value_t = 4)]
        radius: u32,
    },
    /// Full, reduced and ideal norms side by side
    NormGap {
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "gensum")]
        element: String,
        #[arg(long, default_value_t = 8)]
        radius: u32,
        #[arg(long, default_value = "c0")]
        ideal: String,
        /// GNS family member (repeatable); defaults to a standard family
        #[arg(long = "function")]
        functions: Vec<String>,
    },
    /// Equality certificate for a group, or an action certificate with --system
    Certificate {
        #[arg(long)]
        group: Option<String>,
        /// cc, c0 or t (group certificates)
        #[arg(long)]
        ideal: Option<String>,
        /// system file for an action certificate
        #[arg(long)]
        system: Option<String>,
        /// amenable or atmenable (action certificates)
        #[arg(long)]
        kind: Option<String>,
        /// family member (repeatable), in order
        #[arg(long = "function")]
        functions: Vec<String>,
        #[arg(long, default_value_t = 1)]
        r_conv: u32,
        /// threshold per family member (repeatable)
        #[arg(long = "threshold")]
        thresholds: Vec<f64>,
    },
    /// Co-associativity and density rank of the coproduct
    Coproduct {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 1)]
        radius: u32,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Sphere counts and the growth constant on a window
    Growth {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 6)]
        max_radius: u32,
    },
    /// Operations on a finite system
    Dynamics {
        /// system file, or random:group=<G>,points=<N>
        #[arg(long)]
        system: String,
        #[arg(long, value_enum, default_value_t = commands::DynamicsOp::Summary)]
        op: commands::DynamicsOp,
        /// ball radius; envelopes use the whole orbit when omitted
        #[arg(long)]
        radius: Option<u32>,
        /// function to lift for --op pd-check
        #[arg(long)]
        function: Option<String>,
    },
    /// Envelopes and fixed vectors of the covariant representation
    DnReport {
        #[arg(long)]
        system: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = cli.config.validate() {
        eprintln!("idealc: error: {msg}");
        return ExitCode::from(2);
    }
    let outcome = commands::run(&cli.command, &cli.config).and_then(|(report, passed)| {
        let bytes = output::render(&report, cli.config.format)?;
        output::emit(&bytes, cli.config.output.as_deref())?;
        Ok(passed)
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("idealc: error: {msg}");
            ExitCode::from(2)
        }
    }
}
