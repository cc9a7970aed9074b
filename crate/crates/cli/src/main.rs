//! `bisimkit`: JSON in, JSON out. Exit 0 when the property holds or the
//! computation succeeded, 1 when it fails, 2 on bad input.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Lts,
    Nlmp,
    Tree,
    Multitree,
    Code,
}

#[derive(Parser, Debug)]
#[command(name = "bisimkit", version, about = "Bisimulation, ranks and tree isomorphism on finite processes")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,

    /// Include witnesses (relations, canonical forms, matchings) in the report.
    #[arg(long, global = true)]
    pub witness: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bisimilarity of two pointed LTS (roots unless --left/--right given).
    Bisim {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        left_state: Option<String>,
        #[arg(long)]
        right_state: Option<String>,
    },
    /// State bisimilarity on one NLMP, or external bisimilarity between two.
    NlmpBisim {
        left: PathBuf,
        right: Option<PathBuf>,
        #[arg(long)]
        left_state: Option<String>,
        #[arg(long)]
        right_state: Option<String>,
        /// Decide through this uniform structure of the (single) process.
        #[arg(long)]
        uniform: Option<PathBuf>,
        /// Cap on the enumeration of X_s when --uniform is given.
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Rank of an LTS state or a tree.
    Rank {
        input: PathBuf,
        #[arg(long)]
        state: Option<String>,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Omega-expansion of an LTS state or an omega-LTS code, as a canonical form.
    Expand {
        input: PathBuf,
        #[arg(long)]
        state: Option<String>,
        /// Truncate at this depth (allows ill-founded states).
        #[arg(long)]
        depth: Option<usize>,
        /// Reachable-state bound for codes.
        #[arg(long, default_value_t = 1000)]
        bound: usize,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Isomorphism of two multiplicity or explicit trees.
    Iso { left: PathBuf, right: PathBuf },
    /// Eventual equality and its B-tree reduction.
    E0 {
        #[command(subcommand)]
        action: E0Action,
    },
    /// Induced substructure on a carrier, or the sum of two processes.
    Substructure {
        nlmp: PathBuf,
        /// `{"carrier": [...]}` file.
        #[arg(long, conflicts_with_all = ["state", "sum"])]
        carrier: Option<PathBuf>,
        /// Use the reachable carrier of this state.
        #[arg(long, conflicts_with = "sum")]
        state: Option<String>,
        /// Print the sum with this second process instead.
        #[arg(long)]
        sum: Option<PathBuf>,
    },
    /// Evaluate a modal formula at an LTS state or at a symbolic tree root.
    Eval {
        input: PathBuf,
        formula: PathBuf,
        #[arg(long)]
        state: Option<String>,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Run the seeded property suites.
    Verify {
        /// `all`, a suite id, a name, or a comma-separated list.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, env = "BISIMKIT_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Graphviz rendering of an LTS, NLMP, tree or multiplicity tree.
    ExportDot {
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        width: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum E0Action {
    /// Exit 0 iff the two sets differ finitely.
    Check { x: PathBuf, y: PathBuf },
    /// The tree B(x), optionally truncated.
    Reduce {
        x: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 4)]
        width: u64,
    },
    /// A child matching for bisimilar B-trees or a separating formula.
    Witness {
        x: PathBuf,
        y: PathBuf,
        /// Number of matched children to list.
        #[arg(long, default_value_t = 16)]
        bound: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.render(cli.format));
            ExitCode::from(if out.holds { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
