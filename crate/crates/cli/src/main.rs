mod commands;
mod load;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use limaut::semantics::Caps;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "limaut", version, about = "Limited automata and probabilistic pushdown automata workbench")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for sweeps and fuzzing.
    #[arg(long, global = true, env = "LIMAUT_JOBS")]
    pub jobs: Option<usize>,
    /// Configuration graph node limit per input.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    pub max_nodes: usize,
    /// Step bound for path enumeration.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub step_cap: usize,
    /// Stack height limit for PDAs; default grows with the input.
    #[arg(long, global = true)]
    pub stack_cap: Option<usize>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

impl Cli {
    pub fn caps(&self) -> Caps {
        Caps { max_nodes: self.max_nodes, max_stack_height: self.stack_cap }
    }
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Check a machine file against its structural conditions.
    Validate {
        /// File path or zoo name.
        machine: String,
    },
    /// Exact acceptance and rejection probabilities.
    Prob {
        machine: String,
        /// A single input word.
        #[arg(long, conflicts_with = "upto")]
        input: Option<String>,
        /// Every word up to this length.
        #[arg(long)]
        upto: Option<usize>,
        /// exact, nondet, one-sided:EPS, bounded:EPS or auto.
        #[arg(long, default_value = "auto")]
        mode: String,
        /// Also run the path-enumeration oracle up to --step-cap steps.
        #[arg(long)]
        oracle: bool,
    },
    /// Apply a construction and write the resulting machine.
    Convert {
        machine: String,
        #[arg(long, value_enum)]
        transform: Transform,
        /// Error bound of the source, for amplify and the bounded combinators.
        #[arg(long)]
        epsilon: Option<String>,
        /// Gap parameter for amplify.
        #[arg(long)]
        gap: Option<String>,
        /// Second operand (machine) for the binary combinators; repeatable.
        #[arg(long = "with")]
        with: Vec<String>,
        /// DFA operand for the regular products.
        #[arg(long)]
        dfa: Option<String>,
        /// Output file; standard output when absent.
        #[arg(short, long)]
        output: Option<std::path::PathBuf>,
    },
    /// Compare two machines on every word up to a length.
    Equiv {
        a: String,
        b: String,
        #[arg(long, default_value_t = 6)]
        upto: usize,
        #[arg(long, value_enum, default_value_t = Check::Verdicts)]
        check: Check,
        /// Verdict mode for --check verdicts; see `prob --mode`.
        #[arg(long, default_value = "auto")]
        mode: String,
    },
    /// Differential testing of the constructions on random machines.
    Fuzz {
        #[arg(long)]
        pipeline: String,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        from: u64,
        #[arg(long, default_value_t = 4)]
        upto: usize,
        /// Determinism of the generated machines; mixed alternates by seed.
        #[arg(long, value_enum, default_value_t = Kind::Mixed)]
        kind: Kind,
        /// Largest number of non-halting states.
        #[arg(long, default_value_t = 3)]
        states: usize,
        /// Input letters.
        #[arg(long, default_value_t = 2)]
        letters: usize,
        /// Work symbols per level, or stack symbols.
        #[arg(long, default_value_t = 1)]
        work: usize,
        /// Damage every transform output, to check that the harness notices.
        #[arg(long, hide = true)]
        mutate: bool,
    },
    /// Split a deterministic or nondeterministic (k+1)-limited machine into a
    /// first-traverse transducer and a k-limited residual machine.
    Decompose {
        machine: String,
        #[arg(long, conflicts_with = "upto")]
        input: Option<String>,
        #[arg(long)]
        upto: Option<usize>,
        /// Write the transducer and the residual machine into this directory.
        #[arg(long)]
        emit: Option<std::path::PathBuf>,
    },
    /// The built-in reference machines.
    Zoo {
        #[command(subcommand)]
        action: ZooAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum ZooAction {
    /// Names, kinds and languages.
    List,
    /// Print one machine file.
    Show { name: String },
    /// Write every machine file and the digest list into a directory.
    Write { dir: std::path::PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Transform {
    BlankSkip,
    BlankSkipRecognition,
    Lpa2ToPpda,
    PpdaToLpa2,
    Amplify,
    Complement,
    UnionOneSided,
    BoundedOr,
    BoundedAnd,
    IntersectRegular,
    UnionRegular,
    AnnotateDirections,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Verdicts,
    Probs,
    Paths,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Mixed,
    Det,
    Nondet,
    Prob,
}

/// How a command ended badly.
#[derive(Debug)]
pub enum Failure {
    /// Exit 1: the machine or the check failed.
    Domain(String),
    /// Exit 2: unusable input.
    Input(String),
}

impl From<limaut::Error> for Failure {
    fn from(e: limaut::Error) -> Self {
        match e {
            limaut::Error::Parse(_) => Failure::Input(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        // fails only if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match commands::run(&cli) {
        Ok(code) => code,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
