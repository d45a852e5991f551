use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod input;
mod run;

#[derive(Debug)]
pub enum CliError {
    /// Unparseable or inconsistent input; exit code 2.
    Invalid(String),
    /// A computation that could not be carried out; exit code 1.
    Failed(String),
}

/// Result of a subcommand: both renderings plus the verdict.
pub struct Outcome {
    pub text: String,
    pub json: serde_json::Value,
    pub passed: bool,
}

#[derive(Parser, Debug)]
#[command(name = "cendalg", version, about = "Exact computations in conformal endomorphism algebras")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// n-products a ⊛_n b; all nonzero ones without --n.
    Product {
        #[arg(long)]
        n: Option<usize>,
        a: String,
        b: String,
    },
    /// Brace products {a ⊛_n b}; all nonzero ones without --n.
    Brace {
        #[arg(long)]
        n: Option<usize>,
        a: String,
        b: String,
    },
    /// Locality N(a, b) and the degree bound for it.
    Locality { a: String, b: String },
    /// Associativity, commutator and brace identities.
    Identities {
        /// Three elements of the same size.
        elements: Vec<String>,
        /// Number of random triples instead of explicit elements.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        size: usize,
        #[arg(long, default_value_t = 3)]
        max_d: usize,
        #[arg(long, default_value_t = 4)]
        max_v: usize,
    },
    /// The Weyl operator a(k).
    Realize {
        a: String,
        #[arg(long, default_value_t = 0)]
        k: usize,
    },
    /// Compares a(n)b(m) with the expansion through n-products.
    Crosscheck {
        a: String,
        b: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Largest n and m tried when they are not given.
        #[arg(long, default_value_t = 4)]
        up_to: usize,
    },
    /// Q[D]-span of generators: rank, basis and membership.
    Span {
        #[arg(long = "gen", required = true)]
        gens: Vec<String>,
        #[arg(long = "member")]
        members: Vec<String>,
        /// v-degree bound; the largest generator degree by default.
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Lifting pipelines on the built-in fixtures.
    Lift {
        #[command(subcommand)]
        target: LiftTarget,
    },
    /// Splits off the radical of a built-in fixture.
    Split {
        #[arg(long, value_enum)]
        fixture: SplitFixture,
        /// Matrix size of the triangular fixture.
        #[arg(long, default_value_t = 3)]
        size: usize,
        /// v-degree window of the counterexample fixture.
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
    /// Checks on the algebra without a radical splitting; always JSON.
    Counterexample {
        #[command(subcommand)]
        check: CxCheck,
    },
}

#[derive(Subcommand, Debug)]
pub enum LiftTarget {
    /// Idempotent modulo the strictly upper triangular ideal.
    Idempotent {
        /// Defaults to E_11 + E_22 + E_12 for size 3.
        e0: Option<String>,
        #[arg(long, default_value_t = 3)]
        size: usize,
    },
    /// Conformal generator in {[[a, b], [0, a]]} modulo the corner.
    Generator {
        /// Defaults to [[v, v^2],[0, v]].
        x0: Option<String>,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Orthogonal idempotents of Curr_2 ⊗ Q[ε].
    Family,
    /// Matrix units of Curr_2 ⊗ Q[ε].
    MatrixUnits,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum SplitFixture {
    Triangular,
    CurrentRadical,
    Counterexample,
}

#[derive(Subcommand, Debug)]
pub enum CxCheck {
    /// Closed product formula against the matrix product.
    VerifyClosure {
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 99)]
        seed: u64,
    },
    /// Radical membership against nilpotency.
    VerifyRadical {
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 99)]
        seed: u64,
    },
    /// θ is multiplicative with kernel the radical.
    VerifyTheta {
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 99)]
        seed: u64,
    },
    /// Solves for ψ(1) on the degree window K.
    ForcedPsi {
        #[arg(long = "K")]
        k: usize,
    },
    /// Certificate that no splitting map exists on the window K.
    Obstruction {
        #[arg(long = "K")]
        k: usize,
    },
}

fn dispatch(command: Command) -> Result<(Outcome, bool), CliError> {
    let always_json = matches!(command, Command::Counterexample { .. });
    let out = match command {
        Command::Product { n, a, b } => run::products(false, n, &a, &b),
        Command::Brace { n, a, b } => run::products(true, n, &a, &b),
        Command::Locality { a, b } => run::locality(&a, &b),
        Command::Identities { elements, random, seed, size, max_d, max_v } => match random {
            Some(count) => run::random_identities(count, seed, size, max_d, max_v),
            None => run::identities(&elements),
        },
        Command::Realize { a, k } => run::realize(&a, k),
        Command::Crosscheck { a, b, n, m, up_to } => run::crosscheck(&a, &b, n, m, up_to),
        Command::Span { gens, members, bound } => run::span(&gens, &members, bound),
        Command::Lift { target } => run::lift(target),
        Command::Split { fixture, size, bound } => run::split(fixture, size, bound),
        Command::Counterexample { check } => run::counterexample(check),
    }?;
    Ok((out, always_json))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok((out, always_json)) => {
            let body = if cli.json || always_json {
                serde_json::to_string_pretty(&out.json).expect("JSON values serialize")
            } else {
                out.text
            };
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            ExitCode::from(if out.passed { 0 } else { 1 })
        }
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
