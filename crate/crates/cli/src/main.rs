mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qcqs::algebra::OrderKind;

#[derive(Parser)]
#[command(name = "qcqs", version, about = "Decision procedures for qcqs schemes over QQ and GF(p)")]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Options {
    /// Ring for inline arguments, e.g. `QQ[x,y]` or `GF(5)[x,y]/(x^2+y^2-1)`.
    #[arg(long, global = true)]
    pub ring: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Order::Grevlex)]
    pub order: Order,
    /// Finite test algebras, separated by `;`.
    #[arg(long, global = true, value_delimiter = ';')]
    pub over: Vec<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Exponent cap for numerator extraction and clearing.
    #[arg(long, global = true, default_value_t = qcqs::DEFAULT_CAP)]
    pub cap: u32,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Order {
    Grevlex,
    Lex,
}

impl Order {
    pub fn kind(self) -> OrderKind {
        match self {
            Order::Grevlex => OrderKind::Grevlex,
            Order::Lex => OrderKind::Lex,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Show a presentation: Groebner basis, triviality, dimension, normal forms.
    Ring {
        ring: String,
        elements: Vec<String>,
    },
    /// Ideal membership and radical membership.
    Ideal {
        #[command(subcommand)]
        op: commands::IdealOp,
    },
    /// Zariski lattice operations on `D(...)` elements.
    Lattice {
        #[command(subcommand)]
        op: commands::LatticeOp,
    },
    /// Glue a compatible family of sections on a cover.
    Glue { family: String },
    /// Operations on a scheme given by gluing data.
    Scheme {
        #[command(subcommand)]
        op: commands::SchemeOp,
    },
    /// Enumerate the points of a scheme over the `--over` algebras.
    Points { scheme: String },
    /// Check that elements generate the unit ideal and print the certificate.
    CoverCheck { elements: Vec<String> },
    /// Check the equalizer condition for the points functor of a scheme.
    LocalityCheck {
        scheme: String,
        /// Cover of each test algebra; defaults to its primitive idempotents.
        #[arg(long, value_delimiter = ',')]
        cover: Vec<String>,
    },
    /// Compare lattice-side and functorial points of a scheme.
    Compare { scheme: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = &cli.opts;
    let outcome = match cli.command {
        Command::Ring { ring, elements } => commands::ring(o, &ring, &elements),
        Command::Ideal { op } => commands::ideal(o, op),
        Command::Lattice { op } => commands::lattice(o, op),
        Command::Glue { family } => commands::glue(o, &family),
        Command::Scheme { op } => commands::scheme(o, op),
        Command::Points { scheme } => commands::points(o, &scheme),
        Command::CoverCheck { elements } => commands::cover_check(o, &elements),
        Command::LocalityCheck { scheme, cover } => commands::locality_check(o, &scheme, &cover),
        Command::Compare { scheme } => commands::compare(o, &scheme),
    };
    match outcome {
        Ok(out) => {
            let body = match o.format {
                Format::Text => out.text.trim_end().to_string(),
                Format::Json => serde_json::to_string_pretty(&out.json).expect("reports serialize"),
            };
            // A closed pipe is not an error of the computation.
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            if out.holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
