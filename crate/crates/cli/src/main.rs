//! Command-line driver: loads a bundled example or a document file, runs one
//! check from the pipeline, and emits a human-readable or JSON report.

mod commands;
mod report;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "koszulkit",
    version,
    about = "Exact chain-level homological algebra over semisimple quiver rings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Bundled example id (see `koszulkit examples`)
    #[arg(long, global = true)]
    example: Option<String>,

    /// Path to a document file
    #[arg(long, global = true)]
    input: Option<String>,

    /// Field override: q or gf<p>
    #[arg(long, global = true)]
    field: Option<String>,

    /// Degree window a..b
    #[arg(long, global = true, allow_hyphen_values = true)]
    degrees: Option<String>,

    /// Word-length bound for truncations
    #[arg(long, global = true)]
    max_len: Option<usize>,

    /// Emit the report as JSON
    #[arg(long, global = true)]
    json: bool,

    /// Seed recorded in the report (reserved for randomized sweeps)
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check d∘d = 0 on every generator of the document's presentation
    CheckD2,
    /// Check the A-infinity relations of the dual algebra
    CheckAinf {
        /// largest relation arity evaluated
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
        /// run sign repair when the check fails over Q but passes mod 2
        #[arg(long)]
        repair: bool,
        /// flip budget for the repair search
        #[arg(long, default_value_t = 4)]
        budget: usize,
    },
    /// Check the co-A-infinity relations of the document's coalgebra
    CheckCoainf {
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
        #[arg(long)]
        repair: bool,
        #[arg(long, default_value_t = 4)]
        budget: usize,
    },
    /// Print the cobar presentation and its d-squared status
    Cobar,
    /// Bar construction of the dual algebra: dimensions and b-squared status
    Bar,
    /// Print the dual A-infinity structure tables
    Dual,
    /// Enumerate augmentations over a finite field
    Augmentations,
    /// Verify the document's twisting cochain equation by equation
    TwistVerify,
    /// Windowed Koszul-complex homology and acyclicity verdict
    Koszul,
    /// Windowed homology of the (completed) cobar
    Homology,
    /// Quasi-isomorphism verdict for a named comparison map
    QuasiIso {
        /// unit | counit | collapse | retraction
        #[arg(long)]
        map: String,
    },
    /// Search for a primitive of a closed element by exact linear solve
    Primitive {
        /// the target element, written in the document's generators
        #[arg(long)]
        target: String,
        #[arg(long, allow_hyphen_values = true)]
        degree: i64,
    },
    /// Bounded noncommutative rewriting to normal form
    Rewrite {
        /// rewrite rule "lhs -> rhs", repeatable
        #[arg(long = "rule")]
        rules: Vec<String>,
        /// the element to normalize
        #[arg(long)]
        expr: String,
    },
    /// Symbolic verification transcript for the cubical chain identities
    CubeDemo,
    /// Grading conversions and moduli dimension formulas
    Dim {
        /// fi | sy | co | cobar | convert
        #[arg(long)]
        formula: String,
        #[arg(long, allow_hyphen_values = true)]
        n: Option<i64>,
        /// comma-separated puncture degrees
        #[arg(long, allow_hyphen_values = true)]
        punctures: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        positive: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        negative: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        extra: Option<String>,
        /// degree to convert (for --formula convert)
        #[arg(long, allow_hyphen_values = true)]
        deg: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        cz: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        leg: Option<i64>,
    },
    /// List bundled examples, or print one (canonical text or JSON)
    Examples,
}

fn main() {
    let cli = Cli::parse();
    let outcome = commands::dispatch(&cli);
    match outcome {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
            } else {
                print!("{}", report.render_text());
            }
            std::process::exit(report.exit_code());
        }
        Err(err) => {
            if cli.json {
                let obj = serde_json::json!({
                    "command": "error",
                    "ok": false,
                    "witnesses": [format!("{}", err)],
                    "tables": {},
                    "version": report::VERSION,
                });
                println!("{}", serde_json::to_string_pretty(&obj).unwrap());
            } else {
                eprintln!("error: {}", err);
            }
            std::process::exit(2);
        }
    }
}
