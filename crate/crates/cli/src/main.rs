//! `mahler`: linear relations and transcendence of values of Mahler
//! functions from the command line.

mod commands;
mod error;
mod input;
mod render;

use std::io::IsTerminal;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CheckArgs, Global, Outcome, PointArgs};
use error::{CliError, EXIT_INCONCLUSIVE, EXIT_OK};
use input::{Demo, Session, SessionSpec};

#[derive(Parser, Debug)]
#[command(name = "mahler", version, about = "Linear relations between Mahler functions and their values")]
struct Cli {
    /// Print machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
    /// Hard cap on the number of processed columns (default 1000000).
    #[arg(long, global = true, value_name = "N")]
    max_columns: Option<usize>,
    /// Raise the column cap to the explicit zero bound and, for
    /// `independence`, stream the whole bound.
    #[arg(long, global = true)]
    full_bound: bool,
    #[command(subcommand)]
    command: Command,
}

/// Where the problem comes from.
#[derive(Args, Debug)]
struct Source {
    /// Session file (JSON, or TOML with a .toml extension).
    #[arg(value_name = "FILE", required_unless_present = "demo")]
    file: Option<PathBuf>,
    /// Use a built-in example instead of a file.
    #[arg(long, value_enum, conflicts_with = "file")]
    demo: Option<Demo>,
}

impl Source {
    fn load(&self) -> Result<Session, CliError> {
        match (&self.file, self.demo) {
            (_, Some(d)) => d.session(),
            (Some(p), None) => SessionSpec::from_path(p)?.load(),
            (None, None) => Err(CliError::Input("no input given".into())),
        }
    }
}

#[derive(Args, Debug)]
struct PointOpts {
    /// The point, as an expression in the field generator t.
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    /// Iteration depth of A_l (defaults to the certified minimum).
    #[arg(long)]
    l: Option<usize>,
    /// Go through the embedding and doubling route even if not needed.
    #[arg(long)]
    pipeline: bool,
}

impl From<&PointOpts> for PointArgs {
    fn from(p: &PointOpts) -> Self {
        PointArgs { alpha: p.alpha.clone(), l: p.l, pipeline: p.pipeline }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile an automaton into a Mahler system.
    CompileAutomaton {
        #[command(flatten)]
        source: Source,
    },
    /// Print the first power-series coefficients of the solution.
    Expand {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        terms: Option<usize>,
        /// Print only this component (1-based).
        #[arg(long)]
        component: Option<usize>,
    },
    /// Explicit vanishing order beyond which a relation must hold.
    Bound {
        #[arg(short = 'n')]
        n: u64,
        #[arg(short = 'd')]
        d: u64,
        #[arg(short = 'q')]
        q: u64,
        #[arg(long, default_value_t = 0)]
        nu: u64,
        #[arg(long)]
        height: u64,
    },
    /// Basis of the linear relations over k(z).
    Relations {
        #[command(flatten)]
        source: Source,
        /// Adjoin the constant function 1.
        #[arg(long)]
        augment: bool,
    },
    /// Decide linear independence over k(z).
    Independence {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        augment: bool,
    },
    /// Linear relations between the values at a point.
    Point {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        point: PointOpts,
    },
    /// Algebraic or transcendental: a verdict for every value at a point.
    Verdict {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        point: PointOpts,
        /// Also decide the combination with these comma-separated weights.
        #[arg(long, allow_hyphen_values = true)]
        weights: Option<String>,
        /// Check every relation numerically with this many terms.
        #[arg(long, value_name = "N")]
        check: Option<usize>,
        /// Working precision in bits (default 256).
        #[arg(long)]
        precision: Option<u32>,
        /// Bound on the moduli of all coefficients, for a certified tail.
        #[arg(long)]
        coefficient_bound: Option<String>,
    },
    /// Run a built-in example end to end.
    Demo {
        #[arg(value_enum)]
        which: Demo,
    },
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let g = Global { max_columns: cli.max_columns, full_bound: cli.full_bound };
    match &cli.command {
        Command::CompileAutomaton { source } => commands::compile_automaton(&source.load()?),
        Command::Expand { source, terms, component } => commands::expand(&source.load()?, *terms, *component),
        Command::Bound { n, d, q, nu, height } => commands::bound(*n, *d, *q, *nu, *height),
        Command::Relations { source, augment } => commands::relations(&source.load()?, &g, *augment),
        Command::Independence { source, augment } => commands::independence(&source.load()?, &g, *augment),
        Command::Point { source, point } => commands::point(&source.load()?, &g, &point.into()),
        Command::Verdict { source, point, weights, check, precision, coefficient_bound } => {
            let check = check.map(|terms| CheckArgs {
                terms,
                precision: *precision,
                coefficient_bound: coefficient_bound.clone(),
            });
            commands::verdict_cmd(&source.load()?, &g, &point.into(), weights.as_deref(), check.as_ref())
        }
        Command::Demo { which } => commands::demo(*which, &g),
    }
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown failure".into()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
    render::init_color(!cli.json && !no_color && std::io::stdout().is_terminal());
    panic::set_hook(Box::new(|_| {}));
    let result = panic::catch_unwind(AssertUnwindSafe(|| run(&cli)))
        .unwrap_or_else(|p| Err(CliError::Panic(panic_message(p.as_ref()))));
    match result {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("valid json"));
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(if out.inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK } as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
