//! Command-line front end.

pub mod commands;
pub mod parse;
pub mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::Failure;
pub use parse::{parse_expr, parse_model, Model, ModelKind, ParseError, Vocabulary};
pub use render::{Format, Item, Report};

#[derive(Debug, Parser)]
#[command(name = "diffiety", version, about = "Variations and symmetries of differential equations")]
pub struct Cli {
    /// Model file (`model kind;`, definitions, options).
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Standard basis of `u'' = F` with one free function.
    StandardBasis,
    /// Variation with generator `p` and `Zx = z`.
    Variation {
        #[arg(long)]
        p: String,
        #[arg(long, default_value = "0")]
        z: String,
        #[arg(long = "check-order", default_value_t = 4)]
        check_order: usize,
    },
    /// Symmetry conditions on the generator `p`.
    Determining {
        #[arg(long)]
        evolutionary: bool,
        /// Candidate generator to substitute.
        #[arg(long)]
        p: Option<String>,
    },
    /// Reduction of `u_y = F(x, y, u, v, u_x, v_x, v_y)`.
    PdeReduce,
    /// Symmetry conditions for the first-order system.
    PdeDetermining {
        #[arg(long)]
        evolutionary: bool,
    },
    /// Pencil conditions on `M(2, n)`.
    Pencil {
        #[arg(long)]
        a: String,
        #[arg(long)]
        z1: Option<String>,
        #[arg(long)]
        z2: Option<String>,
    },
    /// Involutive families of a filtration term.
    Involutive {
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// KdV hierarchy from the isospectral problem.
    Kdv {
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long = "check-order", default_value_t = 2)]
        check_order: usize,
    },
    /// Poisson bracket `{F, G}` of evolutionary generators.
    Bracket {
        #[arg(long = "F")]
        big_f: String,
        #[arg(long = "G")]
        big_g: String,
        #[arg(long = "f")]
        f: String,
    },
    /// Order-preservation check for `Zx_i = zx<i>`, `Zw^j = zw<j>`.
    CheckPoint {
        #[arg(long, default_value_t = 1)]
        l: usize,
    },
}

fn default_model(cmd: &Command) -> Option<Model> {
    match cmd {
        Command::Kdv { .. } => Some(Model::new(ModelKind::Kdv)),
        Command::Pencil { .. } => Some(Model::new(ModelKind::Pencil)),
        _ => None,
    }
}

fn load_model(cli: &Cli) -> Result<Model, Failure> {
    match &cli.model {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            parse_model(&text).map_err(|e| Failure::Usage(format!("{}:{e}", path.display())))
        }
        None => default_model(&cli.command)
            .ok_or_else(|| Failure::Usage("this command needs --model <file>".into())),
    }
}

fn execute(cli: &Cli) -> commands::Outcome {
    let model = load_model(cli)?;
    match &cli.command {
        Command::StandardBasis => commands::standard_basis(&model),
        Command::Variation { p, z, check_order } => commands::variation(&model, p, z, *check_order),
        Command::Determining { evolutionary, p } => {
            commands::determining(&model, *evolutionary, p.as_deref())
        }
        Command::PdeReduce => commands::pde_reduce(&model),
        Command::PdeDetermining { evolutionary } => commands::pde_determining(&model, *evolutionary),
        Command::Pencil { a, z1, z2 } => commands::pencil_cmd(&model, a, z1.as_deref(), z2.as_deref()),
        Command::Involutive { level, seed } => commands::involutive_cmd(&model, *level, *seed),
        Command::Kdv { levels, check_order } => commands::kdv_cmd(&model, *levels, *check_order),
        Command::Bracket { big_f, big_g, f } => commands::bracket(&model, big_f, big_g, f),
        Command::CheckPoint { l } => commands::check_point(&model, *l),
    }
}

/// Run with the given arguments; results go to `out`, diagnostics to `err`.
/// Returns the exit status: 0 success, 1 usage or parse error, 2 failed
/// check or computation error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let _ = out.write_all(report.render(cli.format).as_bytes());
            if report.ok {
                0
            } else {
                2
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
