//! `gadtparam`: relational liftings of data type declarations, from the
//! command line.
//!
//! Exit codes: 0 when every check passed or the query was answered, 1
//! when a checked property was violated, 2 for usage and parse errors, 3
//! for type and kind errors, 4 when a resource cap made the answer
//! inconclusive.

mod commands;
mod config;
mod error;
mod inputs;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gadtparam_core::lifting::Mode;

use commands::Output;
use config::{CapOverrides, Format, RunConfig, MAX_REL_ENUM_VAR};
use error::CliError;
use inputs::Inputs;

#[derive(Parser)]
#[command(name = "gadtparam", version, about = "Relational liftings of GADTs, checked over finite carriers")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,

    /// Print derivations in text reports.
    #[arg(long, global = true)]
    witness: bool,

    /// Largest carrier that may be enumerated.
    #[arg(long, global = true)]
    max_carrier: Option<usize>,

    /// Largest term depth that may be enumerated.
    #[arg(long, global = true)]
    max_depth: Option<usize>,

    /// Largest number of relations, tables or candidates that may be
    /// enumerated. Also read from GADTPARAM_MAX_REL_ENUM.
    #[arg(long, global = true)]
    max_rel_enum: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Naive,
    Completion,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Naive => Mode::Naive,
            ModeArg::Completion => Mode::Completion,
        }
    }
}

#[derive(Args)]
struct Target {
    /// A `.gadt` file with declarations and optional named items.
    file: PathBuf,

    /// The declaration to work on; defaults to the only one in the file.
    #[arg(long)]
    decl: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and kind-check a file.
    Check {
        file: PathBuf,
    },
    /// Print the completion of a declaration.
    Complete {
        #[command(flatten)]
        target: Target,
    },
    /// Print lifting rules, or materialize a lifting.
    Lift {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value_t = ModeArg::Completion)]
        mode: ModeArg,
        #[arg(long)]
        print_rules: bool,
        /// Relations to lift, one per type parameter.
        #[arg(long)]
        rel: Vec<String>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Decide whether two values are related by a lifting.
    Relate {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value_t = ModeArg::Completion)]
        mode: ModeArg,
        #[arg(long, required = true)]
        rel: Vec<String>,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// List the values of an instance up to a depth.
    Enumerate {
        #[command(flatten)]
        target: Target,
        /// Index types of the instance, in order.
        #[arg(long = "index", required = true)]
        index: Vec<String>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Check that the lifting preserves inclusions of relations.
    Preservation {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value_t = ModeArg::Completion)]
        mode: ModeArg,
        /// Sweep all relations between these types.
        #[arg(long = "type")]
        types: Vec<String>,
        /// Check only these relations.
        #[arg(long)]
        rel: Vec<String>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// The partner of a value under the graph of a function.
    Gmap {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        fun: String,
        #[arg(long)]
        value: String,
    },
    /// Check uniqueness of gmap partners over many functions and values.
    Graphlemma {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        fun: Vec<String>,
        /// Use every function from this type to itself.
        #[arg(long, conflicts_with = "fun")]
        all_functions: Option<String>,
        /// Enumerate values up to this depth.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Extra values to check.
        #[arg(long)]
        value: Vec<String>,
    },
    /// Structural mapping of a function over a sequence.
    Mappable {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        fun: String,
        #[arg(long)]
        value: String,
    },
    /// Audit a candidate `∀α. α → G α` and check its free theorem.
    Freetheorem {
        #[command(flatten)]
        target: Target,
        /// One table `A → G A` per type of the candidate's universe.
        #[arg(long)]
        table: Vec<String>,
        #[arg(long, default_value = "f")]
        name: String,
        /// Check every candidate over the `--type` universe instead.
        #[arg(long, conflicts_with = "table")]
        sweep: bool,
        #[arg(long = "type")]
        types: Vec<String>,
        /// Result depth of swept candidates.
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Built-in demonstrations.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Naive against restricted lifting of Seq on a pair of nested relations.
    Counterexample,
}

fn load(target: &Target, caps: gadtparam_core::kernel::Caps) -> Result<(Inputs, String), CliError> {
    let inputs = Inputs::load(&target.file, caps)?;
    let decl = inputs.decl(target.decl.as_deref())?;
    Ok((inputs, decl))
}

fn run(cli: &Cli, config: &RunConfig) -> Result<Output, CliError> {
    let caps = config.caps;
    let witness = config.witness;
    match &cli.command {
        Command::Check { file } => commands::check(&Inputs::load(file, caps)?),
        Command::Complete { target } => {
            let (i, d) = load(target, caps)?;
            commands::complete(&i, &d)
        }
        Command::Lift {
            target,
            mode,
            print_rules,
            rel,
            depth,
        } => {
            let (i, d) = load(target, caps)?;
            let rels = i.rels(rel)?;
            commands::lift(&i, &d, (*mode).into(), *print_rules, &rels, *depth)
        }
        Command::Relate {
            target,
            mode,
            rel,
            lhs,
            rhs,
        } => {
            let (i, d) = load(target, caps)?;
            let rels = i.rels(rel)?;
            let (x, y) = (i.term(lhs)?, i.term(rhs)?);
            commands::relate(&i, &d, (*mode).into(), &rels, &x, &y, witness)
        }
        Command::Enumerate { target, index, depth } => {
            let (i, d) = load(target, caps)?;
            let index = i.types(index)?;
            commands::enumerate(&i, &d, &index, *depth)
        }
        Command::Preservation {
            target,
            mode,
            types,
            rel,
            depth,
        } => {
            let (i, d) = load(target, caps)?;
            let (types, rels) = (i.types(types)?, i.rels(rel)?);
            commands::preservation(&i, &d, (*mode).into(), &types, &rels, *depth, witness)
        }
        Command::Gmap { target, fun, value } => {
            let (i, d) = load(target, caps)?;
            let (f, x) = (i.fun(fun)?, i.term(value)?);
            commands::gmap(&i, &d, &f, &x, witness)
        }
        Command::Graphlemma {
            target,
            fun,
            all_functions,
            depth,
            value,
        } => {
            let (i, d) = load(target, caps)?;
            let fs = match all_functions {
                Some(ty) => commands::all_functions(&i, &i.ty(ty)?)?,
                None => i.funs(fun)?,
            };
            let spots = i.terms(value)?;
            commands::graphlemma(&i, &d, &fs, *depth, &spots)
        }
        Command::Mappable { target, fun, value } => {
            let (i, d) = load(target, caps)?;
            let (f, x) = (i.fun(fun)?, i.term(value)?);
            commands::mappable(&i, &d, &f, &x)
        }
        Command::Freetheorem {
            target,
            table,
            name,
            sweep,
            types,
            depth,
        } => {
            let (i, d) = load(target, caps)?;
            if *sweep {
                if types.is_empty() {
                    return Err(CliError::Usage("--sweep needs at least one --type".into()));
                }
                commands::freetheorem_sweep(&i, &d, &i.types(types)?, *depth)
            } else {
                if table.is_empty() {
                    return Err(CliError::Usage("give --table at least once, or --sweep".into()));
                }
                commands::freetheorem(&i, &d, name, &i.funs(table)?)
            }
        }
        Command::Demo {
            which: Demo::Counterexample,
        } => {
            let i = Inputs::from_text(Path::new("<demo>"), commands::DEMO_SOURCE, caps)?;
            commands::demo_counterexample(&i, witness)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = if cli.json { Format::Json } else { cli.format };
    let overrides = CapOverrides {
        max_carrier: cli.max_carrier,
        max_depth: cli.max_depth,
        max_rel_enum: cli.max_rel_enum,
    };
    let env_cap = std::env::var(MAX_REL_ENUM_VAR).ok();
    let config = match RunConfig::new(overrides, env_cap.as_deref(), format, cli.witness) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(error::EXIT_USAGE);
        }
    };
    match run(&cli, &config) {
        Ok(out) => {
            let body = match config.format {
                Format::Text => out.text.clone(),
                Format::Json => format!("{}\n", out.report.to_pretty()),
            };
            // A closed pipe downstream is not an error of ours.
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            ExitCode::from(out.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
