use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use crosscap_cli::{run, theorem_id, Command, Format, RunConfig, SetChoice, EXIT_USAGE};
use crosscap_core::groupcert::{Mode, DEFAULT_SEED};
use crosscap_core::script::ScriptId;
use crosscap_core::SetName;

#[derive(Parser, Debug)]
#[command(
    name = "crosscap",
    version,
    about = "Mod-2 proof replay and order certification for crosscap surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Cmd>,

    /// Genus g of the surface.
    #[arg(long, global = true)]
    genus: Option<usize>,

    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for randomized Schreier-Sims.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Full)]
    mode: ModeArg,

    /// After a replay, also certify the order of the theorem's generators.
    #[arg(long, global = true)]
    certify_order: bool,

    /// Directory for cached base and strong generating sets.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Override the memory guard.
    #[arg(long, global = true)]
    force: bool,

    /// Print the curve-class and generator tables.
    #[arg(long, global = true)]
    dump_model: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Replay a proof script: 2.1, A, B-even or B-odd.
    Theorem {
        #[arg(value_parser = parse_theorem)]
        id: ScriptId,
    },
    /// Certify the order of a generating set.
    Certify {
        #[arg(long, value_enum)]
        set: SetArg,
        /// Word file for `--set custom`, one word per line.
        #[arg(long, required_if_eq("set", "custom"))]
        words: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Full,
    Quotient,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SetArg {
    #[value(name = "thm21")]
    Thm21,
    #[value(name = "thmA")]
    ThmA,
    #[value(name = "thmB")]
    ThmB,
    #[value(name = "szepietowski")]
    Szepietowski,
    #[value(name = "custom")]
    Custom,
}

fn parse_theorem(s: &str) -> Result<ScriptId, String> {
    theorem_id(s).ok_or_else(|| format!("unknown theorem {s:?}; expected 2.1, A, B-even or B-odd"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match (cli.command, cli.dump_model) {
        (_, true) => Command::DumpModel,
        (Some(Cmd::Theorem { id }), false) => Command::Theorem(id),
        (Some(Cmd::Certify { set, words }), false) => Command::Certify(match set {
            SetArg::Thm21 => SetChoice::Named(SetName::Thm21),
            SetArg::ThmA => SetChoice::Named(SetName::ThmA),
            SetArg::ThmB => SetChoice::Named(SetName::ThmB),
            SetArg::Szepietowski => SetChoice::Named(SetName::Szepietowski),
            SetArg::Custom => SetChoice::Custom(words.expect("clap enforces --words")),
        }),
        (None, false) => {
            eprintln!("error: a command (theorem, certify) or --dump-model is required");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let cfg = RunConfig {
        genus: cli.genus,
        command,
        mode: match cli.mode {
            ModeArg::Full => Mode::Full,
            ModeArg::Quotient => Mode::Quotient,
        },
        seed: cli.seed,
        cache_dir: cli.cache_dir,
        format: if cli.json { Format::Json } else { Format::Text },
        force: cli.force,
        certify_order: cli.certify_order,
    };
    let report = run(&cfg);
    print!("{}", report.render(cfg.format));
    if let (Some(e), Format::Json) = (&report.error, cfg.format) {
        eprintln!("error: {e}");
    }
    ExitCode::from(report.exit_code as u8)
}
