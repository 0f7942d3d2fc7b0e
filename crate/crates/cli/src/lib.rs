//! Command runners and report rendering for the `crosscap` binary.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use crosscap_core::gensets::{custom_set, named_set, GeneratorSet, SetName};
use crosscap_core::groupcert::{expected_for, group_order, Mode, OrderOptions, OrderResult, DEFAULT_SEED};
use crosscap_core::replay::{replay_proof, StepRecord};
use crosscap_core::script::ScriptId;
use crosscap_core::surface::dump_model;
use crosscap_core::{Error, GenusConfig};
use serde::Serialize;

pub const TOOL: &str = "crosscap";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetChoice {
    Named(SetName),
    Custom(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Theorem(ScriptId),
    Certify(SetChoice),
    DumpModel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// `None` picks the command's default genus.
    pub genus: Option<usize>,
    pub command: Command,
    pub mode: Mode,
    pub seed: u64,
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
    pub force: bool,
    pub certify_order: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            genus: None,
            command,
            mode: Mode::Full,
            seed: DEFAULT_SEED,
            cache_dir: None,
            format: Format::Text,
            force: false,
            certify_order: false,
        }
    }

    fn resolved_genus(&self) -> usize {
        self.genus.unwrap_or(match &self.command {
            Command::Theorem(id) => match id {
                ScriptId::Thm21 => 7,
                ScriptId::ThmA => 19,
                ScriptId::ThmBEven => 26,
                ScriptId::ThmBOdd => 27,
            },
            _ => 7,
        })
    }
}

/// User-facing theorem names.
pub fn theorem_id(name: &str) -> Option<ScriptId> {
    match name {
        "2.1" => Some(ScriptId::Thm21),
        "A" => Some(ScriptId::ThmA),
        "B-even" => Some(ScriptId::ThmBEven),
        "B-odd" => Some(ScriptId::ThmBOdd),
        _ => None,
    }
}

pub fn theorem_name(id: ScriptId) -> &'static str {
    match id {
        ScriptId::Thm21 => "2.1",
        ScriptId::ThmA => "A",
        ScriptId::ThmBEven => "B-even",
        ScriptId::ThmBOdd => "B-odd",
    }
}

/// Generating set whose order a theorem's `--certify-order` checks.
pub fn hypothesis_set(id: ScriptId) -> SetName {
    match id {
        ScriptId::Thm21 => SetName::Thm21,
        ScriptId::ThmA => SetName::ThmA,
        ScriptId::ThmBEven | ScriptId::ThmBOdd => SetName::ThmB,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderRecord {
    pub set: String,
    pub words: Vec<String>,
    pub mode: Mode,
    pub computed: String,
    pub expected: String,
    pub certificate: String,
    pub degree: u64,
    pub base_length: usize,
    pub orbit_sizes: Vec<usize>,
    pub strong_generators: usize,
    pub verified: bool,
    pub from_cache: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Phase {
    pub name: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub genus: usize,
    pub seed: u64,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub script: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub branches: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<StepRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub missing_targets: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<OrderRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub timing: Vec<Phase>,
}

impl Report {
    fn new(command: String, genus: usize, seed: u64) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            command,
            genus,
            seed,
            exit_code: EXIT_PASS,
            script: None,
            branches: Vec::new(),
            steps: Vec::new(),
            missing_targets: Vec::new(),
            order: None,
            model: None,
            error: None,
            timing: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "{} {}  {}  genus {}",
            self.tool, self.version, self.command, self.genus
        )
        .unwrap();
        if let Some(script) = &self.script {
            writeln!(s, "script {script}").unwrap();
        }
        for b in &self.branches {
            writeln!(s, "branch {b}").unwrap();
        }
        for step in &self.steps {
            let (mark, reason) = match &step.verdict {
                crosscap_core::Verdict::Pass => ("PASS", String::new()),
                crosscap_core::Verdict::Fail { reason, .. } => ("FAIL", format!("  -- {reason}")),
            };
            writeln!(s, "{mark} {:<12} {:<11} {}{reason}", step.id, step.kind, step.anchor).unwrap();
        }
        for t in &self.missing_targets {
            writeln!(s, "MISSING target {t}").unwrap();
        }
        if let Some(o) = &self.order {
            let words = if o.words.is_empty() {
                "(none)".to_string()
            } else {
                o.words.join(", ")
            };
            writeln!(s, "set {} ({} mode): {words}", o.set, o.mode.as_str()).unwrap();
            writeln!(s, "order computed {}", o.computed).unwrap();
            writeln!(s, "order expected {}", o.expected).unwrap();
            writeln!(
                s,
                "certificate {}  degree {}  base {}  strong generators {}{}",
                o.certificate,
                o.degree,
                o.base_length,
                o.strong_generators,
                if o.from_cache { "  (cache)" } else { "" }
            )
            .unwrap();
        }
        if let Some(m) = &self.model {
            s.push_str(m);
        }
        if let Some(e) = &self.error {
            writeln!(s, "error: {e}").unwrap();
        }
        for p in &self.timing {
            writeln!(s, "time {} {:.3}s", p.name, p.seconds).unwrap();
        }
        let status = match self.exit_code {
            EXIT_PASS => "PASS",
            EXIT_FAIL => "FAIL",
            EXIT_USAGE => "USAGE ERROR",
            _ => "RESOURCE GUARD",
        };
        writeln!(s, "result {status}").unwrap();
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => self.to_json() + "\n",
        }
    }
}

/// Exit code for an error raised while running a command.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::MemoryGuard { .. } | Error::VerificationTooLarge { .. } | Error::OracleOverflow { .. } => EXIT_RESOURCE,
        Error::GenusTooSmall(_)
        | Error::UnsupportedGenus { .. }
        | Error::Parse { .. }
        | Error::UnknownWord(_)
        | Error::UnboundVariable(_)
        | Error::UndefinedCurve { .. }
        | Error::UndefinedGenerator { .. }
        | Error::Io(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

fn timed<T>(report: &mut Report, name: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    report.timing.push(Phase {
        name: name.into(),
        seconds: start.elapsed().as_secs_f64(),
    });
    out
}

fn certify(report: &mut Report, set: GeneratorSet, cfg: &GenusConfig, run: &RunConfig) -> Result<i32, Error> {
    let expected = expected_for(cfg, run.mode);
    let opts = OrderOptions {
        mode: run.mode,
        seed: run.seed,
        target: Some(expected.clone()),
        force: run.force,
        cache_dir: run.cache_dir.clone(),
    };
    let r: OrderResult = timed(report, "certify", || group_order(&set.matrices, cfg, &opts))?;
    let code = if r.certificate.is_success() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    };
    report.order = Some(OrderRecord {
        set: set.label,
        words: set.words,
        mode: run.mode,
        computed: r.order.to_string(),
        expected: expected.to_string(),
        certificate: r.certificate.as_str().into(),
        degree: r.degree,
        base_length: r.base.len(),
        orbit_sizes: r.orbit_sizes,
        strong_generators: r.strong_generators,
        verified: r.verified,
        from_cache: r.from_cache,
    });
    Ok(code)
}

fn execute(report: &mut Report, run: &RunConfig, genus: usize) -> Result<i32, Error> {
    let cfg = GenusConfig::new(genus)?;
    match &run.command {
        Command::Theorem(id) => {
            let proof = timed(report, "replay", || replay_proof(*id, &cfg))?;
            report.script = Some(proof.script.clone());
            report.branches = proof.branches.clone();
            report.steps = proof.steps.clone();
            report.missing_targets = proof.missing_targets.clone();
            let mut code = if proof.passed { EXIT_PASS } else { EXIT_FAIL };
            if run.certify_order {
                let set = named_set(hypothesis_set(*id), &cfg)?;
                code = code.max(certify(report, set, &cfg, run)?);
            }
            Ok(code)
        }
        Command::Certify(choice) => {
            let set = match choice {
                SetChoice::Named(name) => named_set(*name, &cfg)?,
                SetChoice::Custom(path) => custom_set(path, &cfg)?,
            };
            certify(report, set, &cfg, run)
        }
        Command::DumpModel => {
            report.model = Some(dump_model(&cfg)?);
            Ok(EXIT_PASS)
        }
    }
}

fn command_label(c: &Command) -> String {
    match c {
        Command::Theorem(id) => format!("theorem {}", theorem_name(*id)),
        Command::Certify(SetChoice::Named(n)) => format!("certify {n}"),
        Command::Certify(SetChoice::Custom(p)) => format!("certify custom {}", p.display()),
        Command::DumpModel => "dump-model".into(),
    }
}

/// Runs one command. Errors are folded into the report and its exit code.
pub fn run(run: &RunConfig) -> Report {
    let genus = run.resolved_genus();
    let mut report = Report::new(command_label(&run.command), genus, run.seed);
    report.exit_code = match execute(&mut report, run, genus) {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code_for(&e);
            report.error = Some(e.to_string());
            code
        }
    };
    report
}
