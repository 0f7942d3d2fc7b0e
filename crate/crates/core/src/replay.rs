//! Step-by-step replay of proof scripts as matrix identities.
//!
//! Every check here is a necessary condition only: mod-2 homology does not see
//! isotopy, orientations, or the sign of a twist.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Bindings;
use crate::gf2::GF2Matrix;
use crate::ledger::{matrix_digest, MembershipLedger, IDENTITY_ORIGIN};
use crate::script::{expand_ranges, DerivationStep, Justification, ProofScript, ScriptId, StepKind};
use crate::surface::{CurveFamily, CurveName, GenusConfig, HomologyClass};
use crate::word::{Atom, Evaluator, Resolved, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail {
        reason: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        lhs_digest: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        rhs_digest: Option<String>,
    },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    fn fail(reason: impl Into<String>) -> Self {
        Verdict::Fail {
            reason: reason.into(),
            lhs_digest: None,
            rhs_digest: None,
        }
    }
}

/// Why a single instance of a step did not pass.
#[derive(Debug)]
enum Failure {
    /// The words could not be evaluated at this genus.
    Eval(Error),
    /// The claim was evaluated and is false.
    Claim {
        reason: String,
        lhs: Option<GF2Matrix>,
        rhs: Option<GF2Matrix>,
    },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Eval(e)
    }
}

impl Failure {
    fn claim(reason: impl Into<String>) -> Self {
        Failure::Claim {
            reason: reason.into(),
            lhs: None,
            rhs: None,
        }
    }

    fn into_verdict(self, context: &str) -> Verdict {
        match self {
            Failure::Eval(e) => Verdict::fail(format!("{context}{e}")),
            Failure::Claim { reason, lhs, rhs } => Verdict::Fail {
                reason: format!("{context}{reason}"),
                lhs_digest: lhs.as_ref().map(matrix_digest),
                rhs_digest: rhs.as_ref().map(matrix_digest),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub id: String,
    pub kind: String,
    pub anchor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub instances: usize,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EstablishedElement {
    pub word: String,
    pub digest: String,
    pub origins: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofReport {
    pub script: String,
    pub title: String,
    pub genus: usize,
    pub r: usize,
    /// Branch conditions that selected steps in this run.
    pub branches: Vec<String>,
    pub steps: Vec<StepRecord>,
    pub established: Vec<EstablishedElement>,
    pub missing_targets: Vec<String>,
    pub passed: bool,
}

impl ProofReport {
    pub fn failed_steps(&self) -> impl Iterator<Item = &StepRecord> {
        self.steps.iter().filter(|s| !s.verdict.is_pass())
    }
}

/// Replay state: the word environment and the ledger.
#[derive(Clone, Debug)]
pub struct Replayer {
    ev: Evaluator,
    ledger: MembershipLedger,
    hypothesis_origins: BTreeSet<String>,
}

fn instance_label(b: &Bindings) -> String {
    let loops: Vec<String> = b
        .iter()
        .filter(|(k, _)| !matches!(*k, "g" | "r" | "h" | "nc"))
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    if loops.is_empty() {
        String::new()
    } else {
        format!("[{}] ", loops.join(", "))
    }
}

impl Replayer {
    pub fn new(cfg: GenusConfig) -> Self {
        Self {
            ev: Evaluator::new(cfg),
            ledger: MembershipLedger::new(cfg.genus()),
            hypothesis_origins: BTreeSet::new(),
        }
    }

    pub fn ledger(&self) -> &MembershipLedger {
        &self.ledger
    }

    pub fn evaluator(&mut self) -> &mut Evaluator {
        &mut self.ev
    }

    fn base(&self) -> Bindings {
        self.ev.bindings()
    }

    fn apply_curve(&mut self, w: &GF2Matrix, from: CurveName, to: CurveName) -> std::result::Result<(), Failure> {
        let src = self.ev.support_class(from)?;
        let dst = self.ev.support_class(to)?;
        let img = HomologyClass::from_vector(w.apply(src.vector())?);
        if img != dst {
            return Err(Failure::claim(format!(
                "{from} = {src} is sent to {img}, but {to} = {dst}"
            )));
        }
        Ok(())
    }

    /// Checks that every factor of `w` is established with an admissible origin.
    fn check_established(
        &mut self,
        w: &Word,
        b: &Bindings,
        admissible: &BTreeSet<String>,
        depth: usize,
    ) -> std::result::Result<(), Failure> {
        if depth > 16 {
            return Err(Failure::claim("named words nest too deeply"));
        }
        for f in &w.factors {
            let m = self.ev.eval_atom(&f.atom, b)?;
            if let Some(origins) = self.ledger.origins(&m) {
                if origins.iter().any(|o| admissible.contains(o)) {
                    continue;
                }
                if !matches!(f.atom, Atom::Group(_)) {
                    return Err(Failure::claim(format!(
                        "{} is established by {} but that step is not cited",
                        Word::from_factors(vec![f.clone()]),
                        origins.join(", ")
                    )));
                }
            }
            match &f.atom {
                Atom::Group(inner) => self.check_established(inner, b, admissible, depth + 1)?,
                Atom::Symbol(s) => {
                    let named = match s.resolve(b)? {
                        Resolved::Named(key) => self.ev.named_word(&key).cloned(),
                        Resolved::Generator(_) => None,
                    };
                    match named {
                        Some(def) => {
                            let base = self.base();
                            self.check_established(&def, &base, admissible, depth + 1)?
                        }
                        None => {
                            return Err(Failure::claim(format!(
                                "{} is not established",
                                Word::from_factors(vec![f.clone()])
                            )))
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_instance(
        &mut self,
        step: &DerivationStep,
        b: &Bindings,
        prefix: &str,
        lemma_mode: bool,
    ) -> std::result::Result<(), Failure> {
        let full_id = format!("{prefix}{}", step.id);
        match step.kind {
            StepKind::Identity => {
                let lhs = self.ev.eval(&step.lhs, b)?;
                let rhs = self.ev.eval(step.rhs.as_ref().expect("validated"), b)?;
                if lhs != rhs {
                    return Err(Failure::Claim {
                        reason: "the two sides differ".into(),
                        lhs: Some(lhs),
                        rhs: Some(rhs),
                    });
                }
            }
            StepKind::Involution => {
                let m = self.ev.eval(&step.lhs, b)?;
                let sq = m.mul(&m)?;
                if !sq.is_identity() {
                    return Err(Failure::Claim {
                        reason: "the square is not the identity".into(),
                        lhs: Some(sq),
                        rhs: None,
                    });
                }
            }
            StepKind::Mapsto => {
                let w = self.ev.eval(&step.lhs, b)?;
                for (f, t) in step.from.iter().zip(&step.to) {
                    self.apply_curve(&w, f.resolve(b)?, t.resolve(b)?)?;
                }
            }
            StepKind::Membership => {
                let lhs = self.ev.eval(&step.lhs, b)?;
                if step.is_hypothesis() {
                    if lemma_mode && !self.ledger.contains(&lhs) {
                        return Err(Failure::claim(format!(
                            "hypothesis {} is not established by the calling proof",
                            step.lhs
                        )));
                    }
                    self.ledger.establish(&lhs, &full_id);
                } else {
                    if let Some(rhs) = &step.rhs {
                        let r = self.ev.eval(rhs, b)?;
                        if r != lhs {
                            return Err(Failure::Claim {
                                reason: "the claimed element differs from its witness".into(),
                                lhs: Some(lhs),
                                rhs: Some(r),
                            });
                        }
                    }
                    let mut admissible: BTreeSet<String> = step
                        .justification
                        .iter()
                        .filter_map(|j| match j {
                            Justification::Step(id) => Some(format!("{prefix}{id}")),
                            Justification::Hypothesis => None,
                        })
                        .collect();
                    admissible.insert(full_id.clone());
                    admissible.insert(IDENTITY_ORIGIN.to_string());
                    admissible.extend(self.hypothesis_origins.iter().cloned());
                    let witness = step.rhs.as_ref().unwrap_or(&step.lhs).clone();
                    self.check_established(&witness, b, &admissible, 0)?;
                    self.ledger.establish(&lhs, &full_id);
                }
                if let Some(name) = &step.name {
                    self.ev.bind(name, &step.lhs, b)?;
                }
            }
            StepKind::Lemma => unreachable!("lemmas are replayed by the caller"),
        }
        Ok(())
    }

    /// Runs every instance of a step; the first failing instance decides.
    fn run_step(
        &mut self,
        step: &DerivationStep,
        prefix: &str,
        lemma_mode: bool,
    ) -> std::result::Result<usize, (usize, Verdict)> {
        let base = self.base();
        let instances = step.instances(&base).map_err(|e| (0, Verdict::fail(e.to_string())))?;
        for (k, b) in instances.iter().enumerate() {
            if let Err(f) = self.check_instance(step, b, prefix, lemma_mode) {
                return Err((k, f.into_verdict(&instance_label(b))));
            }
        }
        Ok(instances.len())
    }
}

impl Replayer {
    /// Records the targets of a replayed lemma under the citing step's id.
    fn establish_targets(&mut self, script: &ProofScript, origin: &str) -> Result<()> {
        let base = self.base();
        for t in &script.targets {
            for b in expand_ranges(&t.forall, &base)? {
                let m = self.ev.eval(&t.word, &b)?;
                self.ledger.establish(&m, origin);
            }
        }
        Ok(())
    }

    fn replay_into(
        &mut self,
        script: &ProofScript,
        prefix: &str,
        lemma_mode: bool,
        report: &mut ProofReport,
    ) -> Result<bool> {
        script.check_genus(self.ev.config())?;
        let r = self.ev.config().r() as i64;
        let mut ok = true;
        if !lemma_mode {
            if let Some(tp) = &script.transposition {
                let m = self.ev.eval(tp, &self.base())?;
                let origin = format!("{prefix}transposition");
                self.ledger.establish(&m, &origin);
                self.hypothesis_origins.insert(origin);
            }
        }
        for step in &script.steps {
            if !step.branch.selects(r) {
                continue;
            }
            if let Some(desc) = step.branch.describe() {
                let entry = format!("{}: {desc}", script.id);
                if !report.branches.contains(&entry) {
                    report.branches.push(entry);
                }
            }
            if step.is_hypothesis() {
                self.hypothesis_origins.insert(format!("{prefix}{}", step.id));
            }
            let record = if step.kind == StepKind::Lemma {
                let id = step.lemma.expect("validated");
                let inner = ProofScript::builtin(id)?;
                let inner_prefix = format!("{prefix}{}/", id);
                let saved = std::mem::take(&mut self.hypothesis_origins);
                let passed = self.replay_into(&inner, &inner_prefix, true, report)?;
                self.hypothesis_origins = saved;
                if passed {
                    self.establish_targets(&inner, &format!("{prefix}{}", step.id))?;
                }
                StepRecord {
                    id: format!("{prefix}{}", step.id),
                    kind: step.kind.as_str().into(),
                    anchor: step.anchor.clone(),
                    note: step.note.clone(),
                    instances: 1,
                    verdict: if passed {
                        Verdict::Pass
                    } else {
                        Verdict::fail(format!("{id} did not establish all of its targets"))
                    },
                }
            } else {
                let (instances, verdict) = match self.run_step(step, prefix, lemma_mode) {
                    Ok(n) => (n, Verdict::Pass),
                    Err((k, v)) => (k + 1, v),
                };
                StepRecord {
                    id: format!("{prefix}{}", step.id),
                    kind: step.kind.as_str().into(),
                    anchor: step.anchor.clone(),
                    note: step.note.clone(),
                    instances,
                    verdict,
                }
            };
            ok &= record.verdict.is_pass();
            report.steps.push(record);
        }
        let base = self.base();
        for t in &script.targets {
            for b in expand_ranges(&t.forall, &base)? {
                let label = format!("{prefix}{}{}", instance_label(&b), t.word);
                let label = label.trim_end().to_string();
                match self.ev.eval(&t.word, &b) {
                    Ok(m) => match self.ledger.origins(&m) {
                        Some(origins) if !lemma_mode => report.established.push(EstablishedElement {
                            word: label,
                            digest: matrix_digest(&m),
                            origins: origins.to_vec(),
                        }),
                        Some(_) => {}
                        None => {
                            ok = false;
                            report.missing_targets.push(label);
                        }
                    },
                    Err(e) => {
                        ok = false;
                        report.missing_targets.push(format!("{label}: {e}"));
                    }
                }
            }
        }
        if !lemma_mode {
            if let Some(tp) = &script.transposition {
                let m = self.ev.eval(tp, &base)?;
                report.established.push(EstablishedElement {
                    word: format!("{prefix}{tp}"),
                    digest: matrix_digest(&m),
                    origins: self.ledger.origins(&m).map(|o| o.to_vec()).unwrap_or_default(),
                });
            }
        }
        Ok(ok)
    }
}

/// Replays a shipped proof script at the given genus.
///
/// Genus-constraint violations are errors; failing steps produce a report
/// with `passed == false`.
pub fn replay_proof(id: ScriptId, cfg: &GenusConfig) -> Result<ProofReport> {
    let script = ProofScript::builtin(id)?;
    replay_script(&script, cfg)
}

pub fn replay_script(script: &ProofScript, cfg: &GenusConfig) -> Result<ProofReport> {
    let mut rp = Replayer::new(*cfg);
    let mut report = ProofReport {
        script: script.id.to_string(),
        title: script.title.clone(),
        genus: cfg.genus(),
        r: cfg.r(),
        branches: Vec::new(),
        steps: Vec::new(),
        established: Vec::new(),
        missing_targets: Vec::new(),
        passed: false,
    };
    let ok = rp.replay_into(script, "", false, &mut report)?;
    report.passed = ok && report.failed_steps().next().is_none();
    Ok(report)
}

/// Checks a standalone identity step (no named words, no ledger).
pub fn check_identity(step: &DerivationStep, cfg: &GenusConfig) -> Result<Verdict> {
    if step.kind != StepKind::Identity {
        return Err(Error::Script(format!("step {} is not an identity", step.id)));
    }
    let mut rp = Replayer::new(*cfg);
    Ok(match rp.run_step(step, "", false) {
        Ok(_) => Verdict::Pass,
        Err((_, v)) => v,
    })
}

/// Checks `w(from_k) = to_k` on homology for every slot.
pub fn check_mapsto(w: &Word, from: &[CurveName], to: &[CurveName], cfg: &GenusConfig) -> Result<Verdict> {
    if from.len() != to.len() {
        return Err(Error::Script("mapsto lists differ in length".into()));
    }
    let mut rp = Replayer::new(*cfg);
    let b = rp.base();
    let m = rp.ev.eval(w, &b)?;
    for (f, t) in from.iter().zip(to) {
        match rp.apply_curve(&m, *f, *t) {
            Ok(()) => {}
            Err(Failure::Eval(e)) => return Err(e),
            Err(claim) => return Ok(claim.into_verdict("")),
        }
    }
    Ok(Verdict::Pass)
}

/// Checks that `w` squares to the identity.
pub fn check_involution(w: &Word, cfg: &GenusConfig) -> Result<Verdict> {
    let m = crate::word::evaluate(w, cfg)?.into_matrix();
    let sq = m.mul(&m)?;
    Ok(if sq.is_identity() {
        Verdict::Pass
    } else {
        Verdict::fail("the square is not the identity")
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivedCurve {
    D1,
    D2,
}

/// Homology class of `d_1` or `d_2` at this genus.
pub fn derived_class(which: DerivedCurve, cfg: &GenusConfig) -> Result<HomologyClass> {
    let mut ev = Evaluator::new(*cfg);
    ev.curve_class(CurveName::new(
        CurveFamily::D,
        match which {
            DerivedCurve::D1 => 1,
            DerivedCurve::D2 => 2,
        },
    ))
}

/// Result of mutating one index in one step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mutation {
    pub step: String,
    pub position: usize,
    pub mutated: String,
    pub detected: bool,
    /// True when no nearby index was valid and the mutant failed to evaluate.
    pub by_evaluation: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MutationSummary {
    pub total: usize,
    pub detected: usize,
    pub mutations: Vec<Mutation>,
}

impl MutationSummary {
    pub fn detection_rate(&self) -> f64 {
        if self.total == 0 {
            return 1.0;
        }
        self.detected as f64 / self.total as f64
    }

    pub fn survivors(&self) -> impl Iterator<Item = &Mutation> {
        self.mutations.iter().filter(|m| !m.detected)
    }
}

fn describe_step(step: &DerivationStep) -> String {
    let mut s = step.lhs.to_string();
    if let Some(r) = &step.rhs {
        s.push_str(&format!(" = {r}"));
    }
    if !step.from.is_empty() {
        let f: Vec<String> = step.from.iter().map(|c| c.to_string()).collect();
        let t: Vec<String> = step.to.iter().map(|c| c.to_string()).collect();
        s.push_str(&format!(" : ({}) -> ({})", f.join(","), t.join(",")));
    }
    s
}

/// Perturbs one index per mutant (`+1`, or `-1` when `+1` is undefined) in
/// every non-hypothesis step and checks the mutant against the ledger state
/// the original step saw.
pub fn mutation_audit(id: ScriptId, cfg: &GenusConfig) -> Result<MutationSummary> {
    let script = ProofScript::builtin(id)?;
    script.check_genus(cfg)?;
    let mut rp = Replayer::new(*cfg);
    let mut summary = MutationSummary::default();
    if let Some(tp) = &script.transposition {
        let m = rp.ev.eval(tp, &rp.base())?;
        rp.ledger.establish(&m, "transposition");
        rp.hypothesis_origins.insert("transposition".into());
    }
    let r = cfg.r() as i64;
    for step in script.steps.iter().filter(|s| s.branch.selects(r)) {
        if step.is_hypothesis() {
            rp.hypothesis_origins.insert(step.id.clone());
        }
        if step.kind != StepKind::Lemma && !step.is_hypothesis() {
            let positions = step.clone().index_exprs_mut().len();
            for pos in 0..positions {
                let mut outcome = None;
                for delta in [1, -1] {
                    let mut mutant = step.clone();
                    {
                        let mut exprs = mutant.index_exprs_mut();
                        let e = &mut exprs[pos];
                        **e = e.shifted(delta);
                    }
                    let mut trial = rp.clone();
                    let base = trial.base();
                    let mut failure = None;
                    for b in mutant.instances(&base)? {
                        if let Err(f) = trial.check_instance(&mutant, &b, "", false) {
                            failure = Some(f);
                            break;
                        }
                    }
                    let text = describe_step(&mutant);
                    match failure {
                        Some(Failure::Eval(_)) if delta == 1 => {
                            outcome = Some((text, true, true));
                            continue;
                        }
                        Some(Failure::Eval(_)) => {
                            if outcome.is_none() {
                                outcome = Some((text, true, true));
                            }
                        }
                        Some(Failure::Claim { .. }) => outcome = Some((text, true, false)),
                        None => outcome = Some((text, false, false)),
                    }
                    break;
                }
                let (mutated, detected, by_evaluation) = outcome.expect("at least one trial");
                summary.total += 1;
                summary.detected += usize::from(detected);
                summary.mutations.push(Mutation {
                    step: step.id.clone(),
                    position: pos,
                    mutated,
                    detected,
                    by_evaluation,
                });
            }
        }
        if step.kind == StepKind::Lemma {
            let inner = ProofScript::builtin(step.lemma.expect("validated"))?;
            let mut scratch = ProofReport {
                script: String::new(),
                title: String::new(),
                genus: cfg.genus(),
                r: cfg.r(),
                branches: Vec::new(),
                steps: Vec::new(),
                established: Vec::new(),
                missing_targets: Vec::new(),
                passed: false,
            };
            let saved = std::mem::take(&mut rp.hypothesis_origins);
            if rp.replay_into(&inner, &format!("{}/", inner.id), true, &mut scratch)? {
                rp.establish_targets(&inner, &step.id)?;
            }
            rp.hypothesis_origins = saved;
        } else {
            // keep the ledger in the state the next step expects
            let _ = rp.run_step(step, "", false);
        }
    }
    Ok(summary)
}
