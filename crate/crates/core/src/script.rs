//! Proof scripts: versioned TOML data files, one record per derivation step.
//!
//! The four shipped scripts live in `crates/core/scripts/` and are embedded at
//! compile time. `manifest.toml` pins the step count and statement anchor of
//! each script so that edits to the data are caught by the test suite.

use std::collections::BTreeMap;
use std::fmt;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Bindings, Cursor, Expr};
use crate::surface::{CurveFamily, CurveName, GenusConfig};
use crate::word::Word;

pub const SCRIPT_FORMAT: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
pub enum ScriptId {
    #[serde(rename = "THM21")]
    Thm21,
    #[serde(rename = "THMA")]
    ThmA,
    #[serde(rename = "THMB_EVEN")]
    ThmBEven,
    #[serde(rename = "THMB_ODD")]
    ThmBOdd,
}

impl ScriptId {
    pub const ALL: [ScriptId; 4] = [ScriptId::Thm21, ScriptId::ThmA, ScriptId::ThmBEven, ScriptId::ThmBOdd];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScriptId::Thm21 => "THM21",
            ScriptId::ThmA => "THMA",
            ScriptId::ThmBEven => "THMB_EVEN",
            ScriptId::ThmBOdd => "THMB_ODD",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        ScriptId::ALL.into_iter().find(|id| id.as_str() == s)
    }

    fn source(&self) -> &'static str {
        match self {
            ScriptId::Thm21 => include_str!("../scripts/thm21.toml"),
            ScriptId::ThmA => include_str!("../scripts/thma.toml"),
            ScriptId::ThmBEven => include_str!("../scripts/thmb_even.toml"),
            ScriptId::ThmBOdd => include_str!("../scripts/thmb_odd.toml"),
        }
    }
}

impl fmt::Display for ScriptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Any,
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Identity,
    Mapsto,
    Membership,
    Involution,
    /// Replays another script inside the current ledger.
    Lemma,
}

impl StepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepKind::Identity => "identity",
            StepKind::Mapsto => "mapsto",
            StepKind::Membership => "membership",
            StepKind::Involution => "involution",
            StepKind::Lemma => "lemma",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RangeSpec {
    var: String,
    from: String,
    to: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchSpec {
    #[serde(default)]
    r_in: Vec<i64>,
    #[serde(default)]
    r_not_in: Vec<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepSpec {
    id: String,
    kind: StepKind,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    lhs: Option<String>,
    #[serde(default)]
    rhs: Option<String>,
    #[serde(default)]
    from: Vec<String>,
    #[serde(default)]
    to: Vec<String>,
    #[serde(default)]
    justification: Vec<String>,
    #[serde(default)]
    anchor: String,
    #[serde(default)]
    note: Option<String>,
    #[serde(default)]
    forall: Vec<RangeSpec>,
    #[serde(default)]
    branch: Option<BranchSpec>,
    #[serde(default)]
    script: Option<ScriptId>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetSpec {
    word: String,
    #[serde(default)]
    forall: Vec<RangeSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptFile {
    format: u32,
    id: ScriptId,
    title: String,
    min_genus: usize,
    parity: Parity,
    #[serde(default)]
    transposition: Option<String>,
    targets: Vec<TargetSpec>,
    step: Vec<StepSpec>,
}

/// Inclusive loop range `var = from ..= to`, bounds evaluated per genus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Range {
    pub var: String,
    pub from: Expr,
    pub to: Expr,
}

/// Selects a step by the value of `r`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Branch {
    #[default]
    Always,
    RIn(Vec<i64>),
    RNotIn(Vec<i64>),
}

impl Branch {
    pub fn selects(&self, r: i64) -> bool {
        match self {
            Branch::Always => true,
            Branch::RIn(v) => v.contains(&r),
            Branch::RNotIn(v) => !v.contains(&r),
        }
    }

    pub fn describe(&self) -> Option<String> {
        let list = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Branch::Always => None,
            Branch::RIn(v) => Some(format!("r in {{{}}}", list(v))),
            Branch::RNotIn(v) => Some(format!("r not in {{{}}}", list(v))),
        }
    }
}

/// A curve name whose index may depend on `g`, `r` or loop variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveTemplate {
    pub family: CurveFamily,
    pub index: Expr,
}

impl CurveTemplate {
    pub fn parse(src: &str) -> Result<Self> {
        let mut c = Cursor::new(src.trim());
        let fam = c.ident().ok_or_else(|| c.error("expected a curve family"))?;
        let family = CurveFamily::from_symbol(fam).ok_or_else(|| c.error("unknown curve family"))?;
        c.expect(b'_')?;
        let index = if c.eat(b'{') {
            let e = c.expr()?;
            c.expect(b'}')?;
            e
        } else if let Some(n) = c.number() {
            Expr::Num(n)
        } else {
            let v = c.ident().ok_or_else(|| c.error("expected an index"))?;
            Expr::Var(v.to_string())
        };
        if !c.at_end() {
            return Err(c.error("trailing input"));
        }
        Ok(Self { family, index })
    }

    pub fn resolve(&self, b: &Bindings) -> Result<CurveName> {
        Ok(CurveName::new(self.family, self.index.eval(b)?))
    }
}

impl fmt::Display for CurveTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index.is_simple() {
            write!(f, "{}_{}", self.family.symbol(), self.index)
        } else {
            write!(f, "{}_{{{}}}", self.family.symbol(), self.index)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Hypothesis,
    Step(String),
}

/// One checkable claim of a proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationStep {
    pub id: String,
    pub kind: StepKind,
    /// Binds this name (e.g. `F_2`) to the evaluated `lhs`.
    pub name: Option<String>,
    pub lhs: Word,
    /// Identity right-hand side, or the witness of a membership claim.
    pub rhs: Option<Word>,
    pub from: Vec<CurveTemplate>,
    pub to: Vec<CurveTemplate>,
    pub justification: Vec<Justification>,
    pub anchor: String,
    pub note: Option<String>,
    pub forall: Vec<Range>,
    pub branch: Branch,
    pub lemma: Option<ScriptId>,
}

impl DerivationStep {
    pub fn is_hypothesis(&self) -> bool {
        self.justification.contains(&Justification::Hypothesis)
    }

    /// All index expressions of the step's words and curves, in a fixed order.
    pub fn index_exprs_mut(&mut self) -> Vec<&mut Expr> {
        let mut out = self.lhs.index_exprs_mut();
        if let Some(rhs) = &mut self.rhs {
            out.extend(rhs.index_exprs_mut());
        }
        out.extend(self.from.iter_mut().map(|c| &mut c.index));
        out.extend(self.to.iter_mut().map(|c| &mut c.index));
        out
    }

    /// Enumerates loop bindings in order; nested ranges may use outer variables.
    pub fn instances(&self, base: &Bindings) -> Result<Vec<Bindings>> {
        expand_ranges(&self.forall, base)
    }
}

pub(crate) fn expand_ranges(ranges: &[Range], base: &Bindings) -> Result<Vec<Bindings>> {
    let mut acc = vec![base.clone()];
    for r in ranges {
        let mut next = Vec::new();
        for b in &acc {
            let (lo, hi) = (r.from.eval(b)?, r.to.eval(b)?);
            for v in lo..=hi {
                next.push(b.with(&r.var, v));
            }
        }
        acc = next;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Target {
    pub word: Word,
    pub forall: Vec<Range>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofScript {
    pub id: ScriptId,
    pub title: String,
    pub min_genus: usize,
    pub parity: Parity,
    pub transposition: Option<Word>,
    pub targets: Vec<Target>,
    pub steps: Vec<DerivationStep>,
}

impl ProofScript {
    pub fn parse(src: &str) -> Result<Self> {
        let file: ScriptFile = toml::from_str(src).map_err(|e| Error::Script(e.to_string()))?;
        if file.format != SCRIPT_FORMAT {
            return Err(Error::Script(format!("unsupported format {}", file.format)));
        }
        let ranges = |specs: Vec<RangeSpec>| -> Result<Vec<Range>> {
            specs
                .into_iter()
                .map(|r| {
                    Ok(Range {
                        var: r.var,
                        from: parse_expr(&r.from)?,
                        to: parse_expr(&r.to)?,
                    })
                })
                .collect()
        };
        let mut steps = Vec::with_capacity(file.step.len());
        let mut seen = BTreeMap::new();
        for spec in file.step {
            if seen.insert(spec.id.clone(), ()).is_some() {
                return Err(Error::Script(format!("duplicate step id {}", spec.id)));
            }
            let step = compile_step(spec, &ranges)?;
            for j in &step.justification {
                if let Justification::Step(id) = j {
                    if !seen.contains_key(id) {
                        return Err(Error::Script(format!(
                            "step {} cites {id}, which does not precede it",
                            step.id
                        )));
                    }
                }
            }
            steps.push(step);
        }
        let targets = file
            .targets
            .into_iter()
            .map(|t| {
                Ok(Target {
                    word: Word::parse(&t.word)?,
                    forall: ranges(t.forall)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(ProofScript {
            id: file.id,
            title: file.title,
            min_genus: file.min_genus,
            parity: file.parity,
            transposition: file.transposition.as_deref().map(Word::parse).transpose()?,
            targets,
            steps,
        })
    }

    /// The shipped script for `id`.
    pub fn builtin(id: ScriptId) -> Result<Self> {
        let s = Self::parse(id.source())?;
        if s.id != id {
            return Err(Error::Script(format!("{} file declares id {}", id, s.id)));
        }
        Ok(s)
    }

    pub fn check_genus(&self, cfg: &GenusConfig) -> Result<()> {
        let g = cfg.genus();
        let parity_ok = match self.parity {
            Parity::Any => true,
            Parity::Even => g % 2 == 0,
            Parity::Odd => g % 2 == 1,
        };
        if g < self.min_genus || !parity_ok {
            let parity = match self.parity {
                Parity::Any => "",
                Parity::Even => "even ",
                Parity::Odd => "odd ",
            };
            return Err(Error::UnsupportedGenus {
                script: self.id.to_string(),
                genus: g,
                constraint: format!("{parity}g >= {}", self.min_genus),
            });
        }
        Ok(())
    }
}

fn compile_step(spec: StepSpec, ranges: &dyn Fn(Vec<RangeSpec>) -> Result<Vec<Range>>) -> Result<DerivationStep> {
    let bad = |msg: &str| Error::Script(format!("step {}: {msg}", spec.id));
    let lhs = match (&spec.lhs, spec.kind) {
        (Some(s), _) => Word::parse(s)?,
        (None, StepKind::Lemma) => Word::empty(),
        (None, _) => return Err(bad("missing lhs")),
    };
    let rhs = spec.rhs.as_deref().map(Word::parse).transpose()?;
    match spec.kind {
        StepKind::Identity if rhs.is_none() => return Err(bad("identity needs rhs")),
        StepKind::Mapsto if spec.from.len() != spec.to.len() || spec.from.is_empty() => {
            return Err(bad("mapsto needs equally long, nonempty from/to lists"))
        }
        StepKind::Lemma if spec.script.is_none() => return Err(bad("lemma needs script")),
        _ => {}
    }
    let justification = spec
        .justification
        .iter()
        .map(|j| match j.as_str() {
            "hypothesis" => Justification::Hypothesis,
            other => Justification::Step(other.to_string()),
        })
        .collect();
    let branch = match spec.branch {
        None => Branch::Always,
        Some(b) if !b.r_in.is_empty() && b.r_not_in.is_empty() => Branch::RIn(b.r_in),
        Some(b) if b.r_in.is_empty() && !b.r_not_in.is_empty() => Branch::RNotIn(b.r_not_in),
        Some(_) => return Err(bad("branch needs exactly one of r_in / r_not_in")),
    };
    Ok(DerivationStep {
        kind: spec.kind,
        name: spec.name,
        lhs,
        rhs,
        from: spec
            .from
            .iter()
            .map(|s| CurveTemplate::parse(s))
            .collect::<Result<_>>()?,
        to: spec.to.iter().map(|s| CurveTemplate::parse(s)).collect::<Result<_>>()?,
        justification,
        anchor: spec.anchor,
        note: spec.note,
        forall: ranges(spec.forall)?,
        branch,
        lemma: spec.script,
        id: spec.id,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub id: ScriptId,
    pub file: String,
    pub steps: usize,
    pub anchor: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format: u32,
    pub script: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn builtin() -> Result<Self> {
        toml::from_str(include_str!("../scripts/manifest.toml")).map_err(|e| Error::Script(e.to_string()))
    }

    pub fn entry(&self, id: ScriptId) -> Option<&ManifestEntry> {
        self.script.iter().find(|e| e.id == id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_templates() {
        let c = CurveTemplate::parse("alpha_{g-1}").unwrap();
        assert_eq!(c.family, CurveFamily::Alpha);
        assert_eq!(c.to_string(), "alpha_{g-1}");
        assert_eq!(CurveTemplate::parse("gamma_10").unwrap().to_string(), "gamma_10");
        assert!(CurveTemplate::parse("zeta_1").is_err());
        assert!(CurveTemplate::parse("a_1 b").is_err());
    }

    #[test]
    fn nested_ranges_expand_in_order() {
        let ranges = vec![
            Range {
                var: "i".into(),
                from: parse_expr("1").unwrap(),
                to: parse_expr("3").unwrap(),
            },
            Range {
                var: "j".into(),
                from: parse_expr("i+1").unwrap(),
                to: parse_expr("3").unwrap(),
            },
        ];
        let out = expand_ranges(&ranges, &Bindings::default()).unwrap();
        let pairs: Vec<(i64, i64)> = out.iter().map(|b| (b.get("i").unwrap(), b.get("j").unwrap())).collect();
        assert_eq!(pairs, vec![(1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn rejects_forward_references_and_bad_kinds() {
        let head = "format = 1\nid = \"THM21\"\ntitle = \"x\"\nmin_genus = 7\nparity = \"any\"\ntargets = []\n";
        let forward =
            format!("{head}[[step]]\nid = \"s1\"\nkind = \"membership\"\nlhs = \"T\"\njustification = [\"s2\"]\n");
        assert!(matches!(ProofScript::parse(&forward), Err(Error::Script(_))));
        let no_rhs = format!("{head}[[step]]\nid = \"s1\"\nkind = \"identity\"\nlhs = \"T\"\n");
        assert!(ProofScript::parse(&no_rhs).is_err());
        let dup = format!(
            "{head}[[step]]\nid = \"s1\"\nkind = \"involution\"\nlhs = \"T\"\n[[step]]\nid = \"s1\"\nkind = \"involution\"\nlhs = \"T\"\n"
        );
        assert!(ProofScript::parse(&dup).is_err());
    }

    #[test]
    fn builtin_scripts_parse() {
        for id in ScriptId::ALL {
            let s = ProofScript::builtin(id).unwrap();
            assert!(!s.steps.is_empty(), "{id}");
        }
    }

    #[test]
    fn genus_constraints() {
        let a = ProofScript::builtin(ScriptId::ThmA).unwrap();
        assert!(a.check_genus(&GenusConfig::new(19).unwrap()).is_ok());
        assert!(matches!(
            a.check_genus(&GenusConfig::new(18).unwrap()),
            Err(Error::UnsupportedGenus { .. })
        ));
        let be = ProofScript::builtin(ScriptId::ThmBEven).unwrap();
        assert!(be.check_genus(&GenusConfig::new(25).unwrap()).is_err());
        assert!(be.check_genus(&GenusConfig::new(27).unwrap()).is_err());
        assert!(be.check_genus(&GenusConfig::new(26).unwrap()).is_ok());
    }
}
