//! Words in the named generators and their evaluation to isometry matrices.
//!
//! The text syntax follows the notation used for mapping classes:
//!
//! ```text
//! u_{g-1} Gamma_{10} C_2^{-1}
//! (F_2 F_1^{-1}) F_2 (F_2 F_1^{-1})^{-1}
//! rho_2 A_2 B_rB_3 u_{r+3}
//! T^{2i-6} (B_3 C_3^{-1}) T^{6-2i}
//! ```
//!
//! Subscripts are a run of digits, a single letter, or a braced expression.
//! Capitalised curve families (`A`, `B`, `C`, `Gamma`, `D`, ...) denote Dehn
//! twists; `T`, `rho_k`, `u_i`, `v_i`, `y_i` and `phi_{i,j}` are the other
//! generators. Any other symbol names a previously bound word (`F_1`, `H_3`).
//! Words compose functionally: the rightmost factor is applied first.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Bindings, Cursor, Expr};
use crate::gf2::GF2Matrix;
use crate::surface::{self, CurveFamily, CurveName, GeneratorName, GenusConfig, HomologyClass, IsometryMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub indices: Vec<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Symbol(Symbol),
    Group(Word),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub atom: Atom,
    pub exponent: Expr,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    pub factors: Vec<Factor>,
}

/// What a symbol resolves to once its indices are known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolved {
    Generator(GeneratorName),
    Named(String),
}

impl Symbol {
    pub fn resolve(&self, b: &Bindings) -> Result<Resolved> {
        let idx: Vec<i64> = self.indices.iter().map(|e| e.eval(b)).collect::<Result<_>>()?;
        let gen = match (self.name.as_str(), idx.as_slice()) {
            ("T", []) => Some(GeneratorName::T),
            ("rho", [1]) => Some(GeneratorName::Rho1),
            ("rho", [2]) => Some(GeneratorName::Rho2),
            ("u", [i]) => Some(GeneratorName::U(*i)),
            ("v", [i]) => Some(GeneratorName::V(*i)),
            ("y", [i]) => Some(GeneratorName::Y(*i)),
            ("phi", [i, j]) => Some(GeneratorName::Phi(*i, *j)),
            (fam, [i]) => CurveFamily::from_twist_symbol(fam).map(|f| GeneratorName::Twist(CurveName::new(f, *i))),
            _ => None,
        };
        if let Some(g) = gen {
            return Ok(Resolved::Generator(g));
        }
        let key = match idx.as_slice() {
            [] => self.name.clone(),
            [i] => format!("{}_{}", self.name, i),
            many => {
                let parts: Vec<String> = many.iter().map(|i| i.to_string()).collect();
                format!("{}_{{{}}}", self.name, parts.join(","))
            }
        };
        Ok(Resolved::Named(key))
    }
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn parse(src: &str) -> Result<Word> {
        let mut c = Cursor::new(src);
        let w = parse_word(&mut c)?;
        if !c.at_end() {
            return Err(c.error("unexpected character"));
        }
        Ok(w)
    }

    pub fn from_factors(factors: Vec<Factor>) -> Self {
        Word { factors }
    }

    pub fn symbol(name: &str, indices: &[i64], exponent: i64) -> Self {
        Word {
            factors: vec![Factor {
                atom: Atom::Symbol(Symbol {
                    name: name.to_string(),
                    indices: indices.iter().map(|&i| Expr::Num(i)).collect(),
                }),
                exponent: Expr::Num(exponent),
            }],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Word { factors }
    }

    /// Formal inverse: factors reversed with negated exponents.
    pub fn inverse(&self) -> Word {
        Word {
            factors: self
                .factors
                .iter()
                .rev()
                .map(|f| Factor {
                    atom: f.atom.clone(),
                    exponent: match &f.exponent {
                        Expr::Num(n) => Expr::Num(-n),
                        Expr::Neg(e) => (**e).clone(),
                        e => Expr::Neg(Box::new(e.clone())),
                    },
                })
                .collect(),
        }
    }

    /// Wraps the word as a single parenthesised factor.
    pub fn grouped(&self) -> Word {
        Word {
            factors: vec![Factor {
                atom: Atom::Group(self.clone()),
                exponent: Expr::Num(1),
            }],
        }
    }

    /// Visits every index expression in the word, depth first, left to right.
    pub fn index_exprs_mut(&mut self) -> Vec<&mut Expr> {
        let mut out = Vec::new();
        for f in &mut self.factors {
            match &mut f.atom {
                Atom::Symbol(s) => out.extend(s.indices.iter_mut()),
                Atom::Group(w) => out.extend(w.index_exprs_mut()),
            }
        }
        out
    }
}

fn parse_word(c: &mut Cursor<'_>) -> Result<Word> {
    let mut factors = Vec::new();
    loop {
        c.skip_ws();
        match c.peek() {
            None | Some(b')') => break,
            Some(b'(') => {
                c.pos += 1;
                let inner = parse_word(c)?;
                c.expect(b')')?;
                factors.push(Factor {
                    atom: Atom::Group(inner),
                    exponent: parse_exponent(c)?,
                });
            }
            Some(ch) if ch.is_ascii_alphabetic() => {
                let name = c.ident().expect("alphabetic").to_string();
                let indices = parse_subscript(c)?;
                factors.push(Factor {
                    atom: Atom::Symbol(Symbol { name, indices }),
                    exponent: parse_exponent(c)?,
                });
            }
            Some(_) => return Err(c.error("expected a generator, named word or '('")),
        }
    }
    Ok(Word { factors })
}

fn parse_subscript(c: &mut Cursor<'_>) -> Result<Vec<Expr>> {
    if c.peek() != Some(b'_') {
        return Ok(Vec::new());
    }
    c.pos += 1;
    if c.peek() == Some(b'{') {
        c.pos += 1;
        let mut out = vec![c.expr()?];
        while c.eat(b',') {
            out.push(c.expr()?);
        }
        c.expect(b'}')?;
        return Ok(out);
    }
    if let Some(n) = c.number() {
        return Ok(vec![Expr::Num(n)]);
    }
    match c.peek() {
        Some(ch) if ch.is_ascii_alphabetic() => {
            c.pos += 1;
            Ok(vec![Expr::Var((ch as char).to_string())])
        }
        _ => Err(c.error("expected a subscript")),
    }
}

fn parse_exponent(c: &mut Cursor<'_>) -> Result<Expr> {
    if c.peek() != Some(b'^') {
        return Ok(Expr::Num(1));
    }
    c.pos += 1;
    if c.peek() == Some(b'{') {
        c.pos += 1;
        let e = c.expr()?;
        c.expect(b'}')?;
        return Ok(e);
    }
    let neg = c.peek() == Some(b'-');
    if neg {
        c.pos += 1;
    }
    let n = c.number().ok_or_else(|| c.error("expected an exponent"))?;
    Ok(Expr::Num(if neg { -n } else { n }))
}

fn fmt_indices(f: &mut fmt::Formatter<'_>, idx: &[Expr]) -> fmt::Result {
    match idx {
        [] => Ok(()),
        [e] if e.is_simple() => write!(f, "_{e}"),
        many => {
            let parts: Vec<String> = many.iter().map(|e| e.to_string()).collect();
            write!(f, "_{{{}}}", parts.join(","))
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, factor) in self.factors.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            match &factor.atom {
                Atom::Symbol(s) => {
                    write!(f, "{}", s.name)?;
                    fmt_indices(f, &s.indices)?;
                }
                Atom::Group(w) => write!(f, "({w})")?,
            }
            match &factor.exponent {
                Expr::Num(1) => {}
                Expr::Num(n) if *n >= 0 && *n < 10 => write!(f, "^{n}")?,
                e => write!(f, "^{{{e}}}")?,
            }
        }
        Ok(())
    }
}

const D2_WORD: &str = "(A_1 B_2^{-1})(A_1 C_1^{-1})(A_1 C_2^{-1})(A_1 B_2^{-1})";
const D1_WORD: &str = "(C_2 B_1^{-1})(C_2 A_1^{-1})(C_2 C_1^{-1})(C_2 B_1^{-1})";

/// Evaluates words at a fixed genus, holding the named-word environment.
#[derive(Clone, Debug)]
pub struct Evaluator {
    cfg: GenusConfig,
    named: HashMap<String, (Word, GF2Matrix)>,
    derived: Option<(HomologyClass, HomologyClass)>,
}

impl Evaluator {
    pub fn new(cfg: GenusConfig) -> Self {
        Self {
            cfg,
            named: HashMap::new(),
            derived: None,
        }
    }

    pub fn config(&self) -> &GenusConfig {
        &self.cfg
    }

    pub fn bindings(&self) -> Bindings {
        Bindings::for_genus(&self.cfg)
    }

    /// Binds a name such as `F_2` to a word (evaluated now).
    pub fn bind(&mut self, name: &str, word: &Word, b: &Bindings) -> Result<GF2Matrix> {
        let m = self.eval(word, b)?;
        self.named.insert(name.to_string(), (word.clone(), m.clone()));
        Ok(m)
    }

    pub fn named_word(&self, name: &str) -> Option<&Word> {
        self.named.get(name).map(|(w, _)| w)
    }

    pub fn named_matrix(&self, name: &str) -> Option<&GF2Matrix> {
        self.named.get(name).map(|(_, m)| m)
    }

    /// Classes of `d_1` and `d_2`, computed once per genus.
    ///
    /// `d_2` is the image of `a_2` under
    /// `(A_1 B_2^-1)(A_1 C_1^-1)(A_1 C_2^-1)(A_1 B_2^-1)` and `d_1` the image of
    /// `d_2` under `(C_2 B_1^-1)(C_2 A_1^-1)(C_2 C_1^-1)(C_2 B_1^-1)`.
    pub fn derived_classes(&mut self) -> Result<(HomologyClass, HomologyClass)> {
        if let Some(d) = &self.derived {
            return Ok(d.clone());
        }
        if self.cfg.genus() < 7 {
            return Err(Error::UndefinedCurve {
                name: "d_1".into(),
                genus: self.cfg.genus(),
            });
        }
        let b = self.bindings();
        let a2 = surface::curve_class(CurveName::new(CurveFamily::A, 2), &self.cfg)?;
        let w2 = self.eval(&Word::parse(D2_WORD)?, &b)?;
        let d2 = HomologyClass::from_vector(w2.apply(a2.vector())?);
        let w1 = self.eval(&Word::parse(D1_WORD)?, &b)?;
        let d1 = HomologyClass::from_vector(w1.apply(d2.vector())?);
        self.derived = Some((d1.clone(), d2.clone()));
        Ok((d1, d2))
    }

    /// Class of any curve, including the derived `d_1, d_2`.
    pub fn curve_class(&mut self, name: CurveName) -> Result<HomologyClass> {
        match (name.family, name.index) {
            (CurveFamily::D, 1) => Ok(self.derived_classes()?.0),
            (CurveFamily::D, 2) => Ok(self.derived_classes()?.1),
            _ => surface::curve_class(name, &self.cfg),
        }
    }

    /// Class compared by curve-mapping checks (see [`surface::support_class`]).
    pub fn support_class(&mut self, name: CurveName) -> Result<HomologyClass> {
        match name.family {
            CurveFamily::D => self.curve_class(name),
            _ => surface::support_class(name, &self.cfg),
        }
    }

    pub fn generator(&mut self, name: GeneratorName) -> Result<GF2Matrix> {
        match name {
            GeneratorName::Twist(c) if c.family == CurveFamily::D => {
                let class = self.curve_class(c)?;
                crate::gf2::transvection(class.vector(), &self.cfg.gram())
            }
            _ => surface::generator_matrix(name, &self.cfg),
        }
    }

    pub fn eval_atom(&mut self, atom: &Atom, b: &Bindings) -> Result<GF2Matrix> {
        match atom {
            Atom::Group(w) => self.eval(w, b),
            Atom::Symbol(s) => match s.resolve(b)? {
                Resolved::Generator(g) => self.generator(g),
                Resolved::Named(key) => self
                    .named
                    .get(&key)
                    .map(|(_, m)| m.clone())
                    .ok_or(Error::UnknownWord(key)),
            },
        }
    }

    pub fn eval_factor(&mut self, factor: &Factor, b: &Bindings) -> Result<GF2Matrix> {
        let m = self.eval_atom(&factor.atom, b)?;
        m.pow(factor.exponent.eval(b)?)
    }

    /// Ordered product of the factor images; the rightmost factor acts first.
    pub fn eval(&mut self, word: &Word, b: &Bindings) -> Result<GF2Matrix> {
        let mut acc = GF2Matrix::identity(self.cfg.genus());
        for f in &word.factors {
            acc = acc.mul(&self.eval_factor(f, b)?)?;
        }
        Ok(acc)
    }
}

/// Evaluates a closed word (no loop variables, no named words) at a genus.
pub fn evaluate(word: &Word, cfg: &GenusConfig) -> Result<IsometryMatrix> {
    let mut ev = Evaluator::new(*cfg);
    let m = ev.eval(word, &ev.bindings())?;
    IsometryMatrix::new(m, word.to_string())
}
