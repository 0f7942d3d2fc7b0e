//! Named generating sets, as words evaluated at a genus.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::GF2Matrix;
use crate::surface::GenusConfig;
use crate::word::{Evaluator, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetName {
    /// `T, A_1A_2^{-1}, B_1B_2^{-1}, u_1`.
    Thm21,
    /// `A_1, A_2, B_i, C_i, y_1`.
    Szepietowski,
    /// `T, u_{g-1}Gamma_10C_2^{-1}`.
    ThmA,
    /// `rho_1, rho_2` and the third involution for the parity of `g`.
    ThmB,
}

impl SetName {
    pub fn as_str(&self) -> &'static str {
        match self {
            SetName::Thm21 => "thm21",
            SetName::Szepietowski => "szepietowski",
            SetName::ThmA => "thmA",
            SetName::ThmB => "thmB",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "thm21" => Some(SetName::Thm21),
            "szepietowski" => Some(SetName::Szepietowski),
            "thmA" => Some(SetName::ThmA),
            "thmB" => Some(SetName::ThmB),
            _ => None,
        }
    }

    /// Smallest genus at which every word of the set is defined.
    pub fn min_genus(&self) -> usize {
        match self {
            SetName::Thm21 | SetName::Szepietowski => 5,
            SetName::ThmA => 10,
            SetName::ThmB => 7,
        }
    }

    pub fn words(&self, cfg: &GenusConfig) -> Vec<String> {
        let mut w: Vec<String> = match self {
            SetName::Thm21 => vec!["T", "A_1A_2^{-1}", "B_1B_2^{-1}", "u_1"],
            SetName::Szepietowski => vec!["A_1", "A_2"],
            SetName::ThmA => vec!["T", "u_{g-1}Gamma_10C_2^{-1}"],
            SetName::ThmB if cfg.is_even() => vec!["rho_1", "rho_2", "rho_2A_2B_rB_3u_{r+3}"],
            SetName::ThmB => vec!["rho_1", "rho_2", "rho_2A_2C_{r-1}B_3v_{r+2}"],
        }
        .into_iter()
        .map(String::from)
        .collect();
        if *self == SetName::Szepietowski {
            w.extend((1..=cfg.r()).map(|i| format!("B_{{{i}}}")));
            w.extend((1..=cfg.num_c()).map(|i| format!("C_{{{i}}}")));
            w.push("y_1".into());
        }
        w
    }
}

impl fmt::Display for SetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A list of words and their images at one genus.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub label: String,
    pub words: Vec<String>,
    pub matrices: Vec<GF2Matrix>,
}

fn evaluate_all(label: String, words: Vec<String>, cfg: &GenusConfig) -> Result<GeneratorSet> {
    let mut ev = Evaluator::new(*cfg);
    let b = ev.bindings();
    let matrices = words
        .iter()
        .map(|w| ev.eval(&Word::parse(w)?, &b))
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratorSet { label, words, matrices })
}

pub fn named_set(name: SetName, cfg: &GenusConfig) -> Result<GeneratorSet> {
    if cfg.genus() < name.min_genus() {
        return Err(Error::UnsupportedGenus {
            script: format!("set {name}"),
            genus: cfg.genus(),
            constraint: format!("g >= {}", name.min_genus()),
        });
    }
    evaluate_all(name.as_str().into(), name.words(cfg), cfg)
}

/// One word per line; blank lines and `#` comments are skipped. An empty
/// list stands for the trivial group.
pub fn parse_word_list(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect()
}

pub fn custom_set(path: &Path, cfg: &GenusConfig) -> Result<GeneratorSet> {
    let text = std::fs::read_to_string(path)?;
    let mut set = evaluate_all("custom".into(), parse_word_list(&text), cfg)?;
    if set.matrices.is_empty() {
        set.matrices.push(GF2Matrix::identity(cfg.genus()));
    }
    Ok(set)
}
