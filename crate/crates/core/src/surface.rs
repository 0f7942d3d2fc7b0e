//! Mod-2 homology model of the sphere with `g` crosscaps arranged in a circle.
//!
//! `H_1(N_g; Z_2)` has the basis `mu_1 .. mu_g` of crosscap cores. Each core is
//! one-sided and distinct cores are disjoint, so the intersection pairing has
//! the identity Gram matrix. Two-sided curves are sums of consecutive cores:
//!
//! | curve      | class                         |
//! |------------|-------------------------------|
//! | `a_1`      | `{1,2}`                       |
//! | `a_2`      | `{1,2,3,4}`                   |
//! | `a_3`      | `{1,..,6}`                    |
//! | `b_i`      | `{2i, 2i+1}`                  |
//! | `c_i`      | `{2i+1, 2i+2}`                |
//! | `gamma_i`  | `{i, i+1, i+2, i+3}` mod `g`  |
//! | `alpha_i`, `beta_i` | zero (they bound one-holed Klein bottles) |
//!
//! Dehn twists act as transvections and crosscap transpositions as basis swaps.
//! Indices are 1-based throughout the public API.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{self, GF2Matrix, GF2Vector};

pub const MIN_GENUS: usize = 5;

/// Genus together with the parity-derived parameters `r` and `h`.
///
/// `g = 2r + 2` for even `g` and `g = 2r + 1` for odd `g`; `h = (g - 1) / 2`
/// rounded down, so the symplectic quotient has dimension `2h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GenusConfig {
    g: usize,
}

impl GenusConfig {
    pub fn new(g: usize) -> Result<Self> {
        if g < MIN_GENUS {
            return Err(Error::GenusTooSmall(g));
        }
        Ok(Self { g })
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn is_even(&self) -> bool {
        self.g % 2 == 0
    }

    pub fn r(&self) -> usize {
        if self.is_even() {
            (self.g - 2) / 2
        } else {
            (self.g - 1) / 2
        }
    }

    pub fn h(&self) -> usize {
        (self.g - 1) / 2
    }

    /// Number of `c_i` curves: `r` for even genus, `r - 1` for odd genus.
    pub fn num_c(&self) -> usize {
        if self.is_even() {
            self.r()
        } else {
            self.r() - 1
        }
    }

    /// Dimension of the symplectic quotient, `2h`.
    pub fn quotient_dim(&self) -> usize {
        2 * self.h()
    }

    /// Reduces a 1-based, possibly out-of-range crosscap index into `1..=g`.
    pub fn wrap(&self, i: i64) -> usize {
        (i - 1).rem_euclid(self.g as i64) as usize + 1
    }

    /// The identity Gram matrix of the crosscap basis.
    pub fn gram(&self) -> GF2Matrix {
        GF2Matrix::identity(self.g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveFamily {
    A,
    B,
    C,
    Gamma,
    Alpha,
    Beta,
    D,
}

impl CurveFamily {
    pub fn symbol(&self) -> &'static str {
        match self {
            CurveFamily::A => "a",
            CurveFamily::B => "b",
            CurveFamily::C => "c",
            CurveFamily::Gamma => "gamma",
            CurveFamily::Alpha => "alpha",
            CurveFamily::Beta => "beta",
            CurveFamily::D => "d",
        }
    }

    /// Name of the Dehn twist about a curve of this family.
    pub fn twist_symbol(&self) -> &'static str {
        match self {
            CurveFamily::A => "A",
            CurveFamily::B => "B",
            CurveFamily::C => "C",
            CurveFamily::Gamma => "Gamma",
            CurveFamily::Alpha => "Alpha",
            CurveFamily::Beta => "Beta",
            CurveFamily::D => "D",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "a" => CurveFamily::A,
            "b" => CurveFamily::B,
            "c" => CurveFamily::C,
            "gamma" => CurveFamily::Gamma,
            "alpha" => CurveFamily::Alpha,
            "beta" => CurveFamily::Beta,
            "d" => CurveFamily::D,
            _ => return None,
        })
    }

    pub fn from_twist_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "A" => CurveFamily::A,
            "B" => CurveFamily::B,
            "C" => CurveFamily::C,
            "Gamma" => CurveFamily::Gamma,
            "Alpha" => CurveFamily::Alpha,
            "Beta" => CurveFamily::Beta,
            "D" => CurveFamily::D,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveName {
    pub family: CurveFamily,
    pub index: i64,
}

impl CurveName {
    pub fn new(family: CurveFamily, index: i64) -> Self {
        Self { family, index }
    }
}

impl fmt::Display for CurveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.family.symbol(), self.index)
    }
}

/// A mod-2 homology class over the crosscap basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HomologyClass(GF2Vector);

impl HomologyClass {
    pub fn zero(cfg: &GenusConfig) -> Self {
        Self(GF2Vector::zeros(cfg.genus()))
    }

    /// Class `mu_i`, 1-based.
    pub fn mu(cfg: &GenusConfig, i: usize) -> Self {
        Self(GF2Vector::unit(cfg.genus(), cfg.wrap(i as i64) - 1))
    }

    /// Sum of `mu_i` over 1-based indices (wrapped mod `g`).
    pub fn from_crosscaps<I: IntoIterator<Item = i64>>(cfg: &GenusConfig, idx: I) -> Self {
        Self(GF2Vector::from_support(
            cfg.genus(),
            idx.into_iter().map(|i| cfg.wrap(i) - 1),
        ))
    }

    pub fn from_vector(v: GF2Vector) -> Self {
        Self(v)
    }

    pub fn vector(&self) -> &GF2Vector {
        &self.0
    }

    pub fn into_vector(self) -> GF2Vector {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn weight(&self) -> usize {
        self.0.weight()
    }

    /// 1-based crosscap indices in the support.
    pub fn crosscaps(&self) -> Vec<usize> {
        self.0.support().into_iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.crosscaps().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The mod-2 intersection pairing `x^T y` (identity Gram matrix).
pub fn pairing(x: &HomologyClass, y: &HomologyClass) -> Result<bool> {
    x.0.dot(&y.0)
}

/// Homology class of a named curve.
///
/// `d_1` and `d_2` are only defined through the words that produce them; ask
/// `replay::derived_class` for those.
pub fn curve_class(name: CurveName, cfg: &GenusConfig) -> Result<HomologyClass> {
    let undefined = || Error::UndefinedCurve {
        name: name.to_string(),
        genus: cfg.genus(),
    };
    let i = name.index;
    let run = |start: i64, len: i64| HomologyClass::from_crosscaps(cfg, start..start + len);
    match name.family {
        CurveFamily::A => match i {
            1..=3 if (2 * i) as usize <= cfg.genus() => Ok(run(1, 2 * i)),
            _ => Err(undefined()),
        },
        CurveFamily::B if (1..=cfg.r() as i64).contains(&i) => Ok(run(2 * i, 2)),
        CurveFamily::C if (1..=cfg.num_c() as i64).contains(&i) => Ok(run(2 * i + 1, 2)),
        CurveFamily::Gamma => Ok(run(i, 4)),
        CurveFamily::Alpha | CurveFamily::Beta => Ok(HomologyClass::zero(cfg)),
        _ => Err(undefined()),
    }
}

/// Class used when comparing where a map sends a curve.
///
/// For `alpha_i` and `beta_i` this is the sum of the two crosscaps inside the
/// Klein bottle they bound (`{i, i+1}` and `{i, i+2}`), which is exactly what
/// the supported transposition depends on mod 2. Every other curve uses its
/// homology class.
pub fn support_class(name: CurveName, cfg: &GenusConfig) -> Result<HomologyClass> {
    match name.family {
        CurveFamily::Alpha => Ok(HomologyClass::from_crosscaps(cfg, [name.index, name.index + 1])),
        CurveFamily::Beta => Ok(HomologyClass::from_crosscaps(cfg, [name.index, name.index + 2])),
        _ => curve_class(name, cfg),
    }
}

/// Generators whose images are computed directly from the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorName {
    /// Rotation by `2 pi / g`, `mu_i -> mu_{i+1}`.
    T,
    /// Reflection `i -> 4 - i (mod g)`.
    Rho1,
    /// Reflection `i -> 5 - i (mod g)`.
    Rho2,
    /// Crosscap transposition of crosscaps `i, i+1`.
    U(i64),
    /// Crosscap transposition of crosscaps `i, i+2`.
    V(i64),
    /// Crosscap slide `y_i = A u_i` on crosscaps `i, i+1`.
    Y(i64),
    /// Transposition of an arbitrary pair of crosscaps.
    Phi(i64, i64),
    /// Right-handed Dehn twist about a two-sided curve.
    Twist(CurveName),
}

impl fmt::Display for GeneratorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorName::T => write!(f, "T"),
            GeneratorName::Rho1 => write!(f, "rho_1"),
            GeneratorName::Rho2 => write!(f, "rho_2"),
            GeneratorName::U(i) => write!(f, "u_{i}"),
            GeneratorName::V(i) => write!(f, "v_{i}"),
            GeneratorName::Y(i) => write!(f, "y_{i}"),
            GeneratorName::Phi(i, j) => write!(f, "phi_{{{i},{j}}}"),
            GeneratorName::Twist(c) => write!(f, "{}_{}", c.family.twist_symbol(), c.index),
        }
    }
}

/// An isometry of the pairing together with a note of where it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsometryMatrix {
    matrix: GF2Matrix,
    provenance: String,
}

impl IsometryMatrix {
    /// Wraps a matrix after checking that it preserves the identity Gram matrix.
    pub fn new(matrix: GF2Matrix, provenance: impl Into<String>) -> Result<Self> {
        if !matrix.is_square() || !matrix.preserves_form(&GF2Matrix::identity(matrix.rows()))? {
            return Err(Error::NotAnIsometry);
        }
        Ok(Self {
            matrix,
            provenance: provenance.into(),
        })
    }

    pub fn matrix(&self) -> &GF2Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> GF2Matrix {
        self.matrix
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn apply(&self, x: &HomologyClass) -> Result<HomologyClass> {
        Ok(HomologyClass(self.matrix.apply(x.vector())?))
    }
}

fn crosscap_permutation(cfg: &GenusConfig, f: impl Fn(i64) -> i64) -> GF2Matrix {
    let perm: Vec<usize> = (1..=cfg.genus() as i64).map(|i| cfg.wrap(f(i)) - 1).collect();
    GF2Matrix::permutation(&perm).expect("crosscap map is a bijection")
}

fn check_index(name: GeneratorName, cfg: &GenusConfig, i: i64, max: usize) -> Result<usize> {
    if i >= 1 && i <= max as i64 {
        Ok(i as usize)
    } else {
        Err(Error::UndefinedGenerator {
            name: name.to_string(),
            genus: cfg.genus(),
        })
    }
}

/// Matrix image of a generator. Twists about `d_1, d_2` are not handled here.
pub fn generator_matrix(name: GeneratorName, cfg: &GenusConfig) -> Result<GF2Matrix> {
    let g = cfg.genus();
    match name {
        GeneratorName::T => Ok(crosscap_permutation(cfg, |i| i + 1)),
        GeneratorName::Rho1 => Ok(crosscap_permutation(cfg, |i| 4 - i)),
        GeneratorName::Rho2 => Ok(crosscap_permutation(cfg, |i| 5 - i)),
        GeneratorName::U(i) => {
            let i = check_index(name, cfg, i, g - 1)?;
            Ok(GF2Matrix::swap(g, i - 1, i))
        }
        GeneratorName::V(i) => {
            let i = check_index(name, cfg, i, g - 2)?;
            Ok(GF2Matrix::swap(g, i - 1, i + 1))
        }
        GeneratorName::Y(i) => {
            let i = check_index(name, cfg, i, g - 1)?;
            let a = HomologyClass::from_crosscaps(cfg, [i as i64, i as i64 + 1]);
            gf2::transvection(a.vector(), &cfg.gram())?.mul(&GF2Matrix::swap(g, i - 1, i))
        }
        GeneratorName::Phi(i, j) => {
            let i = check_index(name, cfg, i, g)?;
            let j = check_index(name, cfg, j, g)?;
            if i == j {
                return Err(Error::UndefinedGenerator {
                    name: name.to_string(),
                    genus: g,
                });
            }
            Ok(GF2Matrix::swap(g, i - 1, j - 1))
        }
        GeneratorName::Twist(c) => {
            let class = curve_class(c, cfg)?;
            gf2::transvection(class.vector(), &cfg.gram())
        }
    }
}

pub fn generator_image(name: GeneratorName, cfg: &GenusConfig) -> Result<IsometryMatrix> {
    IsometryMatrix::new(generator_matrix(name, cfg)?, name.to_string())
}

/// The all-ones class `w`, characterised by `<w, x> = <x, x>` for every `x`.
pub fn canonical_class_w(cfg: &GenusConfig) -> HomologyClass {
    HomologyClass::from_crosscaps(cfg, 1..=cfg.genus() as i64)
}

/// Coordinates of an even-weight vector in the basis `f_k = mu_k + mu_{k+1}`,
/// `k = 1..g-1`: prefix parities of the vector.
fn even_coordinates(x: &GF2Vector) -> Vec<bool> {
    let mut acc = false;
    (0..x.dim() - 1)
        .map(|k| {
            acc ^= x.get(k);
            acc
        })
        .collect()
}

/// Action of an isometry on the symplectic quotient of dimension `2h`.
///
/// For odd `g` this is the restriction to `w^perp` (the even-weight vectors);
/// for even `g` it is the induced action on `w^perp / <w>`. The basis is
/// `f_k = mu_k + mu_{k+1}` for `k = 1..2h`, in which the induced form is
/// [`quotient_form`].
pub fn quotient_action(cfg: &GenusConfig, m: &GF2Matrix) -> Result<GF2Matrix> {
    let g = cfg.genus();
    if m.rows() != g || !m.preserves_form(&cfg.gram())? {
        return Err(Error::NotAnIsometry);
    }
    let n = cfg.quotient_dim();
    let w_coords: Vec<bool> = (0..g - 1).map(|k| k % 2 == 0).collect();
    let mut q = GF2Matrix::zeros(n, n);
    for col in 0..n {
        let f = GF2Vector::from_support(g, [col, col + 1]);
        let mut coords = even_coordinates(&m.apply(&f)?);
        if cfg.is_even() && coords[g - 2] {
            for (c, w) in coords.iter_mut().zip(&w_coords) {
                *c ^= w;
            }
        }
        for (row, &bit) in coords.iter().take(n).enumerate() {
            q.set(row, col, bit);
        }
    }
    Ok(q)
}

/// Alternating form induced on the quotient basis `f_1 .. f_2h`.
pub fn quotient_form(cfg: &GenusConfig) -> GF2Matrix {
    let n = cfg.quotient_dim();
    let mut j = GF2Matrix::zeros(n, n);
    for k in 0..n - 1 {
        j.set(k, k + 1, true);
        j.set(k + 1, k, true);
    }
    j
}

/// Every curve that has a directly computable class at this genus.
pub fn named_curves(cfg: &GenusConfig) -> Vec<CurveName> {
    let mut out = Vec::new();
    for i in 1..=3 {
        if 2 * i <= cfg.genus() as i64 {
            out.push(CurveName::new(CurveFamily::A, i));
        }
    }
    out.extend((1..=cfg.r() as i64).map(|i| CurveName::new(CurveFamily::B, i)));
    out.extend((1..=cfg.num_c() as i64).map(|i| CurveName::new(CurveFamily::C, i)));
    out.extend((1..=cfg.genus() as i64).map(|i| CurveName::new(CurveFamily::Gamma, i)));
    out
}

fn describe_permutation(m: &GF2Matrix) -> String {
    let n = m.cols();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start + 1];
        seen[start] = true;
        let mut j = start;
        loop {
            let next = (0..n).find(|&i| m.get(i, j)).expect("permutation column");
            if next == start {
                break;
            }
            seen[next] = true;
            cycle.push(next + 1);
            j = next;
        }
        if cycle.len() > 1 {
            let s: Vec<String> = cycle.iter().map(|c| c.to_string()).collect();
            cycles.push(format!("({})", s.join(" ")));
        }
    }
    if cycles.is_empty() {
        "identity".to_string()
    } else {
        cycles.join("")
    }
}

/// Text dump of the curve table and the generator support table.
pub fn dump_model(cfg: &GenusConfig) -> Result<String> {
    use fmt::Write;
    let mut out = String::new();
    let g = cfg.genus();
    let _ = writeln!(out, "# genus {} (r = {}, h = {})", g, cfg.r(), cfg.h());
    let _ = writeln!(out, "# curves");
    for c in named_curves(cfg) {
        let _ = writeln!(out, "{} = {}", c, curve_class(c, cfg)?);
    }
    for i in 1..=g as i64 {
        let _ = writeln!(
            out,
            "alpha_{i} = {{}} (bounds crosscaps {})",
            support_class(CurveName::new(CurveFamily::Alpha, i), cfg)?
        );
    }
    for i in 1..=g as i64 {
        let _ = writeln!(
            out,
            "beta_{i} = {{}} (bounds crosscaps {})",
            support_class(CurveName::new(CurveFamily::Beta, i), cfg)?
        );
    }
    let _ = writeln!(out, "# generators");
    let mut gens = vec![GeneratorName::T, GeneratorName::Rho1, GeneratorName::Rho2];
    gens.extend((1..g as i64).map(GeneratorName::U));
    gens.extend((1..g as i64 - 1).map(GeneratorName::V));
    gens.extend((1..g as i64).map(GeneratorName::Y));
    for name in gens {
        let m = generator_matrix(name, cfg)?;
        let _ = writeln!(out, "{name}: permutation {}", describe_permutation(&m));
    }
    for c in named_curves(cfg) {
        let name = GeneratorName::Twist(c);
        let _ = writeln!(out, "{name}: transvection {}", curve_class(c, cfg)?);
    }
    Ok(out)
}
