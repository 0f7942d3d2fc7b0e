use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("cannot build a transvection from the zero class")]
    DegenerateClass,
    #[error("not a permutation")]
    InvalidPermutation,
    #[error("matrix has no rows")]
    EmptyMatrix,
    #[error("genus {0} is below the supported minimum of 5")]
    GenusTooSmall(usize),
    #[error("curve {name} is not defined at genus {genus}")]
    UndefinedCurve { name: String, genus: usize },
    #[error("generator {name} is not defined at genus {genus}")]
    UndefinedGenerator { name: String, genus: usize },
    #[error("matrix does not preserve the intersection pairing")]
    NotAnIsometry,
    #[error("parse error in {input:?} at byte {pos}: {msg}")]
    Parse { input: String, pos: usize, msg: String },
    #[error("unknown named word {0}")]
    UnknownWord(String),
    #[error("unbound variable {0} in index expression")]
    UnboundVariable(String),
    #[error("{script} requires {constraint}; got genus {genus}")]
    UnsupportedGenus {
        script: String,
        genus: usize,
        constraint: String,
    },
    #[error("malformed proof script: {0}")]
    Script(String),
    #[error("brute-force closure exceeded its cap of {cap} elements")]
    OracleOverflow { cap: usize },
    #[error("orbit tables for degree {degree} need about {bytes} bytes; refusing without an override")]
    MemoryGuard { degree: u64, bytes: u64 },
    #[error("deterministic verification refused at degree {degree} (limit 2^20)")]
    VerificationTooLarge { degree: u64 },
    #[error("bsgs cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Self {
        Error::Shape { op, left, right }
    }
}
