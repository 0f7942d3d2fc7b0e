//! Mod-2 homology model of crosscap surfaces, proof-ledger replay, and
//! order certification for the matrix groups generated by mapping classes.

pub mod error;
pub mod expr;
pub mod gensets;
pub mod gf2;
pub mod groupcert;
pub mod ledger;
pub mod replay;
pub mod script;
pub mod surface;
pub mod word;

pub use error::{Error, Result};
pub use gensets::{named_set, GeneratorSet, SetName};
pub use gf2::{GF2Matrix, GF2Vector};
pub use groupcert::{expected_order, group_order, Certificate, Mode, OrderOptions, OrderResult};
pub use ledger::MembershipLedger;
pub use replay::{replay_proof, ProofReport, Verdict};
pub use script::{ProofScript, ScriptId};
pub use surface::{CurveFamily, CurveName, GeneratorName, GenusConfig, HomologyClass, IsometryMatrix};
pub use word::{Evaluator, Word};
