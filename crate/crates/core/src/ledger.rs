//! Subgroup-membership bookkeeping for proof replay.
//!
//! The ledger records every matrix that a proof has shown to lie in the
//! subgroup under construction, together with the ids of the steps that
//! established it. Membership of `m` also covers `m^-1`. Pairs of curves
//! `(a, b)` with `A B^-1` in the ledger form the equivalence relation the
//! proofs reason with; symmetry and transitivity show up as inverse and
//! product witnesses, invariance as conjugation witnesses.

use std::collections::HashMap;

use sha2::{Digest, Sha256};

use crate::gf2::GF2Matrix;

pub const IDENTITY_ORIGIN: &str = "identity";

/// Short stable digest of a matrix, used in reports and verdicts.
pub fn matrix_digest(m: &GF2Matrix) -> String {
    let mut h = Sha256::new();
    h.update((m.rows() as u64).to_le_bytes());
    h.update((m.cols() as u64).to_le_bytes());
    for i in 0..m.rows() {
        for w in m.row_words(i) {
            h.update(w.to_le_bytes());
        }
    }
    let out = h.finalize();
    out.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug)]
pub struct MembershipLedger {
    entries: HashMap<GF2Matrix, Vec<String>>,
}

impl MembershipLedger {
    /// A ledger containing only the identity of dimension `n`.
    pub fn new(n: usize) -> Self {
        let mut entries = HashMap::new();
        entries.insert(GF2Matrix::identity(n), vec![IDENTITY_ORIGIN.to_string()]);
        Self { entries }
    }

    /// Records `m` as established by `origin`. Returns false if `m` (or its
    /// inverse) was already known; the origin is appended either way.
    pub fn establish(&mut self, m: &GF2Matrix, origin: &str) -> bool {
        let key = if self.entries.contains_key(m) {
            m.clone()
        } else {
            match m.inverse() {
                Ok(inv) if self.entries.contains_key(&inv) => inv,
                _ => {
                    self.entries.insert(m.clone(), vec![origin.to_string()]);
                    return true;
                }
            }
        };
        let origins = self.entries.get_mut(&key).expect("present");
        if !origins.iter().any(|o| o == origin) {
            origins.push(origin.to_string());
        }
        false
    }

    /// Step ids that established `m` or `m^-1`.
    pub fn origins(&self, m: &GF2Matrix) -> Option<&[String]> {
        if let Some(o) = self.entries.get(m) {
            return Some(o);
        }
        let inv = m.inverse().ok()?;
        self.entries.get(&inv).map(|o| o.as_slice())
    }

    pub fn contains(&self, m: &GF2Matrix) -> bool {
        self.origins(m).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_always_established() {
        let l = MembershipLedger::new(5);
        assert_eq!(l.origins(&GF2Matrix::identity(5)).unwrap(), [IDENTITY_ORIGIN]);
    }

    #[test]
    fn inverse_lookup_and_origin_accumulation() {
        let mut l = MembershipLedger::new(3);
        let m = GF2Matrix::permutation(&[1, 2, 0]).unwrap();
        assert!(l.establish(&m, "s1"));
        let inv = m.inverse().unwrap();
        assert_eq!(l.origins(&inv).unwrap(), ["s1"]);
        assert!(!l.establish(&inv, "s2"));
        assert_eq!(l.origins(&m).unwrap(), ["s1", "s2"]);
        assert_eq!(l.len(), 2);
    }

    #[test]
    fn digests_are_stable_and_distinguish() {
        let a = GF2Matrix::identity(4);
        let b = GF2Matrix::swap(4, 0, 1);
        assert_eq!(matrix_digest(&a), matrix_digest(&a.clone()));
        assert_ne!(matrix_digest(&a), matrix_digest(&b));
        assert_eq!(matrix_digest(&a).len(), 16);
    }
}
