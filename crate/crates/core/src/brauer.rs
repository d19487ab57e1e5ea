//! Brauer-class arithmetic for a quaternion algebra D over a totally real
//! field F, entirely through local invariants in ½ℤ/ℤ.
//!
//! The standing assumption throughout the crate is that D splits at exactly
//! one real place σ_nc of F. The real invariants are therefore implied by
//! σ_nc (0 there, ½ everywhere else) and never stored, which makes
//! inconsistent real data unrepresentable. Finite places are opaque labels,
//! one block of invariants per rational prime; the only thing the
//! classification ever needs from them is the corestriction to ℚ.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::fieldmodel::TotallyRealModel;
use crate::permgroup::Subset;

/// A local Brauer invariant in ½ℤ/ℤ: either 0 or ½.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LocalInvariant(bool);

impl LocalInvariant {
    pub const ZERO: LocalInvariant = LocalInvariant(false);
    pub const HALF: LocalInvariant = LocalInvariant(true);

    pub fn is_zero(&self) -> bool {
        !self.0
    }

    /// Addition in ℚ/ℤ restricted to {0, ½}.
    pub fn add(&self, other: LocalInvariant) -> LocalInvariant {
        LocalInvariant(self.0 ^ other.0)
    }

    /// Sum of `count` copies of ½.
    pub fn half_times(count: usize) -> LocalInvariant {
        LocalInvariant(count % 2 == 1)
    }
}

impl fmt::Debug for LocalInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.0 { "1/2" } else { "0" })
    }
}

impl fmt::Display for LocalInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.0 { "1/2" } else { "0" })
    }
}

/// The invariants of the primes of F above one rational prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteBlock {
    pub prime: String,
    pub invariants: Vec<LocalInvariant>,
}

/// A place of ℚ, for indexing corestriction invariants.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Place {
    Infinity,
    Finite(String),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "oo"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BrauerViolation {
    /// σ_nc is not an index into Emb(F).
    SigmaNcOutOfRange { sigma_nc: usize, degree: usize },
    /// The sum of all local invariants is ½, not 0.
    ReciprocityFails,
    /// Two finite blocks carry the same prime label.
    DuplicatePrime { prime: String },
}

impl fmt::Display for BrauerViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BrauerViolation::SigmaNcOutOfRange { sigma_nc, degree } => {
                write!(f, "sigma_nc = {sigma_nc} out of range for degree {degree}")
            }
            BrauerViolation::ReciprocityFails => {
                write!(f, "local invariants sum to 1/2, violating reciprocity")
            }
            BrauerViolation::DuplicatePrime { prime } => {
                write!(f, "duplicate finite prime label {prime}")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BrauerError {
    #[error("quaternion data is invalid: {0:?}")]
    InvalidData(Vec<BrauerViolation>),
    #[error("the subset of real places is empty")]
    EmptySubset,
    #[error("subset exceeds Emb(F) of size {degree}")]
    SubsetOutOfRange { degree: usize },
}

/// A quaternion algebra over F, split at exactly the real place σ_nc.
#[derive(Clone, Debug)]
pub struct QuaternionData {
    field: TotallyRealModel,
    sigma_nc: usize,
    finite_blocks: Vec<FiniteBlock>,
}

impl QuaternionData {
    pub fn new(
        field: TotallyRealModel,
        sigma_nc: usize,
        finite_blocks: Vec<FiniteBlock>,
    ) -> Self {
        QuaternionData {
            field,
            sigma_nc,
            finite_blocks,
        }
    }

    pub fn field(&self) -> &TotallyRealModel {
        &self.field
    }

    pub fn sigma_nc(&self) -> usize {
        self.sigma_nc
    }

    pub fn finite_blocks(&self) -> &[FiniteBlock] {
        &self.finite_blocks
    }

    /// m = [F:ℚ].
    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    /// Implied real invariant at one embedding: 0 at σ_nc, ½ elsewhere.
    pub fn real_invariant_at(&self, sigma: usize) -> LocalInvariant {
        if sigma == self.sigma_nc {
            LocalInvariant::ZERO
        } else {
            LocalInvariant::HALF
        }
    }

    /// Checks reciprocity and index ranges; the empty list means valid.
    pub fn validate(&self) -> Vec<BrauerViolation> {
        let mut violations = Vec::new();
        let m = self.degree();
        if self.sigma_nc >= m {
            violations.push(BrauerViolation::SigmaNcOutOfRange {
                sigma_nc: self.sigma_nc,
                degree: m,
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for block in &self.finite_blocks {
            if !seen.insert(&block.prime) {
                violations.push(BrauerViolation::DuplicatePrime {
                    prime: block.prime.clone(),
                });
            }
        }
        // Σ real = (m−1)·½; add every finite invariant.
        let mut total = LocalInvariant::half_times(m.saturating_sub(1));
        for block in &self.finite_blocks {
            for inv in &block.invariants {
                total = total.add(*inv);
            }
        }
        if !total.is_zero() {
            violations.push(BrauerViolation::ReciprocityFails);
        }
        violations
    }

    fn require_valid(&self) -> Result<(), BrauerError> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(BrauerError::InvalidData(violations))
        }
    }
}

/// Local invariants of Cores_{F/ℚ}(D): at each place of ℚ, the sum of the
/// invariants of D at the places of F above it. At ∞ this is (m−1)·½ mod 1.
pub fn cores_to_q_local_invariants(
    data: &QuaternionData,
) -> Result<BTreeMap<Place, LocalInvariant>, BrauerError> {
    data.require_valid()?;
    let mut map = BTreeMap::new();
    map.insert(
        Place::Infinity,
        LocalInvariant::half_times(data.degree().saturating_sub(1)),
    );
    for block in data.finite_blocks() {
        let mut sum = LocalInvariant::ZERO;
        for inv in &block.invariants {
            sum = sum.add(*inv);
        }
        map.insert(Place::Finite(block.prime.clone()), sum);
    }
    Ok(map)
}

/// True iff Cores_{F/ℚ}(D) has trivial Brauer class, i.e. every local
/// corestriction invariant vanishes.
pub fn cores_to_q_is_trivial(data: &QuaternionData) -> Result<bool, BrauerError> {
    Ok(cores_to_q_local_invariants(data)?
        .values()
        .all(|inv| inv.is_zero()))
}

/// Sum over σ ∈ J of the real invariants of D: (|J| − [σ_nc ∈ J])·½ mod 1.
///
/// This is the real corestriction invariant of the orbit summand indexed by
/// J, and it is deliberately *not* constant across a Galois orbit: that
/// failure is what forces the endomorphism algebra of a proper-orbit
/// representation to be a quaternion algebra.
pub fn real_invariant_along(data: &QuaternionData, j: Subset) -> Result<LocalInvariant, BrauerError> {
    data.require_valid()?;
    if j.is_empty() {
        return Err(BrauerError::EmptySubset);
    }
    if !j.is_subset_of(&Subset::full(data.degree())) {
        return Err(BrauerError::SubsetOutOfRange {
            degree: data.degree(),
        });
    }
    let ramified = j.card() - usize::from(j.contains(data.sigma_nc));
    Ok(LocalInvariant::half_times(ramified))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::{PermGroup, Permutation, DEFAULT_GROUP_LIMIT};

    fn real_field(m: usize) -> TotallyRealModel {
        let images: Vec<usize> = (0..m).map(|i| (i + 1) % m).collect();
        TotallyRealModel::new(
            PermGroup::generate(
                vec![Permutation::from_images(images).unwrap()],
                DEFAULT_GROUP_LIMIT,
            )
            .unwrap(),
        )
        .unwrap()
    }

    fn block(prime: &str, halves: usize) -> FiniteBlock {
        FiniteBlock {
            prime: prime.to_string(),
            invariants: vec![LocalInvariant::HALF; halves],
        }
    }

    #[test]
    fn validation() {
        // m = 3, no finite blocks: real sum = ½+½ ≡ 0.
        assert!(QuaternionData::new(real_field(3), 0, vec![]).validate().is_empty());
        // m = 2, no finite blocks: real sum = ½.
        assert_eq!(
            QuaternionData::new(real_field(2), 0, vec![]).validate(),
            vec![BrauerViolation::ReciprocityFails]
        );
        // m = 2 with one finite ½ restores reciprocity.
        assert!(QuaternionData::new(real_field(2), 0, vec![block("2", 1)])
            .validate()
            .is_empty());
        // σ_nc out of range.
        let bad = QuaternionData::new(real_field(3), 7, vec![]);
        assert!(bad
            .validate()
            .iter()
            .any(|v| matches!(v, BrauerViolation::SigmaNcOutOfRange { .. })));
    }

    #[test]
    fn corestriction_invariants() {
        let d = QuaternionData::new(real_field(3), 0, vec![]);
        let map = cores_to_q_local_invariants(&d).unwrap();
        assert_eq!(map[&Place::Infinity], LocalInvariant::ZERO);
        assert_eq!(map.len(), 1);
        assert!(cores_to_q_is_trivial(&d).unwrap());

        let d = QuaternionData::new(real_field(2), 0, vec![block("3", 1)]);
        let map = cores_to_q_local_invariants(&d).unwrap();
        assert_eq!(map[&Place::Infinity], LocalInvariant::HALF);
        assert_eq!(map[&Place::Finite("3".into())], LocalInvariant::HALF);
        assert!(!cores_to_q_is_trivial(&d).unwrap());

        let d = QuaternionData::new(real_field(3), 0, vec![block("2", 1), block("5", 1)]);
        let map = cores_to_q_local_invariants(&d).unwrap();
        assert_eq!(map[&Place::Infinity], LocalInvariant::ZERO);
        assert_eq!(map[&Place::Finite("2".into())], LocalInvariant::HALF);
        assert_eq!(map[&Place::Finite("5".into())], LocalInvariant::HALF);
        assert!(!cores_to_q_is_trivial(&d).unwrap());
    }

    #[test]
    fn corestriction_satisfies_reciprocity() {
        for d in [
            QuaternionData::new(real_field(3), 1, vec![]),
            QuaternionData::new(real_field(2), 0, vec![block("2", 1)]),
            QuaternionData::new(real_field(4), 2, vec![block("7", 1)]),
            QuaternionData::new(real_field(5), 3, vec![block("2", 2)]),
        ] {
            let map = cores_to_q_local_invariants(&d).unwrap();
            let total = map
                .values()
                .fold(LocalInvariant::ZERO, |acc, inv| acc.add(*inv));
            assert!(total.is_zero());
        }
    }

    #[test]
    fn real_invariants_along_subsets() {
        let d = QuaternionData::new(real_field(3), 0, vec![]);
        assert_eq!(
            real_invariant_along(&d, Subset::from_indices(&[0])).unwrap(),
            LocalInvariant::ZERO
        );
        assert_eq!(
            real_invariant_along(&d, Subset::from_indices(&[0, 1])).unwrap(),
            LocalInvariant::HALF
        );
        assert_eq!(
            real_invariant_along(&d, Subset::full(3)).unwrap(),
            LocalInvariant::ZERO
        );
        assert_eq!(
            real_invariant_along(&d, Subset::EMPTY),
            Err(BrauerError::EmptySubset)
        );
    }
}
