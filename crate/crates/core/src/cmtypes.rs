//! Partial CM types relative to a pair (k, Σ), their primitivity tests, the
//! multiplication type 𝔣, and the connected-centre torus Z.
//!
//! A partial CM type Φ ⊂ Emb(E) restricts bijectively onto the set of
//! embeddings of E₀ lying over Σ ⊆ Emb(k). Primitivity is implemented twice,
//! independently:
//!
//! * the definition test quantifies over pairs in a common k-fiber and all
//!   group elements;
//! * the stabilizer test compares Stab(φ) with Stab(P(φ)) ∩ Stab(ē_φ),
//!   computed from the multiplication type.
//!
//! The two are provably equivalent, and the test suites keep that fact as a
//! perpetual regression check.

use thiserror::Error;

use crate::fieldmodel::{
    real_quotient, validate_cm_model, CMModel, FieldModelError, ModelViolation, SubfieldMap,
    invariant_partitions,
};
use crate::intlattice::{contains_i64, saturate, IntMatrix};
use crate::permgroup::{PermGroup, Subset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CmTypeError {
    #[error("CM model is invalid: {0:?}")]
    InvalidModel(Vec<ModelViolation>),
    #[error(transparent)]
    FieldModel(#[from] FieldModelError),
    #[error("Σ contains indices outside Emb(k) of size {k_size}")]
    SigmaOutOfRange { k_size: usize },
    #[error("partial CM type is invalid: {0:?}")]
    InvalidPartialCMType(Vec<CmViolation>),
    #[error("n = {n} is not a positive even integer")]
    InvalidN { n: u64 },
    #[error("not a classical CM type: requires k = ℚ and Σ = Emb(ℚ)")]
    NotClassicalCMType,
}

/// A failed axiom of the partial-CM-type bijection condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CmViolation {
    /// Φ contains an index outside Emb(E).
    PhiOutOfRange { index: usize },
    /// Two members of Φ restrict to the same embedding of E₀.
    NotInjectiveToE0 { first: usize, second: usize },
    /// The image of Φ in Emb(E₀) misses a required embedding over Σ.
    MissingOverSigma { e0_index: usize },
    /// The image of Φ in Emb(E₀) contains an embedding not over Σ.
    ExtraOutsideSigma { phi_index: usize },
}

impl std::fmt::Display for CmViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmViolation::PhiOutOfRange { index } => {
                write!(f, "Φ contains out-of-range embedding {index}")
            }
            CmViolation::NotInjectiveToE0 { first, second } => write!(
                f,
                "Φ members {first} and {second} restrict to the same embedding of E₀"
            ),
            CmViolation::MissingOverSigma { e0_index } => write!(
                f,
                "no member of Φ restricts to the Σ-embedding {e0_index} of E₀"
            ),
            CmViolation::ExtraOutsideSigma { phi_index } => write!(
                f,
                "Φ member {phi_index} restricts outside Σ"
            ),
        }
    }
}

/// The tower (E, E₀, k, Σ): a valid CM model, the bar-pair quotient, a
/// further invariant block system on Emb(E₀), and a subset Σ of Emb(k).
#[derive(Clone, Debug)]
pub struct CMDatum {
    e: CMModel,
    to_e0: SubfieldMap,
    to_k: SubfieldMap,
    emb_to_k: SubfieldMap,
    sigma: Subset,
    e0_action: PermGroup,
    k_action: PermGroup,
}

impl CMDatum {
    /// Assembles the tower. `k_blocks` partitions Emb(E₀) (equivalently:
    /// names the subfield k ⊆ E₀); `sigma` is a subset of the block set.
    pub fn new(
        e: CMModel,
        k_blocks: Vec<Vec<usize>>,
        sigma: Subset,
    ) -> Result<Self, CmTypeError> {
        let violations = validate_cm_model(&e);
        if !violations.is_empty() {
            return Err(CmTypeError::InvalidModel(violations));
        }
        let to_e0 = real_quotient(&e)?;
        let e0_action = to_e0.induced_action(e.group())?;
        let to_k = SubfieldMap::from_blocks(to_e0.target_size(), k_blocks)?;
        if !to_k.is_invariant_under(&e0_action) {
            return Err(CmTypeError::FieldModel(FieldModelError::NotInvariant));
        }
        let k_action = to_k.induced_action(&e0_action)?;
        let emb_to_k = to_e0.compose(&to_k)?;
        if !sigma.is_subset_of(&Subset::full(to_k.target_size())) {
            return Err(CmTypeError::SigmaOutOfRange {
                k_size: to_k.target_size(),
            });
        }
        Ok(CMDatum {
            e,
            to_e0,
            to_k,
            emb_to_k,
            sigma,
            e0_action,
            k_action,
        })
    }

    pub fn model(&self) -> &CMModel {
        &self.e
    }

    /// [E:ℚ] = |Emb(E)|.
    pub fn degree(&self) -> usize {
        self.e.degree()
    }

    pub fn to_e0(&self) -> &SubfieldMap {
        &self.to_e0
    }

    pub fn to_k(&self) -> &SubfieldMap {
        &self.to_k
    }

    /// The composed restriction Emb(E) ↠ Emb(k).
    pub fn emb_to_k(&self) -> &SubfieldMap {
        &self.emb_to_k
    }

    pub fn sigma(&self) -> Subset {
        self.sigma
    }

    pub fn k_size(&self) -> usize {
        self.to_k.target_size()
    }

    /// Induced action on Emb(E₀).
    pub fn e0_action(&self) -> &PermGroup {
        &self.e0_action
    }

    /// Induced action on Emb(k).
    pub fn k_action(&self) -> &PermGroup {
        &self.k_action
    }

    /// True for k = ℚ, Σ = Emb(ℚ): the classical CM-type setting.
    pub fn is_classical(&self) -> bool {
        self.k_size() == 1 && self.sigma.contains(0)
    }

    /// The embeddings of E₀ that must be hit by Φ: those lying over Σ.
    pub fn required_e0_set(&self) -> Subset {
        let mut set = Subset::EMPTY;
        for e0 in 0..self.to_e0.target_size() {
            if self.sigma.contains(self.to_k.image_of(e0)) {
                set.insert(e0);
            }
        }
        set
    }
}

/// A candidate partial CM type Φ over a datum.
#[derive(Clone, Copy, Debug)]
pub struct PartialCMType<'a> {
    datum: &'a CMDatum,
    phi: Subset,
}

impl<'a> PartialCMType<'a> {
    pub fn new(datum: &'a CMDatum, phi: Subset) -> Self {
        PartialCMType { datum, phi }
    }

    pub fn datum(&self) -> &CMDatum {
        self.datum
    }

    pub fn phi(&self) -> Subset {
        self.phi
    }

    pub fn is_valid(&self) -> bool {
        validate_partial_cm(self).is_empty()
    }

    fn require_valid(&self) -> Result<(), CmTypeError> {
        let violations = validate_partial_cm(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(CmTypeError::InvalidPartialCMType(violations))
        }
    }
}

/// Checks the bijection condition of a partial CM type: restriction to
/// Emb(E₀) must be injective on Φ with image exactly the embeddings over Σ.
pub fn validate_partial_cm(t: &PartialCMType<'_>) -> Vec<CmViolation> {
    let datum = t.datum();
    let n = datum.degree();
    let mut violations = Vec::new();
    for index in t.phi().iter() {
        if index >= n {
            violations.push(CmViolation::PhiOutOfRange { index });
        }
    }
    if !violations.is_empty() {
        return violations;
    }
    let required = datum.required_e0_set();
    let mut hit_by: Vec<Option<usize>> = vec![None; datum.to_e0().target_size()];
    for phi in t.phi().iter() {
        let e0 = datum.to_e0().image_of(phi);
        match hit_by[e0] {
            Some(first) => violations.push(CmViolation::NotInjectiveToE0 {
                first,
                second: phi,
            }),
            None => hit_by[e0] = Some(phi),
        }
        if !required.contains(e0) {
            violations.push(CmViolation::ExtraOutsideSigma { phi_index: phi });
        }
    }
    for e0 in required.iter() {
        if e0 < hit_by.len() && hit_by[e0].is_none() {
            violations.push(CmViolation::MissingOverSigma { e0_index: e0 });
        }
    }
    violations
}

/// The multiplication type 𝔣 : Emb(E) → {0, n/2, n}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicationType {
    n: u64,
    values: Vec<u64>,
}

impl MultiplicationType {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn value(&self, phi: usize) -> u64 {
        self.values[phi]
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    /// Checks 𝔣(φ) + 𝔣(φ̄) = n at every embedding.
    pub fn satisfies_pairing(&self, bar: &crate::permgroup::Permutation) -> bool {
        (0..self.values.len()).all(|phi| {
            self.values[phi] + self.values[bar.apply(phi)] == self.n
        })
    }
}

/// 𝔣(φ) = n if φ ∈ Φ, 0 if φ̄ ∈ Φ, n/2 otherwise.
pub fn multiplication_type(
    t: &PartialCMType<'_>,
    n: u64,
) -> Result<MultiplicationType, CmTypeError> {
    if n == 0 || n % 2 != 0 {
        return Err(CmTypeError::InvalidN { n });
    }
    t.require_valid()?;
    let datum = t.datum();
    let bar = datum.model().bar();
    let values = (0..datum.degree())
        .map(|phi| {
            if t.phi().contains(phi) {
                n
            } else if t.phi().contains(bar.apply(phi)) {
                0
            } else {
                n / 2
            }
        })
        .collect();
    Ok(MultiplicationType { n, values })
}

/// Definition-level primitivity: for every ordered pair φ ≠ φ′ in a common
/// fiber of Emb(E) → Emb(k), some γ puts γφ inside Φ and γφ′ outside.
pub fn is_primitive_definition(t: &PartialCMType<'_>) -> Result<bool, CmTypeError> {
    t.require_valid()?;
    let datum = t.datum();
    let elements = datum.model().group().elements();
    for fiber_index in 0..datum.emb_to_k().target_size() {
        let fiber = datum.emb_to_k().fiber(fiber_index)?;
        for &phi in fiber {
            for &phi_prime in fiber {
                if phi == phi_prime {
                    continue;
                }
                let separated = elements.iter().any(|gamma| {
                    t.phi().contains(gamma.apply(phi)) && !t.phi().contains(gamma.apply(phi_prime))
                });
                if !separated {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Stabilizer-level primitivity: Φ is primitive iff for a base embedding φ,
/// Stab(φ) = Stab(P(φ)) ∩ Stab(ē_φ), where P(φ) is the k-fiber of φ and
/// Stab(ē_φ) = {δ : 𝔣(γδφ) = 𝔣(γφ) for all γ}.
///
/// Conjugating by a transitive group element carries the three stabilizers
/// for one base point to those of any other, so the choice of φ is
/// immaterial; we use φ = 0.
pub fn is_primitive_stabilizer(t: &PartialCMType<'_>, n: u64) -> Result<bool, CmTypeError> {
    let f = multiplication_type(t, n)?;
    let datum = t.datum();
    let group = datum.model().group();
    let base = 0usize;
    // Signature of x: the function γ ↦ 𝔣(γ·x) over the fixed element order.
    let signature = |x: usize| -> Vec<u64> {
        group
            .elements()
            .iter()
            .map(|gamma| f.value(gamma.apply(x)))
            .collect()
    };
    let base_signature = signature(base);
    let fiber = Subset::from_indices(
        datum
            .emb_to_k()
            .fiber(datum.emb_to_k().image_of(base))?,
    );
    for delta in group.elements() {
        let in_fiber_stab = fiber.apply(delta) == fiber;
        let in_ebar_stab = signature(delta.apply(base)) == base_signature;
        if in_fiber_stab && in_ebar_stab && delta.apply(base) != base {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Classical-primitivity cross-check: for a classical CM type (k = ℚ,
/// Σ = Emb(ℚ)), decides whether Φ is induced from a proper CM subfield,
/// i.e. whether some proper invariant block system on Emb(E) has a
/// fixed-point-free induced bar and Φ a union of its blocks.
pub fn induced_from_subfield(t: &PartialCMType<'_>) -> Result<bool, CmTypeError> {
    t.require_valid()?;
    let datum = t.datum();
    if !datum.is_classical() {
        return Err(CmTypeError::NotClassicalCMType);
    }
    let model = datum.model();
    let n = model.degree();
    for partition in invariant_partitions(model.group()) {
        if partition.target_size() == n {
            continue; // singleton blocks name E itself, not a proper subfield
        }
        let Ok(induced_bar) = partition.induced_permutation(model.bar()) else {
            continue;
        };
        let fixed_point_free =
            (0..partition.target_size()).all(|b| induced_bar.apply(b) != b);
        if !fixed_point_free {
            continue;
        }
        let union_of_blocks = partition.blocks().iter().all(|block| {
            let inside = block.iter().filter(|&&x| t.phi().contains(x)).count();
            inside == 0 || inside == block.len()
        });
        if union_of_blocks {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The connected-centre torus Z, through its saturated cocharacter lattice
/// inside 𝖷_*(T_E).
#[derive(Clone, Debug)]
pub struct CentralTorus {
    cochar_basis: IntMatrix,
    rank: usize,
}

impl CentralTorus {
    pub fn basis(&self) -> &IntMatrix {
        &self.cochar_basis
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        contains_i64(&self.cochar_basis, v).unwrap_or(false)
    }

    pub fn contains_all_ones(&self) -> bool {
        let v = vec![1i64; self.cochar_basis.cols()];
        self.contains(&v)
    }

    /// True iff every basis vector v has v_φ + v_{φ̄} constant across φ —
    /// the condition cutting out the unitary-type torus U_E.
    pub fn satisfies_ue_pairing(&self, bar: &crate::permgroup::Permutation) -> bool {
        use num_bigint::BigInt;
        for i in 0..self.cochar_basis.rows() {
            let row = self.cochar_basis.row(i);
            let mut constant: Option<BigInt> = None;
            for phi in 0..row.len() {
                let pair_sum = &row[phi] + &row[bar.apply(phi)];
                match &constant {
                    None => constant = Some(pair_sum),
                    Some(c) => {
                        if *c != pair_sum {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// True iff the permutation action carries the lattice to itself.
    pub fn is_stable_under(&self, group: &PermGroup) -> bool {
        use num_bigint::BigInt;
        use crate::intlattice::contains;
        for g in group.generators() {
            for i in 0..self.cochar_basis.rows() {
                let row = self.cochar_basis.row(i);
                let mut image = vec![BigInt::from(0); row.len()];
                for (j, value) in row.iter().enumerate() {
                    image[g.apply(j)] = value.clone();
                }
                if !contains(&self.cochar_basis, &image).unwrap_or(false) {
                    return false;
                }
            }
        }
        true
    }
}

/// The cocharacter lattice of the smallest ℚ-subtorus of T_E through which
/// the central cocharacter factors: the saturation of the span of the
/// Galois orbit of the vector a with a_φ = 2·𝔣(φ)/n ∈ {0, 1, 2}.
pub fn central_torus(f: &MultiplicationType, action: &PermGroup) -> CentralTorus {
    let degree = f.values().len();
    debug_assert_eq!(degree, action.ground_size());
    let a: Vec<i64> = f
        .values()
        .iter()
        .map(|&value| (2 * value / f.n()) as i64)
        .collect();
    let mut rows: Vec<Vec<i64>> = action
        .elements()
        .iter()
        .map(|g| {
            let mut image = vec![0i64; degree];
            for (i, &value) in a.iter().enumerate() {
                image[g.apply(i)] = value;
            }
            image
        })
        .collect();
    rows.sort();
    rows.dedup();
    let matrix = IntMatrix::from_rows(&rows);
    let cochar_basis = saturate(&matrix);
    let rank = cochar_basis.rows();
    CentralTorus { cochar_basis, rank }
}
