//! Galois orbits 𝕀 of subsets of Emb(F) and the discrete invariants of the
//! corresponding irreducible representations ρ_𝕀 of Res_{F/ℚ} SL_{1,D}.
//!
//! A representation is never materialized as matrices. What the
//! classification consumes is: the orbit itself, ℓ(𝕀) (common cardinality),
//! [k_𝕀:ℚ] = |𝕀|, the degree of the endomorphism algebra 𝓔_𝕀 (1 or 2, and
//! 2 is forced for every proper orbit because the real corestriction
//! invariant varies across the orbit), dim_ℚ W_𝕀, and the multiset shape of
//! the decomposition over ℚ̄.

use thiserror::Error;

use crate::brauer::{cores_to_q_is_trivial, BrauerError, QuaternionData};
use crate::fieldmodel::TotallyRealModel;
use crate::permgroup::{orbit_of_subset, setwise_stabilizer, PermGroup, Subset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitRepError {
    #[error("orbit members are empty subsets")]
    EmptyOrbitMember,
    #[error("orbit is on {orbit_degree} points but the quaternion data is over degree {data_degree}")]
    DegreeMismatch {
        orbit_degree: usize,
        data_degree: usize,
    },
    #[error("seed vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Brauer(#[from] BrauerError),
}

/// One Γ-orbit of subsets of Emb(F) with its stabilizer data.
#[derive(Clone, Debug)]
pub struct SubsetOrbit {
    canonical: Subset,
    members: Vec<Subset>,
    ell: usize,
    stab: PermGroup,
    ground_size: usize,
}

impl SubsetOrbit {
    /// Builds the orbit of `seed` under the group.
    pub fn of(group: &PermGroup, seed: Subset) -> Self {
        let members = orbit_of_subset(group, seed);
        let canonical = members[0];
        let stab = setwise_stabilizer(group, canonical);
        SubsetOrbit {
            canonical,
            ell: canonical.card(),
            members,
            stab,
            ground_size: group.ground_size(),
        }
    }

    pub fn canonical(&self) -> Subset {
        self.canonical
    }

    /// Members sorted by bitmask.
    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    /// ℓ(𝕀): the common cardinality of the members.
    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Setwise stabilizer of the canonical member, with generator list
    /// equal to its element list.
    pub fn stabilizer(&self) -> &PermGroup {
        &self.stab
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    /// True iff the orbit is `{Emb(F)}`.
    pub fn is_full_set(&self) -> bool {
        self.ell == self.ground_size
    }

    /// True for orbits of nonempty proper subsets.
    pub fn is_proper_nonempty(&self) -> bool {
        self.ell > 0 && !self.is_full_set()
    }
}

/// All orbits of subsets of Emb(F), sorted by (ℓ, canonical mask).
///
/// Bitmasks are scanned in increasing order and non-canonical ones skipped,
/// so each orbit is produced exactly once and the output partitions the
/// power set.
pub fn enumerate_orbits(field: &TotallyRealModel, nonempty_only: bool) -> Vec<SubsetOrbit> {
    let group = field.group();
    let n = group.ground_size();
    let mut orbits = Vec::new();
    for mask in 0..(1u64 << n) {
        if nonempty_only && mask == 0 {
            continue;
        }
        let subset = Subset::from_mask(mask);
        let orbit = SubsetOrbit::of(group, subset);
        if orbit.canonical() != subset {
            continue;
        }
        orbits.push(orbit);
    }
    orbits.sort_by_key(|o| (o.ell(), o.canonical().mask()));
    orbits
}

/// Discrete invariants of the irreducible representation ρ_𝕀.
#[derive(Clone, Debug)]
pub struct IrrepRecord {
    pub orbit: SubsetOrbit,
    /// [k_𝕀:ℚ] = |𝕀|.
    pub k_degree: usize,
    /// deg 𝓔_𝕀 ∈ {1, 2}.
    pub endo_degree: usize,
    /// dim_ℚ W_𝕀 = [k_𝕀:ℚ] · deg(𝓔_𝕀) · 2^ℓ.
    pub dim_w: u64,
    /// One entry per orbit member J, each a summand ⊠_{σ∈J} St_σ with
    /// multiplicity deg(𝓔_𝕀).
    pub qbar_decomposition: Vec<(Subset, usize)>,
}

/// Assembles the invariants of ρ_𝕀 for an orbit over the field of `data`.
///
/// For a proper nonempty orbit the endomorphism degree is always 2: the
/// orbit contains members with and without σ_nc, whose real invariants
/// differ by ½, so the Brauer class of 𝓔_𝕀 is nontrivial. For the full-set
/// orbit the degree is 1 or 2 according to whether Cores_{F/ℚ}(D) is split.
pub fn irrep_record(orbit: &SubsetOrbit, data: &QuaternionData) -> Result<IrrepRecord, OrbitRepError> {
    if orbit.ground_size() != data.degree() {
        return Err(OrbitRepError::DegreeMismatch {
            orbit_degree: orbit.ground_size(),
            data_degree: data.degree(),
        });
    }
    if orbit.ell() == 0 {
        return Err(OrbitRepError::EmptyOrbitMember);
    }
    let endo_degree = if orbit.is_full_set() {
        if cores_to_q_is_trivial(data)? {
            1
        } else {
            2
        }
    } else {
        2
    };
    let k_degree = orbit.len();
    let dim_w = (k_degree as u64) * (endo_degree as u64) * (1u64 << orbit.ell());
    let qbar_decomposition = orbit
        .members()
        .iter()
        .map(|&m| (m, endo_degree))
        .collect();
    Ok(IrrepRecord {
        orbit: orbit.clone(),
        k_degree,
        endo_degree,
        dim_w,
        qbar_decomposition,
    })
}

/// Orbit data of an irreducible torus representation: the Galois orbit of a
/// character, with End isomorphic to the field of degree = orbit size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusOrbitRep {
    pub lattice_rank: usize,
    pub orbit: Vec<Vec<i64>>,
    pub endo_field_degree: usize,
}

/// Orbit of a character vector under coordinate permutation.
///
/// The group permutes the basis characters; a character Σ v_i·e_i is sent
/// by γ to Σ v_i·e_{γ(i)}, i.e. (γ·v)_{γ(i)} = v_i.
pub fn torus_orbit_rep(action: &PermGroup, seed: &[i64]) -> Result<TorusOrbitRep, OrbitRepError> {
    let n = action.ground_size();
    if seed.len() != n {
        return Err(OrbitRepError::DimensionMismatch {
            expected: n,
            got: seed.len(),
        });
    }
    let mut orbit: Vec<Vec<i64>> = action
        .elements()
        .iter()
        .map(|g| {
            let mut image = vec![0i64; n];
            for i in 0..n {
                image[g.apply(i)] = seed[i];
            }
            image
        })
        .collect();
    orbit.sort();
    orbit.dedup();
    let endo_field_degree = orbit.len();
    Ok(TorusOrbitRep {
        lattice_rank: n,
        orbit,
        endo_field_degree,
    })
}
