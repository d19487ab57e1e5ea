//! Combinatorial models of totally real fields F, CM fields E, and subfield
//! towers k ⊆ E₀ ⊆ E.
//!
//! A field never appears as a polynomial or a ring here: it is a transitive
//! permutation action on its embedding set, together with distinguished
//! structure (the conjugation involution for a CM field, a block system for
//! a subfield). Subfield degree = number of blocks. Two models describe the
//! same field data exactly when they are conjugate respecting the marked
//! structure, and that test is a brute-force backtracking search — feasible
//! because every action in sight has at most a dozen points.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::permgroup::{orbit_of_point, PermGroup, Permutation, Subset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldModelError {
    #[error("action is not transitive")]
    NotTransitive,
    #[error("CM model is invalid: {0:?}")]
    InvalidModel(Vec<ModelViolation>),
    #[error("target index {index} out of range (target size {size})")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("blocks do not partition the source set of size {source_size}")]
    NotAPartition { source_size: usize },
    #[error("partition is not invariant under the group action")]
    NotInvariant,
    #[error("permutation degree {got} does not match the model degree {expected}")]
    DegreeMismatch { expected: usize, got: usize },
}

/// A named axiom failure together with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelViolation {
    /// The group action on the embedding set is not transitive.
    NotTransitive,
    /// bar ∘ bar ≠ id; `point` is moved by the square.
    BarNotInvolution { point: usize },
    /// bar fixes `point`, contradicting total imaginarity.
    BarHasFixedPoint { point: usize },
    /// γ(bar(x)) ≠ bar(γ(x)) for the generator with this index.
    BarNotEquivariant { point: usize, generator: usize },
    /// bar degree differs from the group's ground size.
    BarDegreeMismatch { expected: usize, got: usize },
}

impl fmt::Display for ModelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelViolation::NotTransitive => write!(f, "action is not transitive"),
            ModelViolation::BarNotInvolution { point } => {
                write!(f, "bar∘bar moves point {point}")
            }
            ModelViolation::BarHasFixedPoint { point } => {
                write!(f, "bar fixes point {point}")
            }
            ModelViolation::BarNotEquivariant { point, generator } => write!(
                f,
                "equivariance fails at point {point} for generator #{generator}"
            ),
            ModelViolation::BarDegreeMismatch { expected, got } => {
                write!(f, "bar acts on {got} points, expected {expected}")
            }
        }
    }
}

/// A totally real field F, as a transitive action on Emb(F).
#[derive(Clone, Debug)]
pub struct TotallyRealModel {
    group: PermGroup,
}

impl TotallyRealModel {
    pub fn new(group: PermGroup) -> Result<Self, FieldModelError> {
        if !group.is_transitive() {
            return Err(FieldModelError::NotTransitive);
        }
        Ok(TotallyRealModel { group })
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    /// m = [F:ℚ] = |Emb(F)|.
    pub fn degree(&self) -> usize {
        self.group.ground_size()
    }
}

/// A CM field E: a transitive action on Emb(E) plus complex conjugation.
#[derive(Clone, Debug)]
pub struct CMModel {
    group: PermGroup,
    bar: Permutation,
}

impl CMModel {
    /// Stores the raw data; run [`validate_cm_model`] to check the axioms.
    pub fn new(group: PermGroup, bar: Permutation) -> Self {
        CMModel { group, bar }
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn bar(&self) -> &Permutation {
        &self.bar
    }

    /// |Emb(E)| = 2·[E₀:ℚ].
    pub fn degree(&self) -> usize {
        self.group.ground_size()
    }

    pub fn is_valid(&self) -> bool {
        validate_cm_model(self).is_empty()
    }
}

/// Checks all CM-model axioms, returning every violation with a witness.
pub fn validate_cm_model(model: &CMModel) -> Vec<ModelViolation> {
    let mut violations = Vec::new();
    let n = model.group.ground_size();
    if model.bar.degree() != n {
        violations.push(ModelViolation::BarDegreeMismatch {
            expected: n,
            got: model.bar.degree(),
        });
        return violations;
    }
    if !model.group.is_transitive() {
        violations.push(ModelViolation::NotTransitive);
    }
    for x in 0..n {
        if model.bar.apply(model.bar.apply(x)) != x {
            violations.push(ModelViolation::BarNotInvolution { point: x });
            break;
        }
    }
    for x in 0..n {
        if model.bar.apply(x) == x {
            violations.push(ModelViolation::BarHasFixedPoint { point: x });
            break;
        }
    }
    'outer: for (gi, g) in model.group.generators().iter().enumerate() {
        for x in 0..n {
            if g.apply(model.bar.apply(x)) != model.bar.apply(g.apply(x)) {
                violations.push(ModelViolation::BarNotEquivariant {
                    point: x,
                    generator: gi,
                });
                break 'outer;
            }
        }
    }
    violations
}

/// A restriction map Emb(source) ↠ Emb(target), encoded by the partition of
/// the source embedding set into fibers. Target degree = number of blocks.
#[derive(Clone, PartialEq, Eq)]
pub struct SubfieldMap {
    source_size: usize,
    /// Blocks sorted by minimum element; each block sorted increasing.
    blocks: Vec<Vec<usize>>,
    /// block_of[x] = index of the block containing x.
    block_of: Vec<usize>,
}

impl SubfieldMap {
    /// Builds the map from a list of blocks, checking that they partition
    /// `0..source_size`. Blocks are renumbered canonically (by minimum).
    pub fn from_blocks(
        source_size: usize,
        mut blocks: Vec<Vec<usize>>,
    ) -> Result<Self, FieldModelError> {
        for block in &mut blocks {
            block.sort_unstable();
        }
        blocks.sort();
        let mut seen = vec![false; source_size];
        for block in &blocks {
            if block.is_empty() {
                return Err(FieldModelError::NotAPartition { source_size });
            }
            for &x in block {
                if x >= source_size || seen[x] {
                    return Err(FieldModelError::NotAPartition { source_size });
                }
                seen[x] = true;
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(FieldModelError::NotAPartition { source_size });
        }
        let mut block_of = vec![0; source_size];
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                block_of[x] = b;
            }
        }
        Ok(SubfieldMap {
            source_size,
            blocks,
            block_of,
        })
    }

    /// The identity map (singleton blocks).
    pub fn identity(source_size: usize) -> Self {
        SubfieldMap::from_blocks(source_size, (0..source_size).map(|x| vec![x]).collect())
            .expect("singleton partition is always valid")
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    pub fn target_size(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Image of a source point.
    pub fn image_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    /// The fiber over a target point.
    pub fn fiber(&self, t: usize) -> Result<&[usize], FieldModelError> {
        self.blocks
            .get(t)
            .map(|b| b.as_slice())
            .ok_or(FieldModelError::IndexOutOfRange {
                index: t,
                size: self.blocks.len(),
            })
    }

    /// True if every group element permutes the blocks.
    pub fn is_invariant_under(&self, group: &PermGroup) -> bool {
        if group.ground_size() != self.source_size {
            return false;
        }
        group.generators().iter().all(|g| {
            self.blocks.iter().all(|block| {
                let image_block = self.block_of[g.apply(block[0])];
                block
                    .iter()
                    .all(|&x| self.block_of[g.apply(x)] == image_block)
                    && self.blocks[image_block].len() == block.len()
            })
        })
    }

    /// The action induced on the target (blocks), if the partition is
    /// invariant.
    pub fn induced_action(&self, group: &PermGroup) -> Result<PermGroup, FieldModelError> {
        if group.ground_size() != self.source_size {
            return Err(FieldModelError::DegreeMismatch {
                expected: self.source_size,
                got: group.ground_size(),
            });
        }
        if !self.is_invariant_under(group) {
            return Err(FieldModelError::NotInvariant);
        }
        let gens = group
            .generators()
            .iter()
            .map(|g| self.induced_permutation(g))
            .collect::<Result<Vec<_>, _>>()?;
        // The induced element count never exceeds the source group's order.
        PermGroup::generate(gens, group.order().max(1)).map_err(|_| FieldModelError::NotInvariant)
    }

    /// The permutation a single source permutation induces on blocks.
    pub fn induced_permutation(&self, g: &Permutation) -> Result<Permutation, FieldModelError> {
        if g.degree() != self.source_size {
            return Err(FieldModelError::DegreeMismatch {
                expected: self.source_size,
                got: g.degree(),
            });
        }
        let mut images = vec![usize::MAX; self.blocks.len()];
        for (b, block) in self.blocks.iter().enumerate() {
            let target = self.block_of[g.apply(block[0])];
            for &x in block {
                if self.block_of[g.apply(x)] != target {
                    return Err(FieldModelError::NotInvariant);
                }
            }
            images[b] = target;
        }
        Permutation::from_images(images).map_err(|_| FieldModelError::NotInvariant)
    }

    /// Composition: if `self : X ↠ Y` and `other : Y ↠ Z`, the result is the
    /// map `X ↠ Z` whose fibers are unions of `self`-fibers.
    pub fn compose(&self, other: &SubfieldMap) -> Result<SubfieldMap, FieldModelError> {
        if other.source_size != self.target_size() {
            return Err(FieldModelError::DegreeMismatch {
                expected: self.target_size(),
                got: other.source_size,
            });
        }
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); other.target_size()];
        for x in 0..self.source_size {
            blocks[other.block_of[self.block_of[x]]].push(x);
        }
        SubfieldMap::from_blocks(self.source_size, blocks)
    }
}

impl fmt::Debug for SubfieldMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubfieldMap{:?}", self.blocks)
    }
}

/// The quotient Emb(E) ↠ Emb(E₀): blocks are the bar-pairs {x, bar(x)}.
pub fn real_quotient(model: &CMModel) -> Result<SubfieldMap, FieldModelError> {
    let violations = validate_cm_model(model);
    if !violations.is_empty() {
        return Err(FieldModelError::InvalidModel(violations));
    }
    let n = model.degree();
    let mut blocks = Vec::with_capacity(n / 2);
    for x in 0..n {
        let y = model.bar.apply(x);
        if x < y {
            blocks.push(vec![x, y]);
        }
    }
    SubfieldMap::from_blocks(n, blocks)
}

/// All group-invariant partitions of the ground set (block systems of the
/// action), including the singleton and the one-block partition.
///
/// Every invariant block containing 0 is found by scanning subsets of the
/// ground set; each determines the full system as its orbit.
pub fn invariant_partitions(group: &PermGroup) -> Vec<SubfieldMap> {
    let n = group.ground_size();
    let mut result = Vec::new();
    let mut seen: HashSet<Vec<Vec<usize>>> = HashSet::new();
    for mask in 0..(1u64 << n) {
        let candidate = Subset::from_mask(mask);
        if !candidate.contains(0) {
            continue;
        }
        if n % candidate.card() != 0 {
            continue;
        }
        // Block test: every translate coincides with or misses the block.
        let mut is_block = true;
        let mut translates: Vec<Subset> = Vec::new();
        for g in group.elements() {
            let image = candidate.apply(g);
            if image != candidate && !image.intersect(&candidate).is_empty() {
                is_block = false;
                break;
            }
            translates.push(image);
        }
        if !is_block {
            continue;
        }
        translates.sort();
        translates.dedup();
        let covered: usize = translates.iter().map(|t| t.card()).sum();
        if covered != n {
            continue;
        }
        let blocks: Vec<Vec<usize>> = translates.iter().map(|t| t.indices()).collect();
        if seen.insert(blocks.clone()) {
            result.push(
                SubfieldMap::from_blocks(n, blocks).expect("block orbit partitions the set"),
            );
        }
    }
    result.sort_by_key(|p| (p.target_size(), p.blocks().to_vec()));
    result
}

/// Constraints for the marked-conjugacy search of [`find_marked_bijection`].
#[derive(Default)]
pub struct MarkedConstraints<'a> {
    /// Pairs (A, B) with c(A) = B required.
    pub subset_pairs: Vec<(Subset, Subset)>,
    /// Pairs (p, q) with c∘p = q∘c required.
    pub intertwine: Vec<(&'a Permutation, &'a Permutation)>,
    /// Pairs of partitions that must correspond blockwise.
    pub partition_pairs: Vec<(&'a SubfieldMap, &'a SubfieldMap)>,
}

/// Searches for a bijection c with c·G_a·c⁻¹ = G_b satisfying the marked
/// constraints. Both actions are identified with quotients of the same
/// absolute Galois group, so conjugacy respecting the marked structure is
/// the desk-scale meaning of "equivariant bijection".
pub fn find_marked_bijection(
    group_a: &PermGroup,
    group_b: &PermGroup,
    constraints: &MarkedConstraints<'_>,
) -> Option<Vec<usize>> {
    let n = group_a.ground_size();
    if group_b.ground_size() != n || group_a.order() != group_b.order() {
        return None;
    }
    // Cheap conjugacy-invariant prefilter: cycle-type multisets must agree.
    let mut types_a: Vec<Vec<usize>> = group_a.elements().iter().map(|g| g.cycle_type()).collect();
    let mut types_b: Vec<Vec<usize>> = group_b.elements().iter().map(|g| g.cycle_type()).collect();
    types_a.sort();
    types_b.sort();
    if types_a != types_b {
        return None;
    }
    for (sa, sb) in &constraints.subset_pairs {
        if sa.card() != sb.card() {
            return None;
        }
    }
    let elements_b: HashSet<&Permutation> = group_b.elements().iter().collect();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        x: usize,
        n: usize,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        group_a: &PermGroup,
        elements_b: &HashSet<&Permutation>,
        constraints: &MarkedConstraints<'_>,
    ) -> bool {
        if x == n {
            // Full conjugacy check on every element.
            return group_a.elements().iter().all(|g| {
                let mut conj = vec![0; n];
                for p in 0..n {
                    conj[image[p]] = image[g.apply(p)];
                }
                match Permutation::from_images(conj) {
                    Ok(perm) => elements_b.contains(&perm),
                    Err(_) => false,
                }
            });
        }
        'candidate: for y in 0..n {
            if used[y] {
                continue;
            }
            for (sa, sb) in &constraints.subset_pairs {
                if sa.contains(x) != sb.contains(y) {
                    continue 'candidate;
                }
            }
            for (pa, pb) in &constraints.partition_pairs {
                // Points already assigned must respect blockwise matching.
                for prev in 0..x {
                    let same_a = pa.image_of(prev) == pa.image_of(x);
                    let same_b = pb.image_of(image[prev]) == pb.image_of(y);
                    if same_a != same_b {
                        continue 'candidate;
                    }
                }
                if pa.fiber(pa.image_of(x)).unwrap().len()
                    != pb.fiber(pb.image_of(y)).unwrap().len()
                {
                    continue 'candidate;
                }
            }
            image[x] = y;
            used[y] = true;
            // Intertwining prune: wherever both endpoints are assigned,
            // c(p(z)) must equal q(c(z)).
            let mut consistent = true;
            for (p, q) in &constraints.intertwine {
                for z in 0..n {
                    if image[z] == usize::MAX {
                        continue;
                    }
                    let pz = p.apply(z);
                    if image[pz] != usize::MAX && image[pz] != q.apply(image[z]) {
                        consistent = false;
                        break;
                    }
                }
                if !consistent {
                    break;
                }
            }
            if consistent
                && extend(x + 1, n, image, used, group_a, elements_b, constraints)
            {
                return true;
            }
            image[x] = usize::MAX;
            used[y] = false;
        }
        false
    }
    if extend(
        0,
        n,
        &mut image,
        &mut used,
        group_a,
        &elements_b,
        constraints,
    ) {
        Some(image)
    } else {
        None
    }
}

/// True if two CM models are isomorphic: conjugate groups intertwining the
/// conjugation involutions.
pub fn cm_models_isomorphic(a: &CMModel, b: &CMModel) -> bool {
    if a.degree() != b.degree() {
        return false;
    }
    let constraints = MarkedConstraints {
        intertwine: vec![(a.bar(), b.bar())],
        ..Default::default()
    };
    find_marked_bijection(a.group(), b.group(), &constraints).is_some()
}

/// The orbit of a point under the full group, as a subset-of-target helper
/// for transitivity checks on induced actions.
pub fn action_is_transitive(group: &PermGroup) -> bool {
    group.ground_size() > 0 && orbit_of_point(group, 0).len() == group.ground_size()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::DEFAULT_GROUP_LIMIT;

    fn cyclic_group(n: usize) -> PermGroup {
        let images: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        PermGroup::generate(
            vec![Permutation::from_images(images).unwrap()],
            DEFAULT_GROUP_LIMIT,
        )
        .unwrap()
    }

    fn quartic_cyclic_cm() -> CMModel {
        // Γ = ⟨(0 1 2 3)⟩, bar = (0 2)(1 3) — the square of the 4-cycle.
        CMModel::new(
            cyclic_group(4),
            Permutation::from_images(vec![2, 3, 0, 1]).unwrap(),
        )
    }

    fn imaginary_quadratic_cm() -> CMModel {
        CMModel::new(
            cyclic_group(2),
            Permutation::from_images(vec![1, 0]).unwrap(),
        )
    }

    fn biquadratic_cm() -> CMModel {
        // Regular C2×C2 on {e, a, b, ab} = {0, 1, 2, 3}, bar = ·ab.
        let gens = vec![
            Permutation::from_images(vec![1, 0, 3, 2]).unwrap(),
            Permutation::from_images(vec![2, 3, 0, 1]).unwrap(),
        ];
        CMModel::new(
            PermGroup::generate(gens, DEFAULT_GROUP_LIMIT).unwrap(),
            Permutation::from_images(vec![3, 2, 1, 0]).unwrap(),
        )
    }

    #[test]
    fn cm_validation_accepts_good_models() {
        assert!(validate_cm_model(&quartic_cyclic_cm()).is_empty());
        assert!(validate_cm_model(&imaginary_quadratic_cm()).is_empty());
        assert!(validate_cm_model(&biquadratic_cm()).is_empty());
    }

    #[test]
    fn cm_validation_reports_equivariance_failure() {
        // bar = (0 1)(2 3) does not commute with the 4-cycle:
        // γ(bar(0)) = γ(1) = 2 but bar(γ(0)) = bar(1) = 0.
        let model = CMModel::new(
            cyclic_group(4),
            Permutation::from_images(vec![1, 0, 3, 2]).unwrap(),
        );
        let violations = validate_cm_model(&model);
        assert!(violations
            .iter()
            .any(|v| matches!(v, ModelViolation::BarNotEquivariant { point: 0, .. })));
    }

    #[test]
    fn cm_validation_reports_fixed_points() {
        let model = CMModel::new(
            cyclic_group(2),
            Permutation::from_images(vec![0, 1]).unwrap(),
        );
        let violations = validate_cm_model(&model);
        assert!(violations
            .iter()
            .any(|v| matches!(v, ModelViolation::BarHasFixedPoint { .. })));
    }

    #[test]
    fn real_quotient_blocks() {
        let q = real_quotient(&quartic_cyclic_cm()).unwrap();
        assert_eq!(q.blocks(), &[vec![0, 2], vec![1, 3]]);

        let q = real_quotient(&imaginary_quadratic_cm()).unwrap();
        assert_eq!(q.blocks(), &[vec![0, 1]]);

        // Degree-6 model: Γ = C6, bar = σ³.
        let model = CMModel::new(
            cyclic_group(6),
            Permutation::from_images(vec![3, 4, 5, 0, 1, 2]).unwrap(),
        );
        let q = real_quotient(&model).unwrap();
        assert_eq!(q.target_size(), 3);
        assert_eq!(q.target_size(), model.degree() / 2);
    }

    #[test]
    fn fibers() {
        let model = quartic_cyclic_cm();
        let q = real_quotient(&model).unwrap();
        assert_eq!(q.fiber(0).unwrap(), &[0, 2]);
        assert!(q.fiber(5).is_err());

        // Composite Emb(E) → Emb(Q): a single fiber.
        let to_q = SubfieldMap::from_blocks(2, vec![vec![0, 1]]).unwrap();
        let composed = q.compose(&to_q).unwrap();
        assert_eq!(composed.fiber(0).unwrap(), &[0, 1, 2, 3]);

        // Identity subfield map: singleton blocks.
        let ident = SubfieldMap::identity(2);
        assert_eq!(ident.fiber(1).unwrap(), &[1]);
    }

    #[test]
    fn induced_actions_are_transitive() {
        for model in [quartic_cyclic_cm(), biquadratic_cm()] {
            let q = real_quotient(&model).unwrap();
            let induced = q.induced_action(model.group()).unwrap();
            assert!(induced.is_transitive());
        }
    }

    #[test]
    fn composed_blocks_are_bar_stable() {
        let model = quartic_cyclic_cm();
        let q = real_quotient(&model).unwrap();
        let to_q = SubfieldMap::from_blocks(2, vec![vec![0, 1]]).unwrap();
        let composed = q.compose(&to_q).unwrap();
        for block in composed.blocks() {
            let as_subset = Subset::from_indices(block);
            assert_eq!(as_subset.apply(model.bar()), as_subset);
        }
        assert!(composed.is_invariant_under(model.group()));
    }

    #[test]
    fn partition_enumeration_biquadratic() {
        let group = biquadratic_cm().group().clone();
        let partitions = invariant_partitions(&group);
        // Regular V4: singletons, three 2-block systems, one block.
        assert_eq!(partitions.len(), 5);
        assert_eq!(
            partitions.iter().map(|p| p.target_size()).collect::<Vec<_>>(),
            vec![1, 2, 2, 2, 4]
        );
    }

    #[test]
    fn partition_enumeration_cyclic_quartic() {
        let partitions = invariant_partitions(&cyclic_group(4));
        // C4: one block, {0,2}/{1,3}, singletons.
        assert_eq!(partitions.len(), 3);
    }

    #[test]
    fn marked_bijection_finds_conjugations() {
        let a = quartic_cyclic_cm();
        let b = CMModel::new(
            // Same group, bar relabeled by conjugating with (1 3): still σ².
            cyclic_group(4),
            Permutation::from_images(vec![2, 3, 0, 1]).unwrap(),
        );
        assert!(cm_models_isomorphic(&a, &b));
        assert!(!cm_models_isomorphic(&a, &biquadratic_cm()));
    }

    #[test]
    fn marked_bijection_respects_subsets() {
        let g = cyclic_group(5);
        // Σ = {1,2,3} vs Σ' = {1,2,4}: related by x ↦ 2x (conjugates C5).
        let constraints = MarkedConstraints {
            subset_pairs: vec![(
                Subset::from_indices(&[1, 2, 3]),
                Subset::from_indices(&[1, 2, 4]),
            )],
            ..Default::default()
        };
        let c = find_marked_bijection(&g, &g, &constraints).unwrap();
        let mapped = Subset::from_indices(&[1, 2, 3])
            .indices()
            .into_iter()
            .map(|x| c[x])
            .collect::<Vec<_>>();
        let mut mapped = mapped;
        mapped.sort_unstable();
        assert_eq!(mapped, vec![1, 2, 4]);

        // No affine map carries a 2-set to a 3-set.
        let constraints = MarkedConstraints {
            subset_pairs: vec![(
                Subset::from_indices(&[0, 1]),
                Subset::from_indices(&[0, 1, 2]),
            )],
            ..Default::default()
        };
        assert!(find_marked_bijection(&g, &g, &constraints).is_none());
    }
}
