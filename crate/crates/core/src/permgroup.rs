//! Finite permutation groups acting on an embedding set.
//!
//! Groups are given by generator permutations of `{0, …, n−1}` and are
//! materialized in full by breadth-first closure, capped by an explicit
//! element limit. Orbits of points and of subsets, and setwise stabilizers,
//! are computed by scanning the full element list; at the scales this crate
//! targets (ground sets of size ≤ 20, group orders ≤ 10^5) nothing smarter
//! is warranted, and the naive scan keeps every output deterministic.

use std::fmt;

use thiserror::Error;

/// Default cap on the number of group elements a closure may produce.
pub const DEFAULT_GROUP_LIMIT: usize = 100_000;

/// Largest ground set a [`Subset`] bitmask can address.
pub const MAX_GROUND_SIZE: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group closure exceeds the element limit {limit}")]
    GroupTooLarge { limit: usize },
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("permutations act on inconsistent ground sets ({left} vs {right})")]
    InconsistentGroundSize { left: usize, right: usize },
    #[error("image array {images:?} is not a bijection of {{0, …, {degree}−1}}")]
    NotABijection { images: Vec<usize>, degree: usize },
    #[error("ground size {size} exceeds the supported maximum {max}")]
    GroundTooLarge { size: usize, max: usize },
    #[error("point {point} is out of range for ground size {degree}")]
    PointOutOfRange { point: usize, degree: usize },
}

/// A permutation of `{0, …, n−1}`, stored by its image array.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from its image array, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self, GroupError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            if y >= n || seen[y] {
                return Err(GroupError::NotABijection { images, degree: n });
            }
            seen[y] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds the permutation with the given disjoint cycles on `0..n`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, GroupError> {
        let mut images: Vec<usize> = (0..n).collect();
        for cycle in cycles {
            for window in 0..cycle.len() {
                let from = cycle[window];
                let to = cycle[(window + 1) % cycle.len()];
                if from >= n || to >= n {
                    return Err(GroupError::PointOutOfRange {
                        point: from.max(to),
                        degree: n,
                    });
                }
                images[from] = to;
            }
        }
        Permutation::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Composition `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: other.images.iter().map(|&y| self.images[y]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y] = x;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// True if `self ∘ other == other ∘ self`.
    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.compose(other) == other.compose(self)
    }

    /// Multiset of cycle lengths, sorted. Conjugation-invariant.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x];
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable();
        lengths
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.images)
    }
}

/// A subset of the ground set, stored as a bitmask.
///
/// The mask width is not stored; operations that need the ground size take
/// it from the acting group.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset {
    mask: u64,
}

impl Subset {
    pub const EMPTY: Subset = Subset { mask: 0 };

    pub fn from_mask(mask: u64) -> Self {
        Subset { mask }
    }

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_GROUND_SIZE);
        if n == MAX_GROUND_SIZE {
            Subset { mask: u64::MAX }
        } else {
            Subset {
                mask: (1u64 << n) - 1,
            }
        }
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        let mut mask = 0u64;
        for &i in indices {
            debug_assert!(i < MAX_GROUND_SIZE);
            mask |= 1 << i;
        }
        Subset { mask }
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn contains(&self, i: usize) -> bool {
        i < MAX_GROUND_SIZE && self.mask & (1 << i) != 0
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < MAX_GROUND_SIZE);
        self.mask |= 1 << i;
    }

    pub fn card(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn intersect(&self, other: &Subset) -> Subset {
        Subset {
            mask: self.mask & other.mask,
        }
    }

    pub fn union(&self, other: &Subset) -> Subset {
        Subset {
            mask: self.mask | other.mask,
        }
    }

    /// Members in increasing order.
    pub fn indices(&self) -> Vec<usize> {
        (0..MAX_GROUND_SIZE).filter(|&i| self.contains(i)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..MAX_GROUND_SIZE).filter(move |&i| self.contains(i))
    }

    /// Image `{γ(i) : i ∈ self}` under a permutation.
    pub fn apply(&self, gamma: &Permutation) -> Subset {
        let mut mask = 0u64;
        for i in 0..gamma.degree() {
            if self.contains(i) {
                mask |= 1 << gamma.apply(i);
            }
        }
        Subset { mask }
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subset{:?}", self.indices())
    }
}

/// Breadth-first closure of a generator list under composition.
///
/// The result is deduplicated and sorted lexicographically by image array,
/// so identical inputs always yield identical element orderings. Errors with
/// [`GroupError::GroupTooLarge`] as soon as the closure exceeds `limit`.
pub fn close(generators: &[Permutation], limit: usize) -> Result<Vec<Permutation>, GroupError> {
    if generators.is_empty() {
        return Err(GroupError::EmptyGenerators);
    }
    let n = generators[0].degree();
    for g in generators {
        if g.degree() != n {
            return Err(GroupError::InconsistentGroundSize {
                left: n,
                right: g.degree(),
            });
        }
    }
    let mut seen: std::collections::HashSet<Permutation> = std::collections::HashSet::new();
    let mut queue: std::collections::VecDeque<Permutation> = std::collections::VecDeque::new();
    let identity = Permutation::identity(n);
    seen.insert(identity.clone());
    queue.push_back(identity);
    while let Some(current) = queue.pop_front() {
        for g in generators {
            let next = g.compose(&current);
            if !seen.contains(&next) {
                if seen.len() >= limit {
                    return Err(GroupError::GroupTooLarge { limit });
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    let mut elements: Vec<Permutation> = seen.into_iter().collect();
    elements.sort();
    Ok(elements)
}

/// A finite permutation group with its full element list materialized.
#[derive(Clone, PartialEq, Eq)]
pub struct PermGroup {
    ground_size: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
}

impl PermGroup {
    /// Generates the group, materializing the closure up to `limit`.
    pub fn generate(generators: Vec<Permutation>, limit: usize) -> Result<Self, GroupError> {
        if let Some(g) = generators.first() {
            if g.degree() > MAX_GROUND_SIZE {
                return Err(GroupError::GroundTooLarge {
                    size: g.degree(),
                    max: MAX_GROUND_SIZE,
                });
            }
        }
        let elements = close(&generators, limit)?;
        Ok(PermGroup {
            ground_size: generators[0].degree(),
            generators,
            elements,
        })
    }

    /// The trivial group on `n` points.
    pub fn trivial(n: usize) -> Self {
        PermGroup {
            ground_size: n,
            generators: vec![Permutation::identity(n)],
            elements: vec![Permutation::identity(n)],
        }
    }

    /// Wraps an explicit element list (already closed) as a group whose
    /// generator list is the element list itself. Used for stabilizers.
    fn from_closed_elements(n: usize, mut elements: Vec<Permutation>) -> Self {
        elements.sort();
        elements.dedup();
        PermGroup {
            ground_size: n,
            generators: elements.clone(),
            elements,
        }
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_transitive(&self) -> bool {
        self.ground_size > 0 && orbit_of_point(self, 0).len() == self.ground_size
    }

    /// Conjugate group `c · self · c⁻¹`.
    pub fn conjugate(&self, c: &Permutation) -> PermGroup {
        let cinv = c.inverse();
        let elements = self
            .elements
            .iter()
            .map(|g| c.compose(g).compose(&cinv))
            .collect();
        PermGroup::from_closed_elements(self.ground_size, elements)
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PermGroup(n={}, order={})",
            self.ground_size,
            self.elements.len()
        )
    }
}

/// Orbit of a point, sorted increasing.
pub fn orbit_of_point(group: &PermGroup, x: usize) -> Vec<usize> {
    debug_assert!(x < group.ground_size());
    let mut in_orbit = vec![false; group.ground_size()];
    for g in group.elements() {
        in_orbit[g.apply(x)] = true;
    }
    (0..group.ground_size()).filter(|&i| in_orbit[i]).collect()
}

/// Orbit `{γ(I) : γ ∈ G}`, sorted by bitmask; the first entry is the
/// canonical representative (numerically smallest mask).
pub fn orbit_of_subset(group: &PermGroup, subset: Subset) -> Vec<Subset> {
    let mut orbit: Vec<Subset> = group.elements().iter().map(|g| subset.apply(g)).collect();
    orbit.sort();
    orbit.dedup();
    orbit
}

/// Canonical representative of the orbit of `subset` (smallest mask).
pub fn canonical_subset(group: &PermGroup, subset: Subset) -> Subset {
    group
        .elements()
        .iter()
        .map(|g| subset.apply(g))
        .min()
        .unwrap_or(subset)
}

/// Setwise stabilizer `{γ ∈ G : γ(I) = I}`, returned with its generator
/// list equal to its full element list.
pub fn setwise_stabilizer(group: &PermGroup, subset: Subset) -> PermGroup {
    let elements: Vec<Permutation> = group
        .elements()
        .iter()
        .filter(|g| subset.apply(g) == subset)
        .cloned()
        .collect();
    PermGroup::from_closed_elements(group.ground_size(), elements)
}

/// Pointwise stabilizer of a single point.
pub fn point_stabilizer(group: &PermGroup, x: usize) -> PermGroup {
    let elements: Vec<Permutation> = group
        .elements()
        .iter()
        .filter(|g| g.apply(x) == x)
        .cloned()
        .collect();
    PermGroup::from_closed_elements(group.ground_size(), elements)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: usize) -> PermGroup {
        let images: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        PermGroup::generate(
            vec![Permutation::from_images(images).unwrap()],
            DEFAULT_GROUP_LIMIT,
        )
        .unwrap()
    }

    fn symmetric3() -> PermGroup {
        PermGroup::generate(
            vec![
                Permutation::from_images(vec![1, 0, 2]).unwrap(),
                Permutation::from_images(vec![1, 2, 0]).unwrap(),
            ],
            DEFAULT_GROUP_LIMIT,
        )
        .unwrap()
    }

    #[test]
    fn closure_orders() {
        assert_eq!(cyclic(3).order(), 3);
        assert_eq!(symmetric3().order(), 6);
        let trivial = PermGroup::generate(vec![Permutation::identity(4)], 10).unwrap();
        assert_eq!(trivial.order(), 1);
    }

    #[test]
    fn closure_respects_limit() {
        let gens = vec![
            Permutation::from_images(vec![1, 0, 2]).unwrap(),
            Permutation::from_images(vec![1, 2, 0]).unwrap(),
        ];
        assert_eq!(
            close(&gens, 5).unwrap_err(),
            GroupError::GroupTooLarge { limit: 5 }
        );
    }

    #[test]
    fn closure_rejects_bad_input() {
        assert!(matches!(
            close(&[], 10).unwrap_err(),
            GroupError::EmptyGenerators
        ));
        let gens = vec![Permutation::identity(2), Permutation::identity(3)];
        assert!(matches!(
            close(&gens, 10).unwrap_err(),
            GroupError::InconsistentGroundSize { .. }
        ));
        assert!(Permutation::from_images(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn point_orbits() {
        assert_eq!(orbit_of_point(&cyclic(3), 0), vec![0, 1, 2]);
        let trivial = PermGroup::trivial(3);
        assert_eq!(orbit_of_point(&trivial, 1), vec![1]);
        let swap01 = PermGroup::generate(
            vec![Permutation::from_images(vec![1, 0, 2, 3]).unwrap()],
            10,
        )
        .unwrap();
        assert_eq!(orbit_of_point(&swap01, 2), vec![2]);
    }

    #[test]
    fn subset_orbits() {
        // S3 on {0,1}: the three 2-subsets. Checked against the explicit
        // six-element list of S3.
        let orbit = orbit_of_subset(&symmetric3(), Subset::from_indices(&[0, 1]));
        let expected: Vec<Subset> = vec![
            Subset::from_indices(&[0, 1]),
            Subset::from_indices(&[0, 2]),
            Subset::from_indices(&[1, 2]),
        ];
        assert_eq!(orbit, expected);

        // Empty set is fixed by everything.
        assert_eq!(
            orbit_of_subset(&symmetric3(), Subset::EMPTY),
            vec![Subset::EMPTY]
        );

        // C5 on {0,1}: the five cyclic shifts {i, i+1 mod 5}.
        let orbit = orbit_of_subset(&cyclic(5), Subset::from_indices(&[0, 1]));
        let expected: Vec<Subset> = [[0usize, 1], [1, 2], [2, 3], [3, 4], [0, 4]]
            .iter()
            .map(|pair| Subset::from_indices(pair))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        assert_eq!(orbit, expected);
    }

    #[test]
    fn stabilizers() {
        // S3 stabilizing {0,1}: identity and the transposition (0 1).
        let stab = setwise_stabilizer(&symmetric3(), Subset::from_indices(&[0, 1]));
        assert_eq!(stab.order(), 2);
        assert!(stab.contains(&Permutation::from_images(vec![1, 0, 2]).unwrap()));

        // Everything stabilizes the full set.
        let g = symmetric3();
        assert_eq!(setwise_stabilizer(&g, Subset::full(3)).order(), g.order());

        // Regular C3 action: no nonidentity element fixes a point.
        let stab = setwise_stabilizer(&cyclic(3), Subset::from_indices(&[0]));
        assert_eq!(stab.order(), 1);
    }

    #[test]
    fn orbit_stabilizer_identity_exhaustive() {
        for group in [cyclic(3), cyclic(5), symmetric3(), cyclic(6)] {
            let n = group.ground_size();
            for mask in 0..(1u64 << n) {
                let subset = Subset::from_mask(mask);
                let orbit = orbit_of_subset(&group, subset);
                let stab = setwise_stabilizer(&group, subset);
                assert_eq!(orbit.len() * stab.order(), group.order());
            }
        }
    }

    #[test]
    fn determinism() {
        let a = symmetric3();
        let b = symmetric3();
        assert_eq!(a.elements(), b.elements());
        let orbit_a = orbit_of_subset(&a, Subset::from_indices(&[0, 1]));
        let orbit_b = orbit_of_subset(&b, Subset::from_indices(&[0, 1]));
        assert_eq!(orbit_a, orbit_b);
    }

    #[test]
    fn compose_and_inverse() {
        let a = Permutation::from_images(vec![1, 2, 0]).unwrap();
        let b = Permutation::from_images(vec![1, 0, 2]).unwrap();
        // (a ∘ b)(0) = a(b(0)) = a(1) = 2
        assert_eq!(a.compose(&b).apply(0), 2);
        assert!(a.compose(&a.inverse()).is_identity());
        assert_eq!(a.cycle_type(), vec![3]);
        assert_eq!(b.cycle_type(), vec![1, 2]);
    }

    #[test]
    fn cycles_constructor() {
        let c = Permutation::from_cycles(4, &[&[0, 2], &[1, 3]]).unwrap();
        assert_eq!(c.images(), &[2, 3, 0, 1]);
        assert!(Permutation::from_cycles(3, &[&[0, 4]]).is_err());
    }
}
