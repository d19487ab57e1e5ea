//! Exact machinery for classifying one-dimensional Shimura subvarieties of
//! the moduli space A_g of polarized abelian varieties.
//!
//! Number fields enter only through their Galois combinatorics: a totally
//! real field F is a transitive permutation action on its embedding set, a
//! CM field E additionally carries a fixed-point-free commuting involution
//! (complex conjugation), and the quaternion algebra D over F is described
//! by its local Brauer invariants in ½ℤ/ℤ. Everything downstream — orbit
//! enumeration, corestriction invariants, partial CM types and their
//! primitivity tests, multiplication types, central-torus lattices, and the
//! two constructions that produce classification records — is exact integer
//! and bit-set arithmetic. No floating point is used anywhere.

pub mod brauer;
pub mod classify;
pub mod cmtypes;
pub mod fieldmodel;
pub mod intlattice;
pub mod orbitrep;
pub mod permgroup;
