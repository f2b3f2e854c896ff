//! Computational universal algebra on finite universes: dense-table
//! operations and relations, clone enumeration by closure, algebraic sets and
//! the delta-relation criterion for equational additivity, congruence
//! lattices and the term-condition commutator, and catalogs of named
//! operation families with a claim-verification registry.

pub mod alggeo;
pub mod atlas;
pub mod clones;
pub mod conlat;
pub mod finalg;

pub use finalg::{delta3, delta4, El, FiniteAlgebra, OpTable, Relation};
