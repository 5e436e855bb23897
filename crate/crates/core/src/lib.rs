//! Finite cylindric and topological cylindric algebras.
//!
//! The crate builds finite atom structures (square set frames, rainbow
//! structures, blow-up-and-blur products, relation-algebra bases), decides
//! bounded atomic games on them, checks the `CA_n`/`TCA_n` axioms and searches
//! for small square or relativized representations.

pub mod algebra;
pub mod error;
pub mod games;
pub mod rablur;
pub mod rainbow;
pub mod repsearch;
pub mod toposet;

pub use algebra::{
    check_ca_axioms, check_tca_axioms, complex_algebra, dimension_set, eval_term, generated_subalgebra, neat_reduct,
    AtomStructure, AxiomReport, AxiomResult, Carrier, CheckMode, Element, FiniteBao, Relation, Status, Term,
};
pub use error::{Error, Result};
