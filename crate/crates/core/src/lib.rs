//! Bisimulation on finite labelled transition systems and pointmass
//! nondeterministic labelled Markov processes, ordinal ranks, isomorphism of
//! well-founded trees, and the B-tree reduction of eventual equality.

pub mod dot;
pub mod e0;
pub mod expansion;
pub mod foundations;
pub mod io;
pub mod lts;
pub mod nlmp;
pub mod rel;
pub mod substructure;
pub mod treeiso;
pub mod trees;
pub mod uniform;
pub mod verify;

pub use foundations::{Count, EpSet, FoundationError, OrdinalCnf, Rank, Rational};
pub use lts::{ModalFormula, OmegaLtsCode, PointedLts};
pub use nlmp::{PointmassNlmp, SubProbMeasure};
pub use rel::Rel;
pub use treeiso::CanonicalForm;
pub use trees::{ExplicitTree, MultiTree, SymbolicTree};
pub use uniform::UniformStructure;
