//! Finite Boolean algebras with possibility and sufficiency operators, ternary frames and the modal logic K#.

pub mod algebra;
pub mod boolean;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod frames;
pub mod io;
pub mod logic;
pub mod mixture;
pub mod predicates;
pub mod search;

pub use algebra::{DerivedOp, OperatorKind, OperatorTable, PsAlgebra};
pub use boolean::{BooleanAlgebra, Congruence, Element, Filter};
pub use error::{Error, Result};
pub use frames::{FrameProperty, RelationSel, TernaryFrame, TripleSet, WorldSet};
pub use predicates::{AlgebraPredicate, PredicateReport, Witness};
