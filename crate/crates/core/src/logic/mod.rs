//! The logic K#: syntax, semantics over ternary frames, axioms.

mod axioms;
mod equivalence;
mod formula;
mod parser;
mod semantics;

pub use axioms::{
    axiom_instances, formula_pool, soundness_report, soundness_report_naive, soundness_report_unchecked, Schema,
    SchemaVerdict, SoundnessFailure, SoundnessReport, MAX_POOL,
};
pub use equivalence::{modal_equiv, underline_model};
pub use formula::Formula;
pub use parser::parse;
pub use semantics::{
    decode_valuation, valid_in_frame, valid_in_frame_unchecked, valuation_count, FrameIndex, Model, DEFAULT_BUDGET,
};
