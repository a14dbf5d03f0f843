//! The underline model and bounded modal equivalence.

use super::formula::Formula;
use super::semantics::Model;
use crate::error::Result;
use crate::frames::WorldSet;
use crate::mixture::special_frame;
use crate::predicates::{PredicateReport, Witness};

/// `M̲ = ⟨special frame of F, v̲⟩` with `v̲(p) = v(p) ∪ v(p)′`.
pub fn underline_model(m: &Model) -> Result<Model> {
    let frame = special_frame(m.frame())?;
    let n = m.frame().num_worlds();
    let valuation = m
        .valuation()
        .iter()
        .map(|v| *v | WorldSet::from_bits(v.bits() << n))
        .collect();
    Model::new(frame, valuation)
}

/// Compares global truth of each formula in `left` and `right`. The witness
/// is the first formula on which they disagree.
pub fn modal_equiv<'a>(
    left: &Model,
    right: &Model,
    formulas: impl IntoIterator<Item = &'a Formula>,
) -> Result<PredicateReport> {
    for phi in formulas {
        let l = left.globally_true(phi)?;
        if l != right.globally_true(phi)? {
            return Ok(PredicateReport::fails(
                "modal-equivalence",
                Witness::Disagreement {
                    formula: phi.render_sugared(),
                    true_in_left: l,
                },
            ));
        }
    }
    Ok(PredicateReport::holds("modal-equivalence"))
}
