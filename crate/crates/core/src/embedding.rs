//! Representations of finite weak MIAs: into the complex algebra of the
//! one-relation special frame over the doubled canonical frame, and into the
//! complex algebra of the canonical frame itself.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::algebra::{OperatorKind, OperatorTable, PsAlgebra};
use crate::boolean::{BooleanAlgebra, Element};
use crate::error::{Error, Result};
use crate::frames::{canonical_frame, TernaryFrame, WorldSet};
use crate::logic::FrameIndex;
use crate::mixture::special_frame;
use crate::predicates::AlgebraPredicate as P;
use crate::predicates::{AlgebraPredicate, PredicateReport, Witness};

#[derive(Clone, Debug)]
pub struct AlgebraEmbedding {
    pub source: PsAlgebra,
    pub target: TernaryFrame,
    /// `map[x.bits()]` is the image of element `x`.
    pub map: Vec<WorldSet>,
    pub injective: bool,
    pub boolean: bool,
    pub f_commutes: bool,
    pub g_commutes: bool,
}

impl AlgebraEmbedding {
    pub fn image(&self, x: Element) -> WorldSet {
        self.map[x.bits() as usize]
    }

    pub fn verified(&self) -> bool {
        self.injective && self.boolean && self.f_commutes && self.g_commutes
    }
}

fn require_wmia(a: &PsAlgebra) -> Result<()> {
    let rep = P::WMia.check(a);
    if rep.holds {
        return Ok(());
    }
    let w = rep.element_witness().unwrap_or(&[]);
    let shown: Vec<String> = w.iter().map(|&x| a.base().show(x)).collect();
    Err(Error::Precondition(format!(
        "algebra is not a weak MIA (g ≰ f at ({}))",
        shown.join(", ")
    )))
}

/// `s(a) = {u : a ∈ u} ∪ {u′ : a ∈ u}` into the special frame of `Cf(A)`.
pub fn embed_into_3frame(a: &PsAlgebra) -> Result<AlgebraEmbedding> {
    require_wmia(a)?;
    let cf = canonical_frame(a);
    let target = special_frame(&cf)?;
    let n = a.num_atoms();
    let map = a
        .elements()
        .map(|x| WorldSet::from_bits(x.bits() | x.bits() << n))
        .collect();
    verify(a, target, map)
}

/// `a ↦ {u ∈ Ult(A) : a ∈ u}` into `Cm(Cf(A))`.
pub fn embed_algebra_into_complex_of_canonical(a: &PsAlgebra) -> Result<AlgebraEmbedding> {
    require_wmia(a)?;
    let target = canonical_frame(a);
    let map = a.elements().map(|x| WorldSet::from_bits(x.bits())).collect();
    verify(a, target, map)
}

/// Checks all element pairs; any failure is an internal error naming the pair.
fn verify(a: &PsAlgebra, target: TernaryFrame, map: Vec<WorldSet>) -> Result<AlgebraEmbedding> {
    let index = FrameIndex::new(&target);
    let all = target.all_worlds();
    let s = |x: Element| map[x.bits() as usize];
    let show = |x: Element| a.base().show(x);

    let mut seen = map.clone();
    seen.sort();
    seen.dedup();
    let injective = seen.len() == map.len();
    if !injective {
        return Err(Error::Internal("embedding map is not injective".into()));
    }
    if s(a.zero()) != WorldSet::ZERO || s(a.one()) != all {
        return Err(Error::Internal("embedding does not preserve 0 and 1".into()));
    }
    let elems: Vec<Element> = a.elements().collect();
    let bad = elems.par_iter().find_map_first(|&x| {
        if s(a.neg(x)) != all.minus(s(x)) {
            return Some(format!("complement fails at {}", show(x)));
        }
        for &y in &elems {
            if s(x | y) != (s(x) | s(y)) || s(x & y) != (s(x) & s(y)) {
                return Some(format!("Boolean operations fail at ({}, {})", show(x), show(y)));
            }
            if s(a.f(x, y)) != index.dia(s(x), s(y)) {
                return Some(format!("f does not commute at ({}, {})", show(x), show(y)));
            }
            if s(a.g(x, y)) != index.wbox(s(x), s(y)) {
                return Some(format!("g does not commute at ({}, {})", show(x), show(y)));
            }
        }
        None
    });
    if let Some(msg) = bad {
        return Err(Error::Internal(msg));
    }
    Ok(AlgebraEmbedding {
        source: a.clone(),
        target,
        map,
        injective,
        boolean: true,
        f_commutes: true,
        g_commutes: true,
    })
}

/// The subalgebra of the target's complex algebra formed by the image,
/// computed on the frame side: atoms are the minimal nonempty image sets,
/// operator tables come from `⟨R⟩` and `[[S]]` on those sets.
pub fn image_algebra(e: &AlgebraEmbedding) -> Result<PsAlgebra> {
    let index = FrameIndex::new(&e.target);
    let image: Vec<WorldSet> = e.map.clone();
    let mut atoms: Vec<WorldSet> = image
        .iter()
        .copied()
        .filter(|&x| !x.is_zero() && image.iter().all(|&y| y.is_zero() || !y.le(x) || y == x))
        .collect();
    atoms.sort_by_key(|x| x.bits().trailing_zeros());
    let decode: HashMap<WorldSet, Element> = (0..1u64 << atoms.len())
        .map(|bits| {
            let set = Element::from_bits(bits)
                .atoms()
                .fold(WorldSet::ZERO, |acc, i| acc | atoms[i]);
            (set, Element::from_bits(bits))
        })
        .collect();
    if image.iter().any(|x| !decode.contains_key(x)) {
        return Err(Error::Internal("image is not generated by its minimal sets".into()));
    }
    let lookup = |set: WorldSet, op: &str| {
        decode
            .get(&set)
            .copied()
            .ok_or_else(|| Error::Internal(format!("image not closed under {op}")))
    };
    let k = atoms.len();
    let mut f = Vec::with_capacity(k * k);
    let mut g = Vec::with_capacity(k * k);
    for p in 0..k {
        for q in 0..k {
            f.push(lookup(index.dia(atoms[p], atoms[q]), "the possibility operator")?);
            g.push(lookup(index.wbox(atoms[p], atoms[q]), "the sufficiency operator")?);
        }
    }
    let base = BooleanAlgebra::new(e.source.base().atom_names().to_vec())?;
    let alg = PsAlgebra::new(
        base,
        OperatorTable::new(OperatorKind::Possibility, k, f)?,
        OperatorTable::new(OperatorKind::Sufficiency, k, g)?,
    )?;
    let elems: Vec<Element> = alg.elements().collect();
    for &x in &elems {
        for &y in &elems {
            let img = |z: Element| z.atoms().fold(WorldSet::ZERO, |acc, i| acc | atoms[i]);
            if img(alg.f(x, y)) != index.dia(img(x), img(y)) || img(alg.g(x, y)) != index.wbox(img(x), img(y)) {
                return Err(Error::Internal("image operators are not determined by atoms".into()));
            }
        }
    }
    Ok(alg)
}

/// Runs `suite` on the source and on the image subalgebra; holds iff every
/// verdict agrees. The witness names the first predicate that differs.
pub fn equations_hold_in_image(e: &AlgebraEmbedding, suite: &[AlgebraPredicate]) -> Result<PredicateReport> {
    let img = image_algebra(e)?;
    for &p in suite {
        let src = p.holds(&e.source);
        if src != p.holds(&img) {
            return Ok(PredicateReport::fails(
                "equations-in-image",
                Witness::Disagreement {
                    formula: p.id().to_string(),
                    true_in_left: src,
                },
            ));
        }
    }
    Ok(PredicateReport::holds("equations-in-image"))
}
