//! The copying construction: a frame doubled with a tagged copy of itself,
//! cells of tag variants, the mixture operator `m`, and the special frame.
//!
//! In a doubled frame over `n` base worlds, world `w` with tag `t` has index
//! `w + t·n`; copies are named with a trailing prime.

use std::fmt;

use crate::error::{Error, Result};
use crate::frames::{TernaryFrame, Triple, TripleSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DoubledWorld {
    pub base: usize,
    /// 0 for the original, 1 for the copy.
    pub tag: u8,
}

impl DoubledWorld {
    pub fn original(base: usize) -> Self {
        DoubledWorld { base, tag: 0 }
    }

    pub fn copy(base: usize) -> Self {
        DoubledWorld { base, tag: 1 }
    }

    pub fn from_index(index: usize, n: usize) -> Self {
        DoubledWorld {
            base: index % n,
            tag: (index >= n) as u8,
        }
    }

    pub fn index(self, n: usize) -> usize {
        self.base + self.tag as usize * n
    }

    /// Tag erasure.
    pub fn j(self) -> usize {
        self.base
    }

    /// `i`: original to copy. Copies are left alone.
    pub fn i(self) -> Self {
        DoubledWorld::copy(self.base)
    }

    pub fn name(self, base_names: &[String]) -> String {
        let mut s = base_names[self.base].clone();
        if self.tag == 1 {
            s.push('\'');
        }
        s
    }
}

/// `c(x,y,z)`: the eight tag variants of a base triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub base: Triple,
}

impl Cell {
    /// Members as doubled-frame indices, tag bits `(s,t,u)` counting up
    /// with `s` fastest.
    pub fn members(self, n: usize) -> [Triple; 8] {
        let [x, y, z] = self.base;
        std::array::from_fn(|k| {
            let tag = |bit: usize| (k >> bit & 1) * n;
            [x + tag(0), y + tag(1), z + tag(2)]
        })
    }
}

fn doubled_names(frame: &TernaryFrame) -> Vec<String> {
    let names = frame.worlds();
    let mut out: Vec<String> = names.to_vec();
    out.extend(names.iter().map(|w| format!("{w}'")));
    out
}

/// Lifts base triples onto the original or the copied half.
fn embed_pure(rel: &TripleSet, tag: usize) -> impl Iterator<Item = Triple> + '_ {
    let n = rel.num_worlds();
    rel.iter().map(move |[a, b, c]| [a + tag * n, b + tag * n, c + tag * n])
}

/// `R ∪ R′` and `S ∪ S′` as relations on the doubled world set.
fn pure_union(rel: &TripleSet) -> TripleSet {
    let n = rel.num_worlds();
    TripleSet::from_triples(2 * n, embed_pure(rel, 0).chain(embed_pure(rel, 1)))
}

/// `F ⊎ F′`.
pub fn double(frame: &TernaryFrame) -> TernaryFrame {
    TernaryFrame::new(doubled_names(frame), pure_union(frame.r()), pure_union(frame.s()))
        .expect("doubled names are unique when base names are")
}

/// Whether every coordinate of every triple lies on the same half.
pub fn is_pure(rel: &TripleSet, n: usize) -> bool {
    rel.iter()
        .all(|t| t.iter().all(|&w| w < n) || t.iter().all(|&w| w >= n))
}

/// `m(P)`: the union of the cells of `P`. `P` must be a relation on the base
/// worlds.
pub fn mixture(n: usize, p: &TripleSet) -> Result<TripleSet> {
    if p.num_worlds() != n {
        return Err(Error::Usage(format!(
            "mixture expects triples over the {n} original worlds, got a relation on {}",
            p.num_worlds()
        )));
    }
    let mut out = TripleSet::empty(2 * n);
    for base in p.iter() {
        for t in (Cell { base }).members(n) {
            out.insert(t);
        }
    }
    Ok(out)
}

/// `m(P)` for `P` given on the doubled world set; every triple must be
/// original-only, otherwise a usage error names the offender.
pub fn mixture_of_doubled(n: usize, p: &TripleSet) -> Result<TripleSet> {
    if p.num_worlds() != 2 * n {
        return Err(Error::Usage("relation is not on the doubled world set".into()));
    }
    if let Some(t) = p.iter().find(|t| t.iter().any(|&w| w >= n)) {
        return Err(Error::Usage(format!(
            "mixture input {t:?} is not a triple of original worlds"
        )));
    }
    let base = TripleSet::from_triples(n, p.iter());
    mixture(n, &base)
}

/// Coordinate-wise tag erasure on doubled indices.
pub fn j_project(t: Triple, n: usize) -> Triple {
    t.map(|w| w % n)
}

fn cell_of(t: Triple, n: usize) -> Cell {
    Cell { base: j_project(t, n) }
}

/// The special frame `⟨W̲, R̲, S̲⟩` built from a wMIA frame.
///
/// `R̲ := m(S) ∪ [m(R∖S) ∖ (R∪R′)]` and `S̲` is the complement of
/// `m(−R) ∪ [(R∪R′) ∖ (S∪S′)]`. The two are compared before returning.
pub fn special_frame(frame: &TernaryFrame) -> Result<TernaryFrame> {
    let (r_und, s_und) = special_relations(frame)?;
    if r_und != s_und {
        let t = r_und.difference(&s_und).union(&s_und.difference(&r_und)).iter().next();
        return Err(Error::Internal(format!(
            "copying construction produced R̲ ≠ S̲ (first difference at {t:?})"
        )));
    }
    TernaryFrame::new_special(doubled_names(frame), r_und)
}

/// `(R̲, S̲)` computed independently by the two defining formulas.
pub fn special_relations(frame: &TernaryFrame) -> Result<(TripleSet, TripleSet)> {
    if !frame.is_wmia() {
        let t = frame.s().difference(frame.r()).iter().next().expect("S ⊄ R");
        return Err(Error::Precondition(format!(
            "copying construction needs S ⊆ R; {} is in S but not R",
            frame.show_triple(t)
        )));
    }
    let n = frame.num_worlds();
    let (r, s) = (frame.r(), frame.s());
    let rr = pure_union(r);
    let ss = pure_union(s);
    let r_und = mixture(n, s)?.union(&mixture(n, &r.difference(s))?.difference(&rr));
    let neg_s_und = mixture(n, &r.complement())?.union(&rr.difference(&ss));
    Ok((r_und, neg_s_und.complement()))
}

/// Checks that the cells partition the doubled cube: each of the `(2n)³`
/// triples lies in exactly one cell.
pub fn cells_partition(n: usize) -> bool {
    let mut hits = vec![0u8; 8 * n * n * n];
    let index = |[a, b, c]: Triple| (a * 2 * n + b) * 2 * n + c;
    for base in TripleSet::full(n).iter() {
        for t in (Cell { base }).members(n) {
            hits[index(t)] += 1;
        }
    }
    hits.iter().all(|&h| h == 1)
}

/// The first m-law that fails for `p` and `q`, if any.
pub fn m_property_failure(n: usize, p: &TripleSet, q: &TripleSet) -> Result<Option<&'static str>> {
    let m = |x: &TripleSet| mixture(n, x);
    let mp = m(p)?;
    let mq = m(q)?;
    let p_doubled = TripleSet::from_triples(2 * n, p.iter());
    let p_copy = TripleSet::from_triples(2 * n, embed_pure(p, 1));
    let checks = [
        ("m(P) = m(P') = m(P ∪ P')", {
            let cells = |x: &TripleSet| TripleSet::from_triples(2 * n, x.iter().flat_map(|t| cell_of(t, n).members(n)));
            mp == cells(&p_copy) && mp == cells(&p_doubled.union(&p_copy))
        }),
        (
            "P ⊊ m(P)",
            p.is_empty() || (p_doubled.is_subset(&mp) && p_doubled != mp),
        ),
        ("monotone", !p.is_subset(q) || mp.is_subset(&mq)),
        ("complement", mp.complement() == m(&p.complement())?),
        ("meet", m(&p.intersection(q))? == mp.intersection(&mq)),
        ("join", m(&p.union(q))? == mp.union(&mq)),
    ];
    Ok(checks.into_iter().find(|(_, ok)| !ok).map(|(name, _)| name))
}

/// Cell containing a doubled triple.
pub fn cell_containing(t: Triple, n: usize) -> Cell {
    cell_of(t, n)
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.base;
        write!(f, "c({x},{y},{z})")
    }
}
