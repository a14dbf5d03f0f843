//! Finite frames `⟨W, R, S⟩` with two ternary relations, their complex
//! algebras, and canonical frames of PS-algebras.
//!
//! Convention used everywhere: in a triple `(x, z, y)` the world at which an
//! operator is evaluated sits in the MIDDLE. `⟨R⟩(X,Y)` collects the `z` with
//! some `(x, z, y) ∈ R`, `x ∈ X`, `y ∈ Y`.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{OperatorKind, OperatorTable, PsAlgebra};
use crate::boolean::{BooleanAlgebra, Element, Filter, MAX_ATOMS};
use crate::error::{Error, Result};
use crate::predicates::{PredicateReport, Witness};

/// A set of worlds, bit `i` for world `i`.
pub type WorldSet = Element;

pub type Triple = [usize; 3];

pub const MAX_WORLDS: usize = 64;

/// Subset of `W³` as a dense bitset, indexed `(a·n + b)·n + c`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TripleSet {
    n: usize,
    words: Vec<u64>,
}

impl fmt::Debug for TripleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl TripleSet {
    pub fn empty(n: usize) -> Self {
        TripleSet {
            n,
            words: vec![0; (n * n * n).div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut t = Self::empty(n);
        let total = n * n * n;
        for (k, w) in t.words.iter_mut().enumerate() {
            let lo = k * 64;
            let count = total.saturating_sub(lo).min(64);
            *w = if count == 64 { u64::MAX } else { (1u64 << count) - 1 };
        }
        t
    }

    pub fn from_triples(n: usize, triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut t = Self::empty(n);
        for tr in triples {
            t.insert(tr);
        }
        t
    }

    /// Builds from the low `n³` bits of `mask` (requires `n³ ≤ 64`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        debug_assert!(n * n * n <= 64);
        let mut t = Self::empty(n);
        if let Some(w) = t.words.first_mut() {
            *w = mask;
        }
        t
    }

    pub fn num_worlds(&self) -> usize {
        self.n
    }

    fn index(&self, [a, b, c]: Triple) -> usize {
        (a * self.n + b) * self.n + c
    }

    pub fn contains(&self, t: Triple) -> bool {
        let i = self.index(t);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, t: Triple) {
        debug_assert!(t.iter().all(|&w| w < self.n));
        let i = self.index(t);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, t: Triple) {
        let i = self.index(t);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        let n = self.n;
        self.words.iter().enumerate().flat_map(move |(k, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let i = k * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some([i / (n * n), i / n % n, i % n])
            })
        })
    }

    fn zip(&self, other: &TripleSet, op: impl Fn(u64, u64) -> u64) -> TripleSet {
        assert_eq!(self.n, other.n, "triple sets over different world sets");
        TripleSet {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| op(a, b)).collect(),
        }
    }

    pub fn union(&self, other: &TripleSet) -> TripleSet {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &TripleSet) -> TripleSet {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &TripleSet) -> TripleSet {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> TripleSet {
        TripleSet::full(self.n).difference(self)
    }

    pub fn is_subset(&self, other: &TripleSet) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(&a, &b)| a & !b == 0)
    }

    /// `(c, b, a)` for every `(a, b, c)`.
    pub fn converse(&self) -> TripleSet {
        TripleSet::from_triples(self.n, self.iter().map(|[a, b, c]| [c, b, a]))
    }
}

/// `⟨R⟩(X,Y) = {z : (X × {z} × Y) ∩ R ≠ ∅}`
pub fn poss(rel: &TripleSet, x: WorldSet, y: WorldSet) -> WorldSet {
    rel.iter()
        .filter(|&[a, _, c]| x.has_atom(a) && y.has_atom(c))
        .fold(WorldSet::ZERO, |acc, [_, b, _]| acc | WorldSet::singleton(b))
}

/// `[[S]](X,Y) = {z : X × {z} × Y ⊆ S}`
pub fn suff(rel: &TripleSet, x: WorldSet, y: WorldSet) -> WorldSet {
    let n = rel.num_worlds();
    (0..n)
        .filter(|&z| x.atoms().all(|a| y.atoms().all(|c| rel.contains([a, z, c]))))
        .fold(WorldSet::ZERO, |acc, z| acc | WorldSet::singleton(z))
}

pub fn default_world_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("w{i}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryFrame {
    worlds: Vec<String>,
    r: TripleSet,
    s: TripleSet,
    special: bool,
}

impl TernaryFrame {
    pub fn new(worlds: Vec<String>, r: TripleSet, s: TripleSet) -> Result<Self> {
        validate_world_names(&worlds)?;
        let n = worlds.len();
        if r.num_worlds() != n || s.num_worlds() != n {
            return Err(Error::Format("relations sized for a different world set".into()));
        }
        Ok(TernaryFrame {
            worlds,
            r,
            s,
            special: false,
        })
    }

    /// A frame with `R = S`.
    pub fn new_special(worlds: Vec<String>, rel: TripleSet) -> Result<Self> {
        let mut f = Self::new(worlds, rel.clone(), rel)?;
        f.special = true;
        Ok(f)
    }

    pub fn with_default_names(r: TripleSet, s: TripleSet) -> Result<Self> {
        Self::new(default_world_names(r.num_worlds()), r, s)
    }

    /// Builds from name triples.
    pub fn from_named<S: AsRef<str>>(worlds: &[S], r: &[[S; 3]], s: &[[S; 3]]) -> Result<Self> {
        let names: Vec<String> = worlds.iter().map(|w| w.as_ref().to_string()).collect();
        let lookup = |w: &S| -> Result<usize> {
            names
                .iter()
                .position(|n| n == w.as_ref())
                .ok_or_else(|| Error::Format(format!("undeclared world `{}`", w.as_ref())))
        };
        let build = |rel: &[[S; 3]]| -> Result<TripleSet> {
            let mut t = TripleSet::empty(names.len());
            for [a, b, c] in rel {
                t.insert([lookup(a)?, lookup(b)?, lookup(c)?]);
            }
            Ok(t)
        };
        let (r, s) = (build(r)?, build(s)?);
        Self::new(names, r, s)
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn num_worlds(&self) -> usize {
        self.worlds.len()
    }

    pub fn r(&self) -> &TripleSet {
        &self.r
    }

    pub fn s(&self) -> &TripleSet {
        &self.s
    }

    pub fn is_special(&self) -> bool {
        self.special
    }

    pub fn is_wmia(&self) -> bool {
        self.s.is_subset(&self.r)
    }

    pub fn all_worlds(&self) -> WorldSet {
        WorldSet::from_bits(if self.num_worlds() == 64 {
            u64::MAX
        } else {
            (1u64 << self.num_worlds()) - 1
        })
    }

    pub fn relation(&self, sel: RelationSel) -> TripleSet {
        match sel {
            RelationSel::R => self.r.clone(),
            RelationSel::S => self.s.clone(),
            RelationSel::T => self.r.union(&self.s.complement()),
        }
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn world_set_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<WorldSet> {
        names.iter().try_fold(WorldSet::ZERO, |acc, n| {
            let i = self
                .world_index(n.as_ref())
                .ok_or_else(|| Error::Format(format!("undeclared world `{}`", n.as_ref())))?;
            Ok(acc | WorldSet::singleton(i))
        })
    }

    pub fn world_names(&self, set: WorldSet) -> Vec<String> {
        set.atoms().map(|i| self.worlds[i].clone()).collect()
    }

    pub fn show_triple(&self, [a, b, c]: Triple) -> String {
        format!("({},{},{})", self.worlds[a], self.worlds[b], self.worlds[c])
    }
}

pub(crate) fn validate_world_names(worlds: &[String]) -> Result<()> {
    if worlds.is_empty() {
        return Err(Error::Format("a frame needs at least one world".into()));
    }
    if worlds.len() > MAX_WORLDS {
        return Err(Error::Format(format!("more than {MAX_WORLDS} worlds")));
    }
    for (i, w) in worlds.iter().enumerate() {
        if w.is_empty() {
            return Err(Error::Format("empty world name".into()));
        }
        if worlds[..i].contains(w) {
            return Err(Error::Format(format!("duplicate world `{w}`")));
        }
    }
    Ok(())
}

/// Which relation of a frame a property is checked on. `T` is `R ∪ −S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelationSel {
    R,
    S,
    T,
}

impl FromStr for RelationSel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" | "r" => Ok(RelationSel::R),
            "S" | "s" => Ok(RelationSel::S),
            "T" | "t" => Ok(RelationSel::T),
            _ => Err(Error::Usage(format!("unknown relation `{s}` (expected R, S or T)"))),
        }
    }
}

impl fmt::Display for RelationSel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationSel::R => "R",
            RelationSel::S => "S",
            RelationSel::T => "T",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrameProperty {
    Bt0,
    Bt1,
    Bt2,
    Bt3,
    Btw,
    Bt2s,
    T1,
    T2,
    T3,
    WMia,
}

impl FrameProperty {
    pub const ALL: &'static [FrameProperty] = &[
        FrameProperty::Bt0,
        FrameProperty::Bt1,
        FrameProperty::Bt2,
        FrameProperty::Bt3,
        FrameProperty::Btw,
        FrameProperty::Bt2s,
        FrameProperty::T1,
        FrameProperty::T2,
        FrameProperty::T3,
        FrameProperty::WMia,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FrameProperty::Bt0 => "bt0",
            FrameProperty::Bt1 => "bt1",
            FrameProperty::Bt2 => "bt2",
            FrameProperty::Bt3 => "bt3",
            FrameProperty::Btw => "btw",
            FrameProperty::Bt2s => "bt2s",
            FrameProperty::T1 => "t1",
            FrameProperty::T2 => "t2",
            FrameProperty::T3 => "t3",
            FrameProperty::WMia => "wmia",
        }
    }
}

impl FromStr for FrameProperty {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FrameProperty::ALL
            .iter()
            .copied()
            .find(|p| p.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownPredicate(s.trim().to_string()))
    }
}

impl fmt::Display for FrameProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// All triples with the first coordinate varying fastest: `(a,b,c)` precedes
/// `(a',b',c')` iff `(c,b,a) < (c',b',a')` lexicographically.
fn colex_triples(n: usize) -> impl Iterator<Item = Triple> {
    (0..n * n * n).map(move |i| [i % n, i / n % n, i / (n * n)])
}

/// Checks a single-relation property. Tuples are searched with the first
/// coordinate varying fastest; the witness is the first violating tuple.
pub fn check_relation_property(rel: &TripleSet, prop: FrameProperty) -> Result<PredicateReport> {
    let n = rel.num_worlds();
    let t = |x: Triple| rel.contains(x);
    let fail = |w: Vec<usize>| Ok(PredicateReport::fails(prop.id(), Witness::Worlds(w)));
    match prop {
        FrameProperty::Bt0 | FrameProperty::T1 => {
            if let Some(a) = (0..n).find(|&a| !t([a, a, a])) {
                return fail(vec![a, a, a]);
            }
        }
        FrameProperty::Bt1 | FrameProperty::T2 => {
            if let Some([a, b, c]) = colex_triples(n).find(|&[a, b, c]| t([a, b, c]) && !t([c, b, a])) {
                return fail(vec![a, b, c]);
            }
        }
        FrameProperty::Bt2 => {
            if let Some([a, b, c]) = colex_triples(n).find(|&[a, b, c]| t([a, b, c]) && !t([a, a, b])) {
                return fail(vec![a, b, c]);
            }
        }
        FrameProperty::Bt3 => {
            if let Some([a, b, c]) = colex_triples(n).find(|&[a, b, c]| b != c && t([a, b, c]) && t([a, c, b])) {
                return fail(vec![a, b, c]);
            }
        }
        FrameProperty::Btw => {
            if let Some(i) = (0..n * n).find(|&i| i % n != i / n && t([i % n, i / n, i % n])) {
                return fail(vec![i % n, i / n, i % n]);
            }
        }
        FrameProperty::Bt2s => {
            if let Some(i) = (0..n * n).find(|&i| !t([i % n, i % n, i / n])) {
                return fail(vec![i % n, i % n, i / n]);
            }
        }
        FrameProperty::T3 => {
            if let Some(w) = t3_violation(rel) {
                return fail(w);
            }
        }
        FrameProperty::WMia => {
            return Err(Error::Usage(
                "wmia relates two relations; use check_frame_property".into(),
            ))
        }
    }
    Ok(PredicateReport::holds(prop.id()))
}

/// Premises `T(x_i, y, z_i)` for i = 1..3 demand `T(a,b,c)` on all of
/// `{x_1,x_2,x_3}³ ∪ {z_1,z_2,z_3}³`. Witness layout: the three premise
/// triples followed by the missing conclusion.
fn t3_violation(rel: &TripleSet) -> Option<Vec<usize>> {
    let n = rel.num_worlds();
    for y in 0..n {
        let legs: Vec<(usize, usize)> = (0..n * n)
            .map(|i| (i % n, i / n))
            .filter(|&(x, z)| rel.contains([x, y, z]))
            .collect();
        for &(x1, z1) in &legs {
            for &(x2, z2) in &legs {
                for &(x3, z3) in &legs {
                    for side in [[x1, x2, x3], [z1, z2, z3]] {
                        for [i, j, k] in colex_triples(3) {
                            let concl = [side[i], side[j], side[k]];
                            if !rel.contains(concl) {
                                let mut w = vec![x1, y, z1, x2, y, z2, x3, y, z3];
                                w.extend_from_slice(&concl);
                                return Some(w);
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

/// Property check on a frame; `wmia` compares both relations and ignores
/// `sel`. Its witness is the first triple of `S` (lexicographic) outside `R`.
pub fn check_frame_property(frame: &TernaryFrame, prop: FrameProperty, sel: RelationSel) -> Result<PredicateReport> {
    if prop == FrameProperty::WMia {
        return Ok(match frame.s.difference(&frame.r).iter().next() {
            Some(t) => PredicateReport::fails(prop.id(), Witness::Worlds(t.to_vec())),
            None => PredicateReport::holds(prop.id()),
        });
    }
    check_relation_property(&frame.relation(sel), prop)
}

/// `Cm(F) = ⟨2^W, ⟨R⟩, [[S]]⟩`, one atom per world.
pub fn complex_algebra(frame: &TernaryFrame) -> Result<PsAlgebra> {
    let n = frame.num_worlds();
    if n > MAX_ATOMS {
        return Err(Error::Usage(format!(
            "complex algebra of {n} worlds exceeds the {MAX_ATOMS}-atom limit"
        )));
    }
    let base = BooleanAlgebra::new(frame.worlds.clone())?;
    let column = |rel: &TripleSet, p: usize, q: usize| {
        (0..n)
            .filter(|&z| rel.contains([p, z, q]))
            .fold(Element::ZERO, |acc, z| acc | Element::singleton(z))
    };
    let f = OperatorTable::from_fn(OperatorKind::Possibility, n, |p, q| column(&frame.r, p, q));
    let g = OperatorTable::from_fn(OperatorKind::Sufficiency, n, |p, q| column(&frame.s, p, q));
    PsAlgebra::new(base, f, g)
}

fn canonical_world_names(a: &PsAlgebra) -> Vec<String> {
    a.base().atom_names().iter().map(|n| format!("u_{n}")).collect()
}

/// `Cf(A) = ⟨Ult(A), R_f, S_g⟩`. Ultrafilter `i` is `↑a_i`.
///
/// By isotonicity of `f` and antitonicity of `g`, quantifying over the two
/// upsets reduces to their generators: `R_f(↑p,↑q,↑r)` iff `q ≤ f(p,r)`, and
/// `S_g(↑p,↑q,↑r)` iff `q ≤ g(p,r)`.
pub fn canonical_frame(a: &PsAlgebra) -> TernaryFrame {
    let n = a.num_atoms();
    let mut r = TripleSet::empty(n);
    let mut s = TripleSet::empty(n);
    for p in 0..n {
        for q in 0..n {
            for t in 0..n {
                let (ap, at) = (a.base().atom(p), a.base().atom(t));
                if a.f(ap, at).has_atom(q) {
                    r.insert([p, q, t]);
                }
                if a.g(ap, at).has_atom(q) {
                    s.insert([p, q, t]);
                }
            }
        }
    }
    TernaryFrame::new(canonical_world_names(a), r, s).expect("canonical names are unique")
}

/// The canonical frame by direct quantification over ultrafilter members.
pub fn canonical_frame_exhaustive(a: &PsAlgebra) -> TernaryFrame {
    let ult = a.base().ultrafilters();
    let n = ult.len();
    let mut r = TripleSet::empty(n);
    let mut s = TripleSet::empty(n);
    for (i, u1) in ult.iter().enumerate() {
        for (j, u2) in ult.iter().enumerate() {
            for (k, u3) in ult.iter().enumerate() {
                let pairs = || {
                    u1.members(a.base())
                        .flat_map(move |x| u3.members(a.base()).map(move |y| (x, y)))
                };
                if pairs().all(|(x, y)| u2.contains(a.f(x, y))) {
                    r.insert([i, j, k]);
                }
                if pairs().any(|(x, y)| u2.contains(a.g(x, y))) {
                    s.insert([i, j, k]);
                }
            }
        }
    }
    TernaryFrame::new(canonical_world_names(a), r, s).expect("canonical names are unique")
}

/// `T_h(u₁,u₂,u₃)` iff `h[u₁ × u₃] ⊆ u₂`, by direct quantification.
pub fn t_relation(a: &PsAlgebra) -> TripleSet {
    let ult: Vec<Filter> = a.base().ultrafilters();
    let n = ult.len();
    let mut t = TripleSet::empty(n);
    for (i, u1) in ult.iter().enumerate() {
        for (j, u2) in ult.iter().enumerate() {
            for (k, u3) in ult.iter().enumerate() {
                let ok = u1
                    .members(a.base())
                    .all(|x| u3.members(a.base()).all(|y| u2.contains(a.h(x, y))));
                if ok {
                    t.insert([i, j, k]);
                }
            }
        }
    }
    t
}

/// Compares `T_h` with `R_f ∪ −S_g`; returns the first triple where they
/// differ, if any.
pub fn t_split_counterexample(a: &PsAlgebra) -> Option<Triple> {
    let t = t_relation(a);
    let cf = canonical_frame(a);
    let rhs = cf.r.union(&cf.s.complement());
    let diff = t.difference(&rhs).union(&rhs.difference(&t));
    let first = diff.iter().next();
    first
}

/// A world map between frames.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameMap {
    pub map: Vec<usize>,
    pub codomain_size: usize,
}

impl FrameMap {
    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.codomain_size];
        self.map.iter().all(|&w| !std::mem::replace(&mut seen[w], true))
    }

    pub fn apply(&self, [a, b, c]: Triple) -> Triple {
        [self.map[a], self.map[b], self.map[c]]
    }
}

#[derive(Clone, Debug)]
pub struct FrameEmbedding {
    pub map: FrameMap,
    pub canonical: TernaryFrame,
    pub injective: bool,
    pub r_preserved: bool,
    pub s_preserved: bool,
    /// First triple where preservation fails in either direction.
    pub failure: Option<Triple>,
}

impl FrameEmbedding {
    pub fn verified(&self) -> bool {
        self.injective && self.r_preserved && self.s_preserved
    }
}

/// `w ↦ ↑{w}` from a wMIA frame into `Cf(Cm(F))`, checked on every triple
/// in both directions against the directly quantified canonical frame.
pub fn embed_frame_into_canonical_of_complex(frame: &TernaryFrame) -> Result<FrameEmbedding> {
    if !frame.is_wmia() {
        return Err(Error::Precondition("frame is not a wMIA frame (S ⊄ R)".into()));
    }
    let cm = complex_algebra(frame)?;
    let canonical = canonical_frame_exhaustive(&cm);
    let ult = cm.base().ultrafilters();
    let n = frame.num_worlds();
    let map = FrameMap {
        map: (0..n)
            .map(|w| {
                ult.iter()
                    .position(|u| u.generator() == Element::singleton(w))
                    .expect("principal ultrafilter for every world")
            })
            .collect(),
        codomain_size: ult.len(),
    };
    let mut r_ok = true;
    let mut s_ok = true;
    let mut failure = None;
    for t in TripleSet::full(n).iter() {
        let img = map.apply(t);
        let r_match = frame.r.contains(t) == canonical.r.contains(img);
        let s_match = frame.s.contains(t) == canonical.s.contains(img);
        if (!r_match || !s_match) && failure.is_none() {
            failure = Some(t);
        }
        r_ok &= r_match;
        s_ok &= s_match;
    }
    Ok(FrameEmbedding {
        injective: map.is_injective(),
        map,
        canonical,
        r_preserved: r_ok,
        s_preserved: s_ok,
        failure,
    })
}
