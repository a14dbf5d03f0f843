//! Enumeration of small PS-algebras and frames against predicate filters.
//!
//! Every candidate has an index. For algebras on `n` atoms the index packs
//! the atom tables: the low `n³` bits are `g`, the next `n³` are `f`, and
//! within a table the entry for atom pair `(p, q)` occupies bits
//! `(p·n + q)·n ..`. For frames on `n` worlds the low `n³` bits are `S` and
//! the next `n³` are `R`, in triple index order. Streams are resumable from
//! any index.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::PsAlgebra;
use crate::boolean::Element;
use crate::error::{Error, Result};
use crate::frames::{check_frame_property, FrameProperty, RelationSel, TernaryFrame, TripleSet};
use crate::predicates::{parse_predicate_list, AlgebraPredicate};

pub const MAX_SEARCH_ATOMS: usize = 3;
pub const MAX_SEARCH_WORLDS: usize = 4;
pub const DEFAULT_SEARCH_BUDGET: u128 = 1 << 24;

/// Size of the algebra space on `n` atoms, `(2^n)^(2n²)`.
pub fn algebra_space(n: usize) -> u128 {
    pow2(2 * n * n * n)
}

/// Size of the frame space on `n` worlds, `2^(2n³)`.
pub fn frame_space(n: usize) -> u128 {
    pow2(2 * n * n * n)
}

fn pow2(bits: usize) -> u128 {
    if bits >= 128 {
        u128::MAX
    } else {
        1u128 << bits
    }
}

fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Algebra number `idx` on `n` atoms.
pub fn decode_algebra(n: usize, idx: u128) -> PsAlgebra {
    let cube = n * n * n;
    let g_code = (idx & low_mask(cube) as u128) as u64;
    let f_code = (idx >> cube) as u64;
    from_codes(n, f_code, g_code)
}

fn from_codes(n: usize, f_code: u64, g_code: u64) -> PsAlgebra {
    let entry = |code: u64, p: usize, q: usize| Element::from_bits(code >> ((p * n + q) * n) & low_mask(n));
    PsAlgebra::from_atom_fns(n, |p, q| entry(f_code, p, q), |p, q| entry(g_code, p, q))
        .expect("decoded tables are well formed")
}

/// Inverse of [`decode_algebra`].
pub fn encode_algebra(a: &PsAlgebra) -> u128 {
    let n = a.num_atoms();
    let code = |t: &crate::algebra::OperatorTable| {
        (0..n * n).fold(0u128, |acc, k| acc | (t.entries()[k].bits() as u128) << (k * n))
    };
    code(a.f_table()) << (n * n * n) | code(a.g_table())
}

/// The `idx`-th weak MIA on `n` atoms in base-3 order: each atom bit of each
/// atom pair is one of (f,g) = (0,0), (1,0), (1,1).
pub fn decode_wmia(n: usize, mut idx: u128) -> PsAlgebra {
    let (mut f, mut g) = (0u64, 0u64);
    for bit in 0..n * n * n {
        match idx % 3 {
            1 => f |= 1 << bit,
            2 => {
                f |= 1 << bit;
                g |= 1 << bit;
            }
            _ => {}
        }
        idx /= 3;
    }
    from_codes(n, f, g)
}

pub fn wmia_space(n: usize) -> u128 {
    3u128.saturating_pow((n * n * n) as u32)
}

/// A uniformly random weak MIA, drawn from stream `idx` of `seed`.
pub fn random_wmia(n: usize, seed: u64, idx: u64) -> PsAlgebra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx);
    let (mut f, mut g) = (0u64, 0u64);
    for bit in 0..n * n * n {
        match rng.gen_range(0..3) {
            1 => f |= 1 << bit,
            2 => {
                f |= 1 << bit;
                g |= 1 << bit;
            }
            _ => {}
        }
    }
    from_codes(n, f, g)
}

/// Frame number `idx` on `n ≤ 4` worlds, default world names.
pub fn decode_frame(n: usize, idx: u128) -> TernaryFrame {
    let cube = n * n * n;
    let s = TripleSet::from_mask(n, (idx & low_mask(cube) as u128) as u64);
    let r = TripleSet::from_mask(n, (idx >> cube) as u64);
    TernaryFrame::with_default_names(r, s).expect("decoded frame is well formed")
}

/// A uniformly random wMIA frame on `n ≤ 4` worlds.
pub fn random_wmia_frame(n: usize, seed: u64, idx: u64) -> TernaryFrame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx);
    let (mut r, mut s) = (0u64, 0u64);
    for bit in 0..n * n * n {
        match rng.gen_range(0..3) {
            1 => r |= 1 << bit,
            2 => {
                r |= 1 << bit;
                s |= 1 << bit;
            }
            _ => {}
        }
    }
    TernaryFrame::with_default_names(TripleSet::from_mask(n, r), TripleSet::from_mask(n, s))
        .expect("random frame is well formed")
}

/// The `idx`-th wMIA frame on `n ≤ 2` worlds in base-3 order.
pub fn decode_wmia_frame(n: usize, mut idx: u128) -> TernaryFrame {
    let (mut r, mut s) = (0u64, 0u64);
    for bit in 0..n * n * n {
        match idx % 3 {
            1 => r |= 1 << bit,
            2 => {
                r |= 1 << bit;
                s |= 1 << bit;
            }
            _ => {}
        }
        idx /= 3;
    }
    TernaryFrame::with_default_names(TripleSet::from_mask(n, r), TripleSet::from_mask(n, s))
        .expect("decoded frame is well formed")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchKind {
    Algebras,
    Frames,
}

/// How candidates are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Every index in order.
    Exhaustive,
    /// `count` indices spread evenly: sample `k` is index `⌊k·space/count⌋`.
    Stratified { count: u64 },
    /// `count` uniform draws over the whole space, stream `k` of `seed`.
    Random { count: u64, seed: u64 },
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchMode::Exhaustive => f.write_str("exhaustive"),
            SearchMode::Stratified { count } => write!(f, "stratified:{count}"),
            SearchMode::Random { count, seed } => write!(f, "random:{count}:{seed}"),
        }
    }
}

impl FromStr for SearchMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| {
            t.parse::<u64>()
                .map_err(|_| Error::Usage(format!("bad number `{t}` in search mode `{s}`")))
        };
        match parts.as_slice() {
            ["exhaustive"] => Ok(SearchMode::Exhaustive),
            ["stratified", c] => Ok(SearchMode::Stratified { count: num(c)? }),
            ["random", c] => Ok(SearchMode::Random {
                count: num(c)?,
                seed: 0,
            }),
            ["random", c, seed] => Ok(SearchMode::Random {
                count: num(c)?,
                seed: num(seed)?,
            }),
            _ => Err(Error::Usage(format!(
                "unknown search mode `{s}` (exhaustive, stratified:N, random:N[:SEED])"
            ))),
        }
    }
}

/// A frame filter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameRequirement {
    Wmia,
    /// `R = S`.
    Special,
    Property(FrameProperty, RelationSel),
}

impl FrameRequirement {
    pub fn holds(self, frame: &TernaryFrame) -> bool {
        match self {
            FrameRequirement::Wmia => frame.is_wmia(),
            FrameRequirement::Special => frame.r() == frame.s(),
            FrameRequirement::Property(p, sel) => check_frame_property(frame, p, sel).map(|r| r.holds).unwrap_or(false),
        }
    }

    pub fn id(self) -> String {
        match self {
            FrameRequirement::Wmia => "wmia".into(),
            FrameRequirement::Special => "special".into(),
            FrameRequirement::Property(p, sel) => format!("{p}-on-{sel}"),
        }
    }
}

impl FromStr for FrameRequirement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "wmia" => return Ok(FrameRequirement::Wmia),
            "special" => return Ok(FrameRequirement::Special),
            _ => {}
        }
        let (prop, sel) = match s.split_once("-on-") {
            Some((p, r)) => (p, r.parse::<RelationSel>()?),
            None => (s, RelationSel::R),
        };
        let prop: FrameProperty = prop.parse()?;
        if prop == FrameProperty::WMia {
            return Ok(FrameRequirement::Wmia);
        }
        Ok(FrameRequirement::Property(prop, sel))
    }
}

pub fn parse_frame_requirements(list: &str) -> Result<Vec<FrameRequirement>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Filters {
    Algebra {
        require: Vec<AlgebraPredicate>,
        forbid: Vec<AlgebraPredicate>,
    },
    Frame {
        require: Vec<FrameRequirement>,
        forbid: Vec<FrameRequirement>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpec {
    pub kind: SearchKind,
    /// Atoms for algebras, worlds for frames.
    pub size: usize,
    pub filters: Filters,
    pub limit: Option<usize>,
    pub mode: SearchMode,
    /// First index (exhaustive) or sample number (other modes) to examine.
    pub cursor: u128,
    /// Lifts the atom and world caps.
    pub override_caps: bool,
    pub budget: u128,
}

impl SearchSpec {
    pub fn algebras(size: usize, require: &str, forbid: &str) -> Result<Self> {
        Ok(SearchSpec {
            kind: SearchKind::Algebras,
            size,
            filters: Filters::Algebra {
                require: parse_predicate_list(require)?,
                forbid: parse_predicate_list(forbid)?,
            },
            limit: None,
            mode: SearchMode::Exhaustive,
            cursor: 0,
            override_caps: false,
            budget: DEFAULT_SEARCH_BUDGET,
        })
    }

    pub fn frames(size: usize, require: &str, forbid: &str) -> Result<Self> {
        Ok(SearchSpec {
            kind: SearchKind::Frames,
            size,
            filters: Filters::Frame {
                require: parse_frame_requirements(require)?,
                forbid: parse_frame_requirements(forbid)?,
            },
            limit: None,
            mode: SearchMode::Exhaustive,
            cursor: 0,
            override_caps: false,
            budget: DEFAULT_SEARCH_BUDGET,
        })
    }

    pub fn with_mode(mut self, mode: SearchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = Some(limit);
        self
    }

    pub fn space(&self) -> u128 {
        match self.kind {
            SearchKind::Algebras => algebra_space(self.size),
            SearchKind::Frames => frame_space(self.size),
        }
    }

    /// Number of candidates the mode draws.
    pub fn draws(&self) -> u128 {
        match self.mode {
            SearchMode::Exhaustive => self.space(),
            SearchMode::Stratified { count } => (count as u128).min(self.space()),
            SearchMode::Random { count, .. } => count as u128,
        }
    }

    fn validate(&self) -> Result<()> {
        let (cap, what) = match self.kind {
            SearchKind::Algebras => (MAX_SEARCH_ATOMS, "atoms"),
            SearchKind::Frames => (MAX_SEARCH_WORLDS, "worlds"),
        };
        if self.size == 0 {
            return Err(Error::Usage(format!("search needs at least one of the {what}")));
        }
        if self.size > cap && !self.override_caps {
            return Err(Error::Usage(format!(
                "{} {what} exceeds the search cap of {cap}; pass the override to lift it",
                self.size
            )));
        }
        let hard = match self.kind {
            SearchKind::Algebras => 4,
            SearchKind::Frames => 4,
        };
        if self.size > hard {
            return Err(Error::Usage(format!("indices do not fit above {hard} {what}")));
        }
        let draws = self.draws().saturating_sub(self.cursor);
        if draws > self.budget {
            return Err(Error::Resource {
                what: format!("{} search candidates", self.mode),
                needed: draws,
                budget: self.budget,
            });
        }
        Ok(())
    }

    /// Index of draw number `k`.
    fn index_of(&self, k: u128) -> u128 {
        match self.mode {
            SearchMode::Exhaustive => k,
            SearchMode::Stratified { count } => {
                let space = self.space();
                let count = (count as u128).min(space);
                // k·space/count without overflow for the spaces used here
                (k * (space / count)) + (k * (space % count)) / count
            }
            SearchMode::Random { seed, .. } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                let bits = 2 * self.size.pow(3);
                let v: u128 = rng.gen();
                if bits >= 128 {
                    v
                } else {
                    v & ((1u128 << bits) - 1)
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum Candidate {
    Algebra(PsAlgebra),
    Frame(TernaryFrame),
}

fn decode(spec: &SearchSpec, idx: u128) -> Candidate {
    match spec.kind {
        SearchKind::Algebras => Candidate::Algebra(decode_algebra(spec.size, idx)),
        SearchKind::Frames => Candidate::Frame(decode_frame(spec.size, idx)),
    }
}

fn accepts(spec: &SearchSpec, c: &Candidate) -> bool {
    match (&spec.filters, c) {
        (Filters::Algebra { require, forbid }, Candidate::Algebra(a)) => {
            require.iter().all(|p| p.holds(a)) && forbid.iter().all(|p| !p.holds(a))
        }
        (Filters::Frame { require, forbid }, Candidate::Frame(f)) => {
            require.iter().all(|r| r.holds(f)) && forbid.iter().all(|r| !r.holds(f))
        }
        _ => false,
    }
}

#[derive(Clone, Debug)]
pub struct Hit {
    /// Draw number.
    pub draw: u128,
    /// Position in the full candidate space.
    pub index: u128,
    pub candidate: Candidate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunManifest {
    pub kind: SearchKind,
    pub size: usize,
    pub mode: String,
    pub require: Vec<String>,
    pub forbid: Vec<String>,
    pub space: u128,
    pub examined: u128,
    pub matched: usize,
    /// Next draw to examine when resuming.
    pub cursor: u128,
    /// True when all draws were examined.
    pub exhausted: bool,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub hits: Vec<Hit>,
    pub manifest: RunManifest,
}

const CHUNK: u128 = 4096;

/// Runs the search. Chunks are examined in parallel and merged in draw order,
/// so results do not depend on the thread count.
pub fn run_search(spec: &SearchSpec) -> Result<SearchResult> {
    spec.validate()?;
    let start = Instant::now();
    let draws = spec.draws();
    let limit = spec.limit.unwrap_or(usize::MAX);
    let mut hits = Vec::new();
    let mut k = spec.cursor.min(draws);
    while k < draws && hits.len() < limit {
        let end = (k + CHUNK).min(draws);
        let found: Vec<Hit> = (k as u64..end as u64)
            .into_par_iter()
            .filter_map(|d| {
                let draw = d as u128;
                let index = spec.index_of(draw);
                let c = decode(spec, index);
                accepts(spec, &c).then_some(Hit {
                    draw,
                    index,
                    candidate: c,
                })
            })
            .collect();
        for h in found {
            if hits.len() == limit {
                break;
            }
            k = h.draw + 1;
            hits.push(h);
        }
        if hits.len() < limit {
            k = end;
        }
    }
    let (require, forbid) = match &spec.filters {
        Filters::Algebra { require, forbid } => (
            require.iter().map(|p| p.id().to_string()).collect(),
            forbid.iter().map(|p| p.id().to_string()).collect(),
        ),
        Filters::Frame { require, forbid } => (
            require.iter().map(|r| r.id()).collect(),
            forbid.iter().map(|r| r.id()).collect(),
        ),
    };
    let manifest = RunManifest {
        kind: spec.kind,
        size: spec.size,
        mode: spec.mode.to_string(),
        require,
        forbid,
        space: spec.space(),
        examined: k - spec.cursor.min(draws),
        matched: hits.len(),
        cursor: k,
        exhausted: k >= draws,
        elapsed_ms: start.elapsed().as_millis(),
    };
    Ok(SearchResult { hits, manifest })
}

#[derive(Clone, Debug)]
pub enum WitnessOutcome {
    Found(Hit, RunManifest),
    Exhausted(RunManifest),
}

/// First accepted candidate, or an explicit exhausted verdict.
pub fn find_witness(spec: &SearchSpec) -> Result<WitnessOutcome> {
    let spec = spec.clone().with_limit(1);
    let mut r = run_search(&spec)?;
    Ok(match r.hits.pop() {
        Some(h) => WitnessOutcome::Found(h, r.manifest),
        None => WitnessOutcome::Exhausted(r.manifest),
    })
}

/// Streams every accepted algebra lazily, in index order.
pub fn enumerate_algebras(spec: &SearchSpec) -> Result<impl Iterator<Item = (u128, PsAlgebra)> + '_> {
    if spec.kind != SearchKind::Algebras {
        return Err(Error::Usage("not an algebra search".into()));
    }
    spec.validate()?;
    Ok(stream(spec).filter_map(|(i, c)| match c {
        Candidate::Algebra(a) => Some((i, a)),
        Candidate::Frame(_) => None,
    }))
}

/// Streams every accepted frame lazily, in index order.
pub fn enumerate_frames(spec: &SearchSpec) -> Result<impl Iterator<Item = (u128, TernaryFrame)> + '_> {
    if spec.kind != SearchKind::Frames {
        return Err(Error::Usage("not a frame search".into()));
    }
    spec.validate()?;
    Ok(stream(spec).filter_map(|(i, c)| match c {
        Candidate::Frame(f) => Some((i, f)),
        Candidate::Algebra(_) => None,
    }))
}

fn stream(spec: &SearchSpec) -> impl Iterator<Item = (u128, Candidate)> + '_ {
    let limit = spec.limit.unwrap_or(usize::MAX);
    (spec.cursor..spec.draws())
        .map(move |k| {
            let i = spec.index_of(k);
            (i, decode(spec, i))
        })
        .filter(move |(_, c)| accepts(spec, c))
        .take(limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::predicates::AlgebraPredicate as P;

    #[test]
    fn space_sizes() {
        assert_eq!(algebra_space(1), 4);
        assert_eq!(algebra_space(2), 65536);
        assert_eq!(frame_space(1), 4);
        assert_eq!(wmia_space(2), 6561);
    }

    #[test]
    fn decode_encode_round_trip() {
        for idx in (0..65536u128).step_by(97) {
            assert_eq!(encode_algebra(&decode_algebra(2, idx)), idx);
        }
        let fig = corpus::eq45_not_wmia();
        let idx = encode_algebra(&fig);
        assert_eq!(decode_algebra(2, idx).f_table(), fig.f_table());
    }

    #[test]
    fn one_atom_space_is_exhaustive_and_duplicate_free() {
        let spec = SearchSpec::algebras(1, "", "").unwrap();
        let all: Vec<u128> = enumerate_algebras(&spec)
            .unwrap()
            .map(|(i, a)| {
                assert_eq!(encode_algebra(&a), i);
                i
            })
            .collect();
        assert_eq!(all, vec![0, 1, 2, 3]);
    }

    #[test]
    fn algebra_search_examples() {
        let spec = SearchSpec::algebras(2, "eq45", "wMIA").unwrap();
        let fig = encode_algebra(&corpus::eq45_not_wmia());
        assert!(enumerate_algebras(&spec).unwrap().any(|(i, _)| i == fig));

        let spec = SearchSpec::algebras(1, "wMIA", "").unwrap();
        assert!(enumerate_algebras(&spec)
            .unwrap()
            .any(|(_, a)| a.f(a.one(), a.one()) == a.one() && a.g(a.one(), a.one()) == a.one()));

        let spec = SearchSpec::algebras(1, "wMIA", "eq41").unwrap();
        assert!(matches!(find_witness(&spec).unwrap(), WitnessOutcome::Exhausted(m) if m.examined == 4));

        let spec = SearchSpec::algebras(1, "wMIA", "wMIA").unwrap();
        assert!(matches!(find_witness(&spec).unwrap(), WitnessOutcome::Exhausted(_)));
    }

    #[test]
    fn frame_search_examples() {
        let count = |req: &str, n| {
            enumerate_frames(&SearchSpec::frames(n, req, "").unwrap())
                .unwrap()
                .count()
        };
        assert_eq!(count("wmia", 1), 3);
        assert_eq!(count("", 1), 4);
        let spec = SearchSpec::frames(2, "wmia,bt0-on-R", "").unwrap().with_limit(1);
        assert_eq!(enumerate_frames(&spec).unwrap().count(), 1);
        assert_eq!(count("special", 1), 2);
        assert!("bt9-on-R".parse::<FrameRequirement>().is_err());
        assert!("bt0-on-Q".parse::<FrameRequirement>().is_err());
    }

    #[test]
    fn caps_and_budget() {
        assert!(matches!(
            SearchSpec::algebras(4, "", "").unwrap().validate(),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            SearchSpec::frames(5, "", "").unwrap().validate(),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            SearchSpec::algebras(3, "", "").unwrap().validate(),
            Err(Error::Resource { .. })
        ));
        let spec = SearchSpec::algebras(3, "", "")
            .unwrap()
            .with_mode(SearchMode::Random { count: 10, seed: 1 });
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn stratified_indices() {
        let spec = SearchSpec::algebras(2, "", "")
            .unwrap()
            .with_mode(SearchMode::Stratified { count: 10_000 });
        assert_eq!(spec.index_of(0), 0);
        assert_eq!(spec.index_of(1), 6);
        assert_eq!(spec.index_of(9_999), 9_999 * 65536 / 10_000);
        let r = run_search(&spec).unwrap();
        assert_eq!(r.hits.len(), 10_000);
        assert!(r.manifest.exhausted);
    }

    #[test]
    fn results_do_not_depend_on_cursor_splits() {
        let spec = SearchSpec::algebras(2, "dMIA", "wMIA").unwrap().with_limit(5);
        let whole: Vec<u128> = run_search(&spec).unwrap().hits.iter().map(|h| h.index).collect();
        let first = run_search(&spec.clone().with_limit(2)).unwrap();
        let mut rest = spec.clone().with_limit(3);
        rest.cursor = first.manifest.cursor;
        let mut joined: Vec<u128> = first.hits.iter().map(|h| h.index).collect();
        joined.extend(run_search(&rest).unwrap().hits.iter().map(|h| h.index));
        assert_eq!(whole, joined);
        let streamed: Vec<u128> = enumerate_algebras(&spec).unwrap().map(|(i, _)| i).collect();
        assert_eq!(whole, streamed);
    }

    #[test]
    fn wmia_decoders_yield_wmia() {
        for idx in 0..wmia_space(1) {
            assert!(P::WMia.holds(&decode_wmia(1, idx)));
        }
        for k in 0..20 {
            assert!(P::WMia.holds(&random_wmia(3, 5, k)));
            assert!(random_wmia_frame(4, 5, k).is_wmia());
        }
        for idx in (0..wmia_space(2)).step_by(41) {
            assert!(P::WMia.holds(&decode_wmia(2, idx)));
            assert!(decode_wmia_frame(2, idx).is_wmia());
        }
    }
}
