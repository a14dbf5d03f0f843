//! Models, extensions and frame validity.

use rayon::prelude::*;

use super::formula::Formula;
use crate::boolean::Element;
use crate::error::{Error, Result};
use crate::frames::{TernaryFrame, WorldSet};
use crate::predicates::{PredicateReport, Witness};

/// Per-world adjacency: `rows[z·n + x]` is the set of `y` with
/// `(x, z, y)` in the relation.
#[derive(Clone, Debug)]
pub struct FrameIndex {
    n: usize,
    r_rows: Vec<u64>,
    s_rows: Vec<u64>,
}

impl FrameIndex {
    pub fn new(frame: &TernaryFrame) -> Self {
        let n = frame.num_worlds();
        let mut r_rows = vec![0u64; n * n];
        let mut s_rows = vec![0u64; n * n];
        for [x, z, y] in frame.r().iter() {
            r_rows[z * n + x] |= 1 << y;
        }
        for [x, z, y] in frame.s().iter() {
            s_rows[z * n + x] |= 1 << y;
        }
        FrameIndex { n, r_rows, s_rows }
    }

    pub fn num_worlds(&self) -> usize {
        self.n
    }

    fn all(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1 << self.n) - 1
        }
    }

    pub fn dia(&self, x: WorldSet, y: WorldSet) -> WorldSet {
        let (x, y) = (x.bits(), y.bits());
        let mut out = 0u64;
        for z in 0..self.n {
            let row = &self.r_rows[z * self.n..(z + 1) * self.n];
            if ones(x).any(|a| row[a] & y != 0) {
                out |= 1 << z;
            }
        }
        WorldSet::from_bits(out)
    }

    pub fn wbox(&self, x: WorldSet, y: WorldSet) -> WorldSet {
        let (x, y) = (x.bits(), y.bits());
        let mut out = 0u64;
        for z in 0..self.n {
            let row = &self.s_rows[z * self.n..(z + 1) * self.n];
            if ones(x).all(|a| y & !row[a] == 0) {
                out |= 1 << z;
            }
        }
        WorldSet::from_bits(out)
    }

    /// Extension of `phi` under `valuation` (entry `k` for `p_k`).
    pub fn eval(&self, valuation: &[WorldSet], phi: &Formula) -> Result<WorldSet> {
        Ok(match phi {
            Formula::Top => WorldSet::from_bits(self.all()),
            Formula::Var(k) => *valuation.get(*k).ok_or(Error::UndeclaredVariable(*k))?,
            Formula::Not(a) => WorldSet::from_bits(self.all() & !self.eval(valuation, a)?.bits()),
            Formula::And(a, b) => self.eval(valuation, a)? & self.eval(valuation, b)?,
            Formula::Dia(a, b) => self.dia(self.eval(valuation, a)?, self.eval(valuation, b)?),
            Formula::WBox(a, b) => self.wbox(self.eval(valuation, a)?, self.eval(valuation, b)?),
        })
    }
}

fn ones(mut bits: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if bits == 0 {
            return None;
        }
        let i = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        Some(i)
    })
}

#[derive(Clone, Debug)]
pub struct Model {
    frame: TernaryFrame,
    valuation: Vec<WorldSet>,
    index: FrameIndex,
}

impl Model {
    /// Requires a wMIA frame and a valuation inside its worlds.
    pub fn new(frame: TernaryFrame, valuation: Vec<WorldSet>) -> Result<Self> {
        if !frame.is_wmia() {
            return Err(Error::Precondition("model frame is not a wMIA frame (S ⊄ R)".into()));
        }
        Self::new_unchecked(frame, valuation)
    }

    /// Skips the wMIA check; the valuation is still range-checked.
    pub fn new_unchecked(frame: TernaryFrame, valuation: Vec<WorldSet>) -> Result<Self> {
        let all = frame.all_worlds();
        if let Some(k) = valuation.iter().position(|v| !Element::le(*v, all)) {
            return Err(Error::Format(format!(
                "valuation of p{k} mentions worlds outside the frame"
            )));
        }
        let index = FrameIndex::new(&frame);
        Ok(Model {
            frame,
            valuation,
            index,
        })
    }

    pub fn frame(&self) -> &TernaryFrame {
        &self.frame
    }

    pub fn valuation(&self) -> &[WorldSet] {
        &self.valuation
    }

    pub fn eval(&self, phi: &Formula) -> Result<WorldSet> {
        self.index.eval(&self.valuation, phi)
    }

    pub fn globally_true(&self, phi: &Formula) -> Result<bool> {
        Ok(self.eval(phi)? == self.frame.all_worlds())
    }
}

/// Default cap on the number of valuations enumerated by one check.
pub const DEFAULT_BUDGET: u128 = 1 << 24;

/// Number of valuations of `vars` variables over `n` worlds, `2^(n·vars)`.
pub fn valuation_count(n: usize, vars: usize) -> u128 {
    let bits = n * vars;
    if bits >= 128 {
        u128::MAX
    } else {
        1u128 << bits
    }
}

pub(crate) fn check_budget(what: &str, n: usize, vars: usize, budget: u128) -> Result<u64> {
    let needed = valuation_count(n, vars);
    if needed > budget || needed > u64::MAX as u128 {
        return Err(Error::Resource {
            what: what.to_string(),
            needed,
            budget,
        });
    }
    Ok(needed as u64)
}

/// Valuation number `idx`: bits `k·n .. (k+1)·n` give `v(p_k)`.
pub fn decode_valuation(idx: u64, n: usize, vars: usize) -> Vec<WorldSet> {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    (0..vars)
        .map(|k| WorldSet::from_bits(if k * n >= 64 { 0 } else { idx >> (k * n) & mask }))
        .collect()
}

/// Validity over every valuation of `p_0 … p_{vars-1}`. The witness is the
/// lowest-numbered failing valuation and its lowest failing world.
pub fn valid_in_frame(frame: &TernaryFrame, phi: &Formula, vars: usize, budget: u128) -> Result<PredicateReport> {
    if !frame.is_wmia() {
        return Err(Error::Precondition("frame is not a wMIA frame (S ⊄ R)".into()));
    }
    valid_in_frame_unchecked(frame, phi, vars, budget)
}

pub fn valid_in_frame_unchecked(
    frame: &TernaryFrame,
    phi: &Formula,
    vars: usize,
    budget: u128,
) -> Result<PredicateReport> {
    if phi.var_bound() > vars {
        return Err(Error::UndeclaredVariable(phi.var_bound() - 1));
    }
    let n = frame.num_worlds();
    let count = check_budget("valuations", n, vars, budget)?;
    let index = FrameIndex::new(frame);
    let all = frame.all_worlds();
    let failure = (0..count).into_par_iter().find_map_first(|idx| {
        let v = decode_valuation(idx, n, vars);
        let ext = index.eval(&v, phi).expect("variables checked above");
        (ext != all).then(|| {
            let world = all.minus(ext).atoms().next().expect("nonempty");
            Witness::Countermodel { valuation: v, world }
        })
    });
    Ok(match failure {
        Some(w) => PredicateReport::fails("valid", w),
        None => PredicateReport::holds("valid"),
    })
}
