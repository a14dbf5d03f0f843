//! Axiom schemas of K#, their instances over a bounded formula pool, and
//! soundness checking on finite frames.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexSet;
use rayon::prelude::*;

use super::formula::Formula;
use super::parser::parse;
use super::semantics::{check_budget, decode_valuation, valid_in_frame_unchecked, FrameIndex};
use crate::error::{Error, Result};
use crate::frames::{TernaryFrame, WorldSet};
use crate::predicates::Witness;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Schema {
    M1,
    M2,
    M3,
    M4,
    CU,
    TU,
    FourU,
    BU,
    SU,
}

impl Schema {
    pub const ALL: &'static [Schema] = &[
        Schema::M1,
        Schema::M2,
        Schema::M3,
        Schema::M4,
        Schema::CU,
        Schema::TU,
        Schema::FourU,
        Schema::BU,
        Schema::SU,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Schema::M1 => "M1",
            Schema::M2 => "M2",
            Schema::M3 => "M3",
            Schema::M4 => "M4",
            Schema::CU => "C_U",
            Schema::TU => "T_U",
            Schema::FourU => "4_U",
            Schema::BU => "B_U",
            Schema::SU => "S_U",
        }
    }

    /// Templates over metavariables `p0, p1, p2` (standing for φ, ψ, χ).
    fn template_text(self) -> &'static [&'static str] {
        match self {
            Schema::M1 => &["~dia(F, p0)", "~dia(p0, F)"],
            Schema::M2 => &[
                "dia(p0, p1) | dia(p0, p2) <-> dia(p0, p1 | p2)",
                "dia(p0, p1) | dia(p2, p1) <-> dia(p0 | p2, p1)",
            ],
            Schema::M3 => &["wbox(F, p0)", "wbox(p0, F)"],
            Schema::M4 => &[
                "wbox(p0, p1) & wbox(p0, p2) <-> wbox(p0, p1 | p2)",
                "wbox(p0, p1) & wbox(p2, p1) <-> wbox(p0 | p2, p1)",
            ],
            Schema::CU => &["diaU(p0, T) & diaU(p1, T) -> diaU(p0, p1)"],
            Schema::TU => &["p0 -> diaU(p0, T)"],
            Schema::FourU => &["diaU(diaU(p0, T), T) -> diaU(p0, T)"],
            Schema::BU => &["p0 -> boxU(diaU(p0, T), F)"],
            Schema::SU => &["diaU(p0, p1) -> diaU(p1, p0)"],
        }
    }

    pub fn templates(self) -> Vec<Formula> {
        self.template_text()
            .iter()
            .map(|t| parse(t).expect("built-in template parses"))
            .collect()
    }

    /// Number of metavariables.
    pub fn arity(self) -> usize {
        self.templates().iter().map(Formula::var_bound).max().unwrap_or(0)
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Schema {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .chars()
            .filter(|&c| c != '_')
            .collect::<String>()
            .to_ascii_uppercase();
        Schema::ALL
            .iter()
            .copied()
            .find(|sc| sc.id().replace('_', "").to_ascii_uppercase() == key)
            .ok_or_else(|| Error::UnknownPredicate(s.trim().to_string()))
    }
}

/// Largest pool `formula_pool` will build.
pub const MAX_POOL: usize = 1 << 21;

/// Variables `p0 … p{vars-1}` closed `depth` times under `~`, `&`, `dia`,
/// `wbox`. Duplicates are dropped, first occurrence wins.
pub fn formula_pool(vars: usize, depth: usize) -> Result<Vec<Formula>> {
    let mut pool: IndexSet<Formula> = (0..vars).map(Formula::var).collect();
    for _ in 0..depth {
        let s = pool.len();
        let bound = 2 * s + 3 * s * s;
        if bound > MAX_POOL {
            return Err(Error::Resource {
                what: "formula pool".into(),
                needed: bound as u128,
                budget: MAX_POOL as u128,
            });
        }
        let prev: Vec<Formula> = pool.iter().cloned().collect();
        for a in &prev {
            pool.insert(a.clone().not());
        }
        for a in &prev {
            for b in &prev {
                pool.insert(a.clone().and(b.clone()));
            }
        }
        for a in &prev {
            for b in &prev {
                pool.insert(Formula::dia(a.clone(), b.clone()));
            }
        }
        for a in &prev {
            for b in &prev {
                pool.insert(Formula::wbox(a.clone(), b.clone()));
            }
        }
    }
    Ok(pool.into_iter().collect())
}

/// All instances: templates in order, then metavariable tuples over the pool
/// with the first coordinate most significant.
pub fn axiom_instances(schema: Schema, vars: usize, depth: usize) -> Result<Vec<Formula>> {
    let pool = formula_pool(vars, depth)?;
    let arity = schema.arity();
    let count = (pool.len() as u128).pow(arity as u32) * schema.templates().len() as u128;
    if count > MAX_POOL as u128 * 8 {
        return Err(Error::Resource {
            what: format!("{schema} instances"),
            needed: count,
            budget: MAX_POOL as u128 * 8,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    for t in schema.templates() {
        for_each_tuple(pool.len(), arity, |idx| {
            let subst: Vec<Formula> = idx.iter().map(|&i| pool[i].clone()).collect();
            out.push(t.substitute(&subst));
            true
        });
    }
    Ok(out)
}

/// Calls `f` on every tuple in `0..base` of length `len`, lexicographically;
/// stops early when `f` returns false.
fn for_each_tuple(base: usize, len: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if base == 0 && len > 0 {
        return true;
    }
    let mut idx = vec![0usize; len];
    loop {
        if !f(&idx) {
            return false;
        }
        let mut k = len;
        loop {
            if k == 0 {
                return true;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < base {
                break;
            }
            idx[k] = 0;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoundnessFailure {
    pub schema: Schema,
    pub instance: Formula,
    pub valuation: Vec<WorldSet>,
    pub world: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaVerdict {
    pub schema: Schema,
    pub instances: u128,
    pub failure: Option<SoundnessFailure>,
}

impl SchemaVerdict {
    pub fn valid(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoundnessReport {
    pub depth: usize,
    pub vars: usize,
    pub pool_size: usize,
    pub valuations: u64,
    pub schemas: Vec<SchemaVerdict>,
}

impl SoundnessReport {
    pub fn all_valid(&self) -> bool {
        self.schemas.iter().all(SchemaVerdict::valid)
    }

    pub fn first_failure(&self) -> Option<&SoundnessFailure> {
        self.schemas.iter().find_map(|s| s.failure.as_ref())
    }
}

/// Every instance of every schema over the pool, on every valuation.
pub fn soundness_report(frame: &TernaryFrame, depth: usize, vars: usize, budget: u128) -> Result<SoundnessReport> {
    if !frame.is_wmia() {
        return Err(Error::Precondition("frame is not a wMIA frame (S ⊄ R)".into()));
    }
    soundness_report_unchecked(frame, depth, vars, budget, Schema::ALL)
}

/// As [`soundness_report`] without the wMIA check.
///
/// For a fixed valuation, an instance's extension depends only on the
/// extensions of the substituted formulas, so each template is evaluated
/// once per tuple of distinct pool extensions rather than per instance.
/// The witness is taken from the lowest failing valuation; the instance uses
/// the first pool formula for each extension, so it can differ from the
/// naive route's witness while the verdicts agree.
pub fn soundness_report_unchecked(
    frame: &TernaryFrame,
    depth: usize,
    vars: usize,
    budget: u128,
    schemas: &[Schema],
) -> Result<SoundnessReport> {
    let n = frame.num_worlds();
    let count = check_budget("valuations", n, vars, budget)?;
    let pool = formula_pool(vars, depth)?;
    let index = FrameIndex::new(frame);
    let all = frame.all_worlds();
    let templates: Vec<(Schema, Vec<Formula>, usize)> =
        schemas.iter().map(|&s| (s, s.templates(), s.arity())).collect();

    type Found = Option<(u64, SoundnessFailure)>;
    let per_valuation = |idx: u64| -> Vec<Found> {
        let v = decode_valuation(idx, n, vars);
        let mut reps: Vec<usize> = Vec::new();
        let mut exts: Vec<WorldSet> = Vec::new();
        for (i, phi) in pool.iter().enumerate() {
            let e = index.eval(&v, phi).expect("pool variables are declared");
            if !exts.contains(&e) {
                exts.push(e);
                reps.push(i);
            }
        }
        templates
            .iter()
            .map(|(schema, forms, arity)| {
                let mut found = None;
                for t in forms {
                    for_each_tuple(exts.len(), *arity, |tuple| {
                        let sub: Vec<WorldSet> = tuple.iter().map(|&k| exts[k]).collect();
                        let ext = index.eval(&sub, t).expect("template arity");
                        if ext == all {
                            return true;
                        }
                        let subst: Vec<Formula> = tuple.iter().map(|&k| pool[reps[k]].clone()).collect();
                        found = Some((
                            idx,
                            SoundnessFailure {
                                schema: *schema,
                                instance: t.substitute(&subst),
                                valuation: v.clone(),
                                world: all.minus(ext).atoms().next().expect("nonempty"),
                            },
                        ));
                        false
                    });
                    if found.is_some() {
                        break;
                    }
                }
                found
            })
            .collect()
    };
    let merge = |a: Vec<Found>, b: Vec<Found>| -> Vec<Found> {
        a.into_iter()
            .zip(b)
            .map(|(x, y)| match (x, y) {
                (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
                (x, y) => x.or(y),
            })
            .collect()
    };
    let found = (0..count)
        .into_par_iter()
        .map(per_valuation)
        .reduce(|| vec![None; templates.len()], merge);

    let schemas = templates
        .iter()
        .zip(found)
        .map(|((schema, forms, arity), f)| SchemaVerdict {
            schema: *schema,
            instances: (pool.len() as u128).pow(*arity as u32) * forms.len() as u128,
            failure: f.map(|(_, fail)| fail),
        })
        .collect();
    Ok(SoundnessReport {
        depth,
        vars,
        pool_size: pool.len(),
        valuations: count,
        schemas,
    })
}

/// Per-instance validity for each schema, for cross-checking the fast route.
pub fn soundness_report_naive(
    frame: &TernaryFrame,
    depth: usize,
    vars: usize,
    budget: u128,
    schemas: &[Schema],
) -> Result<SoundnessReport> {
    let n = frame.num_worlds();
    let count = check_budget("valuations", n, vars, budget)?;
    let pool_size = formula_pool(vars, depth)?.len();
    let mut verdicts = Vec::new();
    for &schema in schemas {
        let instances = axiom_instances(schema, vars, depth)?;
        let mut failure = None;
        for inst in &instances {
            let rep = valid_in_frame_unchecked(frame, inst, vars, budget)?;
            if let Some(Witness::Countermodel { valuation, world }) = rep.witness {
                failure = Some(SoundnessFailure {
                    schema,
                    instance: inst.clone(),
                    valuation,
                    world,
                });
                break;
            }
        }
        verdicts.push(SchemaVerdict {
            schema,
            instances: instances.len() as u128,
            failure,
        });
    }
    Ok(SoundnessReport {
        depth,
        vars,
        pool_size,
        valuations: count,
        schemas: verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::frames::TripleSet;
    use crate::logic::semantics::{Model, DEFAULT_BUDGET};

    fn non_wmia() -> TernaryFrame {
        TernaryFrame::new(vec!["w".into()], TripleSet::empty(1), TripleSet::full(1)).unwrap()
    }

    #[test]
    fn pool_sizes() {
        assert_eq!(formula_pool(2, 0).unwrap().len(), 2);
        assert_eq!(formula_pool(2, 1).unwrap().len(), 16);
        assert_eq!(formula_pool(2, 2).unwrap().len(), 786);
        assert_eq!(formula_pool(1, 1).unwrap().len(), 5);
        assert!(matches!(formula_pool(3, 3), Err(Error::Resource { .. })));
    }

    #[test]
    fn instance_examples() {
        let m3 = axiom_instances(Schema::M3, 1, 0).unwrap();
        assert!(m3.contains(&parse("wbox(F, p0)").unwrap()));
        let cu = axiom_instances(Schema::CU, 2, 0).unwrap();
        assert!(cu.contains(&parse("diaU(p0,T) & diaU(p1,T) -> diaU(p0,p1)").unwrap()));
        let su = axiom_instances(Schema::SU, 1, 0).unwrap();
        assert_eq!(su, vec![parse("diaU(p0,p0) -> diaU(p0,p0)").unwrap()]);
        assert_eq!(axiom_instances(Schema::M2, 2, 0).unwrap().len(), 16);
        assert_eq!(Schema::M2.arity(), 3);
        assert_eq!(Schema::TU.arity(), 1);
        assert_eq!("cu".parse::<Schema>().unwrap(), Schema::CU);
        assert_eq!("4_U".parse::<Schema>().unwrap(), Schema::FourU);
        assert!("M9".parse::<Schema>().is_err());
    }

    #[test]
    fn single_world_full_frame_is_sound() {
        let rep = soundness_report(&corpus::single_world_full_frame(), 1, 2, DEFAULT_BUDGET).unwrap();
        assert!(rep.all_valid());
        assert_eq!(rep.pool_size, 16);
    }

    #[test]
    fn non_wmia_frame_reports_tu_or_cu() {
        let rep = soundness_report_unchecked(&non_wmia(), 0, 1, DEFAULT_BUDGET, Schema::ALL).unwrap();
        let bad: Vec<&str> = rep
            .schemas
            .iter()
            .filter(|s| !s.valid())
            .map(|s| s.schema.id())
            .collect();
        assert!(bad.contains(&"T_U"), "{bad:?}");
        let f = rep
            .schemas
            .iter()
            .find(|s| s.schema == Schema::TU)
            .unwrap()
            .failure
            .clone()
            .unwrap();
        let m = Model::new_unchecked(non_wmia(), f.valuation.clone()).unwrap();
        assert!(!m.eval(&f.instance).unwrap().has_atom(f.world));
        assert!(matches!(
            soundness_report(&non_wmia(), 0, 1, DEFAULT_BUDGET),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn fast_route_agrees_with_naive() {
        let frames = [corpus::worked_example_frame(), corpus::companion_frame(), non_wmia()];
        let light = [
            Schema::M1,
            Schema::M3,
            Schema::CU,
            Schema::TU,
            Schema::FourU,
            Schema::BU,
            Schema::SU,
        ];
        for f in &frames {
            let fast = soundness_report_unchecked(f, 1, 1, DEFAULT_BUDGET, &light).unwrap();
            let naive = soundness_report_naive(f, 1, 1, DEFAULT_BUDGET, &light).unwrap();
            for (a, b) in fast.schemas.iter().zip(&naive.schemas) {
                assert_eq!(a.valid(), b.valid(), "{}", a.schema);
                assert_eq!(a.instances, b.instances);
            }
        }
    }

    #[test]
    fn tuple_enumeration_order() {
        let mut seen = Vec::new();
        for_each_tuple(2, 2, |t| {
            seen.push(t.to_vec());
            true
        });
        assert_eq!(seen, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let mut calls = 0;
        for_each_tuple(3, 0, |_| {
            calls += 1;
            true
        });
        assert_eq!(calls, 1);
    }
}
