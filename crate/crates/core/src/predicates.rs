//! Exhaustively quantified predicates on PS-algebras.
//!
//! Every predicate is a universally quantified condition over a fixed number
//! of element variables. A check walks all tuples in lexicographic element
//! order (first coordinate most significant, elements by bitmask) and stops
//! at the first violation, which becomes the witness.

use std::fmt;
use std::str::FromStr;

use crate::algebra::PsAlgebra;
use crate::boolean::{Element, Filter};
use crate::error::{Error, Result};
use crate::frames::WorldSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Elements(Vec<Element>),
    /// World indices; for frame properties this is the violating tuple.
    Worlds(Vec<usize>),
    /// A valuation (one world set per variable) and the world where a
    /// formula fails.
    Countermodel {
        valuation: Vec<WorldSet>,
        world: usize,
    },
    /// A formula (sugared text) globally true in exactly one of two models.
    Disagreement {
        formula: String,
        true_in_left: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateReport {
    pub id: String,
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl PredicateReport {
    pub fn holds(id: impl Into<String>) -> Self {
        PredicateReport {
            id: id.into(),
            holds: true,
            witness: None,
        }
    }

    pub fn fails(id: impl Into<String>, witness: Witness) -> Self {
        PredicateReport {
            id: id.into(),
            holds: false,
            witness: Some(witness),
        }
    }

    pub fn element_witness(&self) -> Option<&[Element]> {
        match &self.witness {
            Some(Witness::Elements(e)) => Some(e),
            _ => None,
        }
    }

    pub fn world_witness(&self) -> Option<&[usize]> {
        match &self.witness {
            Some(Witness::Worlds(w)) => Some(w),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgebraPredicate {
    Normality,
    Additivity,
    CoNormality,
    CoAdditivity,
    IsotoneF,
    AntitoneG,
    WMia,
    DMia,
    Eq41,
    Eq42,
    Eq43,
    Eq44,
    Eq45,
    UZeroSymmetric,
    UCommutative,
    URange01,
    Discriminator,
    DualDiscriminatorU1,
    Abt0,
    Abt1,
    Abt1G,
    Abt2,
    Abt3,
    Simple,
}

use AlgebraPredicate as P;

/// The equational suite Σ.
pub const SIGMA: &[AlgebraPredicate] = &[
    P::Normality,
    P::Additivity,
    P::CoNormality,
    P::CoAdditivity,
    P::Eq41,
    P::Eq42,
    P::Eq43,
    P::Eq44,
    P::Eq45,
];

/// Σ together with the algebraic betweenness axioms.
pub const SIGMA_B: &[AlgebraPredicate] = &[
    P::Normality,
    P::Additivity,
    P::CoNormality,
    P::CoAdditivity,
    P::Eq41,
    P::Eq42,
    P::Eq43,
    P::Eq44,
    P::Eq45,
    P::Abt0,
    P::Abt1,
    P::Abt1G,
    P::Abt2,
    P::Abt3,
];

/// A b-algebra is a weak MIA meeting every ABT axiom.
pub const B_ALGEBRA: &[AlgebraPredicate] = &[P::WMia, P::Abt0, P::Abt1, P::Abt1G, P::Abt2, P::Abt3];

impl AlgebraPredicate {
    pub const ALL: &'static [AlgebraPredicate] = &[
        P::Normality,
        P::Additivity,
        P::CoNormality,
        P::CoAdditivity,
        P::IsotoneF,
        P::AntitoneG,
        P::WMia,
        P::DMia,
        P::Eq41,
        P::Eq42,
        P::Eq43,
        P::Eq44,
        P::Eq45,
        P::UZeroSymmetric,
        P::UCommutative,
        P::URange01,
        P::Discriminator,
        P::DualDiscriminatorU1,
        P::Abt0,
        P::Abt1,
        P::Abt1G,
        P::Abt2,
        P::Abt3,
        P::Simple,
    ];

    pub fn id(self) -> &'static str {
        match self {
            P::Normality => "normality",
            P::Additivity => "additivity",
            P::CoNormality => "co-normality",
            P::CoAdditivity => "co-additivity",
            P::IsotoneF => "isotone-f",
            P::AntitoneG => "antitone-g",
            P::WMia => "wMIA",
            P::DMia => "dMIA",
            P::Eq41 => "eq41",
            P::Eq42 => "eq42",
            P::Eq43 => "eq43",
            P::Eq44 => "eq44",
            P::Eq45 => "eq45",
            P::UZeroSymmetric => "u-zero-symmetric",
            P::UCommutative => "u-commutative",
            P::URange01 => "u-range-01",
            P::Discriminator => "discriminator",
            P::DualDiscriminatorU1 => "dual-discriminator-u1",
            P::Abt0 => "abt0",
            P::Abt1 => "abt1",
            P::Abt1G => "abt1g",
            P::Abt2 => "abt2",
            P::Abt3 => "abt3",
            P::Simple => "simple",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            P::Normality
            | P::CoNormality
            | P::Eq41
            | P::Eq42
            | P::Eq43
            | P::Eq44
            | P::UZeroSymmetric
            | P::Discriminator
            | P::DualDiscriminatorU1
            | P::Abt0
            | P::Simple => 1,
            P::WMia | P::DMia | P::Eq45 | P::UCommutative | P::URange01 | P::Abt1 | P::Abt1G | P::Abt3 => 2,
            P::Additivity | P::CoAdditivity | P::IsotoneF | P::AntitoneG | P::Abt2 => 3,
        }
    }

    /// Whether the condition fails at this tuple of `arity()` elements.
    pub fn violated_at(self, a: &PsAlgebra, t: &[Element]) -> bool {
        let z = Element::ZERO;
        let one = a.one();
        match self {
            P::Normality => !a.f(t[0], z).is_zero() || !a.f(z, t[0]).is_zero(),
            P::CoNormality => a.g(t[0], z) != one || a.g(z, t[0]) != one,
            P::Additivity => {
                let (x, y, y2) = (t[0], t[1], t[2]);
                a.f(x, y) | a.f(x, y2) != a.f(x, y | y2) || a.f(y, x) | a.f(y2, x) != a.f(y | y2, x)
            }
            P::CoAdditivity => {
                let (x, y, y2) = (t[0], t[1], t[2]);
                a.g(x, y) & a.g(x, y2) != a.g(x, y | y2) || a.g(y, x) & a.g(y2, x) != a.g(y | y2, x)
            }
            P::IsotoneF => {
                let (x, x2, y) = (t[0], t[1], t[2]);
                x.le(x2) && (!a.f(x, y).le(a.f(x2, y)) || !a.f(y, x).le(a.f(y, x2)))
            }
            P::AntitoneG => {
                let (x, x2, y) = (t[0], t[1], t[2]);
                x.le(x2) && (!a.g(x2, y).le(a.g(x, y)) || !a.g(y, x2).le(a.g(y, x)))
            }
            P::WMia => !t[0].is_zero() && !t[1].is_zero() && !a.g(t[0], t[1]).le(a.f(t[0], t[1])),
            P::DMia => !(t[0] & t[1]).is_zero() && !a.g(t[0], t[1]).le(a.f(t[0], t[1])),
            P::Eq41 => !a.u1(t[0]).le(t[0]),
            P::Eq42 => !a.u1(t[0]).le(a.u1(a.u1(t[0]))),
            // x ≤ u(u¹∂(x), 0) with u¹∂(x) = −u(−x,0) = u∂(x,1): the S5 axiom B for u¹
            P::Eq43 => !t[0].le(a.u1(a.u_dual(t[0], one))),
            P::Eq44 => {
                let x = t[0];
                let ux0 = a.u(x, z);
                a.u(x, x) != ux0 || ux0 != a.u(z, x)
            }
            P::Eq45 => a.u(t[0], t[1]) != a.u(t[0], z) | a.u(z, t[1]),
            P::UZeroSymmetric => a.u(t[0], z) != a.u(z, t[0]),
            P::UCommutative => a.u(t[0], t[1]) != a.u(t[1], t[0]),
            P::URange01 => {
                let v = a.u(t[0], t[1]);
                v != z && v != one
            }
            P::Discriminator => a.d(t[0]) != if t[0].is_zero() { z } else { one },
            P::DualDiscriminatorU1 => a.u1(t[0]) != if t[0] == one { one } else { z },
            P::Abt0 => !t[0].le(a.f(t[0], t[0])),
            P::Abt1 => !a.f(t[0], t[1]).le(a.f(t[1], t[0])),
            P::Abt1G => !a.g(t[0], t[1]).le(a.g(t[1], t[0])),
            P::Abt2 => {
                let (x, y, zz) = (t[0], t[1], t[2]);
                !(y & a.f(x, zz)).le(a.f(x & a.f(x, y), zz))
            }
            P::Abt3 => {
                let (x, y) = (t[0], t[1]);
                !a.f(x, a.g(x, a.neg(y)) & y).le(y)
            }
            P::Simple => t[0] != z && t[0] != one && a.is_congruence_filter_direct(&Filter::principal(t[0])),
        }
    }

    /// Exhaustive check with a first-in-lexicographic-order witness.
    pub fn check(self, a: &PsAlgebra) -> PredicateReport {
        let n = a.base().num_elements();
        let k = self.arity();
        let total = n.pow(k as u32);
        let mut tuple = vec![Element::ZERO; k];
        for idx in 0..total {
            let mut rest = idx;
            for slot in tuple.iter_mut().rev() {
                *slot = Element::from_bits((rest % n) as u64);
                rest /= n;
            }
            if self.violated_at(a, &tuple) {
                return PredicateReport::fails(self.id(), Witness::Elements(tuple));
            }
        }
        PredicateReport::holds(self.id())
    }

    pub fn holds(self, a: &PsAlgebra) -> bool {
        self.check(a).holds
    }
}

impl fmt::Display for AlgebraPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for AlgebraPredicate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim();
        AlgebraPredicate::ALL
            .iter()
            .copied()
            .find(|p| p.id().eq_ignore_ascii_case(wanted))
            .ok_or_else(|| Error::UnknownPredicate(wanted.to_string()))
    }
}

/// Looks up `id` and runs it.
pub fn check_algebra_predicate(a: &PsAlgebra, id: &str) -> Result<PredicateReport> {
    Ok(id.parse::<AlgebraPredicate>()?.check(a))
}

/// Parses a comma-separated list of ids. `sigma`, `sigmaB` and `b-algebra`
/// expand to their member predicates.
pub fn parse_predicate_list(list: &str) -> Result<Vec<AlgebraPredicate>> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let expanded: &[AlgebraPredicate] = match item.to_ascii_lowercase().as_str() {
            "sigma" => SIGMA,
            "sigmab" => SIGMA_B,
            "b-algebra" | "balgebra" => B_ALGEBRA,
            _ => {
                out.push(item.parse()?);
                continue;
            }
        };
        out.extend_from_slice(expanded);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    const A: Element = Element::from_bits(1);

    #[test]
    fn eq45_not_wmia_verdicts() {
        let alg = corpus::eq45_not_wmia();
        let w = P::WMia.check(&alg);
        assert!(!w.holds);
        assert_eq!(w.element_witness(), Some(&[A, A][..]));
        assert!(P::Eq45.holds(&alg));
        assert!(!P::DMia.holds(&alg));
    }

    #[test]
    fn top_algebra_is_wmia() {
        for n in 1..=3 {
            assert!(P::WMia.holds(&corpus::top_algebra(n)));
        }
    }

    #[test]
    fn unknown_ids_are_errors() {
        let alg = corpus::top_algebra(1);
        assert!(matches!(
            check_algebra_predicate(&alg, "eq46"),
            Err(Error::UnknownPredicate(_))
        ));
        assert!(check_algebra_predicate(&alg, "WMIA").unwrap().holds);
    }

    #[test]
    fn predicate_lists_expand_aliases() {
        let list = parse_predicate_list("sigma, wMIA").unwrap();
        assert_eq!(list.len(), SIGMA.len() + 1);
        assert_eq!(parse_predicate_list("b-algebra").unwrap(), B_ALGEBRA);
        assert!(parse_predicate_list("wMIA,nope").is_err());
    }

    #[test]
    fn ids_round_trip() {
        for &p in AlgebraPredicate::ALL {
            assert_eq!(p.id().parse::<AlgebraPredicate>().unwrap(), p);
        }
    }

    #[test]
    fn witnesses_re_evaluate_as_violations() {
        for (_, alg) in corpus::regression_algebras() {
            for &p in AlgebraPredicate::ALL {
                let r = p.check(&alg);
                if let Some(w) = r.element_witness() {
                    assert!(p.violated_at(&alg, w));
                }
            }
        }
    }

    #[test]
    fn structural_laws_hold_on_the_corpus() {
        for (name, alg) in corpus::regression_algebras() {
            for p in [
                P::Normality,
                P::Additivity,
                P::CoNormality,
                P::CoAdditivity,
                P::IsotoneF,
                P::AntitoneG,
            ] {
                assert!(p.holds(&alg), "{name}: {p}");
            }
        }
    }
}
