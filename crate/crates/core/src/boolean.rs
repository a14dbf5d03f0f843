//! Finite Boolean algebras as powersets of their atoms.
//!
//! An element is the set of atoms below it, stored as a bitmask: atom `i`
//! is bit `i`. Every finite Boolean algebra is atomic, so this loses nothing,
//! and the lattice operations become bitwise operations.

use std::fmt;
use std::ops::{BitAnd, BitOr};

use crate::error::{Error, Result};

/// Upper bound on the number of atoms. Element universes are enumerated, so
/// anything near this is already impractical for the quantified checks.
pub const MAX_ATOMS: usize = 24;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Element(u64);

impl Element {
    pub const ZERO: Element = Element(0);

    pub const fn from_bits(bits: u64) -> Self {
        Element(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub const fn singleton(atom: usize) -> Self {
        Element(1 << atom)
    }

    pub const fn has_atom(self, atom: usize) -> bool {
        self.0 >> atom & 1 == 1
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub const fn le(self, other: Element) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn meet(self, other: Element) -> Element {
        Element(self.0 & other.0)
    }

    pub const fn join(self, other: Element) -> Element {
        Element(self.0 | other.0)
    }

    /// `self · −other`.
    pub const fn minus(self, other: Element) -> Element {
        Element(self.0 & !other.0)
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Indices of the atoms below this element, ascending.
    pub fn atoms(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    /// All elements below `self`, ascending by bitmask.
    pub fn subsets(self) -> impl Iterator<Item = Element> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(Element(cur))
        })
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.atoms().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl BitOr for Element {
    type Output = Element;
    fn bitor(self, rhs: Element) -> Element {
        self.join(rhs)
    }
}

impl BitAnd for Element {
    type Output = Element;
    fn bitand(self, rhs: Element) -> Element {
        self.meet(rhs)
    }
}

/// Default atom names: `a`, `b`, `c`, … and `a26`, `a27`, … past `z`.
pub fn default_atom_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if i < 26 {
                char::from(b'a' + i as u8).to_string()
            } else {
                format!("a{i}")
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BooleanAlgebra {
    atoms: Vec<String>,
}

impl BooleanAlgebra {
    pub fn new(atoms: Vec<String>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Format("an algebra needs at least one atom".into()));
        }
        if atoms.len() > MAX_ATOMS {
            return Err(Error::Format(format!(
                "{} atoms exceeds the limit of {MAX_ATOMS}",
                atoms.len()
            )));
        }
        for (i, a) in atoms.iter().enumerate() {
            if a.is_empty() || a.contains(',') {
                return Err(Error::Format(format!("invalid atom name `{a}`")));
            }
            if atoms[..i].contains(a) {
                return Err(Error::Format(format!("duplicate atom `{a}`")));
            }
        }
        Ok(BooleanAlgebra { atoms })
    }

    /// Algebra with `n` atoms named by [`default_atom_names`].
    pub fn with_atoms(n: usize) -> Result<Self> {
        Self::new(default_atom_names(n))
    }

    pub fn atom_names(&self) -> &[String] {
        &self.atoms
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn num_elements(&self) -> usize {
        1 << self.atoms.len()
    }

    pub fn zero(&self) -> Element {
        Element::ZERO
    }

    pub fn one(&self) -> Element {
        Element((1u64 << self.atoms.len()) - 1)
    }

    pub fn atom(&self, i: usize) -> Element {
        debug_assert!(i < self.atoms.len());
        Element::singleton(i)
    }

    pub fn atoms(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.atoms.len()).map(Element::singleton)
    }

    pub fn complement(&self, x: Element) -> Element {
        Element(!x.0 & self.one().0)
    }

    pub fn contains(&self, x: Element) -> bool {
        x.le(self.one())
    }

    /// Every element, ascending by bitmask. This is the lexicographic
    /// element order used for witnesses.
    pub fn elements(&self) -> impl Iterator<Item = Element> + Clone {
        (0..1u64 << self.atoms.len()).map(Element)
    }

    /// `x·y + −(x+y)`; equals 1 exactly when `x = y`.
    pub fn symmetric_sum(&self, x: Element, y: Element) -> Result<Element> {
        if !self.contains(x) || !self.contains(y) {
            return Err(Error::Usage(format!(
                "symmetric sum of {x:?} and {y:?} outside a {}-atom algebra",
                self.num_atoms()
            )));
        }
        Ok(self.nabla(x, y))
    }

    pub(crate) fn nabla(&self, x: Element, y: Element) -> Element {
        (x & y) | self.complement(x | y)
    }

    /// The principal ultrafilters `↑a`, one per atom, in atom order.
    pub fn ultrafilters(&self) -> Vec<Filter> {
        self.atoms().map(Filter::principal).collect()
    }

    /// `x θ_F y` iff `x ∇ y ∈ F`.
    pub fn theta_of_filter(&self, filter: &Filter) -> Congruence {
        Congruence::from_relation(self, |x, y| filter.contains(self.nabla(x, y)))
    }

    pub fn element_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Element> {
        let mut e = Element::ZERO;
        for n in names {
            let n = n.as_ref();
            let i = self
                .atoms
                .iter()
                .position(|a| a == n)
                .ok_or_else(|| Error::Format(format!("unknown atom `{n}`")))?;
            e = e | Element::singleton(i);
        }
        Ok(e)
    }

    /// Atom names of `x` in declared order.
    pub fn element_names(&self, x: Element) -> Vec<String> {
        x.atoms().map(|i| self.atoms[i].clone()).collect()
    }

    /// Compact rendering such as `0`, `1`, `a`, `a+c`.
    pub fn show(&self, x: Element) -> String {
        if x.is_zero() {
            "0".into()
        } else if x == self.one() && self.num_atoms() > 1 {
            "1".into()
        } else {
            self.element_names(x).join("+")
        }
    }
}

/// A filter of a finite algebra, stored by its generator: `F = ↑c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Filter {
    generator: Element,
}

impl Filter {
    pub fn principal(generator: Element) -> Self {
        Filter { generator }
    }

    /// Normalizes an arbitrary (nonempty) filter given by its members to
    /// the principal filter of their meet. An empty list yields `↑1`.
    pub fn generated_by(algebra: &BooleanAlgebra, members: &[Element]) -> Self {
        let c = members.iter().fold(algebra.one(), |acc, &m| acc & m);
        Filter::principal(c)
    }

    pub fn generator(&self) -> Element {
        self.generator
    }

    pub fn contains(&self, x: Element) -> bool {
        self.generator.le(x)
    }

    pub fn members<'a>(&self, algebra: &'a BooleanAlgebra) -> impl Iterator<Item = Element> + 'a {
        let c = self.generator;
        algebra.elements().filter(move |x| c.le(*x))
    }

    pub fn is_proper(&self) -> bool {
        !self.generator.is_zero()
    }
}

/// A partition of the element universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Congruence {
    classes: Vec<Vec<Element>>,
    class_of: Vec<usize>,
}

impl Congruence {
    /// Builds the partition induced by an equivalence predicate. The
    /// predicate is trusted to be an equivalence; each element joins the
    /// class of the first earlier element it relates to.
    pub fn from_relation(algebra: &BooleanAlgebra, related: impl Fn(Element, Element) -> bool) -> Self {
        let mut classes: Vec<Vec<Element>> = Vec::new();
        let mut class_of = vec![usize::MAX; algebra.num_elements()];
        for x in algebra.elements() {
            let found = classes.iter().position(|cls| related(cls[0], x));
            let idx = match found {
                Some(i) => i,
                None => {
                    classes.push(Vec::new());
                    classes.len() - 1
                }
            };
            classes[idx].push(x);
            class_of[x.bits() as usize] = idx;
        }
        Congruence { classes, class_of }
    }

    pub fn classes(&self) -> &[Vec<Element>] {
        &self.classes
    }

    pub fn class_index(&self, x: Element) -> usize {
        self.class_of[x.bits() as usize]
    }

    /// First member of the class of `x`.
    pub fn representative(&self, x: Element) -> Element {
        self.classes[self.class_index(x)][0]
    }

    pub fn related(&self, x: Element, y: Element) -> bool {
        self.class_index(x) == self.class_index(y)
    }

    /// `F_θ = {a : a θ 1}`.
    pub fn filter_of_top(&self, algebra: &BooleanAlgebra) -> Filter {
        let top = &self.classes[self.class_index(algebra.one())];
        Filter::generated_by(algebra, top)
    }

    pub fn is_identity(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 1)
    }

    pub fn is_universal(&self) -> bool {
        self.classes.len() == 1
    }

    /// Exhaustive compatibility with `+`, `·` and `−`.
    pub fn is_boolean_congruence(&self, algebra: &BooleanAlgebra) -> bool {
        for x in algebra.elements() {
            let cx = self.class_index(x);
            for x2 in algebra.elements().filter(|&e| self.class_index(e) == cx) {
                if !self.related(algebra.complement(x), algebra.complement(x2)) {
                    return false;
                }
                for y in algebra.elements() {
                    if !self.related(x | y, x2 | y) || !self.related(x & y, x2 & y) {
                        return false;
                    }
                }
            }
        }
        true
    }
}
