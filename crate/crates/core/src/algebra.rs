//! PS-algebras: a finite Boolean algebra with a binary possibility operator
//! `f` and a binary sufficiency operator `g`.
//!
//! Both operators are stored on atom pairs only. The possibility operator
//! extends to all pairs by joins (normal and additive), the sufficiency
//! operator by meets (co-normal and co-additive), so every pair of atom
//! tables is a legal PS-algebra.

use std::fmt;
use std::str::FromStr;

use crate::boolean::{BooleanAlgebra, Element, Filter};
use crate::error::{Error, Result};

/// Full operator tables are materialized up to this many atoms.
const FULL_TABLE_ATOMS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Possibility,
    Sufficiency,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OperatorTable {
    kind: OperatorKind,
    n: usize,
    entries: Vec<Element>,
}

impl OperatorTable {
    /// `entries[p * n + q]` is the value at the atom pair `(p, q)`.
    pub fn new(kind: OperatorKind, n: usize, entries: Vec<Element>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Format(format!(
                "operator table needs {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        let top = (1u64 << n) - 1;
        if let Some(e) = entries.iter().find(|e| e.bits() & !top != 0) {
            return Err(Error::Format(format!("table value {e:?} outside the algebra")));
        }
        Ok(OperatorTable { kind, n, entries })
    }

    pub fn from_fn(kind: OperatorKind, n: usize, mut at: impl FnMut(usize, usize) -> Element) -> Self {
        let entries = (0..n * n).map(|k| at(k / n, k % n)).collect();
        OperatorTable { kind, n, entries }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn num_atoms(&self) -> usize {
        self.n
    }

    pub fn at(&self, p: usize, q: usize) -> Element {
        self.entries[p * self.n + q]
    }

    pub fn entries(&self) -> &[Element] {
        &self.entries
    }

    /// Additive (possibility) or co-additive (sufficiency) extension to an
    /// arbitrary pair, by the table's kind.
    pub fn extend(&self, x: Element, y: Element) -> Element {
        match self.kind {
            OperatorKind::Possibility => x
                .atoms()
                .flat_map(|p| y.atoms().map(move |q| (p, q)))
                .fold(Element::ZERO, |acc, (p, q)| acc | self.at(p, q)),
            OperatorKind::Sufficiency => {
                let top = Element::from_bits((1u64 << self.n) - 1);
                x.atoms()
                    .flat_map(|p| y.atoms().map(move |q| (p, q)))
                    .fold(top, |acc, (p, q)| acc & self.at(p, q))
            }
        }
    }
}

/// `f(x,y)`: join of the atom entries below `x × y`.
pub fn extend_f(table: &OperatorTable, x: Element, y: Element) -> Result<Element> {
    if table.kind != OperatorKind::Possibility {
        return Err(Error::Usage("extend_f needs a possibility table".into()));
    }
    Ok(table.extend(x, y))
}

/// `g(x,y)`: meet of the atom entries below `x × y`.
pub fn extend_g(table: &OperatorTable, x: Element, y: Element) -> Result<Element> {
    if table.kind != OperatorKind::Sufficiency {
        return Err(Error::Usage("extend_g needs a sufficiency table".into()));
    }
    Ok(table.extend(x, y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DerivedOp {
    /// `f∂(x,y) = −f(−x,−y)`
    FDual,
    /// `g*(x,y) = g(−x,−y)`
    GStar,
    /// `u = f∂ · g*`
    U,
    /// `h = f + −g`
    H,
    /// `u¹(x) = u(x,0)`
    U1,
    /// `d(x) = f(x,x) + −g(x,x)`
    D,
}

impl DerivedOp {
    pub fn is_unary(self) -> bool {
        matches!(self, DerivedOp::U1 | DerivedOp::D)
    }

    pub fn name(self) -> &'static str {
        match self {
            DerivedOp::FDual => "fdual",
            DerivedOp::GStar => "gstar",
            DerivedOp::U => "u",
            DerivedOp::H => "h",
            DerivedOp::U1 => "u1",
            DerivedOp::D => "d",
        }
    }
}

impl FromStr for DerivedOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fdual" => DerivedOp::FDual,
            "gstar" => DerivedOp::GStar,
            "u" => DerivedOp::U,
            "h" => DerivedOp::H,
            "u1" => DerivedOp::U1,
            "d" => DerivedOp::D,
            _ => return Err(Error::Usage(format!("unknown derived operator `{s}`"))),
        })
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct PsAlgebra {
    base: BooleanAlgebra,
    f: OperatorTable,
    g: OperatorTable,
    full: Option<(Vec<Element>, Vec<Element>)>,
}

impl fmt::Debug for PsAlgebra {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.debug_struct("PsAlgebra")
            .field("atoms", &self.base.atom_names())
            .field("f", &self.f.entries)
            .field("g", &self.g.entries)
            .finish()
    }
}

impl PsAlgebra {
    pub fn new(base: BooleanAlgebra, f: OperatorTable, g: OperatorTable) -> Result<Self> {
        let n = base.num_atoms();
        if f.kind != OperatorKind::Possibility || g.kind != OperatorKind::Sufficiency {
            return Err(Error::Usage("expected a possibility and a sufficiency table".into()));
        }
        if f.n != n || g.n != n {
            return Err(Error::Format("operator tables sized for a different algebra".into()));
        }
        let full = (n <= FULL_TABLE_ATOMS).then(|| (materialize(&f), materialize(&g)));
        Ok(PsAlgebra { base, f, g, full })
    }

    /// Algebra on `n` default-named atoms from atom-level functions.
    pub fn from_atom_fns(
        n: usize,
        f: impl FnMut(usize, usize) -> Element,
        g: impl FnMut(usize, usize) -> Element,
    ) -> Result<Self> {
        let base = BooleanAlgebra::with_atoms(n)?;
        Self::new(
            base,
            OperatorTable::from_fn(OperatorKind::Possibility, n, f),
            OperatorTable::from_fn(OperatorKind::Sufficiency, n, g),
        )
    }

    pub fn base(&self) -> &BooleanAlgebra {
        &self.base
    }

    pub fn f_table(&self) -> &OperatorTable {
        &self.f
    }

    pub fn g_table(&self) -> &OperatorTable {
        &self.g
    }

    pub fn num_atoms(&self) -> usize {
        self.base.num_atoms()
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + Clone {
        self.base.elements()
    }

    pub fn zero(&self) -> Element {
        Element::ZERO
    }

    pub fn one(&self) -> Element {
        self.base.one()
    }

    pub fn neg(&self, x: Element) -> Element {
        self.base.complement(x)
    }

    fn index(&self, x: Element, y: Element) -> usize {
        ((x.bits() as usize) << self.num_atoms()) | y.bits() as usize
    }

    pub fn f(&self, x: Element, y: Element) -> Element {
        match &self.full {
            Some((ft, _)) => ft[self.index(x, y)],
            None => self.f.extend(x, y),
        }
    }

    pub fn g(&self, x: Element, y: Element) -> Element {
        match &self.full {
            Some((_, gt)) => gt[self.index(x, y)],
            None => self.g.extend(x, y),
        }
    }

    pub fn f_dual(&self, x: Element, y: Element) -> Element {
        self.neg(self.f(self.neg(x), self.neg(y)))
    }

    pub fn g_star(&self, x: Element, y: Element) -> Element {
        self.g(self.neg(x), self.neg(y))
    }

    pub fn u(&self, x: Element, y: Element) -> Element {
        self.f_dual(x, y) & self.g_star(x, y)
    }

    /// `u∂(x,y) = −u(−x,−y)`
    pub fn u_dual(&self, x: Element, y: Element) -> Element {
        self.neg(self.u(self.neg(x), self.neg(y)))
    }

    pub fn h(&self, x: Element, y: Element) -> Element {
        self.f(x, y) | self.neg(self.g(x, y))
    }

    pub fn u1(&self, x: Element) -> Element {
        self.u(x, Element::ZERO)
    }

    pub fn d(&self, x: Element) -> Element {
        self.f(x, x) | self.neg(self.g(x, x))
    }

    pub fn derived(&self, op: DerivedOp, x: Element, y: Option<Element>) -> Result<Element> {
        if !self.base.contains(x) || y.is_some_and(|y| !self.base.contains(y)) {
            return Err(Error::Usage("argument outside the algebra".into()));
        }
        match (op.is_unary(), y) {
            (true, Some(_)) => Err(Error::Usage(format!("`{}` takes one argument", op.name()))),
            (false, None) => Err(Error::Usage(format!("`{}` takes two arguments", op.name()))),
            (true, None) => Ok(match op {
                DerivedOp::U1 => self.u1(x),
                _ => self.d(x),
            }),
            (false, Some(y)) => Ok(match op {
                DerivedOp::FDual => self.f_dual(x, y),
                DerivedOp::GStar => self.g_star(x, y),
                DerivedOp::U => self.u(x, y),
                _ => self.h(x, y),
            }),
        }
    }

    /// Checks that `θ_F` preserves `f∂` and `g*` by comparing every value
    /// with the value at the class representatives of its arguments.
    pub fn is_congruence_filter_direct(&self, filter: &Filter) -> bool {
        let theta = self.base.theta_of_filter(filter);
        self.elements().all(|x| {
            let rx = theta.representative(x);
            self.elements().all(|y| {
                let ry = theta.representative(y);
                theta.related(self.f_dual(x, y), self.f_dual(rx, ry))
                    && theta.related(self.g_star(x, y), self.g_star(rx, ry))
            })
        })
    }

    /// `u(a,0)·u(0,a) ∈ F` for all `a ∈ F`.
    pub fn is_congruence_filter_u(&self, filter: &Filter) -> bool {
        filter
            .members(&self.base)
            .all(|a| filter.contains(self.u(a, Element::ZERO) & self.u(Element::ZERO, a)))
    }

    /// All congruence filters, by ascending generator.
    pub fn congruence_filters(&self) -> Vec<Filter> {
        self.elements()
            .map(Filter::principal)
            .filter(|f| self.is_congruence_filter_direct(f))
            .collect()
    }

    /// Only `↑1` and `↑0` are congruence filters.
    pub fn is_simple(&self) -> bool {
        self.nontrivial_congruence_filter().is_none()
    }

    pub(crate) fn nontrivial_congruence_filter(&self) -> Option<Filter> {
        self.elements()
            .filter(|&c| c != self.zero() && c != self.one())
            .map(Filter::principal)
            .find(|f| self.is_congruence_filter_direct(f))
    }

    /// Same algebra with renamed atoms.
    pub fn with_atom_names(&self, names: Vec<String>) -> Result<Self> {
        let base = BooleanAlgebra::new(names)?;
        if base.num_atoms() != self.num_atoms() {
            return Err(Error::Usage("atom count mismatch".into()));
        }
        PsAlgebra::new(base, self.f.clone(), self.g.clone())
    }
}

fn materialize(table: &OperatorTable) -> Vec<Element> {
    let n = table.n;
    let size = 1usize << n;
    // row[p][y]: extension of atom p against y
    let mut row = vec![Element::ZERO; n * size];
    let unit = match table.kind {
        OperatorKind::Possibility => Element::ZERO,
        OperatorKind::Sufficiency => Element::from_bits((1u64 << n) - 1),
    };
    let combine = |a: Element, b: Element| match table.kind {
        OperatorKind::Possibility => a | b,
        OperatorKind::Sufficiency => a & b,
    };
    for p in 0..n {
        row[p * size] = unit;
        for y in 1..size {
            let q = y.trailing_zeros() as usize;
            row[p * size + y] = combine(row[p * size + (y & (y - 1))], table.at(p, q));
        }
    }
    let mut full = vec![unit; size * size];
    for x in 1..size {
        let p = x.trailing_zeros() as usize;
        let rest = x & (x - 1);
        for y in 0..size {
            full[x * size + y] = combine(full[rest * size + y], row[p * size + y]);
        }
    }
    full
}
