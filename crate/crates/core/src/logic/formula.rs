//! K# formulas over the primitives `⊤, p_k, ¬, ∧, ◇, ⊟`. Everything else is
//! sugar, expanded by the constructors below.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Var(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Dia(Box<Formula>, Box<Formula>),
    WBox(Box<Formula>, Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn top() -> Self {
        Top
    }

    pub fn bot() -> Self {
        Top.not()
    }

    pub fn var(k: usize) -> Self {
        Var(k)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Self {
        And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Self {
        self.not().and(other.not()).not()
    }

    pub fn imp(self, other: Formula) -> Self {
        self.and(other.not()).not()
    }

    pub fn iff(self, other: Formula) -> Self {
        self.clone().imp(other.clone()).and(other.imp(self))
    }

    pub fn dia(a: Formula, b: Formula) -> Self {
        Dia(Box::new(a), Box::new(b))
    }

    pub fn wbox(a: Formula, b: Formula) -> Self {
        WBox(Box::new(a), Box::new(b))
    }

    /// `□(φ,ψ) = ¬◇(¬φ,¬ψ)`
    pub fn boxx(a: Formula, b: Formula) -> Self {
        Self::dia(a.not(), b.not()).not()
    }

    /// `¬⊟(¬φ,¬ψ)`
    pub fn wdia(a: Formula, b: Formula) -> Self {
        Self::wbox(a.not(), b.not()).not()
    }

    /// `◇(φ,ψ) ∨ ¬⊟(φ,ψ)`
    pub fn dia_u(a: Formula, b: Formula) -> Self {
        Self::dia(a.clone(), b.clone()).or(Self::wbox(a, b).not())
    }

    /// `□(φ,ψ) ∧ ⊟(¬φ,¬ψ)`
    pub fn box_u(a: Formula, b: Formula) -> Self {
        Self::boxx(a.clone(), b.clone()).and(Self::wbox(a.not(), b.not()))
    }

    /// One past the largest variable index, 0 for closed formulas.
    pub fn var_bound(&self) -> usize {
        match self {
            Top => 0,
            Var(k) => k + 1,
            Not(a) => a.var_bound(),
            And(a, b) | Dia(a, b) | WBox(a, b) => a.var_bound().max(b.var_bound()),
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Top | Var(_) => 0,
            Not(a) => a.modal_depth(),
            And(a, b) => a.modal_depth().max(b.modal_depth()),
            Dia(a, b) | WBox(a, b) => 1 + a.modal_depth().max(b.modal_depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Top | Var(_) => 1,
            Not(a) => 1 + a.size(),
            And(a, b) | Dia(a, b) | WBox(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Replaces `p_k` by `subst[k]`.
    pub fn substitute(&self, subst: &[Formula]) -> Formula {
        match self {
            Top => Top,
            Var(k) => subst[*k].clone(),
            Not(a) => a.substitute(subst).not(),
            And(a, b) => a.substitute(subst).and(b.substitute(subst)),
            Dia(a, b) => Self::dia(a.substitute(subst), b.substitute(subst)),
            WBox(a, b) => Self::wbox(a.substitute(subst), b.substitute(subst)),
        }
    }

    /// Primitive syntax only, e.g. `~(p0 & ~wbox(~T, p1))`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        render_plain(self, &mut s);
        s
    }

    /// Recovers `F | -> <-> box wdia diaU boxU` where the shape allows.
    pub fn render_sugared(&self) -> String {
        let mut s = String::new();
        write_sugar(&sugar(self), 0, &mut s);
        s
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_sugared())
    }
}

fn render_plain(phi: &Formula, out: &mut String) {
    match phi {
        Top => out.push('T'),
        Var(k) => {
            out.push('p');
            out.push_str(&k.to_string());
        }
        Not(a) => {
            out.push('~');
            if matches!(**a, And(..)) {
                out.push('(');
                render_plain(a, out);
                out.push(')');
            } else {
                render_plain(a, out);
            }
        }
        And(a, b) => {
            for (i, c) in [a, b].into_iter().enumerate() {
                if i == 1 {
                    out.push_str(" & ");
                }
                if matches!(**c, And(..)) {
                    out.push('(');
                    render_plain(c, out);
                    out.push(')');
                } else {
                    render_plain(c, out);
                }
            }
        }
        Dia(a, b) | WBox(a, b) => {
            out.push_str(if matches!(phi, Dia(..)) { "dia(" } else { "wbox(" });
            render_plain(a, out);
            out.push_str(", ");
            render_plain(b, out);
            out.push(')');
        }
    }
}

/// Display tree with sugar recovered.
enum Sugar {
    Atom(String),
    Neg(Box<Sugar>),
    Infix(&'static str, u8, Box<Sugar>, Box<Sugar>),
    Call(&'static str, Box<Sugar>, Box<Sugar>),
}

fn un_not(phi: &Formula) -> Option<&Formula> {
    match phi {
        Not(a) => Some(a),
        _ => None,
    }
}

fn un_and(phi: &Formula) -> Option<(&Formula, &Formula)> {
    match phi {
        And(a, b) => Some((a, b)),
        _ => None,
    }
}

/// `~(a & ~b)` as `(a, b)`.
fn un_imp(phi: &Formula) -> Option<(&Formula, &Formula)> {
    let (a, nb) = un_and(un_not(phi)?)?;
    Some((a, un_not(nb)?))
}

/// `~(~a & ~b)` as `(a, b)`.
fn un_or(phi: &Formula) -> Option<(&Formula, &Formula)> {
    let (na, nb) = un_and(un_not(phi)?)?;
    Some((un_not(na)?, un_not(nb)?))
}

fn sugar(phi: &Formula) -> Sugar {
    let bx = |s| Box::new(s);
    let call = |name, a: &Formula, b: &Formula| Sugar::Call(name, bx(sugar(a)), bx(sugar(b)));
    let infix = |op, prec, a: &Formula, b: &Formula| Sugar::Infix(op, prec, bx(sugar(a)), bx(sugar(b)));

    // diaU: ~(~dia(a,b) & ~~wbox(a,b))
    if let Some((d, nw)) = un_or(phi) {
        if let (Dia(a, b), Some(WBox(a2, b2))) = (d, un_not(nw)) {
            if a == a2 && b == b2 {
                return call("diaU", a, b);
            }
        }
    }
    // boxU: ~dia(~a,~b) & wbox(~a,~b)
    if let Some((l, r)) = un_and(phi) {
        if let (Some(Dia(na, nb)), WBox(na2, nb2)) = (un_not(l), r) {
            if na == na2 && nb == nb2 {
                if let (Some(a), Some(b)) = (un_not(na), un_not(nb)) {
                    return call("boxU", a, b);
                }
            }
        }
        if let (Some((a, b)), Some((b2, a2))) = (un_imp(l), un_imp(r)) {
            if a == a2 && b == b2 {
                return infix("<->", 1, a, b);
            }
        }
    }
    match phi {
        Top => Sugar::Atom("T".into()),
        Var(k) => Sugar::Atom(format!("p{k}")),
        Not(a) => {
            if let Top = **a {
                return Sugar::Atom("F".into());
            }
            if let Some((x, y)) = un_or(phi) {
                return infix("|", 3, x, y);
            }
            if let Some((x, y)) = un_imp(phi) {
                return infix("->", 2, x, y);
            }
            match &**a {
                Dia(x, y) => {
                    if let (Some(x), Some(y)) = (un_not(x), un_not(y)) {
                        return call("box", x, y);
                    }
                }
                WBox(x, y) => {
                    if let (Some(x), Some(y)) = (un_not(x), un_not(y)) {
                        return call("wdia", x, y);
                    }
                }
                _ => {}
            }
            Sugar::Neg(bx(sugar(a)))
        }
        And(a, b) => infix("&", 4, a, b),
        Dia(a, b) => call("dia", a, b),
        WBox(a, b) => call("wbox", a, b),
    }
}

fn write_sugar(s: &Sugar, parent: u8, out: &mut String) {
    match s {
        Sugar::Atom(a) => out.push_str(a),
        Sugar::Neg(a) => {
            out.push('~');
            write_sugar(a, 5, out);
        }
        Sugar::Call(name, a, b) => {
            out.push_str(name);
            out.push('(');
            write_sugar(a, 0, out);
            out.push_str(", ");
            write_sugar(b, 0, out);
            out.push(')');
        }
        Sugar::Infix(op, prec, a, b) => {
            let wrap = parent >= *prec;
            if wrap {
                out.push('(');
            }
            write_sugar(a, *prec, out);
            out.push(' ');
            out.push_str(op);
            out.push(' ');
            write_sugar(b, *prec, out);
            if wrap {
                out.push(')');
            }
        }
    }
}
