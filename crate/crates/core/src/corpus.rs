//! Small named algebras and frames used as fixtures across the crate.

use crate::algebra::PsAlgebra;
use crate::boolean::Element;
use crate::frames::{complex_algebra, TernaryFrame, TripleSet};

/// Two atoms `a, b`: `f(b,b) = 1` and every other atom entry of `f` is 0;
/// `g(a,a) = g(a,b) = g(b,a) = b`, `g(b,b) = 0`. Fails wMIA at `(a,a)`.
pub fn eq45_not_wmia() -> PsAlgebra {
    let one = Element::from_bits(0b11);
    let b = Element::singleton(1);
    PsAlgebra::from_atom_fns(
        2,
        |p, q| if p == 1 && q == 1 { one } else { Element::ZERO },
        |p, q| if p == 1 && q == 1 { Element::ZERO } else { b },
    )
    .expect("valid fixture")
}

/// `f` and `g` both send every atom pair to 1.
pub fn top_algebra(n: usize) -> PsAlgebra {
    let one = Element::from_bits((1u64 << n) - 1);
    PsAlgebra::from_atom_fns(n, |_, _| one, |_, _| one).expect("valid fixture")
}

/// `f` constantly 0 on atoms, `g` constantly 1.
pub fn null_algebra(n: usize) -> PsAlgebra {
    let one = Element::from_bits((1u64 << n) - 1);
    PsAlgebra::from_atom_fns(n, |_, _| Element::ZERO, |_, _| one).expect("valid fixture")
}

/// `f(p,q) = g(p,q) = {p, q}`: the complex algebra of the "between or at an
/// endpoint" relation on a discrete set.
pub fn endpoint_algebra(n: usize) -> PsAlgebra {
    let pair = |p: usize, q: usize| Element::singleton(p) | Element::singleton(q);
    PsAlgebra::from_atom_fns(n, pair, pair).expect("valid fixture")
}

/// Worlds `x, y, z` with `R = {(x,y,z)}` and `S = ∅`.
pub fn worked_example_frame() -> TernaryFrame {
    TernaryFrame::from_named(&["x", "y", "z"], &[["x", "y", "z"]], &[]).expect("valid fixture")
}

/// Worlds `x, y, z` with `R = {(x,y,z), (x,z,y)}` and `S = ∅`.
pub fn companion_frame() -> TernaryFrame {
    TernaryFrame::from_named(&["x", "y", "z"], &[["x", "y", "z"], ["x", "z", "y"]], &[]).expect("valid fixture")
}

/// One world `w`, `R = S = {(w,w,w)}`.
pub fn single_world_full_frame() -> TernaryFrame {
    TernaryFrame::new_special(vec!["w".into()], TripleSet::full(1)).expect("valid fixture")
}

/// Fixed regression set of algebras with at most three atoms.
pub fn regression_algebras() -> Vec<(&'static str, PsAlgebra)> {
    let single = |fv: u64, gv: u64| {
        PsAlgebra::from_atom_fns(1, |_, _| Element::from_bits(fv), |_, _| Element::from_bits(gv))
            .expect("valid fixture")
    };
    let cm = |f: TernaryFrame| complex_algebra(&f).expect("small frame");
    vec![
        ("one-atom-00", single(0, 0)),
        ("one-atom-01", single(0, 1)),
        ("one-atom-10", single(1, 0)),
        ("one-atom-11", single(1, 1)),
        ("eq45-not-wmia", eq45_not_wmia()),
        ("top-2", top_algebra(2)),
        ("top-3", top_algebra(3)),
        ("null-2", null_algebra(2)),
        ("null-3", null_algebra(3)),
        ("endpoint-2", endpoint_algebra(2)),
        ("endpoint-3", endpoint_algebra(3)),
        ("cm-worked-example", cm(worked_example_frame())),
        ("cm-companion", cm(companion_frame())),
        ("cm-single-world", cm(single_world_full_frame())),
        (
            "diagonal-3",
            PsAlgebra::from_atom_fns(
                3,
                |p, q| if p == q { Element::singleton(p) } else { Element::ZERO },
                |p, q| if p == q { Element::singleton(p) } else { Element::ZERO },
            )
            .expect("valid fixture"),
        ),
        (
            "mixed-3",
            PsAlgebra::from_atom_fns(
                3,
                |p, q| Element::from_bits(((p * 3 + q) as u64 * 5 + 1) % 8),
                |p, q| Element::from_bits((((p * 3 + q) as u64 * 3) % 8) & 0b101),
            )
            .expect("valid fixture"),
        ),
    ]
}
