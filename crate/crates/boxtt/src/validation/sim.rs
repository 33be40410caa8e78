//! The similarity relations used by the simulation arguments: structural
//! identity except at the designated upd/force positions, with choice names
//! and fresh operators related nowhere else.

use crate::continuity::{mk_force, mk_upd};
use crate::term::{ChoiceName, Term};

/// Terms identical up to `upd(κ1, α)` on the left matching `upd(κ2, α)` on
/// the right. Any name or fresh outside that clause breaks the relation.
pub fn sim_diff(t1: &Term, t2: &Term, k1: ChoiceName, k2: ChoiceName, alpha: &Term) -> bool {
    let u1 = mk_upd(k1, alpha);
    let u2 = mk_upd(k2, alpha);
    sim_rec(t1, t2, &|a, b| a.alpha_eq(&u1) && b.alpha_eq(&u2))
}

/// As `sim_diff`, but `upd(κ, α)` on the left matches `force(β)` on the
/// right.
pub fn sim_force(t1: &Term, t2: &Term, k: ChoiceName, alpha: &Term, beta: &Term) -> bool {
    let u = mk_upd(k, alpha);
    let f = mk_force(beta);
    sim_rec(t1, t2, &|a, b| a.alpha_eq(&u) && b.alpha_eq(&f))
}

/// κ occurs in `t` only wrapped inside `upd(κ, α)`.
pub fn updterm(t: &Term, k: ChoiceName, alpha: &Term) -> bool {
    sim_diff(t, t, k, k, alpha)
}

fn sim_rec(t1: &Term, t2: &Term, first: &dyn Fn(&Term, &Term) -> bool) -> bool {
    if first(t1, t2) {
        return true;
    }
    match (t1, t2) {
        // names and fresh are related only through the first clause
        (Term::Name(_), _) | (_, Term::Name(_)) => false,
        (Term::Fresh { .. }, _) | (_, Term::Fresh { .. }) => false,
        (Term::Var(a), Term::Var(b)) => a == b,
        (Term::Num(a), Term::Num(b)) => a == b,
        (Term::Universe(a), Term::Universe(b)) => a == b,
        (Term::Star, Term::Star)
        | (Term::Nat, Term::Nat)
        | (Term::NoRead, Term::NoRead)
        | (Term::NoWrite, Term::NoWrite)
        | (Term::Pure, Term::Pure) => true,
        (Term::Lam(x1, b1), Term::Lam(x2, b2)) => x1 == x2 && sim_rec(b1, b2, first),
        (Term::App(f1, a1), Term::App(f2, a2))
        | (Term::Pair(f1, a1), Term::Pair(f2, a2))
        | (Term::Union(f1, a1), Term::Union(f2, a2))
        | (Term::Isect(f1, a1), Term::Isect(f2, a2)) => {
            sim_rec(f1, f2, first) && sim_rec(a1, a2, first)
        }
        (
            Term::Choose {
                target: f1,
                value: a1,
            },
            Term::Choose {
                target: f2,
                value: a2,
            },
        ) => sim_rec(f1, f2, first) && sim_rec(a1, a2, first),
        (Term::Inl(a), Term::Inl(b))
        | (Term::Inr(a), Term::Inr(b))
        | (Term::Succ(a), Term::Succ(b))
        | (Term::Fix(a), Term::Fix(b))
        | (Term::Read(a), Term::Read(b))
        | (Term::QSquash(a), Term::QSquash(b)) => sim_rec(a, b, first),
        (
            Term::Spread {
                scrut: s1,
                x: x1,
                y: y1,
                body: b1,
            },
            Term::Spread {
                scrut: s2,
                x: x2,
                y: y2,
                body: b2,
            },
        ) => x1 == x2 && y1 == y2 && sim_rec(s1, s2, first) && sim_rec(b1, b2, first),
        (
            Term::Decide {
                scrut: s1,
                x: x1,
                left: l1,
                y: y1,
                right: r1,
            },
            Term::Decide {
                scrut: s2,
                x: x2,
                left: l2,
                y: y2,
                right: r2,
            },
        ) => {
            x1 == x2
                && y1 == y2
                && sim_rec(s1, s2, first)
                && sim_rec(l1, l2, first)
                && sim_rec(r1, r2, first)
        }
        (
            Term::NatRec {
                scrut: s1,
                zero: z1,
                succ: c1,
            },
            Term::NatRec {
                scrut: s2,
                zero: z2,
                succ: c2,
            },
        ) => sim_rec(s1, s2, first) && sim_rec(z1, z2, first) && sim_rec(c1, c2, first),
        (
            Term::Let {
                x: x1,
                bound: t1b,
                body: b1,
            },
            Term::Let {
                x: x2,
                bound: t2b,
                body: b2,
            },
        ) => x1 == x2 && sim_rec(t1b, t2b, first) && sim_rec(b1, b2, first),
        (
            Term::Pi {
                x: x1,
                dom: d1,
                cod: c1,
            },
            Term::Pi {
                x: x2,
                dom: d2,
                cod: c2,
            },
        )
        | (
            Term::Sum {
                x: x1,
                dom: d1,
                cod: c1,
            },
            Term::Sum {
                x: x2,
                dom: d2,
                cod: c2,
            },
        )
        | (
            Term::Set {
                x: x1,
                dom: d1,
                cod: c1,
            },
            Term::Set {
                x: x2,
                dom: d2,
                cod: c2,
            },
        ) => x1 == x2 && sim_rec(d1, d2, first) && sim_rec(c1, c2, first),
        (
            Term::Eq {
                ty: t1a,
                lhs: l1,
                rhs: r1,
            },
            Term::Eq {
                ty: t2a,
                lhs: l2,
                rhs: r2,
            },
        ) => sim_rec(t1a, t2a, first) && sim_rec(l1, l2, first) && sim_rec(r1, r2, first),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::*;

    fn k(n: u64) -> ChoiceName {
        ChoiceName(n)
    }

    #[test]
    fn first_clause_relates_upds() {
        let alpha = lam("n", succ(var("n")));
        assert!(sim_diff(
            &mk_upd(k(1), &alpha),
            &mk_upd(k(2), &alpha),
            k(1),
            k(2),
            &alpha
        ));
    }

    #[test]
    fn bare_names_are_not_related() {
        let alpha = lam("n", var("n"));
        assert!(!sim_diff(&name(1), &name(2), k(1), k(2), &alpha));
        assert!(!sim_diff(&name(1), &name(1), k(1), k(1), &alpha));
    }

    #[test]
    fn matching_numerals_and_star() {
        let alpha = lam("n", var("n"));
        assert!(sim_diff(&num(3), &num(3), k(1), k(2), &alpha));
        assert!(!sim_diff(&num(3), &num(4), k(1), k(2), &alpha));
        assert!(sim_diff(&Term::Star, &Term::Star, k(1), k(2), &alpha));
    }

    #[test]
    fn congruence_through_applications() {
        let alpha = lam("n", succ(var("n")));
        let f = lam("a", app(var("a"), num(2)));
        let t1 = app(f.clone(), mk_upd(k(1), &alpha));
        let t2 = app(f, mk_upd(k(2), &alpha));
        assert!(sim_diff(&t1, &t2, k(1), k(2), &alpha));
    }

    #[test]
    fn sim_force_examples() {
        let alpha = lam("n", succ(var("n")));
        let beta = lam("n", succ(var("n")));
        assert!(sim_force(
            &mk_upd(k(0), &alpha),
            &mk_force(&beta),
            k(0),
            &alpha,
            &beta
        ));
        let f = lam("a", app(var("a"), num(2)));
        assert!(sim_force(
            &app(f.clone(), mk_upd(k(0), &alpha)),
            &app(f, mk_force(&beta)),
            k(0),
            &alpha,
            &beta
        ));
        // fresh on both sides is never related
        assert!(!sim_force(
            &fresh("x", var("x")),
            &fresh("x", var("x")),
            k(0),
            &alpha,
            &beta
        ));
    }

    #[test]
    fn updterm_examples() {
        let alpha = lam("n", succ(var("n")));
        let f = lam("a", app(var("a"), num(2)));
        assert!(updterm(&app(f, mk_upd(k(0), &alpha)), k(0), &alpha));
        assert!(!updterm(&read(name(0)), k(0), &alpha));
        assert!(updterm(&num(0), k(0), &alpha));
    }

    #[test]
    fn preserved_under_name_free_substitution() {
        let alpha = lam("n", succ(var("n")));
        let t1 = app(var("h"), mk_upd(k(1), &alpha));
        let t2 = app(var("h"), mk_upd(k(2), &alpha));
        assert!(sim_diff(&t1, &t2, k(1), k(2), &alpha));
        let u = lam("z", sub(var("z"), num(1)));
        assert!(sim_diff(
            &t1.subst("h", &u),
            &t2.subst("h", &u),
            k(1),
            k(2),
            &alpha
        ));
    }
}
