//! The term language: the full grammar with type constructors as inert
//! values, capture-avoiding substitution, α-equivalence, the syntactic
//! effect predicates, and the derived sugar.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

/// Identifier of a reference cell. Names are naturals with decidable
/// equality; a fresh one is computable from any finite set of used ids.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct ChoiceName(pub u64);

impl fmt::Display for ChoiceName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One variant per grammar production. Numbers are arbitrary-precision
/// naturals, so `succ`/`pred`/`sub` never wrap.
///
/// Values are exactly: the type constructors, `Lam`, `Star`, `Num`, `Inl`,
/// `Inr`, `Pair`, and `Name` (see [`Term::is_value`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Lam(String, Box<Term>),
    App(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Spread {
        scrut: Box<Term>,
        x: String,
        y: String,
        body: Box<Term>,
    },
    Inl(Box<Term>),
    Inr(Box<Term>),
    Decide {
        scrut: Box<Term>,
        x: String,
        left: Box<Term>,
        y: String,
        right: Box<Term>,
    },
    Num(BigUint),
    Succ(Box<Term>),
    NatRec {
        scrut: Box<Term>,
        zero: Box<Term>,
        succ: Box<Term>,
    },
    Fix(Box<Term>),
    Let {
        x: String,
        bound: Box<Term>,
        body: Box<Term>,
    },
    Star,
    Name(ChoiceName),
    Read(Box<Term>),
    Choose {
        target: Box<Term>,
        value: Box<Term>,
    },
    Fresh {
        x: String,
        body: Box<Term>,
    },
    // Type constructors. They parse, print and count as values, but have no
    // reduction behaviour.
    Pi {
        x: String,
        dom: Box<Term>,
        cod: Box<Term>,
    },
    Sum {
        x: String,
        dom: Box<Term>,
        cod: Box<Term>,
    },
    Set {
        x: String,
        dom: Box<Term>,
        cod: Box<Term>,
    },
    Union(Box<Term>, Box<Term>),
    Eq {
        ty: Box<Term>,
        lhs: Box<Term>,
        rhs: Box<Term>,
    },
    Universe(u64),
    Nat,
    Isect(Box<Term>, Box<Term>),
    QSquash(Box<Term>),
    NoRead,
    NoWrite,
    Pure,
}

// Construction helpers, used heavily by the sugar, the continuity builders
// and the tests.

pub fn var(x: &str) -> Term {
    Term::Var(x.to_string())
}

pub fn lam(x: &str, body: Term) -> Term {
    Term::Lam(x.to_string(), Box::new(body))
}

pub fn app(f: Term, a: Term) -> Term {
    Term::App(Box::new(f), Box::new(a))
}

pub fn pair(a: Term, b: Term) -> Term {
    Term::Pair(Box::new(a), Box::new(b))
}

pub fn spread(scrut: Term, x: &str, y: &str, body: Term) -> Term {
    Term::Spread {
        scrut: Box::new(scrut),
        x: x.to_string(),
        y: y.to_string(),
        body: Box::new(body),
    }
}

pub fn inl(t: Term) -> Term {
    Term::Inl(Box::new(t))
}

pub fn inr(t: Term) -> Term {
    Term::Inr(Box::new(t))
}

pub fn decide(scrut: Term, x: &str, left: Term, y: &str, right: Term) -> Term {
    Term::Decide {
        scrut: Box::new(scrut),
        x: x.to_string(),
        left: Box::new(left),
        y: y.to_string(),
        right: Box::new(right),
    }
}

pub fn num(n: u64) -> Term {
    Term::Num(BigUint::from(n))
}

pub fn num_big(n: BigUint) -> Term {
    Term::Num(n)
}

pub fn succ(t: Term) -> Term {
    Term::Succ(Box::new(t))
}

pub fn natrec(scrut: Term, zero: Term, succ: Term) -> Term {
    Term::NatRec {
        scrut: Box::new(scrut),
        zero: Box::new(zero),
        succ: Box::new(succ),
    }
}

pub fn fix(t: Term) -> Term {
    Term::Fix(Box::new(t))
}

pub fn let_(x: &str, bound: Term, body: Term) -> Term {
    Term::Let {
        x: x.to_string(),
        bound: Box::new(bound),
        body: Box::new(body),
    }
}

pub fn name(k: u64) -> Term {
    Term::Name(ChoiceName(k))
}

pub fn read(t: Term) -> Term {
    Term::Read(Box::new(t))
}

pub fn choose(target: Term, value: Term) -> Term {
    Term::Choose {
        target: Box::new(target),
        value: Box::new(value),
    }
}

pub fn fresh(x: &str, body: Term) -> Term {
    Term::Fresh {
        x: x.to_string(),
        body: Box::new(body),
    }
}

impl Term {
    /// The value productions: type constructors, lambda, star, numerals,
    /// injections, pairs, and choice names. Injection and pair components
    /// are not forced (call-by-name constructors).
    pub fn is_value(&self) -> bool {
        matches!(
            self,
            Term::Lam(..)
                | Term::Star
                | Term::Num(_)
                | Term::Inl(_)
                | Term::Inr(_)
                | Term::Pair(..)
                | Term::Name(_)
                | Term::Pi { .. }
                | Term::Sum { .. }
                | Term::Set { .. }
                | Term::Union(..)
                | Term::Eq { .. }
                | Term::Universe(_)
                | Term::Nat
                | Term::Isect(..)
                | Term::QSquash(_)
                | Term::NoRead
                | Term::NoWrite
                | Term::Pure
        )
    }

    /// Immediate subterms, binder-blind.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_)
            | Term::Num(_)
            | Term::Star
            | Term::Name(_)
            | Term::Universe(_)
            | Term::Nat
            | Term::NoRead
            | Term::NoWrite
            | Term::Pure => vec![],
            Term::Lam(_, b) | Term::Inl(b) | Term::Inr(b) | Term::Succ(b) | Term::Fix(b)
            | Term::Read(b) | Term::Fresh { body: b, .. } | Term::QSquash(b) => vec![b],
            Term::App(a, b)
            | Term::Pair(a, b)
            | Term::Union(a, b)
            | Term::Isect(a, b)
            | Term::Choose {
                target: a,
                value: b,
            }
            | Term::Let {
                bound: a, body: b, ..
            }
            | Term::Pi { dom: a, cod: b, .. }
            | Term::Sum { dom: a, cod: b, .. }
            | Term::Set { dom: a, cod: b, .. } => vec![a, b],
            Term::Spread { scrut, body, .. } => vec![scrut, body],
            Term::Decide {
                scrut, left, right, ..
            } => vec![scrut, left, right],
            Term::NatRec { scrut, zero, succ } => vec![scrut, zero, succ],
            Term::Eq { ty, lhs, rhs } => vec![ty, lhs, rhs],
        }
    }

    fn any_subterm(&self, pred: &mut impl FnMut(&Term) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        for c in self.children() {
            if c.any_subterm(pred) {
                return true;
            }
        }
        false
    }

    /// True iff the term contains no choice name and no fresh operator.
    pub fn nonames(&self) -> bool {
        !self.any_subterm(&mut |t| matches!(t, Term::Name(_) | Term::Fresh { .. }))
    }

    /// True iff no read operator occurs.
    pub fn noread(&self) -> bool {
        !self.any_subterm(&mut |t| matches!(t, Term::Read(_)))
    }

    /// True iff no choose and no fresh operator occurs.
    pub fn nowrite(&self) -> bool {
        !self.any_subterm(&mut |t| matches!(t, Term::Choose { .. } | Term::Fresh { .. }))
    }

    /// All choice names occurring in the term.
    pub fn names(&self) -> BTreeSet<ChoiceName> {
        let mut out = BTreeSet::new();
        self.any_subterm(&mut |t| {
            if let Term::Name(k) = t {
                out.insert(*k);
            }
            false
        });
        out
    }

    /// Does `x` occur free?
    pub fn has_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => y == x,
            Term::Lam(y, b) | Term::Fresh { x: y, body: b } => y != x && b.has_free(x),
            Term::Let { x: y, bound, body } => {
                bound.has_free(x) || (y != x && body.has_free(x))
            }
            Term::Spread {
                scrut,
                x: bx,
                y: by,
                body,
            } => scrut.has_free(x) || (bx != x && by != x && body.has_free(x)),
            Term::Decide {
                scrut,
                x: bx,
                left,
                y: by,
                right,
            } => {
                scrut.has_free(x)
                    || (bx != x && left.has_free(x))
                    || (by != x && right.has_free(x))
            }
            Term::Pi { x: y, dom, cod }
            | Term::Sum { x: y, dom, cod }
            | Term::Set { x: y, dom, cod } => dom.has_free(x) || (y != x && cod.has_free(x)),
            _ => self.children().iter().any(|c| c.has_free(x)),
        }
    }

    /// The free variables of the term.
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match t {
                Term::Var(y) => {
                    if !bound.iter().any(|b| b == y) {
                        out.insert(y.clone());
                    }
                }
                Term::Lam(y, b) | Term::Fresh { x: y, body: b } => {
                    bound.push(y.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Term::Let { x, bound: bt, body } => {
                    go(bt, bound, out);
                    bound.push(x.clone());
                    go(body, bound, out);
                    bound.pop();
                }
                Term::Spread { scrut, x, y, body } => {
                    go(scrut, bound, out);
                    bound.push(x.clone());
                    bound.push(y.clone());
                    go(body, bound, out);
                    bound.pop();
                    bound.pop();
                }
                Term::Decide {
                    scrut,
                    x,
                    left,
                    y,
                    right,
                } => {
                    go(scrut, bound, out);
                    bound.push(x.clone());
                    go(left, bound, out);
                    bound.pop();
                    bound.push(y.clone());
                    go(right, bound, out);
                    bound.pop();
                }
                Term::Pi { x, dom, cod }
                | Term::Sum { x, dom, cod }
                | Term::Set { x, dom, cod } => {
                    go(dom, bound, out);
                    bound.push(x.clone());
                    go(cod, bound, out);
                    bound.pop();
                }
                _ => {
                    for c in t.children() {
                        go(c, bound, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// True iff the term has no free variables.
    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Capture-avoiding substitution of the free occurrences of `x` by `u`.
    /// Binders that would capture a free variable of `u` are renamed to the
    /// first numeric-suffixed variant that is safe, so the result is a pure
    /// function of the inputs.
    pub fn subst(&self, x: &str, u: &Term) -> Term {
        match self {
            Term::Var(y) => {
                if y == x {
                    u.clone()
                } else {
                    self.clone()
                }
            }
            Term::Lam(y, body) => {
                let (names, body) = subst_under(&[y.clone()], body, x, u);
                Term::Lam(names[0].clone(), Box::new(body))
            }
            Term::Fresh { x: y, body } => {
                let (names, body) = subst_under(&[y.clone()], body, x, u);
                Term::Fresh {
                    x: names[0].clone(),
                    body: Box::new(body),
                }
            }
            Term::Let { x: y, bound, body } => {
                let (names, body) = subst_under(&[y.clone()], body, x, u);
                Term::Let {
                    x: names[0].clone(),
                    bound: Box::new(bound.subst(x, u)),
                    body: Box::new(body),
                }
            }
            Term::Spread {
                scrut,
                x: bx,
                y: by,
                body,
            } => {
                let (names, body) = subst_under(&[bx.clone(), by.clone()], body, x, u);
                Term::Spread {
                    scrut: Box::new(scrut.subst(x, u)),
                    x: names[0].clone(),
                    y: names[1].clone(),
                    body: Box::new(body),
                }
            }
            Term::Decide {
                scrut,
                x: bx,
                left,
                y: by,
                right,
            } => {
                let (ln, left) = subst_under(&[bx.clone()], left, x, u);
                let (rn, right) = subst_under(&[by.clone()], right, x, u);
                Term::Decide {
                    scrut: Box::new(scrut.subst(x, u)),
                    x: ln[0].clone(),
                    left: Box::new(left),
                    y: rn[0].clone(),
                    right: Box::new(right),
                }
            }
            Term::Pi { x: y, dom, cod } => {
                let (names, cod) = subst_under(&[y.clone()], cod, x, u);
                Term::Pi {
                    x: names[0].clone(),
                    dom: Box::new(dom.subst(x, u)),
                    cod: Box::new(cod),
                }
            }
            Term::Sum { x: y, dom, cod } => {
                let (names, cod) = subst_under(&[y.clone()], cod, x, u);
                Term::Sum {
                    x: names[0].clone(),
                    dom: Box::new(dom.subst(x, u)),
                    cod: Box::new(cod),
                }
            }
            Term::Set { x: y, dom, cod } => {
                let (names, cod) = subst_under(&[y.clone()], cod, x, u);
                Term::Set {
                    x: names[0].clone(),
                    dom: Box::new(dom.subst(x, u)),
                    cod: Box::new(cod),
                }
            }
            Term::App(f, a) => app(f.subst(x, u), a.subst(x, u)),
            Term::Pair(a, b) => pair(a.subst(x, u), b.subst(x, u)),
            Term::Inl(t) => inl(t.subst(x, u)),
            Term::Inr(t) => inr(t.subst(x, u)),
            Term::Succ(t) => succ(t.subst(x, u)),
            Term::NatRec { scrut, zero, succ } => {
                natrec(scrut.subst(x, u), zero.subst(x, u), succ.subst(x, u))
            }
            Term::Fix(t) => fix(t.subst(x, u)),
            Term::Read(t) => read(t.subst(x, u)),
            Term::Choose { target, value } => choose(target.subst(x, u), value.subst(x, u)),
            Term::Union(a, b) => Term::Union(Box::new(a.subst(x, u)), Box::new(b.subst(x, u))),
            Term::Isect(a, b) => Term::Isect(Box::new(a.subst(x, u)), Box::new(b.subst(x, u))),
            Term::QSquash(t) => Term::QSquash(Box::new(t.subst(x, u))),
            Term::Eq { ty, lhs, rhs } => Term::Eq {
                ty: Box::new(ty.subst(x, u)),
                lhs: Box::new(lhs.subst(x, u)),
                rhs: Box::new(rhs.subst(x, u)),
            },
            Term::Num(_)
            | Term::Star
            | Term::Name(_)
            | Term::Universe(_)
            | Term::Nat
            | Term::NoRead
            | Term::NoWrite
            | Term::Pure => self.clone(),
        }
    }

    /// Decidable α-equivalence.
    pub fn alpha_eq(&self, other: &Term) -> bool {
        fn bound_eq(env: &[(String, String)], a: &str, b: &str) -> bool {
            for (x, y) in env.iter().rev() {
                match (x == a, y == b) {
                    (true, true) => return true,
                    (false, false) => continue,
                    _ => return false,
                }
            }
            a == b
        }
        fn go(t1: &Term, t2: &Term, env: &mut Vec<(String, String)>) -> bool {
            match (t1, t2) {
                (Term::Var(a), Term::Var(b)) => bound_eq(env, a, b),
                (Term::Lam(a, b1), Term::Lam(b, b2))
                | (Term::Fresh { x: a, body: b1 }, Term::Fresh { x: b, body: b2 }) => {
                    env.push((a.clone(), b.clone()));
                    let r = go(b1, b2, env);
                    env.pop();
                    r
                }
                (
                    Term::Let {
                        x: a,
                        bound: t1b,
                        body: b1,
                    },
                    Term::Let {
                        x: b,
                        bound: t2b,
                        body: b2,
                    },
                ) => {
                    if !go(t1b, t2b, env) {
                        return false;
                    }
                    env.push((a.clone(), b.clone()));
                    let r = go(b1, b2, env);
                    env.pop();
                    r
                }
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
                ) => {
                    if !go(s1, s2, env) {
                        return false;
                    }
                    env.push((x1.clone(), x2.clone()));
                    env.push((y1.clone(), y2.clone()));
                    let r = go(b1, b2, env);
                    env.pop();
                    env.pop();
                    r
                }
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
                    if !go(s1, s2, env) {
                        return false;
                    }
                    env.push((x1.clone(), x2.clone()));
                    let l = go(l1, l2, env);
                    env.pop();
                    if !l {
                        return false;
                    }
                    env.push((y1.clone(), y2.clone()));
                    let r = go(r1, r2, env);
                    env.pop();
                    r
                }
                (
                    Term::Pi {
                        x: a,
                        dom: d1,
                        cod: c1,
                    },
                    Term::Pi {
                        x: b,
                        dom: d2,
                        cod: c2,
                    },
                )
                | (
                    Term::Sum {
                        x: a,
                        dom: d1,
                        cod: c1,
                    },
                    Term::Sum {
                        x: b,
                        dom: d2,
                        cod: c2,
                    },
                )
                | (
                    Term::Set {
                        x: a,
                        dom: d1,
                        cod: c1,
                    },
                    Term::Set {
                        x: b,
                        dom: d2,
                        cod: c2,
                    },
                ) => {
                    if !go(d1, d2, env) {
                        return false;
                    }
                    env.push((a.clone(), b.clone()));
                    let r = go(c1, c2, env);
                    env.pop();
                    r
                }
                (Term::App(f1, a1), Term::App(f2, a2))
                | (Term::Pair(f1, a1), Term::Pair(f2, a2))
                | (Term::Union(f1, a1), Term::Union(f2, a2))
                | (Term::Isect(f1, a1), Term::Isect(f2, a2))
                | (
                    Term::Choose {
                        target: f1,
                        value: a1,
                    },
                    Term::Choose {
                        target: f2,
                        value: a2,
                    },
                ) => go(f1, f2, env) && go(a1, a2, env),
                (Term::Inl(a), Term::Inl(b))
                | (Term::Inr(a), Term::Inr(b))
                | (Term::Succ(a), Term::Succ(b))
                | (Term::Fix(a), Term::Fix(b))
                | (Term::Read(a), Term::Read(b))
                | (Term::QSquash(a), Term::QSquash(b)) => go(a, b, env),
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
                ) => go(s1, s2, env) && go(z1, z2, env) && go(c1, c2, env),
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
                ) => go(t1a, t2a, env) && go(l1, l2, env) && go(r1, r2, env),
                (Term::Num(a), Term::Num(b)) => a == b,
                (Term::Universe(a), Term::Universe(b)) => a == b,
                (Term::Name(a), Term::Name(b)) => a == b,
                (Term::Star, Term::Star)
                | (Term::Nat, Term::Nat)
                | (Term::NoRead, Term::NoRead)
                | (Term::NoWrite, Term::NoWrite)
                | (Term::Pure, Term::Pure) => true,
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }
}

/// Substitute `x := u` in `body` under the given binders, renaming binders
/// that would capture free variables of `u`.
fn subst_under(binders: &[String], body: &Term, x: &str, u: &Term) -> (Vec<String>, Term) {
    let mut names: Vec<String> = binders.to_vec();
    if names.iter().any(|b| b == x) || !body.has_free(x) {
        return (names, body.clone());
    }
    let mut body = body.clone();
    for i in 0..names.len() {
        if u.has_free(&names[i]) {
            let avoid_names: Vec<&str> = names
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, n)| n.as_str())
                .collect();
            let fresh = rename_candidate(&names[i], &[&body, u], x, &avoid_names);
            body = body.subst(&names[i], &Term::Var(fresh.clone()));
            names[i] = fresh;
        }
    }
    (names, body.subst(x, u))
}

/// First `base{n}` (n = 1, 2, ...) that is free in none of `avoid`, differs
/// from `x`, and collides with none of `avoid_names`.
fn rename_candidate(base: &str, avoid: &[&Term], x: &str, avoid_names: &[&str]) -> String {
    for n in 1u64.. {
        let candidate = format!("{base}{n}");
        if candidate != x
            && !avoid_names.contains(&candidate.as_str())
            && !avoid.iter().any(|t| t.has_free(&candidate))
        {
            return candidate;
        }
    }
    unreachable!("unbounded candidate stream")
}

/// First `base` or `base{n}` not free in any of `avoid`. Used by the sugar,
/// which needs binders that do not occur free in the branch terms.
pub fn fresh_binder(base: &str, avoid: &[&Term]) -> String {
    if !avoid.iter().any(|t| t.has_free(base)) {
        return base.to_string();
    }
    for n in 1u64.. {
        let candidate = format!("{base}{n}");
        if !avoid.iter().any(|t| t.has_free(&candidate)) {
            return candidate;
        }
    }
    unreachable!("unbounded candidate stream")
}

// Derived sugar. Expansions are exactly the defining equations: ite via
// decide, seq via let, booleans via injections of star, iszero/pred/sub via
// natrec, lt := neg(iszero(sub(b, a))), iflt := ite ∘ lt.

pub fn btrue() -> Term {
    inl(Term::Star)
}

pub fn bfalse() -> Term {
    inr(Term::Star)
}

pub fn ite(c: Term, then_: Term, else_: Term) -> Term {
    let x = fresh_binder("x", &[&then_, &else_]);
    decide(c, &x, then_, &x, else_)
}

pub fn seq(a: Term, b: Term) -> Term {
    let x = fresh_binder("x", &[&b]);
    let_(&x, a, b)
}

pub fn neg(t: Term) -> Term {
    ite(t, bfalse(), btrue())
}

pub fn iszero(t: Term) -> Term {
    natrec(t, btrue(), lam("m", lam("r", bfalse())))
}

pub fn pred(t: Term) -> Term {
    natrec(t, num(0), lam("m", lam("r", var("m"))))
}

/// `a` minus `b`, truncated at zero.
pub fn sub(a: Term, b: Term) -> Term {
    natrec(b, a, lam("m", lam("r", pred(var("r")))))
}

pub fn lt(a: Term, b: Term) -> Term {
    neg(iszero(sub(b, a)))
}

pub fn iflt(a: Term, b: Term, then_: Term, else_: Term) -> Term {
    ite(lt(a, b), then_, else_)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subst_base_case() {
        assert_eq!(var("x").subst("x", &num(3)), num(3));
    }

    #[test]
    fn subst_shadowing() {
        let t = lam("x", var("x"));
        assert_eq!(t.subst("x", &num(3)), t);
    }

    #[test]
    fn subst_capture_avoidance_renames() {
        // (λy. x y)[x := y]  must not capture the free y.
        let t = lam("y", app(var("x"), var("y")));
        let r = t.subst("x", &var("y"));
        let expected = lam("y1", app(var("y"), var("y1")));
        assert_eq!(r, expected);
        assert!(r.alpha_eq(&lam("z", app(var("y"), var("z")))));
    }

    #[test]
    fn subst_by_same_var_is_identity() {
        let t = lam("y", app(var("x"), spread(var("p"), "a", "b", var("x"))));
        assert_eq!(t.subst("x", &var("x")), t);
    }

    #[test]
    fn nonames_examples() {
        assert!(lam("x", succ(var("x"))).nonames());
        assert!(!read(name(0)).nonames());
        assert!(!fresh("x", var("x")).nonames());
    }

    #[test]
    fn noread_nowrite_examples() {
        assert!(choose(name(0), num(1)).noread());
        assert!(!choose(name(0), num(1)).nowrite());
        assert!(read(name(0)).nowrite());
        assert!(!read(name(0)).noread());
        assert!(!fresh("x", var("x")).nowrite());
    }

    #[test]
    fn values_are_exactly_the_value_productions() {
        for v in [
            lam("x", var("x")),
            Term::Star,
            num(0),
            inl(read(name(0))),
            inr(var("x")),
            pair(var("x"), var("y")),
            name(3),
            Term::Nat,
            Term::Pure,
            Term::Universe(2),
        ] {
            assert!(v.is_value(), "{v:?}");
        }
        for t in [
            var("x"),
            app(var("f"), var("x")),
            succ(num(0)),
            read(name(0)),
            fresh("x", var("x")),
            fix(lam("x", var("x"))),
        ] {
            assert!(!t.is_value(), "{t:?}");
        }
    }

    #[test]
    fn sugar_is_name_free_when_arguments_are() {
        let t = iflt(var("a"), var("b"), var("c"), var("d"));
        assert!(t.nonames());
        assert!(seq(num(0), num(1)).nonames());
        assert!(ite(btrue(), num(0), num(1)).nonames());
        assert!(!iflt(read(name(0)), var("b"), var("c"), var("d")).nonames());
    }

    #[test]
    fn ite_binder_avoids_branches() {
        // ite picks a decide binder that is not free in either branch.
        let t = ite(btrue(), var("x"), var("x1"));
        if let Term::Decide { x, y, .. } = &t {
            assert_eq!(x, y);
            assert_ne!(x, "x");
            assert_ne!(x, "x1");
        } else {
            panic!("ite must expand to decide");
        }
    }

    #[test]
    fn alpha_eq_basics() {
        assert!(lam("x", var("x")).alpha_eq(&lam("y", var("y"))));
        assert!(!lam("x", var("x")).alpha_eq(&lam("y", var("x"))));
        assert!(!var("x").alpha_eq(&var("y")));
        assert!(fresh("a", read(var("a"))).alpha_eq(&fresh("b", read(var("b")))));
    }

    #[test]
    fn free_vars_respects_binders() {
        let t = spread(var("p"), "a", "b", app(var("a"), var("c")));
        let fv = t.free_vars();
        assert!(fv.contains("p"));
        assert!(fv.contains("c"));
        assert!(!fv.contains("a"));
        assert!(!fv.contains("b"));
    }
}
