//! Sampled membership checks for the effect types: finite approximations of
//! the "in all extensions" quantifiers, with the initial world always among
//! the samples. A computation that sticks or runs out of fuel fails the
//! check.

use num_bigint::BigUint;

use crate::eval::{eval, EvalResult};
use crate::term::Term;
use crate::world::{sample_extensions, RefWorld};

#[derive(Debug, Clone, Copy)]
pub struct SamplingParams {
    pub depth: u32,
    pub count: u32,
    pub seed: u64,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams {
            depth: 4,
            count: 16,
            seed: 0xB0C5,
        }
    }
}

fn done_value(t: &Term, w: &RefWorld, fuel: u64) -> Option<(Term, RefWorld)> {
    match eval(t, w, fuel) {
        EvalResult::Done { value, world, .. } => Some((value, world)),
        _ => None,
    }
}

/// `t` computes to one fixed numeral from every sampled extension of `w`.
pub fn member_nat_sampled(t: &Term, w: &RefWorld, fuel: u64, params: SamplingParams) -> bool {
    let mut expected: Option<BigUint> = None;
    for ext in sample_extensions(w, params.depth, params.count, params.seed) {
        match eval(t, &ext, fuel) {
            EvalResult::Done {
                value: Term::Num(n),
                ..
            } => match &expected {
                None => expected = Some(n),
                Some(m) => {
                    if *m != n {
                        return false;
                    }
                }
            },
            _ => return false,
        }
    }
    true
}

/// Whenever `t` computes to a value from a sampled extension `w'`, it
/// computes to that same value from every sampled extension of `w'`.
pub fn member_noread_sampled(t: &Term, w: &RefWorld, fuel: u64, params: SamplingParams) -> bool {
    for (i, ext) in sample_extensions(w, params.depth, params.count, params.seed)
        .iter()
        .enumerate()
    {
        let Some((value, _)) = done_value(t, ext, fuel) else {
            return false;
        };
        let inner_seed = params.seed.wrapping_add(1).wrapping_mul(i as u64 + 1);
        for ext2 in sample_extensions(ext, params.depth, params.count, inner_seed) {
            match done_value(t, &ext2, fuel) {
                Some((v2, _)) if v2.alpha_eq(&value) => {}
                _ => return false,
            }
        }
    }
    true
}

/// `t` computes to a value and ends in its initial world, on every sampled
/// extension of `w`.
pub fn member_nowrite_sampled(t: &Term, w: &RefWorld, fuel: u64, params: SamplingParams) -> bool {
    for ext in sample_extensions(w, params.depth, params.count, params.seed) {
        match done_value(t, &ext, fuel) {
            Some((_, final_world)) if final_world == ext => {}
            _ => return false,
        }
    }
    true
}

/// `t` is name-free and computes to one fixed name-free value from `w` and
/// from every sampled extension of `w`.
pub fn member_pure(t: &Term, w: &RefWorld, fuel: u64) -> bool {
    if !t.nonames() {
        return false;
    }
    let params = SamplingParams::default();
    let Some((value, _)) = done_value(t, w, fuel) else {
        return false;
    };
    if !value.nonames() {
        return false;
    }
    for ext in sample_extensions(w, params.depth, params.count, params.seed) {
        match done_value(t, &ext, fuel) {
            Some((v2, _)) if v2.alpha_eq(&value) => {}
            _ => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::DEFAULT_FUEL;
    use crate::term::*;
    use crate::world::{Cell, Restriction};

    fn w_kappa(value: u64) -> RefWorld {
        RefWorld::from_cells(vec![Cell {
            name: ChoiceName(0),
            restriction: Restriction::NatOnly,
            value: BigUint::from(value),
            mutable: true,
        }])
        .unwrap()
    }

    #[test]
    fn read_is_not_noread_but_discarded_read_is() {
        let w = w_kappa(3);
        let p = SamplingParams::default();
        assert!(!member_noread_sampled(&read(name(0)), &w, DEFAULT_FUEL, p));
        let discard = let_("x", read(name(0)), num(0));
        assert!(member_noread_sampled(&discard, &w, DEFAULT_FUEL, p));
    }

    #[test]
    fn blind_bump_is_not_nowrite_but_restore_is() {
        let w = w_kappa(3);
        let p = SamplingParams::default();
        let bump = choose(name(0), succ(read(name(0))));
        assert!(!member_nowrite_sampled(&bump, &w, DEFAULT_FUEL, p));
        let restore = let_(
            "x",
            read(name(0)),
            seq(choose(name(0), succ(var("x"))), choose(name(0), var("x"))),
        );
        assert!(member_nowrite_sampled(&restore, &w, DEFAULT_FUEL, p));
        // a read without any write is trivially no-write
        assert!(member_nowrite_sampled(&read(name(0)), &w, DEFAULT_FUEL, p));
    }

    #[test]
    fn purity_requires_a_name_free_term() {
        let w = w_kappa(3);
        assert!(member_pure(&num(0), &w, DEFAULT_FUEL));
        // computes to the name-free 0 everywhere, but mentions κ
        assert!(!member_pure(&seq(read(name(0)), num(0)), &w, DEFAULT_FUEL));
        // divergence fails rather than loops
        assert!(!member_pure(&fix(lam("x", var("x"))), &w, 100));
    }

    #[test]
    fn numerals_inhabit_nat_and_reads_do_not() {
        let w = w_kappa(3);
        let p = SamplingParams::default();
        assert!(member_nat_sampled(&num(5), &w, DEFAULT_FUEL, p));
        assert!(member_nat_sampled(&sub(num(7), num(2)), &w, DEFAULT_FUEL, p));
        // !κ evaluates to different numerals in different extensions
        assert!(!member_nat_sampled(&read(name(0)), &w, DEFAULT_FUEL, p));
        // a lambda is a value but not a numeral
        assert!(!member_nat_sampled(&lam("x", var("x")), &w, DEFAULT_FUEL, p));
    }
}
