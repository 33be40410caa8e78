//! Deterministic random instances for the theorem quantifiers: pure total
//! `α : B`, pure `F : B → N` built over applications of its argument, and
//! table-patched `β` variants agreeing with a given `α` below a bound.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::continuity::compute_modulus;
use crate::eval::eval;
use crate::term::{app, iflt, lam, let_, natrec, num, pred, sub, succ, var, Term};
use crate::world::{RefWorld, Restriction};

/// A generated theorem instance: closed name-free `F` and `α`, an initial
/// world, and the seed/fuel that reproduce it.
#[derive(Debug, Clone)]
pub struct CaseSpec {
    pub f: Term,
    pub alpha: Term,
    pub world: RefWorld,
    pub seed: u64,
    pub fuel: u64,
}

/// Numeral-valued expression over `vars`, optionally applying the function
/// variable `alpha` to numeral-valued subexpressions. Every construct is
/// total on numerals, so generated terms terminate whenever the probed
/// function does.
fn gen_num_expr(
    rng: &mut ChaCha8Rng,
    depth: u32,
    vars: &mut Vec<String>,
    alpha: Option<&str>,
) -> Term {
    if depth == 0 {
        if !vars.is_empty() && rng.gen_bool(0.5) {
            let i = rng.gen_range(0..vars.len());
            return var(&vars[i]);
        }
        return num(rng.gen_range(0..=6));
    }
    let weights: &[(u8, u32)] = &[
        (0, 2),                                   // numeral
        (1, if vars.is_empty() { 0 } else { 3 }), // variable
        (2, 3),                                   // succ
        (3, 2),                                   // pred
        (4, 3),                                   // sub
        (5, 1),                                   // natrec
        (6, if alpha.is_some() { 5 } else { 0 }), // apply α
    ];
    let total: u32 = weights.iter().map(|(_, w)| w).sum();
    let mut pick = rng.gen_range(0..total);
    let mut choice = 0u8;
    for (c, w) in weights {
        if pick < *w {
            choice = *c;
            break;
        }
        pick -= w;
    }
    match choice {
        0 => num(rng.gen_range(0..=6)),
        1 => {
            let i = rng.gen_range(0..vars.len());
            var(&vars[i])
        }
        2 => succ(gen_num_expr(rng, depth - 1, vars, alpha)),
        3 => pred(gen_num_expr(rng, depth - 1, vars, alpha)),
        4 => sub(
            gen_num_expr(rng, depth - 1, vars, alpha),
            gen_num_expr(rng, depth - 1, vars, alpha),
        ),
        5 => {
            let scrut = gen_num_expr(rng, depth - 1, vars, alpha);
            let zero = gen_num_expr(rng, depth - 1, vars, alpha);
            vars.push("m".to_string());
            vars.push("r".to_string());
            let body = gen_num_expr(rng, depth - 1, vars, alpha);
            vars.pop();
            vars.pop();
            natrec(scrut, zero, lam("m", lam("r", body)))
        }
        _ => app(
            var(alpha.unwrap()),
            gen_num_expr(rng, depth - 1, vars, alpha),
        ),
    }
}

/// Closed name-free `λn`-term, total on numerals.
pub fn gen_alpha(seed: u64, size: u32) -> Term {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vars = vec!["n".to_string()];
    lam("n", gen_num_expr(&mut rng, size, &mut vars, None))
}

/// Closed name-free `λa`-term applying `a` to numerals and to results of
/// prior applications.
pub fn gen_f(seed: u64, size: u32) -> Term {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vars = Vec::new();
    lam("a", gen_num_expr(&mut rng, size, &mut vars, Some("a")))
}

/// Small random world: a few freshly created mutable cells with randomized
/// numeric values.
pub fn gen_world(seed: u64, max_cells: u32) -> RefWorld {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(0..=max_cells);
    let mut w = RefWorld::new();
    for _ in 0..n {
        w = w.start_new_choice(Restriction::NatOnly);
    }
    let names: Vec<_> = w.cells.iter().map(|c| c.name).collect();
    for k in names {
        w = w.write(k, BigUint::from(rng.gen_range(0u64..8)));
    }
    w
}

/// A name-free `β` that computes exactly as `α` on every argument below
/// `n` and differs from `α` at `n` and above: below the bound it computes
/// `α y` itself, at/above it bumps the result with `succ^k` (k ≥ 1, drawn
/// from the seed). The argument is bound with a let so the guard probes a
/// numeral instead of re-evaluating the argument term.
pub fn gen_beta_agreeing(alpha: &Term, n: &BigUint, seed: u64, fuel: u64) -> Term {
    let bound = n.to_u64().expect("agreement bound too large");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps = rng.gen_range(1..=4);
    // Sanity-check totality where the suite relies on it.
    let empty = RefWorld::new();
    for i in [0, bound] {
        eval(&app(alpha.clone(), num(i)), &empty, fuel)
            .numeral()
            .unwrap_or_else(|| panic!("alpha must be total on numerals (stuck at {i})"));
    }
    let mut bumped = app(alpha.clone(), var("y"));
    for _ in 0..bumps {
        bumped = succ(bumped);
    }
    let body = iflt(var("y"), num(bound), app(alpha.clone(), var("y")), bumped);
    lam("x", let_("y", var("x"), body))
}

fn splitmix(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E3779B97F4A7C15)
        .wrapping_add(index.wrapping_mul(0xBF58476D1CE4E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derive a per-case seed from a suite seed.
pub fn case_seed(suite_seed: u64, index: u64) -> u64 {
    splitmix(suite_seed, index)
}

/// Budgets keeping generated cases desk-scale: an accepted case's modulus
/// run finishes within this many steps, and its modulus is small enough
/// that table-patched betas stay cheap to build and apply.
const CASE_STEP_BUDGET: u64 = 3_000;
const CASE_MAX_MODULUS: u64 = 48;

/// Draw candidate `(F, α, world)` triples from the seeded stream until one
/// satisfies the theorem hypothesis at desk scale: the modulus computation
/// AND the plain call-by-name application complete within the step budget,
/// with a small modulus. The plain application matters separately because
/// `upd` forces arguments while F(α) re-evaluates them, so the two costs
/// can differ exponentially. Probing runs with the small budget, so
/// rejection is cheap and deterministic.
pub fn gen_case(seed: u64, size: u32, fuel: u64) -> CaseSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probe_fuel = fuel.min(CASE_STEP_BUDGET);
    let max_modulus = BigUint::from(CASE_MAX_MODULUS);
    for _ in 0..1000 {
        let f = gen_f(rng.gen(), size);
        let alpha = gen_alpha(rng.gen(), size);
        let world = gen_world(rng.gen(), 3);
        let small_modulus = match compute_modulus(&f, &alpha, &world, probe_fuel, false) {
            Ok(rep) => rep.modulus <= max_modulus,
            Err(_) => false,
        };
        if small_modulus
            && eval(&app(f.clone(), alpha.clone()), &world, probe_fuel)
                .value()
                .is_some()
        {
            return CaseSpec {
                f,
                alpha,
                world,
                seed,
                fuel,
            };
        }
    }
    panic!("case generation rejected 1000 consecutive candidates (seed {seed})");
}
