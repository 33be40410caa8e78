//! Builders for the continuity terms (`upd`, `mod`, `force`, the realizer)
//! and the object-level modulus computation, together with its independent
//! meta-level oracle.
//!
//! `mod(F, α)` allocates a fresh cell, wraps `α` so that every application
//! records the running maximum argument in that cell, runs `F` on the
//! wrapper, and returns 1 + the recorded maximum. The oracle recomputes the
//! same number from the evaluator's probe log instead of a cell.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::eval::{
    eval, eval_probe, eval_trace, EvalResult, ProbeState, StuckReason, Trace,
};
use crate::term::{
    app, choose, fresh, fresh_binder, iflt, lam, let_, num, pair, read, seq, succ, var,
    ChoiceName, Term,
};
use crate::world::{nat_string, RefWorld};

/// `upd` with an arbitrary term in the name position. `mod` needs the bound
/// variable of its `fresh` there; it becomes a literal name once the fresh
/// step fires.
pub fn upd_with(name_term: Term, alpha: Term) -> Term {
    let x = fresh_binder("x", &[&name_term, &alpha]);
    let xv = var(&x);
    let y = fresh_binder("y", &[&name_term, &alpha, &xv]);
    let body = seq(
        iflt(
            read(name_term.clone()),
            var(&y),
            choose(name_term, var(&y)),
            Term::Star,
        ),
        app(alpha, var(&y)),
    );
    lam(&x, let_(&y, xv, body))
}

/// λx. let y = x in (seq (iflt !κ y (κ := y) ⋆) (α y))
pub fn mk_upd(kappa: ChoiceName, alpha: &Term) -> Term {
    upd_with(Term::Name(kappa), alpha.clone())
}

/// fresh x. (seq (choose x 0) (seq (F (upd x α)) (succ !x)))
pub fn mk_mod(f: &Term, alpha: &Term) -> Term {
    let nm = fresh_binder("nm", &[f, alpha]);
    let nmv = var(&nm);
    fresh(
        &nm,
        seq(
            choose(nmv.clone(), num(0)),
            seq(
                app(f.clone(), upd_with(nmv.clone(), alpha.clone())),
                succ(read(nmv)),
            ),
        ),
    )
}

/// λx. let y = x in (f y) — turns call-by-name application of `f` into
/// call-by-value.
pub fn mk_force(f: &Term) -> Term {
    let x = fresh_binder("x", &[f]);
    let xv = var(&x);
    let y = fresh_binder("y", &[f, &xv]);
    lam(&x, let_(&y, xv, app(f.clone(), var(&y))))
}

/// λF. λa. ⟨mod(F, a), λb. λe. ⋆⟩ — the closed realizer.
pub fn mk_cont_realizer() -> Term {
    lam(
        "F",
        lam(
            "a",
            pair(
                mk_mod(&var("F"), &var("a")),
                lam("b", lam("e", Term::Star)),
            ),
        ),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModulusError {
    #[error("purity violation: {which} contains a choice name or a fresh operator")]
    PurityViolation { which: &'static str },
    #[error("modulus computation returned a non-numeral value `{value}`")]
    NonNumeralResult { value: Term },
    #[error("modulus computation exhausted its fuel")]
    Timeout,
    #[error("modulus computation got stuck ({reason:?}) at `{term}`")]
    Stuck { term: Term, reason: StuckReason },
}

impl ModulusError {
    fn from_result(r: EvalResult) -> Self {
        match r {
            EvalResult::Timeout { .. } => ModulusError::Timeout,
            EvalResult::StuckAt { term, reason, .. } => ModulusError::Stuck { term, reason },
            EvalResult::Done { value, .. } => ModulusError::NonNumeralResult { value },
        }
    }
}

/// Outcome of one modulus computation. The modulus is at least 1 (`mod`
/// returns `succ !κ` and κ starts at 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModulusReport {
    #[serde(with = "nat_string")]
    pub modulus: BigUint,
    pub fuel_used: u64,
    pub final_world: RefWorld,
    pub fresh_name: ChoiceName,
    pub trace_states: Option<usize>,
    #[serde(skip)]
    pub trace: Option<Trace>,
}

/// Evaluate `mod(F, α)` from `w`. Both inputs must be name-free (the purity
/// precondition); the report carries the resulting numeral, the name the
/// fresh step generated, the final world, and optionally the full trace.
pub fn compute_modulus(
    f: &Term,
    alpha: &Term,
    w: &RefWorld,
    fuel: u64,
    want_trace: bool,
) -> Result<ModulusReport, ModulusError> {
    if !f.nonames() {
        return Err(ModulusError::PurityViolation { which: "F" });
    }
    if !alpha.nonames() {
        return Err(ModulusError::PurityViolation { which: "alpha" });
    }
    // The fresh step is the first reduction, so the generated name is the
    // new choice of the initial world.
    let kappa = w.new_choice();
    let term = mk_mod(f, alpha);
    let (result, trace) = if want_trace {
        let tr = eval_trace(&term, w, fuel);
        (tr.result(), Some(tr))
    } else {
        (eval(&term, w, fuel), None)
    };
    match result {
        EvalResult::Done {
            value: Term::Num(n),
            world,
            steps,
        } => {
            debug_assert!(n >= BigUint::one());
            Ok(ModulusReport {
                modulus: n,
                fuel_used: steps,
                final_world: world,
                fresh_name: kappa,
                trace_states: trace.as_ref().map(|t| t.states.len()),
                trace,
            })
        }
        other => Err(ModulusError::from_result(other)),
    }
}

/// Independent brute-force oracle: run `F` against the evaluator's probe
/// (which logs every argument instead of recording maxima in a cell) and
/// return 1 + the largest logged argument (1 if none).
pub fn oracle_modulus(
    f: &Term,
    alpha: &Term,
    w: &RefWorld,
    fuel: u64,
) -> Result<BigUint, ModulusError> {
    if !f.nonames() {
        return Err(ModulusError::PurityViolation { which: "F" });
    }
    if !alpha.nonames() {
        return Err(ModulusError::PurityViolation { which: "alpha" });
    }
    let (result, log) = eval_probe(f, ProbeState::new(alpha.clone()), w, fuel);
    match result {
        EvalResult::Done { .. } => {
            let max = log.into_iter().max().unwrap_or_else(BigUint::zero);
            Ok(max + BigUint::one())
        }
        other => Err(ModulusError::from_result(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::DEFAULT_FUEL;
    use crate::world::{Cell, Restriction};

    fn alpha_succ() -> Term {
        lam("n", succ(var("n")))
    }

    fn f_nested() -> Term {
        lam("a", app(var("a"), app(var("a"), num(2))))
    }

    fn w_with(id: u64, value: u64) -> RefWorld {
        RefWorld::from_cells(vec![Cell {
            name: ChoiceName(id),
            restriction: Restriction::NatOnly,
            value: BigUint::from(value),
            mutable: true,
        }])
        .unwrap()
    }

    #[test]
    fn upd_records_a_larger_argument() {
        let w = w_with(0, 0);
        let t = app(mk_upd(ChoiceName(0), &alpha_succ()), num(2));
        match eval(&t, &w, DEFAULT_FUEL) {
            EvalResult::Done { value, world, .. } => {
                assert_eq!(value, num(3));
                assert_eq!(world, w_with(0, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn upd_skips_a_smaller_argument() {
        let w = w_with(0, 0);
        let t = app(mk_upd(ChoiceName(0), &alpha_succ()), num(0));
        match eval(&t, &w, DEFAULT_FUEL) {
            EvalResult::Done { value, world, .. } => {
                assert_eq!(value, num(1));
                assert_eq!(world, w); // 0 < 0 fails, cell untouched
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn builders_effect_signatures() {
        assert!(!mk_upd(ChoiceName(0), &alpha_succ()).nonames());
        assert!(!mk_mod(&f_nested(), &alpha_succ()).nonames());
        assert!(mk_mod(&f_nested(), &alpha_succ()).names().is_empty());
        assert!(mk_force(&alpha_succ()).nonames());
        let r = mk_cont_realizer();
        assert!(r.is_closed());
        assert!(r.names().is_empty());
        assert!(!r.nonames()); // the fresh inside mod
    }

    #[test]
    fn mod_builder_is_input_deterministic() {
        let a = mk_mod(&f_nested(), &alpha_succ());
        let b = mk_mod(&f_nested(), &alpha_succ());
        assert_eq!(a, b);
        assert!(a.alpha_eq(&b));
    }

    #[test]
    fn worked_example_modulus_is_four() {
        let report =
            compute_modulus(&f_nested(), &alpha_succ(), &RefWorld::new(), DEFAULT_FUEL, false)
                .unwrap();
        assert_eq!(report.modulus, BigUint::from(4u32));
        assert_eq!(report.fresh_name, ChoiceName(0));
        assert_eq!(
            report.final_world.read(ChoiceName(0)),
            Some(&BigUint::from(3u32))
        );
        let oracle =
            oracle_modulus(&f_nested(), &alpha_succ(), &RefWorld::new(), DEFAULT_FUEL).unwrap();
        assert_eq!(oracle, BigUint::from(4u32));
    }

    #[test]
    fn constant_function_has_modulus_one() {
        let f = lam("a", num(0));
        let id = lam("n", var("n"));
        let report = compute_modulus(&f, &id, &RefWorld::new(), DEFAULT_FUEL, false).unwrap();
        assert_eq!(report.modulus, BigUint::one());
        assert_eq!(
            oracle_modulus(&f, &id, &RefWorld::new(), DEFAULT_FUEL).unwrap(),
            BigUint::one()
        );
    }

    #[test]
    fn single_application_modulus() {
        // F = λa. a 5, α = id: the recorded maximum is 5, modulus 6.
        let f = lam("a", app(var("a"), num(5)));
        let id = lam("n", var("n"));
        let report = compute_modulus(&f, &id, &RefWorld::new(), DEFAULT_FUEL, false).unwrap();
        assert_eq!(report.modulus, BigUint::from(6u32));
        assert_eq!(
            oracle_modulus(&f, &id, &RefWorld::new(), DEFAULT_FUEL).unwrap(),
            BigUint::from(6u32)
        );
    }

    #[test]
    fn natrec_branching_modulus() {
        // F = λa. natrec (a 0) (a 1) (λm.λr. a 2), α = id: probes 0 then 1.
        let f = lam(
            "a",
            crate::term::natrec(
                app(var("a"), num(0)),
                app(var("a"), num(1)),
                lam("m", lam("r", app(var("a"), num(2)))),
            ),
        );
        let id = lam("n", var("n"));
        let report = compute_modulus(&f, &id, &RefWorld::new(), DEFAULT_FUEL, false).unwrap();
        assert_eq!(report.modulus, BigUint::from(2u32));
        assert_eq!(
            oracle_modulus(&f, &id, &RefWorld::new(), DEFAULT_FUEL).unwrap(),
            BigUint::from(2u32)
        );
    }

    #[test]
    fn purity_precondition_is_enforced() {
        let impure = lam("n", read(Term::Name(ChoiceName(0))));
        assert_eq!(
            compute_modulus(&f_nested(), &impure, &w_with(0, 0), DEFAULT_FUEL, false),
            Err(ModulusError::PurityViolation { which: "alpha" })
        );
        let impure_f = lam("a", seq(read(Term::Name(ChoiceName(0))), num(0)));
        assert_eq!(
            compute_modulus(&impure_f, &alpha_succ(), &w_with(0, 0), DEFAULT_FUEL, false),
            Err(ModulusError::PurityViolation { which: "F" })
        );
        assert!(matches!(
            oracle_modulus(&impure_f, &alpha_succ(), &w_with(0, 0), DEFAULT_FUEL),
            Err(ModulusError::PurityViolation { which: "F" })
        ));
    }

    #[test]
    fn divergent_f_times_out() {
        let f = lam("a", crate::term::fix(lam("x", var("x"))));
        assert_eq!(
            compute_modulus(&f, &alpha_succ(), &RefWorld::new(), 200, false),
            Err(ModulusError::Timeout)
        );
    }

    #[test]
    fn force_makes_application_eager() {
        // Forcing evaluates the (effectful) argument first.
        let w = w_with(0, 0);
        let const0 = lam("n", num(0));
        let arg = seq(choose(Term::Name(ChoiceName(0)), num(1)), num(1));
        match eval(&app(mk_force(&const0), arg.clone()), &w, DEFAULT_FUEL) {
            EvalResult::Done { value, world, .. } => {
                assert_eq!(value, num(0));
                assert_eq!(world, w_with(0, 1)); // the write fired
            }
            other => panic!("unexpected {other:?}"),
        }
        // Plain call-by-name application never evaluates the argument.
        match eval(&app(const0, arg), &w, DEFAULT_FUEL) {
            EvalResult::Done { world, .. } => assert_eq!(world, w),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn forcing_a_numeral_is_inert() {
        let t = app(mk_force(&alpha_succ()), num(4));
        assert_eq!(eval(&t, &RefWorld::new(), DEFAULT_FUEL).value(), Some(&num(5)));
    }

    #[test]
    fn realizer_computes_the_modulus_in_its_first_component() {
        let w = RefWorld::new();
        let applied = app(app(mk_cont_realizer(), f_nested()), alpha_succ());
        let result = eval(&applied, &w, DEFAULT_FUEL);
        let value = result.value().expect("realizer application converges");
        let Term::Pair(first, second) = value else {
            panic!("expected a pair, got {value}");
        };
        // First component: the mod term, evaluated from the pair's world.
        let first_val = eval(first, result.final_world(), DEFAULT_FUEL);
        let expected =
            compute_modulus(&f_nested(), &alpha_succ(), result.final_world(), DEFAULT_FUEL, false)
                .unwrap();
        assert_eq!(first_val.numeral(), Some(&expected.modulus));
        // Second component: constant ⋆.
        let second_val = eval(
            &app(app((**second).clone(), num(0)), num(1)),
            &w,
            DEFAULT_FUEL,
        );
        assert_eq!(second_val.value(), Some(&Term::Star));
    }

    #[test]
    fn report_serializes_without_the_trace() {
        let report =
            compute_modulus(&f_nested(), &alpha_succ(), &RefWorld::new(), DEFAULT_FUEL, true)
                .unwrap();
        assert!(report.trace.is_some());
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["modulus"], "4");
        assert!(json["trace_states"].as_u64().is_some());
        assert!(json.get("trace").is_none());
    }
}
