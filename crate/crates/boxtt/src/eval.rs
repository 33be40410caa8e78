//! Deterministic call-by-name small-step machine: one reduction rule per
//! construct, congruence on exactly the boxed argument positions
//! (application head, fix argument, let binding, succ/natrec/spread/decide
//! scrutinees, read and choose targets), multi-step driving with fuel, full
//! traces, and an instrumented probe mode used by the continuity oracle.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::term::{app, natrec, Term};
use crate::world::{coerce, RefWorld, Restriction};

/// Step budget used when the caller does not specify one.
pub const DEFAULT_FUEL: u64 = 100_000;

/// Head variable reserved for the probe redex; the parser rejects `%`, so
/// user terms can never contain or capture it.
const PROBE_HEAD: &str = "%probe";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StuckReason {
    FreeVariable,
    BadApplication,
    BadScrutinee,
    ReadUnknownName,
    NonNumeralChoiceRead,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Stepped(Term, RefWorld),
    IsValue,
    Stuck(StuckReason),
}

/// Meta-level argument recorder: evaluating `App(F, probe)` logs every
/// numeral the probe head is applied to, then behaves as `probe_function`.
#[derive(Debug, Clone)]
pub struct ProbeState {
    pub probe_function: Term,
    pub log: Vec<BigUint>,
}

impl ProbeState {
    pub fn new(probe_function: Term) -> Self {
        ProbeState {
            probe_function,
            log: Vec::new(),
        }
    }
}

/// One reduction step of `(t, w)`.
pub fn step(t: &Term, w: &RefWorld) -> StepOutcome {
    step_in(t, w, None)
}

fn step_in(t: &Term, w: &RefWorld, probe: Option<&mut ProbeState>) -> StepOutcome {
    use StepOutcome::*;
    if t.is_value() {
        return IsValue;
    }
    match t {
        Term::Var(_) => Stuck(StuckReason::FreeVariable),
        Term::App(f, a) => {
            if probe.is_some() && matches!(f.as_ref(), Term::Var(v) if v == PROBE_HEAD) {
                return step_probe_redex(a, w, probe.unwrap());
            }
            if f.is_value() {
                match f.as_ref() {
                    Term::Lam(x, body) => Stepped(body.subst(x, a), w.clone()),
                    _ => Stuck(StuckReason::BadApplication),
                }
            } else {
                match step_in(f, w, probe) {
                    Stepped(f2, w2) => Stepped(app(f2, (**a).clone()), w2),
                    Stuck(r) => Stuck(r),
                    IsValue => unreachable!(),
                }
            }
        }
        Term::Fix(inner) => {
            if inner.is_value() {
                Stepped(app((**inner).clone(), t.clone()), w.clone())
            } else {
                match step_in(inner, w, probe) {
                    Stepped(t2, w2) => Stepped(Term::Fix(Box::new(t2)), w2),
                    Stuck(r) => Stuck(r),
                    IsValue => unreachable!(),
                }
            }
        }
        Term::Let { x, bound, body } => {
            if bound.is_value() {
                Stepped(body.subst(x, bound), w.clone())
            } else {
                match step_in(bound, w, probe) {
                    Stepped(b2, w2) => Stepped(
                        Term::Let {
                            x: x.clone(),
                            bound: Box::new(b2),
                            body: body.clone(),
                        },
                        w2,
                    ),
                    Stuck(r) => Stuck(r),
                    IsValue => unreachable!(),
                }
            }
        }
        Term::Succ(inner) => {
            if inner.is_value() {
                match inner.as_ref() {
                    Term::Num(n) => Stepped(Term::Num(n + BigUint::one()), w.clone()),
                    _ => Stuck(StuckReason::BadScrutinee),
                }
            } else {
                match step_in(inner, w, probe) {
                    Stepped(t2, w2) => Stepped(Term::Succ(Box::new(t2)), w2),
                    Stuck(r) => Stuck(r),
                    IsValue => unreachable!(),
                }
            }
        }
        Term::NatRec { scrut, zero, succ } => {
            if scrut.is_value() {
                match scrut.as_ref() {
                    Term::Num(n) if n.is_zero() => Stepped((**zero).clone(), w.clone()),
                    Term::Num(n) => {
                        let m = Term::Num(n - BigUint::one());
                        let rec = natrec(m.clone(), (**zero).clone(), (**succ).clone());
                        Stepped(app(app((**succ).clone(), m), rec), w.clone())
                    }
                    _ => Stuck(StuckReason::BadScrutinee),
                }
            } else {
                match step_in(scrut, w, probe) {
                    Stepped(s2, w2) => Stepped(
                        natrec(s2, (**zero).clone(), (**succ).clone()),
                        w2,
                    ),
                    Stuck(r) => Stuck(r),
                    IsValue => unreachable!(),
                }
            }
        }
        Term::Spread { scrut, x, y, body } => {
            if scrut.is_value() {
                match scrut.as_ref() {
                    Term::Pair(a, b) => Stepped(body.subst(x, a).subst(y, b), w.clone()),
                    _ => Stuck(StuckReason::BadScrutinee),
                }
            } else {
                match step_in(scrut, w, probe) {
                    Stepped(s2, w2) => Stepped(
                        Term::Spread {
                            scrut: Box::new(s2),
                            x: x.clone(),
                            y: y.clone(),
                            body: body.clone(),
                        },
                        w2,
                    ),
                    Stuck(r) => Stuck(r),
                    IsValue => unreachable!(),
                }
            }
        }
        Term::Decide {
            scrut,
            x,
            left,
            y,
            right,
        } => {
            if scrut.is_value() {
                match scrut.as_ref() {
                    Term::Inl(t1) => Stepped(left.subst(x, t1), w.clone()),
                    Term::Inr(t2) => Stepped(right.subst(y, t2), w.clone()),
                    _ => Stuck(StuckReason::BadScrutinee),
                }
            } else {
                match step_in(scrut, w, probe) {
                    Stepped(s2, w2) => Stepped(
                        Term::Decide {
                            scrut: Box::new(s2),
                            x: x.clone(),
                            left: left.clone(),
                            y: y.clone(),
                            right: right.clone(),
                        },
                        w2,
                    ),
                    Stuck(r) => Stuck(r),
                    IsValue => unreachable!(),
                }
            }
        }
        Term::Read(target) => {
            if target.is_value() {
                match target.as_ref() {
                    Term::Name(k) => match w.read(*k) {
                        Some(c) => Stepped(Term::Num(c.clone()), w.clone()),
                        None => Stuck(StuckReason::ReadUnknownName),
                    },
                    _ => Stuck(StuckReason::NonNumeralChoiceRead),
                }
            } else {
                match step_in(target, w, probe) {
                    Stepped(t2, w2) => Stepped(Term::Read(Box::new(t2)), w2),
                    Stuck(r) => Stuck(r),
                    IsValue => unreachable!(),
                }
            }
        }
        Term::Choose { target, value } => {
            if target.is_value() {
                match target.as_ref() {
                    Term::Name(k) => Stepped(Term::Star, w.write(*k, coerce(value))),
                    _ => Stuck(StuckReason::NonNumeralChoiceRead),
                }
            } else {
                match step_in(target, w, probe) {
                    Stepped(t2, w2) => Stepped(
                        Term::Choose {
                            target: Box::new(t2),
                            value: value.clone(),
                        },
                        w2,
                    ),
                    Stuck(r) => Stuck(r),
                    IsValue => unreachable!(),
                }
            }
        }
        Term::Fresh { x, body } => {
            let k = w.new_choice();
            Stepped(
                body.subst(x, &Term::Name(k)),
                w.start_new_choice(Restriction::NatOnly),
            )
        }
        // values handled by the is_value guard above
        _ => unreachable!("non-value fell through: {t:?}"),
    }
}

/// The probe redex `App(%probe, arg)`: force `arg` call-by-value; once it
/// is a numeral, record it and continue as `App(probe_function, numeral)`.
fn step_probe_redex(arg: &Term, w: &RefWorld, probe: &mut ProbeState) -> StepOutcome {
    use StepOutcome::*;
    if arg.is_value() {
        match arg {
            Term::Num(n) => {
                probe.log.push(n.clone());
                Stepped(app(probe.probe_function.clone(), arg.clone()), w.clone())
            }
            _ => Stuck(StuckReason::BadScrutinee),
        }
    } else {
        match step_in(arg, w, Some(probe)) {
            Stepped(a2, w2) => Stepped(app(Term::Var(PROBE_HEAD.to_string()), a2), w2),
            Stuck(r) => Stuck(r),
            IsValue => unreachable!(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalResult {
    Done {
        value: Term,
        world: RefWorld,
        steps: u64,
    },
    Timeout {
        last_term: Term,
        last_world: RefWorld,
    },
    StuckAt {
        term: Term,
        world: RefWorld,
        reason: StuckReason,
    },
}

impl EvalResult {
    pub fn value(&self) -> Option<&Term> {
        match self {
            EvalResult::Done { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn final_world(&self) -> &RefWorld {
        match self {
            EvalResult::Done { world, .. } => world,
            EvalResult::Timeout { last_world, .. } => last_world,
            EvalResult::StuckAt { world, .. } => world,
        }
    }

    /// The computed numeral, if the computation finished on one.
    pub fn numeral(&self) -> Option<&BigUint> {
        match self.value() {
            Some(Term::Num(n)) => Some(n),
            _ => None,
        }
    }
}

/// Iterate `step` at most `fuel` times.
pub fn eval(t: &Term, w: &RefWorld, fuel: u64) -> EvalResult {
    eval_in(t, w, fuel, None)
}

fn eval_in(t: &Term, w: &RefWorld, fuel: u64, mut probe: Option<&mut ProbeState>) -> EvalResult {
    let mut term = t.clone();
    let mut world = w.clone();
    let mut steps = 0u64;
    loop {
        if term.is_value() {
            return EvalResult::Done {
                value: term,
                world,
                steps,
            };
        }
        if steps == fuel {
            return EvalResult::Timeout {
                last_term: term,
                last_world: world,
            };
        }
        match step_in(&term, &world, probe.as_deref_mut()) {
            StepOutcome::Stepped(t2, w2) => {
                term = t2;
                world = w2;
                steps += 1;
            }
            StepOutcome::Stuck(reason) => {
                return EvalResult::StuckAt {
                    term,
                    world,
                    reason,
                }
            }
            StepOutcome::IsValue => unreachable!(),
        }
    }
}

/// The sequence of `(term, world)` states of a multi-step computation.
/// Consecutive states are related by `step`; the first state is the input
/// and the last is a value unless the trace is exhausted or stuck.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub states: Vec<(Term, RefWorld)>,
    pub exhausted: bool,
    pub stuck: Option<StuckReason>,
}

impl Trace {
    pub fn last(&self) -> &(Term, RefWorld) {
        self.states.last().expect("a trace has at least one state")
    }

    pub fn result(&self) -> EvalResult {
        let (t, w) = self.last().clone();
        if let Some(reason) = self.stuck {
            EvalResult::StuckAt {
                term: t,
                world: w,
                reason,
            }
        } else if self.exhausted {
            EvalResult::Timeout {
                last_term: t,
                last_world: w,
            }
        } else {
            EvalResult::Done {
                value: t,
                world: w,
                steps: (self.states.len() - 1) as u64,
            }
        }
    }
}

/// As `eval`, retaining every intermediate state.
pub fn eval_trace(t: &Term, w: &RefWorld, fuel: u64) -> Trace {
    let mut states = vec![(t.clone(), w.clone())];
    loop {
        let (term, world) = states.last().unwrap();
        if term.is_value() {
            return Trace {
                states,
                exhausted: false,
                stuck: None,
            };
        }
        if states.len() as u64 > fuel {
            return Trace {
                states,
                exhausted: true,
                stuck: None,
            };
        }
        match step(term, world) {
            StepOutcome::Stepped(t2, w2) => states.push((t2, w2)),
            StepOutcome::Stuck(reason) => {
                return Trace {
                    states,
                    exhausted: false,
                    stuck: Some(reason),
                }
            }
            StepOutcome::IsValue => unreachable!(),
        }
    }
}

/// Evaluate `App(f, probe-head)`, forcing every probe argument to a numeral
/// call-by-value and logging it. Returns the result together with the
/// complete argument log.
pub fn eval_probe(
    f: &Term,
    probe: ProbeState,
    w: &RefWorld,
    fuel: u64,
) -> (EvalResult, Vec<BigUint>) {
    let mut probe = probe;
    let start = app(f.clone(), Term::Var(PROBE_HEAD.to_string()));
    let result = eval_in(&start, w, fuel, Some(&mut probe));
    (result, probe.log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::*;
    use crate::world::{extends, Cell, RefWorld};

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
    fn identity_beta_step() {
        let w = RefWorld::new();
        let t = app(lam("x", var("x")), num(0));
        assert_eq!(step(&t, &w), StepOutcome::Stepped(num(0), w.clone()));
    }

    #[test]
    fn read_leaves_world_unchanged() {
        let w = w_with(1, 3);
        assert_eq!(
            step(&read(name(1)), &w),
            StepOutcome::Stepped(num(3), w.clone())
        );
    }

    #[test]
    fn choose_writes_coerced_value() {
        let w = w_with(1, 0);
        assert_eq!(
            step(&choose(name(1), num(5)), &w),
            StepOutcome::Stepped(Term::Star, w_with(1, 5))
        );
    }

    #[test]
    fn fresh_allocates_the_next_name() {
        let w = RefWorld::new();
        let out = step(&fresh("x", var("x")), &w);
        assert_eq!(out, StepOutcome::Stepped(name(0), w_with(0, 0)));
    }

    #[test]
    fn read_of_unknown_name_is_stuck() {
        let r = eval(&read(name(9)), &RefWorld::new(), 10);
        assert!(matches!(
            r,
            EvalResult::StuckAt {
                reason: StuckReason::ReadUnknownName,
                ..
            }
        ));
    }

    #[test]
    fn read_of_non_name_value_is_stuck() {
        let r = eval(&read(num(3)), &RefWorld::new(), 10);
        assert!(matches!(
            r,
            EvalResult::StuckAt {
                reason: StuckReason::NonNumeralChoiceRead,
                ..
            }
        ));
    }

    #[test]
    fn bad_application_is_stuck() {
        let r = eval(&app(num(1), num(2)), &RefWorld::new(), 10);
        assert!(matches!(
            r,
            EvalResult::StuckAt {
                reason: StuckReason::BadApplication,
                ..
            }
        ));
    }

    #[test]
    fn divergent_fixpoint_times_out() {
        let r = eval(&fix(lam("x", var("x"))), &RefWorld::new(), 100);
        assert!(matches!(r, EvalResult::Timeout { .. }));
    }

    #[test]
    fn write_then_read_chains() {
        // let _ = (κ := 1) in !κ  from a world with κ = 0
        let w = w_with(0, 0);
        let t = seq(choose(name(0), num(1)), read(name(0)));
        match eval(&t, &w, 100) {
            EvalResult::Done { value, world, .. } => {
                assert_eq!(value, num(1));
                assert_eq!(world, w_with(0, 1));
            }
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn sugar_evaluates_as_derived() {
        let w = RefWorld::new();
        assert_eq!(eval(&lt(num(2), num(5)), &w, 1000).value(), Some(&btrue()));
        assert_eq!(eval(&lt(num(5), num(2)), &w, 1000).value(), Some(&bfalse()));
        assert_eq!(eval(&lt(num(2), num(2)), &w, 1000).value(), Some(&bfalse()));
        assert_eq!(eval(&sub(num(5), num(2)), &w, 1000).value(), Some(&num(3)));
        assert_eq!(eval(&sub(num(2), num(5)), &w, 1000).value(), Some(&num(0)));
        assert_eq!(eval(&iszero(num(0)), &w, 1000).value(), Some(&btrue()));
        assert_eq!(eval(&iszero(num(2)), &w, 1000).value(), Some(&bfalse()));
        assert_eq!(eval(&pred(num(4)), &w, 1000).value(), Some(&num(3)));
        assert_eq!(eval(&pred(num(0)), &w, 1000).value(), Some(&num(0)));
    }

    #[test]
    fn value_trace_is_a_single_state() {
        let w = RefWorld::new();
        let tr = eval_trace(&num(3), &w, 10);
        assert_eq!(tr.states, vec![(num(3), w)]);
        assert!(!tr.exhausted);
    }

    #[test]
    fn trace_states_are_step_related_and_world_chained() {
        let w = w_with(0, 0);
        let t = seq(choose(name(0), num(4)), succ(read(name(0))));
        let tr = eval_trace(&t, &w, 100);
        for pair in tr.states.windows(2) {
            let (ref t1, ref w1) = pair[0];
            let (ref t2, ref w2) = pair[1];
            assert_eq!(
                step(t1, w1),
                StepOutcome::Stepped(t2.clone(), w2.clone())
            );
            assert!(extends(w1, w2));
        }
        assert!(extends(&tr.states[0].1, &tr.last().1));
        assert_eq!(tr.result().value(), Some(&num(5)));
    }

    #[test]
    fn step_is_deterministic() {
        let w = w_with(0, 2);
        let t = app(lam("x", succ(var("x"))), read(name(0)));
        assert_eq!(step(&t, &w), step(&t, &w));
    }

    #[test]
    fn fuel_monotonicity() {
        let w = RefWorld::new();
        let t = sub(num(9), num(4));
        let r1 = eval(&t, &w, 10_000);
        if let EvalResult::Done { steps, .. } = r1 {
            for extra in [0, 1, 17] {
                assert_eq!(eval(&t, &w, steps + extra), r1);
            }
        } else {
            panic!("expected Done");
        }
    }

    #[test]
    fn nowrite_witness_pair() {
        // read-then-restore ends in its initial world; blind increment does
        // not (choose coerces the non-numeral succ-term to 0).
        let w = w_with(0, 3);
        let restore = let_(
            "x",
            read(name(0)),
            seq(
                choose(name(0), succ(var("x"))),
                choose(name(0), var("x")),
            ),
        );
        match eval(&restore, &w, 1000) {
            EvalResult::Done { world, .. } => assert_eq!(world, w),
            other => panic!("unexpected {other:?}"),
        }
        let bump = choose(name(0), succ(read(name(0))));
        match eval(&bump, &w, 1000) {
            EvalResult::Done { world, .. } => assert_ne!(world, w),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn probe_logs_forced_arguments() {
        // F = λf. f (f 2): log is [2, 3] with probe λn. succ n.
        let f = lam("f", app(var("f"), app(var("f"), num(2))));
        let probe = ProbeState::new(lam("n", succ(var("n"))));
        let (result, log) = eval_probe(&f, probe, &RefWorld::new(), 10_000);
        assert_eq!(result.value(), Some(&num(4)));
        assert_eq!(log, vec![BigUint::from(2u32), BigUint::from(3u32)]);
    }

    #[test]
    fn probe_unused_and_single_use() {
        let f0 = lam("f", num(0));
        let (r0, log0) = eval_probe(&f0, ProbeState::new(lam("n", var("n"))), &RefWorld::new(), 100);
        assert_eq!(r0.value(), Some(&num(0)));
        assert!(log0.is_empty());

        let f1 = lam("f", app(var("f"), num(0)));
        let (r1, log1) = eval_probe(&f1, ProbeState::new(lam("n", var("n"))), &RefWorld::new(), 100);
        assert_eq!(r1.value(), Some(&num(0)));
        assert_eq!(log1, vec![BigUint::zero()]);
    }

    #[test]
    fn probe_argument_must_be_a_numeral() {
        let f = lam("f", app(var("f"), lam("z", var("z"))));
        let (r, _) = eval_probe(&f, ProbeState::new(lam("n", var("n"))), &RefWorld::new(), 100);
        assert!(matches!(
            r,
            EvalResult::StuckAt {
                reason: StuckReason::BadScrutinee,
                ..
            }
        ));
    }
}
