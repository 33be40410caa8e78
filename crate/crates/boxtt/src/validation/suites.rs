//! The property suites: deterministic, seeded, parallel over independent
//! cases, reporting failures with enough context to replay them.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::continuity::{compute_modulus, mk_force, mk_mod, mk_upd, oracle_modulus, ModulusError};
use crate::eval::{eval, eval_trace, step, EvalResult, StepOutcome, DEFAULT_FUEL};
use crate::sexpr::{print_term, print_world};
use crate::term::{app, choose, iflt, lam, let_, num, read, seq, succ, var, ChoiceName, Term};
use crate::world::{extends, sample_extensions, Cell, RefWorld, Restriction};

use super::gen::{case_seed, gen_beta_agreeing, gen_case, CaseSpec};
use super::member::{member_noread_sampled, member_nowrite_sampled, member_pure, SamplingParams};
use super::sim::sim_force;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SuiteConfig {
    pub cases: u32,
    pub seed: u64,
    pub fuel: u64,
    pub betas: u32,
    pub samples: u32,
    pub depth: u32,
    pub size: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            cases: 500,
            seed: 42,
            fuel: DEFAULT_FUEL,
            betas: 10,
            samples: 16,
            depth: 4,
            size: 6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseFailure {
    pub case_index: u32,
    pub seed: u64,
    pub f: String,
    pub alpha: String,
    pub world: String,
    pub expected: String,
    pub actual: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases_run: u32,
    pub failures: Vec<CaseFailure>,
    pub wall_ms: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Copy with the timing field zeroed, for byte-stable comparisons.
    pub fn timing_stripped(&self) -> SuiteReport {
        SuiteReport {
            wall_ms: 0,
            ..self.clone()
        }
    }
}

fn failure(
    idx: u32,
    cs: &CaseSpec,
    expected: impl Into<String>,
    actual: impl Into<String>,
    message: impl Into<String>,
) -> CaseFailure {
    CaseFailure {
        case_index: idx,
        seed: cs.seed,
        f: print_term(&cs.f),
        alpha: print_term(&cs.alpha),
        world: print_world(&cs.world),
        expected: expected.into(),
        actual: actual.into(),
        message: message.into(),
    }
}

fn run_generated<F>(name: &str, cfg: &SuiteConfig, check: F) -> SuiteReport
where
    F: Fn(u32, &CaseSpec) -> Vec<CaseFailure> + Sync,
{
    let started = Instant::now();
    let mut results: Vec<(u32, Vec<CaseFailure>)> = (0..cfg.cases)
        .into_par_iter()
        .map(|idx| {
            let cs = gen_case(case_seed(cfg.seed, idx as u64), cfg.size, cfg.fuel);
            (idx, check(idx, &cs))
        })
        .collect();
    results.sort_by_key(|(i, _)| *i);
    SuiteReport {
        suite: name.to_string(),
        cases_run: cfg.cases,
        failures: results.into_iter().flat_map(|(_, f)| f).collect(),
        wall_ms: started.elapsed().as_millis() as u64,
    }
}

/// Modulus-is-a-number: one numeral per case, invariant across sampled
/// initial extensions, equal to the probe oracle.
pub fn check_modulus_suite(cfg: &SuiteConfig) -> SuiteReport {
    run_generated("modulus", cfg, |idx, cs| {
        let mut fails = Vec::new();
        let oracle = match oracle_modulus(&cs.f, &cs.alpha, &cs.world, cs.fuel) {
            Ok(n) => n,
            Err(e) => {
                fails.push(failure(idx, cs, "an oracle modulus", e.to_string(), "oracle failed"));
                return fails;
            }
        };
        let exts = sample_extensions(&cs.world, cfg.depth, cfg.samples, case_seed(cs.seed, 0xE7));
        let mut observed: Option<BigUint> = None;
        for ext in &exts {
            match compute_modulus(&cs.f, &cs.alpha, ext, cs.fuel, false) {
                Ok(rep) => match &observed {
                    None => observed = Some(rep.modulus),
                    Some(m) => {
                        if *m != rep.modulus {
                            fails.push(failure(
                                idx,
                                cs,
                                m.to_string(),
                                rep.modulus.to_string(),
                                format!(
                                    "modulus varies across extensions (at {})",
                                    print_world(ext)
                                ),
                            ));
                        }
                    }
                },
                Err(e) => fails.push(failure(
                    idx,
                    cs,
                    "a numeral modulus",
                    e.to_string(),
                    format!("compute_modulus failed at {}", print_world(ext)),
                )),
            }
        }
        if let Some(m) = observed {
            if m != oracle {
                fails.push(failure(
                    idx,
                    cs,
                    oracle.to_string(),
                    m.to_string(),
                    "modulus disagrees with the probe oracle",
                ));
            }
        }
        fails
    })
}

/// Highest-number: along the modulus trace the fresh cell never exceeds
/// modulus − 1, and ends exactly there.
pub fn check_highest_suite(cfg: &SuiteConfig) -> SuiteReport {
    run_generated("highest", cfg, |idx, cs| {
        let mut fails = Vec::new();
        let rep = match compute_modulus(&cs.f, &cs.alpha, &cs.world, cs.fuel, true) {
            Ok(r) => r,
            Err(e) => {
                fails.push(failure(idx, cs, "a modulus report", e.to_string(), "compute_modulus failed"));
                return fails;
            }
        };
        let bound = &rep.modulus - BigUint::one();
        let trace = rep.trace.as_ref().expect("trace was requested");
        for (i, (_, w)) in trace.states.iter().enumerate() {
            if let Some(v) = w.read(rep.fresh_name) {
                if *v > bound {
                    fails.push(failure(
                        idx,
                        cs,
                        format!("κ ≤ {bound}"),
                        v.to_string(),
                        format!("trace state {i} exceeds the modulus bound"),
                    ));
                }
            }
        }
        match rep.final_world.read(rep.fresh_name) {
            Some(v) if *v == bound => {}
            other => fails.push(failure(
                idx,
                cs,
                format!("final κ = {bound}"),
                format!("{other:?}"),
                "final choice value is not modulus − 1",
            )),
        }
        fails
    })
}

/// Continuity: for β agreeing with α below the modulus, F(α), F(β) and
/// F(force β) compute the same numeral; the upd/force similarity holds in
/// lockstep until the computations desynchronize.
pub fn check_continuity_suite(cfg: &SuiteConfig) -> SuiteReport {
    run_generated("continuity", cfg, |idx, cs| {
        let mut fails = Vec::new();
        let rep = match compute_modulus(&cs.f, &cs.alpha, &cs.world, cs.fuel, false) {
            Ok(r) => r,
            Err(e) => {
                fails.push(failure(idx, cs, "a modulus", e.to_string(), "compute_modulus failed"));
                return fails;
            }
        };
        let a_val = match eval(&app(cs.f.clone(), cs.alpha.clone()), &cs.world, cs.fuel) {
            EvalResult::Done {
                value: Term::Num(n),
                ..
            } => n,
            other => {
                fails.push(failure(
                    idx,
                    cs,
                    "F(α) ⇓ numeral",
                    format!("{other:?}"),
                    "plain application did not converge on a numeral",
                ));
                return fails;
            }
        };
        for j in 0..cfg.betas {
            let beta = gen_beta_agreeing(
                &cs.alpha,
                &rep.modulus,
                case_seed(cs.seed, 0x1000 + j as u64),
                cs.fuel,
            );
            match eval(&app(cs.f.clone(), beta.clone()), &cs.world, cs.fuel) {
                EvalResult::Done {
                    value: Term::Num(n),
                    ..
                } if n == a_val => {}
                other => {
                    fails.push(failure(
                        idx,
                        cs,
                        format!("F(β) ⇓ {a_val}"),
                        format!("{other:?}"),
                        format!("β #{j} disagrees with F(α): {}", print_term(&beta)),
                    ));
                    continue;
                }
            }
            let forced = app(cs.f.clone(), mk_force(&beta));
            match eval(&forced, &cs.world, cs.fuel) {
                EvalResult::Done {
                    value: Term::Num(n),
                    world,
                    ..
                } if n == a_val && world == cs.world => {}
                other => {
                    fails.push(failure(
                        idx,
                        cs,
                        format!("F(force β) ⇓ {a_val} with the world unchanged"),
                        format!("{other:?}"),
                        format!("forced application misbehaved for β #{j}"),
                    ));
                    continue;
                }
            }
            if let Some(fail) = lockstep_spot_check(idx, cs, &beta) {
                fails.push(fail);
            }
        }
        fails
    })
}

/// Step F(upd κ α) and F(force β) side by side for up to 100 steps,
/// checking the similarity at each aligned index. The relation is expected
/// to hold from the start; once the two computations desynchronize (the
/// first upd/force redex firing) the check stops silently.
fn lockstep_spot_check(idx: u32, cs: &CaseSpec, beta: &Term) -> Option<CaseFailure> {
    let kappa = cs.world.new_choice();
    let mut w1 = cs
        .world
        .start_new_choice(Restriction::NatOnly)
        .write(kappa, BigUint::from(0u32));
    let mut w2 = cs.world.clone();
    let mut t1 = app(cs.f.clone(), mk_upd(kappa, &cs.alpha));
    let mut t2 = app(cs.f.clone(), mk_force(beta));
    if !sim_force(&t1, &t2, kappa, &cs.alpha, beta) {
        return Some(failure(
            idx,
            cs,
            "sim_force(F(upd κ α), F(force β))",
            "unrelated".to_string(),
            "initial similarity failed",
        ));
    }
    for _ in 0..100 {
        match (step(&t1, &w1), step(&t2, &w2)) {
            (StepOutcome::Stepped(n1, nw1), StepOutcome::Stepped(n2, nw2)) => {
                t1 = n1;
                w1 = nw1;
                t2 = n2;
                w2 = nw2;
                if !sim_force(&t1, &t2, kappa, &cs.alpha, beta) {
                    return None; // desynchronized; final states already checked
                }
            }
            _ => return None, // one side finished or stuck
        }
    }
    None
}

/// Computations respect the extension order: both the modulus computation
/// and the plain application produce ⊑-chains.
pub fn check_extension_suite(cfg: &SuiteConfig) -> SuiteReport {
    run_generated("extension", cfg, |idx, cs| {
        let mut fails = Vec::new();
        let targets = [
            ("mod(F,α)", mk_mod(&cs.f, &cs.alpha)),
            ("F(α)", app(cs.f.clone(), cs.alpha.clone())),
        ];
        for (label, t) in targets {
            let tr = eval_trace(&t, &cs.world, cs.fuel);
            if tr.exhausted || tr.stuck.is_some() {
                fails.push(failure(
                    idx,
                    cs,
                    format!("{label} converges"),
                    format!("exhausted={} stuck={:?}", tr.exhausted, tr.stuck),
                    "trace did not finish",
                ));
                continue;
            }
            for (i, pair) in tr.states.windows(2).enumerate() {
                if !extends(&pair[0].1, &pair[1].1) {
                    fails.push(failure(
                        idx,
                        cs,
                        "w_i ⊑ w_{i+1}",
                        format!("broken at step {i}"),
                        format!("{label} trace is not a ⊑-chain"),
                    ));
                }
            }
            if !extends(&tr.states[0].1, &tr.last().1) {
                fails.push(failure(
                    idx,
                    cs,
                    "w_first ⊑ w_last",
                    "violated".to_string(),
                    format!("{label} end worlds not ordered"),
                ));
            }
        }
        fails
    })
}

fn fixed_case(f: &Term, alpha: &Term, w: &RefWorld) -> CaseSpec {
    CaseSpec {
        f: f.clone(),
        alpha: alpha.clone(),
        world: w.clone(),
        seed: 0,
        fuel: DEFAULT_FUEL,
    }
}

fn mut_cell(id: u64, value: u64) -> Cell {
    Cell {
        name: ChoiceName(id),
        restriction: Restriction::NatOnly,
        value: BigUint::from(value),
        mutable: true,
    }
}

/// The impure-α regression: with γ = 0, plain application computes 0 (the
/// argument is never evaluated) while the upd-wrapped application forces
/// the argument, flips γ, and computes 1; compute_modulus must reject the
/// impure α outright.
pub fn check_purity_counterexample(fuel: u64) -> SuiteReport {
    let started = Instant::now();
    let mut failures = Vec::new();
    let gamma = ChoiceName(0);
    let kappa = ChoiceName(1);
    let w = RefWorld::from_cells(vec![mut_cell(0, 0), mut_cell(1, 0)]).unwrap();
    let alpha = lam(
        "n",
        iflt(read(Term::Name(gamma)), num(1), num(0), num(1)),
    );
    let n_term = seq(choose(Term::Name(gamma), num(1)), num(1));
    let cs = fixed_case(&lam("a", app(var("a"), num(0))), &alpha, &w);

    match eval(&app(alpha.clone(), n_term.clone()), &w, fuel) {
        EvalResult::Done { value, .. } if value == num(0) => {}
        other => failures.push(failure(
            0,
            &cs,
            "α(n) ⇓ 0 in a γ=0 world",
            format!("{other:?}"),
            "plain application must not evaluate its argument",
        )),
    }
    match eval(&app(mk_upd(kappa, &alpha), n_term), &w, fuel) {
        EvalResult::Done { value, .. } if value == num(1) => {}
        other => failures.push(failure(
            0,
            &cs,
            "upd(κ,α)(n) ⇓ 1",
            format!("{other:?}"),
            "upd must force the argument and flip γ first",
        )),
    }
    match compute_modulus(&cs.f, &alpha, &w, fuel, false) {
        Err(ModulusError::PurityViolation { .. }) => {}
        other => failures.push(failure(
            0,
            &cs,
            "PurityViolation",
            format!("{other:?}"),
            "compute_modulus accepted an impure α",
        )),
    }
    SuiteReport {
        suite: "purity-counterexample".to_string(),
        cases_run: 1,
        failures,
        wall_ms: started.elapsed().as_millis() as u64,
    }
}

/// The six canonical effect-membership checks, run in a κ=3 world so that
/// the blind increment (which actually writes the coercion of a non-numeral,
/// 0) genuinely changes the world.
pub fn check_membership_suite(fuel: u64) -> SuiteReport {
    let started = Instant::now();
    let mut failures = Vec::new();
    let w = RefWorld::from_cells(vec![mut_cell(0, 3)]).unwrap();
    let kappa = Term::Name(ChoiceName(0));
    let params = SamplingParams::default();

    let bump = choose(kappa.clone(), succ(read(kappa.clone())));
    let restore = let_(
        "x",
        read(kappa.clone()),
        seq(
            choose(kappa.clone(), succ(var("x"))),
            choose(kappa.clone(), var("x")),
        ),
    );
    let checks: Vec<(&str, Term, bool, bool)> = vec![
        (
            "noread rejects !κ",
            read(kappa.clone()),
            member_noread_sampled(&read(kappa.clone()), &w, fuel, params),
            false,
        ),
        (
            "noread accepts let x = !κ in 0",
            let_("x", read(kappa.clone()), num(0)),
            member_noread_sampled(&let_("x", read(kappa.clone()), num(0)), &w, fuel, params),
            true,
        ),
        (
            "nowrite rejects κ := succ !κ",
            bump.clone(),
            member_nowrite_sampled(&bump, &w, fuel, params),
            false,
        ),
        (
            "nowrite accepts read-then-restore",
            restore.clone(),
            member_nowrite_sampled(&restore, &w, fuel, params),
            true,
        ),
        ("pure accepts 0", num(0), member_pure(&num(0), &w, fuel), true),
        (
            "pure rejects seq !κ 0",
            seq(read(kappa.clone()), num(0)),
            member_pure(&seq(read(kappa), num(0)), &w, fuel),
            false,
        ),
    ];
    for (label, term, actual, expected) in checks {
        if actual != expected {
            let cs = fixed_case(&term, &term, &w);
            failures.push(failure(
                0,
                &cs,
                expected.to_string(),
                actual.to_string(),
                label,
            ));
        }
    }
    SuiteReport {
        suite: "membership".to_string(),
        cases_run: 6,
        failures,
        wall_ms: started.elapsed().as_millis() as u64,
    }
}

/// Run every suite with one configuration.
pub fn run_all(cfg: &SuiteConfig) -> Vec<SuiteReport> {
    vec![
        check_modulus_suite(cfg),
        check_highest_suite(cfg),
        check_continuity_suite(cfg),
        check_extension_suite(cfg),
        check_purity_counterexample(cfg.fuel),
        check_membership_suite(cfg.fuel),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig {
            cases: 25,
            betas: 3,
            samples: 4,
            depth: 2,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn small_suites_pass() {
        let cfg = small();
        for report in run_all(&cfg) {
            assert!(
                report.passed(),
                "suite {} failed: {:?}",
                report.suite,
                report.failures
            );
        }
    }

    #[test]
    fn reports_are_deterministic_modulo_timing() {
        let cfg = SuiteConfig {
            cases: 10,
            ..small()
        };
        let a = check_modulus_suite(&cfg);
        let b = check_modulus_suite(&cfg);
        assert_eq!(
            serde_json::to_string(&a.timing_stripped()).unwrap(),
            serde_json::to_string(&b.timing_stripped()).unwrap()
        );
    }
}
