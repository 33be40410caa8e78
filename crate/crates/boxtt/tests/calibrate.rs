//! Generator calibration, run explicitly when tuning sizes or budgets:
//!
//!     cargo test -p boxtt --test calibrate -- --ignored --nocapture

use std::time::Instant;

use boxtt::continuity::compute_modulus;
use boxtt::validation::{case_seed, gen_alpha, gen_case, gen_f, gen_world};
use boxtt::DEFAULT_FUEL;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
#[ignore]
fn candidate_termination_rate() {
    for size in [4, 6, 8] {
        let mut terminated = 0u32;
        let total = 1000u32;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..total {
            let f = gen_f(rng.gen(), size);
            let alpha = gen_alpha(rng.gen(), size);
            let world = gen_world(rng.gen(), 3);
            if compute_modulus(&f, &alpha, &world, DEFAULT_FUEL, false).is_ok() {
                terminated += 1;
            }
        }
        println!(
            "size {size}: {terminated}/{total} candidates terminate within {DEFAULT_FUEL} steps"
        );
    }
}

#[test]
#[ignore]
fn accepted_case_statistics() {
    let size = 6;
    let total = 500u64;
    let started = Instant::now();
    let mut max_steps = 0u64;
    let mut max_modulus = 0u64;
    let mut sum_steps = 0u64;
    for i in 0..total {
        let cs = gen_case(case_seed(42, i), size, DEFAULT_FUEL);
        let rep = compute_modulus(&cs.f, &cs.alpha, &cs.world, cs.fuel, false).unwrap();
        sum_steps += rep.fuel_used;
        max_steps = max_steps.max(rep.fuel_used);
        let m: u64 = rep.modulus.try_into().unwrap();
        max_modulus = max_modulus.max(m);
    }
    println!(
        "{total} accepted cases in {:?}: steps avg {} max {max_steps}, modulus max {max_modulus}",
        started.elapsed(),
        sum_steps / total,
    );
}
