//! Similarity relations, instance generators, sampled effect-membership
//! checks, and the property suites that exercise the continuity results.

pub mod gen;
pub mod member;
pub mod sim;
pub mod suites;

pub use gen::{case_seed, gen_alpha, gen_beta_agreeing, gen_case, gen_f, gen_world, CaseSpec};
pub use member::{
    member_nat_sampled, member_noread_sampled, member_nowrite_sampled, member_pure,
    SamplingParams,
};
pub use sim::{sim_diff, sim_force, updterm};
pub use suites::{
    check_continuity_suite, check_extension_suite, check_highest_suite, check_membership_suite,
    check_modulus_suite, check_purity_counterexample, run_all, CaseFailure, SuiteConfig,
    SuiteReport,
};
