//! An executable kernel for a call-by-name lambda calculus with
//! reference-cell effects over Kripke-style worlds, plus a stateful
//! modulus-of-continuity realizer and the property harness that validates
//! its metatheory at desk scale.
//!
//! - [`term`]: the grammar, substitution, effect predicates, derived sugar.
//! - [`world`]: reference-cell worlds and the extension order.
//! - [`eval`]: the deterministic small-step machine, traces, probe mode.
//! - [`continuity`]: `upd`/`mod`/`force` builders, the realizer, and the
//!   modulus computation with its independent oracle.
//! - [`validation`]: similarity relations, generators, membership checks,
//!   and the seeded property suites.
//! - [`sexpr`]: the s-expression concrete syntax and world literals.

pub mod continuity;
pub mod eval;
pub mod sexpr;
pub mod term;
pub mod validation;
pub mod world;

pub use eval::DEFAULT_FUEL;
