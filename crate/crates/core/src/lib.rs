//! Trust-aware analysis of forensic evidence.
//!
//! An evidence theory collects what agents claim to have observed at which
//! instants, how some claims are derived from others, and which agents or
//! derivation rules the analyst trusts more. The [`engine`] rewrites such a
//! theory into either a consistent set of temporal facts (a model of what
//! plausibly happened) or a contradiction witness.
//!
//! - [`model`]: formula types, theories, traces, verdicts
//! - [`parser`]: the `.el` surface syntax and its canonical renderer
//! - [`engine`]: the rewriting rules and the fixed-phase solving procedure
//! - [`oracle`]: seeded theory generation and conformance checks

pub mod engine;
pub mod model;
pub mod oracle;
pub mod parser;

pub use engine::{
    applicable_instances, extract_model, solve, solve_seeded, verdict, Instance, Model,
    ModelError, Verdict,
};
pub use model::{Formula, RuleName, Status, Theory, TraceEntry};
pub use oracle::{
    check_model_conditions, generate_closing_theory, generate_theory, generate_theory_text,
    minimize_theory, run_randomized, verify_config, Condition, ConditionReport,
    ConditionViolation, FuzzFailure, GenConfig,
};
pub use parser::{parse_theory, parse_theory_named, render_theory, ParseError, ParseErrorKind};
