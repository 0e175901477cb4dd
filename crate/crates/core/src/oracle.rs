//! Seeded theory generation and independent conformance checks.
//!
//! The generator emits small theories in a deliberately tame fragment: each
//! propositional variable carries one canonical instant and sign everywhere
//! it appears, so a freshly generated theory has no discordance at all.
//! Conflicts are then injected explicitly, each kept pairwise and isolated
//! (a dedicated variable, at most one trust edge on it, defeated rules that
//! nothing else builds on). Within this fragment the final formula set is
//! independent of the order instances fire in, which is what lets the suite
//! compare randomized schedules against the deterministic engine verbatim.
//!
//! The checks are deliberately engine-free: they inspect the finished theory
//! directly for the consistency conditions a model must satisfy, rather than
//! trusting anything the rewrite loop believed along the way.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{self, Verdict};
use crate::model::{Formula, RuleName, Status, Theory};
use crate::parser::{parse_theory, render_theory};

/// Hard caps on generated theory sizes. Exhaustive schedule comparison stays
/// cheap when phases see at most a handful of instances.
pub const MAX_AGENTS: u8 = 4;
pub const MAX_TIMES: u8 = 3;
pub const MAX_SIMPLE_VARS: u8 = 4;
pub const MAX_DERIVED_VARS: u8 = 3;
pub const MAX_REASONINGS: u8 = 4;

const AGENT_POOL: [&str; 4] = ["ada", "ben", "cleo", "dov"];
const TIME_POOL: [&str; 3] = ["t1", "t2", "t3"];
const SIMPLE_POOL: [&str; 4] = ["badge", "motion", "ping", "visit"];
const DERIVED_POOL: [&str; 3] = ["entry", "breach", "theft"];
const REASONING_POOL: [&str; 4] = ["r1", "r2", "r3", "r4"];

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub agent_count: u8,
    pub time_count: u8,
    pub simple_var_count: u8,
    pub derived_var_count: u8,
    pub reasoning_count: u8,
    /// 0.0 generates conflict-free theories; 1.0 guarantees at least one
    /// cross-instant discordant pair (given two agents and two instants).
    pub conflict_bias: f64,
    pub seed: u64,
}

impl GenConfig {
    /// A config at the size caps, where every injection has headroom.
    pub fn at_caps(seed: u64, conflict_bias: f64) -> GenConfig {
        GenConfig {
            agent_count: MAX_AGENTS,
            time_count: MAX_TIMES,
            simple_var_count: MAX_SIMPLE_VARS,
            derived_var_count: MAX_DERIVED_VARS,
            reasoning_count: MAX_REASONINGS,
            conflict_bias,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), InvalidConfig> {
        let check = |what: &str, v: u8, cap: u8| {
            if v < 1 || v > cap {
                Err(InvalidConfig(format!("{} must be between 1 and {}, got {}", what, cap, v)))
            } else {
                Ok(())
            }
        };
        check("agent count", self.agent_count, MAX_AGENTS)?;
        check("time count", self.time_count, MAX_TIMES)?;
        check("simple variable count", self.simple_var_count, MAX_SIMPLE_VARS)?;
        check("derived variable count", self.derived_var_count, MAX_DERIVED_VARS)?;
        check("reasoning count", self.reasoning_count, MAX_REASONINGS)?;
        if !(0.0..=1.0).contains(&self.conflict_bias) {
            return Err(InvalidConfig(format!(
                "conflict bias must lie in [0, 1], got {}",
                self.conflict_bias
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct InvalidConfig(String);

struct Lit {
    var: usize,
    derived: bool,
    positive: bool,
}

fn lit_text(l: &Lit) -> String {
    let name = if l.derived { DERIVED_POOL[l.var] } else { SIMPLE_POOL[l.var] };
    if l.positive {
        name.to_string()
    } else {
        format!("~{}", name)
    }
}

struct Canon {
    /// Canonical (time index, sign) per simple and derived variable.
    simple: Vec<(usize, bool)>,
    derived: Vec<(usize, bool)>,
}

/// Generates the `.el` source text for the configured seed. Deterministic:
/// the same config always yields the same text.
pub fn generate_theory_text(config: &GenConfig) -> String {
    config.validate().expect("generation requires a valid config");
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let bias = config.conflict_bias;

    // Decide which conflicts this theory will carry before sizing it, so
    // the sizes can make room. An injection that does not fit under small
    // caps is dropped; at the documented caps everything fits.
    let mut inj_temporal = bias > 0.0 && rng.gen_bool(bias);
    let mut inj_factual = bias > 0.0 && rng.gen_bool(bias);
    let mut inj_ranked = bias > 0.0 && rng.gen_bool(bias);

    let a_min = if inj_temporal || inj_factual { 2.min(config.agent_count) } else { 1 };
    let a_count = rng.gen_range(a_min..=config.agent_count) as usize;
    let t_min = if inj_temporal { 2.min(config.time_count) } else { 1 };
    let t_count = rng.gen_range(t_min..=config.time_count) as usize;
    inj_temporal = inj_temporal && a_count >= 2 && t_count >= 2;
    inj_factual = inj_factual && a_count >= 2;

    // Conflict variables are reserved: no rule premise may mention them,
    // which keeps each discordance a two-party affair. One simple variable
    // must stay free for premises.
    let mut reserved = inj_temporal as usize + inj_factual as usize;
    if reserved + 1 > config.simple_var_count as usize {
        if inj_factual {
            inj_factual = false;
            reserved -= 1;
        }
        if reserved + 1 > config.simple_var_count as usize && inj_temporal {
            inj_temporal = false;
            reserved -= 1;
        }
    }
    let s_count =
        rng.gen_range(((reserved + 1) as u8).max(1)..=config.simple_var_count) as usize;

    inj_ranked =
        inj_ranked && config.derived_var_count >= 2 && config.reasoning_count >= 3;
    let mut r_count = rng.gen_range(1..=config.reasoning_count) as usize;
    let mut d_count =
        rng.gen_range(1..=config.derived_var_count.min(r_count as u8)) as usize;
    if inj_ranked {
        // The ranked conflict takes one dedicated variable and two dedicated
        // rules; every remaining variable still needs a rule of its own.
        d_count = d_count.max(2);
        r_count = r_count.max(d_count + 1).min(config.reasoning_count as usize);
        if r_count < d_count + 1 {
            inj_ranked = false;
            d_count = d_count.min(r_count);
        }
    }

    let canon = Canon {
        simple: (0..s_count)
            .map(|_| (rng.gen_range(0..t_count), rng.gen_bool(0.5)))
            .collect(),
        derived: (0..d_count)
            .map(|_| (rng.gen_range(0..t_count), rng.gen_bool(0.5)))
            .collect(),
    };

    let temporal_var = inj_temporal.then_some(0usize);
    let factual_var = inj_factual.then_some(inj_temporal as usize);
    let free_simple: Vec<usize> = (reserved..s_count).collect();

    let mut stmts: Vec<String> = Vec::new();
    let mut trusts: Vec<String> = Vec::new();
    let mut rankings: Vec<String> = Vec::new();

    let evidence_line = |agent: usize, time: usize, lit: &Lit| {
        format!("evidence {} @ {} : {}.", AGENT_POOL[agent], TIME_POOL[time], lit_text(lit))
    };

    // Base observations, one per simple variable at its canonical instant.
    for v in 0..s_count {
        let (time, positive) = canon.simple[v];
        let lit = Lit { var: v, derived: false, positive };
        if temporal_var == Some(v) {
            // The same claim at two instants by two agents. Optionally one
            // trust edge so the discordance resolves instead of closing.
            let a1 = rng.gen_range(0..a_count);
            let a2 = (a1 + 1 + rng.gen_range(0..a_count - 1)) % a_count;
            let t2 = (time + 1 + rng.gen_range(0..t_count - 1)) % t_count;
            stmts.push(evidence_line(a1, time, &lit));
            stmts.push(evidence_line(a2, t2, &lit));
            if rng.gen_bool(0.5) {
                trusts.push(format!(
                    "trust({}): {} < {}.",
                    SIMPLE_POOL[v], AGENT_POOL[a1], AGENT_POOL[a2]
                ));
            }
        } else if factual_var == Some(v) {
            // The claim and its negation at one instant. Usually resolved
            // by a trust edge, sometimes left to stand as a contradiction.
            let a1 = rng.gen_range(0..a_count);
            let a2 = (a1 + 1 + rng.gen_range(0..a_count - 1)) % a_count;
            stmts.push(evidence_line(a1, time, &lit));
            stmts.push(evidence_line(
                a2,
                time,
                &Lit { var: v, derived: false, positive: !positive },
            ));
            if rng.gen_bool(0.75) {
                trusts.push(format!(
                    "trust({}): {} < {}.",
                    SIMPLE_POOL[v], AGENT_POOL[a2], AGENT_POOL[a1]
                ));
            }
        } else {
            stmts.push(evidence_line(rng.gen_range(0..a_count), time, &lit));
        }
    }

    // Derivation rules. With a ranked conflict, the last variable and the
    // last two rules are set aside for it.
    let regular_vars = d_count - inj_ranked as usize;
    let regular_rules = r_count - 2 * inj_ranked as usize;
    let premises_of = |rng: &mut ChaCha8Rng, head_var: usize, extra_derived: bool| {
        let mut premises: Vec<String> = Vec::new();
        let mut seen: BTreeSet<(bool, usize)> = BTreeSet::new();
        let count = rng.gen_range(1..=2usize);
        for _ in 0..count {
            let derived_ok = head_var > 0 && regular_vars > 0;
            let pick_derived = derived_ok && rng.gen_bool(0.35);
            let (var, derived) = if pick_derived {
                (rng.gen_range(0..head_var.min(regular_vars)), true)
            } else {
                (free_simple[rng.gen_range(0..free_simple.len())], false)
            };
            if !seen.insert((derived, var)) {
                continue;
            }
            let (time, positive) = if derived { canon.derived[var] } else { canon.simple[var] };
            premises.push(format!(
                "{} @ {} : {}",
                AGENT_POOL[rng.gen_range(0..a_count)],
                TIME_POOL[time],
                lit_text(&Lit { var, derived, positive })
            ));
        }
        if extra_derived && regular_vars > 0 {
            let var = rng.gen_range(0..regular_vars);
            let (time, positive) = canon.derived[var];
            if seen.insert((true, var)) {
                premises.push(format!(
                    "{} @ {} : {}",
                    AGENT_POOL[rng.gen_range(0..a_count)],
                    TIME_POOL[time],
                    lit_text(&Lit { var, derived: true, positive })
                ));
            }
        }
        premises
    };

    let derived_line =
        |rng: &mut ChaCha8Rng, rule: usize, var: usize, positive: bool, premises: Vec<String>| {
            let (time, _) = canon.derived[var];
            format!(
                "evidence {} @ {} : {} <- {} [{}].",
                AGENT_POOL[rng.gen_range(0..a_count)],
                TIME_POOL[time],
                lit_text(&Lit { var, derived: true, positive }),
                REASONING_POOL[rule],
                premises.join(" | ")
            )
        };

    for rule in 0..regular_rules {
        let var = if regular_vars > 0 { rule % regular_vars } else { rule % d_count };
        let premises = premises_of(&mut rng, var, false);
        let positive = canon.derived[var].1;
        let line = derived_line(&mut rng, rule, var, positive, premises);
        stmts.push(line);
    }

    if inj_ranked {
        // Two dedicated rules conclude the reserved variable with opposite
        // signs at one instant; usually a ranking defeats one of them.
        let var = d_count - 1;
        let positive = canon.derived[var].1;
        let with_derived = rng.gen_bool(0.5);
        let p1 = premises_of(&mut rng, var, with_derived);
        let line1 = derived_line(&mut rng, r_count - 2, var, positive, p1);
        stmts.push(line1);
        let p2 = premises_of(&mut rng, var, false);
        let line2 = derived_line(&mut rng, r_count - 1, var, !positive, p2);
        stmts.push(line2);
        if rng.gen_bool(0.75) {
            let loser_first = rng.gen_bool(0.5);
            let (loser, winner) =
                if loser_first { (r_count - 2, r_count - 1) } else { (r_count - 1, r_count - 2) };
            rankings.push(format!(
                "rtrust: {} < {}.",
                REASONING_POOL[loser], REASONING_POOL[winner]
            ));
        }
    }

    // Inert trust chains over conflict-free variables: they exercise the
    // transitive closure without ever being consulted by an elimination.
    if a_count >= 2 {
        for &v in &free_simple {
            if rng.gen_bool(0.25) {
                let lo = rng.gen_range(0..a_count - 1);
                let hi = rng.gen_range(lo + 1..a_count);
                trusts.push(format!(
                    "trust({}): {} < {}.",
                    SIMPLE_POOL[v], AGENT_POOL[lo], AGENT_POOL[hi]
                ));
                if rng.gen_bool(0.5) && hi + 1 < a_count {
                    trusts.push(format!(
                        "trust({}): {} < {}.",
                        SIMPLE_POOL[v], AGENT_POOL[hi], AGENT_POOL[a_count - 1]
                    ));
                }
            }
        }
    }
    if regular_rules >= 2 && rng.gen_bool(0.25) {
        let lo = rng.gen_range(0..regular_rules - 1);
        let hi = rng.gen_range(lo + 1..regular_rules);
        rankings.push(format!("rtrust: {} < {}.", REASONING_POOL[lo], REASONING_POOL[hi]));
    }

    let mut out = String::new();
    out.push_str("agents ");
    out.push_str(&AGENT_POOL[..a_count].join(", "));
    out.push_str(";\ntimes ");
    out.push_str(&TIME_POOL[..t_count].join(", "));
    out.push_str(";\n\n");
    for s in stmts.iter().chain(trusts.iter()).chain(rankings.iter()) {
        out.push_str(s);
        out.push('\n');
    }
    out
}

/// Generates a parsed theory for the configured seed.
pub fn generate_theory(config: &GenConfig) -> Theory {
    let text = generate_theory_text(config);
    parse_theory(&text).unwrap_or_else(|errs| {
        panic!(
            "generator emitted an invalid theory (seed {}): {:?}\n{}",
            config.seed, errs, text
        )
    })
}

/// Runs the engine with a randomized intra-phase schedule and reports the
/// verdict together with the final formula set.
pub fn run_randomized(theory: &Theory, seed: u64) -> (Verdict, BTreeSet<Formula>) {
    let solved = engine::solve_seeded(theory, seed);
    (engine::verdict(&solved), solved.formulas().clone())
}

/// A small theory guaranteed to close under the named contradiction rule.
/// Panics if the rule is not a closure rule.
pub fn generate_closing_theory(rule: RuleName, seed: u64) -> Theory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a1 = rng.gen_range(0..AGENT_POOL.len());
    let a2 = (a1 + 1 + rng.gen_range(0..AGENT_POOL.len() - 1)) % AGENT_POOL.len();
    let t1 = rng.gen_range(0..TIME_POOL.len());
    let t2 = (t1 + 1 + rng.gen_range(0..TIME_POOL.len() - 1)) % TIME_POOL.len();
    let sv = SIMPLE_POOL[rng.gen_range(0..SIMPLE_POOL.len())];
    let dv = DERIVED_POOL[rng.gen_range(0..DERIVED_POOL.len())];
    let neg = if rng.gen_bool(0.5) { "~" } else { "" };
    let (agent, other) = (AGENT_POOL[a1], AGENT_POOL[a2]);
    let (first, second) = (TIME_POOL[t1.min(t2)], TIME_POOL[t1.max(t2)]);

    let text = match rule {
        RuleName::XC => format!(
            "agents {agent}; times {first}, {second};\n\
             evidence {agent} @ {first} : {neg}{sv}.\n\
             evidence {agent} @ {second} : {neg}{sv}.\n"
        ),
        RuleName::XpC => format!(
            "agents {agent}; times {first}, {second};\n\
             evidence {agent} @ {first} : {neg}{dv} <- r1 [{agent} @ {first} : {sv}].\n\
             evidence {agent} @ {second} : {neg}{dv} <- r1 [{agent} @ {first} : {sv}].\n"
        ),
        RuleName::XT => format!(
            "agents {agent}, {other}; times {first};\n\
             evidence {agent} @ {first} : {neg}{sv}.\n\
             trust({sv}): {agent} < {other}.\n\
             trust({sv}): {other} < {agent}.\n"
        ),
        RuleName::XpT => format!(
            "agents {agent}; times {first};\n\
             evidence {agent} @ {first} : {neg}{sv}.\n\
             rtrust: r1 < r2.\nrtrust: r2 < r1.\n"
        ),
        RuleName::XP => format!(
            "agents {agent}, {other}; times {first};\n\
             evidence {agent} @ {first} : {sv}.\n\
             evidence {other} @ {first} : ~{sv}.\n"
        ),
        other => panic!("{} is not a closure rule", other),
    };
    parse_theory(&text).expect("targeted closure theories are valid by construction")
}

/// The consistency conditions a finished run must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    /// No agent holds the same literal at two instants.
    UniqueInstantPerAgentLiteral,
    /// No reasoning heads the same conclusion literal at two instants.
    UniqueInstantPerReasoningLiteral,
    /// No agent outranks itself on any subject.
    TrustIrreflexive,
    /// No two agents outrank each other on one subject.
    TrustAntisymmetric,
    /// No reasoning outranks itself.
    RankingIrreflexive,
    /// No two reasonings outrank each other.
    RankingAntisymmetric,
    /// The model never holds a literal and its negation at one instant.
    ModelConsistent,
    /// A closed theory keeps no formulas.
    ClosedTheoryEmpty,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Condition::UniqueInstantPerAgentLiteral => "one instant per agent and literal",
            Condition::UniqueInstantPerReasoningLiteral => {
                "one instant per reasoning and conclusion"
            }
            Condition::TrustIrreflexive => "agent trust is irreflexive",
            Condition::TrustAntisymmetric => "agent trust is antisymmetric",
            Condition::RankingIrreflexive => "reasoning ranking is irreflexive",
            Condition::RankingAntisymmetric => "reasoning ranking is antisymmetric",
            Condition::ModelConsistent => "the model is consistent",
            Condition::ClosedTheoryEmpty => "a closed theory is empty",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone)]
pub struct ConditionViolation {
    pub condition: Condition,
    pub witness: String,
}

impl fmt::Display for ConditionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.condition, self.witness)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ConditionReport {
    pub violations: Vec<ConditionViolation>,
}

impl ConditionReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a finished theory against the model conditions, independently of
/// how the engine got there.
pub fn check_model_conditions(solved: &Theory) -> ConditionReport {
    let mut report = ConditionReport::default();
    let mut violate = |condition: Condition, witness: String| {
        report.violations.push(ConditionViolation { condition, witness });
    };

    if solved.status() == Status::Closed {
        if !solved.formulas().is_empty() {
            violate(
                Condition::ClosedTheoryEmpty,
                format!("{} formulas survive closure", solved.formulas().len()),
            );
        }
        return report;
    }

    let mut per_agent: BTreeMap<(String, String), BTreeSet<String>> = BTreeMap::new();
    for e in solved.simple_evidence() {
        per_agent
            .entry((e.agent.to_string(), e.lit.to_string()))
            .or_default()
            .insert(e.time.to_string());
    }
    for ((agent, lit), times) in &per_agent {
        if times.len() > 1 {
            violate(
                Condition::UniqueInstantPerAgentLiteral,
                format!(
                    "{} holds {} at {}",
                    agent,
                    lit,
                    times.iter().cloned().collect::<Vec<_>>().join(" and ")
                ),
            );
        }
    }

    let mut per_head: BTreeMap<(String, String), BTreeSet<String>> = BTreeMap::new();
    for rf in solved.reasoning_facts() {
        per_head
            .entry((rf.head().to_string(), rf.lit().to_string()))
            .or_default()
            .insert(rf.time().to_string());
    }
    for ((head, lit), times) in &per_head {
        if times.len() > 1 {
            violate(
                Condition::UniqueInstantPerReasoningLiteral,
                format!(
                    "{} concludes {} at {}",
                    head,
                    lit,
                    times.iter().cloned().collect::<Vec<_>>().join(" and ")
                ),
            );
        }
    }

    let trust_edges: Vec<(String, String, String)> = solved
        .agent_trust()
        .map(|t| (t.subject.to_string(), t.less.to_string(), t.more.to_string()))
        .collect();
    for (subject, less, more) in &trust_edges {
        if less == more {
            violate(
                Condition::TrustIrreflexive,
                format!("{} outranks itself about {}", less, subject),
            );
        } else if trust_edges.contains(&(subject.clone(), more.clone(), less.clone()))
            && less < more
        {
            violate(
                Condition::TrustAntisymmetric,
                format!("{} and {} outrank each other about {}", less, more, subject),
            );
        }
    }

    let rank_edges: Vec<(String, String)> = solved
        .reasoning_trust()
        .map(|t| (t.less.to_string(), t.more.to_string()))
        .collect();
    for (less, more) in &rank_edges {
        if less == more {
            violate(Condition::RankingIrreflexive, format!("{} outranks itself", less));
        } else if rank_edges.contains(&(more.clone(), less.clone())) && less < more {
            violate(
                Condition::RankingAntisymmetric,
                format!("{} and {} outrank each other", less, more),
            );
        }
    }

    let model: BTreeSet<(String, String)> = solved
        .temporal_facts()
        .map(|t| (t.time.to_string(), t.lit.to_string()))
        .collect();
    for tf in solved.temporal_facts() {
        if tf.lit.is_positive() {
            let negated = (tf.time.to_string(), tf.lit.negated().to_string());
            if model.contains(&negated) {
                violate(
                    Condition::ModelConsistent,
                    format!("both {} and {}: {} hold", tf, tf.time, tf.lit.negated()),
                );
            }
        }
    }

    report
}

/// A conformance failure, carrying a minimized reproduction.
#[derive(Debug, Clone)]
pub struct FuzzFailure {
    pub seed: u64,
    pub reason: String,
    pub theory: String,
}

impl fmt::Display for FuzzFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "seed {}: {}\n{}", self.seed, self.reason, self.theory)
    }
}

/// Runs the full conformance suite on one generated theory: render
/// round-trip, exhaustion, model conditions, and schedule invariance across
/// `schedule_seeds` randomized runs. On failure the reproduction is
/// minimized before being returned.
pub fn verify_config(config: &GenConfig, schedule_seeds: u32) -> Result<(), Box<FuzzFailure>> {
    let text = generate_theory_text(config);
    let seeds: Vec<u64> =
        (0..schedule_seeds as u64).map(|i| config.seed.wrapping_add(i).wrapping_mul(0x9e37)).collect();
    match check_text(&text, &seeds) {
        Ok(()) => Ok(()),
        Err(reason) => {
            let minimized = minimize_theory(&text, |t| check_text(t, &seeds).is_err());
            Err(Box::new(FuzzFailure { seed: config.seed, reason, theory: minimized }))
        }
    }
}

/// The per-theory conformance checks, shared by the fuzz driver and the
/// minimizer's still-failing predicate.
fn check_text(text: &str, schedule_seeds: &[u64]) -> Result<(), String> {
    let theory =
        parse_theory(text).map_err(|errs| format!("generated text fails to parse: {:?}", errs))?;

    let rendered = render_theory(&theory);
    let reparsed = parse_theory(&rendered)
        .map_err(|errs| format!("rendered text fails to parse: {:?}", errs))?;
    if reparsed != theory {
        return Err("render round-trip changed the theory".to_string());
    }

    let solved = engine::solve(&theory);
    if solved.status() == Status::Open {
        if !solved.is_exhausted() {
            return Err("open run did not reach exhaustion".to_string());
        }
        let leftover = engine::applicable_instances(&solved);
        if !leftover.is_empty() {
            return Err(format!(
                "{} rule instances still apply after exhaustion (first: {})",
                leftover.len(),
                leftover[0].rule
            ));
        }
    }
    let report = check_model_conditions(&solved);
    if !report.is_clean() {
        return Err(format!("model conditions violated: {}", report.violations[0]));
    }

    let base_verdict = engine::verdict(&solved);
    for &seed in schedule_seeds {
        let (verdict, formulas) = run_randomized(&theory, seed);
        if verdict != base_verdict {
            return Err(format!("schedule seed {} changed the verdict", seed));
        }
        if &formulas != solved.formulas() {
            return Err(format!("schedule seed {} changed the final formula set", seed));
        }
    }
    Ok(())
}

/// Greedily shrinks a failing theory: repeatedly drops any single statement
/// whose removal keeps `still_fails` true, until no drop does.
pub fn minimize_theory(text: &str, still_fails: impl Fn(&str) -> bool) -> String {
    let mut current = text.to_string();
    loop {
        let Ok(theory) = parse_theory(&current) else {
            return current;
        };
        let statements: Vec<Formula> =
            theory.formulas().iter().filter(|f| f.is_statement()).cloned().collect();
        let mut improved = false;
        for victim in &statements {
            let reduced = Theory::new(
                theory.agents().iter().cloned(),
                theory.times().to_vec(),
                theory.vars().iter().cloned(),
                theory.reasonings().iter().cloned(),
                statements.iter().filter(|f| *f != victim).cloned(),
            );
            let candidate = render_theory(&reduced);
            if parse_theory(&candidate).is_ok() && still_fails(&candidate) {
                current = candidate;
                improved = true;
                break;
            }
        }
        if !improved {
            return current;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VarKind;
    use std::path::PathBuf;

    fn corpus(name: &str) -> Theory {
        let path: PathBuf =
            [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", name].iter().collect();
        let text = std::fs::read_to_string(&path).unwrap();
        crate::parser::parse_theory_named(&text, name).unwrap()
    }

    #[test]
    fn generation_is_deterministic_in_the_seed() {
        for seed in [0, 1, 7, 99, 4242] {
            let cfg = GenConfig::at_caps(seed, 0.6);
            assert_eq!(generate_theory_text(&cfg), generate_theory_text(&cfg));
            assert_eq!(generate_theory(&cfg), generate_theory(&cfg));
        }
        let a = generate_theory_text(&GenConfig::at_caps(3, 0.6));
        let b = generate_theory_text(&GenConfig::at_caps(4, 0.6));
        assert_ne!(a, b);
    }

    #[test]
    fn zero_bias_theories_carry_no_cross_instant_pairs() {
        for seed in 0..80 {
            let th = generate_theory(&GenConfig::at_caps(seed, 0.0));
            let evidence: Vec<_> = th.simple_evidence().collect();
            for (i, a) in evidence.iter().enumerate() {
                for b in &evidence[i + 1..] {
                    assert!(
                        !(a.lit == b.lit && a.time != b.time),
                        "seed {} has a cross-instant pair: {} / {}",
                        seed,
                        Formula::Simple((*a).clone()),
                        Formula::Simple((*b).clone())
                    );
                }
            }
        }
    }

    #[test]
    fn full_bias_theories_carry_a_discordant_pair() {
        for seed in 0..80 {
            let th = generate_theory(&GenConfig::at_caps(seed, 1.0));
            let evidence: Vec<_> = th.simple_evidence().collect();
            let mut found = false;
            for (i, a) in evidence.iter().enumerate() {
                for b in &evidence[i + 1..] {
                    if a.lit == b.lit && a.time != b.time && a.agent != b.agent {
                        found = true;
                    }
                }
            }
            assert!(found, "seed {} lacks a discordant pair", seed);
        }
    }

    #[test]
    fn generated_theories_use_every_reasoning_and_both_kinds() {
        // Spot-check structural richness: reasonings referenced by rules
        // exist, and derived variables all have a concluding rule.
        for seed in [2, 11, 37, 61, 90] {
            let th = generate_theory(&GenConfig::at_caps(seed, 0.8));
            let heads: BTreeSet<String> =
                th.derived_evidence().map(|d| d.lit.var().name().to_string()).collect();
            for v in th.vars() {
                if v.kind() == VarKind::Derived {
                    assert!(heads.contains(v.name()), "seed {}: {} has no rule", seed, v.name());
                }
            }
            let used: BTreeSet<String> =
                th.derived_evidence().map(|d| d.reasoning.to_string()).collect();
            for r in th.reasonings() {
                let in_ranking = th
                    .reasoning_trust()
                    .any(|t| t.less.to_string() == r.to_string() || t.more.to_string() == r.to_string());
                assert!(
                    used.contains(&r.to_string()) || in_ranking,
                    "seed {}: reasoning {} is never used",
                    seed,
                    r
                );
            }
        }
    }

    #[test]
    fn targeted_theories_close_under_each_contradiction_rule() {
        for rule in [RuleName::XC, RuleName::XpC, RuleName::XT, RuleName::XpT, RuleName::XP] {
            for seed in 0..12 {
                let th = generate_closing_theory(rule, seed);
                let out = engine::solve(&th);
                assert_eq!(out.status(), Status::Closed, "{} seed {}", rule, seed);
                assert!(out.formulas().is_empty(), "{} seed {}", rule, seed);
                assert_eq!(
                    out.trace().last().unwrap().rule,
                    rule,
                    "{} seed {} closed under the wrong rule",
                    rule,
                    seed
                );
            }
        }
    }

    #[test]
    fn randomized_schedule_reproduces_the_case_study_model() {
        let th = corpus("dnc.el");
        let base = engine::solve(&th);
        for seed in 0..10 {
            let (verdict, formulas) = run_randomized(&th, seed);
            assert_eq!(verdict, engine::verdict(&base));
            assert_eq!(&formulas, base.formulas());
        }
    }

    #[test]
    fn condition_checker_accepts_the_case_studies() {
        for name in ["dnc.el", "attribution.el"] {
            let solved = engine::solve(&corpus(name));
            let report = check_model_conditions(&solved);
            assert!(report.is_clean(), "{}: {:?}", name, report.violations);
        }
    }

    #[test]
    fn condition_checker_flags_a_contradictory_model() {
        // Bypass the engine: hand-build an open theory whose "model"
        // contains both signs of one literal.
        let th = parse_theory(
            "agents a, b; times t; evidence a @ t : p. evidence b @ t : ~p.",
        )
        .unwrap();
        let mut forged = th.clone();
        for inst in crate::engine::applicable_instances(&forged) {
            if inst.rule == RuleName::T1 {
                forged.commit(inst.rule, inst.consumed, inst.inserts, inst.removes);
            }
        }
        forged.mark_exhausted();
        let report = check_model_conditions(&forged);
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == Condition::ModelConsistent));
    }

    #[test]
    fn condition_checker_flags_surviving_formulas_after_closure() {
        let th = parse_theory("agents a; times t; evidence a @ t : p.").unwrap();
        let mut forged = th.clone();
        forged.close(RuleName::XP, Vec::new());
        // Closure empties the set; sneak a formula back in to simulate a
        // buggy engine.
        let formula = th.formulas().iter().next().unwrap().clone();
        forged.insert_unchecked(formula);
        let report = check_model_conditions(&forged);
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == Condition::ClosedTheoryEmpty));
    }

    #[test]
    fn condition_checker_flags_repeated_claims_and_trust_loops() {
        let th = parse_theory(
            "agents a, b; times t1, t2;\n\
             evidence a @ t1 : p. evidence a @ t2 : p.\n\
             trust(q): a < b. trust(q): b < a. trust(p): a < a.\n\
             rtrust: r1 < r2. rtrust: r2 < r1. rtrust: r3 < r3.",
        )
        .unwrap();
        let report = check_model_conditions(&th);
        let seen: BTreeSet<_> = report.violations.iter().map(|v| v.condition).collect();
        for expected in [
            Condition::UniqueInstantPerAgentLiteral,
            Condition::TrustIrreflexive,
            Condition::TrustAntisymmetric,
            Condition::RankingIrreflexive,
            Condition::RankingAntisymmetric,
        ] {
            assert!(seen.contains(&expected), "missing {}", expected);
        }
    }

    #[test]
    fn verify_config_passes_on_a_spread_of_seeds() {
        for seed in 0..25 {
            let bias = (seed % 5) as f64 / 4.0;
            let cfg = GenConfig::at_caps(seed, bias);
            if let Err(failure) = verify_config(&cfg, 2) {
                panic!("{}", failure);
            }
        }
    }

    #[test]
    fn minimizer_drops_everything_irrelevant() {
        let text = "agents a, b, c; times t1, t2;\n\
                    evidence a @ t1 : p.\n\
                    evidence b @ t1 : q.\n\
                    evidence c @ t2 : r.\n\
                    trust(q): a < b.\n";
        // Pretend the failure depends only on the presence of evidence
        // about q.
        let minimized = minimize_theory(text, |t| {
            parse_theory(t).map(|th| th.simple_evidence().any(|e| e.lit.var().name() == "q")).unwrap_or(false)
        });
        let th = parse_theory(&minimized).unwrap();
        assert_eq!(th.formulas().len(), 1);
        assert!(th.simple_evidence().any(|e| e.lit.var().name() == "q"));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = GenConfig::at_caps(0, 0.5);
        cfg.agent_count = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = GenConfig::at_caps(0, 0.5);
        cfg.time_count = MAX_TIMES + 1;
        assert!(cfg.validate().is_err());
        let mut cfg = GenConfig::at_caps(0, 0.5);
        cfg.conflict_bias = 1.5;
        assert!(cfg.validate().is_err());
        assert!(GenConfig::at_caps(0, 1.0).validate().is_ok());
    }
}
