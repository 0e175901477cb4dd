//! The rewriting rules and the fixed-phase solving procedure.
//!
//! Rewriting proceeds through thirteen phases. Insertion phases (trust
//! closures, evidence expansion, temporal promotion, rule firing) run their
//! rules to a fixpoint one instance at a time; elimination phases resolve
//! discordances by deleting the less trusted side; check phases close the
//! theory outright on a contradiction. The phase order is fixed; the order
//! of instances *within* a phase is a free choice, taken lexicographically
//! by default or randomly by seed. Verdicts do not depend on that choice.
//!
//! Two bookkeeping rules keep the procedure terminating and exhaustive:
//! eliminated formulas are tombstoned (an insertion re-deriving a defeated
//! formula is a no-op), and rule matchers bind each premise to the layer it
//! lives in (a simple literal to a temporal fact, a derived literal to a
//! reasoning fact), so no rule can fire "again" on its own consequences.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    AgentTrust, Formula, Implication, ReasoningFact, ReasoningTrust, RuleName, SimpleEvidence,
    Status, TemporalFact, Theory, TraceEntry, VarKind,
};

/// One applicable rewrite: what it matched, what it would add or delete.
#[derive(Debug, Clone)]
pub struct Instance {
    pub rule: RuleName,
    pub consumed: Vec<Formula>,
    pub inserts: Vec<Formula>,
    pub removes: Vec<Formula>,
}

impl Instance {
    pub fn closes(&self) -> bool {
        self.rule.is_closure()
    }

    fn sort_text(&self) -> String {
        let mut s = String::new();
        for (i, f) in self.consumed.iter().enumerate() {
            if i > 0 {
                s.push_str("; ");
            }
            s.push_str(&f.to_string());
        }
        s
    }
}

/// The outcome of a finished run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// The theory is consistent; `model` holds every temporal fact found.
    Open { model: BTreeSet<TemporalFact> },
    /// A contradiction was derived; `witness` is the closing trace entry.
    Closed { witness: TraceEntry },
}

/// The temporal facts of an open, exhausted theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub facts: BTreeSet<TemporalFact>,
}

impl Model {
    /// Positive facts only: the plausible course of events.
    pub fn plausible(&self) -> BTreeSet<TemporalFact> {
        self.facts.iter().filter(|f| f.lit.is_positive()).cloned().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("closed theories have no model")]
    Closed,
    #[error("theory has not been rewritten to exhaustion")]
    NotExhausted,
}

/// Rule toggles for fault-injection tests. Production behavior is
/// `default()`; the other settings exist so tests can demonstrate what each
/// piece of the elimination machinery is for.
#[derive(Debug, Clone)]
pub(crate) struct EngineOptions {
    /// Cascade removal of every reasoning fact mentioning a defeated rule.
    pub delta_cascade: bool,
    /// Enable the general (non-singleton) trust elimination phase.
    pub defeat_second_type: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { delta_cascade: true, defeat_second_type: true }
    }
}

enum Picker {
    Deterministic,
    Random(ChaCha8Rng),
}

impl Picker {
    fn pick(&mut self, len: usize) -> usize {
        match self {
            Picker::Deterministic => 0,
            Picker::Random(rng) => rng.gen_range(0..len),
        }
    }
}

enum Phase {
    Loop(&'static [RuleName]),
    Check(&'static [RuleName]),
}

const PHASES: &[Phase] = &[
    Phase::Loop(&[RuleName::TransAgent, RuleName::TransReasoning]),
    Phase::Check(&[RuleName::XT, RuleName::XpT]),
    Phase::Loop(&[RuleName::T2]),
    Phase::Loop(&[RuleName::D1, RuleName::D2]),
    Phase::Check(&[RuleName::XC]),
    Phase::Loop(&[RuleName::T1]),
    Phase::Loop(&[RuleName::Arrow]),
    Phase::Loop(&[RuleName::D1p, RuleName::D2p]),
    Phase::Loop(&[RuleName::ArrowP]),
    Phase::Loop(&[RuleName::D1pp, RuleName::D2pp]),
    Phase::Check(&[RuleName::XpC]),
    Phase::Loop(&[RuleName::T1p]),
    Phase::Check(&[RuleName::XP]),
];

/// Rewrites a freshly parsed theory to a verdict, firing instances in
/// lexicographic order. The returned theory carries the status, the final
/// formula set, and the full trace.
pub fn solve(theory: &Theory) -> Theory {
    solve_with(theory, &mut Picker::Deterministic, &EngineOptions::default())
}

/// Like [`solve`] but instances within each phase fire in an order drawn
/// from the seed. The verdict never depends on the seed.
pub fn solve_seeded(theory: &Theory, seed: u64) -> Theory {
    solve_with(theory, &mut Picker::Random(ChaCha8Rng::seed_from_u64(seed)), &EngineOptions::default())
}

#[cfg(test)]
pub(crate) fn solve_with_options(theory: &Theory, opts: &EngineOptions) -> Theory {
    solve_with(theory, &mut Picker::Deterministic, opts)
}

fn solve_with(theory: &Theory, picker: &mut Picker, opts: &EngineOptions) -> Theory {
    debug_assert!(
        theory.status() == Status::Open && theory.trace().is_empty(),
        "solve expects a freshly parsed or constructed theory"
    );
    let mut th = theory.clone();
    // Termination: every insertion step adds a formula never seen before
    // (at most universe_bound of those exist) and every elimination step
    // grows the tombstone set (same bound), so the budget is unreachable.
    let budget =
        th.universe_bound().saturating_mul(2).saturating_add(2).min(u64::MAX as u128) as u64;

    for phase in PHASES {
        match phase {
            Phase::Loop(rules) => loop {
                let mut instances = Vec::new();
                for rule in *rules {
                    instances.extend(scan(&th, *rule, opts));
                }
                if instances.is_empty() {
                    break;
                }
                instances.sort_by_key(|i| (i.rule, i.sort_text()));
                let chosen = instances.swap_remove(picker.pick(instances.len()));
                th.commit(chosen.rule, chosen.consumed, chosen.inserts, chosen.removes);
                assert!(
                    (th.trace().len() as u64) <= budget,
                    "step budget exceeded: the rewriting procedure failed to terminate"
                );
            },
            Phase::Check(rules) => {
                let mut instances = Vec::new();
                for rule in *rules {
                    instances.extend(scan(&th, *rule, opts));
                }
                // A contradiction witness is reported deterministically even
                // under seeded scheduling; the verdict is the same either way.
                instances.sort_by_key(|i| (i.rule, i.sort_text()));
                if let Some(found) = instances.into_iter().next() {
                    th.close(found.rule, found.consumed);
                    return th;
                }
            }
        }
    }
    th.mark_exhausted();
    th
}

/// The verdict encoded in a finished theory.
pub fn verdict(theory: &Theory) -> Verdict {
    match theory.status() {
        Status::Closed => Verdict::Closed {
            witness: theory
                .trace()
                .last()
                .expect("a closed theory records its closure step")
                .clone(),
        },
        Status::Open => Verdict::Open { model: theory.temporal_facts().cloned().collect() },
    }
}

/// Extracts the model of an open, exhausted theory.
pub fn extract_model(theory: &Theory) -> Result<Model, ModelError> {
    match theory.status() {
        Status::Closed => Err(ModelError::Closed),
        Status::Open if !theory.is_exhausted() => Err(ModelError::NotExhausted),
        Status::Open => Ok(Model { facts: theory.temporal_facts().cloned().collect() }),
    }
}

/// Every rule instance still applicable to a finished theory, across all
/// eighteen rules under their phase preconditions. A correct run leaves
/// none; the conformance suite asserts exactly that.
pub fn applicable_instances(theory: &Theory) -> Vec<Instance> {
    let opts = EngineOptions::default();
    let mut instances = Vec::new();
    for rule in [
        RuleName::T1,
        RuleName::T1p,
        RuleName::T2,
        RuleName::Arrow,
        RuleName::ArrowP,
        RuleName::TransAgent,
        RuleName::TransReasoning,
        RuleName::D1,
        RuleName::D1p,
        RuleName::D1pp,
        RuleName::D2,
        RuleName::D2p,
        RuleName::D2pp,
        RuleName::XC,
        RuleName::XpC,
        RuleName::XT,
        RuleName::XpT,
        RuleName::XP,
    ] {
        instances.extend(scan(theory, rule, &opts));
    }
    instances.sort_by_key(|i| (i.rule, i.sort_text()));
    instances
}

// ------------------------------------------------------------- matchers

fn scan(theory: &Theory, rule: RuleName, opts: &EngineOptions) -> Vec<Instance> {
    match rule {
        RuleName::T1 => scan_t1(theory),
        RuleName::T1p => scan_t1p(theory),
        RuleName::T2 => scan_t2(theory),
        RuleName::Arrow => scan_arrow(theory),
        RuleName::ArrowP => scan_arrow_prime(theory),
        RuleName::TransAgent => scan_trans_agent(theory),
        RuleName::TransReasoning => scan_trans_reasoning(theory),
        RuleName::D1 => scan_d1(theory),
        RuleName::D1p => scan_d1_reasoning(theory, true),
        RuleName::D1pp => scan_d1_reasoning(theory, false),
        RuleName::D2 => scan_d2(theory),
        RuleName::D2p => scan_d2_reasoning(theory, true, opts),
        RuleName::D2pp => {
            if opts.defeat_second_type {
                scan_d2_reasoning(theory, false, opts)
            } else {
                Vec::new()
            }
        }
        RuleName::XC => scan_xc(theory),
        RuleName::XpC => scan_xpc(theory),
        RuleName::XT => scan_xt(theory),
        RuleName::XpT => scan_xpt(theory),
        RuleName::XP => scan_xp(theory),
    }
}

fn insertable(theory: &Theory, f: &Formula) -> bool {
    !theory.contains(f) && !theory.is_tombstoned(f)
}

/// Keeps only genuinely new formulas; an instance with nothing new is not
/// an instance at all.
fn insert_instance(
    theory: &Theory,
    rule: RuleName,
    consumed: Vec<Formula>,
    candidates: Vec<Formula>,
) -> Option<Instance> {
    let mut inserts = Vec::new();
    for c in candidates {
        if insertable(theory, &c) && !inserts.contains(&c) {
            inserts.push(c);
        }
    }
    if inserts.is_empty() {
        None
    } else {
        Some(Instance { rule, consumed, inserts, removes: Vec::new() })
    }
}

fn scan_trans_agent(theory: &Theory) -> Vec<Instance> {
    let mut out = Vec::new();
    let trusts: Vec<&AgentTrust> = theory.agent_trust().collect();
    for first in &trusts {
        for second in &trusts {
            if first.subject != second.subject || first.more != second.less {
                continue;
            }
            let candidate = Formula::Trust(AgentTrust {
                subject: first.subject.clone(),
                less: first.less.clone(),
                more: second.more.clone(),
            });
            let consumed =
                vec![Formula::Trust((*first).clone()), Formula::Trust((*second).clone())];
            if let Some(i) =
                insert_instance(theory, RuleName::TransAgent, consumed, vec![candidate])
            {
                out.push(i);
            }
        }
    }
    out
}

fn scan_trans_reasoning(theory: &Theory) -> Vec<Instance> {
    let mut out = Vec::new();
    let trusts: Vec<&ReasoningTrust> = theory.reasoning_trust().collect();
    for first in &trusts {
        for second in &trusts {
            if first.more != second.less {
                continue;
            }
            let candidate = Formula::RTrust(ReasoningTrust {
                less: first.less.clone(),
                more: second.more.clone(),
            });
            let consumed =
                vec![Formula::RTrust((*first).clone()), Formula::RTrust((*second).clone())];
            if let Some(i) =
                insert_instance(theory, RuleName::TransReasoning, consumed, vec![candidate])
            {
                out.push(i);
            }
        }
    }
    out
}

fn scan_xt(theory: &Theory) -> Vec<Instance> {
    theory
        .agent_trust()
        .filter(|t| t.less == t.more)
        .map(|t| Instance {
            rule: RuleName::XT,
            consumed: vec![Formula::Trust(t.clone())],
            inserts: Vec::new(),
            removes: Vec::new(),
        })
        .collect()
}

fn scan_xpt(theory: &Theory) -> Vec<Instance> {
    theory
        .reasoning_trust()
        .filter(|t| t.less == t.more)
        .map(|t| Instance {
            rule: RuleName::XpT,
            consumed: vec![Formula::RTrust(t.clone())],
            inserts: Vec::new(),
            removes: Vec::new(),
        })
        .collect()
}

/// Expands each derived claim into its implication plus simple evidence for
/// every simple-literal premise. Derived-literal premises stay untouched:
/// they are someone else's conclusion, not observations.
fn scan_t2(theory: &Theory) -> Vec<Instance> {
    let mut out = Vec::new();
    for d in theory.derived_evidence() {
        let mut candidates = vec![Formula::Implies(Implication {
            premises: d.premises.iter().map(|(_, t, l)| (t.clone(), l.clone())).collect(),
            reasoning: d.reasoning.clone(),
            head: (d.time.clone(), d.lit.clone()),
        })];
        for (agent, time, lit) in &d.premises {
            if lit.kind() == VarKind::Simple {
                candidates.push(Formula::Simple(SimpleEvidence {
                    agent: agent.clone(),
                    time: time.clone(),
                    lit: lit.clone(),
                }));
            }
        }
        let consumed = vec![Formula::Derived(d.clone())];
        if let Some(i) = insert_instance(theory, RuleName::T2, consumed, candidates) {
            out.push(i);
        }
    }
    out
}

/// Temporal discordance between agents: the same literal claimed at two
/// instants becomes a same-instant conflict by inserting the crosswise
/// negations. A single agent doing this is a contradiction and is left for
/// the self-contradiction check instead.
fn scan_d1(theory: &Theory) -> Vec<Instance> {
    let mut out = Vec::new();
    let evidence: Vec<&SimpleEvidence> = theory.simple_evidence().collect();
    for (i, first) in evidence.iter().enumerate() {
        for second in &evidence[i + 1..] {
            if first.lit != second.lit
                || first.time == second.time
                || first.agent == second.agent
            {
                continue;
            }
            let candidates = vec![
                Formula::Simple(SimpleEvidence {
                    agent: first.agent.clone(),
                    time: second.time.clone(),
                    lit: first.lit.negated(),
                }),
                Formula::Simple(SimpleEvidence {
                    agent: second.agent.clone(),
                    time: first.time.clone(),
                    lit: second.lit.negated(),
                }),
            ];
            let consumed =
                vec![Formula::Simple((*first).clone()), Formula::Simple((*second).clone())];
            if let Some(inst) = insert_instance(theory, RuleName::D1, consumed, candidates) {
                out.push(inst);
            }
        }
    }
    out
}

/// Factual discordance between agents resolved by trust: the less trusted
/// agent's claim about the trust subject is deleted.
fn scan_d2(theory: &Theory) -> Vec<Instance> {
    let mut out = Vec::new();
    let evidence: Vec<&SimpleEvidence> = theory.simple_evidence().collect();
    for trust in theory.agent_trust() {
        for more in &evidence {
            if more.agent != trust.more || more.lit.var() != &trust.subject {
                continue;
            }
            for less in &evidence {
                if less.agent != trust.less
                    || less.time != more.time
                    || less.lit != more.lit.negated()
                {
                    continue;
                }
                out.push(Instance {
                    rule: RuleName::D2,
                    consumed: vec![
                        Formula::Trust(trust.clone()),
                        Formula::Simple((*more).clone()),
                        Formula::Simple((*less).clone()),
                    ],
                    inserts: Vec::new(),
                    removes: vec![Formula::Simple((*less).clone())],
                });
            }
        }
    }
    out
}

fn scan_xc(theory: &Theory) -> Vec<Instance> {
    let mut out = Vec::new();
    let evidence: Vec<&SimpleEvidence> = theory.simple_evidence().collect();
    for (i, first) in evidence.iter().enumerate() {
        for second in &evidence[i + 1..] {
            if first.agent == second.agent
                && first.lit == second.lit
                && first.time != second.time
            {
                out.push(Instance {
                    rule: RuleName::XC,
                    consumed: vec![
                        Formula::Simple((*first).clone()),
                        Formula::Simple((*second).clone()),
                    ],
                    inserts: Vec::new(),
                    removes: Vec::new(),
                });
            }
        }
    }
    out
}

fn scan_t1(theory: &Theory) -> Vec<Instance> {
    let mut out = Vec::new();
    for e in theory.simple_evidence() {
        let candidate =
            Formula::Temporal(TemporalFact { time: e.time.clone(), lit: e.lit.clone() });
        if let Some(i) = insert_instance(
            theory,
            RuleName::T1,
            vec![Formula::Simple(e.clone())],
            vec![candidate],
        ) {
            out.push(i);
        }
    }
    out
}

/// Fires an implication whose premises are all simple literals, each backed
/// by a temporal fact. The conclusion carries the rule alone.
fn scan_arrow(theory: &Theory) -> Vec<Instance> {
    let mut out = Vec::new();
    for imp in theory.implications() {
        if !imp.premises.iter().all(|(_, l)| l.kind() == VarKind::Simple) {
            continue;
        }
        let mut consumed = vec![Formula::Implies(imp.clone())];
        let mut all_present = true;
        for (time, lit) in &imp.premises {
            let fact = Formula::Temporal(TemporalFact { time: time.clone(), lit: lit.clone() });
            if !theory.contains(&fact) {
                all_present = false;
                break;
            }
            if !consumed.contains(&fact) {
                consumed.push(fact);
            }
        }
        if !all_present {
            continue;
        }
        let candidate = Formula::Reasoned(ReasoningFact::new(
            imp.head.0.clone(),
            imp.head.1.clone(),
            vec![imp.reasoning.clone()],
        ));
        if let Some(i) = insert_instance(theory, RuleName::Arrow, consumed, vec![candidate]) {
            out.push(i);
        }
    }
    out
}

/// Fires an implication with at least one derived-literal premise. Simple
/// premises are backed by temporal facts; derived premises by reasoning
/// facts, whose rules are inherited into the conclusion's subscript. One
/// instance per choice of backing reasoning facts.
fn scan_arrow_prime(theory: &Theory) -> Vec<Instance> {
    let mut out = Vec::new();
    for imp in theory.implications() {
        if imp.premises.iter().all(|(_, l)| l.kind() == VarKind::Simple) {
            continue;
        }
        // For each premise, the list of ways to back it.
        let mut viable = true;
        let mut choices: Vec<Vec<Option<&ReasoningFact>>> = Vec::new();
        for (time, lit) in &imp.premises {
            if lit.kind() == VarKind::Simple {
                let fact =
                    Formula::Temporal(TemporalFact { time: time.clone(), lit: lit.clone() });
                if !theory.contains(&fact) {
                    viable = false;
                    break;
                }
                choices.push(vec![None]);
            } else {
                let backing: Vec<Option<&ReasoningFact>> = theory
                    .reasoning_facts()
                    .filter(|rf| rf.time() == time && rf.lit() == lit)
                    .map(Some)
                    .collect();
                if backing.is_empty() {
                    viable = false;
                    break;
                }
                choices.push(backing);
            }
        }
        if !viable {
            continue;
        }

        // Odometer over the per-premise choices.
        let mut index = vec![0usize; choices.len()];
        loop {
            let mut consumed = vec![Formula::Implies(imp.clone())];
            let mut subscript = vec![imp.reasoning.clone()];
            for (slot, (time, lit)) in imp.premises.iter().enumerate() {
                match choices[slot][index[slot]] {
                    None => {
                        let fact = Formula::Temporal(TemporalFact {
                            time: time.clone(),
                            lit: lit.clone(),
                        });
                        if !consumed.contains(&fact) {
                            consumed.push(fact);
                        }
                    }
                    Some(rf) => {
                        let fact = Formula::Reasoned(rf.clone());
                        if !consumed.contains(&fact) {
                            consumed.push(fact);
                        }
                        subscript.extend(rf.reasonings().iter().cloned());
                    }
                }
            }
            let candidate = Formula::Reasoned(ReasoningFact::new(
                imp.head.0.clone(),
                imp.head.1.clone(),
                subscript,
            ));
            if let Some(i) =
                insert_instance(theory, RuleName::ArrowP, consumed, vec![candidate])
            {
                out.push(i);
            }

            let mut slot = choices.len();
            loop {
                if slot == 0 {
                    break;
                }
                slot -= 1;
                index[slot] += 1;
                if index[slot] < choices[slot].len() {
                    break;
                }
                index[slot] = 0;
            }
            if index.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    out
}

/// Temporal discordance between conclusions, mirroring the simple-evidence
/// rule: crosswise negations with subscripts preserved. Conclusions of the
/// same head rule are left for the self-contradiction check.
fn scan_d1_reasoning(theory: &Theory, singleton_only: bool) -> Vec<Instance> {
    let rule = if singleton_only { RuleName::D1p } else { RuleName::D1pp };
    let mut out = Vec::new();
    let facts: Vec<&ReasoningFact> = theory.reasoning_facts().collect();
    for (i, first) in facts.iter().enumerate() {
        for second in &facts[i + 1..] {
            if first.lit() != second.lit()
                || first.time() == second.time()
                || first.head() == second.head()
            {
                continue;
            }
            if singleton_only
                && (first.reasonings().len() != 1 || second.reasonings().len() != 1)
            {
                continue;
            }
            let candidates = vec![
                Formula::Reasoned(ReasoningFact::new(
                    second.time().clone(),
                    first.lit().negated(),
                    first.reasonings().to_vec(),
                )),
                Formula::Reasoned(ReasoningFact::new(
                    first.time().clone(),
                    second.lit().negated(),
                    second.reasonings().to_vec(),
                )),
            ];
            let consumed = vec![
                Formula::Reasoned((*first).clone()),
                Formula::Reasoned((*second).clone()),
            ];
            if let Some(inst) = insert_instance(theory, rule, consumed, candidates) {
                out.push(inst);
            }
        }
    }
    out
}

/// Factual discordance between conclusions resolved by reasoning trust:
/// the conclusion headed by the less trusted rule is deleted, along with
/// (when cascading) every other conclusion that relied on that rule.
fn scan_d2_reasoning(theory: &Theory, singleton_only: bool, opts: &EngineOptions) -> Vec<Instance> {
    let rule = if singleton_only { RuleName::D2p } else { RuleName::D2pp };
    let mut out = Vec::new();
    let facts: Vec<&ReasoningFact> = theory.reasoning_facts().collect();
    for trust in theory.reasoning_trust() {
        for more in &facts {
            if more.head() != &trust.more {
                continue;
            }
            for less in &facts {
                if less.head() != &trust.less
                    || less.time() != more.time()
                    || less.lit() != &more.lit().negated()
                {
                    continue;
                }
                if singleton_only
                    && (more.reasonings().len() != 1 || less.reasonings().len() != 1)
                {
                    continue;
                }
                let removes: Vec<Formula> = if opts.delta_cascade {
                    theory
                        .reasoning_facts()
                        .filter(|rf| rf.mentions(&trust.less))
                        .map(|rf| Formula::Reasoned(rf.clone()))
                        .collect()
                } else {
                    vec![Formula::Reasoned((*less).clone())]
                };
                out.push(Instance {
                    rule,
                    consumed: vec![
                        Formula::RTrust(trust.clone()),
                        Formula::Reasoned((*more).clone()),
                        Formula::Reasoned((*less).clone()),
                    ],
                    inserts: Vec::new(),
                    removes,
                });
            }
        }
    }
    out
}

fn scan_xpc(theory: &Theory) -> Vec<Instance> {
    let mut out = Vec::new();
    let facts: Vec<&ReasoningFact> = theory.reasoning_facts().collect();
    for (i, first) in facts.iter().enumerate() {
        for second in &facts[i + 1..] {
            if first.head() == second.head()
                && first.lit() == second.lit()
                && first.time() != second.time()
            {
                out.push(Instance {
                    rule: RuleName::XpC,
                    consumed: vec![
                        Formula::Reasoned((*first).clone()),
                        Formula::Reasoned((*second).clone()),
                    ],
                    inserts: Vec::new(),
                    removes: Vec::new(),
                });
            }
        }
    }
    out
}

fn scan_t1p(theory: &Theory) -> Vec<Instance> {
    let mut out = Vec::new();
    for rf in theory.reasoning_facts() {
        let candidate = Formula::Temporal(TemporalFact {
            time: rf.time().clone(),
            lit: rf.lit().clone(),
        });
        if let Some(i) = insert_instance(
            theory,
            RuleName::T1p,
            vec![Formula::Reasoned(rf.clone())],
            vec![candidate],
        ) {
            out.push(i);
        }
    }
    out
}

fn scan_xp(theory: &Theory) -> Vec<Instance> {
    let mut out = Vec::new();
    let facts: Vec<&TemporalFact> = theory.temporal_facts().collect();
    for (i, first) in facts.iter().enumerate() {
        for second in &facts[i + 1..] {
            if first.time == second.time && second.lit == first.lit.negated() {
                out.push(Instance {
                    rule: RuleName::XP,
                    consumed: vec![
                        Formula::Temporal((*first).clone()),
                        Formula::Temporal((*second).clone()),
                    ],
                    inserts: Vec::new(),
                    removes: Vec::new(),
                });
            }
        }
    }
    out
}
