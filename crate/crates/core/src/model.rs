//! Formula layers, theories, rewrite traces, and the finite universe bound.
//!
//! Three layers of formulas share one `Formula` enum:
//!
//! 1. evidence: what agents claim (`SimpleEvidence`, `DerivedEvidence`) and
//!    who or what the analyst trusts (`AgentTrust`, `ReasoningTrust`);
//! 2. interpretation: bare temporal facts and the implications extracted from
//!    derived evidence (`TemporalFact`, `Implication`);
//! 3. reasoning facts: temporal facts annotated with the derivation rules
//!    that support them (`ReasoningFact`).
//!
//! Equality is structural with two deliberate exceptions: implication
//! premises compare as a set, and a reasoning fact's subscript compares as
//! (head, tail-set). Stored order is still preserved for rendering.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

pub(crate) const KEYWORDS: &[&str] = &["agents", "times", "evidence", "trust", "rtrust"];

/// True when `name` can be written without quotes: starts with a letter or
/// `_`, continues with identifier characters, keeps `,` and `)` inside
/// balanced parentheses, and is not a keyword.
pub fn is_bare_name(name: &str) -> bool {
    if KEYWORDS.contains(&name) {
        return false;
    }
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    let mut depth = 0u32;
    for c in chars {
        match c {
            'a'..='z' | 'A'..='Z' | '0'..='9' | '_' | '/' | '\'' => {}
            '(' => depth += 1,
            ')' | ',' => {
                if depth == 0 {
                    return false;
                }
                if c == ')' {
                    depth -= 1;
                }
            }
            _ => return false,
        }
    }
    depth == 0
}

fn write_name(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if is_bare_name(name) {
        f.write_str(name)
    } else {
        write!(f, "\"{}\"", name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AgentId(String);

impl AgentId {
    pub fn new(name: impl Into<String>) -> Self {
        AgentId(name.into())
    }
    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_name(f, &self.0)
    }
}

/// A declared instant. `index` is the position in the `times` declaration;
/// identity is the name alone, so labels parsed from equivalent sources
/// compare equal regardless of how the index was assigned.
#[derive(Debug, Clone)]
pub struct TimeLabel {
    name: String,
    index: u32,
}

impl TimeLabel {
    pub fn new(name: impl Into<String>, index: u32) -> Self {
        TimeLabel { name: name.into(), index }
    }
    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn index(&self) -> u32 {
        self.index
    }
}

impl PartialEq for TimeLabel {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}
impl Eq for TimeLabel {}
impl PartialOrd for TimeLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for TimeLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name.cmp(&other.name)
    }
}

impl fmt::Display for TimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_name(f, &self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VarKind {
    /// Assertable directly by an agent.
    Simple,
    /// Only ever concluded by a derivation; never asserted as simple evidence.
    Derived,
}

/// A propositional variable. Identity is the name; the kind is carried along
/// so rules can tell simple claims from derived conclusions. A valid theory
/// never uses one name with both kinds.
#[derive(Debug, Clone)]
pub struct PropVar {
    name: String,
    kind: VarKind,
}

impl PropVar {
    pub fn new(name: impl Into<String>, kind: VarKind) -> Self {
        PropVar { name: name.into(), kind }
    }
    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn kind(&self) -> VarKind {
        self.kind
    }
}

impl PartialEq for PropVar {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}
impl Eq for PropVar {}
impl PartialOrd for PropVar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PropVar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name.cmp(&other.name)
    }
}

impl fmt::Display for PropVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_name(f, &self.name)
    }
}

/// A variable or its negation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Literal {
    var: PropVar,
    positive: bool,
}

impl Literal {
    pub fn new(var: PropVar, positive: bool) -> Self {
        Literal { var, positive }
    }
    pub fn positive(var: PropVar) -> Self {
        Literal { var, positive: true }
    }
    pub fn negative(var: PropVar) -> Self {
        Literal { var, positive: false }
    }
    pub fn var(&self) -> &PropVar {
        &self.var
    }
    pub fn is_positive(&self) -> bool {
        self.positive
    }
    pub fn kind(&self) -> VarKind {
        self.var.kind
    }
    /// Involution: `l.negated().negated() == l`.
    pub fn negated(&self) -> Literal {
        Literal { var: self.var.clone(), positive: !self.positive }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("~")?;
        }
        write!(f, "{}", self.var)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ReasoningId(String);

impl ReasoningId {
    pub fn new(name: impl Into<String>) -> Self {
        ReasoningId(name.into())
    }
    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ReasoningId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_name(f, &self.0)
    }
}

/// One premise of a derived claim: who asserted what, when.
pub type Premise = (AgentId, TimeLabel, Literal);

/// `agent @ time : lit`: a direct observation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SimpleEvidence {
    pub agent: AgentId,
    pub time: TimeLabel,
    pub lit: Literal,
}

/// `agent @ time : lit <- reasoning [p1 | ... | pn]`: a conclusion the agent
/// reached from the listed premises via the named derivation rule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DerivedEvidence {
    pub agent: AgentId,
    pub time: TimeLabel,
    pub lit: Literal,
    pub reasoning: ReasoningId,
    pub premises: Vec<Premise>,
}

/// `trust(subject): less < more`: for claims about `subject`, `more`
/// outranks `less`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AgentTrust {
    pub subject: PropVar,
    pub less: AgentId,
    pub more: AgentId,
}

/// `rtrust: less < more`: the derivation rule `more` outranks `less`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ReasoningTrust {
    pub less: ReasoningId,
    pub more: ReasoningId,
}

/// `time : lit`: an interpreted fact with no provenance attached.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TemporalFact {
    pub time: TimeLabel,
    pub lit: Literal,
}

impl fmt::Display for TemporalFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.time, self.lit)
    }
}

/// The rule body extracted from a derived claim. Premise order is preserved
/// as written but ignored by equality.
#[derive(Debug, Clone)]
pub struct Implication {
    pub premises: Vec<(TimeLabel, Literal)>,
    pub reasoning: ReasoningId,
    pub head: (TimeLabel, Literal),
}

impl Implication {
    fn premise_set(&self) -> BTreeSet<&(TimeLabel, Literal)> {
        self.premises.iter().collect()
    }
}

impl PartialEq for Implication {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Implication {}
impl PartialOrd for Implication {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Implication {
    fn cmp(&self, other: &Self) -> Ordering {
        self.reasoning
            .cmp(&other.reasoning)
            .then_with(|| self.head.cmp(&other.head))
            .then_with(|| self.premise_set().cmp(&other.premise_set()))
    }
}

/// A temporal fact together with the derivation rules that produced it: the
/// head rule first, then every rule inherited from premises. The tail
/// compares as a set; the stored order is kept for stable rendering.
#[derive(Debug, Clone)]
pub struct ReasoningFact {
    time: TimeLabel,
    lit: Literal,
    reasonings: Vec<ReasoningId>,
}

impl ReasoningFact {
    /// `ids` must be nonempty; the first entry is the head. Duplicates after
    /// the first occurrence are dropped.
    pub fn new(time: TimeLabel, lit: Literal, ids: Vec<ReasoningId>) -> Self {
        assert!(!ids.is_empty(), "reasoning fact needs at least a head rule");
        let mut reasonings: Vec<ReasoningId> = Vec::with_capacity(ids.len());
        for id in ids {
            if !reasonings.contains(&id) {
                reasonings.push(id);
            }
        }
        ReasoningFact { time, lit, reasonings }
    }

    pub fn time(&self) -> &TimeLabel {
        &self.time
    }
    pub fn lit(&self) -> &Literal {
        &self.lit
    }
    pub fn head(&self) -> &ReasoningId {
        &self.reasonings[0]
    }
    pub fn reasonings(&self) -> &[ReasoningId] {
        &self.reasonings
    }
    pub fn mentions(&self, id: &ReasoningId) -> bool {
        self.reasonings.contains(id)
    }
    fn tail_set(&self) -> BTreeSet<&ReasoningId> {
        self.reasonings[1..].iter().collect()
    }
}

impl PartialEq for ReasoningFact {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ReasoningFact {}
impl PartialOrd for ReasoningFact {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ReasoningFact {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .cmp(&other.time)
            .then_with(|| self.lit.cmp(&other.lit))
            .then_with(|| self.head().cmp(other.head()))
            .then_with(|| self.tail_set().cmp(&other.tail_set()))
    }
}

impl fmt::Display for ReasoningFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}: {})_{{", self.time, self.lit)?;
        for (i, r) in self.reasonings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", r)?;
        }
        f.write_str("}")
    }
}

/// Any formula of any layer. Variant order fixes the canonical sort used for
/// deterministic iteration and rendering.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Formula {
    Simple(SimpleEvidence),
    Derived(DerivedEvidence),
    Trust(AgentTrust),
    RTrust(ReasoningTrust),
    Temporal(TemporalFact),
    Implies(Implication),
    Reasoned(ReasoningFact),
}

impl Formula {
    /// Layer-1 formulas are the ones with surface syntax.
    pub fn is_statement(&self) -> bool {
        matches!(
            self,
            Formula::Simple(_) | Formula::Derived(_) | Formula::Trust(_) | Formula::RTrust(_)
        )
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Simple(s) => write!(f, "evidence {} @ {} : {}", s.agent, s.time, s.lit),
            Formula::Derived(d) => {
                write!(f, "evidence {} @ {} : {} <- {} [", d.agent, d.time, d.lit, d.reasoning)?;
                for (i, (a, t, l)) in d.premises.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{} @ {} : {}", a, t, l)?;
                }
                f.write_str("]")
            }
            Formula::Trust(t) => write!(f, "trust({}): {} < {}", t.subject, t.less, t.more),
            Formula::RTrust(t) => write!(f, "rtrust: {} < {}", t.less, t.more),
            Formula::Temporal(t) => write!(f, "{}", t),
            Formula::Implies(i) => {
                for (n, (t, l)) in i.premises.iter().enumerate() {
                    if n > 0 {
                        f.write_str(" & ")?;
                    }
                    write!(f, "{}: {}", t, l)?;
                }
                write!(f, " ->({}) {}: {}", i.reasoning, i.head.0, i.head.1)
            }
            Formula::Reasoned(r) => write!(f, "{}", r),
        }
    }
}

/// Names of the rewrite rules, as they appear in traces and reports.
/// Suffix `p` marks the primed variant, `pp` the double-primed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RuleName {
    T1,
    T1p,
    T2,
    Arrow,
    ArrowP,
    TransAgent,
    TransReasoning,
    D1,
    D1p,
    D1pp,
    D2,
    D2p,
    D2pp,
    XC,
    XpC,
    XT,
    XpT,
    XP,
}

impl RuleName {
    pub fn as_str(&self) -> &'static str {
        match self {
            RuleName::T1 => "T1",
            RuleName::T1p => "T1p",
            RuleName::T2 => "T2",
            RuleName::Arrow => "Arrow",
            RuleName::ArrowP => "ArrowP",
            RuleName::TransAgent => "TransAgent",
            RuleName::TransReasoning => "TransReasoning",
            RuleName::D1 => "D1",
            RuleName::D1p => "D1p",
            RuleName::D1pp => "D1pp",
            RuleName::D2 => "D2",
            RuleName::D2p => "D2p",
            RuleName::D2pp => "D2pp",
            RuleName::XC => "XC",
            RuleName::XpC => "XpC",
            RuleName::XT => "XT",
            RuleName::XpT => "XpT",
            RuleName::XP => "XP",
        }
    }

    /// The five rules that close a theory outright.
    pub fn is_closure(&self) -> bool {
        matches!(
            self,
            RuleName::XC | RuleName::XpC | RuleName::XT | RuleName::XpT | RuleName::XP
        )
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One rewrite step. Insertion entries list what was genuinely new; removal
/// entries list what was actually taken out. A closure entry removes every
/// formula in the theory at once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub step: u64,
    pub rule: RuleName,
    pub consumed: Vec<Formula>,
    pub inserted: Vec<Formula>,
    pub removed: Vec<Formula>,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}:", self.step, self.rule)?;
        for (i, c) in self.consumed.iter().enumerate() {
            write!(f, "{} {}", if i > 0 { ";" } else { "" }, c)?;
        }
        f.write_str(" =>")?;
        for i in &self.inserted {
            write!(f, " +{}", i)?;
        }
        for r in &self.removed {
            write!(f, " -{}", r)?;
        }
        Ok(())
    }
}

/// Whether the theory still admits a model or has been closed by a
/// contradiction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Open,
    Closed,
}

/// A finite evidence theory: declared alphabets plus a set of formulas.
/// Formulas behave as a set; re-inserting an existing one is a no-op.
#[derive(Debug, Clone)]
pub struct Theory {
    agents: BTreeSet<AgentId>,
    times: Vec<TimeLabel>,
    vars: BTreeSet<PropVar>,
    reasonings: BTreeSet<ReasoningId>,
    formulas: BTreeSet<Formula>,
    status: Status,
    trace: Vec<TraceEntry>,
    /// Formulas eliminated by a discordance rule stay out: a defeated claim
    /// is never re-derived.
    removed: BTreeSet<Formula>,
    exhausted: bool,
}

impl Theory {
    pub fn new(
        agents: impl IntoIterator<Item = AgentId>,
        times: Vec<TimeLabel>,
        vars: impl IntoIterator<Item = PropVar>,
        reasonings: impl IntoIterator<Item = ReasoningId>,
        formulas: impl IntoIterator<Item = Formula>,
    ) -> Self {
        Theory {
            agents: agents.into_iter().collect(),
            times,
            vars: vars.into_iter().collect(),
            reasonings: reasonings.into_iter().collect(),
            formulas: formulas.into_iter().collect(),
            status: Status::Open,
            trace: Vec::new(),
            removed: BTreeSet::new(),
            exhausted: false,
        }
    }

    pub fn agents(&self) -> &BTreeSet<AgentId> {
        &self.agents
    }
    pub fn times(&self) -> &[TimeLabel] {
        &self.times
    }
    pub fn time(&self, name: &str) -> Option<&TimeLabel> {
        self.times.iter().find(|t| t.name() == name)
    }
    pub fn vars(&self) -> &BTreeSet<PropVar> {
        &self.vars
    }
    pub fn reasonings(&self) -> &BTreeSet<ReasoningId> {
        &self.reasonings
    }
    pub fn formulas(&self) -> &BTreeSet<Formula> {
        &self.formulas
    }
    pub fn status(&self) -> Status {
        self.status
    }
    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }
    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.formulas.contains(f)
    }
    pub fn is_tombstoned(&self, f: &Formula) -> bool {
        self.removed.contains(f)
    }

    pub fn simple_evidence(&self) -> impl Iterator<Item = &SimpleEvidence> {
        self.formulas.iter().filter_map(|f| match f {
            Formula::Simple(s) => Some(s),
            _ => None,
        })
    }
    pub fn derived_evidence(&self) -> impl Iterator<Item = &DerivedEvidence> {
        self.formulas.iter().filter_map(|f| match f {
            Formula::Derived(d) => Some(d),
            _ => None,
        })
    }
    pub fn agent_trust(&self) -> impl Iterator<Item = &AgentTrust> {
        self.formulas.iter().filter_map(|f| match f {
            Formula::Trust(t) => Some(t),
            _ => None,
        })
    }
    pub fn reasoning_trust(&self) -> impl Iterator<Item = &ReasoningTrust> {
        self.formulas.iter().filter_map(|f| match f {
            Formula::RTrust(t) => Some(t),
            _ => None,
        })
    }
    pub fn temporal_facts(&self) -> impl Iterator<Item = &TemporalFact> {
        self.formulas.iter().filter_map(|f| match f {
            Formula::Temporal(t) => Some(t),
            _ => None,
        })
    }
    pub fn implications(&self) -> impl Iterator<Item = &Implication> {
        self.formulas.iter().filter_map(|f| match f {
            Formula::Implies(i) => Some(i),
            _ => None,
        })
    }
    pub fn reasoning_facts(&self) -> impl Iterator<Item = &ReasoningFact> {
        self.formulas.iter().filter_map(|f| match f {
            Formula::Reasoned(r) => Some(r),
            _ => None,
        })
    }

    /// Records one rewrite step. Inserted formulas must be absent and not
    /// tombstoned; removed formulas must be present. Removals are tombstoned.
    pub(crate) fn commit(
        &mut self,
        rule: RuleName,
        consumed: Vec<Formula>,
        inserted: Vec<Formula>,
        removed: Vec<Formula>,
    ) {
        debug_assert!(self.status == Status::Open);
        debug_assert!(
            inserted.iter().all(|f| !self.contains(f) && !self.is_tombstoned(f)),
            "insert of a present or defeated formula"
        );
        debug_assert!(removed.iter().all(|f| self.contains(f)), "removal of an absent formula");
        for f in &removed {
            self.formulas.remove(f);
            self.removed.insert(f.clone());
        }
        for f in &inserted {
            self.formulas.insert(f.clone());
        }
        let step = self.trace.len() as u64 + 1;
        self.trace.push(TraceEntry { step, rule, consumed, inserted, removed });
    }

    /// Closes the theory: the witness entry removes every formula at once.
    pub(crate) fn close(&mut self, rule: RuleName, consumed: Vec<Formula>) -> TraceEntry {
        debug_assert!(rule.is_closure());
        let removed: Vec<Formula> = self.formulas.iter().cloned().collect();
        self.formulas.clear();
        self.status = Status::Closed;
        let step = self.trace.len() as u64 + 1;
        let entry = TraceEntry { step, rule, consumed, inserted: Vec::new(), removed };
        self.trace.push(entry.clone());
        entry
    }

    pub(crate) fn mark_exhausted(&mut self) {
        self.exhausted = true;
    }

    /// Slips a formula past the commit checks, to forge broken states in
    /// tests of the independent checkers.
    #[cfg(test)]
    pub(crate) fn insert_unchecked(&mut self, f: Formula) {
        self.formulas.insert(f);
    }

    /// Upper bound on how many distinct formulas rewriting can ever build
    /// from this theory's alphabets. Rewriting never exceeds it.
    pub fn universe_bound(&self) -> u128 {
        let ag = self.agents.len() as u128;
        let t = self.times.len() as u128;
        let vars = self.vars.len() as u128;
        let simple_vars =
            self.vars.iter().filter(|v| v.kind() == VarKind::Simple).count() as u128;
        let derived_vars = vars - simple_vars;
        let r = self.reasonings.len() as u128;
        let lits = 2u128.saturating_mul(vars);

        let simple_slots = ag.saturating_mul(t).saturating_mul(lits);
        let temporal_slots = t.saturating_mul(lits);
        // A subscript is a head rule plus any subset of the remaining rules.
        let subscript_shapes = if r == 0 {
            0
        } else {
            let tail = (r - 1).min(120) as u32;
            r.saturating_mul(1u128 << tail)
        };
        let reasoning_slots = t
            .saturating_mul(2u128.saturating_mul(derived_vars))
            .saturating_mul(subscript_shapes);
        let trust_slots = ag
            .saturating_mul(ag)
            .saturating_mul(simple_vars)
            .saturating_add(r.saturating_mul(r));
        // Each derived claim is itself a formula and yields at most one
        // implication.
        let derived_slots = (self.derived_evidence().count() as u128).saturating_mul(2);

        simple_slots
            .saturating_add(temporal_slots)
            .saturating_add(reasoning_slots)
            .saturating_add(trust_slots)
            .saturating_add(derived_slots)
    }
}

impl PartialEq for Theory {
    /// Structural equality over everything observable: alphabets (including
    /// variable kinds and time indices), formulas, and status. Traces and
    /// bookkeeping are excluded.
    fn eq(&self, other: &Self) -> bool {
        self.agents == other.agents
            && self.times.len() == other.times.len()
            && self
                .times
                .iter()
                .zip(&other.times)
                .all(|(a, b)| a.name() == b.name() && a.index() == b.index())
            && self.vars.len() == other.vars.len()
            && self
                .vars
                .iter()
                .zip(&other.vars)
                .all(|(a, b)| a.name() == b.name() && a.kind() == b.kind())
            && self.reasonings == other.reasonings
            && self.formulas == other.formulas
            && self.status == other.status
    }
}
impl Eq for Theory {}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn svar(name: &str) -> PropVar {
        PropVar::new(name, VarKind::Simple)
    }
    fn dvar(name: &str) -> PropVar {
        PropVar::new(name, VarKind::Derived)
    }
    fn t(name: &str, i: u32) -> TimeLabel {
        TimeLabel::new(name, i)
    }

    #[test]
    fn negation_flips_sign_and_keeps_var() {
        let l = Literal::positive(svar("SpeedTr23"));
        let n = l.negated();
        assert!(!n.is_positive());
        assert_eq!(n.var().name(), "SpeedTr23");
        assert_eq!(n.negated(), l);

        let neg = Literal::negative(dvar("Cap"));
        assert_eq!(neg.negated(), Literal::positive(dvar("Cap")));
    }

    proptest! {
        #[test]
        fn negation_is_an_involution(name in "[A-Za-z_][A-Za-z0-9_]{0,8}", pos in any::<bool>(), derived in any::<bool>()) {
            let kind = if derived { VarKind::Derived } else { VarKind::Simple };
            let l = Literal::new(PropVar::new(name, kind), pos);
            prop_assert_eq!(l.negated().negated(), l);
        }

        #[test]
        fn formula_order_agrees_with_equality(a in "[a-c]", b in "[a-c]", ta in 0u32..2, tb in 0u32..2) {
            let f1 = Formula::Simple(SimpleEvidence {
                agent: AgentId::new(a),
                time: t(if ta == 0 { "t1" } else { "t2" }, ta),
                lit: Literal::positive(svar("p")),
            });
            let f2 = Formula::Simple(SimpleEvidence {
                agent: AgentId::new(b),
                time: t(if tb == 0 { "t1" } else { "t2" }, tb),
                lit: Literal::positive(svar("p")),
            });
            prop_assert_eq!(f1 == f2, f1.cmp(&f2) == Ordering::Equal);
        }
    }

    #[test]
    fn implication_equality_ignores_premise_order() {
        let p1 = (t("t1", 0), Literal::positive(svar("a")));
        let p2 = (t("t1", 0), Literal::positive(svar("b")));
        let head = (t("t1", 0), Literal::positive(dvar("c")));
        let i1 = Implication {
            premises: vec![p1.clone(), p2.clone()],
            reasoning: ReasoningId::new("r1"),
            head: head.clone(),
        };
        let i2 = Implication { premises: vec![p2, p1], reasoning: ReasoningId::new("r1"), head };
        assert_eq!(i1, i2);
        assert_eq!(i1.cmp(&i2), Ordering::Equal);
    }

    #[test]
    fn reasoning_fact_tail_is_a_set_and_head_is_not() {
        let lit = Literal::positive(dvar("Culprit"));
        let f1 = ReasoningFact::new(
            t("t", 0),
            lit.clone(),
            vec![ReasoningId::new("r2"), ReasoningId::new("r7"), ReasoningId::new("r5")],
        );
        let f2 = ReasoningFact::new(
            t("t", 0),
            lit.clone(),
            vec![ReasoningId::new("r2"), ReasoningId::new("r5"), ReasoningId::new("r7")],
        );
        let f3 = ReasoningFact::new(
            t("t", 0),
            lit,
            vec![ReasoningId::new("r7"), ReasoningId::new("r5"), ReasoningId::new("r2")],
        );
        assert_eq!(f1, f2);
        assert_ne!(f1, f3);
    }

    #[test]
    fn reasoning_fact_drops_duplicate_ids() {
        let f = ReasoningFact::new(
            t("t", 0),
            Literal::positive(dvar("q")),
            vec![ReasoningId::new("r1"), ReasoningId::new("r2"), ReasoningId::new("r1")],
        );
        assert_eq!(f.reasonings().len(), 2);
        assert_eq!(f.head().name(), "r1");
    }

    #[test]
    fn time_labels_compare_by_name() {
        assert_eq!(t("t1", 0), t("t1", 7));
        assert_ne!(t("t1", 0), t("t2", 0));
    }

    #[test]
    fn duplicate_formula_insert_is_a_noop() {
        let se = Formula::Simple(SimpleEvidence {
            agent: AgentId::new("A"),
            time: t("t1", 0),
            lit: Literal::positive(svar("p")),
        });
        let theory = Theory::new(
            [AgentId::new("A")],
            vec![t("t1", 0)],
            [svar("p")],
            [],
            [se.clone(), se],
        );
        assert_eq!(theory.formulas().len(), 1);
        assert!(theory.trace().is_empty());
    }

    // Independent recount of the universe bound for the data-breach theory:
    // enumerate the simple-evidence slots by explicit loops and rebuild each
    // closed-form term from the raw alphabet sizes.
    #[test]
    fn universe_bound_matches_explicit_enumeration() {
        let agents = ["CS", "TF", "FE"].map(AgentId::new);
        let times = vec![t("t1", 0), t("t2", 1)];
        let vars: Vec<PropVar> = vec![
            svar("SpPhish"),
            svar("LinkCl"),
            svar("FFill"),
            svar("DStolen"),
            svar("MetaC"),
            svar("SpeedTr"),
            dvar("Attack"),
            dvar("SucPhish"),
            dvar("PhysA"),
        ];
        let reasonings = ["r1", "r2", "r3", "r4"].map(ReasoningId::new);
        // Four derived claims, as in the data-breach corpus entry.
        let derived: Vec<Formula> = [
            ("CS", "t1", "Attack", "r1", "SpPhish"),
            ("CS", "t1", "SucPhish", "r2", "LinkCl"),
            ("TF", "t2", "Attack", "r3", "MetaC"),
            ("TF", "t2", "PhysA", "r4", "SpeedTr"),
        ]
        .iter()
        .map(|(a, tm, head, r, prem)| {
            Formula::Derived(DerivedEvidence {
                agent: AgentId::new(*a),
                time: t(tm, if *tm == "t1" { 0 } else { 1 }),
                lit: Literal::positive(dvar(head)),
                reasoning: ReasoningId::new(*r),
                premises: vec![(
                    AgentId::new(*a),
                    t(tm, if *tm == "t1" { 0 } else { 1 }),
                    Literal::positive(svar(prem)),
                )],
            })
        })
        .collect();
        let theory = Theory::new(agents.clone(), times.clone(), vars.clone(), reasonings, derived);

        let mut simple_slots = 0u128;
        for _a in &agents {
            for _t in &times {
                for _v in &vars {
                    simple_slots += 2;
                }
            }
        }
        assert_eq!(simple_slots, 108);

        let temporal_slots = 2 * 2 * 9;
        let reasoning_slots = 2 * (2 * 3) * (4 * 8u128);
        let trust_slots = 3 * 3 * 6 + 4 * 4;
        let derived_slots = 4 * 2;
        let expected =
            simple_slots + temporal_slots + reasoning_slots + trust_slots + derived_slots;
        assert_eq!(theory.universe_bound(), expected);
        assert!(theory.universe_bound() >= 108);
    }

    #[test]
    fn universe_bound_is_small_but_positive_for_tiny_theories() {
        let theory = Theory::new(
            [AgentId::new("a")],
            vec![t("t", 0)],
            [svar("p")],
            [],
            [Formula::Simple(SimpleEvidence {
                agent: AgentId::new("a"),
                time: t("t", 0),
                lit: Literal::positive(svar("p")),
            })],
        );
        assert!(theory.universe_bound() >= 2);
    }

    #[test]
    fn bare_names_cover_the_surface_identifier_shape() {
        assert!(is_bare_name("SpeedTr(23MB/s)"));
        assert!(is_bare_name("Culprit(C,Attack)"));
        assert!(is_bare_name("Admit(C,Attack')"));
        assert!(is_bare_name("_x9"));
        assert!(!is_bare_name("evidence"));
        assert!(!is_bare_name("9lives"));
        assert!(!is_bare_name("a,b"));
        assert!(!is_bare_name("oops)"));
        assert!(!is_bare_name("open(paren"));
        assert!(!is_bare_name(""));
        assert!(!is_bare_name("two words"));
    }
}
