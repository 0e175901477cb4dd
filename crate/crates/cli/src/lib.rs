//! Report building and rendering for the `evlogic` binary. Lives in a
//! library so the integration tests can parse emitted JSON back into the
//! same types.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::IsTerminal;

use serde::{Deserialize, Serialize};

use evlogic_core::engine::Verdict;
use evlogic_core::model::{Status, Theory};
use evlogic_core::oracle::{FuzzFailure, GenConfig};

/// One finished run. Serialized field order is the wire format; changing it
/// changes the JSON schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub input: String,
    /// `"sat"` or `"unsat"`. Unsat reports carry an empty model.
    pub verdict: String,
    pub model: ModelSection,
    /// The positive facts again: what the run deems plausible.
    pub plausible: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<String>>,
    /// How often each rule fired, by rule name.
    pub stats: BTreeMap<String, u64>,
    pub duration_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSection {
    pub positive: Vec<String>,
    pub negative: Vec<String>,
}

/// Builds the report for a finished run. `with_trace` controls whether the
/// full step list is attached.
pub fn build_report(
    input: &str,
    solved: &Theory,
    duration_ms: u64,
    with_trace: bool,
) -> RunReport {
    let verdict = evlogic_core::verdict(solved);
    let (positive, negative): (Vec<String>, Vec<String>) = match &verdict {
        Verdict::Closed { .. } => (Vec::new(), Vec::new()),
        Verdict::Open { model } => {
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for t in model {
                if t.lit.is_positive() {
                    pos.push(t.to_string());
                } else {
                    neg.push(t.to_string());
                }
            }
            (pos, neg)
        }
    };

    let mut stats: BTreeMap<String, u64> = BTreeMap::new();
    for entry in solved.trace() {
        *stats.entry(entry.rule.to_string()).or_insert(0) += 1;
    }

    RunReport {
        input: input.to_string(),
        verdict: match verdict {
            Verdict::Open { .. } => "sat".to_string(),
            Verdict::Closed { .. } => "unsat".to_string(),
        },
        plausible: positive.clone(),
        model: ModelSection { positive, negative },
        trace: with_trace.then(|| solved.trace().iter().map(|e| e.to_string()).collect()),
        stats,
        duration_ms,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorMode {
    Auto,
    Always,
    Never,
}

impl ColorMode {
    /// Reads EVLOGIC_COLOR; anything unrecognized falls back to auto.
    pub fn from_env() -> ColorMode {
        match std::env::var("EVLOGIC_COLOR").as_deref() {
            Ok("always") => ColorMode::Always,
            Ok("never") => ColorMode::Never,
            _ => ColorMode::Auto,
        }
    }

    pub fn enabled(self) -> bool {
        match self {
            ColorMode::Always => true,
            ColorMode::Never => false,
            ColorMode::Auto => std::io::stdout().is_terminal(),
        }
    }
}

/// Human-readable rendering. Verdicts and facts match the JSON report
/// verbatim; only layout differs.
pub fn render_text(
    report: &RunReport,
    solved: &Theory,
    color: bool,
    plausible_only: bool,
) -> String {
    let mut out = String::new();
    let verdict = if color {
        let code = if report.verdict == "sat" { "32" } else { "31" };
        format!("\x1b[{}m{}\x1b[0m", code, report.verdict)
    } else {
        report.verdict.clone()
    };
    let steps = solved.trace().len();
    if report.verdict == "sat" {
        let _ = writeln!(
            out,
            "{}: {} in {} steps ({} ms)",
            report.input, verdict, steps, report.duration_ms
        );
        if plausible_only {
            let _ = writeln!(out, "  plausible:");
            for fact in &report.plausible {
                let _ = writeln!(out, "    {}", fact);
            }
        } else {
            let _ = writeln!(out, "  model:");
            for fact in &report.model.positive {
                let _ = writeln!(out, "    + {}", fact);
            }
            for fact in &report.model.negative {
                let _ = writeln!(out, "    - {}", fact);
            }
        }
    } else {
        let witness = solved.trace().last().expect("closed theories close in a step");
        let _ = writeln!(
            out,
            "{}: {} (closed by {} at step {}) ({} ms)",
            report.input, verdict, witness.rule, witness.step, report.duration_ms
        );
    }
    if !report.stats.is_empty() {
        let fired: Vec<String> =
            report.stats.iter().map(|(rule, n)| format!("{} x{}", rule, n)).collect();
        let _ = writeln!(out, "  rules fired: {}", fired.join(", "));
    }
    if let Some(trace) = &report.trace {
        let _ = writeln!(out, "  trace:");
        for line in trace {
            let _ = writeln!(out, "    {}", line);
        }
    }
    out
}

pub struct FuzzOptions {
    pub seeds: u64,
    /// Fixed bias; when absent each seed sweeps 0.0, 0.1, .. 1.0.
    pub bias: Option<f64>,
    pub base_seed: u64,
    pub agent_count: u8,
    pub time_count: u8,
    pub simple_var_count: u8,
    pub derived_var_count: u8,
    pub reasoning_count: u8,
}

pub struct FuzzOutcome {
    pub checked: u64,
    pub open: u64,
    pub closed: u64,
    pub failure: Option<Box<FuzzFailure>>,
}

impl FuzzOptions {
    pub fn config_for(&self, i: u64) -> GenConfig {
        GenConfig {
            agent_count: self.agent_count,
            time_count: self.time_count,
            simple_var_count: self.simple_var_count,
            derived_var_count: self.derived_var_count,
            reasoning_count: self.reasoning_count,
            conflict_bias: self.bias.unwrap_or((i % 11) as f64 / 10.0),
            seed: self.base_seed.wrapping_add(i),
        }
    }
}

/// Runs the conformance suite seed by seed, stopping at the first failure.
/// Output depends only on the options, never on timing.
pub fn run_fuzz(opts: &FuzzOptions) -> FuzzOutcome {
    let mut outcome = FuzzOutcome { checked: 0, open: 0, closed: 0, failure: None };
    for i in 0..opts.seeds {
        let config = opts.config_for(i);
        outcome.checked += 1;
        if let Err(failure) = evlogic_core::verify_config(&config, 3) {
            outcome.failure = Some(failure);
            return outcome;
        }
        let solved = evlogic_core::solve(&evlogic_core::generate_theory(&config));
        match solved.status() {
            Status::Open => outcome.open += 1,
            Status::Closed => outcome.closed += 1,
        }
    }
    outcome
}
