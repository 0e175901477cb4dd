//! Python bindings: parse theories, rewrite them, and inspect the outcome
//! from Python. Build the cdylib and import it as `evlogic_py`; the smoke
//! test under `python/` shows the expected workflow.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use evlogic_core::engine::Verdict;
use evlogic_core::model::Status;
use evlogic_core::oracle::GenConfig;

/// An evidence theory, either freshly parsed or the residue of a run.
#[pyclass(name = "Theory", skip_from_py_object)]
#[derive(Clone)]
struct PyTheory {
    inner: evlogic_core::Theory,
}

#[pymethods]
impl PyTheory {
    /// Canonical source text. Parsing it back yields an equal theory.
    fn render(&self) -> String {
        evlogic_core::render_theory(&self.inner)
    }

    fn agents(&self) -> Vec<String> {
        self.inner.agents().iter().map(|a| a.to_string()).collect()
    }

    fn times(&self) -> Vec<String> {
        self.inner.times().iter().map(|t| t.to_string()).collect()
    }

    /// Every formula currently in the theory, rendered one per entry.
    fn formulas(&self) -> Vec<String> {
        self.inner.formulas().iter().map(|f| f.to_string()).collect()
    }

    fn is_closed(&self) -> bool {
        self.inner.status() == Status::Closed
    }

    fn __repr__(&self) -> String {
        format!(
            "Theory({} agents, {} times, {} formulas{})",
            self.inner.agents().len(),
            self.inner.times().len(),
            self.inner.formulas().len(),
            if self.inner.status() == Status::Closed { ", closed" } else { "" }
        )
    }
}

/// What a finished run produced.
#[pyclass(name = "RunResult")]
struct PyRunResult {
    #[pyo3(get)]
    sat: bool,
    /// All temporal facts of the model, negatives included.
    #[pyo3(get)]
    model: Vec<String>,
    /// Positive facts only.
    #[pyo3(get)]
    plausible: Vec<String>,
    /// Closure rule name when unsat, else None.
    #[pyo3(get)]
    witness: Option<String>,
    #[pyo3(get)]
    trace: Vec<String>,
    #[pyo3(get)]
    stats: BTreeMap<String, u64>,
    solved: evlogic_core::Theory,
}

#[pymethods]
impl PyRunResult {
    /// The rewritten theory itself, for further inspection.
    fn theory(&self) -> PyTheory {
        PyTheory { inner: self.solved.clone() }
    }

    fn __repr__(&self) -> String {
        if self.sat {
            format!("RunResult(sat, {} facts)", self.model.len())
        } else {
            format!(
                "RunResult(unsat, closed by {})",
                self.witness.as_deref().unwrap_or("?")
            )
        }
    }
}

fn result_from(solved: evlogic_core::Theory) -> PyRunResult {
    let verdict = evlogic_core::verdict(&solved);
    let (sat, model, witness) = match verdict {
        Verdict::Open { model } => {
            (true, model.iter().map(|t| t.to_string()).collect::<Vec<_>>(), None)
        }
        Verdict::Closed { witness } => (false, Vec::new(), Some(witness.rule.to_string())),
    };
    let plausible = solved
        .temporal_facts()
        .filter(|t| t.lit.is_positive())
        .map(|t| t.to_string())
        .collect();
    let mut stats: BTreeMap<String, u64> = BTreeMap::new();
    for entry in solved.trace() {
        *stats.entry(entry.rule.to_string()).or_insert(0) += 1;
    }
    PyRunResult {
        sat,
        model,
        plausible,
        witness,
        trace: solved.trace().iter().map(|e| e.to_string()).collect(),
        stats,
        solved,
    }
}

/// Parses `.el` source text. Raises ValueError listing every error found,
/// one `file:line:column: kind: message` per line.
#[pyfunction]
#[pyo3(signature = (text, name = "<input>"))]
fn parse(text: &str, name: &str) -> PyResult<PyTheory> {
    match evlogic_core::parse_theory_named(text, name) {
        Ok(inner) => Ok(PyTheory { inner }),
        Err(errors) => {
            let rendered: Vec<String> = errors.iter().map(|e| e.to_string()).collect();
            Err(PyValueError::new_err(rendered.join("\n")))
        }
    }
}

/// Rewrites a theory to exhaustion or closure with the deterministic
/// schedule.
#[pyfunction]
fn run(theory: &PyTheory) -> PyRunResult {
    result_from(evlogic_core::solve(&theory.inner))
}

/// Like `run`, but the order of tied rule instances is drawn from the seed.
/// Verdict and final facts never depend on it.
#[pyfunction]
fn run_seeded(theory: &PyTheory, seed: u64) -> PyRunResult {
    result_from(evlogic_core::solve_seeded(&theory.inner, seed))
}

/// Independent consistency checks on a finished theory. Returns rendered
/// violations; an empty list means the run satisfies the model conditions.
#[pyfunction]
fn check_conditions(theory: &PyTheory) -> Vec<String> {
    evlogic_core::check_model_conditions(&theory.inner)
        .violations
        .iter()
        .map(|v| v.to_string())
        .collect()
}

/// Generates the seeded random theory used by the conformance suite.
#[pyfunction]
#[pyo3(signature = (seed, bias = 0.5, agents = 4, times = 3, simple_vars = 4, derived_vars = 3, reasonings = 4))]
fn generate(
    seed: u64,
    bias: f64,
    agents: u8,
    times: u8,
    simple_vars: u8,
    derived_vars: u8,
    reasonings: u8,
) -> PyResult<PyTheory> {
    let config = GenConfig {
        agent_count: agents,
        time_count: times,
        simple_var_count: simple_vars,
        derived_var_count: derived_vars,
        reasoning_count: reasonings,
        conflict_bias: bias,
        seed,
    };
    config.validate().map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(PyTheory { inner: evlogic_core::generate_theory(&config) })
}

#[pymodule]
fn evlogic_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTheory>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(run_seeded, m)?)?;
    m.add_function(wrap_pyfunction!(check_conditions, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
