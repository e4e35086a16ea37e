//! JSON scenario files.
//!
//! Either an explicit scenario
//!
//! ```json
//! { "dimension": 2, "alphabet": ["0", "1"], "prior": [0.5, 0.5],
//!   "letter_states": [ [[[1,0],[0,0]], [[0,0],[0,0]]], ... ],
//!   "instrument": [ [ kraus, ... ], ... ] }
//! ```
//!
//! with complex entries written as `[re, im]` pairs and matrices row-major,
//! or a builtin `{ "builtin": "example_A", "parameters": { "x": 1.0 } }`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use qinstr::scenarios::{builtin, Scenario};
use qinstr::states::index_labels;
use qinstr::{DensityMatrix, Ensemble, HermitianMatrix, Instrument, Operation, ProbVector, SquareMatrix, C64};

use crate::CliError;

/// Rows of `[re, im]` pairs.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitScenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub dimension: usize,
    pub alphabet: Vec<String>,
    pub prior: Vec<f64>,
    pub letter_states: Vec<MatrixRows>,
    /// Outcome labels; defaults to `0, 1, ...`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<Vec<String>>,
    /// Kraus operators per outcome.
    pub instrument: Vec<Vec<MatrixRows>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuiltinScenario {
    pub builtin: String,
    pub parameters: BuiltinParameters,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuiltinParameters {
    pub x: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioFile {
    Explicit(ExplicitScenario),
    Builtin(BuiltinScenario),
}

fn parse_error(path: impl Into<String>, message: impl std::fmt::Display) -> CliError {
    CliError::Parse { path: path.into(), message: message.to_string() }
}

fn typed<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        parse_error(if path == "." { "<root>".to_string() } else { path }, e.into_inner())
    })
}

pub fn parse_scenario_str(text: &str) -> Result<ScenarioFile, CliError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_error("<root>", e))?;
    if !value.is_object() {
        return Err(parse_error("<root>", "expected a JSON object"));
    }
    if value.get("builtin").is_some() {
        Ok(ScenarioFile::Builtin(typed(value)?))
    } else {
        Ok(ScenarioFile::Explicit(typed(value)?))
    }
}

pub fn read_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    to_scenario(&parse_scenario_str(&text)?)
}

fn matrix(rows: &MatrixRows, d: usize, path: &str) -> Result<SquareMatrix, CliError> {
    if rows.len() != d {
        return Err(parse_error(path, format!("expected {d} rows, found {}", rows.len())));
    }
    let mut data = Vec::with_capacity(d * d);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(parse_error(format!("{path}[{i}]"), format!("expected {d} entries, found {}", row.len())));
        }
        data.extend(row.iter().map(|[re, im]| C64::new(*re, *im)));
    }
    SquareMatrix::new(d, data).map_err(|e| parse_error(path, e))
}

pub fn to_scenario(file: &ScenarioFile) -> Result<Scenario, CliError> {
    match file {
        ScenarioFile::Builtin(b) => {
            let x = b.parameters.x;
            if !x.is_finite() || x < 0.0 {
                return Err(parse_error("parameters.x", format!("must be finite and >= 0, got {x}")));
            }
            builtin(&b.builtin, x).map_err(|e| parse_error("builtin", e))
        }
        ScenarioFile::Explicit(s) => explicit_scenario(s),
    }
}

fn explicit_scenario(s: &ExplicitScenario) -> Result<Scenario, CliError> {
    let d = s.dimension;
    if d == 0 {
        return Err(parse_error("dimension", "must be at least 1"));
    }
    if s.prior.len() != s.alphabet.len() {
        return Err(parse_error(
            "prior",
            format!("{} weights for {} letters", s.prior.len(), s.alphabet.len()),
        ));
    }
    if s.letter_states.len() != s.alphabet.len() {
        return Err(parse_error(
            "letter_states",
            format!("{} states for {} letters", s.letter_states.len(), s.alphabet.len()),
        ));
    }
    let prior = ProbVector::new(s.alphabet.clone(), s.prior.clone()).map_err(|e| parse_error("prior", e))?;
    let states = s
        .letter_states
        .iter()
        .enumerate()
        .map(|(k, rows)| {
            let path = format!("letter_states[{k}]");
            let m = matrix(rows, d, &path)?;
            HermitianMatrix::new(m)
                .and_then(DensityMatrix::new)
                .map_err(|e| parse_error(&path, e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let ensemble = Ensemble::new(prior, states).map_err(|e| parse_error("letter_states", e))?;

    let outcomes = s.outcomes.clone().unwrap_or_else(|| index_labels(s.instrument.len()));
    if outcomes.len() != s.instrument.len() {
        return Err(parse_error(
            "outcomes",
            format!("{} labels for {} outcomes", outcomes.len(), s.instrument.len()),
        ));
    }
    let ops = s
        .instrument
        .iter()
        .enumerate()
        .map(|(w, family)| {
            let kraus = family
                .iter()
                .enumerate()
                .map(|(k, rows)| matrix(rows, d, &format!("instrument[{w}][{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            Operation::new(kraus).map_err(|e| parse_error(format!("instrument[{w}]"), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let instrument = Instrument::new(outcomes, ops).map_err(|e| parse_error("instrument", e))?;
    Scenario::new(s.label.clone().unwrap_or_else(|| "file".into()), ensemble, instrument)
        .map_err(|e| parse_error("<root>", e))
}

fn rows_of(m: &SquareMatrix) -> MatrixRows {
    m.rows().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect()
}

/// Explicit form of any scenario.
pub fn from_scenario(s: &Scenario) -> ExplicitScenario {
    ExplicitScenario {
        label: Some(s.label.clone()),
        dimension: s.dim(),
        alphabet: s.ensemble.labels().to_vec(),
        prior: s.ensemble.prior().weights().to_vec(),
        letter_states: s.ensemble.states().iter().map(|rho| rows_of(rho.matrix())).collect(),
        outcomes: Some(s.instrument.labels().to_vec()),
        instrument: s
            .instrument
            .ops()
            .iter()
            .map(|op| op.kraus().iter().map(rows_of).collect())
            .collect(),
    }
}

pub fn to_json(s: &ExplicitScenario) -> String {
    serde_json::to_string_pretty(s).expect("scenario serializes")
}
