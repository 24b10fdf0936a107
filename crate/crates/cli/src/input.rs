//! Session files: a field declaration plus either an automaton or a system
//! matrix, in JSON or TOML.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use mahler_core::automaton::Dfao;
use mahler_core::exactalg::expr::{parse_field_elem, parse_minpoly, parse_ratfunc, parse_rational};
use mahler_core::exactalg::{FieldElem, Matrix, NumberField};
use mahler_core::fixtures;
use mahler_core::series::{normalize_seed, CoefficientStream};
use mahler_core::MahlerSystem;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub minpoly: String,
    pub root_near: String,
    #[serde(default)]
    pub root_near_im: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionOptions {
    pub max_columns: Option<usize>,
    pub window: Option<usize>,
    pub precision: Option<u32>,
    pub terms: Option<usize>,
}

/// Raw contents of a session file. Exactly one of `matrix` and `delta`
/// must be present.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionSpec {
    pub q: usize,
    #[serde(default)]
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub matrix: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub seed: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub states: Option<Vec<String>>,
    #[serde(default)]
    pub init: Option<String>,
    #[serde(default)]
    pub delta: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default)]
    pub output: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub options: SessionOptions,
}

/// A loaded problem: the system, its solution stream, and the automaton
/// when the input was one.
pub struct Session {
    pub field: Arc<NumberField>,
    pub system: MahlerSystem,
    pub stream: CoefficientStream,
    pub automaton: Option<Dfao>,
    pub options: SessionOptions,
}

impl SessionSpec {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        if is_toml {
            toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        } else {
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        }
    }

    pub fn build_field(&self) -> Result<Arc<NumberField>, CliError> {
        match &self.field {
            None => Ok(NumberField::rationals()),
            Some(spec) => {
                let m = parse_minpoly(&spec.minpoly)?;
                let re = parse_rational(&spec.root_near)?;
                let im = match &spec.root_near_im {
                    Some(s) => parse_rational(s)?,
                    None => BigRational::zero(),
                };
                Ok(NumberField::new(m, (re, im))?)
            }
        }
    }

    pub fn load(self) -> Result<Session, CliError> {
        let field = self.build_field()?;
        let automaton_keys = [self.states.is_some(), self.init.is_some(), self.delta.is_some(), self.output.is_some()];
        match (&self.matrix, automaton_keys.iter().any(|&b| b)) {
            (Some(_), true) => Err(CliError::Input("give either `matrix` or an automaton, not both".into())),
            (None, false) => Err(CliError::Input("no input: expected `matrix` or `delta`".into())),
            (Some(rows), false) => {
                let system = parse_system(self.q, rows, &field)?;
                let seed = self
                    .seed
                    .as_ref()
                    .ok_or_else(|| CliError::Input("a system input needs `seed` coefficients".into()))?;
                let seed = parse_vectors(seed, &field)?;
                let g = CoefficientStream::from_recursion(&system, normalize_seed(&system, &seed))?;
                let stream = g.denormalize(&system);
                Ok(Session { field, system, stream, automaton: None, options: self.options })
            }
            (None, true) => {
                if self.seed.is_some() {
                    return Err(CliError::Input("`seed` applies to system inputs only".into()));
                }
                let dfao = self.parse_automaton(&field)?;
                let (system, stream) = dfao.to_mahler_system()?;
                Ok(Session { field, system, stream, automaton: Some(dfao), options: self.options })
            }
        }
    }

    fn parse_automaton(&self, field: &Arc<NumberField>) -> Result<Dfao, CliError> {
        let missing = |k: &str| CliError::Input(format!("automaton input is missing `{k}`"));
        let states = self.states.as_ref().ok_or_else(|| missing("states"))?;
        let init = self.init.as_ref().ok_or_else(|| missing("init"))?;
        let delta = self.delta.as_ref().ok_or_else(|| missing("delta"))?;
        let output = self.output.as_ref().ok_or_else(|| missing("output"))?;
        let names: Vec<&str> = states.iter().map(String::as_str).collect();
        let d: Vec<(&str, Vec<&str>)> =
            delta.iter().map(|(s, row)| (s.as_str(), row.iter().map(String::as_str).collect())).collect();
        let out = output
            .iter()
            .map(|(s, v)| Ok((s.as_str(), parse_field_elem(v, field)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        if let Some(s) = names.iter().find(|s| !delta.contains_key(**s)) {
            return Err(CliError::Input(format!("state {s} has no transitions")));
        }
        Ok(Dfao::from_named(self.q, field, &names, init, &d, &out)?)
    }
}

fn parse_system(q: usize, rows: &[Vec<String>], field: &Arc<NumberField>) -> Result<MahlerSystem, CliError> {
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(|e| parse_ratfunc(e, field)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let m = Matrix::from_rows(parsed)?;
    Ok(MahlerSystem::new(q, m)?)
}

fn parse_vectors(rows: &[Vec<String>], field: &Arc<NumberField>) -> Result<Vec<Vec<FieldElem>>, CliError> {
    rows.iter()
        .map(|r| r.iter().map(|e| parse_field_elem(e, field).map_err(CliError::from)).collect())
        .collect()
}

/// Built-in examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Demo {
    Thue3,
    FourState,
}

impl Demo {
    pub fn session(self) -> Result<Session, CliError> {
        let field = fixtures::golden_field();
        let (system, stream, automaton) = match self {
            Demo::Thue3 => {
                let (s, f) = fixtures::thue3(&field)?;
                (s, f, fixtures::thue3_automaton(&field))
            }
            Demo::FourState => {
                let (s, f) = fixtures::four_state(&field)?;
                let one = FieldElem::one(&field);
                let zero = FieldElem::zero(&field);
                (s, f, fixtures::four_state_automaton(&field, [one, zero.clone(), zero.clone(), zero]))
            }
        };
        Ok(Session { field, system, stream, automaton: Some(automaton), options: SessionOptions::default() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(json: &str) -> SessionSpec {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn automaton_file() {
        let s = spec(
            r#"{ "q": 3, "states": ["A","B"], "init": "A",
                 "delta": {"A": ["A","A","B"], "B": ["B","B","A"]},
                 "output": {"A": "0", "B": "1"} }"#,
        )
        .load()
        .unwrap();
        assert_eq!(s.system.n(), 2);
        assert_eq!(s.stream.component(0, 6).iter().map(ToString::to_string).collect::<Vec<_>>(), ["0", "0", "1", "0", "0", "1"]);
    }

    #[test]
    fn system_file_with_seed() {
        let s = spec(
            r#"{ "q": 3, "field": {"minpoly": "z^2 - z - 1", "root_near": "-0.618"},
                 "matrix": [["1+z","z^2"],["z^2","1+z"]], "seed": [["0", "1"]] }"#,
        )
        .load()
        .unwrap();
        assert_eq!(s.field.degree(), 2);
        assert_eq!(s.stream.component(0, 6).iter().map(ToString::to_string).collect::<Vec<_>>(), ["0", "0", "1", "0", "0", "1"]);
    }

    #[test]
    fn toml_and_json_agree() {
        let t: SessionSpec = toml::from_str(
            "q = 2\nmatrix = [[\"1 + z\"]]\nseed = [[\"1\"]]\n",
        )
        .unwrap();
        let s = t.load().unwrap();
        assert_eq!(s.system.q(), 2);
    }

    #[test]
    fn ambiguous_or_empty_inputs_are_rejected() {
        let both = spec(r#"{ "q": 2, "matrix": [["1"]], "init": "A" }"#);
        assert!(matches!(both.load(), Err(CliError::Input(_))));
        let none = spec(r#"{ "q": 2 }"#);
        assert!(matches!(none.load(), Err(CliError::Input(_))));
        let unseeded = spec(r#"{ "q": 2, "matrix": [["1+z"]] }"#);
        assert!(matches!(unseeded.load(), Err(CliError::Input(_))));
    }
}
