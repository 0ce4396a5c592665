//! Instance files.

use std::fmt;
use std::path::Path;

use monosched_core::numerics::{format_rational, parse_rational, Rational};
use monosched_core::verify::generate::Sample;
use serde::{Deserialize, Serialize};

/// Instance file contents; every number is a rational string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub epsilon: String,
    pub t: u32,
    pub jobs: Vec<String>,
    pub speeds: Vec<String>,
}

/// Malformed input, naming the offending field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputError {
    pub field: String,
    pub reason: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid `{}`: {}", self.field, self.reason)
    }
}

impl std::error::Error for InputError {}

fn input_error(field: impl Into<String>, reason: impl Into<String>) -> InputError {
    InputError {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Parsed and range-checked instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed {
    pub epsilon: Rational,
    pub t: u32,
    pub jobs: Vec<Rational>,
    pub speeds: Vec<Rational>,
}

impl Parsed {
    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            epsilon: format_rational(&self.epsilon),
            t: self.t,
            jobs: self.jobs.iter().map(format_rational).collect(),
            speeds: self.speeds.iter().map(format_rational).collect(),
        }
    }
}

impl From<&Sample> for Parsed {
    fn from(s: &Sample) -> Self {
        Parsed {
            epsilon: s.epsilon.clone(),
            t: s.t,
            jobs: s.sizes.clone(),
            speeds: s.speeds.clone(),
        }
    }
}

fn parse_list(field: &str, items: &[String]) -> Result<Vec<Rational>, InputError> {
    items
        .iter()
        .enumerate()
        .map(|(i, s)| parse_rational(s).map_err(|e| input_error(format!("{field}[{i}]"), e.to_string())))
        .collect()
}

impl InstanceFile {
    pub fn parse(&self) -> Result<Parsed, InputError> {
        let epsilon = parse_rational(&self.epsilon).map_err(|e| input_error("epsilon", e.to_string()))?;
        if epsilon <= Rational::from_integer(0.into()) || epsilon > Rational::from_integer(1.into()) {
            return Err(input_error("epsilon", format!("must lie in (0, 1], got {}", format_rational(&epsilon))));
        }
        if self.t == 0 {
            return Err(input_error("t", "must be a positive integer"));
        }
        let jobs = parse_list("jobs", &self.jobs)?;
        for (i, p) in jobs.iter().enumerate() {
            if *p <= Rational::from_integer(0.into()) {
                return Err(input_error(format!("jobs[{i}]"), format!("size must be positive, got {}", format_rational(p))));
            }
        }
        let speeds = parse_list("speeds", &self.speeds)?;
        if speeds.is_empty() {
            return Err(input_error("speeds", "at least one machine is required"));
        }
        for (i, s) in speeds.iter().enumerate() {
            if *s < Rational::from_integer(0.into()) {
                return Err(input_error(format!("speeds[{i}]"), format!("speed must be non-negative, got {}", format_rational(s))));
            }
        }
        Ok(Parsed {
            epsilon,
            t: self.t,
            jobs,
            speeds,
        })
    }
}

/// Parses instance JSON text.
pub fn parse_instance(text: &str) -> Result<Parsed, InputError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| {
        // serde names the missing or unknown field in its message
        input_error("instance", e.to_string())
    })?;
    file.parse()
}

pub fn read_instance(path: &Path) -> Result<Parsed, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error("instance", format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"epsilon": "1", "t": 1, "jobs": ["4","4","4"], "speeds": ["1","3/2","1"]}"#;
        let p = parse_instance(text).unwrap();
        assert_eq!(p.speeds[1], Rational::new(3.into(), 2.into()));
        let back = serde_json::to_string(&p.to_file()).unwrap();
        assert_eq!(parse_instance(&back).unwrap(), p);
    }

    #[test]
    fn errors_name_the_field() {
        let e = parse_instance(r#"{"epsilon": "1", "t": 1, "jobs": ["4","-1"], "speeds": ["1"]}"#).unwrap_err();
        assert_eq!(e.field, "jobs[1]");
        let e = parse_instance(r#"{"epsilon": "0", "t": 1, "jobs": [], "speeds": ["1"]}"#).unwrap_err();
        assert_eq!(e.field, "epsilon");
        let e = parse_instance(r#"{"epsilon": "1", "t": 1, "jobs": ["x"], "speeds": ["1"]}"#).unwrap_err();
        assert_eq!(e.field, "jobs[0]");
        let e = parse_instance(r#"{"epsilon": "1", "t": 0, "jobs": [], "speeds": ["1"]}"#).unwrap_err();
        assert_eq!(e.field, "t");
    }
}
