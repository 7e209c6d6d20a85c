//! Batch front end: map-definition files, run configuration, the bundled
//! corpus, and the command pipelines behind the `knead` binary.

mod definition;
mod report;
mod run;

use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub use definition::{
    parse_map_file, parse_map_str, BranchDef, BuiltMap, Expected, Location, MapDefinition, SourceInfo,
};
pub use report::{MapOutcome, RunReport, Status, Table, SCHEMA};
pub use run::{run, run_map, Command};

use crate::pm_domain::DEFAULT_LAP_BUDGET;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{origin}:{line}:{column}: {message}")]
    Parse { origin: String, line: usize, column: usize, message: String },
    #[error("{origin}: {field}{}: {message}", location_suffix(*line, *column))]
    Semantic { origin: String, field: String, line: Option<usize>, column: Option<usize>, message: String },
    #[error("no map file or bundled map named `{0}`")]
    UnknownMap(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

fn location_suffix(line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" (line {l}, column {c})"),
        _ => String::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

impl FromStr for OutputFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "text" => Ok(Self::Text),
            _ => Err(HarnessError::Config(format!("unknown format `{s}` (json, csv or text)"))),
        }
    }
}

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// Truncation degree `N` of every power series.
    pub degree: usize,
    /// Largest iterate enumerated for lap tables and fixed-point counts.
    pub max_iter: usize,
    /// Degree of the exact series identities that need lap counts.
    pub identity_degree: usize,
    /// Laps allowed per iterate.
    pub lap_budget: usize,
    pub root_tolerance: f64,
    pub fit_tolerance: f64,
    pub format: OutputFormat,
    /// Worker threads; does not affect output.
    #[serde(skip)]
    pub jobs: usize,
    pub seed: u64,
    pub selftest_pairs: usize,
    pub selftest_trace_horizon: usize,
    pub selftest_degree: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            degree: 64,
            max_iter: 12,
            identity_degree: 20,
            lap_budget: DEFAULT_LAP_BUDGET,
            root_tolerance: 1e-3,
            fit_tolerance: 5e-2,
            format: OutputFormat::Json,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            seed: DEFAULT_SEED,
            selftest_pairs: 50,
            selftest_trace_horizon: 10,
            selftest_degree: 32,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        let positive = [
            ("degree", self.degree),
            ("max-iter", self.max_iter),
            ("identity-degree", self.identity_degree),
            ("lap-budget", self.lap_budget),
            ("jobs", self.jobs),
            ("selftest-pairs", self.selftest_pairs),
            ("selftest-trace-horizon", self.selftest_trace_horizon),
            ("selftest-degree", self.selftest_degree),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return bad(&format!("{name} must be positive"));
        }
        if self.degree < 8 {
            return bad("degree must be at least 8");
        }
        if self.identity_degree > self.degree {
            return bad("identity-degree cannot exceed degree");
        }
        for (name, t) in [("tolerance", self.root_tolerance), ("fit-tolerance", self.fit_tolerance)] {
            if !(t > 0.0 && t < 1.0) {
                return bad(&format!("{name} must lie in (0, 1)"));
            }
        }
        Ok(())
    }
}

/// The bundled example maps, in a fixed order.
pub mod corpus {
    use super::{parse_map_str, HarnessError, MapDefinition};

    pub const FILES: [(&str, &str); 11] = [
        ("circle_doubling", include_str!("../../maps/circle_doubling.toml")),
        ("tent", include_str!("../../maps/tent.toml")),
        ("golden_markov", include_str!("../../maps/golden_markov.toml")),
        ("wedge", include_str!("../../maps/wedge.toml")),
        ("contraction", include_str!("../../maps/contraction.toml")),
        ("circle_flip", include_str!("../../maps/circle_flip.toml")),
        ("interval_flip", include_str!("../../maps/interval_flip.toml")),
        ("tent_three_halves", include_str!("../../maps/tent_three_halves.toml")),
        ("two_circles_swapped", include_str!("../../maps/two_circles_swapped.toml")),
        ("diagonal_control", include_str!("../../maps/diagonal_control.toml")),
        ("markov_eight", include_str!("../../maps/markov_eight.toml")),
    ];

    pub fn names() -> Vec<&'static str> {
        FILES.iter().map(|(n, _)| *n).collect()
    }

    pub fn get(name: &str) -> Result<MapDefinition, HarnessError> {
        let (n, text) =
            FILES.iter().find(|(n, _)| *n == name).ok_or_else(|| HarnessError::UnknownMap(name.to_string()))?;
        parse_map_str(text, &format!("bundled:{n}"))
    }

    pub fn all() -> Vec<MapDefinition> {
        names().into_iter().map(|n| get(n).expect("bundled maps parse")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_parses_and_builds() {
        for d in corpus::all() {
            assert_eq!(d.source.origin, format!("bundled:{}", d.name));
            d.build().unwrap_or_else(|e| panic!("{}: {e}", d.name));
            assert_eq!(parse_map_str(&d.to_toml(), "dump").unwrap(), d);
        }
        assert!(matches!(corpus::get("nope"), Err(HarnessError::UnknownMap(_))));
    }

    #[test]
    fn config_checks() {
        assert!(RunConfig::default().validate().is_ok());
        let c = RunConfig { root_tolerance: 1.0, ..RunConfig::default() };
        assert!(c.validate().is_err());
        let c = RunConfig { identity_degree: 80, ..RunConfig::default() };
        assert!(c.validate().is_err());
        let c = RunConfig { max_iter: 0, ..RunConfig::default() };
        assert!(c.validate().is_err());
        assert_eq!("csv".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
