//! Map-definition files.
//!
//! A definition is a TOML document:
//!
//! ```toml
//! name = "circle_doubling"
//! description = "optional free text"
//! intervals = [["0", "1"]]
//! critical = ["0", "1/2", "1"]
//! gluing = [["0", "1"]]          # optional; classes of identified endpoints
//!
//! [[branch]]                     # one per lap, left to right
//! left = "0"
//! right = "1/2"
//! slope = "2"
//! intercept = "0"
//!
//! [expected]                     # optional regression values
//! h_top = 0.6931471805599453
//! h_hom = 0.6931471805599453
//! h_per_neg = 0.0
//! fix_neg = [0, 0, 0]            # #Fix⁻(f^n) on the graph, n = 1, 2, ...
//! periodic_points = ["0"]
//! kneading_d = ["1", "-2"]       # exact polynomial D(z), ascending
//! kneading_l = ["1", "-2"]
//! infinite_fixed_set = true
//! ```
//!
//! Every number that enters the map is an exact rational string.

use std::fmt;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use super::HarnessError;
use crate::graph_topology::{validate_induced, Gluing, GraphError, InducedMap};
use crate::pm_domain::{BranchSpec, MapError, MapSpec, PMMap};
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchDef {
    pub left: Rational,
    pub right: Rational,
    pub slope: Rational,
    pub intercept: Rational,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Expected {
    pub h_top: Option<f64>,
    pub h_hom: Option<f64>,
    pub h_per_neg: Option<f64>,
    pub fix_neg: Option<Vec<u64>>,
    pub periodic_points: Option<Vec<Rational>>,
    pub kneading_d: Option<Vec<Rational>>,
    pub kneading_l: Option<Vec<Rational>>,
    pub infinite_fixed_set: Option<bool>,
}

impl Expected {
    pub fn is_empty(&self) -> bool {
        *self == Expected::default()
    }
}

/// Line and column (1-based) of a field in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Where each part of a definition came from. Ignored by equality.
#[derive(Debug, Clone, Default)]
pub struct SourceInfo {
    pub origin: String,
    intervals: Vec<Location>,
    critical: Option<Location>,
    gluing: Vec<Location>,
    branches: Vec<Location>,
}

impl PartialEq for SourceInfo {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapDefinition {
    pub name: String,
    pub description: Option<String>,
    pub intervals: Vec<(Rational, Rational)>,
    pub critical: Vec<Rational>,
    pub branches: Vec<BranchDef>,
    pub gluing: Vec<Vec<Rational>>,
    pub expected: Expected,
    pub source: SourceInfo,
}

/// A definition that passed semantic validation.
#[derive(Debug, Clone)]
pub struct BuiltMap {
    pub map: PMMap,
    pub gluing: Gluing,
    pub induced: InducedMap,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    name: String,
    description: Option<String>,
    intervals: Vec<Spanned<[Spanned<String>; 2]>>,
    critical: Spanned<Vec<Spanned<String>>>,
    #[serde(default)]
    gluing: Vec<Spanned<Vec<Spanned<String>>>>,
    #[serde(rename = "branch", default)]
    branches: Vec<Spanned<RawBranch>>,
    expected: Option<RawExpected>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBranch {
    left: Spanned<String>,
    right: Spanned<String>,
    slope: Spanned<String>,
    intercept: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExpected {
    h_top: Option<f64>,
    h_hom: Option<f64>,
    h_per_neg: Option<f64>,
    fix_neg: Option<Vec<u64>>,
    periodic_points: Option<Vec<Spanned<String>>>,
    kneading_d: Option<Vec<Spanned<String>>>,
    kneading_l: Option<Vec<Spanned<String>>>,
    infinite_fixed_set: Option<bool>,
}

#[derive(Serialize)]
struct OutMap<'a> {
    name: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    description: Option<&'a str>,
    intervals: Vec<[String; 2]>,
    critical: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    gluing: Vec<Vec<String>>,
    #[serde(rename = "branch")]
    branches: Vec<OutBranch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected: Option<OutExpected>,
}

#[derive(Serialize)]
struct OutBranch {
    left: String,
    right: String,
    slope: String,
    intercept: String,
}

#[derive(Serialize)]
struct OutExpected {
    #[serde(skip_serializing_if = "Option::is_none")]
    h_top: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_hom: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_per_neg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fix_neg: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    periodic_points: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kneading_d: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kneading_l: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    infinite_fixed_set: Option<bool>,
}

struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    fn new(text: &str) -> Self {
        let mut starts = vec![0];
        starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        Self { starts }
    }

    fn locate(&self, text: &str, offset: usize) -> Location {
        let line = self.starts.partition_point(|&s| s <= offset) - 1;
        let column = text[self.starts[line]..offset.min(text.len())].chars().count() + 1;
        Location { line: line + 1, column }
    }
}

struct Reader<'a> {
    origin: &'a str,
    text: &'a str,
    lines: LineIndex,
}

impl Reader<'_> {
    fn at(&self, span: Range<usize>) -> Location {
        self.lines.locate(self.text, span.start)
    }

    fn rational(&self, s: &Spanned<String>, field: &str) -> Result<Rational, HarnessError> {
        parse_rational(s.get_ref()).map_err(|e| {
            let at = self.at(s.span());
            HarnessError::Parse {
                origin: self.origin.to_string(),
                line: at.line,
                column: at.column,
                message: format!("{field}: {e}"),
            }
        })
    }

    fn rationals(&self, v: &[Spanned<String>], field: &str) -> Result<Vec<Rational>, HarnessError> {
        v.iter().map(|s| self.rational(s, field)).collect()
    }
}

/// Parses a definition from TOML text; `origin` names the source in diagnostics.
pub fn parse_map_str(text: &str, origin: &str) -> Result<MapDefinition, HarnessError> {
    let reader = Reader { origin, text, lines: LineIndex::new(text) };
    let raw: RawMap = toml::from_str(text).map_err(|e| {
        let at = reader.at(e.span().unwrap_or(0..0));
        HarnessError::Parse {
            origin: origin.to_string(),
            line: at.line,
            column: at.column,
            message: e.message().to_string(),
        }
    })?;
    let mut intervals = Vec::new();
    let mut interval_at = Vec::new();
    for iv in &raw.intervals {
        let [a, b] = iv.get_ref();
        intervals.push((reader.rational(a, "intervals")?, reader.rational(b, "intervals")?));
        interval_at.push(reader.at(iv.span()));
    }
    let critical = reader.rationals(raw.critical.get_ref(), "critical")?;
    let mut gluing = Vec::new();
    let mut gluing_at = Vec::new();
    for cls in &raw.gluing {
        gluing.push(reader.rationals(cls.get_ref(), "gluing")?);
        gluing_at.push(reader.at(cls.span()));
    }
    let mut branches = Vec::new();
    let mut branch_at = Vec::new();
    for (i, b) in raw.branches.iter().enumerate() {
        let field = format!("branch[{i}]");
        let r = b.get_ref();
        branches.push(BranchDef {
            left: reader.rational(&r.left, &field)?,
            right: reader.rational(&r.right, &field)?,
            slope: reader.rational(&r.slope, &field)?,
            intercept: reader.rational(&r.intercept, &field)?,
        });
        branch_at.push(reader.at(b.span()));
    }
    let expected = match raw.expected {
        None => Expected::default(),
        Some(e) => Expected {
            h_top: e.h_top,
            h_hom: e.h_hom,
            h_per_neg: e.h_per_neg,
            fix_neg: e.fix_neg,
            periodic_points: e.periodic_points.map(|v| reader.rationals(&v, "expected.periodic_points")).transpose()?,
            kneading_d: e.kneading_d.map(|v| reader.rationals(&v, "expected.kneading_d")).transpose()?,
            kneading_l: e.kneading_l.map(|v| reader.rationals(&v, "expected.kneading_l")).transpose()?,
            infinite_fixed_set: e.infinite_fixed_set,
        },
    };
    Ok(MapDefinition {
        name: raw.name,
        description: raw.description,
        intervals,
        critical,
        branches,
        gluing,
        expected,
        source: SourceInfo {
            origin: origin.to_string(),
            intervals: interval_at,
            critical: Some(reader.at(raw.critical.span())),
            gluing: gluing_at,
            branches: branch_at,
        },
    })
}

pub fn parse_map_file(path: &Path) -> Result<MapDefinition, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_map_str(&text, &path.display().to_string())
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

impl MapDefinition {
    /// The definition as TOML text that parses back to an equal definition.
    pub fn to_toml(&self) -> String {
        let e = &self.expected;
        let out = OutMap {
            name: &self.name,
            description: self.description.as_deref(),
            intervals: self.intervals.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
            critical: strings(&self.critical),
            gluing: self.gluing.iter().map(|c| strings(c)).collect(),
            branches: self
                .branches
                .iter()
                .map(|b| OutBranch {
                    left: b.left.to_string(),
                    right: b.right.to_string(),
                    slope: b.slope.to_string(),
                    intercept: b.intercept.to_string(),
                })
                .collect(),
            expected: (!e.is_empty()).then(|| OutExpected {
                h_top: e.h_top,
                h_hom: e.h_hom,
                h_per_neg: e.h_per_neg,
                fix_neg: e.fix_neg.clone(),
                periodic_points: e.periodic_points.as_deref().map(strings),
                kneading_d: e.kneading_d.as_deref().map(strings),
                kneading_l: e.kneading_l.as_deref().map(strings),
                infinite_fixed_set: e.infinite_fixed_set,
            }),
        };
        toml::to_string(&out).expect("definitions always serialize")
    }

    pub fn spec(&self) -> MapSpec {
        MapSpec {
            intervals: self.intervals.clone(),
            critical: self.critical.clone(),
            branches: self
                .branches
                .iter()
                .map(|b| BranchSpec {
                    slope: b.slope.clone(),
                    intercept: b.intercept.clone(),
                    bounds: Some((b.left.clone(), b.right.clone())),
                })
                .collect(),
        }
    }

    fn map_error_location(&self, e: &MapError) -> (String, Option<Location>) {
        let s = &self.source;
        match e {
            MapError::NonMonotoneBranch { index }
            | MapError::ImageEscapesOmega { index, .. }
            | MapError::BranchEndpointMismatch { index } => {
                (format!("branch[{index}]"), s.branches.get(*index).copied())
            }
            MapError::BranchCountMismatch { .. } => ("branch".into(), s.branches.first().copied().or(s.critical)),
            MapError::DegenerateInterval { index } | MapError::OverlappingIntervals { index } => {
                (format!("intervals[{index}]"), s.intervals.get(*index).copied())
            }
            MapError::EmptyDomain => ("intervals".into(), None),
            _ => ("critical".into(), s.critical),
        }
    }

    fn graph_error_location(&self, e: &GraphError) -> (String, Option<Location>) {
        let point = match e {
            GraphError::UnknownBoundaryPoint(x) | GraphError::DuplicateBoundaryPoint(x) => Some(x),
            GraphError::InconsistentGluing { point, .. } => {
                if let Some(i) = self.critical.iter().position(|c| c == point) {
                    let b = i.saturating_sub(1).min(self.branches.len().saturating_sub(1));
                    return (format!("branch[{b}]"), self.source.branches.get(b).copied());
                }
                None
            }
            _ => None,
        };
        let class = point.and_then(|p| self.gluing.iter().position(|c| c.contains(p)));
        match class {
            Some(i) => (format!("gluing[{i}]"), self.source.gluing.get(i).copied()),
            None => ("gluing".into(), self.source.gluing.first().copied()),
        }
    }

    /// Validates the map and its gluing.
    pub fn build(&self) -> Result<BuiltMap, HarnessError> {
        let semantic = |field: String, at: Option<Location>, message: String| HarnessError::Semantic {
            origin: self.source.origin.clone(),
            field,
            line: at.map(|l| l.line),
            column: at.map(|l| l.column),
            message,
        };
        let map = PMMap::validate(self.spec()).map_err(|e| {
            let (field, at) = self.map_error_location(&e);
            semantic(field, at, e.to_string())
        })?;
        let graph_err = |e: GraphError| {
            let (field, at) = self.graph_error_location(&e);
            semantic(field, at, e.to_string())
        };
        let gluing = Gluing::new(map.domain(), &self.gluing).map_err(graph_err)?;
        let induced = validate_induced(&map, &gluing).map_err(graph_err)?;
        Ok(BuiltMap { map, gluing, induced })
    }

    /// The pm_domain error behind a semantic failure, when there is one.
    pub fn map_error(&self) -> Option<MapError> {
        PMMap::validate(self.spec()).err()
    }
}
