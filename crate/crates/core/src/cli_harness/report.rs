use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use super::{OutputFormat, RunConfig};
use crate::finite_rank::selftest::SelfTestReport;

pub const SCHEMA: &str = "knead-report/1";

/// Outcome of one map, ordered by severity for the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Violation,
    BudgetExceeded,
    InputError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Violation => 1,
            Status::InputError => 2,
            Status::BudgetExceeded => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I: IntoIterator<Item = S>, S: ToString>(&mut self, row: I) {
        self.rows.push(row.into_iter().map(|s| s.to_string()).collect());
    }

    fn text(&self, out: &mut String) {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String], out: &mut String| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "  {}", padded.join("  ").trim_end());
        };
        line(&self.header, out);
        for r in &self.rows {
            line(r, out);
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MapOutcome {
    pub name: String,
    pub origin: String,
    pub status: Status,
    pub diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<Value>,
    #[serde(skip)]
    pub table: Table,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: String,
    pub config: RunConfig,
    pub maps: Vec<MapOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selftest: Option<SelfTestReport>,
    pub status: Status,
    pub exit_code: i32,
}

impl RunReport {
    pub fn new(command: &str, config: &RunConfig, maps: Vec<MapOutcome>, selftest: Option<SelfTestReport>) -> Self {
        let mut status = maps.iter().map(|m| m.status).max().unwrap_or(Status::Ok);
        if selftest.as_ref().is_some_and(|s| !s.passed) {
            status = status.max(Status::Violation);
        }
        Self {
            schema: SCHEMA,
            command: command.to_string(),
            config: config.clone(),
            maps,
            selftest,
            status,
            exit_code: status.exit_code(),
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            OutputFormat::Csv => self.csv(),
            OutputFormat::Text => self.text(),
        }
    }

    fn selftest_table(&self) -> Option<Table> {
        let s = self.selftest.as_ref()?;
        let mut t = Table::new(&["case", "support", "rank", "traces_match", "duality_holds", "first_trace_mismatch"]);
        for c in &s.cases {
            t.push([
                c.index.to_string(),
                c.support_size.to_string(),
                c.rank.to_string(),
                c.traces_match.to_string(),
                c.duality_holds.to_string(),
                c.first_trace_mismatch.map_or(String::new(), |n| n.to_string()),
            ]);
        }
        Some(t)
    }

    fn csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        let header = self.maps.iter().find(|m| !m.table.header.is_empty()).map(|m| m.table.header.clone());
        if let Some(h) = &header {
            let mut row = vec!["map".to_string()];
            row.extend(h.iter().cloned());
            w.write_record(&row).expect("in-memory write");
        }
        for m in &self.maps {
            if m.table.header.is_empty() {
                let message = m.diagnostics.join("; ");
                w.write_record([m.name.as_str(), "error", message.as_str()]).expect("in-memory write");
            }
            for r in &m.table.rows {
                let mut row = vec![m.name.clone()];
                row.extend(r.iter().cloned());
                w.write_record(&row).expect("in-memory write");
            }
        }
        if let Some(t) = self.selftest_table() {
            let mut row = vec!["selftest".to_string()];
            row.extend(t.header.iter().cloned());
            w.write_record(&row).expect("in-memory write");
            for r in &t.rows {
                let mut row = vec![format!("seed={}", self.config.seed)];
                row.extend(r.iter().cloned());
                w.write_record(&row).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    fn text(&self) -> String {
        let mut out = String::new();
        for m in &self.maps {
            let _ = writeln!(out, "== {} [{}] ({})", m.name, status_word(m.status), m.origin);
            if !m.table.header.is_empty() {
                m.table.text(&mut out);
            }
            for d in &m.diagnostics {
                let _ = writeln!(out, "  ! {d}");
            }
            out.push('\n');
        }
        if let (Some(s), Some(t)) = (&self.selftest, self.selftest_table()) {
            let _ = writeln!(
                out,
                "== finite-rank self-test seed={} pairs={} [{}]",
                s.seed,
                s.cases.len(),
                if s.passed { "ok" } else { "violation" }
            );
            t.text(&mut out);
            out.push('\n');
        }
        let _ = writeln!(out, "status: {} (exit {})", status_word(self.status), self.exit_code);
        out
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::Violation => "violation",
        Status::BudgetExceeded => "budget-exceeded",
        Status::InputError => "input-error",
    }
}
