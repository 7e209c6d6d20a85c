use std::collections::BTreeSet;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use super::report::{MapOutcome, RunReport, Status, Table};
use super::{BuiltMap, HarnessError, MapDefinition, RunConfig};
use crate::census::{self, LevelCensus};
use crate::finite_rank::selftest;
use crate::graph_topology::GraphError;
use crate::kneading::{self, KneadingData, KneadingError};
use crate::pm_domain::MapError;
use crate::rational::Rational;
use crate::series_ring::{self, RadiusEstimate, SeriesError, TruncatedSeries};
use crate::spectra::{self, EntropyConfig, EntropyReport, FixCounts, HCheck, LefschetzZeta, SpectraError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Check,
    Laps,
    Fix,
    Kneading,
    Zeta,
    Entropy,
    Verify,
    AppendixSelftest,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Check,
        Command::Laps,
        Command::Fix,
        Command::Kneading,
        Command::Zeta,
        Command::Entropy,
        Command::Verify,
        Command::AppendixSelftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Laps => "laps",
            Command::Fix => "fix",
            Command::Kneading => "kneading",
            Command::Zeta => "zeta",
            Command::Entropy => "entropy",
            Command::Verify => "verify",
            Command::AppendixSelftest => "appendix-selftest",
        }
    }
}

impl FromStr for Command {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown command `{s}`")))
    }
}

enum Failure {
    Budget(String),
    Other(String),
}

impl From<MapError> for Failure {
    fn from(e: MapError) -> Self {
        match e {
            MapError::LapBudgetExceeded { .. } => Failure::Budget(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Map(m) => m.into(),
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<SeriesError> for Failure {
    fn from(e: SeriesError) -> Self {
        Failure::Other(e.to_string())
    }
}

impl From<KneadingError> for Failure {
    fn from(e: KneadingError) -> Self {
        match e {
            KneadingError::Map(m) => m.into(),
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<SpectraError> for Failure {
    fn from(e: SpectraError) -> Self {
        match e {
            SpectraError::Map(m) => m.into(),
            SpectraError::Graph(g) => g.into(),
            SpectraError::Kneading(k) => k.into(),
            _ => Failure::Other(e.to_string()),
        }
    }
}

struct Done {
    report: Value,
    table: Table,
    diagnostics: Vec<String>,
    violation: bool,
}

fn json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn matrix_strings(rows: Vec<Vec<Rational>>) -> Vec<Vec<String>> {
    rows.iter().map(|r| strings(r)).collect()
}

/// Runs `command` over the inputs with at most `config.jobs` maps in flight.
/// Inputs that failed to load become input-error outcomes.
pub fn run(
    command: Command,
    inputs: Vec<Result<MapDefinition, HarnessError>>,
    config: &RunConfig,
) -> Result<RunReport, HarnessError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let maps = if command == Command::AppendixSelftest {
        Vec::new()
    } else {
        pool.install(|| {
            inputs
                .par_iter()
                .map(|input| match input {
                    Ok(d) => run_map(command, d, config),
                    Err(e) => load_failure(e),
                })
                .collect()
        })
    };
    let selftest = matches!(command, Command::Verify | Command::AppendixSelftest).then(|| {
        selftest::run(config.seed, config.selftest_pairs, config.selftest_trace_horizon, config.selftest_degree)
    });
    Ok(RunReport::new(command.name(), config, maps, selftest))
}

fn load_failure(e: &HarnessError) -> MapOutcome {
    let (name, origin) = match e {
        HarnessError::Io { path, .. } => (path.clone(), path.clone()),
        HarnessError::Parse { origin, .. } | HarnessError::Semantic { origin, .. } => (origin.clone(), origin.clone()),
        HarnessError::UnknownMap(n) => (n.clone(), String::new()),
        HarnessError::Config(_) => (String::new(), String::new()),
    };
    MapOutcome {
        name,
        origin,
        status: Status::InputError,
        diagnostics: vec![e.to_string()],
        report: None,
        table: Table::default(),
    }
}

/// Runs one command on one definition.
pub fn run_map(command: Command, def: &MapDefinition, config: &RunConfig) -> MapOutcome {
    let outcome = |status, diagnostics, report, table| MapOutcome {
        name: def.name.clone(),
        origin: def.source.origin.clone(),
        status,
        diagnostics,
        report,
        table,
    };
    let built = match def.build() {
        Ok(b) => b,
        Err(e) => return outcome(Status::InputError, vec![e.to_string()], None, Table::default()),
    };
    let result = match command {
        Command::Check => check(&built),
        Command::Laps => laps(&built, config),
        Command::Fix => fix(def, &built, config),
        Command::Kneading => kneading_dump(&built, config),
        Command::Zeta => zeta(&built, config),
        Command::Entropy => entropy(&built, config),
        Command::Verify => verify(def, &built, config),
        Command::AppendixSelftest => {
            Ok(Done { report: Value::Null, table: Table::default(), diagnostics: Vec::new(), violation: false })
        }
    };
    match result {
        Ok(d) => {
            outcome(if d.violation { Status::Violation } else { Status::Ok }, d.diagnostics, Some(d.report), d.table)
        }
        Err(Failure::Budget(m)) => outcome(Status::BudgetExceeded, vec![m], None, Table::default()),
        Err(Failure::Other(m)) => outcome(Status::Violation, vec![m], None, Table::default()),
    }
}

#[derive(Serialize)]
struct CheckReport {
    intervals: Vec<[String; 2]>,
    critical: Vec<String>,
    branches: usize,
    gluing_classes: Vec<Vec<String>>,
    vertices: Vec<String>,
    edges: usize,
    components: usize,
    h1_rank: usize,
    f0: Vec<Vec<String>>,
    f1: Vec<Vec<String>>,
    h_hom: f64,
    periodic_points: Vec<String>,
}

fn check(b: &BuiltMap) -> Result<Done, Failure> {
    let f = &b.induced;
    let g = f.graph();
    let p = spectra::PeriodicCriticalSet::find(f, crate::pm_domain::DEFAULT_ORBIT_HORIZON);
    let r = CheckReport {
        intervals: b.map.domain().intervals().iter().map(|(a, c)| [a.to_string(), c.to_string()]).collect(),
        critical: strings(b.map.critical()),
        branches: b.map.branches().len(),
        gluing_classes: b.gluing.classes().iter().map(|c| strings(c)).collect(),
        vertices: strings(&g.vertices()),
        edges: g.edges().len(),
        components: g.component_count(),
        h1_rank: g.h1_rank(),
        f0: matrix_strings(f.h0_matrix().to_rows()),
        f1: matrix_strings(f.h1_matrix().to_rows()),
        h_hom: f.h_hom(),
        periodic_points: p.points.keys().map(ToString::to_string).collect(),
    };
    let mut t = Table::new(&["field", "value"]);
    t.push(["branches".to_string(), r.branches.to_string()]);
    t.push(["vertices".to_string(), r.vertices.join(" ")]);
    t.push(["edges".to_string(), r.edges.to_string()]);
    t.push(["components".to_string(), r.components.to_string()]);
    t.push(["h1_rank".to_string(), r.h1_rank.to_string()]);
    t.push(["f0".to_string(), format!("{:?}", r.f0)]);
    t.push(["f1".to_string(), format!("{:?}", r.f1)]);
    t.push(["h_hom".to_string(), format!("{:.9}", r.h_hom)]);
    t.push(["periodic_points".to_string(), r.periodic_points.join(" ")]);
    Ok(Done { report: json(&r), table: t, diagnostics: Vec::new(), violation: false })
}

fn laps(b: &BuiltMap, cfg: &RunConfig) -> Result<Done, Failure> {
    let levels = census::census(&b.map, cfg.max_iter, cfg.lap_budget)?;
    let mut t = Table::new(&["n", "laps", "decreasing", "variation", "fix_neg_lift", "interior_fixed"]);
    for l in &levels {
        t.push([
            l.n.to_string(),
            l.laps.to_string(),
            l.decreasing_laps.to_string(),
            l.variation.to_string(),
            l.fix_neg.to_string(),
            l.interior_fixed.to_string(),
        ]);
    }
    Ok(Done {
        report: json(&serde_json::json!({ "levels": levels })),
        table: t,
        diagnostics: Vec::new(),
        violation: false,
    })
}

#[derive(Serialize)]
struct ArtinMazur {
    fix: Option<Vec<usize>>,
    infinite_from: Option<usize>,
}

fn artin_mazur(b: &BuiltMap, n_max: usize, budget: usize) -> Result<ArtinMazur, Failure> {
    match spectra::artin_mazur_oracle(&b.induced, n_max, budget) {
        Ok(v) => Ok(ArtinMazur { fix: Some(v), infinite_from: None }),
        Err(SpectraError::InfiniteFixedSet { n }) => Ok(ArtinMazur { fix: None, infinite_from: Some(n) }),
        Err(e) => Err(e.into()),
    }
}

fn fix_neg_mismatch(expected: &[u64], counts: &FixCounts) -> Option<usize> {
    expected.iter().zip(&counts.graph).position(|(e, c)| num_bigint::BigInt::from(*e) != *c).map(|i| i + 1)
}

fn fix(def: &MapDefinition, b: &BuiltMap, cfg: &RunConfig) -> Result<Done, Failure> {
    let f = &b.induced;
    let levels = census::census(&b.map, cfg.max_iter, cfg.lap_budget)?;
    let counts = FixCounts::assemble(f, &levels, None, cfg.max_iter)?;
    let decomposition = spectra::check_decomposition(f, &counts, cfg.max_iter, cfg.lap_budget)?;
    let am = artin_mazur(b, cfg.max_iter, cfg.lap_budget)?;
    let mut diagnostics = Vec::new();
    let mut violation = !decomposition.holds;
    if let Some(n) = decomposition.first_failure {
        diagnostics.push(format!("count decomposition fails at n = {n}"));
    }
    if let Some(n) = def.expected.fix_neg.as_deref().and_then(|e| fix_neg_mismatch(e, &counts)) {
        violation = true;
        diagnostics.push(format!("#Fix⁻(f^{n}) differs from the expected table"));
    }
    if let Some(n) = am.infinite_from {
        diagnostics.push(format!("Fix(f^{n}) is infinite: a lap of slope 1 lies on the diagonal"));
    }
    let mut t = Table::new(&["n", "fix_neg_lift", "p_fix_neg", "p_fix", "fix_neg", "fix_neg_direct", "fix"]);
    for i in 0..cfg.max_iter {
        t.push([
            (i + 1).to_string(),
            counts.lift[i].to_string(),
            counts.p_fix_neg[i].to_string(),
            counts.p_fix[i].to_string(),
            counts.graph[i].to_string(),
            decomposition.direct_fix_neg[i].to_string(),
            am.fix.as_ref().map_or("inf".to_string(), |v| v[i].to_string()),
        ]);
    }
    let report = serde_json::json!({ "counts": counts, "decomposition": decomposition, "artin_mazur": am });
    Ok(Done { report, table: t, diagnostics, violation })
}

#[derive(Serialize)]
struct KneadingDump {
    degree: usize,
    index: Vec<String>,
    m: Vec<Vec<Vec<String>>>,
    n: Vec<Vec<Vec<String>>>,
    d: Vec<String>,
    l: Vec<String>,
    coefficients_in_unit_range: bool,
    growth_guard_violation: Option<usize>,
}

fn index_labels(k: &KneadingData) -> Vec<String> {
    k.index.iter().map(|(c, s)| format!("{c}{}", s.symbol())).collect()
}

fn kneading_dump(b: &BuiltMap, cfg: &RunConfig) -> Result<Done, Failure> {
    let k = kneading::kneading_matrices(&b.map, cfg.degree)?;
    let size = k.size();
    let entries = |m: &series_ring::SeriesMatrix| -> Vec<Vec<Vec<String>>> {
        (0..size).map(|i| (0..size).map(|j| m.get(i, j).to_strings()).collect()).collect()
    };
    let r = KneadingDump {
        degree: k.degree,
        index: index_labels(&k),
        m: entries(&k.m),
        n: entries(&k.n),
        d: k.d.to_strings(),
        l: k.l.to_strings(),
        coefficients_in_unit_range: k.coefficients_in_unit_range(),
        growth_guard_violation: k.growth_guard_violation(),
    };
    let mut t = Table::new(&["k", "D", "L"]);
    for (i, (d, l)) in r.d.iter().zip(&r.l).enumerate() {
        t.push([i.to_string(), d.clone(), l.clone()]);
    }
    let violation = !r.coefficients_in_unit_range || r.growth_guard_violation.is_some();
    let diagnostics =
        if violation { vec!["kneading coefficients outside their a priori bounds".to_string()] } else { Vec::new() };
    Ok(Done { report: json(&r), table: t, diagnostics, violation })
}

struct Pipeline {
    levels: Vec<LevelCensus>,
    k: KneadingData,
    counts: FixCounts,
    lefschetz: LefschetzZeta,
    zeta_minus: TruncatedSeries,
    zeta_mt: TruncatedSeries,
    h: HCheck,
    diagnostics: Vec<String>,
}

/// Census to `n`, retrying with fewer levels when the lap budget runs out.
fn census_within_budget(
    b: &BuiltMap,
    n: usize,
    budget: usize,
    diagnostics: &mut Vec<String>,
) -> Result<Vec<LevelCensus>, Failure> {
    let mut n = n;
    loop {
        match census::census(&b.map, n, budget) {
            Ok(levels) => return Ok(levels),
            Err(MapError::LapBudgetExceeded { n: at, .. }) if at > 1 => {
                diagnostics
                    .push(format!("lap budget {budget} exceeded at n = {at}; lap counts stop at n = {}", at - 1));
                n = at - 1;
            }
            Err(e) => return Err(e.into()),
        }
    }
}

fn pipeline(b: &BuiltMap, cfg: &RunConfig, strict: bool) -> Result<Pipeline, Failure> {
    let f = &b.induced;
    let mut diagnostics = Vec::new();
    let horizon = cfg.max_iter.max(cfg.identity_degree);
    let levels = if strict {
        census::census(&b.map, horizon, cfg.lap_budget)?
    } else {
        census_within_budget(b, horizon, cfg.lap_budget, &mut diagnostics)?
    };
    let k = kneading::kneading_matrices(&b.map, cfg.degree)?;
    let counts = FixCounts::assemble(f, &levels, Some(&k), cfg.degree)?;
    let lefschetz = spectra::zeta_lefschetz(f, cfg.degree)?;
    let zeta_minus = spectra::zeta_minus(&counts, cfg.degree);
    let zeta_mt = spectra::zeta_mt(&zeta_minus, &lefschetz)?;
    let h = spectra::check_h(&zeta_mt, &k.d, &counts);
    Ok(Pipeline { levels, k, counts, lefschetz, zeta_minus, zeta_mt, h, diagnostics })
}

fn entropy_config(cfg: &RunConfig) -> EntropyConfig {
    EntropyConfig {
        degree: cfg.degree,
        max_degree: (cfg.degree * 4).max(256),
        root_tolerance: cfg.root_tolerance,
        fit_tolerance: cfg.fit_tolerance,
    }
}

fn zeta(b: &BuiltMap, cfg: &RunConfig) -> Result<Done, Failure> {
    let p = pipeline(b, cfg, false)?;
    let radius = match series_ring::radius_estimate(&p.zeta_mt)? {
        RadiusEstimate::Finite { radius, .. } => Value::from(radius),
        RadiusEstimate::AtLeastOne => Value::from(">= 1"),
    };
    let mut diagnostics = p.diagnostics;
    let violation = !p.h.holds || !p.lefschetz.matches_trace_expansion;
    if !p.h.holds {
        diagnostics.push(format!("ζ^MT·D differs from H at degree {:?}", p.h.first_failing_degree));
    }
    if !p.lefschetz.matches_trace_expansion {
        diagnostics.push("ζ^L closed form differs from its trace expansion".into());
    }
    let (zm, zl, mt) = (p.zeta_minus.to_strings(), p.lefschetz.series.to_strings(), p.zeta_mt.to_strings());
    let mut t = Table::new(&["k", "zeta_minus", "zeta_L", "zeta_MT", "H"]);
    for i in 0..zm.len() {
        t.push([i.to_string(), zm[i].clone(), zl[i].clone(), mt[i].clone(), p.h.h.get(i).cloned().unwrap_or_default()]);
    }
    let report = serde_json::json!({
        "degree": cfg.degree,
        "zeta_minus": zm,
        "lefschetz": p.lefschetz,
        "zeta_mt": mt,
        "h": p.h,
        "radius": radius,
        "lap_horizon": p.counts.lap_horizon,
    });
    Ok(Done { report, table: t, diagnostics, violation })
}

fn entropy_report(b: &BuiltMap, p: &Pipeline, cfg: &RunConfig) -> Result<EntropyReport, Failure> {
    Ok(spectra::entropy(&b.induced, &p.levels, &p.k, &p.counts, &p.zeta_mt, &entropy_config(cfg))?)
}

fn entropy_table(e: &EntropyReport) -> Table {
    let opt = |x: Option<f64>| x.map_or("inconclusive".to_string(), |v| format!("{v:.9}"));
    let mut t = Table::new(&["estimate", "value"]);
    t.push(["h_kneading".to_string(), opt(e.h_kneading)]);
    t.push(["h_laps".to_string(), format!("{:.9}", e.h_laps)]);
    t.push(["h_variation".to_string(), format!("{:.9}", e.h_variation)]);
    t.push(["h_per_neg".to_string(), format!("{:.9}", e.h_per_neg)]);
    t.push(["h_hom".to_string(), format!("{:.9}", e.h_hom)]);
    t.push(["h_max".to_string(), format!("{:.9}", e.h_max)]);
    t.push(["h_zeta".to_string(), format!("{:.9}", e.h_zeta)]);
    t.push(["rho".to_string(), e.rho.map_or(">= 1".to_string(), |r| format!("{r:.9}"))]);
    t.push([
        "kneading_root".to_string(),
        serde_json::to_value(e.kneading_status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
    ]);
    t
}

fn entropy(b: &BuiltMap, cfg: &RunConfig) -> Result<Done, Failure> {
    let p = pipeline(b, cfg, false)?;
    let e = entropy_report(b, &p, cfg)?;
    let mut diagnostics = p.diagnostics.clone();
    if e.kneading_status == spectra::KneadingRootStatus::NoRootInDisk {
        diagnostics.push("no root in disk".into());
    }
    diagnostics.extend(e.diagnostics.iter().cloned());
    Ok(Done { report: json(&e), table: entropy_table(&e), diagnostics, violation: false })
}

#[derive(Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerifyReport {
    checks: Vec<Check>,
    entropy: EntropyReport,
}

fn verify(def: &MapDefinition, b: &BuiltMap, cfg: &RunConfig) -> Result<Done, Failure> {
    let f = &b.induced;
    let p = pipeline(b, cfg, true)?;
    let e = entropy_report(b, &p, cfg)?;
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| checks.push(Check { name: name.into(), passed, detail });

    let trace = kneading::trace_rows(&p.levels[..cfg.max_iter], &p.k)?;
    let failed = trace.rows.iter().find(|r| !r.holds).map(|r| r.n);
    push("trace-identity", trace.holds, format!("n <= {}, first failure {failed:?}", cfg.max_iter));

    let lz = kneading::lap_zeta_from(&p.levels[..cfg.identity_degree], &p.k)?;
    push("lap-zeta", lz.holds, format!("degree {}, first failure {:?}", lz.degree, lz.first_failing_degree));

    let dec = spectra::check_decomposition(f, &p.counts, cfg.max_iter, cfg.lap_budget)?;
    push("count-decomposition", dec.holds, format!("n <= {}, first failure {:?}", dec.n_max, dec.first_failure));

    push("lefschetz-expansion", p.lefschetz.matches_trace_expansion, format!("degree {}", cfg.degree));

    push(
        "mt-correction",
        p.h.holds && p.h.log_coefficients_bounded,
        format!(
            "degree {}, first failure {:?}, log H bounded: {}",
            p.h.degree, p.h.first_failing_degree, p.h.log_coefficients_bounded
        ),
    );

    let fact = spectra::check_factorization(f, cfg.identity_degree);
    push(
        "factorization",
        fact.holds,
        format!(
            "degree {}, product {:?}, alpha {}, beta {}",
            fact.degree,
            fact.multiplicative.first_failing_degree,
            fact.alpha_matches_homology,
            fact.beta_matches_periodic
        ),
    );

    push(
        "kneading-bounds",
        p.k.coefficients_in_unit_range() && p.k.growth_guard_violation().is_none(),
        "entries of M, N in {-1,0,1}; |D_n|, |L_n| <= 2^p (n+1)^p".into(),
    );

    let opt = |x: Option<f64>| x.map_or("inconclusive".to_string(), |v| format!("{v:.6}"));
    push(
        "max-formula",
        e.max_formula_holds,
        format!("max(h_per_neg, h_hom) = {:.6}, h_kneading = {}", e.h_max, opt(e.h_kneading)),
    );
    push("laps-vs-kneading", e.laps_agree, format!("h_laps = {:.6}", e.h_laps));
    push(
        "growth-bounds",
        e.per_neg_below_laps && e.hom_below_laps,
        format!("h_per_neg = {:.6}, h_hom = {:.6}, h_laps = {:.6}", e.h_per_neg, e.h_hom, e.h_laps),
    );

    let x = &def.expected;
    if let Some(h) = x.h_top {
        let (got, tol) = match e.h_kneading {
            Some(v) => (v, cfg.root_tolerance),
            None => (e.h_laps, cfg.fit_tolerance),
        };
        push("expected-h_top", (got - h).abs() <= tol, format!("expected {h:.9}, got {got:.9}, tolerance {tol}"));
    }
    if let Some(h) = x.h_hom {
        push("expected-h_hom", (e.h_hom - h).abs() <= 1e-9, format!("expected {h:.9}, got {:.9}", e.h_hom));
    }
    if let Some(h) = x.h_per_neg {
        push(
            "expected-h_per_neg",
            (e.h_per_neg - h).abs() <= cfg.fit_tolerance,
            format!("expected {h:.9}, got {:.9}", e.h_per_neg),
        );
    }
    if let Some(table) = &x.fix_neg {
        let bad = fix_neg_mismatch(table, &p.counts);
        push(
            "expected-fix_neg",
            bad.is_none(),
            format!("{} entries, first mismatch {bad:?}", table.len().min(p.counts.graph.len())),
        );
    }
    if let Some(points) = &x.periodic_points {
        let want: BTreeSet<String> = points.iter().map(ToString::to_string).collect();
        let got: BTreeSet<String> = p.counts.periodic_points.iter().cloned().collect();
        push("expected-periodic_points", want == got, format!("got {:?}", got));
    }
    for (name, want, got) in
        [("expected-kneading_d", &x.kneading_d, &p.k.d), ("expected-kneading_l", &x.kneading_l, &p.k.l)]
    {
        if let Some(c) = want {
            let ok = TruncatedSeries::new(c.clone(), got.degree()) == *got;
            push(name, ok, format!("degree {}", got.degree()));
        }
    }
    if let Some(inf) = x.infinite_fixed_set {
        let am = artin_mazur(b, cfg.max_iter, cfg.lap_budget)?;
        push(
            "expected-infinite_fixed_set",
            am.infinite_from.is_some() == inf,
            format!("infinite from {:?}", am.infinite_from),
        );
    }

    let violation = checks.iter().any(|c| !c.passed);
    let mut diagnostics = p.diagnostics.clone();
    diagnostics.extend(checks.iter().filter(|c| !c.passed).map(|c| format!("{} failed: {}", c.name, c.detail)));
    diagnostics.extend(e.diagnostics.iter().cloned());
    let mut t = Table::new(&["check", "passed", "detail"]);
    for c in &checks {
        t.push([c.name.clone(), c.passed.to_string(), c.detail.clone()]);
    }
    Ok(Done { report: json(&VerifyReport { checks, entropy: e }), table: t, diagnostics, violation })
}
