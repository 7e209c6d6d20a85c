//! Acceptance suite: one PASS/FAIL line per criterion, sub-checks indented.
//! Exits nonzero when any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{analyse, brute_levels, built, definition, series, Analysis};
use knead::census;
use knead::cli_harness::{self, corpus, Command, RunConfig, Status};
use knead::finite_rank::selftest;
use knead::graph_topology::{validate_induced, Gluing};
use knead::kneading;
use knead::pm_domain::{BranchSpec, MapError, MapSpec, PMMap, DEFAULT_LAP_BUDGET};
use knead::rational::{int, ratio, Rational};
use knead::series_ring::TruncatedSeries;
use knead::spectra::{self, KneadingRootStatus, SpectraError};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const LN2: f64 = std::f64::consts::LN_2;

fn golden() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

#[derive(Default)]
struct Criterion {
    checks: Vec<(bool, String)>,
}

impl Criterion {
    fn check(&mut self, pass: bool, what: impl Into<String>) {
        self.checks.push((pass, what.into()));
    }

    fn close(&mut self, want: f64, got: f64, tol: f64, what: &str) {
        self.check((want - got).abs() <= tol, format!("{what}: {got:.9} vs {want:.9} (tolerance {tol:e})"));
    }

    fn within(&mut self, elapsed: Duration, limit: Duration, what: &str) {
        self.check(
            elapsed < limit,
            format!("{what}: {:.3} s (limit {} s)", elapsed.as_secs_f64(), limit.as_secs_f64()),
        );
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|(p, _)| *p)
    }
}

fn report(id: &str, title: &str, c: &Criterion) -> bool {
    println!("{} {id}. {title}", if c.passed() { "PASS" } else { "FAIL" });
    for (p, what) in &c.checks {
        println!("       {} {what}", if *p { "ok  " } else { "FAIL" });
    }
    c.passed()
}

fn graph_counts(a: &Analysis, n: usize) -> Vec<BigInt> {
    a.counts.graph[..n].to_vec()
}

fn entropy_routes(c: &mut Criterion, a: &Analysis, want: f64, tol: f64) {
    let e = &a.entropy;
    c.check(e.kneading_status == KneadingRootStatus::Root, format!("kneading root found ({:?})", e.kneading_status));
    c.close(want, e.h_kneading.unwrap_or(f64::NAN), tol, "h_kneading");
    c.close(want, e.h_laps, tol, "h_laps");
}

fn criterion_1() -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    let b = built("circle_doubling");
    let a = analyse(&b, 12, 64);
    let elapsed = start.elapsed();
    entropy_routes(&mut c, &a, LN2, 1e-3);
    c.close(LN2, a.entropy.h_hom, 1e-3, "h_hom");
    c.check(a.entropy.h_per_neg == 0.0, format!("h_per_neg = {}", a.entropy.h_per_neg));
    c.check(graph_counts(&a, 12).iter().all(Zero::is_zero), "#Fix⁻(f^n) = 0 for n <= 12");
    let oracle = brute_levels(&definition("circle_doubling"), 12);
    c.check(oracle.iter().all(|l| l.fix_neg == 0), "brute-force lift counts vanish for n <= 12");
    c.check(a.k.d == series(&[1, -2], 64), format!("D(z) = 1 - 2z at N = 64 ({})", a.k.d.truncate(4)));
    c.check(a.entropy.max_formula_holds, format!("max(h_per_neg, h_hom) = {:.6}", a.entropy.h_max));
    c.within(elapsed, Duration::from_secs(1), "runtime");
    c
}

fn criterion_2() -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    let b = built("tent");
    let a = analyse(&b, 20, 64);
    let elapsed = start.elapsed();
    let powers: Vec<BigInt> = (0..12).map(|k| BigInt::from(1u64 << k)).collect();
    c.check(graph_counts(&a, 12) == powers, "#Fix⁻(f^n) = 2^(n-1) for n <= 12");
    let oracle = brute_levels(&definition("tent"), 12);
    let brute: Vec<usize> = oracle.iter().map(|l| l.fix_neg).collect();
    c.check(brute.iter().enumerate().all(|(i, &x)| x == 1 << i), format!("brute-force lift counts {:?}", &brute[..6]));
    c.check(a.k.d == series(&[1, -2], 64), "D(z) = 1 - 2z");
    c.check(a.k.l == series(&[1], 64), "L(z) = 1");
    // (1 − z)/(1 − 2z) = 1 + z + 2z² + 4z³ + …
    let mut expected = vec![Rational::from_integer(BigInt::from(1))];
    expected.extend((0..64).map(|k| Rational::from_integer(BigInt::from(1) << k)));
    c.check(a.zeta_mt == TruncatedSeries::new(expected, 64), "ζ^MT = (1 - z)/(1 - 2z) to degree 64");
    entropy_routes(&mut c, &a, LN2, 1e-3);
    c.close(LN2, a.entropy.h_variation, 1e-3, "h_variation");
    c.close(LN2, a.entropy.h_per_neg, 1e-3, "h_per_neg");
    c.close(LN2, a.entropy.h_zeta, 1e-3, "h_zeta");
    c.within(elapsed, Duration::from_secs(5), "runtime");
    c
}

fn criterion_3() -> Criterion {
    let mut c = Criterion::default();
    let a = analyse(&built("golden_markov"), 20, 64);
    let phi = golden();
    entropy_routes(&mut c, &a, phi.ln(), 5e-3);
    let root = a.entropy.root_modulus.unwrap_or(f64::NAN);
    c.close(1.0 / phi, root, 1e-6, "smallest root of D against 1/φ");
    let hk = a.entropy.h_kneading.unwrap_or(f64::NAN);
    c.close(hk, a.entropy.h_laps, 5e-2, "h_laps against h_kneading");
    let oracle = brute_levels(&definition("golden_markov"), 18);
    c.close(phi.ln(), common::lap_ratio_log(&oracle), 5e-3, "brute-force lap growth ℓ(F^18)/ℓ(F^17)");
    c
}

fn criterion_4() -> Criterion {
    let mut c = Criterion::default();
    let b = built("wedge");
    let a = analyse(&b, 20, 64);
    let phi = golden();
    let m = b.induced.h1_matrix();
    let (tr, det) = (m.trace(), m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0));
    c.check(
        m.rows() == 2 && tr == int(1) && det == int(-1),
        format!("f_*1 is conjugate to [[1,1],[1,0]] (trace {tr}, det {det})"),
    );
    c.close(phi.ln(), a.entropy.h_hom, 1e-9, "h_hom");
    let hk = a.entropy.h_kneading.unwrap_or(f64::NAN);
    c.close(hk, a.entropy.h_max, 5e-3, "max(h_per_neg, h_hom) against h_kneading");
    let oracle = brute_levels(&definition("wedge"), 18);
    c.close(phi.ln(), common::lap_ratio_log(&oracle), 5e-3, "brute-force lap growth");
    c.close(phi.ln(), hk, 5e-3, "h_kneading");
    c
}

fn criterion_5() -> Criterion {
    let mut c = Criterion::default();
    for def in corpus::all() {
        let b = def.build().expect("bundled map builds");
        let a = analyse(&b, 20, 20);
        let name = &def.name;
        let trace = kneading::trace_rows(&a.levels[..10], &a.k).expect("trace rows");
        c.check(trace.holds, format!("{name}: tr_D - tr_L = 2#Fix⁻(F^n), n <= 10"));
        let lz = kneading::lap_zeta_from(&a.levels[..20], &a.k).expect("lap zeta");
        c.check(
            lz.holds,
            format!("{name}: L/D = exp Σ 2#Fix⁻(F^n) z^n/n to degree 20 ({:?})", lz.first_failing_degree),
        );
        let dec = spectra::check_decomposition(&b.induced, &a.counts, 10, DEFAULT_LAP_BUDGET).expect("decomposition");
        c.check(dec.holds, format!("{name}: direct count on F^n = lift + P∩Fix⁻, n <= 10 ({:?})", dec.first_failure));
        c.check(a.h.holds, format!("{name}: ζ^MT·D = H to degree 20 ({:?})", a.h.first_failing_degree));
        c.check(a.lefschetz.matches_trace_expansion, format!("{name}: ζ^L closed form = exp-trace expansion"));
        if let Some(table) = &def.expected.fix_neg {
            let got: Vec<BigInt> = a.counts.graph.iter().take(table.len()).cloned().collect();
            let want: Vec<BigInt> = table.iter().map(|&x| BigInt::from(x)).collect();
            c.check(got == want, format!("{name}: #Fix⁻(f^n) matches the oracle table"));
        }
        let oracle = brute_levels(&def, 10);
        let lift_ok = oracle.iter().zip(&a.counts.lift).all(|(o, l)| BigInt::from(o.fix_neg) == *l);
        c.check(lift_ok, format!("{name}: lift counts match brute-force refinement, n <= 10"));
    }
    c
}

fn criterion_6() -> Criterion {
    let mut c = Criterion::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cli_harness::DEFAULT_SEED);
    let (mut traces_ok, mut duality_ok) = (0, 0);
    for _ in 0..50 {
        let fp = selftest::random_pair(&mut rng);
        let dense = common::dense_pair_traces(&fp, 32);
        let traces = fp.pair.traces(10, 10).expect("traces");
        traces_ok += usize::from(traces[..10] == dense[..10]);
        let neg: Vec<Rational> = dense.iter().map(|t| -t).collect();
        duality_ok += usize::from(TruncatedSeries::exp_of_weighted(&neg, 32) == fp.pair.determinant(32));
    }
    c.check(traces_ok == 50, format!("pair traces = dense tr(B₁ⁿ - B₀ⁿ), n <= 10: {traces_ok}/50"));
    c.check(duality_ok == 50, format!("exp(-Σ tr z^n/n) = det(Id - zM) to degree 32: {duality_ok}/50"));
    let report = selftest::run(cli_harness::DEFAULT_SEED, 50, 10, 32);
    c.check(report.passed, "library self-test at the default seed");
    for def in corpus::all() {
        let b = def.build().expect("bundled map builds");
        let f = spectra::check_factorization(&b.induced, 20);
        c.check(
            f.holds,
            format!(
                "{}: D_L = D_α·D_β to degree 20 ({:?}), α {}, β {}",
                def.name, f.multiplicative.first_failing_degree, f.alpha_matches_homology, f.beta_matches_periodic
            ),
        );
    }
    c
}

#[allow(clippy::result_large_err)]
fn unit_interval_map(critical: Vec<Rational>, branches: &[(Rational, Rational)]) -> Result<PMMap, MapError> {
    PMMap::validate(MapSpec {
        intervals: vec![(int(0), int(1))],
        critical,
        branches: branches.iter().map(|(s, t)| BranchSpec::new(s.clone(), t.clone())).collect(),
    })
}

fn criterion_7() -> Criterion {
    let mut c = Criterion::default();
    let halves = vec![int(0), ratio(1, 2), int(1)];
    let tent = unit_interval_map(halves.clone(), &[(int(2), int(0)), (int(-2), int(2))]).expect("tent");
    let circle = Gluing::new(tent.domain(), &[vec![int(0), int(1)]]).expect("gluing");
    let outcome = validate_induced(&tent, &circle);
    c.check(
        outcome.is_err(),
        format!(
            "tent with 0 ~ 1 rejected by validate_induced (got {})",
            outcome.as_ref().map_or_else(|e| e.to_string(), |_| "accepted".into())
        ),
    );
    let flat = unit_interval_map(halves, &[(int(0), ratio(1, 2)), (int(-1), int(1))]);
    c.check(
        matches!(flat, Err(MapError::NonMonotoneBranch { index: 0 })),
        format!("slope-0 branch rejected ({:?})", flat.as_ref().err()),
    );
    let parsed = definition("diagonal_control");
    let b = parsed.build().expect("diagonal control builds");
    let am = spectra::artin_mazur_oracle(&b.induced, 8, DEFAULT_LAP_BUDGET);
    c.check(
        matches!(am, Err(SpectraError::InfiniteFixedSet { n: 1 })),
        format!("Artin-Mazur oracle reports InfiniteFixedSet ({:?})", am.as_ref().err()),
    );
    let a = analyse(&b, 12, 64);
    c.check(a.k.d.degree() == 64, format!("D(z) computes ({})", a.k.d.truncate(3)));
    c.check(a.zeta_mt.degree() == 64, "ζ^MT computes");
    c.close(LN2, a.entropy.h_kneading.unwrap_or(f64::NAN), 1e-3, "entropy computes (h_kneading)");
    c
}

fn criterion_8() -> Criterion {
    let mut c = Criterion::default();
    for def in corpus::all() {
        if def.branches.len() > 8 {
            continue;
        }
        let b = def.build().expect("bundled map builds");
        let start = Instant::now();
        let levels = census::census(&b.map, 14, DEFAULT_LAP_BUDGET);
        let elapsed = start.elapsed();
        c.check(levels.is_ok(), format!("{}: census to n = 14 within the lap budget", def.name));
        c.within(elapsed, Duration::from_secs(10), &format!("{}: laps of F^1..F^14", def.name));
    }
    let config = RunConfig::default();
    let inputs = corpus::names().into_iter().map(corpus::get).collect();
    let start = Instant::now();
    let run = cli_harness::run(Command::Verify, inputs, &config).expect("valid config");
    let elapsed = start.elapsed();
    c.check(run.status == Status::Ok, format!("verify over the bundled corpus: {:?}", run.status));
    c.within(elapsed, Duration::from_secs(60), "verify over the bundled corpus");
    c
}

type Runner = fn() -> Criterion;

fn main() -> ExitCode {
    let criteria: [(&str, &str, Runner); 8] = [
        ("1", "circle doubling", criterion_1),
        ("2", "full tent map", criterion_2),
        ("3", "golden-mean Markov map", criterion_3),
        ("4", "wedge of two circles", criterion_4),
        ("5", "exact identity suite on the bundled corpus", criterion_5),
        ("6", "finite-rank property suite", criterion_6),
        ("7", "negative controls", criterion_7),
        ("8", "performance", criterion_8),
    ];
    let mut failed = Vec::new();
    for (id, title, run) in criteria {
        if !report(id, title, &run()) {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
