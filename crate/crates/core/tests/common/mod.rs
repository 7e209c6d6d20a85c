//! Shared helpers and brute-force oracles for the integration tests.
#![allow(dead_code)]

use knead::census::{self, LevelCensus};
use knead::cli_harness::{corpus, parse_map_str, BuiltMap, MapDefinition};
use knead::kneading::{self, KneadingData};
use knead::pm_domain::DEFAULT_LAP_BUDGET;
use knead::rational::Rational;
use knead::series_ring::TruncatedSeries;
use knead::spectra::{self, EntropyConfig, EntropyReport, FixCounts, HCheck, LefschetzZeta};
use num_traits::{Signed, Zero};

pub const ROTATED_DOUBLING: &str = include_str!("../fixtures/circle_rotated_doubling.toml");

pub fn definition(name: &str) -> MapDefinition {
    if name == "circle_rotated_doubling" {
        parse_map_str(ROTATED_DOUBLING, "fixture").expect("fixture parses")
    } else {
        corpus::get(name).expect("bundled map")
    }
}

pub fn built(name: &str) -> BuiltMap {
    definition(name).build().expect("bundled map builds")
}

pub struct Analysis {
    pub levels: Vec<LevelCensus>,
    pub k: KneadingData,
    pub counts: FixCounts,
    pub lefschetz: LefschetzZeta,
    pub zeta_minus: TruncatedSeries,
    pub zeta_mt: TruncatedSeries,
    pub h: HCheck,
    pub entropy: EntropyReport,
}

/// Everything from the lap census of `F, …, F^lap_levels` and series of
/// degree `degree`.
pub fn analyse(b: &BuiltMap, lap_levels: usize, degree: usize) -> Analysis {
    let f = &b.induced;
    let levels = census::census(&b.map, lap_levels, DEFAULT_LAP_BUDGET).expect("census");
    let k = kneading::kneading_matrices(&b.map, degree).expect("kneading");
    let counts = FixCounts::assemble(f, &levels, Some(&k), degree).expect("counts");
    let lefschetz = spectra::zeta_lefschetz(f, degree).expect("lefschetz");
    let zeta_minus = spectra::zeta_minus(&counts, degree);
    let zeta_mt = spectra::zeta_mt(&zeta_minus, &lefschetz).expect("zeta_mt");
    let h = spectra::check_h(&zeta_mt, &k.d, &counts);
    let cfg = EntropyConfig { degree, ..EntropyConfig::default() };
    let entropy = spectra::entropy(f, &levels, &k, &counts, &zeta_mt, &cfg).expect("entropy");
    Analysis { levels, k, counts, lefschetz, zeta_minus, zeta_mt, h, entropy }
}

pub fn series(c: &[i64], degree: usize) -> TruncatedSeries {
    TruncatedSeries::from_ints(c, degree)
}

/// Per-level lap data from a direct interval refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteLevel {
    pub laps: usize,
    /// Decreasing laps `(c, d)` with `c < F^n(c+)` and `F^n(d−) < d`.
    pub fix_neg: usize,
}

/// Refines each piece `x ↦ a·x + b` on `(lo, hi)` against the branch
/// intervals by testing every branch for overlap with the image.
pub fn brute_levels(def: &MapDefinition, n_max: usize) -> Vec<BruteLevel> {
    let pieces: Vec<(Rational, Rational, Rational, Rational)> =
        def.branches.iter().map(|b| (b.left.clone(), b.right.clone(), b.slope.clone(), b.intercept.clone())).collect();
    let mut out = vec![BruteLevel { laps: 0, fix_neg: 0 }; n_max];
    let mut stack: Vec<(Rational, Rational, Rational, Rational, usize)> =
        pieces.iter().map(|(l, r, a, b)| (l.clone(), r.clone(), a.clone(), b.clone(), 1)).collect();
    while let Some((lo, hi, a, b, depth)) = stack.pop() {
        let y_lo = &a * &lo + &b;
        let y_hi = &a * &hi + &b;
        let row = &mut out[depth - 1];
        row.laps += 1;
        if a.is_negative() && lo < y_lo && y_hi < hi {
            row.fix_neg += 1;
        }
        if depth == n_max {
            continue;
        }
        let (im_lo, im_hi) = if a.is_positive() { (y_lo, y_hi) } else { (y_hi, y_lo) };
        for (l, r, s, t) in &pieces {
            let u = if *l > im_lo { l.clone() } else { im_lo.clone() };
            let v = if *r < im_hi { r.clone() } else { im_hi.clone() };
            if u >= v {
                continue;
            }
            let (p, q) = ((&u - &b) / &a, (&v - &b) / &a);
            let (p, q) = if p < q { (p, q) } else { (q, p) };
            stack.push((p, q, s * &a, s * &b + t, depth + 1));
        }
    }
    out
}

/// Dense `tr(B₁ⁿ − B₀ⁿ)` for a pair supported on a finite point set.
pub fn dense_pair_traces(fp: &knead::finite_rank::selftest::FinitePair, n_max: usize) -> Vec<Rational> {
    let s = fp.support.len();
    let at = |x: &Rational| fp.support.iter().position(|p| p == x).expect("point in support");
    let mut b0 = vec![vec![Rational::zero(); s]; s];
    for (x, img) in &fp.base_table {
        if let Some((y, w)) = img {
            b0[at(y)][at(x)] += w;
        }
    }
    let mut b1 = b0.clone();
    for t in fp.pair.corrections() {
        for (j, x) in fp.support.iter().enumerate() {
            let w = t.form.eval_point(x);
            for (y, c) in t.vector.iter() {
                b1[at(y)][j] += c * &w;
            }
        }
    }
    let mul = |a: &Vec<Vec<Rational>>, b: &Vec<Vec<Rational>>| -> Vec<Vec<Rational>> {
        (0..s)
            .map(|i| (0..s).map(|j| (0..s).fold(Rational::zero(), |acc, k| acc + &a[i][k] * &b[k][j])).collect())
            .collect()
    };
    let trace = |m: &Vec<Vec<Rational>>| (0..s).fold(Rational::zero(), |acc, i| acc + &m[i][i]);
    let (mut p0, mut p1) = (b0.clone(), b1.clone());
    let mut out = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        out.push(trace(&p1) - trace(&p0));
        p0 = mul(&p0, &b0);
        p1 = mul(&p1, &b1);
    }
    out
}

/// `log ℓ(F^n) − log ℓ(F^{n−1})` at the last level.
pub fn lap_ratio_log(levels: &[BruteLevel]) -> f64 {
    let n = levels.len();
    (levels[n - 1].laps as f64 / levels[n - 2].laps as f64).ln()
}
