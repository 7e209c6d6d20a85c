//! Fixed points of negative type, zeta functions and entropy estimates for a
//! graph map induced by a PM map.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::census::{self, LevelCensus};
use crate::chain::FormalVector;
use crate::finite_rank::{compare_product, FiniteRankPair, Form, MultiplicativityReport, RankOneTerm};
use crate::graph_topology::{validate_induced, GraphError, InducedMap};
use crate::kneading::{self, KneadingData, KneadingError};
use crate::pm_domain::{MapError, PMMap, DEFAULT_ORBIT_HORIZON};
use crate::rational::{self, Rational};
use crate::series_ring::{self, RadiusEstimate, SeriesError, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectraError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Kneading(#[from] KneadingError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("F^{n} has a lap of slope 1 on the diagonal: infinitely many fixed points")]
    InfiniteFixedSet { n: usize },
}

/// `#Fix⁻(F^n)`: decreasing laps of `F^n` whose graph crosses the diagonal
/// strictly inside.
pub fn count_fix_neg_lift(map: &PMMap, n: usize, budget: usize) -> Result<usize, MapError> {
    Ok(census::census(map, n, budget)?[n - 1].fix_neg)
}

/// The periodic orbits of `f` through `π(C_F)`, with the period of each point.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PeriodicCriticalSet {
    pub points: BTreeMap<Rational, usize>,
}

impl PeriodicCriticalSet {
    pub fn find(f: &InducedMap, horizon: usize) -> Self {
        let graph = f.graph();
        let starts: BTreeSet<Rational> = f.map().critical().iter().map(|c| graph.canonical(c)).collect();
        let mut points = BTreeMap::new();
        for q in starts {
            if points.contains_key(&q) {
                continue;
            }
            let mut orbit = vec![q.clone()];
            let mut x = f.point_image(&q);
            while x != q && orbit.len() < horizon {
                orbit.push(x.clone());
                x = f.point_image(&x);
            }
            if x == q {
                let p = orbit.len();
                for y in orbit {
                    points.insert(y, p);
                }
            }
        }
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `#P ∩ Fix(f^n)`.
    pub fn fixed(&self, n: usize) -> usize {
        self.points.values().filter(|&&p| n.is_multiple_of(p)).count()
    }

    /// `#P ∩ Fix⁻(f^n)`.
    pub fn fixed_negative(&self, f: &InducedMap, n: usize) -> usize {
        self.points.iter().filter(|(q, &p)| n.is_multiple_of(p) && f.is_negative_fixed(q, n)).count()
    }
}

/// `#P ∩ Fix⁻(f^n)` and `#P ∩ Fix(f^n)` for `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GluedCorrections {
    pub periodic_points: Vec<String>,
    pub fix_neg: Vec<usize>,
    pub fix: Vec<usize>,
}

pub fn glued_point_corrections(f: &InducedMap, n_max: usize) -> GluedCorrections {
    let p = PeriodicCriticalSet::find(f, DEFAULT_ORBIT_HORIZON.max(n_max));
    GluedCorrections {
        periodic_points: p.points.keys().map(ToString::to_string).collect(),
        fix_neg: (1..=n_max).map(|n| p.fixed_negative(f, n)).collect(),
        fix: (1..=n_max).map(|n| p.fixed(n)).collect(),
    }
}

/// `#Fix⁻(f^n)` and `#Fix(f^n) ∩ π(C_{F^n})` computed on the iterate `F^n`
/// directly: interior crossings of its decreasing laps plus glued points
/// where `f^n` swaps the two germs.
pub fn fix_neg_direct(f: &InducedMap, n: usize, budget: usize) -> Result<(usize, usize), SpectraError> {
    let g = f.map().iterate(n, budget)?;
    let gi = validate_induced(&g, f.graph().gluing())?;
    let lift = census::census(&g, 1, budget)?[0].fix_neg;
    let points: BTreeSet<Rational> = g.critical().iter().map(|c| gi.graph().canonical(c)).collect();
    let neg = points.iter().filter(|q| gi.is_negative_fixed(q, 1)).count();
    let fixed = points.iter().filter(|q| gi.point_image(q) == **q).count();
    Ok((lift + neg, fixed))
}

/// Where a lift count came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountSource {
    /// Enumerated laps of `F^n`.
    Laps,
    /// `(tr_D − tr_L)/2` from the kneading determinants.
    KneadingTraces,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixCounts {
    pub n_max: usize,
    /// Largest `n` whose lift count was enumerated from laps.
    pub lap_horizon: usize,
    #[serde(serialize_with = "big_strings")]
    pub lift: Vec<BigInt>,
    pub source: Vec<CountSource>,
    pub p_fix_neg: Vec<usize>,
    pub p_fix: Vec<usize>,
    /// `#Fix⁻(f^n) = #Fix⁻(F^n) + #P∩Fix⁻(f^n)`.
    #[serde(serialize_with = "big_strings")]
    pub graph: Vec<BigInt>,
    pub periodic_points: Vec<String>,
}

fn series_strings<S: serde::Serializer>(v: &TruncatedSeries, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.to_strings())
}

fn big_strings<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

impl FixCounts {
    /// Counts to `n_max`: lap enumeration where the census reaches, kneading
    /// traces beyond it.
    pub fn assemble(
        f: &InducedMap,
        levels: &[LevelCensus],
        kneading: Option<&KneadingData>,
        n_max: usize,
    ) -> Result<Self, SpectraError> {
        let horizon = levels.len().min(n_max);
        let mut lift: Vec<BigInt> = levels[..horizon].iter().map(|l| BigInt::from(l.fix_neg)).collect();
        let mut source = vec![CountSource::Laps; horizon];
        if n_max > horizon {
            let k = kneading.ok_or(SeriesError::DegreeTooSmall { need: n_max, have: horizon })?;
            let td = k.d.log_derivative_traces()?;
            let tl = k.l.log_derivative_traces()?;
            if td.len() < n_max {
                return Err(SeriesError::DegreeTooSmall { need: n_max, have: td.len() }.into());
            }
            for n in horizon..n_max {
                let x = (&td[n] - &tl[n]) / rational::int(2);
                lift.push(x.to_integer());
                source.push(CountSource::KneadingTraces);
            }
        }
        let corr = glued_point_corrections(f, n_max);
        let graph = lift.iter().zip(&corr.fix_neg).map(|(l, p)| l + BigInt::from(*p)).collect();
        Ok(Self {
            n_max,
            lap_horizon: horizon,
            lift,
            source,
            p_fix_neg: corr.fix_neg,
            p_fix: corr.fix,
            graph,
            periodic_points: corr.periodic_points,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LefschetzZeta {
    /// `det(Id − z·f_{*1})`, ascending coefficients.
    pub numerator: Vec<String>,
    /// `det(Id − z·f_{*0})`.
    pub denominator: Vec<String>,
    #[serde(serialize_with = "series_strings")]
    pub series: TruncatedSeries,
    /// Whether the closed form equals `exp Σ (tr f_{*0}^n − tr f_{*1}^n)/n zⁿ`.
    pub matches_trace_expansion: bool,
}

fn poly_series(c: &[Rational], degree: usize) -> TruncatedSeries {
    TruncatedSeries::new(c.to_vec(), degree)
}

pub fn zeta_lefschetz(f: &InducedMap, degree: usize) -> Result<LefschetzZeta, SpectraError> {
    let h0 = f.h0_matrix();
    let h1 = f.h1_matrix();
    let num = h1.det_id_minus_z();
    let den = h0.det_id_minus_z();
    let series = &poly_series(&num, degree) * &poly_series(&den, degree).inverse()?;
    let t0 = h0.power_traces(degree);
    let t1 = h1.power_traces(degree);
    let w: Vec<Rational> = t0.iter().zip(&t1).map(|(a, b)| a - b).collect();
    let expansion = TruncatedSeries::exp_of_weighted(&w, degree);
    Ok(LefschetzZeta {
        numerator: num.iter().map(ToString::to_string).collect(),
        denominator: den.iter().map(ToString::to_string).collect(),
        matches_trace_expansion: expansion == series,
        series,
    })
}

/// `ζ⁻ = exp Σ 2#Fix⁻(f^n)/n zⁿ`.
pub fn zeta_minus(counts: &FixCounts, degree: usize) -> TruncatedSeries {
    let w: Vec<Rational> = counts.graph.iter().take(degree).map(|c| Rational::from_integer(c * 2)).collect();
    TruncatedSeries::exp_of_weighted(&w, degree.min(counts.graph.len()))
}

/// `ζ^MT = ζ⁻ / ζ^L`.
pub fn zeta_mt(zeta_minus: &TruncatedSeries, lefschetz: &LefschetzZeta) -> Result<TruncatedSeries, SeriesError> {
    Ok(zeta_minus * &lefschetz.series.inverse()?)
}

/// `H = exp Σ (2#P∩Fix⁻(f^n) − #P∩Fix(f^n))/n zⁿ`.
pub fn correction_factor_h(counts: &FixCounts, degree: usize) -> TruncatedSeries {
    let w: Vec<Rational> = counts
        .p_fix_neg
        .iter()
        .zip(&counts.p_fix)
        .take(degree)
        .map(|(&a, &b)| rational::int(2 * a as i64 - b as i64))
        .collect();
    TruncatedSeries::exp_of_weighted(&w, degree.min(w.len()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HCheck {
    pub degree: usize,
    pub holds: bool,
    pub first_failing_degree: Option<usize>,
    /// `|2#P∩Fix⁻ − #P∩Fix| ≤ 3·#P` for every n, so `log H` converges on the unit disk.
    pub log_coefficients_bounded: bool,
    pub h: Vec<String>,
}

/// Compares `ζ^MT · D` with `H`.
pub fn check_h(zeta_mt: &TruncatedSeries, d: &TruncatedSeries, counts: &FixCounts) -> HCheck {
    let degree = zeta_mt.degree().min(d.degree()).min(counts.p_fix.len());
    let h = correction_factor_h(counts, degree);
    let lhs = &zeta_mt.truncate(degree) * &d.truncate(degree);
    let first = lhs.first_difference(&h);
    let bound = 3 * counts.periodic_points.len() as i64;
    let bounded = counts.p_fix_neg.iter().zip(&counts.p_fix).all(|(&a, &b)| (2 * a as i64 - b as i64).abs() <= bound);
    HCheck {
        degree,
        holds: first.is_none(),
        first_failing_degree: first,
        log_coefficients_bounded: bounded,
        h: h.to_strings(),
    }
}

/// `#Fix(f^n)` for `n = 1..=n_max` when every fixed set is finite.
pub fn artin_mazur_oracle(f: &InducedMap, n_max: usize, budget: usize) -> Result<Vec<usize>, SpectraError> {
    let levels = census::census(f.map(), n_max, budget)?;
    let p = PeriodicCriticalSet::find(f, DEFAULT_ORBIT_HORIZON.max(n_max));
    levels
        .iter()
        .map(|l| {
            if l.diagonal_laps > 0 {
                Err(SpectraError::InfiniteFixedSet { n: l.n })
            } else {
                Ok(l.interior_fixed + p.fixed(l.n))
            }
        })
        .collect()
}

/// Tolerances for entropy agreement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyConfig {
    pub degree: usize,
    pub max_degree: usize,
    pub root_tolerance: f64,
    pub fit_tolerance: f64,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        Self { degree: 64, max_degree: 256, root_tolerance: 1e-3, fit_tolerance: 5e-2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KneadingRootStatus {
    Root,
    NoRootInDisk,
    /// The smallest root moved under truncation at every degree tried.
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub h_kneading: Option<f64>,
    pub kneading_status: KneadingRootStatus,
    pub root_modulus: Option<f64>,
    pub root_degree: usize,
    pub h_laps: f64,
    pub h_variation: f64,
    pub h_per_neg: f64,
    pub h_hom: f64,
    pub h_max: f64,
    /// `−log ρ` for the radius `ρ` of `ζ^MT`, when `ρ < 1`.
    pub h_zeta: f64,
    /// The radius of `ζ^MT`, `None` meaning "at least 1".
    pub rho: Option<f64>,
    pub lap_window: (usize, usize),
    pub fix_window: (usize, usize),
    pub root_tolerance: f64,
    pub fit_tolerance: f64,
    /// `max{h_per⁻, h_hom}` against `h_kneading`.
    pub max_formula_holds: bool,
    pub laps_agree: bool,
    pub per_neg_below_laps: bool,
    pub hom_below_laps: bool,
    pub diagnostics: Vec<String>,
}

/// Slope of the least-squares line through `(n, y_n)`.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn log_plus(x: &BigInt) -> f64 {
    if x <= &BigInt::one() {
        0.0
    } else {
        series_ring::log_abs(&Rational::from_integer(x.clone()))
    }
}

/// Growth rate of a sequence from the top half of its window, floored at 0.
fn growth(values: &[f64]) -> (f64, (usize, usize)) {
    let n = values.len();
    let lo = (n / 2).max(1);
    let pts: Vec<(f64, f64)> = (lo..=n).map(|k| (k as f64, values[k - 1])).collect();
    (fit_slope(&pts).max(0.0), (lo, n))
}

fn kneading_root(
    f: &InducedMap,
    first: &KneadingData,
    cfg: &EntropyConfig,
) -> Result<(KneadingRootStatus, Option<f64>, usize), SpectraError> {
    let mut degree = first.degree;
    let mut d = first.d.clone();
    loop {
        match series_ring::smallest_root_in_disk(&d, 1.0, cfg.root_tolerance) {
            Ok(Some(r)) => return Ok((KneadingRootStatus::Root, Some(r.root.modulus()), degree)),
            Ok(None) => return Ok((KneadingRootStatus::NoRootInDisk, None, degree)),
            Err(SeriesError::UnstableRoot { .. }) if degree * 2 <= cfg.max_degree => {
                degree *= 2;
                d = kneading::kneading_matrices(f.map(), degree)?.d;
            }
            Err(SeriesError::UnstableRoot { .. }) => return Ok((KneadingRootStatus::Unstable, None, degree)),
            Err(e) => return Err(e.into()),
        }
    }
}

/// All entropy estimates for `f`.
pub fn entropy(
    f: &InducedMap,
    levels: &[LevelCensus],
    k: &KneadingData,
    counts: &FixCounts,
    zeta_mt: &TruncatedSeries,
    cfg: &EntropyConfig,
) -> Result<EntropyReport, SpectraError> {
    let mut diagnostics = Vec::new();
    let (status, modulus, root_degree) = kneading_root(f, k, cfg)?;
    let h_kneading = match status {
        KneadingRootStatus::Root => Some(-modulus.expect("root present").ln()),
        KneadingRootStatus::NoRootInDisk => Some(0.0),
        KneadingRootStatus::Unstable => {
            diagnostics.push("kneading root unstable under truncation; h_kneading inconclusive".into());
            None
        }
    };
    let lap_logs: Vec<f64> = levels.iter().map(|l| (l.laps as f64).ln()).collect();
    let var_logs: Vec<f64> = levels
        .iter()
        .map(|l| if l.variation.is_zero() { f64::NEG_INFINITY } else { series_ring::log_abs(&l.variation) })
        .collect();
    let (h_laps, lap_window) = growth(&lap_logs);
    let (h_variation, _) = if var_logs.iter().all(|v| v.is_finite()) { growth(&var_logs) } else { (0.0, lap_window) };
    let fix_logs: Vec<f64> = counts.graph.iter().map(log_plus).collect();
    let (h_per_neg, fix_window) = growth(&fix_logs);
    let h_hom = f.h_hom();
    let h_max = h_per_neg.max(h_hom);
    let rho = match series_ring::radius_estimate(zeta_mt) {
        Ok(RadiusEstimate::Finite { radius, .. }) => Some(radius),
        Ok(RadiusEstimate::AtLeastOne) => None,
        Err(e) => {
            diagnostics.push(format!("radius of ζ^MT not estimated: {e}"));
            None
        }
    };
    let h_zeta = rho.map_or(0.0, |r| -r.ln());
    let reference = h_kneading.unwrap_or(h_laps);
    let max_formula_holds = (h_max - reference).abs() <= cfg.fit_tolerance;
    let laps_agree = (h_laps - reference).abs() <= cfg.fit_tolerance;
    let per_neg_below_laps = h_per_neg <= h_laps + cfg.fit_tolerance;
    let hom_below_laps = h_hom <= h_laps + cfg.fit_tolerance;
    if !max_formula_holds {
        diagnostics.push(format!("max(h_per_neg, h_hom) = {h_max:.6} differs from {reference:.6}"));
    }
    if !laps_agree {
        diagnostics.push(format!("h_laps = {h_laps:.6} differs from {reference:.6}"));
    }
    Ok(EntropyReport {
        h_kneading,
        kneading_status: status,
        root_modulus: modulus,
        root_degree,
        h_laps,
        h_variation,
        h_per_neg,
        h_hom,
        h_max,
        h_zeta,
        rho,
        lap_window,
        fix_window,
        root_tolerance: cfg.root_tolerance,
        fit_tolerance: cfg.fit_tolerance,
        max_formula_holds,
        laps_agree,
        per_neg_below_laps,
        hom_below_laps,
        diagnostics,
    })
}

/// Count decomposition at every `n ≤ n_max`: the direct count on `F^n`
/// against `#Fix⁻(F^n) + #P∩Fix⁻(f^n)`, and the fixed glued points of `F^n`
/// against `#P∩Fix(f^n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub n_max: usize,
    pub direct_fix_neg: Vec<usize>,
    pub direct_p_fix: Vec<usize>,
    pub holds: bool,
    pub first_failure: Option<usize>,
}

pub fn check_decomposition(
    f: &InducedMap,
    counts: &FixCounts,
    n_max: usize,
    budget: usize,
) -> Result<DecompositionReport, SpectraError> {
    let n_max = n_max.min(counts.lap_horizon);
    let mut direct_fix_neg = Vec::with_capacity(n_max);
    let mut direct_p_fix = Vec::with_capacity(n_max);
    let mut first_failure = None;
    for n in 1..=n_max {
        let (neg, fixed) = fix_neg_direct(f, n, budget)?;
        let ok = BigInt::from(neg) == counts.graph[n - 1] && fixed == counts.p_fix[n - 1];
        if !ok && first_failure.is_none() {
            first_failure = Some(n);
        }
        direct_fix_neg.push(neg);
        direct_p_fix.push(fixed);
    }
    Ok(DecompositionReport { n_max, direct_fix_neg, direct_p_fix, holds: first_failure.is_none(), first_failure })
}

/// The pairs `(α₀, α₁)`, `(F_{#0}, F_{#1})` and `(β₀, β₁)` whose determinants
/// factor `L(z)`.
///
/// `α` has zero base and acts as `f_{*1}` on cycles written as chains of
/// interval endpoints. `β₀` sends a point of `G` to its image unless it lies
/// in `π(C_F)`; its extension adds back `f` on `π(C_F)` and subtracts one
/// representative point per component so that `S_0(G)` lands in `S_1(G)`.
pub struct FactorizationPairs {
    pub alpha: FiniteRankPair,
    pub lift: FiniteRankPair,
    pub beta: FiniteRankPair,
}

pub fn factorization_pairs(f: &InducedMap) -> FactorizationPairs {
    let graph = f.graph();
    let intervals = f.map().domain().intervals().to_vec();
    let basis = graph.cycle_basis();
    let as_chain = |coeffs: &[Rational]| {
        let mut v = FormalVector::zero();
        for (c, (a, b)) in coeffs.iter().zip(&intervals) {
            v.add_term(b.clone(), c.clone());
            v.add_term(a.clone(), -c.clone());
        }
        v
    };
    let cycles: Vec<FormalVector> = basis
        .cycles
        .iter()
        .map(|c| as_chain(&c.iter().map(|x| Rational::from_integer(x.clone())).collect::<Vec<_>>()))
        .collect();
    let h1 = f.h1_matrix();
    let alpha = FiniteRankPair::with_zero_base(
        (0..basis.len())
            .map(|j| {
                let mut image = FormalVector::zero();
                for (i, cycle) in cycles.iter().enumerate() {
                    image.add_scaled(cycle, h1.get(i, j));
                }
                RankOneTerm::new(Form::point(intervals[basis.pivots[j]].1.clone(), Rational::one()), image)
            })
            .collect(),
    );

    let critical: BTreeSet<Rational> = f.map().critical().iter().map(|c| graph.canonical(c)).collect();
    let mut terms: Vec<RankOneTerm> = critical
        .iter()
        .map(|q| RankOneTerm::new(Form::point(q.clone(), Rational::one()), FormalVector::point(f.point_image(q))))
        .collect();
    for k in 0..graph.component_count() {
        let mut indicator = Form::zero();
        for (i, (a, b)) in intervals.iter().enumerate() {
            if graph.edge_component(i) == k {
                indicator = indicator.plus(Form::step(a.clone(), true, b.clone(), true, Rational::one()));
            }
        }
        let target = f.component_map()[k];
        let rep = (0..intervals.len()).find(|&i| graph.edge_component(i) == target).expect("component has an edge");
        let r = graph.canonical(&intervals[rep].0);
        terms.push(RankOneTerm::new(indicator, FormalVector::term(r, -Rational::one())));
    }
    let fi = f.clone();
    let beta = FiniteRankPair::new(
        Arc::new(
            move |x: &Rational| {
                if critical.contains(x) {
                    None
                } else {
                    Some((fi.point_image(x), Rational::one()))
                }
            },
        ),
        terms,
    );
    FactorizationPairs { alpha, lift: kneading::kneading_pair(f.map(), false), beta }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorizationReport {
    pub degree: usize,
    /// `D_F = D_α · D_β`.
    pub multiplicative: MultiplicativityReport,
    /// `D_α = det(Id − z·f_{*1})`.
    pub alpha_matches_homology: bool,
    /// `D_β · det(Id − z·f_{*0}) = exp Σ −#P∩Fix(f^n)/n zⁿ`.
    pub beta_matches_periodic: bool,
    pub holds: bool,
}

pub fn check_factorization(f: &InducedMap, degree: usize) -> FactorizationReport {
    let pairs = factorization_pairs(f);
    let (da, dl, db) =
        (pairs.alpha.determinant(degree), pairs.lift.determinant(degree), pairs.beta.determinant(degree));
    let multiplicative = compare_product(&dl, &da, &db);
    let alpha_matches_homology = da == poly_series(&f.h1_matrix().det_id_minus_z(), degree);
    let corr = glued_point_corrections(f, degree);
    let w: Vec<Rational> = corr.fix.iter().map(|&c| -rational::int(c as i64)).collect();
    let beta_matches_periodic =
        &db * &poly_series(&f.h0_matrix().det_id_minus_z(), degree) == TruncatedSeries::exp_of_weighted(&w, degree);
    FactorizationReport {
        degree,
        holds: multiplicative.holds && alpha_matches_homology && beta_matches_periodic,
        multiplicative,
        alpha_matches_homology,
        beta_matches_periodic,
    }
}
