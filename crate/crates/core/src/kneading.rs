//! Kneading matrices and determinants of a PM map.
//!
//! Rows and columns are indexed by `(c, side)` for `c ∈ C_F`, in the order
//! `(c₀,−), (c₀,+), (c₁,−), …`. Column `(c, s)` follows the orbit of the
//! one-sided value `v_c^s = F(c s)`, row `(c, s)` evaluates the step form
//! `ω_c^s` along it.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::census::{self, LevelCensus};
use crate::chain::FormalVector;
use crate::finite_rank::{FiniteRankPair, Form, PointAction, RankOneTerm};
use crate::pm_domain::{Lap, MapError, Omega, PMMap, Side};
use crate::rational::{self, Rational};
use crate::series_ring::{self, SeriesError, SeriesMatrix, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KneadingError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("{check} fails at n = {n}: {left} ≠ {right}")]
    IdentityViolated { check: String, n: usize, left: String, right: String },
}

/// `ω_c^−` is 1 on `[c, b_i]`; `ω_c^+` is −1 on `]c, b_i]`; both vanish off
/// the interval `[a_i, b_i]` containing `c`.
pub fn step_form(omega: &Omega, c: &Rational, side: Side) -> Result<Form, MapError> {
    let i = omega.component_of(c).ok_or_else(|| MapError::PointOutsideOmega(c.clone()))?;
    let b = omega.intervals()[i].1.clone();
    Ok(match side {
        Side::Minus => Form::step(c.clone(), true, b, true, Rational::one()),
        Side::Plus => Form::step(c.clone(), false, b, true, -Rational::one()),
    })
}

#[derive(Debug, Clone)]
pub struct KneadingData {
    pub degree: usize,
    pub index: Vec<(Rational, Side)>,
    pub forms: Vec<Form>,
    /// `v_c^s`.
    pub vectors: Vec<FormalVector>,
    /// `ε(c s)·v_c^s`.
    pub signed_vectors: Vec<FormalVector>,
    pub m: SeriesMatrix,
    pub n: SeriesMatrix,
    pub d: TruncatedSeries,
    pub l: TruncatedSeries,
}

impl KneadingData {
    pub fn size(&self) -> usize {
        self.index.len()
    }

    /// Whether every coefficient of every entry of `M` and `N` is −1, 0 or 1.
    pub fn coefficients_in_unit_range(&self) -> bool {
        let unit = |x: &Rational| x.is_zero() || rational::is_one(x) || rational::is_one(&-x.clone());
        self.m.entries().chain(self.n.entries()).all(|s| s.coeffs().iter().all(unit))
    }

    /// First coefficient of `D` or `L` exceeding `2^p·(n+1)^p`, if any.
    pub fn growth_guard_violation(&self) -> Option<usize> {
        let p = self.size() as i32;
        let bound = |n: usize| 2f64.powi(p) * ((n + 1) as f64).powi(p);
        series_ring::first_coefficient_exceeding(&self.d, bound)
            .or_else(|| series_ring::first_coefficient_exceeding(&self.l, bound))
    }
}

fn index_of(map: &PMMap) -> Vec<(Rational, Side)> {
    map.critical().iter().flat_map(|c| [(c.clone(), Side::Minus), (c.clone(), Side::Plus)]).collect()
}

fn forms_of(map: &PMMap, index: &[(Rational, Side)]) -> Vec<Form> {
    index.iter().map(|(c, s)| step_form(map.domain(), c, *s).expect("critical points lie in Ω")).collect()
}

/// Builds `M(z)`, `N(z)`, `D(z) = det(Id − zM)` and `L(z) = det(Id − zN)`
/// truncated at `degree`, from signed orbits of the one-sided critical values.
pub fn kneading_matrices(map: &PMMap, degree: usize) -> Result<KneadingData, MapError> {
    let index = index_of(map);
    let forms = forms_of(map, &index);
    let p = index.len();
    let mut m = SeriesMatrix::zeros(p, degree);
    let mut n = SeriesMatrix::zeros(p, degree);
    let mut vectors = Vec::with_capacity(p);
    let mut signed_vectors = Vec::with_capacity(p);
    for (j, (c, s)) in index.iter().enumerate() {
        let start = map.one_sided(c, *s);
        vectors.push(map.one_sided_value(c, *s)?);
        signed_vectors.push(map.signed_one_sided_value(c, *s)?);
        let Some((y, eps0)) = start else { continue };
        let orbit = map.signed_orbit(Some(&y), degree);
        for (i, form) in forms.iter().enumerate() {
            let mut signed = vec![Rational::zero(); degree + 1];
            let mut plain = vec![Rational::zero(); degree + 1];
            for (k, (x, sign)) in orbit.iter().enumerate() {
                let w = form.eval_point(x);
                if w.is_zero() {
                    continue;
                }
                signed[k] = &w * rational::int((sign * eps0) as i64);
                plain[k] = w;
            }
            m.set(i, j, TruncatedSeries::new(signed, degree));
            n.set(i, j, TruncatedSeries::new(plain, degree));
        }
    }
    let d = m.det_id_minus_z();
    let l = n.det_id_minus_z();
    Ok(KneadingData { degree, index, forms, vectors, signed_vectors, m, n, d, l })
}

/// The pair `(εF_{#0}, εF_{#0} + Σ ω_c^s ⊗ εv_c^s)` (signed) or its unsigned
/// analogue, as a finite-rank pair.
pub fn kneading_pair(map: &PMMap, signed: bool) -> FiniteRankPair {
    let index = index_of(map);
    let forms = forms_of(map, &index);
    let owned = Arc::new(map.clone());
    let base: Arc<PointAction> = Arc::new(move |x: &Rational| {
        if owned.is_critical(x) {
            return None;
        }
        let b = owned.branch_at(x)?;
        let w = if signed { rational::int(b.sign() as i64) } else { Rational::one() };
        Some((b.rule.apply(x), w))
    });
    let corrections = index
        .iter()
        .zip(forms)
        .map(|((c, s), form)| {
            let v = if signed { map.signed_one_sided_value(c, *s) } else { map.one_sided_value(c, *s) }
                .expect("index runs over the critical set");
            RankOneTerm::new(form, v)
        })
        .collect();
    FiniteRankPair::new(base, corrections)
}

/// `σ(I) = ω_c^+(F^n(c+)) + ω_d^−(F^n(d−))` for a lap `I = [c, d]` of `F^n`.
pub fn sigma(omega: &Omega, lap: &Lap) -> i32 {
    let plus = step_form(omega, &lap.left, Side::Plus).expect("lap lies in Ω");
    let minus = step_form(omega, &lap.right, Side::Minus).expect("lap lies in Ω");
    let v = plus.eval_point(&lap.value_at_left()) + minus.eval_point(&lap.value_at_right());
    rational::sign(&v)
}

/// `σ(I)` from the position of the lap's end values relative to the lap.
pub fn sigma_by_crossing(lap: &Lap) -> i32 {
    let (c, d) = (&lap.left, &lap.right);
    let (fc, fd) = (lap.value_at_left(), lap.value_at_right());
    if fc <= *c && *d <= fd {
        1
    } else if *c < fc && fd < *d {
        -1
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRow {
    pub n: usize,
    pub sum_sigma: i64,
    pub sum_eps_sigma: i64,
    #[serde(with = "rational::text")]
    pub trace_l: Rational,
    #[serde(with = "rational::text")]
    pub trace_d: Rational,
    pub fix_neg: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceIdentityReport {
    pub rows: Vec<TraceRow>,
    pub holds: bool,
}

impl TraceIdentityReport {
    pub fn into_result(self) -> Result<Self, KneadingError> {
        match self.rows.iter().find(|r| !r.holds) {
            None => Ok(self),
            Some(r) => Err(KneadingError::IdentityViolated {
                check: "trace identity".into(),
                n: r.n,
                left: format!("Σσ={} Σεσ={} 2#Fix⁻={}", r.sum_sigma, r.sum_eps_sigma, 2 * r.fix_neg),
                right: format!("tr_L={} tr_D={}", r.trace_l, r.trace_d),
            }),
        }
    }
}

/// Compares lap sums of `σ` with the traces read off `L` and `D`, and their
/// difference with twice the number of negative-type fixed points.
pub fn trace_identity_check(map: &PMMap, n_max: usize, budget: usize) -> Result<TraceIdentityReport, KneadingError> {
    let levels = census::census(map, n_max, budget)?;
    let k = kneading_matrices(map, n_max)?;
    Ok(trace_rows(&levels, &k)?)
}

/// The same check from a precomputed census and kneading data.
pub fn trace_rows(levels: &[LevelCensus], k: &KneadingData) -> Result<TraceIdentityReport, SeriesError> {
    let n_max = levels.len().min(k.degree);
    let tr_d = k.d.log_derivative_traces()?;
    let tr_l = k.l.log_derivative_traces()?;
    let rows: Vec<TraceRow> = levels[..n_max]
        .iter()
        .map(|lv| {
            let i = lv.n - 1;
            let holds = tr_l[i] == rational::int(lv.sum_sigma)
                && tr_d[i] == rational::int(lv.sum_eps_sigma)
                && lv.sum_eps_sigma - lv.sum_sigma == 2 * lv.fix_neg as i64;
            TraceRow {
                n: lv.n,
                sum_sigma: lv.sum_sigma,
                sum_eps_sigma: lv.sum_eps_sigma,
                trace_l: tr_l[i].clone(),
                trace_d: tr_d[i].clone(),
                fix_neg: lv.fix_neg,
                holds,
            }
        })
        .collect();
    let holds = rows.iter().all(|r| r.holds);
    Ok(TraceIdentityReport { rows, holds })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesIdentityReport {
    pub degree: usize,
    pub holds: bool,
    pub first_failing_degree: Option<usize>,
    pub left: Vec<String>,
    pub right: Vec<String>,
}

impl SeriesIdentityReport {
    pub fn compare(left: &TruncatedSeries, right: &TruncatedSeries) -> Self {
        let first = left.first_difference(right);
        Self {
            degree: left.degree().min(right.degree()),
            holds: first.is_none(),
            first_failing_degree: first,
            left: left.to_strings(),
            right: right.to_strings(),
        }
    }

    pub fn into_result(self, check: &str) -> Result<Self, KneadingError> {
        match self.first_failing_degree {
            None => Ok(self),
            Some(n) => Err(KneadingError::IdentityViolated {
                check: check.into(),
                n,
                left: self.left[n].clone(),
                right: self.right[n].clone(),
            }),
        }
    }
}

/// `exp Σ 2#Fix⁻(F^n)/n zⁿ = L(z)/D(z)` with lap-counted fixed points.
pub fn lap_zeta_check(map: &PMMap, degree: usize, budget: usize) -> Result<SeriesIdentityReport, KneadingError> {
    let levels = census::census(map, degree, budget)?;
    let k = kneading_matrices(map, degree)?;
    Ok(lap_zeta_from(&levels, &k)?)
}

pub fn lap_zeta_from(levels: &[LevelCensus], k: &KneadingData) -> Result<SeriesIdentityReport, SeriesError> {
    let degree = levels.len().min(k.degree);
    let weights: Vec<Rational> = levels.iter().take(degree).map(|l| rational::int(2 * l.fix_neg as i64)).collect();
    let lhs = TruncatedSeries::exp_of_weighted(&weights, degree);
    let rhs = &k.l.truncate(degree) * &k.d.truncate(degree).inverse()?;
    Ok(SeriesIdentityReport::compare(&lhs, &rhs))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IterateConsistency {
    pub power: usize,
    pub n_max: usize,
    pub holds: bool,
    pub first_failure: Option<usize>,
}

/// Traces of the pairs of `F^k` against the traces of `F`'s pairs at
/// multiples of `k`, for both the signed and unsigned pairs.
pub fn iterate_consistency(
    map: &PMMap,
    power: usize,
    n_max: usize,
    budget: usize,
) -> Result<IterateConsistency, KneadingError> {
    let g = map.iterate(power, budget)?;
    let kf = kneading_matrices(map, power * n_max)?;
    let kg = kneading_matrices(&g, n_max)?;
    let (fd, fl) = (kf.d.log_derivative_traces()?, kf.l.log_derivative_traces()?);
    let (gd, gl) = (kg.d.log_derivative_traces()?, kg.l.log_derivative_traces()?);
    let first_failure = (1..=n_max).find(|&n| gd[n - 1] != fd[power * n - 1] || gl[n - 1] != fl[power * n - 1]);
    Ok(IterateConsistency { power, n_max, holds: first_failure.is_none(), first_failure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pm_domain::{BranchSpec, MapSpec, DEFAULT_LAP_BUDGET};
    use crate::rational::{int, ratio};

    fn pm(critical: &[Rational], branches: &[(Rational, Rational)]) -> PMMap {
        PMMap::validate(MapSpec {
            intervals: vec![(int(0), int(1))],
            critical: critical.to_vec(),
            branches: branches.iter().map(|(s, t)| BranchSpec::new(s.clone(), t.clone())).collect(),
        })
        .unwrap()
    }

    fn halves() -> Vec<Rational> {
        vec![int(0), ratio(1, 2), int(1)]
    }

    fn doubling() -> PMMap {
        pm(&halves(), &[(int(2), int(0)), (int(2), int(-1))])
    }

    fn tent() -> PMMap {
        pm(&halves(), &[(int(2), int(0)), (int(-2), int(2))])
    }

    fn contraction() -> PMMap {
        pm(&[int(0), int(1)], &[(ratio(1, 2), int(0))])
    }

    fn column(m: &SeriesMatrix, j: usize) -> Vec<Rational> {
        (0..m.size()).map(|i| m.get(i, j).coeff(0).clone()).collect()
    }

    #[test]
    fn step_forms() {
        let omega = Omega::new(vec![(int(0), int(1))]).unwrap();
        assert_eq!(step_form(&omega, &int(0), Side::Minus).unwrap().eval_point(&int(1)), int(1));
        assert_eq!(step_form(&omega, &ratio(1, 2), Side::Plus).unwrap().eval_point(&ratio(1, 2)), int(0));
        let w = step_form(&omega, &int(1), Side::Plus).unwrap();
        assert!([int(0), ratio(1, 2), int(1)].iter().all(|x| w.eval_point(x).is_zero()));
        assert!(step_form(&omega, &int(2), Side::Minus).is_err());
    }

    #[test]
    fn doubling_matrices() {
        let k = kneading_matrices(&doubling(), 16).unwrap();
        let e = |v: &[i64]| v.iter().map(|&x| int(x)).collect::<Vec<_>>();
        assert_eq!(column(&k.m, 1), e(&[1, 0, 0, 0, 0, 0]));
        assert_eq!(column(&k.m, 2), e(&[1, -1, 1, -1, 1, 0]));
        assert_eq!(column(&k.m, 3), column(&k.m, 1));
        assert_eq!(column(&k.m, 4), column(&k.m, 2));
        for j in [0, 5] {
            assert!(column(&k.m, j).iter().all(Zero::is_zero));
        }
        let expected = TruncatedSeries::from_ints(&[1, -2], 16);
        assert_eq!(k.d, expected);
        assert_eq!(k.l, expected);
        assert_eq!(k.m.det_id_minus_z_cofactor(), expected);
        assert!(k.coefficients_in_unit_range());
    }

    #[test]
    fn tent_determinants() {
        let k = kneading_matrices(&tent(), 16).unwrap();
        assert_eq!(k.d, TruncatedSeries::from_ints(&[1, -2], 16));
        assert_eq!(k.l, TruncatedSeries::one(16));
    }

    #[test]
    fn contraction_has_infinite_entries_and_no_root() {
        let k = kneading_matrices(&contraction(), 24).unwrap();
        assert_eq!(k.d, k.l);
        assert!(k.m.entries().any(|s| s.coeffs().iter().filter(|c| !c.is_zero()).count() > 20));
        assert!(series_ring::smallest_root_in_disk(&k.d, 1.0, 1e-6).unwrap().is_none());
    }

    #[test]
    fn pair_route_matches_orbit_route() {
        for f in [doubling(), tent(), contraction()] {
            let k = kneading_matrices(&f, 12).unwrap();
            assert_eq!(kneading_pair(&f, true).matrix(12), k.m);
            assert_eq!(kneading_pair(&f, false).matrix(12), k.n);
        }
    }

    #[test]
    fn sigma_values() {
        let t = tent();
        let laps = t.laps(1, 10).unwrap();
        assert_eq!(laps.iter().map(|l| sigma(t.domain(), l)).collect::<Vec<_>>(), vec![1, -1]);
        let d = doubling();
        assert_eq!(sigma(d.domain(), &d.laps(1, 10).unwrap()[0]), 1);
        for n in 1..=5 {
            for l in t.laps(n, DEFAULT_LAP_BUDGET).unwrap() {
                assert_eq!(sigma(t.domain(), &l), sigma_by_crossing(&l));
            }
        }
    }

    #[test]
    fn trace_identities() {
        let r = trace_identity_check(&tent(), 10, DEFAULT_LAP_BUDGET).unwrap();
        assert!(r.holds);
        assert_eq!(r.rows[0].sum_sigma, 0);
        assert_eq!(r.rows[0].sum_eps_sigma, 2);
        assert_eq!(r.rows[2].fix_neg, 4);
        let r = trace_identity_check(&doubling(), 10, DEFAULT_LAP_BUDGET).unwrap();
        assert!(r.holds && r.rows.iter().all(|x| x.fix_neg == 0));
    }

    #[test]
    fn lap_zeta_identity_on_small_maps() {
        for f in [tent(), doubling(), contraction()] {
            assert!(lap_zeta_check(&f, 20, DEFAULT_LAP_BUDGET).unwrap().holds);
        }
    }

    #[test]
    fn iterates_are_consistent() {
        for f in [tent(), doubling(), contraction()] {
            assert!(iterate_consistency(&f, 2, 3, DEFAULT_LAP_BUDGET).unwrap().holds);
        }
    }
}
