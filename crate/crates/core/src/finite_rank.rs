//! Pairs of endomorphisms that differ by a finite-rank operator.
//!
//! A [`FiniteRankPair`] is given by a base action `φ̄₀` on points (each point
//! goes to a weighted point, or is annihilated) and a finite list of
//! rank-one corrections `ω_i ⊗ v_i` with `φ̄₁ = φ̄₀ + Σ ω_i ⊗ v_i`. Its
//! determinant is `det(Id − z·M(z))` where
//! `M_ij(z) = Σ_{n≥0} ω_i(φ̄₀ⁿ(v_j)) zⁿ`, and its traces `tr(φ₀ⁿ, φ₁ⁿ)` are
//! read off the logarithmic derivative of that determinant.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::chain::FormalVector;
use crate::rational::{self, Rational};
use crate::series_ring::{self, RadiusEstimate, SeriesError, SeriesMatrix, TruncatedSeries};

/// One piece of a form: an interval with chosen end types, on which the form
/// takes the value `slope·x + offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormPiece {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
    pub slope: Rational,
    pub offset: Rational,
}

impl FormPiece {
    fn contains(&self, x: &Rational) -> bool {
        let above = if self.lo_closed { *x >= self.lo } else { *x > self.lo };
        let below = if self.hi_closed { *x <= self.hi } else { *x < self.hi };
        above && below
    }
}

/// A linear form on formal vectors, given by a piecewise-affine function
/// with finitely many pieces. Step functions are the pieces with zero slope.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Form {
    pieces: Vec<FormPiece>,
}

impl Form {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `value` on the interval from `lo` to `hi` with the given end types.
    pub fn step(lo: Rational, lo_closed: bool, hi: Rational, hi_closed: bool, value: Rational) -> Self {
        let mut f = Self::zero();
        if !value.is_zero() {
            f.pieces.push(FormPiece { lo, hi, lo_closed, hi_closed, slope: Rational::zero(), offset: value });
        }
        f
    }

    /// Indicator of a single point.
    pub fn point(p: Rational, value: Rational) -> Self {
        Self::step(p.clone(), true, p, true, value)
    }

    /// `x ↦ x` on each listed closed interval; on 1-chains this is the signed
    /// length `ξ(y − x) = y − x`.
    pub fn position(intervals: &[(Rational, Rational)]) -> Self {
        Self {
            pieces: intervals
                .iter()
                .map(|(a, b)| FormPiece {
                    lo: a.clone(),
                    hi: b.clone(),
                    lo_closed: true,
                    hi_closed: true,
                    slope: Rational::one(),
                    offset: Rational::zero(),
                })
                .collect(),
        }
    }

    pub fn plus(mut self, other: Form) -> Self {
        self.pieces.extend(other.pieces);
        self
    }

    pub fn pieces(&self) -> &[FormPiece] {
        &self.pieces
    }

    pub fn is_step_function(&self) -> bool {
        self.pieces.iter().all(|p| p.slope.is_zero())
    }

    pub fn eval_point(&self, x: &Rational) -> Rational {
        self.pieces.iter().filter(|p| p.contains(x)).fold(Rational::zero(), |acc, p| acc + &p.slope * x + &p.offset)
    }

    pub fn eval(&self, v: &FormalVector) -> Rational {
        v.iter().fold(Rational::zero(), |acc, (x, c)| acc + c * self.eval_point(x))
    }
}

/// `ω ⊗ v`, the operator `x ↦ ω(x)·v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOneTerm {
    pub form: Form,
    pub vector: FormalVector,
}

impl RankOneTerm {
    pub fn new(form: Form, vector: FormalVector) -> Self {
        Self { form, vector }
    }
}

/// Image of a point under the base action: weighted point or annihilation.
pub type PointAction = dyn Fn(&Rational) -> Option<(Rational, Rational)> + Send + Sync;

#[derive(Clone)]
pub struct FiniteRankPair {
    base: Arc<PointAction>,
    corrections: Vec<RankOneTerm>,
}

impl fmt::Debug for FiniteRankPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteRankPair").field("corrections", &self.corrections).finish_non_exhaustive()
    }
}

impl FiniteRankPair {
    pub fn new(base: Arc<PointAction>, corrections: Vec<RankOneTerm>) -> Self {
        Self { base, corrections }
    }

    /// Pair whose base action is the zero map.
    pub fn with_zero_base(corrections: Vec<RankOneTerm>) -> Self {
        Self::new(Arc::new(|_| None), corrections)
    }

    pub fn corrections(&self) -> &[RankOneTerm] {
        &self.corrections
    }

    pub fn rank(&self) -> usize {
        self.corrections.len()
    }

    /// The same base action with one more correction term.
    pub fn with_correction(&self, term: RankOneTerm) -> Self {
        let mut out = self.clone();
        out.corrections.push(term);
        out
    }

    /// `φ̄₀(v)`.
    pub fn apply_base(&self, v: &FormalVector) -> FormalVector {
        let mut out = FormalVector::zero();
        for (x, c) in v.iter() {
            if let Some((y, w)) = (self.base)(x) {
                out.add_term(y, c * w);
            }
        }
        out
    }

    /// `φ̄₁(v) = φ̄₀(v) + Σ ω_i(v)·v_i`.
    pub fn apply_extension(&self, v: &FormalVector) -> FormalVector {
        let mut out = self.apply_base(v);
        for t in &self.corrections {
            let w = t.form.eval(v);
            out.add_scaled(&t.vector, &w);
        }
        out
    }

    /// The matrix `M(z)` truncated at `degree`.
    pub fn matrix(&self, degree: usize) -> SeriesMatrix {
        let k = self.corrections.len();
        let mut m = SeriesMatrix::zeros(k, degree);
        for j in 0..k {
            let mut cols: Vec<Vec<Rational>> = vec![vec![Rational::zero(); degree + 1]; k];
            let mut w = self.corrections[j].vector.clone();
            for n in 0..=degree {
                if w.is_zero() {
                    break;
                }
                for (i, col) in cols.iter_mut().enumerate() {
                    col[n] = self.corrections[i].form.eval(&w);
                }
                if n < degree {
                    w = self.apply_base(&w);
                }
            }
            for (i, col) in cols.into_iter().enumerate() {
                m.set(i, j, TruncatedSeries::new(col, degree));
            }
        }
        m
    }

    /// `D(z) = det(Id − z·M(z))`, constant term 1.
    pub fn determinant(&self, degree: usize) -> TruncatedSeries {
        self.matrix(degree).det_id_minus_z()
    }

    /// `tr(φ₀ⁿ, φ₁ⁿ)` for `n = 1..=n_max`, from `−z·D′/D` at the given degree.
    pub fn traces(&self, n_max: usize, degree: usize) -> Result<Vec<Rational>, SeriesError> {
        if n_max > degree {
            return Err(SeriesError::DegreeTooSmall { need: n_max, have: degree });
        }
        let mut t = self.determinant(degree).log_derivative_traces()?;
        t.truncate(n_max);
        Ok(t)
    }
}

/// Pair-matrix entry helper kept public for reports: `ω(φ̄₀ⁿ v)` for n ≤ N.
pub fn form_along_base_orbit(pair: &FiniteRankPair, form: &Form, v: &FormalVector, degree: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(degree + 1);
    let mut w = v.clone();
    for _ in 0..=degree {
        out.push(form.eval(&w));
        w = pair.apply_base(&w);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicativityReport {
    pub degree: usize,
    pub holds: bool,
    pub first_failing_degree: Option<usize>,
}

/// Compares `D_v` against `D_u · D_w` coefficient-wise.
pub fn compare_product(dv: &TruncatedSeries, du: &TruncatedSeries, dw: &TruncatedSeries) -> MultiplicativityReport {
    let product = du * dw;
    let first = dv.first_difference(&product);
    MultiplicativityReport {
        degree: dv.degree().min(product.degree()),
        holds: first.is_none(),
        first_failing_degree: first,
    }
}

/// Determinant identity for a short exact sequence of pairs
/// `0 → U → V → W → 0`: `D_V = D_U · D_W`.
pub fn check_multiplicativity(
    pu: &FiniteRankPair,
    pv: &FiniteRankPair,
    pw: &FiniteRankPair,
    degree: usize,
) -> MultiplicativityReport {
    compare_product(&pv.determinant(degree), &pu.determinant(degree), &pw.determinant(degree))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbedRootReport {
    pub degree: usize,
    /// `ξ(φ̄₁ⁿ v)` for `n = 0..degree`.
    pub orbit_values: Vec<String>,
    /// `D_{(φ₀, φ₁ + ξ⊗v)} = g · D_{(φ₀, φ₁)}` with `g = 1 − Σ ξ(φ̄₁ⁿ v) z^{n+1}`.
    pub ratio_identity_holds: bool,
    /// `1 / limsup |ξ(φ̄₁ⁿ v)|^{1/n}` when the values grow exponentially.
    pub predicted_modulus: Option<f64>,
    pub root_modulus: Option<f64>,
    /// Whether the smallest root of `D` lies within the predicted modulus
    /// (vacuous when no growth forces a root).
    pub bound_holds: bool,
    pub root_forced: bool,
}

/// Checks the root-localisation argument for a rank-one perturbation of the
/// pair by `ξ ⊗ v`.
pub fn perturbed_root_bound(
    pair: &FiniteRankPair,
    xi: &Form,
    v: &FormalVector,
    degree: usize,
    tolerance: f64,
) -> Result<PerturbedRootReport, SeriesError> {
    if degree < 9 {
        return Err(SeriesError::DegreeTooSmall { need: 9, have: degree });
    }
    let mut values = Vec::with_capacity(degree);
    let mut w = v.clone();
    for _ in 0..degree {
        values.push(xi.eval(&w));
        w = pair.apply_extension(&w);
    }
    let mut g = vec![Rational::one()];
    g.extend(values.iter().map(|a| -a.clone()));
    let g = TruncatedSeries::new(g, degree);
    let d_old = pair.determinant(degree);
    let d_new = pair.with_correction(RankOneTerm::new(xi.clone(), v.clone())).determinant(degree);
    let ratio_identity_holds = d_new.first_difference(&(&g * &d_old)).is_none();

    let growth = TruncatedSeries::new(values.clone(), degree - 1);
    let predicted = match series_ring::radius_estimate(&growth)? {
        RadiusEstimate::AtLeastOne => None,
        RadiusEstimate::Finite { radius, .. } => Some(radius),
    };
    let root = series_ring::smallest_root_in_disk(&d_old, 1.0, tolerance)?;
    let root_modulus = root.as_ref().map(|r| r.root.modulus());
    let bound_holds = match (predicted, root_modulus) {
        (None, _) => true,
        (Some(p), Some(r)) => r <= p + tolerance,
        (Some(_), None) => false,
    };
    Ok(PerturbedRootReport {
        degree,
        orbit_values: values.iter().map(ToString::to_string).collect(),
        ratio_identity_holds,
        predicted_modulus: predicted,
        root_modulus,
        bound_holds,
        root_forced: predicted.is_some(),
    })
}

/// Randomised self-test of the pair machinery against dense linear algebra.
pub mod selftest {
    use super::*;
    use crate::linalg::QMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    /// A pair whose base action and corrections live on a finite point set.
    #[derive(Debug, Clone)]
    pub struct FinitePair {
        pub pair: FiniteRankPair,
        pub support: Vec<Rational>,
        pub base_table: BTreeMap<Rational, Option<(Rational, Rational)>>,
    }

    impl FinitePair {
        fn index(&self, x: &Rational) -> usize {
            self.support.binary_search(x).expect("point in support")
        }

        /// Dense matrices of `φ̄₀` and `φ̄₁` on the span of the support.
        pub fn dense(&self) -> (QMatrix, QMatrix) {
            let s = self.support.len();
            let mut b0 = QMatrix::zeros(s, s);
            for (x, img) in &self.base_table {
                if let Some((y, w)) = img {
                    let (i, j) = (self.index(y), self.index(x));
                    let v = b0.get(i, j) + w;
                    b0.set(i, j, v);
                }
            }
            let mut b1 = b0.clone();
            for t in self.pair.corrections() {
                for (j, x) in self.support.iter().enumerate() {
                    let w = t.form.eval_point(x);
                    if w.is_zero() {
                        continue;
                    }
                    for (y, c) in t.vector.iter() {
                        let i = self.index(y);
                        let v = b1.get(i, j) + c * &w;
                        b1.set(i, j, v);
                    }
                }
            }
            (b0, b1)
        }

        /// `tr(φ̄₁ⁿ − φ̄₀ⁿ)` for `n = 1..=n_max` by explicit matrix powers.
        pub fn dense_traces(&self, n_max: usize) -> Vec<Rational> {
            let (b0, b1) = self.dense();
            let t0 = b0.power_traces(n_max);
            let t1 = b1.power_traces(n_max);
            t1.into_iter().zip(t0).map(|(a, b)| a - b).collect()
        }
    }

    fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
        const CHOICES: [(i64, i64); 7] = [(1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2), (3, 1)];
        let (n, d) = CHOICES[rng.random_range(0..CHOICES.len())];
        rational::ratio(n, d)
    }

    /// Random pair on the points `{0, 1, …, s−1}`.
    pub fn random_pair(rng: &mut ChaCha8Rng) -> FinitePair {
        let s: i64 = rng.random_range(2..=6);
        let support: Vec<Rational> = (0..s).map(rational::int).collect();
        let mut base_table = BTreeMap::new();
        for x in &support {
            let img = if rng.random_bool(0.25) {
                None
            } else {
                let y = rational::int(rng.random_range(0..s));
                let w = if rng.random_bool(0.8) {
                    rational::int(if rng.random_bool(0.5) { 1 } else { -1 })
                } else {
                    small_rational(rng)
                };
                Some((y, w))
            };
            base_table.insert(x.clone(), img);
        }
        let k = rng.random_range(1..=3);
        let mut corrections = Vec::with_capacity(k);
        for _ in 0..k {
            let mut form = Form::zero();
            for _ in 0..rng.random_range(1..=2) {
                let a = rng.random_range(0..s);
                let b = rng.random_range(a..s);
                form = form.plus(Form::step(
                    rational::int(a),
                    rng.random_bool(0.5),
                    rational::int(b),
                    rng.random_bool(0.5),
                    small_rational(rng),
                ));
            }
            let mut vector = FormalVector::zero();
            for _ in 0..rng.random_range(1..=2) {
                vector.add_term(rational::int(rng.random_range(0..s)), small_rational(rng));
            }
            corrections.push(RankOneTerm::new(form, vector));
        }
        let table = base_table.clone();
        let base: Arc<PointAction> = Arc::new(move |x: &Rational| table.get(x).cloned().flatten());
        FinitePair { pair: FiniteRankPair::new(base, corrections), support, base_table }
    }

    #[derive(Debug, Clone, Serialize)]
    pub struct SelfTestCase {
        pub index: usize,
        pub support_size: usize,
        pub rank: usize,
        pub traces_match: bool,
        pub duality_holds: bool,
        pub first_trace_mismatch: Option<usize>,
    }

    #[derive(Debug, Clone, Serialize)]
    pub struct SelfTestReport {
        pub seed: u64,
        pub cases: Vec<SelfTestCase>,
        pub trace_horizon: usize,
        pub duality_degree: usize,
        pub passed: bool,
    }

    /// Runs `count` random pairs: traces against dense matrix powers for
    /// `n ≤ trace_horizon`, and `exp(−Σ trₙ zⁿ/n) = det(Id − zM)` to
    /// `duality_degree` with traces taken from the dense route.
    pub fn run(seed: u64, count: usize, trace_horizon: usize, duality_degree: usize) -> SelfTestReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cases = Vec::with_capacity(count);
        for index in 0..count {
            let fp = random_pair(&mut rng);
            let traces = fp
                .pair
                .traces(trace_horizon, duality_degree.max(trace_horizon))
                .expect("determinant has constant term 1");
            let dense = fp.dense_traces(duality_degree.max(trace_horizon));
            let first_trace_mismatch = (0..trace_horizon).find(|&n| traces[n] != dense[n]);
            let neg: Vec<Rational> = dense.iter().take(duality_degree).map(|t| -t.clone()).collect();
            let from_traces = TruncatedSeries::exp_of_weighted(&neg, duality_degree);
            let duality_holds = from_traces == fp.pair.determinant(duality_degree);
            cases.push(SelfTestCase {
                index,
                support_size: fp.support.len(),
                rank: fp.pair.rank(),
                traces_match: first_trace_mismatch.is_none(),
                duality_holds,
                first_trace_mismatch: first_trace_mismatch.map(|n| n + 1),
            });
        }
        let passed = cases.iter().all(|c| c.traces_match && c.duality_holds);
        SelfTestReport { seed, cases, trace_horizon, duality_degree, passed }
    }
}
