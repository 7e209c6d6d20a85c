//! Truncated power series over the rationals and matrices of them.
//!
//! A [`TruncatedSeries`] of degree `N` knows its coefficients `c_0..=c_N`
//! exactly; anything beyond `z^N` is unknown. Binary operations return the
//! smaller of the two operand degrees, so a result never claims more
//! precision than its inputs had.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{self, Rational};
use crate::roots::{self, Root};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series has no multiplicative inverse: constant term is zero")]
    NonUnitConstantTerm,
    #[error("constant term must be {expected}, found {found}")]
    WrongConstantTerm { expected: String, found: String },
    #[error("degree {have} is too small (need at least {need})")]
    DegreeTooSmall { need: usize, have: usize },
    #[error("smallest root is unstable under truncation: |z| = {full} at degree {degree}, {half} at half degree")]
    UnstableRoot { degree: usize, full: String, half: String },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    /// Builds a series of the given degree, padding with zeros or dropping
    /// coefficients past `z^degree`.
    pub fn new(mut coeffs: Vec<Rational>, degree: usize) -> Self {
        coeffs.resize(degree + 1, Rational::zero());
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64], degree: usize) -> Self {
        Self::new(coeffs.iter().map(|&c| rational::int(c)).collect(), degree)
    }

    pub fn zero(degree: usize) -> Self {
        Self::new(Vec::new(), degree)
    }

    pub fn one(degree: usize) -> Self {
        Self::constant(Rational::one(), degree)
    }

    pub fn constant(c: Rational, degree: usize) -> Self {
        Self::new(vec![c], degree)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: Rational) {
        self.coeffs[k] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Drops precision down to `degree` (never extends).
    pub fn truncate(&self, degree: usize) -> Self {
        let d = degree.min(self.degree());
        Self { coeffs: self.coeffs[..=d].to_vec() }
    }

    /// Coefficients with trailing zeros removed: the polynomial this
    /// truncation represents.
    pub fn polynomial(&self) -> Vec<Rational> {
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        c
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// `z·self`, keeping the degree.
    pub fn shift(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(Rational::zero());
        coeffs.extend(self.coeffs[..self.degree()].iter().cloned());
        Self { coeffs }
    }

    /// Formal derivative; known to degree `N − 1`.
    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::zero(0);
        }
        let coeffs = (1..=self.degree()).map(|k| &self.coeffs[k] * rational::int(k as i64)).collect();
        Self { coeffs }
    }

    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(SeriesError::NonUnitConstantTerm);
        }
        let inv0 = c0.recip();
        let n = self.degree();
        let mut out = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for k in 1..=n {
            let mut acc = Rational::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc += &self.coeffs[j] * &out[k - j];
                }
            }
            out.push(-(acc * &inv0));
        }
        Ok(Self { coeffs: out })
    }

    /// `exp(self)` for a series without constant term, via
    /// `n·b_n = Σ_{k=1..n} k·a_k·b_{n−k}`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::WrongConstantTerm { expected: "0".into(), found: self.coeffs[0].to_string() });
        }
        let n = self.degree();
        let mut b = Vec::with_capacity(n + 1);
        b.push(Rational::one());
        for m in 1..=n {
            let mut acc = Rational::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * rational::int(k as i64) * &b[m - k];
                }
            }
            b.push(acc / rational::int(m as i64));
        }
        Ok(Self { coeffs: b })
    }

    /// `log(self)` for a series with constant term 1.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::WrongConstantTerm { expected: "1".into(), found: self.coeffs[0].to_string() });
        }
        let n = self.degree();
        let mut a = Vec::with_capacity(n + 1);
        a.push(Rational::zero());
        for m in 1..=n {
            let mut acc = Rational::zero();
            for k in 1..m {
                if !a[k].is_zero() && !self.coeffs[m - k].is_zero() {
                    acc += rational::int(k as i64) * &a[k] * &self.coeffs[m - k];
                }
            }
            a.push(&self.coeffs[m] - acc / rational::int(m as i64));
        }
        Ok(Self { coeffs: a })
    }

    /// `exp(Σ_{n≥1} w_n z^n / n)` from the weights `w_1..=w_N`.
    pub fn exp_of_weighted(weights: &[Rational], degree: usize) -> Self {
        let mut a = vec![Rational::zero(); degree + 1];
        for (k, w) in weights.iter().enumerate().take(degree) {
            a[k + 1] = w / rational::int(k as i64 + 1);
        }
        Self { coeffs: a }.exp().expect("constant term is zero by construction")
    }

    /// Traces `t_1..=t_N` for a determinant-like series `D = exp(−Σ t_n zⁿ/n)`,
    /// read off `−z·D′/D`.
    pub fn log_derivative_traces(&self) -> Result<Vec<Rational>, SeriesError> {
        let n = self.degree();
        if n == 0 {
            return Ok(Vec::new());
        }
        let inv = self.inverse()?;
        let zd = {
            let d = self.derivative();
            let mut c = vec![Rational::zero()];
            c.extend(d.coeffs);
            Self::new(c, n)
        };
        let q = &zd * &inv;
        Ok((1..=n).map(|k| -q.coeffs[k].clone()).collect())
    }

    /// First degree at which two series disagree, comparing up to the
    /// smaller degree.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        let d = self.degree().min(other.degree());
        (0..=d).find(|&k| self.coeffs[k] != other.coeffs[k])
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(ToString::to_string).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational::to_f64).collect()
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.degree() + 1)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let d = self.degree().min(rhs.degree());
        let coeffs = (0..=d).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect();
        TruncatedSeries { coeffs }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let d = self.degree().min(rhs.degree());
        let coeffs = (0..=d).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect();
        TruncatedSeries { coeffs }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let d = self.degree().min(rhs.degree());
        let mut coeffs = vec![Rational::zero(); d + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(d + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(d + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        TruncatedSeries { coeffs }
    }
}

/// A square matrix of series sharing one truncation degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesMatrix {
    size: usize,
    degree: usize,
    entries: Vec<TruncatedSeries>,
}

impl SeriesMatrix {
    pub fn zeros(size: usize, degree: usize) -> Self {
        Self { size, degree, entries: vec![TruncatedSeries::zero(degree); size * size] }
    }

    pub fn from_constants(rows: &[Vec<Rational>], degree: usize) -> Self {
        let size = rows.len();
        let mut m = Self::zeros(size, degree);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), size, "matrix must be square");
            for (j, c) in row.iter().enumerate() {
                m.set(i, j, TruncatedSeries::constant(c.clone(), degree));
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: TruncatedSeries) {
        assert_eq!(s.degree(), self.degree, "entry degree must match the matrix");
        self.entries[i * self.size + j] = s;
    }

    pub fn entries(&self) -> impl Iterator<Item = &TruncatedSeries> {
        self.entries.iter()
    }

    fn column_is_zero(&self, j: usize) -> bool {
        (0..self.size).all(|i| self.get(i, j).is_zero())
    }

    /// `Id − z·M(z)` restricted to the columns of `M` that are not
    /// identically zero (the remaining columns of `Id − zM` are unit vectors
    /// and contribute a factor 1).
    fn reduced_id_minus_z(&self) -> Vec<Vec<TruncatedSeries>> {
        let support: Vec<usize> = (0..self.size).filter(|&j| !self.column_is_zero(j)).collect();
        support
            .iter()
            .map(|&i| {
                support
                    .iter()
                    .map(|&j| {
                        let mut e = -&self.get(i, j).shift();
                        if i == j {
                            e.coeffs[0] += Rational::one();
                        }
                        e
                    })
                    .collect()
            })
            .collect()
    }

    /// `det(Id − z·M(z))` by Gaussian elimination over the series ring.
    /// Every pivot is `1 + O(z)`, hence a unit.
    pub fn det_id_minus_z(&self) -> TruncatedSeries {
        let mut a = self.reduced_id_minus_z();
        let p = a.len();
        let mut det = TruncatedSeries::one(self.degree);
        for k in 0..p {
            let pivot = a[k][k].clone();
            let inv = pivot.inverse().expect("diagonal of Id − zM stays 1 + O(z) under elimination");
            det = &det * &pivot;
            for i in (k + 1)..p {
                if a[i][k].is_zero() {
                    continue;
                }
                let factor = &a[i][k] * &inv;
                for j in (k + 1)..p {
                    if a[k][j].is_zero() {
                        continue;
                    }
                    let delta = &factor * &a[k][j];
                    a[i][j] = &a[i][j] - &delta;
                }
            }
        }
        det
    }

    /// `det(Id − z·M(z))` by Laplace expansion along the first row. Only
    /// sensible for small matrices; kept as an independent route.
    pub fn det_id_minus_z_cofactor(&self) -> TruncatedSeries {
        let a = self.reduced_id_minus_z();
        laplace(&a, self.degree)
    }
}

fn laplace(a: &[Vec<TruncatedSeries>], degree: usize) -> TruncatedSeries {
    let n = a.len();
    if n == 0 {
        return TruncatedSeries::one(degree);
    }
    if n == 1 {
        return a[0][0].clone();
    }
    let mut total = TruncatedSeries::zero(degree);
    for j in 0..n {
        if a[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<TruncatedSeries>> = a[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, e)| e.clone()).collect())
            .collect();
        let term = &a[0][j] * &laplace(&minor, degree);
        total = if j % 2 == 0 { &total + &term } else { &total - &term };
    }
    total
}

/// Radius-of-convergence estimate from the tail of a truncated series.
#[derive(Debug, Clone, PartialEq)]
pub enum RadiusEstimate {
    /// Coefficients are bounded (or grow subexponentially): radius at least 1.
    AtLeastOne,
    Finite {
        radius: f64,
        band: f64,
    },
}

impl RadiusEstimate {
    pub fn radius(&self) -> Option<f64> {
        match self {
            RadiusEstimate::AtLeastOne => None,
            RadiusEstimate::Finite { radius, .. } => Some(*radius),
        }
    }
}

/// Least-squares fit of `log|c_n| ≈ α + β·n + κ·log n` over a window; returns β.
fn tail_growth(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 4 {
        return None;
    }
    // normal equations for the basis (1, n, ln n)
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for &(n, y) in points {
        let row = [1.0, n, n.ln()];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * y;
        }
    }
    let m = nalgebra::Matrix3::from_fn(|i, j| ata[i][j]);
    let b = nalgebra::Vector3::from_fn(|i, _| atb[i]);
    m.lu().solve(&b).map(|x| x[1])
}

/// Fitted growth rates below this are treated as subexponential: over a
/// window of 64 coefficients they change magnitudes by less than 14%.
pub const SUBEXPONENTIAL_RATE: f64 = 2e-3;

/// Estimates `1 / limsup |c_n|^{1/n}` from the coefficients in the upper
/// half of the truncation window.
pub fn radius_estimate(s: &TruncatedSeries) -> Result<RadiusEstimate, SeriesError> {
    let n = s.degree();
    if n < 8 {
        return Err(SeriesError::DegreeTooSmall { need: 8, have: n });
    }
    let lo = n / 2;
    let points: Vec<(f64, f64)> =
        (lo..=n).filter(|&k| !s.coeff(k).is_zero()).map(|k| (k as f64, log_abs(s.coeff(k)))).collect();
    let Some(beta) = tail_growth(&points) else {
        return Ok(RadiusEstimate::AtLeastOne);
    };
    let mid = lo + (n - lo) / 2;
    let halves: Vec<f64> = [(lo, mid), (mid, n)]
        .iter()
        .filter_map(|&(a, b)| {
            let pts: Vec<_> = points.iter().copied().filter(|p| p.0 >= a as f64 && p.0 <= b as f64).collect();
            tail_growth(&pts)
        })
        .collect();
    let radius = (-beta).exp();
    let band = if halves.len() == 2 { ((-halves[0]).exp() - (-halves[1]).exp()).abs() } else { 0.0 };
    if beta <= SUBEXPONENTIAL_RATE {
        Ok(RadiusEstimate::AtLeastOne)
    } else {
        Ok(RadiusEstimate::Finite { radius, band })
    }
}

/// `ln |x|` for possibly huge rationals.
pub(crate) fn log_abs(x: &Rational) -> f64 {
    let num = x.numer().abs();
    let den = x.denom();
    big_ln(&num) - big_ln(den)
}

fn big_ln(x: &num_bigint::BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return rational::to_f64(&Rational::from_integer(x.clone())).ln();
    }
    let shift = bits - 64;
    let top = x >> shift;
    rational::to_f64(&Rational::from_integer(top)).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Smallest-modulus root of the truncation polynomial inside `|z| < r_max`,
/// cross-checked against the half-degree truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct RootReport {
    pub root: Root,
    pub half_degree_modulus: f64,
    pub degree: usize,
}

pub fn smallest_root_in_disk(
    s: &TruncatedSeries,
    r_max: f64,
    tolerance: f64,
) -> Result<Option<RootReport>, SeriesError> {
    if !s.coeff(0).is_one() {
        return Err(SeriesError::WrongConstantTerm { expected: "1".into(), found: s.coeff(0).to_string() });
    }
    let full = roots::smallest_root(&s.polynomial(), r_max);
    let half = roots::smallest_root(&s.truncate(s.degree() / 2).polynomial(), r_max);
    match (full, half) {
        (None, None) => Ok(None),
        (Some(r), Some(h)) if (r.modulus() - h.modulus()).abs() <= tolerance => {
            Ok(Some(RootReport { half_degree_modulus: h.modulus(), root: r, degree: s.degree() }))
        }
        (r, h) => Err(SeriesError::UnstableRoot {
            degree: s.degree(),
            full: r.map_or("none".into(), |r| format!("{:.12}", r.modulus())),
            half: h.map_or("none".into(), |h| format!("{:.12}", h.modulus())),
        }),
    }
}

/// Checks `|c_n| ≤ bound(n)` on every coefficient; returns the first offender.
pub fn first_coefficient_exceeding(s: &TruncatedSeries, bound: impl Fn(usize) -> f64) -> Option<usize> {
    (0..=s.degree()).find(|&k| rational::to_f64(&s.coeff(k).abs()) > bound(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn geometric_inverse() {
        let s = TruncatedSeries::from_ints(&[1, -1], 5);
        assert_eq!(s.inverse().unwrap(), TruncatedSeries::from_ints(&[1; 6], 5));
        assert_eq!(TruncatedSeries::zero(3).inverse(), Err(SeriesError::NonUnitConstantTerm));
    }

    #[test]
    fn exp_of_log_series_of_geometric() {
        // exp(Σ 2^n/n z^n) = 1/(1 − 2z)
        let weights: Vec<Rational> = (1..=8).map(|n| int(1 << n)).collect();
        let e = TruncatedSeries::exp_of_weighted(&weights, 8);
        let expected = TruncatedSeries::new((0..=8).map(|n| int(1 << n)).collect(), 8);
        assert_eq!(e, expected);
        assert!(TruncatedSeries::one(6).log().unwrap().is_zero());
        assert!(TruncatedSeries::one(6).exp().is_err());
        assert!(TruncatedSeries::from_ints(&[2, 1], 4).log().is_err());
    }

    #[test]
    fn degree_is_the_minimum_of_operands() {
        let a = TruncatedSeries::from_ints(&[1, 1], 10);
        let b = TruncatedSeries::from_ints(&[1, 2], 4);
        assert_eq!((&a * &b).degree(), 4);
        assert_eq!((&a + &b).degree(), 4);
    }

    #[test]
    fn traces_from_log_derivative() {
        let d = TruncatedSeries::from_ints(&[1, -2], 6);
        let t = d.log_derivative_traces().unwrap();
        assert_eq!(t, (1..=6).map(|n| int(1 << n)).collect::<Vec<_>>());
    }

    #[test]
    fn scalar_and_diagonal_determinants() {
        let m = SeriesMatrix::from_constants(&[vec![int(2)]], 6);
        assert_eq!(m.det_id_minus_z(), TruncatedSeries::from_ints(&[1, -2], 6));
        let mut d = SeriesMatrix::zeros(2, 6);
        let a = TruncatedSeries::from_ints(&[1, 1, 1], 6);
        let b = TruncatedSeries::from_ints(&[3, 0, -1], 6);
        d.set(0, 0, a.clone());
        d.set(1, 1, b.clone());
        let one = TruncatedSeries::one(6);
        let expected = &(&one - &a.shift()) * &(&one - &b.shift());
        assert_eq!(d.det_id_minus_z(), expected);
        assert_eq!(d.det_id_minus_z_cofactor(), expected);
    }

    #[test]
    fn empty_matrix_has_unit_determinant() {
        assert_eq!(SeriesMatrix::zeros(0, 4).det_id_minus_z(), TruncatedSeries::one(4));
        assert_eq!(SeriesMatrix::zeros(3, 4).det_id_minus_z(), TruncatedSeries::one(4));
    }

    #[test]
    fn radius_of_geometric_series() {
        let g = TruncatedSeries::from_ints(&[1, -2], 64).inverse().unwrap();
        let r = radius_estimate(&g).unwrap().radius().unwrap();
        assert!((r - 0.5).abs() < 1e-3);
        let h = &TruncatedSeries::from_ints(&[1, -1], 64) * &g;
        let r = radius_estimate(&h).unwrap().radius().unwrap();
        assert!((r - 0.5).abs() < 1e-3);
        assert_eq!(radius_estimate(&TruncatedSeries::one(64)).unwrap(), RadiusEstimate::AtLeastOne);
        assert!(matches!(radius_estimate(&TruncatedSeries::one(4)), Err(SeriesError::DegreeTooSmall { .. })));
    }

    #[test]
    fn bounded_and_polynomially_growing_series_have_radius_at_least_one() {
        let bounded = TruncatedSeries::new((0..=64).map(|k| int(if k % 3 == 0 { 2 } else { -1 })).collect(), 64);
        assert_eq!(radius_estimate(&bounded).unwrap(), RadiusEstimate::AtLeastOne);
        let linear = TruncatedSeries::new((0..=64).map(|k| int(k + 1)).collect(), 64);
        assert_eq!(radius_estimate(&linear).unwrap(), RadiusEstimate::AtLeastOne);
    }

    #[test]
    fn smallest_roots() {
        let r = smallest_root_in_disk(&TruncatedSeries::from_ints(&[1, -2], 16), 1.0, 1e-6).unwrap().unwrap();
        assert!((r.root.modulus() - 0.5).abs() < 1e-12);
        assert!(smallest_root_in_disk(&TruncatedSeries::one(16), 1.0, 1e-6).unwrap().is_none());
        let r = smallest_root_in_disk(&TruncatedSeries::from_ints(&[1, -1, -1], 16), 1.0, 1e-6).unwrap().unwrap();
        assert!((r.root.modulus() - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-9);
        let bad = TruncatedSeries::from_ints(&[2, 1], 4);
        assert!(smallest_root_in_disk(&bad, 1.0, 1e-6).is_err());
    }

    #[test]
    fn unstable_root_is_flagged() {
        // 1 + 0·z + … + c·z^16: the half truncation is the constant 1
        let mut s = TruncatedSeries::one(16);
        s.set_coeff(16, ratio(-1, 1) * int(1 << 20));
        assert!(matches!(smallest_root_in_disk(&s, 1.0, 1e-6), Err(SeriesError::UnstableRoot { .. })));
    }
}
