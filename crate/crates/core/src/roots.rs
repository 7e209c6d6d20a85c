//! Roots of polynomials with exact rational coefficients.
//!
//! Roots come from the eigenvalues of a companion matrix (floating point),
//! followed by one Newton step evaluated in exact rational arithmetic at the
//! floating-point estimate. The residual `|p(z)|` after the step is kept on
//! the root so callers can judge it.

use nalgebra::{DMatrix, Schur};
use num_traits::Zero;
use serde::Serialize;

use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub re: f64,
    pub im: f64,
    /// `|p(z)|` at the refined root.
    pub residual: f64,
}

impl Root {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

#[derive(Clone, Debug)]
struct ExactComplex {
    re: Rational,
    im: Rational,
}

impl ExactComplex {
    fn from_f64(re: f64, im: f64) -> Option<Self> {
        Some(Self { re: rational::from_f64(re)?, im: rational::from_f64(im)? })
    }

    fn zero() -> Self {
        Self { re: Rational::zero(), im: Rational::zero() }
    }

    fn mul(&self, o: &Self) -> Self {
        Self { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }

    fn add_real(&self, c: &Rational) -> Self {
        Self { re: &self.re + c, im: self.im.clone() }
    }

    fn add(&self, o: &Self) -> Self {
        Self { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn div(&self, o: &Self) -> Self {
        let den = &o.re * &o.re + &o.im * &o.im;
        Self { re: (&self.re * &o.re + &self.im * &o.im) / &den, im: (&self.im * &o.re - &self.re * &o.im) / &den }
    }

    fn abs_f64(&self) -> f64 {
        rational::to_f64(&self.re).hypot(rational::to_f64(&self.im))
    }
}

/// `(p(z), p'(z))` by Horner's scheme, exactly.
fn eval_with_derivative(coeffs: &[Rational], z: &ExactComplex) -> (ExactComplex, ExactComplex) {
    let mut p = ExactComplex::zero();
    let mut dp = ExactComplex::zero();
    for c in coeffs.iter().rev() {
        dp = dp.mul(z).add(&p);
        p = p.mul(z).add_real(c);
    }
    (p, dp)
}

fn residual(coeffs: &[Rational], re: f64, im: f64) -> f64 {
    match ExactComplex::from_f64(re, im) {
        Some(z) => eval_with_derivative(coeffs, &z).0.abs_f64(),
        None => f64::INFINITY,
    }
}

fn newton_refine(coeffs: &[Rational], re: f64, im: f64) -> Root {
    let before = residual(coeffs, re, im);
    let Some(z) = ExactComplex::from_f64(re, im) else {
        return Root { re, im, residual: f64::INFINITY };
    };
    let (p, dp) = eval_with_derivative(coeffs, &z);
    if dp.is_zero() || p.is_zero() {
        return Root { re, im, residual: p.abs_f64() };
    }
    let step = p.div(&dp);
    let nre = re - rational::to_f64(&step.re);
    let nim = im - rational::to_f64(&step.im);
    let after = residual(coeffs, nre, nim);
    if after.is_finite() && after <= before {
        Root { re: nre, im: nim, residual: after }
    } else {
        Root { re, im, residual: before }
    }
}

/// Coefficients of `p(w + σ)` from those of `p`.
fn taylor_shift(p: &[f64], sigma: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    if sigma == 0.0 {
        return q;
    }
    let n = q.len();
    for i in 0..n {
        for k in (i..n - 1).rev() {
            q[k] += sigma * q[k + 1];
        }
    }
    q
}

/// Unrefined eigenvalue roots of `Σ c_k z^k`.
fn raw_roots(coeffs: &[Rational]) -> Vec<(f64, f64)> {
    let mut c: Vec<Rational> = coeffs.to_vec();
    while c.last().is_some_and(Zero::is_zero) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    // factor out z^k so the companion matrix is nonsingular
    let lead_zeros = c.iter().take_while(|x| x.is_zero()).count();
    let mut roots = vec![(0.0, 0.0); lead_zeros];
    let reduced = &c[lead_zeros..];
    let d = reduced.len() - 1;
    if d == 0 {
        return roots;
    }
    // rescale z = s·w with s the geometric mean of the root moduli
    let lead = rational::to_f64(&reduced[d]);
    let c0 = rational::to_f64(&reduced[0]);
    let s = (c0 / lead).abs().powf(1.0 / d as f64);
    let s = if s.is_finite() && s > 0.0 { s } else { 1.0 };
    let scaled: Vec<f64> = reduced
        .iter()
        .enumerate()
        .map(|(k, x)| rational::to_f64(x) * s.powi(k as i32) / (lead * s.powi(d as i32)))
        .collect();
    // unshifted QR can stall on symmetric root configurations (roots of
    // unity); retry on a Taylor-shifted polynomial p(w + σ)
    for sigma in [0.0, 0.375, -0.625] {
        let shifted = taylor_shift(&scaled, sigma);
        let companion = DMatrix::from_fn(d, d, |i, j| {
            if j == d - 1 {
                -shifted[i] / shifted[d]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        let schur = [f64::EPSILON, 1e-12].iter().find_map(|&eps| Schur::try_new(companion.clone(), eps, 20_000));
        if let Some(schur) = schur {
            roots.extend(schur.complex_eigenvalues().iter().map(|ev| ((ev.re + sigma) * s, ev.im * s)));
            break;
        }
    }
    roots
}

/// All complex roots of `Σ c_k z^k` (ascending coefficients). Trailing zero
/// coefficients are ignored; the zero and constant polynomials have no roots.
/// If the eigenvalue iteration does not converge the result is short, which
/// callers can detect by comparing against the degree.
pub fn polynomial_roots(coeffs: &[Rational]) -> Vec<Root> {
    raw_roots(coeffs).into_iter().map(|(re, im)| newton_refine(coeffs, re, im)).collect()
}

/// Root of smallest modulus with modulus strictly below `r_max`.
///
/// Only candidates are refined, in order of increasing modulus.
pub fn smallest_root(coeffs: &[Rational], r_max: f64) -> Option<Root> {
    let inside = |m: f64| m < r_max - 1e-12;
    let mut raw = raw_roots(coeffs);
    raw.sort_by(|a, b| a.0.hypot(a.1).total_cmp(&b.0.hypot(b.1)));
    raw.into_iter()
        .take_while(|&(re, im)| inside(re.hypot(im) - 1e-9))
        .map(|(re, im)| newton_refine(coeffs, re, im))
        .find(|r| inside(r.modulus()))
}

/// Largest modulus among the roots (0 for constant polynomials).
pub fn max_root_modulus(coeffs: &[Rational]) -> f64 {
    raw_roots(coeffs)
        .into_iter()
        .max_by(|a, b| a.0.hypot(a.1).total_cmp(&b.0.hypot(b.1)))
        .map_or(0.0, |(re, im)| newton_refine(coeffs, re, im).modulus())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn ints(c: &[i64]) -> Vec<Rational> {
        c.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn linear_and_quadratic() {
        let r = polynomial_roots(&ints(&[1, -2]));
        assert_eq!(r.len(), 1);
        assert!((r[0].re - 0.5).abs() < 1e-15);
        let r = smallest_root(&ints(&[1, -1, -1]), 1.0).unwrap();
        assert!((r.re - 0.618_033_988_749_894_8).abs() < 1e-12);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn complex_pair_and_zero_root() {
        // z (z^2 + 1)
        let r = polynomial_roots(&ints(&[0, 1, 0, 1]));
        assert_eq!(r.len(), 3);
        let mods: Vec<f64> = r.iter().map(Root::modulus).collect();
        assert!(mods.iter().filter(|m| (**m - 1.0).abs() < 1e-12).count() == 2);
        assert!(mods.contains(&0.0));
    }

    #[test]
    fn symmetric_roots_need_the_shifted_retry() {
        // 1 − 2^20 z^16: sixteen roots on one circle
        let mut c = vec![int(0); 17];
        c[0] = int(1);
        c[16] = int(-(1 << 20));
        let r = polynomial_roots(&c);
        assert_eq!(r.len(), 16);
        let m = 2f64.powf(-20.0 / 16.0);
        assert!(r.iter().all(|x| (x.modulus() - m).abs() < 1e-12 && x.residual < 1e-12));
    }

    #[test]
    fn constant_has_no_roots() {
        assert!(polynomial_roots(&ints(&[3, 0, 0])).is_empty());
        assert_eq!(max_root_modulus(&ints(&[1])), 0.0);
    }
}
