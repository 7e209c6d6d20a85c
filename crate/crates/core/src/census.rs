//! Per-level statistics of the laps of `F, F², …, F^N` in one traversal.
//!
//! The traversal runs on checked 64-bit rationals and restarts with 128-bit
//! and then arbitrary-precision rationals when a value overflows, so the
//! results are exact either way.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, ToPrimitive, Zero};
use serde::Serialize;

use crate::pm_domain::{MapError, PMMap};
use crate::rational::Rational;

trait Exact: Clone + Ord + Sized {
    fn from_q(q: &Rational) -> Option<Self>;
    fn to_q(&self) -> Rational;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn div(&self, o: &Self) -> Option<Self>;
    fn signum(&self) -> i32;
}

macro_rules! small_exact {
    ($t:ty, $conv:ident) => {
        impl Exact for $t {
            fn from_q(q: &Rational) -> Option<Self> {
                Some(<$t>::new(q.numer().$conv()?, q.denom().$conv()?))
            }
            fn to_q(&self) -> Rational {
                Rational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
            }
            fn add(&self, o: &Self) -> Option<Self> {
                self.checked_add(o)
            }
            fn sub(&self, o: &Self) -> Option<Self> {
                self.checked_sub(o)
            }
            fn mul(&self, o: &Self) -> Option<Self> {
                self.checked_mul(o)
            }
            fn div(&self, o: &Self) -> Option<Self> {
                self.checked_div(o)
            }
            fn signum(&self) -> i32 {
                self.numer().signum() as i32
            }
        }
    };
}

small_exact!(Ratio<i64>, to_i64);
small_exact!(Ratio<i128>, to_i128);

impl Exact for Rational {
    fn from_q(q: &Rational) -> Option<Self> {
        Some(q.clone())
    }
    fn to_q(&self) -> Rational {
        self.clone()
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn signum(&self) -> i32 {
        crate::rational::sign(self)
    }
}

/// Lap statistics of one iterate `F^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelCensus {
    pub n: usize,
    /// `ℓ(F^n)`.
    pub laps: usize,
    pub decreasing_laps: usize,
    /// `Var(F^n)`.
    #[serde(with = "crate::rational::text")]
    pub variation: Rational,
    /// Decreasing laps `[c,d]` with `c < F^n(c+)` and `F^n(d−) < d`.
    pub fix_neg: usize,
    /// Laps whose graph crosses the diagonal strictly inside.
    pub interior_fixed: usize,
    /// Laps of slope 1 lying on the diagonal.
    pub diagonal_laps: usize,
    /// `Σ σ(I)` and `Σ ε(I)σ(I)` over the laps.
    pub sum_sigma: i64,
    pub sum_eps_sigma: i64,
}

struct Data<T> {
    crit: Vec<T>,
    /// Branch on the segment between `crit[k]` and `crit[k+1]`, if any.
    segment_branch: Vec<Option<usize>>,
    slopes: Vec<T>,
    intercepts: Vec<T>,
    /// Right end of the interval holding each branch.
    right_end: Vec<T>,
}

#[derive(Clone)]
struct FLap<T> {
    left: T,
    right: T,
    slope: T,
    intercept: T,
    branch0: usize,
    level: usize,
}

struct Acc<T> {
    laps: usize,
    decreasing: usize,
    variation: Option<T>,
    fix_neg: usize,
    interior_fixed: usize,
    diagonal: usize,
    sum_sigma: i64,
    sum_eps_sigma: i64,
}

impl<T> Acc<T> {
    fn new() -> Self {
        Self {
            laps: 0,
            decreasing: 0,
            variation: None,
            fix_neg: 0,
            interior_fixed: 0,
            diagonal: 0,
            sum_sigma: 0,
            sum_eps_sigma: 0,
        }
    }
}

enum Failure {
    Overflow,
    Budget(usize),
}

fn prepare<T: Exact>(map: &PMMap) -> Option<Data<T>> {
    let crit: Vec<T> = map.critical().iter().map(T::from_q).collect::<Option<_>>()?;
    let mut segment_branch = Vec::with_capacity(crit.len());
    let branches = map.branches();
    let by_left: BTreeMap<&Rational, usize> = branches.iter().enumerate().map(|(i, b)| (&b.left, i)).collect();
    for w in map.critical().windows(2) {
        segment_branch.push(by_left.get(&w[0]).copied().filter(|&i| branches[i].right == w[1]));
    }
    let slopes = branches.iter().map(|b| T::from_q(&b.rule.slope)).collect::<Option<_>>()?;
    let intercepts = branches.iter().map(|b| T::from_q(&b.rule.intercept)).collect::<Option<_>>()?;
    let omega = map.domain();
    let right_end = branches
        .iter()
        .map(|b| {
            let i = omega.component_of(&b.left).expect("branch lies in Ω");
            T::from_q(&omega.intervals()[i].1)
        })
        .collect::<Option<_>>()?;
    Some(Data { crit, segment_branch, slopes, intercepts, right_end })
}

fn refine<T: Exact>(d: &Data<T>, lap: &FLap<T>) -> Option<Vec<FLap<T>>> {
    let y0 = lap.slope.mul(&lap.left)?.add(&lap.intercept)?;
    let y1 = lap.slope.mul(&lap.right)?.add(&lap.intercept)?;
    let increasing = lap.slope.signum() > 0;
    let (lo, hi) = if increasing { (&y0, &y1) } else { (&y1, &y0) };
    let start = d.crit.partition_point(|c| c <= lo);
    let end = d.crit.partition_point(|c| c < hi);
    // image segments start-1 ..= end-1, in increasing image order
    let mut out = Vec::with_capacity(end + 1 - start);
    let mut cuts = Vec::with_capacity(end - start);
    for c in &d.crit[start..end] {
        cuts.push(c.sub(&lap.intercept)?.div(&lap.slope)?);
    }
    let segs = start - 1..end;
    let mut domain_points = Vec::with_capacity(cuts.len() + 2);
    if increasing {
        domain_points.push(lap.left.clone());
        domain_points.extend(cuts);
        domain_points.push(lap.right.clone());
    } else {
        domain_points.push(lap.right.clone());
        domain_points.extend(cuts);
        domain_points.push(lap.left.clone());
    }
    for (j, seg) in segs.enumerate() {
        let b = d.segment_branch[seg].expect("lap image lies in one interval of Ω");
        let (a, z) = (&domain_points[j], &domain_points[j + 1]);
        let (left, right) = if increasing { (a.clone(), z.clone()) } else { (z.clone(), a.clone()) };
        out.push(FLap {
            left,
            right,
            slope: d.slopes[b].mul(&lap.slope)?,
            intercept: d.slopes[b].mul(&lap.intercept)?.add(&d.intercepts[b])?,
            branch0: lap.branch0,
            level: lap.level + 1,
        });
    }
    if !increasing {
        out.reverse();
    }
    Some(out)
}

fn record<T: Exact>(d: &Data<T>, lap: &FLap<T>, acc: &mut Acc<T>) -> Option<()> {
    let fl = lap.slope.mul(&lap.left)?.add(&lap.intercept)?;
    let fr = lap.slope.mul(&lap.right)?.add(&lap.intercept)?;
    let eps = lap.slope.signum();
    acc.laps += 1;
    if eps < 0 {
        acc.decreasing += 1;
    }
    let var = if eps > 0 { fr.sub(&fl)? } else { fl.sub(&fr)? };
    acc.variation = Some(match acc.variation.take() {
        Some(v) => v.add(&var)?,
        None => var,
    });
    let gl = fl.sub(&lap.left)?.signum();
    let gr = fr.sub(&lap.right)?.signum();
    if gl * gr < 0 {
        acc.interior_fixed += 1;
        if eps < 0 {
            acc.fix_neg += 1;
        }
    }
    if gl == 0 && gr == 0 {
        acc.diagonal += 1;
    }
    // σ = ω_c^+(F(c+)) + ω_d^−(F(d−))
    let b = &d.right_end[lap.branch0];
    let w_plus = if fl > lap.left && fl <= *b { -1 } else { 0 };
    let w_minus = if fr >= lap.right && fr <= *b { 1 } else { 0 };
    let sigma = w_plus + w_minus;
    acc.sum_sigma += sigma as i64;
    acc.sum_eps_sigma += (eps * sigma) as i64;
    Some(())
}

fn run<T: Exact>(map: &PMMap, n_max: usize, budget: usize) -> Result<Vec<LevelCensus>, Failure> {
    let d: Data<T> = prepare(map).ok_or(Failure::Overflow)?;
    let mut accs: Vec<Acc<T>> = (0..n_max).map(|_| Acc::new()).collect();
    let mut stack: Vec<FLap<T>> = Vec::new();
    for (i, b) in map.branches().iter().enumerate().rev() {
        stack.push(FLap {
            left: T::from_q(&b.left).ok_or(Failure::Overflow)?,
            right: T::from_q(&b.right).ok_or(Failure::Overflow)?,
            slope: d.slopes[i].clone(),
            intercept: d.intercepts[i].clone(),
            branch0: i,
            level: 1,
        });
    }
    while let Some(lap) = stack.pop() {
        let acc = &mut accs[lap.level - 1];
        if acc.laps >= budget {
            return Err(Failure::Budget(lap.level));
        }
        record(&d, &lap, acc).ok_or(Failure::Overflow)?;
        if lap.level < n_max {
            let mut children = refine(&d, &lap).ok_or(Failure::Overflow)?;
            children.reverse();
            stack.extend(children);
        }
    }
    Ok(accs
        .into_iter()
        .enumerate()
        .map(|(k, a)| LevelCensus {
            n: k + 1,
            laps: a.laps,
            decreasing_laps: a.decreasing,
            variation: a.variation.map_or_else(Rational::zero, |v| v.to_q()),
            fix_neg: a.fix_neg,
            interior_fixed: a.interior_fixed,
            diagonal_laps: a.diagonal,
            sum_sigma: a.sum_sigma,
            sum_eps_sigma: a.sum_eps_sigma,
        })
        .collect())
}

/// Census of the laps of `F^1, …, F^n_max`. The budget caps the laps of each
/// single level.
pub fn census(map: &PMMap, n_max: usize, budget: usize) -> Result<Vec<LevelCensus>, MapError> {
    let fail = |f: Failure| match f {
        Failure::Budget(n) => MapError::LapBudgetExceeded { n, budget },
        Failure::Overflow => unreachable!("arbitrary precision does not overflow"),
    };
    let budget_err = |n| MapError::LapBudgetExceeded { n, budget };
    match run::<Ratio<i64>>(map, n_max, budget) {
        Ok(c) => return Ok(c),
        Err(Failure::Budget(n)) => return Err(budget_err(n)),
        Err(Failure::Overflow) => {}
    }
    match run::<Ratio<i128>>(map, n_max, budget) {
        Ok(c) => Ok(c),
        Err(Failure::Budget(n)) => Err(budget_err(n)),
        Err(Failure::Overflow) => run::<Rational>(map, n_max, budget).map_err(fail),
    }
}

/// The same census computed on arbitrary-precision rationals only.
pub fn census_exact(map: &PMMap, n_max: usize, budget: usize) -> Result<Vec<LevelCensus>, MapError> {
    run::<Rational>(map, n_max, budget).map_err(|f| match f {
        Failure::Budget(n) => MapError::LapBudgetExceeded { n, budget },
        Failure::Overflow => unreachable!("arbitrary precision does not overflow"),
    })
}
