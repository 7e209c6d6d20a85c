//! Piecewise-affine monotone maps on a finite disjoint union of intervals.
//!
//! A [`PMMap`] is defined on `Ω ∖ C` where `Ω = [a_1,b_1] ∪ … ∪ [a_m,b_m]` and
//! `C` is a finite critical set containing every endpoint of `Ω`. Between two
//! consecutive critical points of the same interval the map is a single
//! affine branch `x ↦ s·x + t` with `s ≠ 0`. All data are exact rationals.
//!
//! Iterates are never stored as closures: the laps of `F^n` are produced by
//! pulling the critical set back through the affine branches, so every lap
//! carries its own exact affine rule.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::FormalVector;
use crate::rational::{self, Rational};

/// Default cap on the number of laps any single iterate may have.
pub const DEFAULT_LAP_BUDGET: usize = 2_000_000;
/// Default number of steps followed along a critical orbit.
pub const DEFAULT_ORBIT_HORIZON: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("the domain must contain at least one interval")]
    EmptyDomain,
    #[error("interval {index} is degenerate or reversed")]
    DegenerateInterval { index: usize },
    #[error("interval {index} overlaps or touches its predecessor")]
    OverlappingIntervals { index: usize },
    #[error("critical point {0} lies outside the domain")]
    CriticalOutsideOmega(Rational),
    #[error("critical points must be strictly increasing")]
    UnsortedCritical,
    #[error("endpoint {0} of the domain is not a critical point")]
    BoundaryNotCritical(Rational),
    #[error("expected {expected} branches for the given critical set, found {found}")]
    BranchCountMismatch { expected: usize, found: usize },
    #[error("branch {index} has zero slope")]
    NonMonotoneBranch { index: usize },
    #[error("branch {index} maps [{left}, {right}] outside the domain")]
    ImageEscapesOmega { index: usize, left: Rational, right: Rational },
    #[error("branch {index} declares endpoints that do not match the critical set")]
    BranchEndpointMismatch { index: usize },
    #[error("{0} is not a critical point")]
    NotCritical(Rational),
    #[error("{0} is a critical point; the map is undefined there")]
    UndefinedAtCritical(Rational),
    #[error("{0} does not lie in the domain")]
    PointOutsideOmega(Rational),
    #[error("side {side:?} is illegal at {point}")]
    IllegalSide { point: Rational, side: Side },
    #[error("iterate {n} exceeds the lap budget of {budget}")]
    LapBudgetExceeded { n: usize, budget: usize },
}

/// One side of a point: `Minus` is the limit from the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+")]
    Plus,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }

    /// Side of the image germ under a branch with the given orientation.
    pub fn times(self, sign: i32) -> Side {
        if sign < 0 {
            self.flipped()
        } else {
            self
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Side::Minus => "-",
            Side::Plus => "+",
        }
    }
}

/// The closed domain `Ω`, a strictly ordered list of disjoint intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Omega {
    intervals: Vec<(Rational, Rational)>,
}

impl Omega {
    pub fn new(intervals: Vec<(Rational, Rational)>) -> Result<Self, MapError> {
        if intervals.is_empty() {
            return Err(MapError::EmptyDomain);
        }
        for (i, (a, b)) in intervals.iter().enumerate() {
            if a >= b {
                return Err(MapError::DegenerateInterval { index: i });
            }
            if i > 0 && intervals[i - 1].1 >= *a {
                return Err(MapError::OverlappingIntervals { index: i });
            }
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Index of the interval containing `x`.
    pub fn component_of(&self, x: &Rational) -> Option<usize> {
        let idx = self.intervals.partition_point(|(a, _)| a <= x);
        if idx == 0 {
            return None;
        }
        let (_, b) = &self.intervals[idx - 1];
        (x <= b).then_some(idx - 1)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.component_of(x).is_some()
    }

    pub fn boundary(&self) -> Vec<Rational> {
        self.intervals.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect()
    }

    pub fn is_left_end(&self, x: &Rational) -> bool {
        self.intervals.iter().any(|(a, _)| a == x)
    }

    pub fn is_right_end(&self, x: &Rational) -> bool {
        self.intervals.iter().any(|(_, b)| b == x)
    }

    pub fn is_boundary(&self, x: &Rational) -> bool {
        self.is_left_end(x) || self.is_right_end(x)
    }

    /// Total length `Σ (b_i − a_i)`.
    pub fn measure(&self) -> Rational {
        self.intervals.iter().fold(Rational::zero(), |acc, (a, b)| acc + (b - a))
    }
}

/// A point with an optional side tag, used for one-sided limits.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SidedPoint {
    pub point: Rational,
    pub side: Option<Side>,
}

impl SidedPoint {
    pub fn new(omega: &Omega, point: Rational, side: Option<Side>) -> Result<Self, MapError> {
        if !omega.contains(&point) {
            return Err(MapError::PointOutsideOmega(point));
        }
        match side {
            Some(Side::Minus) if omega.is_left_end(&point) => Err(MapError::IllegalSide { point, side: Side::Minus }),
            Some(Side::Plus) if omega.is_right_end(&point) => Err(MapError::IllegalSide { point, side: Side::Plus }),
            _ => Ok(Self { point, side }),
        }
    }
}

/// `x ↦ slope·x + intercept`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Affine {
    pub slope: Rational,
    pub intercept: Rational,
}

impl Affine {
    pub fn new(slope: Rational, intercept: Rational) -> Self {
        Self { slope, intercept }
    }

    pub fn identity() -> Self {
        Self::new(rational::int(1), Rational::zero())
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }

    /// The unique preimage of `y`.
    pub fn preimage(&self, y: &Rational) -> Rational {
        (y - &self.intercept) / &self.slope
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &Affine) -> Affine {
        Affine { slope: &self.slope * &inner.slope, intercept: &self.slope * &inner.intercept + &self.intercept }
    }

    pub fn sign(&self) -> i32 {
        rational::sign(&self.slope)
    }
}

/// One affine branch of a PM map, living on the open interval `]left, right[`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub left: Rational,
    pub right: Rational,
    pub rule: Affine,
}

impl Branch {
    pub fn sign(&self) -> i32 {
        self.rule.sign()
    }

    pub fn value_at_left(&self) -> Rational {
        self.rule.apply(&self.left)
    }

    pub fn value_at_right(&self) -> Rational {
        self.rule.apply(&self.right)
    }
}

/// Unvalidated description of a map, as read from a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapSpec {
    pub intervals: Vec<(Rational, Rational)>,
    pub critical: Vec<Rational>,
    pub branches: Vec<BranchSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchSpec {
    pub slope: Rational,
    pub intercept: Rational,
    /// Optional declared endpoints, checked against the critical set.
    pub bounds: Option<(Rational, Rational)>,
}

impl BranchSpec {
    pub fn new(slope: Rational, intercept: Rational) -> Self {
        Self { slope, intercept, bounds: None }
    }
}

/// A validated piecewise monotone map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PMMap {
    domain: Omega,
    critical: Vec<Rational>,
    branches: Vec<Branch>,
}

/// A maximal interval of monotonicity of `F^level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lap {
    pub left: Rational,
    pub right: Rational,
    pub rule: Affine,
    pub level: usize,
}

impl Lap {
    pub fn sign(&self) -> i32 {
        self.rule.sign()
    }

    /// `F^n(left+)`.
    pub fn value_at_left(&self) -> Rational {
        self.rule.apply(&self.left)
    }

    /// `F^n(right−)`.
    pub fn value_at_right(&self) -> Rational {
        self.rule.apply(&self.right)
    }

    /// Length of the image, `|F^n(right−) − F^n(left+)|`.
    pub fn variation(&self) -> Rational {
        (self.value_at_right() - self.value_at_left()).abs()
    }

    pub fn midpoint(&self) -> Rational {
        (&self.left + &self.right) / rational::int(2)
    }
}

impl PMMap {
    pub fn validate(spec: MapSpec) -> Result<Self, MapError> {
        let domain = Omega::new(spec.intervals)?;
        let critical = spec.critical;
        for w in critical.windows(2) {
            if w[0] >= w[1] {
                return Err(MapError::UnsortedCritical);
            }
        }
        for c in &critical {
            if !domain.contains(c) {
                return Err(MapError::CriticalOutsideOmega(c.clone()));
            }
        }
        for p in domain.boundary() {
            if critical.binary_search(&p).is_err() {
                return Err(MapError::BoundaryNotCritical(p));
            }
        }
        let gaps: Vec<(Rational, Rational)> = critical
            .windows(2)
            .filter(|w| domain.component_of(&w[0]) == domain.component_of(&w[1]))
            .map(|w| (w[0].clone(), w[1].clone()))
            .collect();
        if gaps.len() != spec.branches.len() {
            return Err(MapError::BranchCountMismatch { expected: gaps.len(), found: spec.branches.len() });
        }
        let mut branches = Vec::with_capacity(gaps.len());
        for (index, ((left, right), b)) in gaps.into_iter().zip(spec.branches).enumerate() {
            if b.slope.is_zero() {
                return Err(MapError::NonMonotoneBranch { index });
            }
            if let Some((l, r)) = &b.bounds {
                if *l != left || *r != right {
                    return Err(MapError::BranchEndpointMismatch { index });
                }
            }
            let branch = Branch { left, right, rule: Affine::new(b.slope, b.intercept) };
            let (y0, y1) = (branch.value_at_left(), branch.value_at_right());
            let (lo, hi) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
            let inside = match (domain.component_of(&lo), domain.component_of(&hi)) {
                (Some(i), Some(j)) => i == j,
                _ => false,
            };
            if !inside {
                return Err(MapError::ImageEscapesOmega { index, left: branch.left, right: branch.right });
            }
            branches.push(branch);
        }
        Ok(Self { domain, critical, branches })
    }

    pub fn domain(&self) -> &Omega {
        &self.domain
    }

    pub fn critical(&self) -> &[Rational] {
        &self.critical
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn is_critical(&self, x: &Rational) -> bool {
        self.critical.binary_search(x).is_ok()
    }

    /// Index of the branch whose open interval contains `x`.
    pub fn branch_index_at(&self, x: &Rational) -> Option<usize> {
        let idx = self.branches.partition_point(|b| b.left < *x);
        if idx == 0 {
            return None;
        }
        let b = &self.branches[idx - 1];
        (*x < b.right).then_some(idx - 1)
    }

    pub fn branch_at(&self, x: &Rational) -> Option<&Branch> {
        self.branch_index_at(x).map(|i| &self.branches[i])
    }

    /// `F(x)` for `x ∈ Ω ∖ C_F`.
    pub fn eval(&self, x: &Rational) -> Result<Rational, MapError> {
        if !self.domain.contains(x) {
            return Err(MapError::PointOutsideOmega(x.clone()));
        }
        if self.is_critical(x) {
            return Err(MapError::UndefinedAtCritical(x.clone()));
        }
        let b = self.branch_at(x).expect("non-critical point of Ω lies in a branch");
        Ok(b.rule.apply(x))
    }

    /// `ε_F(x)`: branch orientation, zero on the critical set.
    pub fn sign_at(&self, x: &Rational) -> i32 {
        if self.is_critical(x) {
            return 0;
        }
        self.branch_at(x).map_or(0, Branch::sign)
    }

    /// The branch adjacent to `c` on the given side, if any.
    pub fn branch_beside(&self, c: &Rational, side: Side) -> Option<&Branch> {
        match side {
            Side::Minus => {
                let idx = self.branches.partition_point(|b| b.right < *c);
                self.branches.get(idx).filter(|b| b.right == *c)
            }
            Side::Plus => {
                let idx = self.branches.partition_point(|b| b.left < *c);
                self.branches.get(idx).filter(|b| b.left == *c)
            }
        }
    }

    /// One-sided limit `F(x∓)` together with the orientation of the branch
    /// it comes from. Works at any point of `Ω`, critical or not.
    pub fn one_sided(&self, x: &Rational, side: Side) -> Option<(Rational, i32)> {
        if self.is_critical(x) {
            self.branch_beside(x, side).map(|b| (b.rule.apply(x), b.sign()))
        } else {
            self.branch_at(x).map(|b| (b.rule.apply(x), b.sign()))
        }
    }

    /// The vector `v_c^∓ = F(c∓)` attached to a critical point, which is the
    /// zero vector at `c = a_i` (side −) and `c = b_i` (side +).
    pub fn one_sided_value(&self, c: &Rational, side: Side) -> Result<FormalVector, MapError> {
        if !self.is_critical(c) {
            return Err(MapError::NotCritical(c.clone()));
        }
        Ok(self.one_sided(c, side).map(|(y, _)| FormalVector::point(y)).unwrap_or_else(FormalVector::zero))
    }

    /// Signed version `εv_c^∓ = ε_F(c∓)·F(c∓)`.
    pub fn signed_one_sided_value(&self, c: &Rational, side: Side) -> Result<FormalVector, MapError> {
        if !self.is_critical(c) {
            return Err(MapError::NotCritical(c.clone()));
        }
        Ok(self
            .one_sided(c, side)
            .map(|(y, s)| FormalVector::term(y, rational::int(s as i64)))
            .unwrap_or_else(FormalVector::zero))
    }

    /// Orbit of a point under `εF_{#0}`: `x_{k+1} = F(x_k)` with coefficient
    /// `Π_{j<k} ε_F(x_j)` on `x_k`. The orbit stops (all later terms are zero)
    /// right after the first term lying in the critical set. `None` is the
    /// zero vector, whose orbit is empty.
    pub fn signed_orbit(&self, start: Option<&Rational>, horizon: usize) -> Vec<(Rational, i32)> {
        let mut out = Vec::new();
        let Some(x0) = start else { return out };
        let mut x = x0.clone();
        let mut sign = 1;
        for _ in 0..=horizon {
            out.push((x.clone(), sign));
            if self.is_critical(&x) {
                break;
            }
            let b = self.branch_at(&x).expect("orbit stays in Ω");
            sign *= b.sign();
            x = b.rule.apply(&x);
        }
        out
    }

    /// Laps of `F` itself, i.e. the branches.
    pub fn first_laps(&self) -> Vec<Lap> {
        self.branches
            .iter()
            .map(|b| Lap { left: b.left.clone(), right: b.right.clone(), rule: b.rule.clone(), level: 1 })
            .collect()
    }

    /// Laps of `F^{k+1}` inside a lap of `F^k`, in increasing order.
    pub fn refine(&self, lap: &Lap) -> Vec<Lap> {
        let y0 = lap.value_at_left();
        let y1 = lap.value_at_right();
        let (lo, hi) = match y0.cmp(&y1) {
            Ordering::Less => (&y0, &y1),
            _ => (&y1, &y0),
        };
        let start = self.critical.partition_point(|c| c <= lo);
        let end = self.critical.partition_point(|c| c < hi);
        let mut cuts: Vec<Rational> = self.critical[start..end].iter().map(|c| lap.rule.preimage(c)).collect();
        if lap.sign() < 0 {
            cuts.reverse();
        }
        let mut out = Vec::with_capacity(cuts.len() + 1);
        let mut left = lap.left.clone();
        for right in cuts.into_iter().chain(std::iter::once(lap.right.clone())) {
            let mid = (&left + &right) / rational::int(2);
            let image = lap.rule.apply(&mid);
            let branch = self.branch_at(&image).expect("lap image avoids the critical set between cuts");
            out.push(Lap { left, right: right.clone(), rule: branch.rule.after(&lap.rule), level: lap.level + 1 });
            left = right;
        }
        out
    }

    /// Visits the laps of `F^n` in increasing order without materialising them.
    /// Returns the number of laps visited.
    pub fn walk_laps<V: FnMut(&Lap)>(&self, n: usize, budget: usize, mut visit: V) -> Result<usize, MapError> {
        assert!(n >= 1, "iterate level must be positive");
        let mut count = 0usize;
        for lap in self.first_laps() {
            self.walk_from(&lap, n, budget, &mut count, &mut visit)?;
        }
        Ok(count)
    }

    fn walk_from<V: FnMut(&Lap)>(
        &self,
        lap: &Lap,
        n: usize,
        budget: usize,
        count: &mut usize,
        visit: &mut V,
    ) -> Result<(), MapError> {
        if lap.level == n {
            *count += 1;
            if *count > budget {
                return Err(MapError::LapBudgetExceeded { n, budget });
            }
            visit(lap);
            return Ok(());
        }
        for child in self.refine(lap) {
            self.walk_from(&child, n, budget, count, visit)?;
        }
        Ok(())
    }

    /// Visits the laps of every iterate `F^1, …, F^n_max` in one depth-first
    /// pass (each lap of `F^k` before its refinements). The budget applies to
    /// the laps of each single level.
    pub fn walk_all_levels<V: FnMut(&Lap)>(
        &self,
        n_max: usize,
        budget: usize,
        mut visit: V,
    ) -> Result<Vec<usize>, MapError> {
        let mut counts = vec![0usize; n_max];
        if n_max == 0 {
            return Ok(counts);
        }
        let mut stack: Vec<Lap> = self.first_laps();
        stack.reverse();
        while let Some(lap) = stack.pop() {
            let k = lap.level;
            counts[k - 1] += 1;
            if counts[k - 1] > budget {
                return Err(MapError::LapBudgetExceeded { n: k, budget });
            }
            visit(&lap);
            if k < n_max {
                let mut children = self.refine(&lap);
                children.reverse();
                stack.extend(children);
            }
        }
        Ok(counts)
    }

    pub fn laps(&self, n: usize, budget: usize) -> Result<Vec<Lap>, MapError> {
        let mut out = Vec::new();
        self.walk_laps(n, budget, |l| out.push(l.clone()))?;
        Ok(out)
    }

    /// `ℓ(F^n)`.
    pub fn lap_count(&self, n: usize, budget: usize) -> Result<usize, MapError> {
        self.walk_laps(n, budget, |_| {})
    }

    /// `Var(F^n)`: total image length over the laps of `F^n`.
    pub fn variation(&self, n: usize, budget: usize) -> Result<Rational, MapError> {
        let mut total = Rational::zero();
        self.walk_laps(n, budget, |l| total += l.variation())?;
        Ok(total)
    }

    /// The iterate `F^n` as a PM map in its own right, with critical set
    /// `C_{F^n}` and one branch per lap.
    pub fn iterate(&self, n: usize, budget: usize) -> Result<PMMap, MapError> {
        if n == 1 {
            return Ok(self.clone());
        }
        let laps = self.laps(n, budget)?;
        let mut critical: Vec<Rational> = self.domain.boundary();
        for l in &laps {
            critical.push(l.left.clone());
            critical.push(l.right.clone());
        }
        critical.sort();
        critical.dedup();
        let branches = laps.into_iter().map(|l| Branch { left: l.left, right: l.right, rule: l.rule }).collect();
        Ok(PMMap { domain: self.domain.clone(), critical, branches })
    }

    /// `F^n(x)` by n-fold branch evaluation; `None` once the orbit meets `C_F`.
    pub fn eval_iterate(&self, x: &Rational, n: usize) -> Option<Rational> {
        let mut y = x.clone();
        for _ in 0..n {
            if self.is_critical(&y) {
                return None;
            }
            y = self.branch_at(&y)?.rule.apply(&y);
        }
        Some(y)
    }

    /// Branch signs along the itinerary of `x` under `n` steps.
    pub fn itinerary_signs(&self, x: &Rational, n: usize) -> Option<Vec<i32>> {
        let mut y = x.clone();
        let mut signs = Vec::with_capacity(n);
        for _ in 0..n {
            let b = self.branch_at(&y).filter(|_| !self.is_critical(&y))?;
            signs.push(b.sign());
            y = b.rule.apply(&y);
        }
        Some(signs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[allow(clippy::type_complexity)]
    fn spec(intervals: &[(i64, i64)], critical: &[(i64, i64)], branches: &[((i64, i64), (i64, i64))]) -> MapSpec {
        MapSpec {
            intervals: intervals.iter().map(|&(a, b)| (int(a), int(b))).collect(),
            critical: critical.iter().map(|&(n, d)| ratio(n, d)).collect(),
            branches: branches
                .iter()
                .map(|&((sn, sd), (tn, td))| BranchSpec::new(ratio(sn, sd), ratio(tn, td)))
                .collect(),
        }
    }

    fn doubling() -> PMMap {
        PMMap::validate(spec(&[(0, 1)], &[(0, 1), (1, 2), (1, 1)], &[((2, 1), (0, 1)), ((2, 1), (-1, 1))])).unwrap()
    }

    fn tent() -> PMMap {
        PMMap::validate(spec(&[(0, 1)], &[(0, 1), (1, 2), (1, 1)], &[((2, 1), (0, 1)), ((-2, 1), (2, 1))])).unwrap()
    }

    #[test]
    fn doubling_and_tent_validate_with_expected_signs() {
        let d = doubling();
        assert_eq!(d.branches().iter().map(Branch::sign).collect::<Vec<_>>(), vec![1, 1]);
        let t = tent();
        assert_eq!(t.branches().iter().map(Branch::sign).collect::<Vec<_>>(), vec![1, -1]);
    }

    #[test]
    fn missing_boundary_point_is_rejected() {
        let err = PMMap::validate(spec(&[(0, 1)], &[(1, 2), (1, 1)], &[((1, 1), (0, 1))])).unwrap_err();
        assert_eq!(err, MapError::BoundaryNotCritical(int(0)));
    }

    #[test]
    fn zero_slope_and_escaping_images_are_rejected() {
        let err = PMMap::validate(spec(&[(0, 1)], &[(0, 1), (1, 1)], &[((0, 1), (1, 2))])).unwrap_err();
        assert_eq!(err, MapError::NonMonotoneBranch { index: 0 });
        let err = PMMap::validate(spec(&[(0, 1)], &[(0, 1), (1, 1)], &[((2, 1), (0, 1))])).unwrap_err();
        assert!(matches!(err, MapError::ImageEscapesOmega { index: 0, .. }));
        // an image straddling the gap between two components is not in Ω
        let err = PMMap::validate(spec(
            &[(0, 1), (2, 3)],
            &[(0, 1), (1, 1), (2, 1), (3, 1)],
            &[((3, 1), (0, 1)), ((1, 1), (-2, 1))],
        ))
        .unwrap_err();
        assert!(matches!(err, MapError::ImageEscapesOmega { index: 0, .. }));
    }

    #[test]
    fn overlapping_intervals_are_rejected() {
        let err = Omega::new(vec![(int(0), int(2)), (int(1), int(3))]).unwrap_err();
        assert_eq!(err, MapError::OverlappingIntervals { index: 1 });
    }

    #[test]
    fn one_sided_values_follow_the_boundary_convention() {
        let d = doubling();
        assert_eq!(d.one_sided_value(&ratio(1, 2), Side::Minus).unwrap(), FormalVector::point(int(1)));
        assert!(d.one_sided_value(&int(0), Side::Minus).unwrap().is_zero());
        assert!(d.one_sided_value(&int(1), Side::Plus).unwrap().is_zero());
        assert_eq!(d.one_sided_value(&ratio(1, 3), Side::Minus), Err(MapError::NotCritical(ratio(1, 3))));
        let t = tent();
        assert_eq!(t.one_sided(&int(1), Side::Minus), Some((int(0), -1)));
        assert_eq!(t.signed_one_sided_value(&int(1), Side::Minus).unwrap(), FormalVector::term(int(0), int(-1)));
    }

    #[test]
    fn sided_points_respect_endpoints() {
        let t = tent();
        assert!(SidedPoint::new(t.domain(), int(0), Some(Side::Minus)).is_err());
        assert!(SidedPoint::new(t.domain(), int(1), Some(Side::Plus)).is_err());
        assert!(SidedPoint::new(t.domain(), int(1), Some(Side::Minus)).is_ok());
        assert!(SidedPoint::new(t.domain(), int(2), None).is_err());
    }

    #[test]
    fn lap_counts_and_signs() {
        let t = tent();
        let laps = t.laps(1, DEFAULT_LAP_BUDGET).unwrap();
        assert_eq!(laps.iter().map(Lap::sign).collect::<Vec<_>>(), vec![1, -1]);
        let laps = t.laps(3, DEFAULT_LAP_BUDGET).unwrap();
        assert_eq!(laps.len(), 8);
        for (i, l) in laps.iter().enumerate() {
            assert_eq!(l.sign(), if i % 2 == 0 { 1 } else { -1 });
        }
        let d = doubling();
        let laps = d.laps(4, DEFAULT_LAP_BUDGET).unwrap();
        assert_eq!(laps.len(), 16);
        assert!(laps.iter().all(|l| l.sign() == 1));
        for (k, l) in laps.iter().enumerate() {
            assert_eq!(l.left, ratio(k as i64, 16));
        }
    }

    #[test]
    fn tent_lap_growth_and_variation() {
        let t = tent();
        for n in 1..=10 {
            assert_eq!(t.lap_count(n, DEFAULT_LAP_BUDGET).unwrap(), 1 << n);
            assert_eq!(t.variation(n, DEFAULT_LAP_BUDGET).unwrap(), int(1 << n));
        }
    }

    #[test]
    fn all_levels_in_one_pass_match_single_levels() {
        let t = tent();
        let mut var = vec![int(0); 6];
        let counts = t.walk_all_levels(6, DEFAULT_LAP_BUDGET, |l| var[l.level - 1] += l.variation()).unwrap();
        for n in 1..=6 {
            assert_eq!(counts[n - 1], t.lap_count(n, DEFAULT_LAP_BUDGET).unwrap());
            assert_eq!(var[n - 1], t.variation(n, DEFAULT_LAP_BUDGET).unwrap());
        }
        assert!(t.walk_all_levels(6, 40, |_| {}).is_err());
    }

    #[test]
    fn contraction_has_one_lap_forever() {
        let c = PMMap::validate(spec(&[(0, 1)], &[(0, 1), (1, 1)], &[((1, 2), (0, 1))])).unwrap();
        for n in 1..=8 {
            assert_eq!(c.lap_count(n, 10).unwrap(), 1);
            assert!(c.variation(n, 10).unwrap() <= int(1));
        }
    }

    #[test]
    fn lap_budget_is_enforced() {
        let t = tent();
        assert_eq!(t.lap_count(5, 31), Err(MapError::LapBudgetExceeded { n: 5, budget: 31 }));
        assert_eq!(t.lap_count(5, 32), Ok(32));
    }

    #[test]
    fn signed_orbits() {
        let d = doubling();
        assert_eq!(d.signed_orbit(Some(&int(1)), 10), vec![(int(1), 1)]);
        let t = tent();
        let orbit = t.signed_orbit(Some(&ratio(2, 3)), 4);
        assert_eq!(orbit.len(), 5);
        for (k, (x, s)) in orbit.iter().enumerate() {
            assert_eq!(*x, ratio(2, 3));
            assert_eq!(*s, if k % 2 == 0 { 1 } else { -1 });
        }
        assert!(t.signed_orbit(None, 10).is_empty());
        // 1/4 -> 1/2 is critical: two terms then nothing
        assert_eq!(t.signed_orbit(Some(&ratio(1, 4)), 10), vec![(ratio(1, 4), 1), (ratio(1, 2), 1)]);
    }

    #[test]
    fn iterate_is_a_pm_map_with_lap_branches() {
        let t = tent();
        let t3 = t.iterate(3, DEFAULT_LAP_BUDGET).unwrap();
        assert_eq!(t3.branches().len(), 8);
        assert_eq!(t3.critical().len(), 9);
        let x = ratio(3, 17);
        assert_eq!(t3.eval(&x).unwrap(), t.eval_iterate(&x, 3).unwrap());
    }
}
