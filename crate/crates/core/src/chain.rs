//! Finite formal combinations of points.
//!
//! A [`FormalVector`] is a finitely supported element of the free vector
//! space on the points of the real line. Zero coefficients are never stored,
//! so two vectors are equal iff their maps are equal.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::rational::Rational;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FormalVector {
    terms: BTreeMap<Rational, Rational>,
}

impl FormalVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn point(x: Rational) -> Self {
        Self::term(x, Rational::from_integer(1.into()))
    }

    pub fn term(x: Rational, coeff: Rational) -> Self {
        let mut v = Self::zero();
        v.add_term(x, coeff);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, x: &Rational) -> Rational {
        self.terms.get(x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, x: Rational, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(x) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &FormalVector, factor: &Rational) {
        if factor.is_zero() {
            return;
        }
        for (x, c) in &other.terms {
            self.add_term(x.clone(), c * factor);
        }
    }

    pub fn scaled(&self, factor: &Rational) -> FormalVector {
        let mut out = FormalVector::zero();
        out.add_scaled(self, factor);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.terms.iter()
    }

    /// Sum of the coefficients; zero exactly on boundaries of 0-chains.
    pub fn augmentation(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |acc, c| acc + c)
    }
}

impl std::ops::Add<&FormalVector> for &FormalVector {
    type Output = FormalVector;
    fn add(self, rhs: &FormalVector) -> FormalVector {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::from_integer(1.into()));
        out
    }
}

impl std::ops::Sub<&FormalVector> for &FormalVector {
    type Output = FormalVector;
    fn sub(self, rhs: &FormalVector) -> FormalVector {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::from_integer((-1).into()));
        out
    }
}

impl fmt::Display for FormalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (x, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})[{x}]")?;
        }
        Ok(())
    }
}

impl FromIterator<(Rational, Rational)> for FormalVector {
    fn from_iter<I: IntoIterator<Item = (Rational, Rational)>>(iter: I) -> Self {
        let mut v = FormalVector::zero();
        for (x, c) in iter {
            v.add_term(x, c);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn cancellation_removes_support() {
        let mut v = FormalVector::point(ratio(1, 2));
        v.add_term(ratio(1, 2), int(-1));
        assert!(v.is_zero());
        assert_eq!(v.len(), 0);
    }

    #[test]
    fn boundary_has_zero_augmentation() {
        let d = &FormalVector::point(int(1)) - &FormalVector::point(int(0));
        assert!(d.augmentation().is_zero());
        assert_eq!(d.coeff(&int(0)), int(-1));
    }
}
