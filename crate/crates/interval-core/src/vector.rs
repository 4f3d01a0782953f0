use std::ops::{Add, Index, IndexMut, Neg, Sub};

use crate::interval::Interval;
use crate::rounding::{add_up, mul_up};

/// A box in `R^n` given by independent interval components.
#[derive(Clone, PartialEq, Debug)]
pub struct IntervalVector(Vec<Interval>);

impl IntervalVector {
    pub fn new(components: Vec<Interval>) -> Self {
        IntervalVector(components)
    }

    pub fn zeros(n: usize) -> Self {
        IntervalVector(vec![Interval::ZERO; n])
    }

    pub fn from_points(xs: &[f64]) -> Self {
        IntervalVector(xs.iter().map(|&x| Interval::point(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Interval> {
        self.0
    }

    pub fn mid(&self) -> Vec<f64> {
        self.0.iter().map(|x| x.mid()).collect()
    }

    pub fn mid_vector(&self) -> IntervalVector {
        IntervalVector(self.0.iter().map(|x| Interval::point(x.mid())).collect())
    }

    /// Largest component width.
    pub fn max_width(&self) -> f64 {
        self.0.iter().map(|x| x.width()).fold(0.0, f64::max)
    }

    pub fn subset(&self, other: &IntervalVector) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.subset(b))
    }

    pub fn interior(&self, other: &IntervalVector) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.interior(b))
    }

    pub fn hull(&self, other: &IntervalVector) -> IntervalVector {
        IntervalVector(self.0.iter().zip(&other.0).map(|(a, b)| a.hull(b)).collect())
    }

    pub fn intersection(&self, other: &IntervalVector) -> Option<IntervalVector> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.intersection(b))
            .collect::<Option<Vec<_>>>()
            .map(IntervalVector)
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        self.len() == p.len() && self.0.iter().zip(p).all(|(a, &x)| a.contains(x))
    }

    pub fn scale(&self, s: Interval) -> IntervalVector {
        IntervalVector(self.0.iter().map(|&x| x * s).collect())
    }

    pub fn dot(&self, other: &IntervalVector) -> Interval {
        self.0
            .iter()
            .zip(&other.0)
            .fold(Interval::ZERO, |acc, (a, b)| acc + *a * *b)
    }

    /// Interval containing the Euclidean norm of every point in the box.
    pub fn norm(&self) -> Interval {
        let sq = self.0.iter().fold(Interval::ZERO, |acc, x| acc + x.sqr());
        sq.sqrt().expect("sum of squares is nonnegative")
    }

    /// Upper bound of the Euclidean norm over the box.
    pub fn norm_sup(&self) -> f64 {
        let s = self
            .0
            .iter()
            .fold(0.0, |acc, x| add_up(acc, mul_up(x.mag(), x.mag())));
        crate::rounding::sqrt_up(s)
    }

    pub fn inflate(&self, r: f64) -> IntervalVector {
        IntervalVector(self.0.iter().map(|x| x.inflate(r)).collect())
    }
}

impl Index<usize> for IntervalVector {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl IndexMut<usize> for IntervalVector {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.0[i]
    }
}

impl From<Vec<Interval>> for IntervalVector {
    fn from(v: Vec<Interval>) -> Self {
        IntervalVector(v)
    }
}

impl FromIterator<Interval> for IntervalVector {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        IntervalVector(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a IntervalVector {
    type Item = &'a Interval;
    type IntoIter = std::slice::Iter<'a, Interval>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Add for &IntervalVector {
    type Output = IntervalVector;
    fn add(self, rhs: &IntervalVector) -> IntervalVector {
        assert_eq!(self.len(), rhs.len(), "vector dimension mismatch");
        IntervalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| *a + *b).collect())
    }
}

impl Sub for &IntervalVector {
    type Output = IntervalVector;
    fn sub(self, rhs: &IntervalVector) -> IntervalVector {
        assert_eq!(self.len(), rhs.len(), "vector dimension mismatch");
        IntervalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| *a - *b).collect())
    }
}

impl Neg for &IntervalVector {
    type Output = IntervalVector;
    fn neg(self) -> IntervalVector {
        IntervalVector(self.0.iter().map(|a| -*a).collect())
    }
}

/// Interval enclosure of the Euclidean norm over a box (`vec_norm_sup`).
pub fn vec_norm_sup(v: &IntervalVector) -> Interval {
    v.norm()
}
