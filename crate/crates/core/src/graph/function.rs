use std::ops::{Deref, DerefMut};

use crate::scalar::Real;

/// A real value per vertex, indexed by dense vertex index.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct VertexFunction<T>(Vec<T>);

impl<T: Real> VertexFunction<T> {
    pub fn zeros(n: usize) -> Self {
        VertexFunction(vec![T::zero(); n])
    }

    pub fn constant(n: usize, c: T) -> Self {
        VertexFunction(vec![c; n])
    }

    pub fn indicator(n: usize, x: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[x] = T::one();
        v
    }

    pub fn indicator_of(set: &VertexSet) -> Self {
        VertexFunction(set.mask().iter().map(|&b| if b { T::one() } else { T::zero() }).collect())
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> T) -> Self {
        VertexFunction((0..n).map(f).collect())
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        VertexFunction(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.len(), other.len(), "vertex functions on different graphs");
        VertexFunction(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    pub fn sup_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> T {
        self.0.iter().fold(T::infinity(), |m, &v| m.min(v))
    }
}

impl<T> From<Vec<T>> for VertexFunction<T> {
    fn from(v: Vec<T>) -> Self {
        VertexFunction(v)
    }
}

impl<T> Deref for VertexFunction<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for VertexFunction<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

/// Subset of the vertex set, stored as a membership mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSet {
    mask: Vec<bool>,
    count: usize,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet { mask: vec![false; n], count: 0 }
    }

    pub fn full(n: usize) -> Self {
        VertexSet { mask: vec![true; n], count: n }
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        let count = mask.iter().filter(|&&b| b).count();
        VertexSet { mask, count }
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, x: usize) -> bool {
        self.mask.get(x).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, x: usize) {
        if !self.mask[x] {
            self.mask[x] = true;
            self.count += 1;
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet::from_mask(self.mask.iter().zip(&other.mask).map(|(&a, &b)| a && !b).collect())
    }
}
