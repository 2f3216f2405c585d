use crate::error::{Error, Result};
use crate::scalar::Real;

/// Cholesky factor `A = L Lᵀ` of a symmetric positive definite matrix in
/// envelope (skyline) storage: row `i` keeps columns `first[i] ..= i`.
///
/// Cost is governed by the profile of the chosen ordering, which for balls
/// ordered by distance from the center stays narrow on sparse graphs.
#[derive(Clone, Debug)]
pub struct EnvelopeCholesky<T> {
    first: Vec<usize>,
    start: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> EnvelopeCholesky<T> {
    /// `lower[i]` lists `(j, a_ij)` for `j ≤ i`; the diagonal must be present.
    pub fn factor(lower: &[Vec<(usize, T)>]) -> Result<Self> {
        let n = lower.len();
        let mut first = Vec::with_capacity(n);
        let mut start = Vec::with_capacity(n + 1);
        let mut total = 0;
        for (i, row) in lower.iter().enumerate() {
            let f = row.iter().map(|&(j, _)| j).min().unwrap_or(i).min(i);
            debug_assert!(row.iter().all(|&(j, _)| j <= i), "entries must be lower triangular");
            first.push(f);
            start.push(total);
            total += i - f + 1;
        }
        start.push(total);
        let mut vals = vec![T::zero(); total];
        for (i, row) in lower.iter().enumerate() {
            for &(j, a) in row {
                vals[start[i] + j - first[i]] += a;
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let (done, cur) = vals.split_at_mut(start[i]);
                let li = &cur[k0 - fi..j - fi];
                let lj = &done[start[j] + k0 - fj..start[j] + j - fj];
                let dot: T = li.iter().zip(lj).map(|(&a, &b)| a * b).sum();
                let ljj = done[start[j] + j - fj];
                cur[j - fi] = (cur[j - fi] - dot) / ljj;
            }
            let row = &mut vals[start[i]..start[i + 1]];
            let (off, diag) = row.split_at_mut(i - fi);
            let d = diag[0] - off.iter().map(|&v| v * v).sum::<T>();
            if !(d > T::zero()) {
                return Err(Error::NotPositiveDefinite { pivot: i, value: d.as_f64() });
            }
            diag[0] = d.sqrt();
        }
        Ok(EnvelopeCholesky { first, start, vals })
    }

    /// Full symmetric matrix in row-major order.
    pub fn factor_dense(a: &[T], n: usize) -> Result<Self> {
        let lower: Vec<Vec<(usize, T)>> = (0..n).map(|i| (0..=i).map(|j| (j, a[i * n + j])).collect()).collect();
        Self::factor(&lower)
    }

    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }

    fn row(&self, i: usize) -> &[T] {
        &self.vals[self.start[i]..self.start[i + 1]]
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.len();
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            let row = self.row(i);
            let fi = self.first[i];
            let s: T = row[..i - fi].iter().zip(&y[fi..i]).map(|(&l, &v)| l * v).sum();
            y[i] = (y[i] - s) / row[i - fi];
        }
        for i in (0..n).rev() {
            let row = self.row(i);
            let fi = self.first[i];
            y[i] /= row[i - fi];
            let xi = y[i];
            for (k, &l) in row[..i - fi].iter().enumerate() {
                y[fi + k] -= l * xi;
            }
        }
        y
    }
}
