use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eigen::symmetric_eigen;
use crate::error::Result;
use crate::scalar::Real;

/// Symmetric matrix stored as diagonal plus off-diagonal adjacency rows.
#[derive(Clone, Debug)]
pub struct SparseSymmetric<T> {
    pub diag: Vec<T>,
    pub off: Vec<Vec<(usize, T)>>,
}

impl<T: Real> SparseSymmetric<T> {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[T], y: &mut [T]) {
        for i in 0..self.len() {
            let s: T = self.off[i].iter().map(|&(j, a)| a * x[j]).sum();
            y[i] = self.diag[i] * x[i] + s;
        }
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> T {
        (0..self.len()).map(|i| self.diag[i].abs() + self.off[i].iter().map(|&(_, a)| a.abs()).sum::<T>()).fold(T::zero(), T::max)
    }
}

/// `exp(−tH) v` by scaled Taylor steps with `‖(t/s)H‖ ≤ 1`.
///
/// Each step is truncated once a term drops below machine precision relative
/// to the partial sum, giving an overall relative error well below 1e-10.
pub fn expmv<T: Real>(h: &SparseSymmetric<T>, t: T, v: &[T]) -> Vec<T> {
    let n = h.len();
    let mut out = v.to_vec();
    if t == T::zero() || n == 0 {
        return out;
    }
    let steps = (t * h.norm_bound()).ceil().max(T::one());
    let dt = t / steps;
    let steps = steps.to_usize().unwrap_or(usize::MAX);
    let mut term = vec![T::zero(); n];
    let mut next = vec![T::zero(); n];
    for _ in 0..steps {
        term.copy_from_slice(&out);
        for k in 1..=80 {
            h.apply(&term, &mut next);
            let c = -dt / T::of_usize(k);
            let mut tmax = T::zero();
            let mut smax = T::zero();
            for i in 0..n {
                term[i] = c * next[i];
                out[i] += term[i];
                tmax = tmax.max(term[i].abs());
                smax = smax.max(out[i].abs());
            }
            if tmax <= T::epsilon() * smax.max(T::min_positive_value()) {
                break;
            }
        }
    }
    out
}

/// Smallest eigenvalue by Lanczos with full reorthogonalisation.
pub fn lanczos_smallest<T: Real>(h: &SparseSymmetric<T>, max_steps: usize, seed: u64) -> Result<T> {
    let n = h.len();
    let m = max_steps.min(n).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<T> = (0..n).map(|_| T::of(rng.random::<f64>() - 0.5)).collect();
    let norm = q.iter().map(|&v| v * v).sum::<T>().sqrt();
    q.iter_mut().for_each(|v| *v /= norm);
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut beta: Vec<T> = Vec::with_capacity(m);
    let mut w = vec![T::zero(); n];
    for j in 0..m {
        h.apply(&q, &mut w);
        let a: T = w.iter().zip(&q).map(|(&x, &y)| x * y).sum();
        alpha.push(a);
        basis.push(q.clone());
        for b in &basis {
            let c: T = w.iter().zip(b).map(|(&x, &y)| x * y).sum();
            w.iter_mut().zip(b).for_each(|(x, &y)| *x -= c * y);
        }
        let bnorm = w.iter().map(|&v| v * v).sum::<T>().sqrt();
        if j + 1 == m || bnorm <= T::epsilon() * a.abs().max(T::one()) {
            break;
        }
        beta.push(bnorm);
        q = w.iter().map(|&v| v / bnorm).collect();
    }
    let k = alpha.len();
    let mut tri = vec![T::zero(); k * k];
    for i in 0..k {
        tri[i * k + i] = alpha[i];
        if i + 1 < k {
            tri[i * k + i + 1] = beta[i];
            tri[(i + 1) * k + i] = beta[i];
        }
    }
    Ok(symmetric_eigen(&tri, k)?.values[0])
}
