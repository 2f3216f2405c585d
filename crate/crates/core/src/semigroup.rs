//! Heat kernels `p_t`, semigroups `P_t`, sandwiched semigroups
//! `P_t^ω = e^ω P_t e^{−ω}` and the bottom of the spectrum.
//!
//! The generator is symmetrised as `H = D^{1/2} Δ D^{−1/2}` with `D = diag(m)`
//! and restricted to non-Dirichlet vertices, so kernels and semigroup outputs
//! vanish on the Dirichlet boundary.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{VertexFunction, WeightedGraph};
use crate::linalg::{expmv, lanczos_smallest, symmetric_eigen, SparseSymmetric, SymmetricEigen};
use crate::metric::{IntrinsicMetric, LipschitzWeight};
use crate::report::CheckReport;
use crate::scalar::Real;

/// Largest active vertex count handled by the dense spectral backend.
pub const DENSE_LIMIT: usize = 3000;
/// Documented accuracy of the Krylov backend.
pub const KRYLOV_TOLERANCE: f64 = 1e-10;
/// Environment variable holding the kernel-slice cache budget in MiB.
pub const CACHE_ENV: &str = "HKLAB_CACHE_MB";
const DEFAULT_CACHE_MB: usize = 256;

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub dense_limit: usize,
    pub cache_bytes: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        let mb = std::env::var(CACHE_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_CACHE_MB);
        BuildOptions { dense_limit: DENSE_LIMIT, cache_bytes: mb * 1024 * 1024 }
    }
}

/// `p_t(x, y)` for all pairs at one time.
#[derive(Clone, Debug)]
pub struct KernelSlice<T> {
    pub t: T,
    n: usize,
    values: Vec<T>,
}

impl<T: Real> KernelSlice<T> {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.values[x * self.n + y]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn row(&self, x: usize) -> &[T] {
        &self.values[x * self.n..(x + 1) * self.n]
    }

    pub fn symmetry_error(&self) -> T {
        let mut worst = T::zero();
        for x in 0..self.n {
            for y in 0..x {
                worst = worst.max((self.get(x, y) - self.get(y, x)).abs());
            }
        }
        worst
    }

    /// `max_x |Σ_y m(y) p_t(x,y) − 1|`.
    pub fn mass_error(&self, measure: &[T]) -> T {
        (0..self.n).map(|x| (self.row(x).iter().zip(measure).map(|(&p, &m)| p * m).sum::<T>() - T::one()).abs()).fold(T::zero(), T::max)
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }
}

enum Backend<T> {
    Dense(SymmetricEigen<T>),
    Krylov(SparseSymmetric<T>),
}

struct SliceCache<T> {
    budget: usize,
    state: Mutex<CacheState<T>>,
}

struct CacheState<T> {
    tick: u64,
    bytes: usize,
    slices: HashMap<u64, (Arc<KernelSlice<T>>, u64)>,
}

impl<T: Real> SliceCache<T> {
    fn new(budget: usize) -> Self {
        SliceCache { budget, state: Mutex::new(CacheState { tick: 0, bytes: 0, slices: HashMap::new() }) }
    }

    fn get(&self, key: u64) -> Option<Arc<KernelSlice<T>>> {
        let mut st = self.state.lock().expect("cache lock");
        st.tick += 1;
        let tick = st.tick;
        st.slices.get_mut(&key).map(|entry| {
            entry.1 = tick;
            entry.0.clone()
        })
    }

    fn insert(&self, key: u64, slice: Arc<KernelSlice<T>>) {
        let size = slice.values.len() * std::mem::size_of::<T>();
        if size > self.budget {
            return;
        }
        let mut st = self.state.lock().expect("cache lock");
        st.tick += 1;
        let tick = st.tick;
        if let Some(old) = st.slices.insert(key, (slice, tick)) {
            st.bytes -= old.0.values.len() * std::mem::size_of::<T>();
        }
        st.bytes += size;
        while st.bytes > self.budget {
            let victim = st.slices.iter().min_by_key(|(_, (_, t))| *t).map(|(&k, _)| k);
            match victim {
                Some(k) => {
                    let (s, _) = st.slices.remove(&k).expect("victim present");
                    st.bytes -= s.values.len() * std::mem::size_of::<T>();
                }
                None => break,
            }
        }
    }

    fn len(&self) -> usize {
        self.state.lock().expect("cache lock").slices.len()
    }
}

/// Spectral data of the Dirichlet-restricted Laplacian of a graph.
pub struct HeatSystem<T> {
    n: usize,
    measure: Vec<T>,
    active: Vec<usize>,
    slot: Vec<Option<usize>>,
    sqrt_m: Vec<T>,
    has_boundary: bool,
    backend: Backend<T>,
    lambda_bottom: T,
    cache: SliceCache<T>,
}

fn check_time<T: Real>(t: T) -> Result<()> {
    if t < T::zero() || t.is_nan() {
        return Err(Error::NegativeTime(t.as_f64()));
    }
    Ok(())
}

impl<T: Real> HeatSystem<T> {
    pub fn build(g: &WeightedGraph<T>) -> Result<Self> {
        Self::build_with(g, &BuildOptions::default())
    }

    pub fn build_with(g: &WeightedGraph<T>, opts: &BuildOptions) -> Result<Self> {
        let n = g.len();
        let active = g.active_vertices();
        if active.is_empty() {
            return Err(Error::Precondition("every vertex is on the Dirichlet boundary".into()));
        }
        let mut slot = vec![None; n];
        for (a, &x) in active.iter().enumerate() {
            slot[x] = Some(a);
        }
        let sqrt_m: Vec<T> = active.iter().map(|&x| g.measure(x).sqrt()).collect();
        let na = active.len();
        let has_boundary = g.has_dirichlet();
        let diag: Vec<T> = active.iter().map(|&x| g.degrees()[x] / g.measure(x)).collect();
        let off: Vec<Vec<(usize, T)>> = active
            .iter()
            .enumerate()
            .map(|(a, &x)| g.neighbors(x).iter().filter_map(|&(y, b)| slot[y].map(|c| (c, -b / (sqrt_m[a] * sqrt_m[c])))).collect())
            .collect();
        let (backend, lambda_bottom) = if na <= opts.dense_limit {
            let mut h = vec![T::zero(); na * na];
            for a in 0..na {
                h[a * na + a] = diag[a];
                for &(c, v) in &off[a] {
                    h[a * na + c] = v;
                }
            }
            let mut eig = symmetric_eigen(&h, na)?;
            for v in &mut eig.values {
                *v = v.max(T::zero());
            }
            if !has_boundary {
                eig.values[0] = T::zero();
            }
            let lambda = eig.values[0];
            (Backend::Dense(eig), lambda)
        } else {
            let sparse = SparseSymmetric { diag, off };
            let lambda = if has_boundary { lanczos_smallest(&sparse, 300, 0x5eed)?.max(T::zero()) } else { T::zero() };
            log::info!("using Krylov backend for {na} active vertices (tolerance {KRYLOV_TOLERANCE:e})");
            (Backend::Krylov(sparse), lambda)
        };
        Ok(HeatSystem {
            n,
            measure: g.measures().to_vec(),
            active,
            slot,
            sqrt_m,
            has_boundary,
            backend,
            lambda_bottom,
            cache: SliceCache::new(opts.cache_bytes),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `Λ = inf spec(Δ)`.
    pub fn lambda_bottom(&self) -> T {
        self.lambda_bottom
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.backend, Backend::Dense(_))
    }

    pub fn has_boundary(&self) -> bool {
        self.has_boundary
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn measures(&self) -> &[T] {
        &self.measure
    }

    /// Eigenvalues (dense backend only).
    pub fn eigenvalues(&self) -> Option<&[T]> {
        match &self.backend {
            Backend::Dense(e) => Some(&e.values),
            Backend::Krylov(_) => None,
        }
    }

    fn eigen(&self) -> Result<&SymmetricEigen<T>> {
        match &self.backend {
            Backend::Dense(e) => Ok(e),
            Backend::Krylov(_) => Err(Error::Precondition("operation needs the dense spectral backend".into())),
        }
    }

    /// `k`-th eigenfunction, orthonormal in `ℓ²(X, m)` and zero on the boundary.
    pub fn eigenfunction(&self, k: usize) -> Result<VertexFunction<T>> {
        let e = self.eigen()?;
        let u = e.vector(k);
        Ok(self.unsym(u))
    }

    /// Symmetrised matrix `H` over active vertices, row-major.
    pub fn symmetric_matrix(&self) -> Vec<T> {
        let na = self.active.len();
        match &self.backend {
            Backend::Dense(e) => {
                let mut h = vec![T::zero(); na * na];
                for k in 0..na {
                    let u = e.vector(k);
                    for i in 0..na {
                        let a = e.values[k] * u[i];
                        for j in 0..na {
                            h[i * na + j] += a * u[j];
                        }
                    }
                }
                h
            }
            Backend::Krylov(s) => {
                let mut h = vec![T::zero(); na * na];
                for i in 0..na {
                    h[i * na + i] = s.diag[i];
                    for &(j, v) in &s.off[i] {
                        h[i * na + j] = v;
                    }
                }
                h
            }
        }
    }

    fn to_sym(&self, f: &[T]) -> Vec<T> {
        assert_eq!(f.len(), self.n, "vertex function length does not match the graph");
        self.active.iter().zip(&self.sqrt_m).map(|(&x, &s)| f[x] * s).collect()
    }

    fn unsym(&self, h: &[T]) -> VertexFunction<T> {
        let mut out = VertexFunction::zeros(self.n);
        for (a, &x) in self.active.iter().enumerate() {
            out[x] = h[a] / self.sqrt_m[a];
        }
        out
    }

    fn sym_evolve(&self, t: T, g: &[T], derivative: bool) -> Vec<T> {
        match &self.backend {
            Backend::Dense(e) => {
                let na = self.active.len();
                let mut out = vec![T::zero(); na];
                for k in 0..na {
                    let u = e.vector(k);
                    let c = (-(e.values[k] * t)).exp();
                    if c == T::zero() {
                        continue;
                    }
                    let mut coef: T = u.iter().zip(g).map(|(&a, &b)| a * b).sum::<T>() * c;
                    if derivative {
                        coef = -coef * e.values[k];
                    }
                    out.iter_mut().zip(u).for_each(|(o, &ui)| *o += coef * ui);
                }
                out
            }
            Backend::Krylov(s) => {
                let h = expmv(s, t, g);
                if derivative {
                    let mut d = vec![T::zero(); h.len()];
                    s.apply(&h, &mut d);
                    d.iter_mut().for_each(|v| *v = -*v);
                    d
                } else {
                    h
                }
            }
        }
    }

    /// `P_t f`; values of `f` on Dirichlet vertices are ignored.
    pub fn semigroup_apply(&self, t: T, f: &VertexFunction<T>) -> Result<VertexFunction<T>> {
        check_time(t)?;
        Ok(self.unsym(&self.sym_evolve(t, &self.to_sym(f), false)))
    }

    /// `d/dt P_t f = −Δ P_t f`, evaluated spectrally.
    pub fn semigroup_derivative(&self, t: T, f: &VertexFunction<T>) -> Result<VertexFunction<T>> {
        check_time(t)?;
        Ok(self.unsym(&self.sym_evolve(t, &self.to_sym(f), true)))
    }

    /// `P_t^ω f = e^ω P_t (e^{−ω} f)`.
    pub fn sandwiched_semigroup(&self, omega: &VertexFunction<T>, t: T, f: &VertexFunction<T>) -> Result<VertexFunction<T>> {
        let g = f.zip_map(omega, |v, w| v * (-w).exp());
        let p = self.semigroup_apply(t, &g)?;
        Ok(p.zip_map(omega, |v, w| v * w.exp()))
    }

    pub fn sandwiched_derivative(&self, omega: &VertexFunction<T>, t: T, f: &VertexFunction<T>) -> Result<VertexFunction<T>> {
        let g = f.zip_map(omega, |v, w| v * (-w).exp());
        let p = self.semigroup_derivative(t, &g)?;
        Ok(p.zip_map(omega, |v, w| v * w.exp()))
    }

    /// Full kernel slice at time `t`, cached per time value.
    pub fn heat_kernel(&self, t: T) -> Result<Arc<KernelSlice<T>>> {
        check_time(t)?;
        let key = t.as_f64().to_bits();
        if let Some(s) = self.cache.get(key) {
            return Ok(s);
        }
        let slice = Arc::new(self.compute_slice(t));
        self.cache.insert(key, slice.clone());
        Ok(slice)
    }

    pub fn cached_slices(&self) -> usize {
        self.cache.len()
    }

    fn compute_slice(&self, t: T) -> KernelSlice<T> {
        let n = self.n;
        let na = self.active.len();
        let sym: Vec<Vec<T>> = match &self.backend {
            Backend::Dense(e) => {
                let weights: Vec<T> = e.values.iter().map(|&l| (-(l * t)).exp()).collect();
                (0..na)
                    .into_par_iter()
                    .map(|i| {
                        let mut row = vec![T::zero(); na];
                        for k in 0..na {
                            if weights[k] == T::zero() {
                                continue;
                            }
                            let u = e.vector(k);
                            let a = weights[k] * u[i];
                            row.iter_mut().zip(u).for_each(|(r, &uj)| *r += a * uj);
                        }
                        row
                    })
                    .collect()
            }
            Backend::Krylov(s) => (0..na)
                .into_par_iter()
                .map(|i| {
                    let mut e = vec![T::zero(); na];
                    e[i] = T::one();
                    expmv(s, t, &e)
                })
                .collect(),
        };
        let mut values = vec![T::zero(); n * n];
        for (a, row) in sym.iter().enumerate() {
            let x = self.active[a];
            for (c, &v) in row.iter().enumerate() {
                let y = self.active[c];
                values[x * n + y] = v / (self.sqrt_m[a] * self.sqrt_m[c]);
            }
        }
        // Exact symmetry: average the two computed triangles.
        for x in 0..n {
            for y in 0..x {
                let v = (values[x * n + y] + values[y * n + x]) / T::of(2.0);
                values[x * n + y] = v;
                values[y * n + x] = v;
            }
        }
        KernelSlice { t, n, values }
    }

    /// Single entry `p_t(x, y)` without materialising the slice.
    pub fn kernel_entry(&self, x: usize, y: usize, t: T) -> Result<T> {
        check_time(t)?;
        let (Some(a), Some(c)) = (self.slot[x], self.slot[y]) else {
            return Ok(T::zero());
        };
        let mut e = vec![T::zero(); self.active.len()];
        e[c] = T::one();
        let col = self.sym_evolve(t, &e, false);
        Ok(col[a] / (self.sqrt_m[a] * self.sqrt_m[c]))
    }

    /// `‖P_t^ω‖_{2,2}` on `ℓ²(X, m)`.
    pub fn sandwiched_norm(&self, omega: &VertexFunction<T>, t: T) -> Result<T> {
        check_time(t)?;
        let na = self.active.len();
        let slice = self.heat_kernel(t)?;
        let w: Vec<T> = self.active.iter().map(|&x| omega[x]).collect();
        // M = E K E^{-1} in symmetric coordinates; ‖M‖² = λ_max(MᵀM).
        let mut m = vec![T::zero(); na * na];
        for i in 0..na {
            for j in 0..na {
                let (x, y) = (self.active[i], self.active[j]);
                let k = slice.get(x, y) * self.sqrt_m[i] * self.sqrt_m[j];
                m[i * na + j] = k * (w[i] - w[j]).exp();
            }
        }
        let mut mtm = vec![T::zero(); na * na];
        for i in 0..na {
            for j in 0..=i {
                let s: T = (0..na).map(|k| m[k * na + i] * m[k * na + j]).sum();
                mtm[i * na + j] = s;
                mtm[j * na + i] = s;
            }
        }
        let eig = symmetric_eigen(&mtm, na)?;
        Ok(eig.values[na - 1].max(T::zero()).sqrt())
    }

    /// Spectral coefficients of `P_t^ω f`, for repeated evaluation in `t`.
    pub fn evolution(&self, omega: Option<&VertexFunction<T>>, f: &VertexFunction<T>) -> Result<Evolution<'_, T>> {
        let eig = self.eigen()?;
        let exp_omega: Vec<T> = match omega {
            Some(w) => w.iter().map(|v| v.exp()).collect(),
            None => vec![T::one(); self.n],
        };
        let g: Vec<T> = f.iter().zip(&exp_omega).map(|(&v, &e)| v / e).collect();
        let gs = self.to_sym(&g);
        let coeffs = (0..self.active.len()).map(|k| eig.vector(k).iter().zip(&gs).map(|(&a, &b)| a * b).sum()).collect();
        Ok(Evolution { hs: self, eig, exp_omega, coeffs })
    }
}

/// `t ↦ P_t^ω f` with precomputed spectral coefficients (dense backend).
pub struct Evolution<'a, T> {
    hs: &'a HeatSystem<T>,
    eig: &'a SymmetricEigen<T>,
    exp_omega: Vec<T>,
    coeffs: Vec<T>,
}

impl<'a, T: Real> Evolution<'a, T> {
    fn combine(&self, weight: impl Fn(T) -> T) -> VertexFunction<T> {
        let na = self.coeffs.len();
        let mut h = vec![T::zero(); na];
        for k in 0..na {
            let c = self.coeffs[k] * weight(self.eig.values[k]);
            if c == T::zero() {
                continue;
            }
            h.iter_mut().zip(self.eig.vector(k)).for_each(|(o, &u)| *o += c * u);
        }
        let mut out = self.hs.unsym(&h);
        out.iter_mut().zip(&self.exp_omega).for_each(|(v, &e)| *v *= e);
        out
    }

    pub fn at(&self, t: T) -> VertexFunction<T> {
        self.combine(|l| (-(l * t)).exp())
    }

    /// Exact time derivative `∂_t P_t^ω f = −Δ_ω P_t^ω f`.
    pub fn derivative(&self, t: T) -> VertexFunction<T> {
        self.combine(|l| -l * (-(l * t)).exp())
    }

    pub fn system(&self) -> &'a HeatSystem<T> {
        self.hs
    }
}

/// Centered-difference step used by derivative audits.
pub fn fd_step<T: Real>(t: T) -> T {
    T::of(1e-5) * t.max(T::one())
}

/// Compares a centered difference of `P_t f` with `−Δ P_t f`.
pub fn check_heat_equation<T: Real>(
    hs: &HeatSystem<T>,
    g: &WeightedGraph<T>,
    omega: Option<&VertexFunction<T>>,
    t: T,
    f: &VertexFunction<T>,
) -> Result<CheckReport> {
    let h = fd_step(t);
    let zero = VertexFunction::zeros(g.len());
    let w = omega.unwrap_or(&zero);
    let t_lo = (t - h).max(T::zero());
    let plus = hs.sandwiched_semigroup(w, t + h, f)?;
    let minus = hs.sandwiched_semigroup(w, t_lo, f)?;
    let value = hs.sandwiched_semigroup(w, t, f)?;
    let gen = g.sandwiched_apply(w, &value);
    let mut worst = T::zero();
    let mut scale = T::zero();
    for x in hs.active() {
        let fd = (plus[*x] - minus[*x]) / (t + h - t_lo);
        worst = worst.max((fd + gen[*x]).abs());
        scale = scale.max(gen[*x].abs());
    }
    let scale = scale + T::of(1e-3) * value.sup_abs();
    Ok(CheckReport::linear("heat-equation", format!("t={t}"), worst.as_f64(), 1e-6 * scale.as_f64(), 0.0))
}

/// Monotonicity of `Φ(t) = exp(2Λt − 2S^{−2}(cosh κS − 1)t) ‖e^ω P_t f‖²`
/// along `grid`; reports the largest upward jump against `1e−9 Φ(0)`.
pub fn phi_monotone<T: Real>(
    hs: &HeatSystem<T>,
    metric: &IntrinsicMetric<T>,
    weight: &LipschitzWeight<T>,
    f: &VertexFunction<T>,
    grid: &[T],
) -> Result<CheckReport> {
    LipschitzWeight::new(metric, weight.omega().clone(), weight.kappa())?;
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition("time grid must be strictly increasing".into()));
    }
    let s = metric.jump_size();
    let gamma = T::of(2.0) / (s * s) * ((weight.kappa() * s).cosh() - T::one());
    let rate = T::of(2.0) * hs.lambda_bottom() - gamma;
    let evo = hs.evolution(None, f)?;
    let m = hs.measures();
    let ew: Vec<T> = weight.omega().iter().map(|v| (T::of(2.0) * *v).exp()).collect();
    let phi = |t: T| -> T {
        let u = evo.at(t);
        let norm: T = u.iter().zip(m).zip(&ew).map(|((&v, &mm), &e)| mm * e * v * v).sum();
        (rate * t).exp() * norm
    };
    let phi0 = phi(T::zero());
    let values: Vec<T> = grid.iter().map(|&t| phi(t)).collect();
    let mut jump = T::zero();
    let mut prev = phi0;
    for &v in &values {
        jump = jump.max(v - prev);
        prev = v;
    }
    Ok(CheckReport::linear(
        "integrated-max-principle",
        format!("kappa={} grid={}", weight.kappa(), grid.len()),
        jump.as_f64(),
        1e-9 * phi0.as_f64(),
        0.0,
    ))
}
