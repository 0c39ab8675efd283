//! Recursive kernel least squares with an optional dictionary budget.
//!
//! Every observation is admitted to the dictionary by a rank-1 update of
//! `Q = (K_DD + lambda I)^-1`. When the dictionary exceeds the budget, the
//! basis with the smallest score `|a_i|^2 / Q_ii` is removed by a rank-1
//! downdate. That score equals `da^H (K + lambda I) da`, where `da` is the
//! change in coefficients caused by re-solving without basis `i`.
//!
//! Only kernels with a null pseudo-kernel are supported. For real-valued
//! kernels `Q` is kept real. `Q` is stored as its packed lower triangle plus
//! a short list of pending rank-1 terms that are folded in every
//! [`FLUSH_EVERY`] updates or before any downdate.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::kernels::KernelSpec;
use crate::linalg::{Cholesky, Matrix};
use crate::regression::WrkhsModel;
use crate::scalar::Field;
use crate::{Error, Result};

/// Observations between inverse-residual probes.
pub const CHECK_INTERVAL: usize = 500;

/// Largest tolerated entry of `(K + lambda I) Q - I` in a probe.
pub const INVERSE_TOL: f64 = 1e-6;

/// Pending rank-1 terms kept before they are folded into `Q`.
pub const FLUSH_EVERY: usize = 32;

/// A rank-1 update whose Schur complement falls below this fraction of
/// `lambda` triggers a rebuild.
const SCHUR_FLOOR: f64 = 0.5;

#[derive(Clone, Debug)]
struct Core<T> {
    dict: Vec<Vec<Complex64>>,
    targets: Vec<Complex64>,
    alpha: Vec<Complex64>,
    /// Row `i` holds `Q[i][0..=i]`.
    q: Vec<Vec<T>>,
    /// `Q = q + sum p p^H`, each `p` covering the leading `p.len()` indices.
    pending: Vec<Vec<T>>,
}

impl<T: Field> Core<T> {
    fn new() -> Self {
        Core {
            dict: Vec::new(),
            targets: Vec::new(),
            alpha: Vec::new(),
            q: Vec::new(),
            pending: Vec::new(),
        }
    }

    /// Entry of the stored part only; callers flush first.
    #[inline]
    fn q_at(&self, i: usize, j: usize) -> T {
        debug_assert!(self.pending.is_empty());
        if j <= i {
            self.q[i][j]
        } else {
            self.q[j][i].conj()
        }
    }

    fn flush(&mut self) {
        if self.pending.is_empty() {
            return;
        }
        for (i, row) in self.q.iter_mut().enumerate() {
            for p in self.pending.iter().filter(|p| p.len() > i) {
                let pi = p[i];
                for (r, pj) in row.iter_mut().zip(&p[..=i]) {
                    *r += pi * pj.conj();
                }
            }
        }
        self.pending.clear();
    }

    /// `Q v` including pending terms.
    fn q_mul(&self, v: &[T]) -> Vec<T> {
        let mut out = self.q_mul_stored(v);
        for p in &self.pending {
            let w = p.iter().zip(v).fold(T::zero(), |acc, (pj, vj)| acc + pj.conj() * *vj);
            for (o, pj) in out.iter_mut().zip(p) {
                *o += *pj * w;
            }
        }
        out
    }

    /// `q v` using the packed Hermitian storage.
    fn q_mul_stored(&self, v: &[T]) -> Vec<T> {
        let n = self.q.len();
        let mut out = vec![T::zero(); n];
        for i in 0..n {
            let (row, diag) = self.q[i].split_at(i);
            let vi = v[i];
            let mut acc = [T::zero(); 4];
            let mut rows = row.chunks_exact(4);
            let mut vs = v[..i].chunks_exact(4);
            let mut outs = out[..i].chunks_exact_mut(4);
            for ((r, vj), o) in (&mut rows).zip(&mut vs).zip(&mut outs) {
                for k in 0..4 {
                    acc[k] += r[k] * vj[k];
                    o[k] += r[k].conj() * vi;
                }
            }
            let mut tail = diag[0] * vi;
            for ((r, vj), o) in rows.remainder().iter().zip(vs.remainder()).zip(outs.into_remainder()) {
                tail += *r * *vj;
                *o += r.conj() * vi;
            }
            out[i] += (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail;
        }
        out
    }

    /// `b_i = k(d_i, x)`.
    fn kernel_column(&self, spec: &KernelSpec, x: &[Complex64]) -> Vec<T> {
        self.dict
            .iter()
            .map(|d| T::from_complex_lossy(spec.pair_unchecked(d, x).0.value))
            .collect()
    }

    fn predict_from_column(&self, b: &[T]) -> Complex64 {
        b.iter()
            .zip(&self.alpha)
            .fold(Complex64::new(0.0, 0.0), |acc, (bi, a)| acc + bi.conj().to_complex() * a)
    }

    /// Admits `(x, y)`. Returns false if the update was numerically unsafe
    /// and the caller must rebuild; the sample is stored either way.
    fn grow(&mut self, x: &[Complex64], y: Complex64, b: &[T], kxx: f64, lambda: f64, y_hat: Complex64) -> bool {
        self.dict.push(x.to_vec());
        self.targets.push(y);
        let u = self.q_mul(b);
        let quad: f64 = b.iter().zip(&u).map(|(bi, ui)| (bi.conj() * *ui).re()).sum();
        let s = kxx + lambda - quad;
        if !(s >= SCHUR_FLOOR * lambda) || !s.is_finite() {
            log::debug!("schur complement {s:e} below floor; rebuilding");
            return false;
        }
        let inv_s = 1.0 / s;
        if !u.is_empty() {
            let root = libm::sqrt(inv_s);
            self.pending.push(u.iter().map(|ui| ui.scale(root)).collect());
        }
        let mut last: Vec<T> = u.iter().map(|ui| -ui.conj().scale(inv_s)).collect();
        last.push(T::from_real(inv_s));
        self.q.push(last);
        let step = (y - y_hat) * inv_s;
        for (a, ui) in self.alpha.iter_mut().zip(&u) {
            *a -= ui.to_complex() * step;
        }
        self.alpha.push(step);
        true
    }

    /// Requires flushed state.
    fn scores(&self) -> Vec<f64> {
        self.alpha
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() / self.q[i][i].re())
            .collect()
    }

    fn argmin_score(&self) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, s) in self.scores().into_iter().enumerate() {
            if s < best.1 {
                best = (i, s);
            }
        }
        best.0
    }

    /// Removes basis `i` by the block-inverse identity.
    fn remove(&mut self, i: usize) {
        self.flush();
        let n = self.q.len();
        let qii = self.q[i][i].re();
        let v: Vec<T> = (0..n).map(|a| self.q_at(a, i)).collect();
        let ai = self.alpha[i];
        for (a, row) in self.q.iter_mut().enumerate() {
            if a == i {
                continue;
            }
            let va = v[a].scale(1.0 / qii);
            for (b, r) in row.iter_mut().enumerate() {
                if b != i {
                    *r -= va * v[b].conj();
                }
            }
        }
        for (a, alpha) in self.alpha.iter_mut().enumerate() {
            if a != i {
                *alpha -= v[a].to_complex() * ai / qii;
            }
        }
        self.q.remove(i);
        for row in self.q.iter_mut().skip(i) {
            row.remove(i);
        }
        self.alpha.remove(i);
        self.dict.remove(i);
        self.targets.remove(i);
    }

    fn loaded_gram(&self, spec: &KernelSpec, lambda: f64) -> Matrix<T> {
        let n = self.dict.len();
        let mut a: Matrix<T> = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let k = T::from_complex_lossy(spec.pair_unchecked(&self.dict[i], &self.dict[j]).0.value);
                a[(i, j)] = k;
                a[(j, i)] = k.conj();
            }
            a[(i, i)] = T::from_real(a[(i, i)].re() + lambda);
        }
        a
    }

    fn rebuild(&mut self, spec: &KernelSpec, lambda: f64) -> Result<()> {
        let a = self.loaded_gram(spec, lambda);
        let inv = Cholesky::factor_with_jitter(&a)?.inverse()?;
        let n = inv.nrows();
        self.q = (0..n).map(|i| inv.row(i)[..=i].to_vec()).collect();
        self.pending.clear();
        self.alpha = (0..n)
            .map(|i| {
                (0..n).fold(Complex64::new(0.0, 0.0), |acc, j| {
                    acc + self.q_at(i, j).to_complex() * self.targets[j]
                })
            })
            .collect();
        if self.alpha.iter().any(|a| !Field::is_finite(*a)) {
            return Err(Error::NonFinite("online coefficients"));
        }
        Ok(())
    }

    /// Max deviation from `e_j^T` of row `j` of `(K + lambda I) Q`.
    fn probe_row(&self, spec: &KernelSpec, lambda: f64, j: usize) -> f64 {
        let dj = &self.dict[j];
        let mut a: Vec<T> = self
            .dict
            .iter()
            .map(|d| T::from_complex_lossy(spec.pair_unchecked(dj, d).0.value).conj())
            .collect();
        a[j] += T::from_real(lambda);
        // row j of A Q is conj(Q conj(a_j)) for Hermitian Q
        let r = self.q_mul(&a);
        r.iter()
            .enumerate()
            .map(|(m, v)| (v.conj() - if m == j { T::one() } else { T::zero() }).abs())
            .fold(0.0, f64::max)
    }

    fn inverse_residual(&self, spec: &KernelSpec, lambda: f64) -> f64 {
        (0..self.dict.len())
            .map(|j| self.probe_row(spec, lambda, j))
            .fold(0.0, f64::max)
    }

    fn inverse_matrix(&self) -> Matrix<Complex64> {
        let mut c = self.clone();
        c.flush();
        let n = c.q.len();
        Matrix::from_fn(n, n, |i, j| c.q_at(i, j).to_complex())
    }
}

#[derive(Clone, Debug)]
enum State {
    Real(Core<f64>),
    Complex(Core<Complex64>),
}

macro_rules! with_core {
    ($state:expr, $c:ident => $body:expr) => {
        match $state {
            State::Real($c) => $body,
            State::Complex($c) => $body,
        }
    };
}

/// Online recursive least-squares model. `Clone` gives an independent
/// snapshot.
#[derive(Clone, Debug)]
pub struct OnlineModel {
    spec: KernelSpec,
    lambda: f64,
    budget: Option<usize>,
    dim: Option<usize>,
    observed: usize,
    rebuilds: usize,
    state: State,
}

impl OnlineModel {
    /// Empty model. `budget = None` keeps every sample.
    pub fn new(spec: KernelSpec, lambda: f64, budget: Option<usize>) -> Result<Self> {
        spec.validate()?;
        if !spec.has_null_pseudo_kernel() {
            return Err(Error::NonNullPseudoKernel);
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::invalid("lambda", "must be positive and finite"));
        }
        if budget == Some(0) {
            return Err(Error::invalid("budget", "must be at least 1"));
        }
        let state = if spec.is_real_valued() {
            State::Real(Core::new())
        } else {
            State::Complex(Core::new())
        };
        Ok(OnlineModel {
            spec,
            lambda,
            budget,
            dim: None,
            observed: 0,
            rebuilds: 0,
            state,
        })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn budget(&self) -> Option<usize> {
        self.budget
    }

    /// Dictionary size.
    pub fn len(&self) -> usize {
        with_core!(&self.state, c => c.dict.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of observations seen.
    pub fn observed(&self) -> usize {
        self.observed
    }

    /// Number of full re-factorizations performed.
    pub fn rebuilds(&self) -> usize {
        self.rebuilds
    }

    pub fn dictionary(&self) -> &[Vec<Complex64>] {
        with_core!(&self.state, c => &c.dict)
    }

    pub fn alpha(&self) -> &[Complex64] {
        with_core!(&self.state, c => &c.alpha)
    }

    /// Targets of the retained bases.
    pub fn targets(&self) -> &[Complex64] {
        with_core!(&self.state, c => &c.targets)
    }

    /// Pruning score `|a_i|^2 / Q_ii` of each basis.
    pub fn pruning_scores(&self) -> Vec<f64> {
        with_core!(&self.state, c => {
            if c.pending.is_empty() {
                c.scores()
            } else {
                let mut c = c.clone();
                c.flush();
                c.scores()
            }
        })
    }

    /// The maintained inverse as a dense complex matrix.
    pub fn inverse_matrix(&self) -> Matrix<Complex64> {
        with_core!(&self.state, c => c.inverse_matrix())
    }

    /// `max |(K_DD + lambda I) Q - I|`, recomputed from the dictionary.
    pub fn inverse_residual(&self) -> f64 {
        with_core!(&self.state, c => c.inverse_residual(&self.spec, self.lambda))
    }

    fn check_dim(&self, x: &[Complex64]) -> Result<()> {
        match self.dim {
            Some(d) if d != x.len() => Err(Error::DimensionMismatch {
                expected: d,
                found: x.len(),
            }),
            _ if x.is_empty() => Err(Error::Empty("input dimension is zero")),
            _ => Ok(()),
        }
    }

    /// Kernel expansion over the current dictionary; zero when empty.
    pub fn predict(&self, x: &[Complex64]) -> Result<Complex64> {
        self.check_dim(x)?;
        Ok(with_core!(&self.state, c => {
            let b = c.kernel_column(&self.spec, x);
            c.predict_from_column(&b)
        }))
    }

    /// Predicts `y` from the current state, then learns `(x, y)`. Returns the
    /// prediction made before the update.
    pub fn observe(&mut self, x: &[Complex64], y: Complex64) -> Result<Complex64> {
        self.check_dim(x)?;
        if !Field::is_finite(y) || x.iter().any(|v| !Field::is_finite(*v)) {
            return Err(Error::NonFinite("observation"));
        }
        self.dim = Some(x.len());
        self.observed += 1;
        let (spec, lambda, budget) = (&self.spec, self.lambda, self.budget);
        let probe = self.observed.is_multiple_of(CHECK_INTERVAL);
        let mut rebuilt = 0;
        let y_hat = with_core!(&mut self.state, c => {
            let b = c.kernel_column(spec, x);
            let y_hat = c.predict_from_column(&b);
            let kxx = spec.pair_unchecked(x, x).0.value.re;
            if !c.grow(x, y, &b, kxx, lambda, y_hat) {
                c.rebuild(spec, lambda)?;
                rebuilt += 1;
            }
            if let Some(m) = budget {
                while c.dict.len() > m {
                    c.flush();
                    let i = c.argmin_score();
                    c.remove(i);
                }
            }
            if c.pending.len() >= FLUSH_EVERY {
                c.flush();
            }
            if probe && !c.dict.is_empty() {
                let j = (self.observed / CHECK_INTERVAL) % c.dict.len();
                let r = c.probe_row(spec, lambda, j);
                if !(r <= INVERSE_TOL) {
                    log::warn!("inverse residual {r:e} after {} observations; rebuilding", self.observed);
                    c.rebuild(spec, lambda)?;
                    rebuilt += 1;
                }
            }
            y_hat
        });
        self.rebuilds += rebuilt;
        Ok(y_hat)
    }

    /// The current expansion as a batch model.
    pub fn to_model(&self) -> Result<WrkhsModel> {
        let d = self.dim.ok_or(Error::Empty("online model has no observations"))?;
        let dict = self.dictionary();
        let inputs = Matrix::from_fn(dict.len(), d, |i, j| dict[i][j]);
        WrkhsModel::new(inputs, self.spec.clone(), self.lambda, self.alpha().to_vec())
    }
}
