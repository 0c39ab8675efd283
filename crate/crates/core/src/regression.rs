//! Batch ridge regression with a kernel and a pseudo-kernel.
//!
//! Three fit routes solve the same problem:
//!
//! * composite: the `2n` real system `(K_com + lambda I) a_com = [y_r; y_j]`,
//! * augmented: the `2n` complex system `(K_aug + lambda I) a_aug = [y; conj y]`,
//! * Schur: the augmented system reduced to two `n x n` Hermitian solves
//!   through `C = K + lambda I` and `P = C - K~ conj(C)^-1 conj(K~)`.
//!
//! They are related by `a_aug = T a_com = [a; conj a]`. The augmented route is
//! the default. The ridge weight is used as a plain diagonal load.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::kernels::{augmented_gram, composite_blocks, composite_gram, gram_pair, gram_pair_symmetric, KernelSpec};
use crate::linalg::{Cholesky, Matrix};
use crate::repr::{to_augmented, to_composite, AugmentedVector, ComplexDataset, CompositeVector};
use crate::scalar::Field;
use crate::{Error, Result};

/// Floor returned by [`mse_db`] for an exact fit.
pub const MSE_DB_FLOOR: f64 = -320.0;

/// Largest tolerated gap between the two halves of an augmented solution.
pub const CONJUGATE_TOL: f64 = 1e-6;

/// Largest tolerated normwise backward error of a linear solve.
pub const RESIDUAL_TOL: f64 = 1e-9;

const BLOCK_SYMMETRY_SAMPLES: usize = 16;

/// Ridge weight. Zero is allowed; the solver then falls back to a diagonal
/// jitter if the Gram matrix is singular.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RidgeConfig {
    pub lambda: f64,
}

impl RidgeConfig {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::invalid("lambda", "must be finite and non-negative"));
        }
        Ok(RidgeConfig { lambda })
    }
}

/// Fit route selector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FitPath {
    Composite,
    #[default]
    Augmented,
    Schur,
}

/// A fitted model `f(x) = k(x, X) a + k~(x, X) conj(a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WrkhsModel {
    inputs: Matrix<Complex64>,
    kernel: KernelSpec,
    lambda: f64,
    alpha: Vec<Complex64>,
}

impl WrkhsModel {
    pub fn new(
        inputs: Matrix<Complex64>,
        kernel: KernelSpec,
        lambda: f64,
        alpha: Vec<Complex64>,
    ) -> Result<Self> {
        kernel.validate()?;
        RidgeConfig::new(lambda)?;
        if inputs.nrows() != alpha.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.nrows(),
                found: alpha.len(),
            });
        }
        if alpha.iter().any(|a| !Field::is_finite(*a)) {
            return Err(Error::NonFinite("coefficients"));
        }
        Ok(WrkhsModel {
            inputs,
            kernel,
            lambda,
            alpha,
        })
    }

    pub fn inputs(&self) -> &Matrix<Complex64> {
        &self.inputs
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> &[Complex64] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.ncols()
    }

    /// Predictions at the rows of `xs`.
    pub fn predict(&self, xs: &Matrix<Complex64>) -> Result<Vec<Complex64>> {
        if xs.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: xs.ncols(),
            });
        }
        let g = gram_pair(&self.kernel, xs, &self.inputs)?;
        let alpha_conj: Vec<Complex64> = self.alpha.iter().map(|a| a.conj()).collect();
        let with_pseudo = !self.kernel.has_null_pseudo_kernel();
        Ok((0..xs.nrows())
            .map(|i| {
                let mut f = crate::linalg::dot(g.kernel.row(i), &self.alpha);
                if with_pseudo {
                    f += crate::linalg::dot(g.pseudo.row(i), &alpha_conj);
                }
                f
            })
            .collect())
    }

    pub fn predict_one(&self, x: &[Complex64]) -> Result<Complex64> {
        let xs = Matrix::from_row_major(1, x.len(), x.to_vec())?;
        Ok(self.predict(&xs)?[0])
    }

    /// Training-set MSE in dB.
    pub fn training_mse_db(&self, targets: &[Complex64]) -> Result<f64> {
        mse_db(&self.predict(&self.inputs)?, targets)
    }
}

/// A model fitted through the composite route, kept in composite form.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeModel {
    inputs: Matrix<Complex64>,
    kernel: KernelSpec,
    lambda: f64,
    alpha: CompositeVector,
}

impl CompositeModel {
    pub fn alpha(&self) -> &CompositeVector {
        &self.alpha
    }

    /// `[f_r; f_j] = K_com(xs, X) a_com`, reassembled as `f_r + j f_j`.
    pub fn predict(&self, xs: &Matrix<Complex64>) -> Result<Vec<Complex64>> {
        let b = composite_blocks(&self.kernel, xs, &self.inputs)?;
        let (ar, aj) = (self.alpha.real(), self.alpha.imag());
        Ok((0..xs.nrows())
            .map(|i| {
                let fr = crate::linalg::dot(b.rr.row(i), ar) + crate::linalg::dot(b.rj.row(i), aj);
                let fj = crate::linalg::dot(b.jr.row(i), ar) + crate::linalg::dot(b.jj.row(i), aj);
                Complex64::new(2.0 * fr, 2.0 * fj)
            })
            .collect())
    }

    /// The equivalent complex-coefficient model, `a = a_r + j a_j`.
    pub fn to_wrkhs(&self) -> Result<WrkhsModel> {
        WrkhsModel::new(
            self.inputs.clone(),
            self.kernel.clone(),
            self.lambda,
            self.alpha.to_complex(),
        )
    }
}

fn prepare(data: &ComplexDataset, spec: &KernelSpec) -> Result<()> {
    spec.validate()?;
    spec.check_block_symmetry(data.dim(), BLOCK_SYMMETRY_SAMPLES, 0)
}

fn loaded<T: Field>(mut a: Matrix<T>, lambda: f64) -> Matrix<T> {
    a.add_diagonal(T::from_real(lambda));
    a
}

/// Solves `a x = b` by Cholesky and checks the normwise backward error.
fn solve_checked<T: Field>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let chol = Cholesky::factor_with_jitter(a)?;
    let x = chol.solve_vec(b)?;
    check_residual(a, &x, b)?;
    Ok(x)
}

fn check_residual<T: Field>(a: &Matrix<T>, x: &[T], b: &[T]) -> Result<()> {
    let ax = a.matvec(x)?;
    let r = ax.iter().zip(b).map(|(u, v)| (*u - *v).abs()).fold(0.0, f64::max);
    let inf_norm = |v: &[T]| v.iter().map(|z| z.abs()).fold(0.0, f64::max);
    let a_norm = (0..a.nrows())
        .map(|i| a.row(i).iter().map(|z| z.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let scale = a_norm * inf_norm(x) + inf_norm(b);
    if !r.is_finite() {
        return Err(Error::NonFinite("solution"));
    }
    let backward = if scale > 0.0 { r / scale } else { r };
    if backward > RESIDUAL_TOL {
        return Err(Error::Residual(backward));
    }
    Ok(())
}

/// Composite route. Returns `a_com = [a_r; a_j]`.
pub fn fit_composite(data: &ComplexDataset, spec: &KernelSpec, cfg: RidgeConfig) -> Result<CompositeModel> {
    prepare(data, spec)?;
    let k = loaded(composite_gram(spec, data.inputs()), cfg.lambda);
    let y = to_composite(data.targets());
    let alpha = CompositeVector::from_stacked(solve_checked(&k, y.as_slice())?)?;
    Ok(CompositeModel {
        inputs: data.inputs().clone(),
        kernel: spec.clone(),
        lambda: cfg.lambda,
        alpha,
    })
}

/// The raw `2n` solution of the augmented system, halves not reconciled.
pub fn solve_augmented(data: &ComplexDataset, spec: &KernelSpec, cfg: RidgeConfig) -> Result<AugmentedVector> {
    prepare(data, spec)?;
    let k = loaded(augmented_gram(spec, data.inputs()), cfg.lambda);
    let y = to_augmented(data.targets());
    AugmentedVector::from_raw(solve_checked(&k, y.as_slice())?)
}

/// The raw `2n` solution through the Schur complement of `C = K + lambda I`.
pub fn solve_augmented_schur(
    data: &ComplexDataset,
    spec: &KernelSpec,
    cfg: RidgeConfig,
) -> Result<AugmentedVector> {
    prepare(data, spec)?;
    let g = gram_pair_symmetric(spec, data.inputs());
    let n = data.len();
    let c = loaded(g.kernel, cfg.lambda);
    let c_chol = Cholesky::factor_with_jitter(&c)?;
    // W = C^-1 K~, so conj(C)^-1 conj(K~) = conj(W)
    let w = c_chol.solve(&g.pseudo)?;
    let w_conj = w.conj();
    let correction = g.pseudo.matmul(&w_conj)?;
    let mut p = c.sub(&correction)?;
    for i in 0..n {
        for j in i + 1..n {
            let v = (p[(i, j)] + p[(j, i)].conj()) * 0.5;
            p[(i, j)] = v;
            p[(j, i)] = v.conj();
        }
        p[(i, i)] = Complex64::new(p[(i, i)].re, 0.0);
    }
    let a = solve_checked(&p, data.targets())?;
    let a_conj: Vec<Complex64> = a.iter().map(|z| z.conj()).collect();
    let wa = w.matvec(&a_conj)?;
    let wa_tail = w_conj.matvec(&a)?;
    let mut out = Vec::with_capacity(2 * n);
    out.extend(a.iter().zip(&wa).map(|(u, v)| u - v));
    out.extend(a_conj.iter().zip(&wa_tail).map(|(u, v)| u - v));
    AugmentedVector::from_raw(out)
}

fn reconcile(
    data: &ComplexDataset,
    spec: &KernelSpec,
    cfg: RidgeConfig,
    raw: AugmentedVector,
) -> Result<WrkhsModel> {
    let gap = raw.conjugate_discrepancy();
    log::debug!("augmented solution conjugate discrepancy {gap:e}");
    if !(gap <= CONJUGATE_TOL) {
        return Err(Error::ConjugateAsymmetry(gap));
    }
    WrkhsModel::new(data.inputs().clone(), spec.clone(), cfg.lambda, raw.symmetrized_head())
}

/// Augmented route (the default): solve, check the conjugate structure and
/// return `a = (head + conj(tail)) / 2`.
pub fn fit_augmented(data: &ComplexDataset, spec: &KernelSpec, cfg: RidgeConfig) -> Result<WrkhsModel> {
    let raw = solve_augmented(data, spec, cfg)?;
    reconcile(data, spec, cfg, raw)
}

/// Schur route, reconciled like [`fit_augmented`].
pub fn fit_augmented_schur(data: &ComplexDataset, spec: &KernelSpec, cfg: RidgeConfig) -> Result<WrkhsModel> {
    let raw = solve_augmented_schur(data, spec, cfg)?;
    reconcile(data, spec, cfg, raw)
}

/// `a = (K + lambda I)^-1 y` for a kernel with a null pseudo-kernel.
pub fn fit_srkhs(data: &ComplexDataset, spec: &KernelSpec, cfg: RidgeConfig) -> Result<WrkhsModel> {
    if !spec.has_null_pseudo_kernel() {
        return Err(Error::NonNullPseudoKernel);
    }
    prepare(data, spec)?;
    let c = loaded(gram_pair_symmetric(spec, data.inputs()).kernel, cfg.lambda);
    let alpha = solve_checked(&c, data.targets())?;
    WrkhsModel::new(data.inputs().clone(), spec.clone(), cfg.lambda, alpha)
}

/// Fits through the selected route.
pub fn fit(data: &ComplexDataset, spec: &KernelSpec, cfg: RidgeConfig, path: FitPath) -> Result<WrkhsModel> {
    match path {
        FitPath::Composite => fit_composite(data, spec, cfg)?.to_wrkhs(),
        FitPath::Augmented => fit_augmented(data, spec, cfg),
        FitPath::Schur => fit_augmented_schur(data, spec, cfg),
    }
}

/// `10 log10(mean |pred - truth|^2)`, floored at [`MSE_DB_FLOOR`].
pub fn mse_db(pred: &[Complex64], truth: &[Complex64]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            found: pred.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::Empty("no samples to score"));
    }
    let mse = pred.iter().zip(truth).map(|(p, t)| (p - t).norm_sqr()).sum::<f64>() / pred.len() as f64;
    if !mse.is_finite() {
        return Err(Error::NonFinite("prediction error"));
    }
    Ok(power_db(mse))
}

/// `10 log10(p)` with the [`MSE_DB_FLOOR`] guard.
pub fn power_db(p: f64) -> f64 {
    if p > 0.0 {
        (10.0 * libm::log10(p)).max(MSE_DB_FLOOR)
    } else {
        MSE_DB_FLOOR
    }
}
