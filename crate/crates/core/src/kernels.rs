//! Kernel and pseudo-kernel families, Gram builders and PSD diagnostics.
//!
//! Every family is described by a [`KernelSpec`] and evaluated as a pair
//! `(k(x, x'), k~(x, x'))`. The families with a null pseudo-kernel are the
//! "strict" ones; the others need the augmented solver.
//!
//! In terms of the four real-valued cross kernels of the real and imaginary
//! feature parts (`g_rr`, `g_rj`, `g_jr`, `g_jj`):
//!
//! ```text
//! k  = (g_rr + g_jj) + j (g_jr - g_rj)
//! k~ = (g_rr - g_jj) + j (g_jr + g_rj)
//! ```
//!
//! [`composite_blocks`] inverts this map.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::linalg::{symmetric_eigenvalues, Matrix};
use crate::rng::{stream_rng, Stream};
use crate::{Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Exponents of the complex Gaussian kernel are clamped to this real part.
pub const MAX_EXPONENT: f64 = 700.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A real kernel given as a profile of the squared distance.
///
/// Applied to real vectors it uses `|a - b|^2`; applied to complex vectors it
/// uses `(x - x')^H (x - x')`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum RealKernelSpec {
    /// `exp(-d^2 / gamma)`.
    Gaussian { gamma: f64 },
}

impl RealKernelSpec {
    pub fn gaussian(gamma: f64) -> Self {
        RealKernelSpec::Gaussian { gamma }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RealKernelSpec::Gaussian { gamma } => check_gamma(gamma),
        }
    }

    #[inline]
    pub fn profile(&self, sq_dist: f64) -> f64 {
        match *self {
            RealKernelSpec::Gaussian { gamma } => libm::exp(-sq_dist / gamma),
        }
    }

    pub fn eval_real(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        check_dims(a.len(), b.len())?;
        let d2 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        Ok(self.profile(d2))
    }

    /// Evaluation on complex inputs through the Hermitian distance.
    pub fn eval_complex(&self, x: &[Complex64], y: &[Complex64]) -> Result<f64> {
        check_dims(x.len(), y.len())?;
        Ok(self.profile(sq_dist(x, y)))
    }
}

/// Real-valued kernel of complex inputs used as one block of
/// [`KernelSpec::RealImagBlocks`].
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum BlockKernel {
    Zero,
    /// `weight * exp(-(x - x')^H (x - x') / gamma)`.
    Gaussian { gamma: f64, weight: f64 },
}

impl BlockKernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BlockKernel::Zero => Ok(()),
            BlockKernel::Gaussian { gamma, weight } => {
                check_gamma(gamma)?;
                if !weight.is_finite() {
                    return Err(Error::invalid("weight", "must be finite"));
                }
                Ok(())
            }
        }
    }

    #[inline]
    fn eval_unchecked(&self, x: &[Complex64], y: &[Complex64]) -> f64 {
        match *self {
            BlockKernel::Zero => 0.0,
            BlockKernel::Gaussian { gamma, weight } => weight * libm::exp(-sq_dist(x, y) / gamma),
        }
    }

    pub fn eval(&self, x: &[Complex64], y: &[Complex64]) -> Result<f64> {
        check_dims(x.len(), y.len())?;
        Ok(self.eval_unchecked(x, y))
    }

    pub fn negated(&self) -> Self {
        match *self {
            BlockKernel::Zero => BlockKernel::Zero,
            BlockKernel::Gaussian { gamma, weight } => BlockKernel::Gaussian {
                gamma,
                weight: -weight,
            },
        }
    }
}

/// One `(k^(q), w^(q))` term of a sum-of-separable kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(deny_unknown_fields)
)]
pub struct SeparableTerm {
    pub kernel: RealKernelSpec,
    pub weight: f64,
}

/// The kernel families.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(tag = "family", content = "params", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum KernelSpec {
    /// `k = exp(-(x - x')^H (x - x') / gamma)`, real and stationary; `k~ = 0`.
    IsotropicGaussian { gamma: f64 },
    /// `k = exp(-(x - conj x')^T (x - conj x') / gamma)` (plain transpose);
    /// complex and non-stationary; `k~ = 0`.
    ComplexGaussian { gamma: f64 },
    /// `k = b(x_r, x'_r) + b(x_j, x'_j) + j (b(x_r, x'_j) - b(x_j, x'_r))` for a
    /// real kernel `b` of real inputs; `k~ = 0`.
    Independent { base: RealKernelSpec },
    /// Kernel and pseudo-kernel composed from four real cross kernels.
    /// Requires `rj(x, x') = jr(x', x)`.
    RealImagBlocks {
        rr: BlockKernel,
        jj: BlockKernel,
        rj: BlockKernel,
        jr: BlockKernel,
    },
    /// Independent real and imaginary outputs: `k = a + b`, `k~ = a - b`.
    SeparateRealImag {
        real: RealKernelSpec,
        imag: RealKernelSpec,
    },
    /// `k = 2 sum_q k^(q)`, `k~ = 2j sum_q w^(q) k^(q)`.
    SumOfSeparable { terms: Vec<SeparableTerm> },
}

/// A kernel value plus whether its exponent was clamped at [`MAX_EXPONENT`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    pub saturated: bool,
}

impl KernelSpec {
    pub fn isotropic_gaussian(gamma: f64) -> Self {
        KernelSpec::IsotropicGaussian { gamma }
    }

    pub fn complex_gaussian(gamma: f64) -> Self {
        KernelSpec::ComplexGaussian { gamma }
    }

    pub fn independent(gamma: f64) -> Self {
        KernelSpec::Independent {
            base: RealKernelSpec::gaussian(gamma),
        }
    }

    pub fn separate_real_imag(gamma_real: f64, gamma_imag: f64) -> Self {
        KernelSpec::SeparateRealImag {
            real: RealKernelSpec::gaussian(gamma_real),
            imag: RealKernelSpec::gaussian(gamma_imag),
        }
    }

    /// Single-term sum-of-separable kernel with a Gaussian `k^(1)`.
    pub fn sum_of_separable(gamma: f64, weight: f64) -> Self {
        KernelSpec::SumOfSeparable {
            terms: alloc::vec![SeparableTerm {
                kernel: RealKernelSpec::gaussian(gamma),
                weight,
            }],
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            KernelSpec::IsotropicGaussian { .. } => "isotropic_gaussian",
            KernelSpec::ComplexGaussian { .. } => "complex_gaussian",
            KernelSpec::Independent { .. } => "independent",
            KernelSpec::RealImagBlocks { .. } => "real_imag_blocks",
            KernelSpec::SeparateRealImag { .. } => "separate_real_imag",
            KernelSpec::SumOfSeparable { .. } => "sum_of_separable",
        }
    }

    /// Parameter checks. Sum-of-separable weights must lie in `[0, 1)`; zero
    /// weights give the null-pseudo-kernel ablation.
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::IsotropicGaussian { gamma } | KernelSpec::ComplexGaussian { gamma } => {
                check_gamma(*gamma)
            }
            KernelSpec::Independent { base } => base.validate(),
            KernelSpec::RealImagBlocks { rr, jj, rj, jr } => {
                rr.validate()?;
                jj.validate()?;
                rj.validate()?;
                jr.validate()
            }
            KernelSpec::SeparateRealImag { real, imag } => {
                real.validate()?;
                imag.validate()
            }
            KernelSpec::SumOfSeparable { terms } => {
                if terms.is_empty() {
                    return Err(Error::invalid("terms", "at least one term is required"));
                }
                for t in terms {
                    t.kernel.validate()?;
                    if !(0.0..1.0).contains(&t.weight) {
                        return Err(Error::invalid("weight", "must lie in [0, 1)"));
                    }
                }
                Ok(())
            }
        }
    }

    /// Randomized check of the block symmetries a valid kernel needs:
    /// `g_rr`, `g_jj` symmetric and `g_rj(x, x') = g_jr(x', x)`.
    ///
    /// Only [`KernelSpec::RealImagBlocks`] can violate them; every other
    /// family passes trivially.
    pub fn check_block_symmetry(&self, dim: usize, samples: usize, seed: u64) -> Result<()> {
        let KernelSpec::RealImagBlocks { rr, jj, rj, jr } = self else {
            return Ok(());
        };
        let mut rng = stream_rng(seed, Stream::Validation);
        let draw = |rng: &mut rand_chacha::ChaCha20Rng| -> Vec<Complex64> {
            (0..dim)
                .map(|_| Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)))
                .collect()
        };
        for _ in 0..samples {
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
            if !close(rr.eval_unchecked(&x, &y), rr.eval_unchecked(&y, &x))
                || !close(jj.eval_unchecked(&x, &y), jj.eval_unchecked(&y, &x))
            {
                return Err(Error::invalid("rr/jj", "diagonal blocks must be symmetric"));
            }
            if !close(rj.eval_unchecked(&x, &y), jr.eval_unchecked(&y, &x)) {
                return Err(Error::invalid("rj/jr", "rj(x, x') must equal jr(x', x)"));
            }
        }
        Ok(())
    }

    /// Whether `k~` vanishes identically (structurally, not numerically).
    pub fn has_null_pseudo_kernel(&self) -> bool {
        match self {
            KernelSpec::IsotropicGaussian { .. }
            | KernelSpec::ComplexGaussian { .. }
            | KernelSpec::Independent { .. } => true,
            KernelSpec::RealImagBlocks { rr, jj, rj, jr } => rr == jj && *rj == jr.negated(),
            KernelSpec::SeparateRealImag { real, imag } => real == imag,
            KernelSpec::SumOfSeparable { terms } => terms.iter().all(|t| t.weight == 0.0),
        }
    }

    /// Whether `k` is real for all inputs.
    pub fn is_real_valued(&self) -> bool {
        match self {
            KernelSpec::IsotropicGaussian { .. }
            | KernelSpec::SeparateRealImag { .. }
            | KernelSpec::SumOfSeparable { .. } => true,
            KernelSpec::ComplexGaussian { .. } | KernelSpec::Independent { .. } => false,
            KernelSpec::RealImagBlocks { rj, jr, .. } => rj == jr,
        }
    }

    /// `(k, k~)` without dimension checks.
    #[inline]
    pub(crate) fn pair_unchecked(&self, x: &[Complex64], y: &[Complex64]) -> (KernelValue, Complex64) {
        let plain = |v: Complex64| KernelValue {
            value: v,
            saturated: false,
        };
        match self {
            KernelSpec::IsotropicGaussian { gamma } => (
                plain(Complex64::new(libm::exp(-sq_dist(x, y) / gamma), 0.0)),
                ZERO,
            ),
            KernelSpec::ComplexGaussian { gamma } => {
                let mut z = ZERO;
                for (a, b) in x.iter().zip(y) {
                    let d = a - b.conj();
                    z += d * d;
                }
                let mut e = -z / *gamma;
                let saturated = e.re > MAX_EXPONENT;
                if saturated {
                    e.re = MAX_EXPONENT;
                }
                let m = libm::exp(e.re);
                let v = Complex64::new(m * libm::cos(e.im), m * libm::sin(e.im));
                (KernelValue { value: v, saturated }, ZERO)
            }
            KernelSpec::Independent { base } => {
                let (mut rr, mut jj, mut rj, mut jr) = (0.0, 0.0, 0.0, 0.0);
                for (a, b) in x.iter().zip(y) {
                    rr += (a.re - b.re) * (a.re - b.re);
                    jj += (a.im - b.im) * (a.im - b.im);
                    rj += (a.re - b.im) * (a.re - b.im);
                    jr += (a.im - b.re) * (a.im - b.re);
                }
                let v = Complex64::new(
                    base.profile(rr) + base.profile(jj),
                    base.profile(rj) - base.profile(jr),
                );
                (plain(v), ZERO)
            }
            KernelSpec::RealImagBlocks { rr, jj, rj, jr } => {
                let (grr, gjj) = (rr.eval_unchecked(x, y), jj.eval_unchecked(x, y));
                let (grj, gjr) = (rj.eval_unchecked(x, y), jr.eval_unchecked(x, y));
                (
                    plain(Complex64::new(grr + gjj, gjr - grj)),
                    Complex64::new(grr - gjj, gjr + grj),
                )
            }
            KernelSpec::SeparateRealImag { real, imag } => {
                let d2 = sq_dist(x, y);
                let (a, b) = (real.profile(d2), imag.profile(d2));
                (plain(Complex64::new(a + b, 0.0)), Complex64::new(a - b, 0.0))
            }
            KernelSpec::SumOfSeparable { terms } => {
                let d2 = sq_dist(x, y);
                let (mut sum, mut weighted) = (0.0, 0.0);
                for t in terms {
                    let v = t.kernel.profile(d2);
                    sum += v;
                    weighted += t.weight * v;
                }
                (
                    plain(Complex64::new(2.0 * sum, 0.0)),
                    Complex64::new(0.0, 2.0 * weighted),
                )
            }
        }
    }

    /// `k(x, x')` with the saturation flag.
    pub fn eval_kernel_flagged(&self, x: &[Complex64], y: &[Complex64]) -> Result<KernelValue> {
        check_dims(x.len(), y.len())?;
        Ok(self.pair_unchecked(x, y).0)
    }

    pub fn eval_kernel(&self, x: &[Complex64], y: &[Complex64]) -> Result<Complex64> {
        Ok(self.eval_kernel_flagged(x, y)?.value)
    }

    pub fn eval_pseudo_kernel(&self, x: &[Complex64], y: &[Complex64]) -> Result<Complex64> {
        check_dims(x.len(), y.len())?;
        Ok(self.pair_unchecked(x, y).1)
    }
}

/// Kernel and pseudo-kernel matrices over the same pair of input sets.
#[derive(Clone, Debug)]
pub struct GramPair {
    pub kernel: Matrix<Complex64>,
    pub pseudo: Matrix<Complex64>,
    /// Number of kernel entries clamped at [`MAX_EXPONENT`].
    pub saturated: usize,
}

/// `[k(x_i, z_j)]` and `[k~(x_i, z_j)]` for rows `x_i` of `xs` and `z_j` of `zs`.
pub fn gram_pair(spec: &KernelSpec, xs: &Matrix<Complex64>, zs: &Matrix<Complex64>) -> Result<GramPair> {
    check_dims(xs.ncols(), zs.ncols())?;
    let (n, m) = (xs.nrows(), zs.nrows());
    let mut kernel = Matrix::zeros(n, m);
    let mut pseudo = Matrix::zeros(n, m);
    let mut saturated = 0;
    for i in 0..n {
        let x = xs.row(i);
        for j in 0..m {
            let (k, p) = spec.pair_unchecked(x, zs.row(j));
            saturated += usize::from(k.saturated);
            kernel[(i, j)] = k.value;
            pseudo[(i, j)] = p;
        }
    }
    warn_saturation(saturated);
    Ok(GramPair {
        kernel,
        pseudo,
        saturated,
    })
}

/// Square Gram pair over one input set: upper triangle evaluated, kernel
/// mirrored as its conjugate and pseudo-kernel mirrored as-is, so the results
/// are exactly Hermitian and exactly symmetric.
pub fn gram_pair_symmetric(spec: &KernelSpec, xs: &Matrix<Complex64>) -> GramPair {
    let n = xs.nrows();
    let mut kernel = Matrix::zeros(n, n);
    let mut pseudo = Matrix::zeros(n, n);
    let mut saturated = 0;
    for i in 0..n {
        let x = xs.row(i);
        for j in i..n {
            let (k, p) = spec.pair_unchecked(x, xs.row(j));
            saturated += usize::from(k.saturated);
            if i == j {
                kernel[(i, i)] = Complex64::new(k.value.re, 0.0);
                pseudo[(i, i)] = p;
            } else {
                kernel[(i, j)] = k.value;
                kernel[(j, i)] = k.value.conj();
                pseudo[(i, j)] = p;
                pseudo[(j, i)] = p;
            }
        }
    }
    warn_saturation(saturated);
    GramPair {
        kernel,
        pseudo,
        saturated,
    }
}

fn warn_saturation(count: usize) {
    if count > 0 {
        log::warn!("{count} kernel evaluations saturated at exponent {MAX_EXPONENT}");
    }
}

/// `[k(x_i, z_j)]`.
pub fn gram(spec: &KernelSpec, xs: &Matrix<Complex64>, zs: &Matrix<Complex64>) -> Result<Matrix<Complex64>> {
    Ok(gram_pair(spec, xs, zs)?.kernel)
}

/// `[k~(x_i, z_j)]`.
pub fn pseudo_gram(
    spec: &KernelSpec,
    xs: &Matrix<Complex64>,
    zs: &Matrix<Complex64>,
) -> Result<Matrix<Complex64>> {
    Ok(gram_pair(spec, xs, zs)?.pseudo)
}

/// `[[K, K~], [conj K~, conj K]]` between two input sets.
pub fn augmented_cross_gram(
    spec: &KernelSpec,
    xs: &Matrix<Complex64>,
    zs: &Matrix<Complex64>,
) -> Result<Matrix<Complex64>> {
    let g = gram_pair(spec, xs, zs)?;
    Matrix::from_blocks(&g.kernel, &g.pseudo, &g.pseudo.conj(), &g.kernel.conj())
}

/// The `2n x 2n` augmented Gram matrix `[[K, K~], [conj K~, conj K]]`.
pub fn augmented_gram(spec: &KernelSpec, xs: &Matrix<Complex64>) -> Matrix<Complex64> {
    let g = gram_pair_symmetric(spec, xs);
    Matrix::from_blocks(&g.kernel, &g.pseudo, &g.pseudo.conj(), &g.kernel.conj())
        .expect("blocks of a square Gram pair are conformable")
}

/// The four real cross-kernel blocks recovered from `(k, k~)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeBlocks {
    pub rr: Matrix<f64>,
    pub rj: Matrix<f64>,
    pub jr: Matrix<f64>,
    pub jj: Matrix<f64>,
}

impl CompositeBlocks {
    fn from_pair(g: &GramPair) -> Self {
        let (k, p) = (&g.kernel, &g.pseudo);
        let (n, m) = (k.nrows(), k.ncols());
        CompositeBlocks {
            rr: Matrix::from_fn(n, m, |i, j| 0.5 * (k[(i, j)].re + p[(i, j)].re)),
            jj: Matrix::from_fn(n, m, |i, j| 0.5 * (k[(i, j)].re - p[(i, j)].re)),
            jr: Matrix::from_fn(n, m, |i, j| 0.5 * (k[(i, j)].im + p[(i, j)].im)),
            rj: Matrix::from_fn(n, m, |i, j| 0.5 * (p[(i, j)].im - k[(i, j)].im)),
        }
    }

    /// The composite matrix `2 [[rr, rj], [jr, jj]]`.
    pub fn assemble(&self) -> Matrix<f64> {
        Matrix::from_blocks(&self.rr, &self.rj, &self.jr, &self.jj)
            .expect("blocks share one shape")
            .scaled(2.0)
    }

    /// Back through the identification map: `(k, k~)`.
    pub fn to_kernel_pair(&self) -> (Matrix<Complex64>, Matrix<Complex64>) {
        let (n, m) = (self.rr.nrows(), self.rr.ncols());
        let k = Matrix::from_fn(n, m, |i, j| {
            Complex64::new(
                self.rr[(i, j)] + self.jj[(i, j)],
                self.jr[(i, j)] - self.rj[(i, j)],
            )
        });
        let p = Matrix::from_fn(n, m, |i, j| {
            Complex64::new(
                self.rr[(i, j)] - self.jj[(i, j)],
                self.jr[(i, j)] + self.rj[(i, j)],
            )
        });
        (k, p)
    }
}

/// Cross-kernel blocks between `xs` (rows of the prediction side) and `zs`.
pub fn composite_blocks(
    spec: &KernelSpec,
    xs: &Matrix<Complex64>,
    zs: &Matrix<Complex64>,
) -> Result<CompositeBlocks> {
    Ok(CompositeBlocks::from_pair(&gram_pair(spec, xs, zs)?))
}

/// The exactly symmetric `2n x 2n` composite Gram matrix of one input set.
pub fn composite_gram(spec: &KernelSpec, xs: &Matrix<Complex64>) -> Matrix<f64> {
    CompositeBlocks::from_pair(&gram_pair_symmetric(spec, xs)).assemble()
}

/// Smallest eigenvalue of the composite Gram matrix (equal to that of the
/// augmented Gram matrix). Cost is cubic in `2n`.
pub fn min_composite_eigenvalue(spec: &KernelSpec, xs: &Matrix<Complex64>) -> Result<f64> {
    let eig = symmetric_eigenvalues(&composite_gram(spec, xs))?;
    Ok(eig.first().copied().unwrap_or(0.0))
}

/// Opt-in PSD diagnostic: `min eigenvalue >= -tol`.
pub fn is_positive_semidefinite(spec: &KernelSpec, xs: &Matrix<Complex64>, tol: f64) -> Result<bool> {
    Ok(min_composite_eigenvalue(spec, xs)? >= -tol)
}

#[inline]
fn sq_dist(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum()
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::invalid("gamma", "must be positive and finite"));
    }
    Ok(())
}
