//! Synthetic regression benchmarks on scalar complex inputs.
//!
//! Each run draws noiseless training samples uniformly on a square, fits a
//! widely linear model and its null-pseudo-kernel ablation on the same data,
//! and scores both on a uniform evaluation grid.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::kernels::KernelSpec;
use crate::linalg::Matrix;
use crate::regression::{fit_augmented, mse_db, RidgeConfig, WrkhsModel};
use crate::repr::ComplexDataset;
use crate::rng::{stream_rng, Stream};
use crate::{Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Normalized sinc: `sin(pi u) / (pi u)`, `sinc(0) = 1`.
pub fn sinc(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        let a = core::f64::consts::PI * u;
        libm::sin(a) / a
    }
}

/// Real part: sum of three shifted sinc products; imaginary part depends on
/// `x_j` alone.
pub fn target_exp1(x: Complex64) -> Complex64 {
    let re = (-1..=1)
        .map(|r| {
            let r = f64::from(r);
            sinc(1.2 * x.re + 2.0 * r) * sinc(1.2 * x.im - 2.0 * r)
        })
        .sum();
    Complex64::new(re, sinc(0.2 * x.im - 1.5))
}

/// `(z_r + w z_j) + j (z_j + w z_r)` with `z_r = sinc(x_r/2) sinc(x_j/2)` and
/// `z_j = 0.1 sinc(0.3 x_j)`.
pub fn target_exp2(x: Complex64, omega: f64) -> Complex64 {
    let (zr, zj) = exp2_parts(x);
    Complex64::new(zr + omega * zj, zj + omega * zr)
}

/// `(z_r, z_j)` of [`target_exp2`].
pub fn exp2_parts(x: Complex64) -> (f64, f64) {
    (sinc(0.5 * x.re) * sinc(0.5 * x.im), 0.1 * sinc(0.3 * x.im))
}

/// Which target surface to learn.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum Target {
    Exp1,
    Exp2 { omega: f64 },
}

impl Target {
    pub fn eval(&self, x: Complex64) -> Complex64 {
        match *self {
            Target::Exp1 => target_exp1(x),
            Target::Exp2 { omega } => target_exp2(x, omega),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(deny_unknown_fields)
)]
pub struct SyntheticConfig {
    pub target: Target,
    pub n_train: usize,
    /// Inputs have real and imaginary parts in `[-half_width, half_width]`.
    pub half_width: f64,
    pub lambda: f64,
    /// Evaluation grid points per axis.
    pub grid: usize,
    pub seed: u64,
    pub kernel: KernelSpec,
    pub ablation: KernelSpec,
}

impl SyntheticConfig {
    /// Separate real/imaginary Gaussians (`gamma = 1`, `3.5`) against equal
    /// parts (`gamma = 1` for both, a null pseudo-kernel).
    pub fn exp1() -> Self {
        SyntheticConfig {
            target: Target::Exp1,
            n_train: 200,
            half_width: 5.0,
            lambda: 1e-6,
            grid: 101,
            seed: 0,
            kernel: KernelSpec::separate_real_imag(1.0, 3.5),
            ablation: KernelSpec::separate_real_imag(1.0, 1.0),
        }
    }

    /// One separable term (`gamma = 2`, weight `0.3`) against weight `0`.
    pub fn exp2() -> Self {
        SyntheticConfig {
            target: Target::Exp2 { omega: 0.3 },
            n_train: 200,
            half_width: 5.0,
            lambda: 1e-6,
            grid: 101,
            seed: 0,
            kernel: KernelSpec::sum_of_separable(2.0, 0.3),
            ablation: KernelSpec::sum_of_separable(2.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_train == 0 {
            return Err(Error::invalid("n_train", "must be at least 1"));
        }
        if self.grid < 2 {
            return Err(Error::invalid("grid", "needs at least 2 points per axis"));
        }
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(Error::invalid("half_width", "must be positive and finite"));
        }
        RidgeConfig::new(self.lambda)?;
        self.kernel.validate()?;
        self.ablation.validate()
    }

    /// Noiseless training set for this seed.
    pub fn training_set(&self) -> Result<ComplexDataset> {
        let mut rng = stream_rng(self.seed, Stream::TrainingInputs);
        let w = self.half_width;
        let x: Vec<Complex64> = (0..self.n_train)
            .map(|_| {
                let re = rng.random_range(-w..=w);
                let im = rng.random_range(-w..=w);
                Complex64::new(re, im)
            })
            .collect();
        let y = x.iter().map(|&v| self.target.eval(v)).collect();
        ComplexDataset::from_scalar_inputs(&x, y)
    }

    /// Row-major `grid x grid` points, real part varying fastest.
    pub fn evaluation_grid(&self) -> Vec<Complex64> {
        uniform_grid(self.grid, self.half_width)
    }
}

/// `g x g` points on `[-w, w]^2`, real part varying fastest.
pub fn uniform_grid(g: usize, w: f64) -> Vec<Complex64> {
    let step = 2.0 * w / (g - 1) as f64;
    let axis = |i: usize| if i == g - 1 { w } else { -w + step * i as f64 };
    (0..g * g)
        .map(|k| Complex64::new(axis(k % g), axis(k / g)))
        .collect()
}

/// Grid predictions and scores of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticRun {
    pub wrkhs_mse_db: f64,
    pub ablation_mse_db: f64,
    pub grid: Vec<Complex64>,
    pub truth: Vec<Complex64>,
    pub wrkhs_pred: Vec<Complex64>,
    pub ablation_pred: Vec<Complex64>,
}

impl SyntheticRun {
    /// `ablation - wrkhs`, positive when the full model wins.
    pub fn gap_db(&self) -> f64 {
        self.ablation_mse_db - self.wrkhs_mse_db
    }
}

pub fn fit_model(cfg: &SyntheticConfig, kernel: &KernelSpec, data: &ComplexDataset) -> Result<WrkhsModel> {
    fit_augmented(data, kernel, RidgeConfig::new(cfg.lambda)?)
}

/// Fits both models on one training draw and scores them on the grid.
pub fn run(cfg: &SyntheticConfig) -> Result<SyntheticRun> {
    cfg.validate()?;
    let data = cfg.training_set()?;
    let grid = cfg.evaluation_grid();
    let truth: Vec<Complex64> = grid.iter().map(|&x| cfg.target.eval(x)).collect();
    let xs = Matrix::from_row_major(grid.len(), 1, grid.clone())?;
    let wrkhs_pred = fit_model(cfg, &cfg.kernel, &data)?.predict(&xs)?;
    let ablation_pred = fit_model(cfg, &cfg.ablation, &data)?.predict(&xs)?;
    Ok(SyntheticRun {
        wrkhs_mse_db: mse_db(&wrkhs_pred, &truth)?,
        ablation_mse_db: mse_db(&ablation_pred, &truth)?,
        grid,
        truth,
        wrkhs_pred,
        ablation_pred,
    })
}

/// [`run`] with the first experiment's defaults and the given seed.
pub fn run_exp1(seed: u64) -> Result<SyntheticRun> {
    run(&SyntheticConfig {
        seed,
        ..SyntheticConfig::exp1()
    })
}

/// [`run`] with the second experiment's defaults and the given seed.
pub fn run_exp2(seed: u64) -> Result<SyntheticRun> {
    run(&SyntheticConfig {
        seed,
        ..SyntheticConfig::exp2()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        for k in 1..6 {
            assert!(sinc(k as f64).abs() < 1e-15);
            assert!(sinc(-(k as f64)).abs() < 1e-15);
        }
        assert!((sinc(0.5) - 2.0 / core::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn exp1_at_origin() {
        let y = target_exp1(c(0.0, 0.0));
        assert!((y.re - 1.0).abs() < 1e-15);
        // sin(-1.5 pi) = 1, so sinc(-1.5) = -2 / (3 pi)
        assert!((y.im + 2.0 / (3.0 * core::f64::consts::PI)).abs() < 1e-15);
    }

    #[test]
    fn exp1_imag_depends_on_xj_only() {
        assert_eq!(target_exp1(c(0.3, 1.7)).im, target_exp1(c(-4.2, 1.7)).im);
    }

    #[test]
    fn exp1_real_part_swap_symmetry() {
        // swapping x_r and x_j maps the r term onto the -r term
        for (a, b) in [(0.3, -1.2), (2.0, 0.7), (-3.1, 4.4)] {
            let u = target_exp1(c(a, b)).re;
            let v = target_exp1(c(b, a)).re;
            assert!((u - v).abs() < 1e-15);
        }
    }

    #[test]
    fn exp2_at_origin_and_uncoupled() {
        let y = target_exp2(c(0.0, 0.0), 0.3);
        assert!((y - c(1.03, 0.4)).norm() < 1e-15);
        let x = c(1.3, -0.4);
        let (zr, zj) = exp2_parts(x);
        assert_eq!(target_exp2(x, 0.0), c(zr, zj));
        let w = 0.3;
        let y = target_exp2(x, w);
        assert!(((y.re - zr) - w * zj).abs() < 1e-15);
        assert!(((y.im - w * zr) - zj).abs() < 1e-15);
    }

    #[test]
    fn grid_layout() {
        let g = uniform_grid(3, 5.0);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], c(-5.0, -5.0));
        assert_eq!(g[1], c(0.0, -5.0));
        assert_eq!(g[5], c(5.0, 0.0));
        assert_eq!(g[8], c(5.0, 5.0));
    }

    #[test]
    fn training_inputs_in_range() {
        let cfg = SyntheticConfig::exp1();
        let ds = cfg.training_set().unwrap();
        assert_eq!(ds.len(), 200);
        for (x, y) in ds.iter() {
            assert!(x[0].re.abs() <= 5.0 && x[0].im.abs() <= 5.0);
            assert_eq!(y, target_exp1(x[0]));
        }
        assert_eq!(ds, cfg.training_set().unwrap());
    }

    #[test]
    fn config_validation() {
        let mut cfg = SyntheticConfig::exp2();
        cfg.grid = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = SyntheticConfig::exp2();
        cfg.n_train = 0;
        assert!(cfg.validate().is_err());
    }
}
