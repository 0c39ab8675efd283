//! Nonlinear channel equalization benchmark.
//!
//! A complex Gaussian source with tunable circularity goes through a two-tap
//! linear filter, a cubic memoryless nonlinearity and additive circular
//! Gaussian noise. An online equalizer sees sliding windows of the received
//! signal and predicts the delayed source symbol.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::kernels::KernelSpec;
use crate::linalg::Matrix;
use crate::online::OnlineModel;
use crate::regression::power_db;
use crate::repr::ComplexDataset;
use crate::rng::{stream_rng, Stream};
use crate::{Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Channel, source and stream parameters.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(default, deny_unknown_fields)
)]
pub struct ChannelConfig {
    /// `t(n) = taps[0] s(n) + taps[1] s(n-1)`.
    pub taps: [Complex64; 2],
    /// `q = t + c2 t^2 + c3 t^3`.
    pub c2: Complex64,
    pub c3: Complex64,
    pub source_scale: f64,
    /// Circularity: `1/sqrt(2)` is circular, values near 0 or 1 are not.
    pub rho: f64,
    pub snr_db: f64,
    /// Equalizer window length `L`.
    pub filter_len: usize,
    /// Equalizer delay `D`.
    pub delay: usize,
    /// Stream length per trial.
    pub samples: usize,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            taps: [Complex64::new(-0.9, 0.8), Complex64::new(0.6, -0.7)],
            c2: Complex64::new(0.2, 0.25),
            c3: Complex64::new(0.12, 0.09),
            source_scale: 0.70,
            rho: core::f64::consts::FRAC_1_SQRT_2,
            snr_db: 16.0,
            filter_len: 5,
            delay: 2,
            samples: 5000,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::invalid("rho", "must lie in (0, 1)"));
        }
        if self.snr_db.is_nan() {
            return Err(Error::invalid("snr_db", "must not be NaN"));
        }
        if !(self.source_scale > 0.0) || !self.source_scale.is_finite() {
            return Err(Error::invalid("source_scale", "must be positive and finite"));
        }
        if self.filter_len == 0 {
            return Err(Error::invalid("filter_len", "must be at least 1"));
        }
        if self.samples <= self.filter_len + self.delay {
            return Err(Error::invalid("samples", "must exceed filter_len + delay"));
        }
        Ok(())
    }
}

/// `s(n) = scale (sqrt(1 - rho^2) X(n) + j rho Y(n))` with `X`, `Y` standard
/// normal.
pub fn generate_source<R: Rng + ?Sized>(n: usize, rho: f64, scale: f64, rng: &mut R) -> Result<Vec<Complex64>> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::invalid("rho", "must lie in (0, 1)"));
    }
    let a = libm::sqrt(1.0 - rho * rho);
    Ok((0..n)
        .map(|_| {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            Complex64::new(scale * a * x, scale * rho * y)
        })
        .collect())
}

/// Linear filter (with `s(-1) = 0`) followed by the cubic nonlinearity.
pub fn apply_channel(s: &[Complex64], cfg: &ChannelConfig) -> Vec<Complex64> {
    let mut prev = Complex64::new(0.0, 0.0);
    s.iter()
        .map(|&v| {
            let t = cfg.taps[0] * v + cfg.taps[1] * prev;
            prev = v;
            nonlinearity(t, cfg)
        })
        .collect()
}

#[inline]
pub fn nonlinearity(t: Complex64, cfg: &ChannelConfig) -> Complex64 {
    let t2 = t * t;
    t + cfg.c2 * t2 + cfg.c3 * t2 * t
}

pub fn mean_power(v: &[Complex64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.iter().map(|z| z.norm_sqr()).sum::<f64>() / v.len() as f64
}

/// Empirical `E[v^2]`.
pub fn pseudo_variance(v: &[Complex64]) -> Complex64 {
    if v.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    v.iter().map(|z| z * z).sum::<Complex64>() / v.len() as f64
}

/// Adds circular Gaussian noise at `snr_db` relative to the empirical power
/// of `q`. Infinite SNR returns `q` unchanged.
pub fn add_awgn<R: Rng + ?Sized>(q: &[Complex64], snr_db: f64, rng: &mut R) -> Result<Vec<Complex64>> {
    if snr_db.is_nan() {
        return Err(Error::invalid("snr_db", "must not be NaN"));
    }
    if snr_db == f64::INFINITY {
        return Ok(q.to_vec());
    }
    let p = mean_power(q);
    if !(p > 0.0) {
        return Err(Error::ZeroPower);
    }
    let sigma = libm::sqrt(p / libm::pow(10.0, snr_db / 10.0) / 2.0);
    Ok(q.iter()
        .map(|&v| {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            v + Complex64::new(sigma * a, sigma * b)
        })
        .collect())
}

/// Index range `n` of the source whose windows
/// `[r(n+D), ..., r(n+D-L+1)]` lie inside the received stream.
pub fn window_range(len: usize, filter_len: usize, delay: usize) -> core::ops::Range<usize> {
    let start = (filter_len - 1).saturating_sub(delay);
    let end = len.saturating_sub(delay);
    start..end.max(start)
}

/// Pairs `(x(n), s(n))` in stream order.
pub fn build_equalizer_dataset(
    r: &[Complex64],
    s: &[Complex64],
    filter_len: usize,
    delay: usize,
) -> Result<ComplexDataset> {
    if r.len() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: r.len(),
        });
    }
    if filter_len == 0 {
        return Err(Error::invalid("filter_len", "must be at least 1"));
    }
    let range = window_range(r.len(), filter_len, delay);
    if range.is_empty() {
        return Err(Error::Empty("stream too short for one equalizer window"));
    }
    let first = range.start;
    let inputs = Matrix::from_fn(range.len(), filter_len, |i, k| r[first + i + delay - k]);
    let targets = s[range].to_vec();
    ComplexDataset::new(inputs, targets)
}

/// Equalizer benchmark settings.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(deny_unknown_fields)
)]
pub struct EqualizationConfig {
    #[cfg_attr(feature = "serde", serde(default))]
    pub channel: ChannelConfig,
    pub kernel: KernelSpec,
    pub lambda: f64,
    /// Dictionary budget; `None` keeps every sample.
    pub budget: Option<usize>,
    pub trials: usize,
    pub base_seed: u64,
}

impl EqualizationConfig {
    /// Circular source, Gaussian kernel `gamma = 8.92`, `lambda = 0.32`.
    pub fn circular() -> Self {
        EqualizationConfig {
            channel: ChannelConfig::default(),
            kernel: KernelSpec::isotropic_gaussian(8.92),
            lambda: 0.32,
            budget: Some(500),
            trials: 20,
            base_seed: 0,
        }
    }

    /// `rho = 0.1`, Gaussian kernel `gamma = 10.4`, `lambda = 0.18`.
    pub fn noncircular() -> Self {
        let mut cfg = Self::circular();
        cfg.channel.rho = 0.1;
        cfg.kernel = KernelSpec::isotropic_gaussian(10.4);
        cfg.lambda = 0.18;
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        // constructing a model checks kernel, lambda and budget
        OnlineModel::new(self.kernel.clone(), self.lambda, self.budget).map(|_| ())
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }
}

/// Received stream and source for one trial.
pub fn simulate_trial(cfg: &ChannelConfig, seed: u64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let s = generate_source(cfg.samples, cfg.rho, cfg.source_scale, &mut stream_rng(seed, Stream::Source))?;
    let q = apply_channel(&s, cfg);
    let r = add_awgn(&q, cfg.snr_db, &mut stream_rng(seed, Stream::Noise))?;
    Ok((r, s))
}

/// Cumulative-mean squared prediction error (linear scale) of one trial.
pub fn run_trial(cfg: &EqualizationConfig, trial: usize) -> Result<Vec<f64>> {
    let (r, s) = simulate_trial(&cfg.channel, cfg.trial_seed(trial))?;
    let data = build_equalizer_dataset(&r, &s, cfg.channel.filter_len, cfg.channel.delay)?;
    let mut model = OnlineModel::new(cfg.kernel.clone(), cfg.lambda, cfg.budget)?;
    let mut curve = Vec::with_capacity(data.len());
    let mut total = 0.0;
    for (k, (x, y)) in data.iter().enumerate() {
        let y_hat = model.observe(x, y)?;
        total += (y - y_hat).norm_sqr();
        curve.push(total / (k + 1) as f64);
    }
    Ok(curve)
}

/// Trial-averaged learning curve.
#[derive(Clone, Debug, PartialEq)]
pub struct EqualizationResult {
    /// Averaged cumulative-mean squared error, linear scale.
    pub mse: Vec<f64>,
    /// The same curve in dB.
    pub mse_db: Vec<f64>,
    pub trials: usize,
}

impl EqualizationResult {
    /// Averages per-trial curves in the given order.
    pub fn from_curves(curves: &[Vec<f64>]) -> Result<Self> {
        let first = curves.first().ok_or(Error::Empty("no trial curves"))?;
        let len = first.len();
        let mut mse = alloc::vec![0.0; len];
        for c in curves {
            if c.len() != len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    found: c.len(),
                });
            }
            for (m, v) in mse.iter_mut().zip(c) {
                *m += v;
            }
        }
        let t = curves.len() as f64;
        for m in &mut mse {
            *m /= t;
        }
        let mse_db = mse.iter().map(|&m| power_db(m)).collect();
        Ok(EqualizationResult {
            mse,
            mse_db,
            trials: curves.len(),
        })
    }

    pub fn final_mse_db(&self) -> f64 {
        self.mse_db.last().copied().unwrap_or(f64::NAN)
    }
}

/// Runs every trial sequentially.
pub fn run_equalization(cfg: &EqualizationConfig) -> Result<EqualizationResult> {
    cfg.validate()?;
    let curves = (0..cfg.trials)
        .map(|t| run_trial(cfg, t))
        .collect::<Result<Vec<_>>>()?;
    EqualizationResult::from_curves(&curves)
}
