//! Kernel and pseudo-kernel values over a square grid of scalar inputs.

use serde::{Deserialize, Serialize};
use wrkhs_core::synthetic::uniform_grid;
use wrkhs_core::{Complex64, KernelSpec};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceRequest {
    pub kernel: KernelSpec,
    /// Fixed first argument.
    pub center: Complex64,
    /// Grid points have real and imaginary parts in `center +- range`.
    pub range: f64,
    /// Points per axis.
    pub resolution: usize,
    /// Evaluate `k(x, x)` at each grid point instead of `k(center, x)`.
    pub diagonal: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint {
    pub x: Complex64,
    pub k: Complex64,
    pub pk: Complex64,
}

pub const SURFACE_HEADER: [&str; 6] = ["x_re", "x_im", "k_re", "k_im", "pk_re", "pk_im"];

impl SurfaceRequest {
    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if self.resolution < 2 {
            return Err(CliError::input("resolution must be at least 2"));
        }
        if !self.range.is_finite() || self.range <= 0.0 {
            return Err(CliError::input("range must be positive and finite"));
        }
        if !self.center.re.is_finite() || !self.center.im.is_finite() {
            return Err(CliError::input("center must be finite"));
        }
        Ok(())
    }
}

/// Row-major grid, real part varying fastest.
pub fn kernel_surface(req: &SurfaceRequest) -> Result<Vec<SurfacePoint>> {
    req.validate()?;
    uniform_grid(req.resolution, req.range)
        .into_iter()
        .map(|offset| {
            let x = req.center + offset;
            let a = if req.diagonal { [x] } else { [req.center] };
            Ok(SurfacePoint {
                x,
                k: req.kernel.eval_kernel(&a, &[x])?,
                pk: req.kernel.eval_pseudo_kernel(&a, &[x])?,
            })
        })
        .collect()
}
