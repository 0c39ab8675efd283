#![allow(dead_code)]

use rand::Rng;
use wrkhs_core::kernels::{BlockKernel, KernelSpec, RealKernelSpec, SeparableTerm};
use wrkhs_core::{Complex64, ComplexDataset, Matrix};

pub const FAMILIES: usize = 6;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_complex<R: Rng>(rng: &mut R, scale: f64) -> Complex64 {
    c(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

pub fn random_inputs<R: Rng>(rng: &mut R, n: usize, d: usize, scale: f64) -> Matrix<Complex64> {
    Matrix::from_fn(n, d, |_, _| random_complex(rng, scale))
}

pub fn random_dataset<R: Rng>(rng: &mut R, n: usize, d: usize) -> ComplexDataset {
    let x = random_inputs(rng, n, d, 1.5);
    let y = (0..n).map(|_| random_complex(rng, 1.0)).collect();
    ComplexDataset::new(x, y).unwrap()
}

fn gamma<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(0.5..4.0)
}

/// A valid (positive semidefinite) kernel of the given family index.
pub fn random_spec<R: Rng>(rng: &mut R, family: usize) -> KernelSpec {
    match family {
        0 => KernelSpec::isotropic_gaussian(gamma(rng)),
        // large gamma keeps the non-stationary growth moderate on the test inputs
        1 => KernelSpec::complex_gaussian(rng.random_range(8.0..30.0)),
        2 => KernelSpec::independent(gamma(rng)),
        3 => {
            // [[a, c], [c, b]] (x) G with c^2 < ab is positive semidefinite
            let g = gamma(rng);
            let a: f64 = rng.random_range(0.2..1.5);
            let b = rng.random_range(0.2..1.5);
            let cross = rng.random_range(-0.95..0.95) * (a * b).sqrt();
            let block = |w: f64| BlockKernel::Gaussian { gamma: g, weight: w };
            let off = if rng.random_bool(0.2) { BlockKernel::Zero } else { block(cross) };
            KernelSpec::RealImagBlocks {
                rr: block(a),
                jj: block(b),
                rj: off,
                jr: off,
            }
        }
        4 => KernelSpec::SeparateRealImag {
            real: RealKernelSpec::gaussian(gamma(rng)),
            imag: RealKernelSpec::gaussian(gamma(rng)),
        },
        _ => {
            let q = rng.random_range(1..=3);
            KernelSpec::SumOfSeparable {
                terms: (0..q)
                    .map(|_| SeparableTerm {
                        kernel: RealKernelSpec::gaussian(gamma(rng)),
                        weight: rng.random_range(0.0..0.95),
                    })
                    .collect(),
            }
        }
    }
}
