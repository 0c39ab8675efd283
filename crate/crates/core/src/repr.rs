//! Composite and augmented representations of complex vectors.
//!
//! For `v` in C^n the composite form is the real vector `[Re v; Im v]` and the
//! augmented form is `[v; conj v]`. The two are related by
//!
//! ```text
//! T = [[I,  jI],
//!      [I, -jI]],     augmented = T * composite,    T T^H = T^H T = 2I
//! ```

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::Matrix;
use crate::{Error, Result};

const J: Complex64 = Complex64::new(0.0, 1.0);

/// Real vector `[Re v; Im v]` of length `2n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeVector(Vec<f64>);

impl CompositeVector {
    pub fn from_parts(real: &[f64], imag: &[f64]) -> Result<Self> {
        if real.len() != imag.len() {
            return Err(Error::DimensionMismatch {
                expected: real.len(),
                found: imag.len(),
            });
        }
        let mut v = Vec::with_capacity(2 * real.len());
        v.extend_from_slice(real);
        v.extend_from_slice(imag);
        Ok(CompositeVector(v))
    }

    /// Wraps a stacked real vector; the length must be even.
    pub fn from_stacked(v: Vec<f64>) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::OddLength(v.len()));
        }
        Ok(CompositeVector(v))
    }

    pub fn half_len(&self) -> usize {
        self.0.len() / 2
    }

    pub fn real(&self) -> &[f64] {
        &self.0[..self.half_len()]
    }

    pub fn imag(&self) -> &[f64] {
        &self.0[self.half_len()..]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// The complex vector `real + j imag`.
    pub fn to_complex(&self) -> Vec<Complex64> {
        self.real()
            .iter()
            .zip(self.imag())
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect()
    }
}

/// Complex vector `[v; conj v]` of length `2n`.
///
/// Vectors produced by linear solves only satisfy the conjugate structure up
/// to rounding; [`AugmentedVector::conjugate_discrepancy`] measures it.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedVector(Vec<Complex64>);

impl AugmentedVector {
    /// Wraps a raw length-`2n` vector without enforcing the structure.
    pub fn from_raw(v: Vec<Complex64>) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::OddLength(v.len()));
        }
        Ok(AugmentedVector(v))
    }

    pub fn half_len(&self) -> usize {
        self.0.len() / 2
    }

    pub fn head(&self) -> &[Complex64] {
        &self.0[..self.half_len()]
    }

    pub fn tail(&self) -> &[Complex64] {
        &self.0[self.half_len()..]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    /// `max_i |tail_i - conj(head_i)|`.
    pub fn conjugate_discrepancy(&self) -> f64 {
        self.head()
            .iter()
            .zip(self.tail())
            .map(|(h, t)| (t - h.conj()).norm())
            .fold(0.0, f64::max)
    }

    /// `(head + conj(tail)) / 2`, the closest vector whose augmentation is `self`.
    pub fn symmetrized_head(&self) -> Vec<Complex64> {
        self.head()
            .iter()
            .zip(self.tail())
            .map(|(h, t)| (h + t.conj()) * 0.5)
            .collect()
    }
}

/// `[Re v; Im v]`.
pub fn to_composite(v: &[Complex64]) -> CompositeVector {
    let mut out = Vec::with_capacity(2 * v.len());
    out.extend(v.iter().map(|z| z.re));
    out.extend(v.iter().map(|z| z.im));
    CompositeVector(out)
}

/// `[v; conj v]`.
pub fn to_augmented(v: &[Complex64]) -> AugmentedVector {
    let mut out = Vec::with_capacity(2 * v.len());
    out.extend_from_slice(v);
    out.extend(v.iter().map(|z| z.conj()));
    AugmentedVector(out)
}

/// `T * vc` for a stacked real vector of even length.
pub fn composite_to_augmented(vc: &[f64]) -> Result<AugmentedVector> {
    if !vc.len().is_multiple_of(2) {
        return Err(Error::OddLength(vc.len()));
    }
    let n = vc.len() / 2;
    let (re, im) = vc.split_at(n);
    let head = re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i));
    let tail = re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, -i));
    Ok(AugmentedVector(head.chain(tail).collect()))
}

/// `T^H * va / 2`, the inverse of [`composite_to_augmented`].
///
/// Imaginary residue left by a vector that is not exactly augmented is dropped.
pub fn augmented_to_composite(va: &AugmentedVector) -> CompositeVector {
    let n = va.half_len();
    let (head, tail) = (va.head(), va.tail());
    let mut out = Vec::with_capacity(2 * n);
    out.extend(head.iter().zip(tail).map(|(h, t)| ((h + t) * 0.5).re));
    out.extend(head.iter().zip(tail).map(|(h, t)| ((h - t) * (-J * 0.5)).re));
    CompositeVector(out)
}

/// The `2n x 2n` transform `[[I, jI], [I, -jI]]`.
pub fn transform_matrix(n: usize) -> Matrix<Complex64> {
    Matrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        if i % n != j % n {
            return Complex64::new(0.0, 0.0);
        }
        match (bi, bj) {
            (0, 0) | (1, 0) => Complex64::new(1.0, 0.0),
            (0, 1) => J,
            _ => -J,
        }
    })
}

/// Training set: `n` complex input rows of dimension `d` and `n` targets.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexDataset {
    inputs: Matrix<Complex64>,
    targets: Vec<Complex64>,
}

impl ComplexDataset {
    pub fn new(inputs: Matrix<Complex64>, targets: Vec<Complex64>) -> Result<Self> {
        if inputs.nrows() == 0 {
            return Err(Error::Empty("dataset has no samples"));
        }
        if inputs.ncols() == 0 {
            return Err(Error::Empty("input dimension is zero"));
        }
        if inputs.nrows() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.nrows(),
                found: targets.len(),
            });
        }
        Ok(ComplexDataset { inputs, targets })
    }

    /// Dataset with scalar (`d = 1`) inputs.
    pub fn from_scalar_inputs(x: &[Complex64], y: Vec<Complex64>) -> Result<Self> {
        let inputs = Matrix::from_row_major(x.len(), 1, x.to_vec())?;
        Self::new(inputs, y)
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    /// Always false: construction rejects empty datasets.
    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.ncols()
    }

    pub fn inputs(&self) -> &Matrix<Complex64> {
        &self.inputs
    }

    pub fn targets(&self) -> &[Complex64] {
        &self.targets
    }

    pub fn sample(&self, i: usize) -> (&[Complex64], Complex64) {
        (self.inputs.row(i), self.targets[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[Complex64], Complex64)> {
        (0..self.len()).map(move |i| self.sample(i))
    }
}
