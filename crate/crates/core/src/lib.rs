//! Widely complex-valued kernel regression.
//!
//! A complex-valued regressor built from a kernel `k` acting on the
//! coefficients and a pseudo-kernel `k~` acting on their conjugates:
//!
//! `f(x) = k(x, X) a + k~(x, X) conj(a)`
//!
//! With a null pseudo-kernel this is ordinary complex kernel ridge regression
//! (the "strict" case). The crate contains
//!
//! * [`repr`]: composite (`[Re; Im]`) and augmented (`[v; conj v]`) vector
//!   algebra plus the dataset container,
//! * [`linalg`]: dense matrices and the Hermitian solver everything else uses,
//! * [`kernels`]: the kernel / pseudo-kernel families and Gram builders,
//! * [`regression`]: batch fitting through three algebraically equivalent routes,
//! * [`online`]: recursive (budgeted) kernel least squares for null pseudo-kernels,
//! * [`channel`] and [`synthetic`]: the benchmark generators and runners.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and the CLI
//! live in the `wrkhs` companion crate.
#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod channel;
mod error;
pub mod kernels;
pub mod linalg;
pub mod online;
pub mod regression;
pub mod repr;
pub mod rng;
pub mod scalar;
pub mod synthetic;

pub use error::{Error, Result};
pub use kernels::{BlockKernel, KernelSpec, RealKernelSpec, SeparableTerm};
pub use linalg::{hermitian_solve, Matrix};
pub use num_complex::Complex64;
pub use online::OnlineModel;
pub use regression::{mse_db, RidgeConfig, WrkhsModel};
pub use repr::{AugmentedVector, ComplexDataset, CompositeVector};
