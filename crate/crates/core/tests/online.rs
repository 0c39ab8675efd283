mod common;

use common::{c, random_dataset, random_spec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wrkhs_core::kernels::KernelSpec;
use wrkhs_core::online::OnlineModel;
use wrkhs_core::regression::fit_srkhs;
use wrkhs_core::{ComplexDataset, Matrix, RidgeConfig};

const NULL_PSEUDO_FAMILIES: usize = 3;

fn stream(model: &mut OnlineModel, data: &ComplexDataset) {
    for (x, y) in data.iter() {
        model.observe(x, y).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn unbounded_matches_batch(seed in any::<u64>(), family in 0..NULL_PSEUDO_FAMILIES, n in 1usize..=60, d in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, family);
        let data = random_dataset(&mut rng, n, d);
        let lambda = rng.random_range(0.05..1.0);

        let mut online = OnlineModel::new(spec.clone(), lambda, None).unwrap();
        stream(&mut online, &data);
        let batch = fit_srkhs(&data, &spec, RidgeConfig::new(lambda).unwrap()).unwrap();

        prop_assert_eq!(online.len(), n);
        let diff = online
            .alpha()
            .iter()
            .zip(batch.alpha())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        prop_assert!(diff <= 1e-8, "alpha differs by {diff:e}");

        let probe = common::random_inputs(&mut rng, 5, d, 1.5);
        for i in 0..5 {
            let a = online.predict(probe.row(i)).unwrap();
            let b = batch.predict_one(probe.row(i)).unwrap();
            prop_assert!((a - b).norm() <= 1e-8);
        }
    }

    #[test]
    fn budget_is_a_ceiling(seed in any::<u64>(), family in 0..NULL_PSEUDO_FAMILIES, budget in 1usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, family);
        let data = random_dataset(&mut rng, 40, 1);
        let lambda = 0.3;
        let mut online = OnlineModel::new(spec.clone(), lambda, Some(budget)).unwrap();
        for (k, (x, y)) in data.iter().enumerate() {
            online.observe(x, y).unwrap();
            prop_assert_eq!(online.len(), (k + 1).min(budget));
        }
        // the retained expansion is the ridge solution on the retained samples
        let dict = online.dictionary();
        let inputs = Matrix::from_fn(dict.len(), 1, |i, _| dict[i][0]);
        let kept = ComplexDataset::new(inputs, online.targets().to_vec()).unwrap();
        let refit = fit_srkhs(&kept, &spec, RidgeConfig::new(lambda).unwrap()).unwrap();
        let diff = online
            .alpha()
            .iter()
            .zip(refit.alpha())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        prop_assert!(diff <= 1e-8, "alpha differs by {diff:e}");
        prop_assert!(online.inverse_residual() <= 1e-8);
    }
}

#[test]
fn observe_returns_prior_prediction() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let data = random_dataset(&mut rng, 20, 1);
    let mut online = OnlineModel::new(KernelSpec::complex_gaussian(12.0), 0.2, Some(8)).unwrap();
    for (x, y) in data.iter() {
        let before = online.predict(x).unwrap();
        assert_eq!(online.observe(x, y).unwrap(), before);
    }
}

#[test]
fn long_stream_keeps_inverse_accurate() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let data = random_dataset(&mut rng, 1200, 1);
    let mut online = OnlineModel::new(KernelSpec::independent(1.0), 0.1, Some(50)).unwrap();
    stream(&mut online, &data);
    assert_eq!(online.observed(), 1200);
    assert_eq!(online.len(), 50);
    assert!(online.inverse_residual() <= 1e-6);
}

#[test]
fn rejects_invalid_setups() {
    assert!(OnlineModel::new(KernelSpec::separate_real_imag(1.0, 2.0), 0.1, None).is_err());
    assert!(OnlineModel::new(KernelSpec::isotropic_gaussian(1.0), 0.0, None).is_err());
    assert!(OnlineModel::new(KernelSpec::isotropic_gaussian(1.0), 0.1, Some(0)).is_err());
    let mut m = OnlineModel::new(KernelSpec::isotropic_gaussian(1.0), 0.1, None).unwrap();
    m.observe(&[c(0.0, 1.0)], c(1.0, 0.0)).unwrap();
    assert!(m.observe(&[c(0.0, 1.0), c(1.0, 0.0)], c(1.0, 0.0)).is_err());
    assert!(m.observe(&[c(f64::NAN, 0.0)], c(1.0, 0.0)).is_err());
    assert_eq!(m.len(), 1);
}
