use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wrkhs_core::channel::{
    add_awgn, apply_channel, build_equalizer_dataset, generate_source, mean_power, pseudo_variance,
    run_trial, simulate_trial, ChannelConfig, EqualizationConfig,
};
use wrkhs_core::regression::fit_srkhs;
use wrkhs_core::{Complex64, ComplexDataset, Matrix, RidgeConfig};

const N: usize = 100_000;

// Var|s|^2 and the variances of both parts of s^2 are at most 2 scale^4 for
// this source, so 3 sigma of a sample mean is below 3 sqrt(2) scale^2 / sqrt(N).
fn three_sigma(scale: f64) -> f64 {
    3.0 * 2f64.sqrt() * scale * scale / (N as f64).sqrt()
}

#[test]
fn source_moments() {
    for (rho, seed) in [(std::f64::consts::FRAC_1_SQRT_2, 1), (0.1, 2), (0.9, 3)] {
        let scale = 0.7;
        let s = generate_source(N, rho, scale, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let tol = three_sigma(scale);
        assert!((mean_power(&s) - scale * scale).abs() < tol, "rho {rho}");
        let pv = pseudo_variance(&s);
        let want = scale * scale * (1.0 - 2.0 * rho * rho);
        assert!((pv.re - want).abs() < tol, "rho {rho}: {pv} vs {want}");
        assert!(pv.im.abs() < tol, "rho {rho}: {pv}");
        let mean = s.iter().sum::<Complex64>() / N as f64;
        assert!(mean.norm() < 3.0 * 2f64.sqrt() * scale / (N as f64).sqrt());
    }
}

#[test]
fn noise_meets_requested_snr() {
    let cfg = ChannelConfig::default();
    for seed in 0..5 {
        let s = generate_source(cfg.samples, cfg.rho, cfg.source_scale, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let q = apply_channel(&s, &cfg);
        for snr in [5.0, 16.0, 30.0] {
            let r = add_awgn(&q, snr, &mut ChaCha8Rng::seed_from_u64(100 + seed)).unwrap();
            let w: Vec<Complex64> = r.iter().zip(&q).map(|(a, b)| a - b).collect();
            let measured = 10.0 * (mean_power(&q) / mean_power(&w)).log10();
            assert!((measured - snr).abs() < 0.2, "snr {snr}: measured {measured}");
        }
    }
}

#[test]
fn noise_is_circular() {
    let q = vec![Complex64::new(1.0, 0.0); N];
    let r = add_awgn(&q, 0.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    let w: Vec<Complex64> = r.iter().zip(&q).map(|(a, b)| a - b).collect();
    let p = mean_power(&w);
    assert!((p - 1.0).abs() < three_sigma(1.0));
    assert!(pseudo_variance(&w).norm() < 2.0 * three_sigma(1.0));
}

#[test]
fn infinite_snr_is_noiseless() {
    let cfg = ChannelConfig {
        snr_db: f64::INFINITY,
        samples: 50,
        ..ChannelConfig::default()
    };
    let (r, s) = simulate_trial(&cfg, 4).unwrap();
    assert_eq!(r, apply_channel(&s, &cfg));
}

#[test]
fn unbounded_curve_matches_prefix_refits() {
    let mut cfg = EqualizationConfig::circular();
    cfg.channel.samples = 60;
    cfg.budget = None;
    cfg.trials = 1;
    let curve = run_trial(&cfg, 0).unwrap();

    let (r, s) = simulate_trial(&cfg.channel, cfg.trial_seed(0)).unwrap();
    let data = build_equalizer_dataset(&r, &s, cfg.channel.filter_len, cfg.channel.delay).unwrap();
    assert_eq!(curve.len(), data.len());
    let ridge = RidgeConfig::new(cfg.lambda).unwrap();
    let mut total = 0.0;
    for (k, &got) in curve.iter().enumerate() {
        let (x, y) = data.sample(k);
        let y_hat = if k == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            let inputs = Matrix::from_fn(k, cfg.channel.filter_len, |i, j| data.inputs()[(i, j)]);
            let prefix = ComplexDataset::new(inputs, data.targets()[..k].to_vec()).unwrap();
            fit_srkhs(&prefix, &cfg.kernel, ridge).unwrap().predict_one(x).unwrap()
        };
        total += (y - y_hat).norm_sqr();
        let want = total / (k + 1) as f64;
        assert!((got - want).abs() <= 1e-9 * want.max(1e-12), "step {k}");
    }
}

#[test]
fn single_trial_error_decreases() {
    let mut cfg = EqualizationConfig::circular();
    cfg.trials = 1;
    let curve = run_trial(&cfg, 0).unwrap();
    assert_eq!(curve.len(), 4996);
    assert!(curve[4995] <= curve[499], "{} > {}", curve[4995], curve[499]);
}

#[test]
fn noncircular_trial_is_finite() {
    let mut cfg = EqualizationConfig::noncircular();
    cfg.channel.samples = 1500;
    let curve = run_trial(&cfg, 3).unwrap();
    assert!(curve.iter().all(|v| v.is_finite() && *v >= 0.0));
}
