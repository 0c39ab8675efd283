//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runtime limits are part of each criterion.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::cell::Cell;
use std::f64::consts::FRAC_1_SQRT_2;
use std::time::{Duration, Instant};

use common::{random_dataset, random_inputs, random_spec, FAMILIES};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wrkhs::bench;
use wrkhs::core::channel::{generate_source, pseudo_variance, EqualizationConfig};
use wrkhs::core::kernels::min_composite_eigenvalue;
use wrkhs::core::regression::{fit_augmented, fit_augmented_schur, fit_composite, fit_srkhs, solve_augmented};
use wrkhs::core::rng::{stream_rng, Stream};
use wrkhs::core::synthetic::{SyntheticConfig, SyntheticRun};
use wrkhs::core::{Complex64, ComplexDataset, KernelSpec, OnlineModel, RidgeConfig};
use wrkhs::surface::{kernel_surface, SurfacePoint, SurfaceRequest};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

struct Problem {
    spec: KernelSpec,
    data: ComplexDataset,
    ridge: RidgeConfig,
    test: wrkhs::core::Matrix<Complex64>,
}

/// 50 problems cycling through every kernel family.
fn problem_set() -> Vec<Problem> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_501);
    (0..50)
        .map(|i| {
            let spec = random_spec(&mut rng, i % FAMILIES);
            let n = rng.random_range(1..=30);
            let d = rng.random_range(1..=3);
            let data = random_dataset(&mut rng, n, d);
            let ridge = RidgeConfig::new(rng.random_range(0.05..1.0)).unwrap();
            let test = random_inputs(&mut rng, 10, d, 1.5);
            Problem { spec, data, ridge, test }
        })
        .collect()
}

fn c1_three_paths() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in problem_set() {
        let preds: Vec<Vec<Complex64>> = [p.test.clone(), p.data.inputs().clone()]
            .iter()
            .flat_map(|xs| {
                [
                    fit_composite(&p.data, &p.spec, p.ridge).unwrap().predict(xs).unwrap(),
                    fit_augmented(&p.data, &p.spec, p.ridge).unwrap().predict(xs).unwrap(),
                    fit_augmented_schur(&p.data, &p.spec, p.ridge).unwrap().predict(xs).unwrap(),
                ]
            })
            .collect();
        for pair in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)] {
            worst = worst.max(max_diff(&preds[pair.0], &preds[pair.1]));
        }
    }
    outcome(worst <= 1e-8, format!("max |difference| {worst:.2e} over 50 problems (limit 1e-8)"))
}

fn c2_conjugate_structure() -> Outcome {
    let worst = problem_set()
        .iter()
        .map(|p| solve_augmented(&p.data, &p.spec, p.ridge).unwrap().conjugate_discrepancy())
        .fold(0.0, f64::max);
    outcome(worst <= 1e-9, format!("max |a[n+i] - conj(a[i])| {worst:.2e} (limit 1e-9)"))
}

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases: 1000,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn pair() -> impl Strategy<Value = (Vec<Complex64>, Vec<Complex64>)> {
    (1usize..=3).prop_flat_map(|d| (proptest::collection::vec(complex(), d), proptest::collection::vec(complex(), d)))
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12 * (1.0 + a.norm().max(b.norm()))
}

fn c3_kernel_laws() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    let mut law = |name: &str, result: Result<(), String>| {
        cases += 1000;
        if let Err(e) = result {
            failures.push(format!("{name}: {e}"));
        }
    };
    let with_spec = (pair(), any::<u64>(), 0..FAMILIES);

    law(
        "hermitian kernel",
        runner()
            .run(&with_spec, |((x, y), seed, fam)| {
                let spec = random_spec(&mut ChaCha8Rng::seed_from_u64(seed), fam);
                let (a, b) = (spec.eval_kernel(&x, &y).unwrap(), spec.eval_kernel(&y, &x).unwrap());
                prop_assert!(close(a, b.conj()));
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );
    law(
        "symmetric pseudo-kernel",
        runner()
            .run(&with_spec, |((x, y), seed, fam)| {
                let spec = random_spec(&mut ChaCha8Rng::seed_from_u64(seed), fam);
                let (a, b) = (spec.eval_pseudo_kernel(&x, &y).unwrap(), spec.eval_pseudo_kernel(&y, &x).unwrap());
                prop_assert!(close(a, b));
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );
    law(
        "skew-symmetric imaginary part",
        runner()
            .run(&(pair(), 0.5..100.0f64), |((x, y), gamma)| {
                for spec in [KernelSpec::complex_gaussian(gamma), KernelSpec::independent(gamma)] {
                    let (a, b) = (spec.eval_kernel(&x, &y).unwrap(), spec.eval_kernel(&y, &x).unwrap());
                    prop_assert!((a.im + b.im).abs() <= 1e-12 * (1.0 + a.norm()));
                    prop_assert!((a.re - b.re).abs() <= 1e-12 * (1.0 + a.norm()));
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );
    law(
        "stationary isotropic Gaussian",
        runner()
            .run(&(pair(), complex(), 0.1..10.0f64), |((x, y), s, gamma)| {
                let spec = KernelSpec::isotropic_gaussian(gamma);
                let xs: Vec<_> = x.iter().map(|v| v + s).collect();
                let ys: Vec<_> = y.iter().map(|v| v + s).collect();
                prop_assert!(close(spec.eval_kernel(&x, &y).unwrap(), spec.eval_kernel(&xs, &ys).unwrap()));
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );
    law(
        "positive semidefinite composite Gram",
        runner()
            .run(&(any::<u64>(), 0..FAMILIES, 1usize..=30, 1usize..=3), |(seed, fam, n, d)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let spec = random_spec(&mut rng, fam);
                let x = random_inputs(&mut rng, n, d, 2.0);
                let min = min_composite_eigenvalue(&spec, &x).unwrap();
                prop_assert!(min >= -1e-10, "min eigenvalue {}", min);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    // a shift along the imaginary axis changes the complex Gaussian
    let kc = KernelSpec::complex_gaussian(1.0);
    let (x, y, s) = (Complex64::new(0.2, 0.1), Complex64::new(0.4, -0.3), Complex64::new(0.0, 0.7));
    let a = kc.eval_kernel(&[x], &[y]).unwrap();
    let b = kc.eval_kernel(&[x + s], &[y + s]).unwrap();
    cases += 1;
    if (a - b).norm() <= 1e-3 {
        failures.push(format!("non-stationarity witness: {a} vs {b}"));
    }

    let detail = if failures.is_empty() {
        format!("{cases} cases over 5 laws plus the non-stationarity witness")
    } else {
        failures.join("; ")
    };
    outcome(failures.is_empty(), detail)
}

fn sweep_table(runs: &[SyntheticRun]) -> String {
    runs.iter()
        .map(|r| format!("{:.1}/{:.1}", r.wrkhs_mse_db, r.ablation_mse_db))
        .collect::<Vec<_>>()
        .join(" ")
}

fn c4_experiment1() -> Outcome {
    let runs = bench::synthetic_sweep(&SyntheticConfig::exp1(), 10).unwrap();
    let pass = runs.iter().all(|r| r.wrkhs_mse_db <= -48.0 && r.gap_db() >= 8.0);
    let worst_mse = runs.iter().map(|r| r.wrkhs_mse_db).fold(f64::NEG_INFINITY, f64::max);
    let worst_gap = runs.iter().map(|r| r.gap_db()).fold(f64::INFINITY, f64::min);
    outcome(
        pass,
        format!(
            "worst WRKHS {worst_mse:.2} dB (need <= -48), smallest gap {worst_gap:.2} dB (need >= 8); wrkhs/ablation per seed: {}",
            sweep_table(&runs)
        ),
    )
}

fn c5_experiment2() -> Outcome {
    let runs = bench::synthetic_sweep(&SyntheticConfig::exp2(), 10).unwrap();
    let pass = runs.iter().all(|r| r.wrkhs_mse_db <= -40.0 && r.gap_db() >= 2.0);
    let worst_mse = runs.iter().map(|r| r.wrkhs_mse_db).fold(f64::NEG_INFINITY, f64::max);
    let worst_gap = runs.iter().map(|r| r.gap_db()).fold(f64::INFINITY, f64::min);
    outcome(
        pass,
        format!(
            "worst WRKHS {worst_mse:.2} dB (need <= -40), smallest gap {worst_gap:.3} dB (need >= 2); wrkhs/ablation per seed: {}",
            sweep_table(&runs)
        ),
    )
}

fn c6_online_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        // families 0..3 have a null pseudo-kernel
        let spec = random_spec(&mut rng, i % 3);
        let n = rng.random_range(1..=200);
        let d = rng.random_range(1..=3);
        let data = random_dataset(&mut rng, n, d);
        let lambda = rng.random_range(0.01..1.0);
        let mut online = OnlineModel::new(spec.clone(), lambda, None).unwrap();
        for (x, y) in data.iter() {
            online.observe(x, y).unwrap();
        }
        let batch = fit_srkhs(&data, &spec, RidgeConfig::new(lambda).unwrap()).unwrap();
        worst = worst.max(max_diff(online.alpha(), batch.alpha()));
    }
    outcome(worst <= 1e-6, format!("max coefficient difference {worst:.2e} over 20 streams (limit 1e-6)"))
}

fn c7_budget(circular_final: &Cell<Option<f64>>) -> Outcome {
    let budgeted_cfg = EqualizationConfig::circular();
    let unbounded_cfg = EqualizationConfig {
        budget: None,
        ..budgeted_cfg.clone()
    };
    let budgeted = bench::equalization(&budgeted_cfg).unwrap();
    let unbounded = bench::equalization(&unbounded_cfg).unwrap();
    let (b, u) = (budgeted.final_mse_db(), unbounded.final_mse_db());
    circular_final.set(Some(b));
    outcome(
        (b - u).abs() <= 1.0,
        format!("final averaged MSE: M = 500 {b:.3} dB, unbounded {u:.3} dB, |gap| {:.3} dB (limit 1)", (b - u).abs()),
    )
}

fn c8_noncircular(circular_final: &Cell<Option<f64>>) -> Outcome {
    let res = bench::equalization(&EqualizationConfig::noncircular()).unwrap();
    let curve = &res.mse_db;
    let finite = curve.iter().all(|v| v.is_finite());
    let (early, last) = (curve[499], res.final_mse_db());
    let decreasing = last < early;
    let circular = circular_final.get();
    let within = circular.is_some_and(|c| (last - c).abs() <= 3.0);
    outcome(
        finite && decreasing && within,
        format!(
            "finite {finite}, MSE at sample 500 {early:.3} dB -> final {last:.3} dB, circular final {}",
            circular.map_or("unavailable".into(), |c| format!("{c:.3} dB (|diff| {:.3}, limit 3)", (last - c).abs()))
        ),
    )
}

fn c9_circularity() -> Outcome {
    let n = 100_000;
    let s = generate_source(n, FRAC_1_SQRT_2, 0.70, &mut stream_rng(9, Stream::Source)).unwrap();
    let circ = pseudo_variance(&s).norm();

    let rho = 0.1;
    let s = generate_source(n, rho, 0.70, &mut stream_rng(10, Stream::Source)).unwrap();
    let pv = pseudo_variance(&s);
    let want = 0.49 * (1.0 - 2.0 * rho * rho);
    let se = |f: &dyn Fn(Complex64) -> f64, mean: f64| {
        let var = s.iter().map(|z| (f(z * z) - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    };
    let (se_re, se_im) = (se(&|z| z.re, pv.re), se(&|z| z.im, pv.im));
    let ok_nc = (pv.re - want).abs() <= 3.0 * se_re && pv.im.abs() <= 3.0 * se_im;
    outcome(
        circ < 0.02 && ok_nc,
        format!(
            "|E[s^2]| at rho = 1/sqrt(2): {circ:.4} (limit 0.02); rho = 0.1: {:.5}{:+.5}j vs {want:.5} (3 SE = {:.5}, {:.5})",
            pv.re,
            pv.im,
            3.0 * se_re,
            3.0 * se_im
        ),
    )
}

fn surface(kernel: KernelSpec, range: f64, diagonal: bool) -> Vec<SurfacePoint> {
    kernel_surface(&SurfaceRequest {
        kernel,
        center: Complex64::new(0.0, 0.0),
        range,
        resolution: 101,
        diagonal,
    })
    .unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn c10_surfaces() -> Outcome {
    let g = 101;
    let mid = g / 2;
    let at = |pts: &[SurfacePoint], i: usize, j: usize| pts[j * g + i];
    let mut notes = Vec::new();
    let mut pass = true;

    // complex Gaussian on the diagonal
    let gamma = 80.0;
    let pts = surface(KernelSpec::complex_gaussian(gamma), 15.0, true);
    let worst = pts
        .iter()
        .map(|p| rel(p.k.re, (4.0 * p.x.im * p.x.im / gamma).exp()).max(p.k.im.abs()))
        .fold(0.0, f64::max);
    pass &= worst <= 1e-12;
    notes.push(format!("k_C(x,x) vs exp(4 x_j^2/gamma): max rel dev {worst:.1e}"));

    // isotropic Gaussian around the origin
    let gamma = 0.8;
    let pts = surface(KernelSpec::isotropic_gaussian(gamma), 5.0, false);
    let center = at(&pts, mid, mid).k;
    let mut worst: f64 = 0.0;
    for j in 0..g {
        for i in 0..g {
            let v = at(&pts, i, j).k;
            for w in [at(&pts, g - 1 - i, j), at(&pts, i, g - 1 - j), at(&pts, j, i)] {
                worst = worst.max((v - w.k).norm());
            }
            let p = at(&pts, i, j);
            worst = worst.max((p.k.re - (-p.x.norm_sqr() / gamma).exp()).abs());
        }
    }
    let ok = center == Complex64::new(1.0, 0.0) && worst <= 1e-12;
    pass &= ok;
    notes.push(format!("k_G center {center}, radial asymmetry {worst:.1e}"));

    // independent kernel: real part along both axes through the origin
    let pts = surface(KernelSpec::independent(gamma), 15.0, false);
    let center = at(&pts, mid, mid).k.re;
    let axis_dev = (0..g)
        .flat_map(|t| [at(&pts, t, mid), at(&pts, mid, t)])
        .map(|p| (p.k.re - center).abs())
        .fold(0.0, f64::max);
    let off_axis = at(&pts, 0, 0).k.re;
    pass &= axis_dev <= 1e-12;
    notes.push(format!(
        "k_ind Re center {center:.6}, max axis deviation from center {axis_dev:.3e} (limit 1e-12), far axis {:.6}, far corner {off_axis:.2e}",
        at(&pts, 0, mid).k.re
    ));
    outcome(pass, notes.join("; "))
}

fn main() {
    let start = Instant::now();
    // criterion 8 compares against the circular M = 500 run of criterion 7
    let circular_final = Cell::new(None);
    let cf = &circular_final;
    type Criterion<'a> = (usize, &'a str, Duration, Box<dyn FnOnce() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        (1, "three-path equivalence", Duration::from_secs(10), Box::new(c1_three_paths)),
        (2, "conjugate structure", Duration::from_secs(10), Box::new(c2_conjugate_structure)),
        (3, "kernel law suite", Duration::from_secs(30), Box::new(c3_kernel_laws)),
        (4, "experiment 1 band", Duration::from_secs(120), Box::new(c4_experiment1)),
        (5, "experiment 2 band", Duration::from_secs(120), Box::new(c5_experiment2)),
        (6, "online vs batch oracle", Duration::from_secs(30), Box::new(c6_online_oracle)),
        (7, "budget vs unbounded", Duration::from_secs(900), Box::new(move || c7_budget(cf))),
        (8, "noncircular run", Duration::from_secs(900), Box::new(move || c8_noncircular(cf))),
        (9, "source circularity", Duration::from_secs(60), Box::new(c9_circularity)),
        (10, "kernel surface anchors", Duration::from_secs(5), Box::new(c10_surfaces)),
    ];
    let mut failed = Vec::new();
    for (id, name, limit, run) in criteria {
        let t = Instant::now();
        let out = run();
        let elapsed = t.elapsed();
        let in_time = elapsed <= limit;
        let pass = out.pass && in_time;
        let time_note = if in_time { String::new() } else { format!(" (over the {} s limit)", limit.as_secs()) };
        println!(
            "{} criterion {id:>2} {name}: {} [{:.1} s{time_note}]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
        if !pass {
            failed.push(id);
        }
    }
    println!(
        "acceptance: {} of 10 criteria passed in {:.1} s{}",
        10 - failed.len(),
        start.elapsed().as_secs_f64(),
        if failed.is_empty() { String::new() } else { format!("; failed: {failed:?}") }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
