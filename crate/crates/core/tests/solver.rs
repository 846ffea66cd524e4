mod common;

use common::phi;
use lacelab::gamma::{GaussianMixture, MajorantFamily};
use lacelab::solver::{
    bound_mixture, bound_profile, clt_error_at, clt_error_profile, delta_jj_check, delta_kj_check, delta_mixture,
    frequency_residual, l1_error, profile_rows, ratio_report, run_recursion, BFamilySpec, DensityRoute,
    SolverConfig, SolverRun,
};
use lacelab::Error;
use std::sync::OnceLock;

fn power_law_run(lambda: f64, n_max: usize) -> SolverRun {
    let fam = BFamilySpec::power_law_preset(2.5, 5).unwrap();
    run_recursion(SolverConfig::new(fam, lambda, n_max)).unwrap()
}

fn shared_run() -> &'static SolverRun {
    static RUN: OnceLock<SolverRun> = OnceLock::new();
    RUN.get_or_init(|| power_law_run(0.02, 128))
}

#[test]
fn zero_coupling_is_the_gaussian_walk() {
    let run = power_law_run(0.0, 64);
    let s = &run.solution;
    assert_eq!((s.mu, s.alpha, s.delta), (1.0, 1.0, 1.0));
    for n in 1..=64 {
        for (i, &k) in run.grid.nodes().iter().enumerate().step_by(97) {
            assert!((run.c_hat[n].values()[i] - (-(n as f64) * k * k / 2.0).exp()).abs() < 1e-14);
        }
        let err = clt_error_profile(&run, n).unwrap();
        assert!(err.iter().all(|e| *e < 1e-10), "n={n}");
        for route in [DensityRoute::Mixture, DensityRoute::Transform] {
            let dens = run.density(n, &run.radii, route).unwrap();
            for (&r, v) in run.radii.iter().zip(dens) {
                assert!((v - phi(5, n as f64, r)).abs() < 1e-9);
            }
        }
    }
    assert!(ratio_report(&run, &[8, 16]).unwrap().iter().all(|(_, r)| *r == 0.0));
    assert_eq!(delta_kj_check(&run, 16).unwrap(), 0.0);
    for j in 1..=8 {
        let dm = delta_mixture(&run, 8, j).unwrap();
        assert!(run.radii.iter().all(|&r| dm.eval(r).abs() < 1e-15));
    }
}

#[test]
fn spectral_mass_is_the_scalar_sequence() {
    let run = shared_run();
    for n in 0..=128 {
        let (hat0, c) = (run.c_hat[n].at_zero(), run.c(n));
        assert!((hat0 - c).abs() <= 1e-12 * c.abs());
        let a = run.solution.a[n];
        assert!((run.solution.mu.powi(-(n as i32)) * hat0 - a).abs() <= 1e-12 * a.abs());
    }
    assert!(frequency_residual(run).unwrap() < 1e-13);
    assert!(run.c_hat.iter().all(|h| h.values().iter().all(|v| v.is_finite())));
}

#[test]
fn single_mode_hand_unrolled() {
    let (beta, s, lambda) = (-0.6, 0.8, 0.1);
    let fam = BFamilySpec::mixtures(vec![GaussianMixture::single(3, beta, s).unwrap()], None).unwrap();
    let run = run_recursion(SolverConfig::new(fam, lambda, 3)).unwrap();
    let (c1, c2) = (run.c(1), run.c(2));
    assert!((c1 * (1.0 - lambda * beta) - 1.0).abs() < 1e-15);
    assert!((c2 - (c1 + lambda * beta * c1 * c1)).abs() < 1e-15);
    for (i, &k) in run.grid.nodes().iter().enumerate().step_by(50) {
        let g = (-k * k / 2.0).exp();
        let b = beta * (-s * k * k / 2.0).exp();
        let h1 = g + lambda * c1 * b;
        let h2 = h1 * g + lambda * c1 * b * h1;
        assert!((run.c_hat[1].values()[i] - h1).abs() < 1e-15);
        assert!((run.c_hat[2].values()[i] - h2).abs() < 1e-15);
    }
}

#[test]
fn routes_agree() {
    let run = shared_run();
    for n in [4, 32, 128] {
        let radii: Vec<f64> = run.radii.iter().copied().filter(|r| *r < 6.0 * (n as f64).sqrt()).collect();
        let a = run.density(n, &radii, DensityRoute::Mixture).unwrap();
        let b = run.density(n, &radii, DensityRoute::Transform).unwrap();
        let peak = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10 * peak, "n={n}");
        }
    }
}

#[test]
fn clt_error_decays_in_radius_and_n() {
    let run = shared_run();
    let far = clt_error_at(run, 32, &[0.0, 10.0, 40.0, 80.0]).unwrap();
    assert!(far.iter().all(|e| e.is_finite()));
    assert!(far[3] < 1e-20 && far[2] < far[1]);
    let l1: Vec<f64> = [8, 16, 32, 64].iter().map(|&n| l1_error(run, n, 2001).unwrap()).collect();
    assert!(l1.windows(2).all(|w| w[1] < w[0]), "{l1:?}");
}

#[test]
fn bound_profile_properties() {
    let run = shared_run();
    let fam = MajorantFamily::power_law(2.5, 5).unwrap();
    let zeta = run.zeta.as_ref().unwrap();
    for n in [2, 9, 32] {
        // positive everywhere; far tails are compared on the log scale
        assert!(bound_profile(run, n).unwrap().iter().all(|b| *b >= 0.0));
        let b = bound_mixture(run, n).unwrap();
        assert!(run.radii.iter().all(|&r| b.ln_eval(r).is_finite()));
        let mass: f64 = (1..=n / 2).map(|s| s as f64 * fam.gamma_moment(n - s, 0)).sum::<f64>() + zeta.zeta_bar(n);
        let got = bound_mixture(run, n).unwrap().mass();
        assert!((got - 0.02 * mass).abs() < 1e-12 * got);
    }
}

#[test]
fn saw_bound_at_origin_scaling() {
    let fam = BFamilySpec::saw_preset(1.0, 5).unwrap();
    let run = run_recursion(SolverConfig::new(fam, 0.02, 128)).unwrap();
    let scaled: Vec<f64> = [16usize, 32, 64, 128]
        .iter()
        .map(|&n| bound_mixture(&run, n).unwrap().eval(0.0) / (0.02 * (n as f64).powf(-2.5)))
        .collect();
    // n^{5/2} · bound(0) / λ stays within a constant band.
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi / lo < 2.0, "{scaled:?}");
}

#[test]
fn ratios_banded_and_proportional_to_lambda() {
    let run = shared_run();
    let ratios = ratio_report(run, &[8, 16, 32, 64]).unwrap();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), (_, r)| (a.min(*r), b.max(*r)));
    assert!(lo > 0.0 && hi / lo < 10.0, "{ratios:?}");
    let half = power_law_run(0.01, 64);
    for ((_, r), (_, h)) in ratios.iter().zip(ratio_report(&half, &[8, 16, 32, 64]).unwrap()) {
        assert!(h <= 2.0 * r, "{h} vs {r}");
    }
}

#[test]
fn delta_constants() {
    let run = shared_run();
    let (k16, k32) = (delta_kj_check(run, 16).unwrap(), delta_kj_check(run, 32).unwrap());
    assert!(k16.is_finite() && k32.is_finite() && k16 > 0.0);
    assert!(k32 / k16 < 4.0 && k16 / k32 < 4.0, "{k16} {k32}");
    let jj = delta_jj_check(run, 32).unwrap();
    assert!(jj.is_finite() && jj > 0.0);
}

#[test]
fn profile_rows_are_consistent() {
    let run = shared_run();
    let rows = profile_rows(run, 16).unwrap();
    assert_eq!(rows.len(), run.radii.len());
    for row in rows {
        assert_eq!(row.error, (row.c_density - row.gauss_ref).abs());
        assert!(row.bound > 0.0 && row.ratio.is_finite());
    }
}

#[test]
fn config_validation_and_restriction_flag() {
    let fam = BFamilySpec::power_law_preset(2.5, 5).unwrap();
    let mut cfg = SolverConfig::new(fam.clone(), 0.02, 16);
    cfg.epsilon = 0.5;
    assert!(matches!(run_recursion(cfg), Err(Error::InvalidParameter(_))));
    let mut cfg = SolverConfig::new(fam.clone(), 0.02, 16);
    cfg.d = 4;
    assert!(run_recursion(cfg).is_err());
    assert!(shared_run().restriction_ok);
}
