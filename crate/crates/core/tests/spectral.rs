mod common;

use common::{gauss_legendre, phi};
use lacelab::gamma::{default_radius_grid, GaussianMixture, MajorantFamily};
use lacelab::mc::{fill_standard_normal, sample_rng, Moments};
use lacelab::spectral::{bessel_j, inverse_radial_transform, mixture_hat, omega_kernel, RadialFn, RadialGrid};
use lacelab::{Error, Exec};
use std::f64::consts::PI;

fn grid() -> std::sync::Arc<RadialGrid> {
    RadialGrid::default().shared()
}

#[test]
fn grid_invariants() {
    let g = RadialGrid::default();
    assert_eq!(g.nodes()[0], 0.0);
    assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
    assert!(g.weights().iter().all(|w| *w > 0.0));
    let total: f64 = g.weights().iter().sum();
    assert!((total - g.k_max()).abs() < 1e-12);
}

#[test]
fn mixture_hat_rules() {
    let g = grid();
    let a = GaussianMixture::new(5, vec![]).unwrap().add(&GaussianMixture::single(5, 0.4, 1.0).unwrap()).add(
        &GaussianMixture::single(5, -0.3, 2.5).unwrap(),
    );
    let b = GaussianMixture::single(5, 1.2, 0.7).unwrap();
    let phi2 = mixture_hat(&GaussianMixture::gaussian(5, 2.0).unwrap(), &g);
    assert_eq!(phi2.at_zero(), 1.0);
    let (ha, hb) = (mixture_hat(&a, &g), mixture_hat(&b, &g));
    let sum = mixture_hat(&a.add(&b), &g);
    let conv = mixture_hat(&a.convolve(&b), &g);
    for (i, &k) in g.nodes().iter().enumerate() {
        assert!((phi2.values()[i] - (-k * k).exp()).abs() < 1e-16);
        assert!((sum.values()[i] - ha.values()[i] - hb.values()[i]).abs() < 1e-15);
        assert!((conv.values()[i] - ha.values()[i] * hb.values()[i]).abs() < 1e-14);
    }
    assert_eq!(ha.at_zero(), a.mass());
}

#[test]
fn bessel_closed_forms_and_series() {
    assert!(bessel_j(1, PI).unwrap().abs() < 1e-16);
    let u: f64 = 1e-3;
    let series = u.powf(1.5) * 2f64.sqrt() / (3.0 * PI.sqrt()) * (1.0 - u * u / 10.0);
    assert!((bessel_j(3, u).unwrap() / series - 1.0).abs() < 1e-9);
    assert!(bessel_j(4, 1.0).is_err());
}

#[test]
fn bessel_five_halves_against_integral_representation() {
    // J_ν(z) = (z/2)^ν / (Γ(ν + 1/2) √π) ∫_{−1}^{1} (1 − t²)^{ν − 1/2} cos(zt) dt, ν = 5/2.
    let z = 2.0f64;
    let integral: f64 = gauss_legendre(64).iter().map(|&(t, w)| w * (1.0 - t * t).powi(2) * (z * t).cos()).sum();
    let oracle = (z / 2.0).powf(2.5) / (2.0 * PI.sqrt()) * integral;
    assert!((bessel_j(5, z).unwrap() - oracle).abs() < 1e-10, "{} vs {oracle}", bessel_j(5, z).unwrap());
}

#[test]
fn gaussian_inverse_transforms() {
    let g = grid();
    let unit = RadialFn::from_fn(g.clone(), |k| (-k * k / 2.0).exp());
    let at0 = inverse_radial_transform(&unit, 0.0, 5).unwrap();
    assert!((at0 - (2.0 * PI).powf(-2.5)).abs() < 1e-15);
    for t in [1.0, 4.0] {
        let h = RadialFn::from_fn(g.clone(), |k| (-t * k * k / 2.0).exp());
        for r in [0.0, 1.0, 3.0] {
            let v = h.inverse(r, 5).unwrap();
            assert!((v / phi(5, t, r) - 1.0).abs() < 1e-8, "t={t} r={r}");
        }
    }
    let terms: [(f64, f64); 3] = [(0.5, 1.0), (-0.2, 2.0), (0.9, 4.0)];
    let mix = RadialFn::from_fn(g, |k: f64| terms.iter().map(|(w, t)| w * (-t * k * k / 2.0).exp()).sum::<f64>());
    for r in [0.0, 0.5, 2.0, 5.0] {
        let expect: f64 = terms.iter().map(|(w, t)| w * phi(5, *t, r)).sum();
        assert!((mix.inverse(r, 5).unwrap() - expect).abs() < 1e-8 * expect.abs());
    }
}

#[test]
fn refinement_is_converged() {
    let coarse = RadialGrid::default().shared();
    let fine = RadialGrid::uniform(coarse.k_max(), 2 * coarse.len() - 1).unwrap().shared();
    for t in [1.0, 3.0] {
        let a = RadialFn::from_fn(coarse.clone(), |k| (-t * k * k / 2.0).exp());
        let b = RadialFn::from_fn(fine.clone(), |k| (-t * k * k / 2.0).exp());
        for r in [0.0, 0.7, 2.0, 6.0] {
            let (x, y) = (a.inverse(r, 5).unwrap(), b.inverse(r, 5).unwrap());
            assert!((x - y).abs() < 1e-9 * y.abs().max(1e-300), "t={t} r={r}");
        }
    }
}

#[test]
fn transform_errors() {
    let g = grid();
    let slow = RadialFn::from_fn(g.clone(), |k| 1.0 / (1.0 + k * k));
    assert!(matches!(slow.inverse(1.0, 5), Err(Error::InsufficientDecay(_))));
    let ok = RadialFn::from_fn(g, |k| (-k * k / 2.0).exp());
    assert!(matches!(ok.inverse(1.0, 4), Err(Error::Unsupported(_))));
}

#[test]
fn omega_values() {
    for d in [3, 5, 7, 9] {
        assert_eq!(omega_kernel(d, 0.0).unwrap(), 1.0);
    }
    assert!(omega_kernel(3, PI).unwrap().abs() < 1e-16);
    let closed = 3.0 * (1f64.sin() - 1f64.cos());
    assert!((omega_kernel(5, 1.0).unwrap() - closed).abs() < 1e-15);
}

#[test]
fn omega_five_is_a_direction_average() {
    // cos(k·X) for X uniform on the unit sphere of R^5, k = 1.
    let mut acc = Moments::default();
    let mut v = [0.0; 5];
    for i in 0..1_000_000u64 {
        let mut rng = sample_rng(2024, i);
        fill_standard_normal(&mut rng, &mut v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        acc.push((v[0] / norm).cos());
    }
    let est = acc.estimate();
    assert!(est.z_score(omega_kernel(5, 1.0).unwrap()).abs() < 3.0, "{est:?}");
}

#[test]
fn preset_round_trips() {
    for d in [3, 5, 7] {
        for fam in [MajorantFamily::power_law(2.5, d).unwrap(), MajorantFamily::saw(1.0, d).unwrap()] {
            for n in [1usize, 2, 5, 16] {
                let mix = fam.gamma(n);
                let g = RadialGrid::for_min_variance(mix.min_variance().unwrap()).unwrap().shared();
                let h = mixture_hat(&mix, &g);
                let radii = default_radius_grid(16);
                let vals = h.inverse_batch(&radii, d, Exec::default()).unwrap();
                let peak = mix.eval(0.0);
                for (&r, v) in radii.iter().zip(vals) {
                    let exact = mix.eval(r);
                    if exact >= 1e-6 * peak {
                        assert!((v - exact).abs() < 1e-8 * exact, "d={d} n={n} r={r}: {v} vs {exact}");
                    }
                }
            }
        }
    }
}
