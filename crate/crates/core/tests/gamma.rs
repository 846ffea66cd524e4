mod common;

use common::{phi, radial_integral, simpson, sphere};
use lacelab::gamma::conditions::shifted_moment;
use lacelab::gamma::profiles::{convol_constant, ln_four_gaussian, phi1_sup, PointPair};
use lacelab::gamma::{
    condition_report, default_radius_grid, f_profile, geometric_grid, kappa_profile, le_main_check, psi_n, r_n,
    Condition, GaussianMixture, MajorantFamily, PsiScale, ZetaTable,
};
use proptest::prelude::*;

fn power_law() -> MajorantFamily {
    MajorantFamily::power_law(2.5, 5).unwrap()
}

#[test]
fn gamma_moment_by_radial_quadrature() {
    let fam = power_law();
    let g2 = fam.gamma(2);
    let quad = radial_integral(5, |r| r.powi(4) * 2f64.powf(-2.5) * phi(5, 1.0, r), 20.0);
    assert!((quad - 6.187184335382291).abs() < 1e-8, "{quad}");
    assert!((fam.gamma_moment(2, 2) - quad).abs() < 1e-8);
    assert_eq!(fam.gamma_moment(1, 0), 1.0);
    let single = GaussianMixture::single(5, 0.7, 1.3).unwrap();
    assert!((single.moment(1) - 0.7 * 5.0 * 1.3).abs() < 1e-14);
    assert!((g2.mass() - 2f64.powf(-2.5)).abs() < 1e-15);
}

#[test]
fn chi_power_law_and_symmetry() {
    let fam = power_law();
    let chi = fam.chi(16, &default_radius_grid(16));
    for m in 1..=16 {
        assert!((chi.value(m, m) - (2.0 / m as f64).powf(2.5)).abs() < 1e-14);
        for n in 1..=16 {
            assert_eq!(chi.value(m, n), chi.value(n, m));
        }
    }
}

#[test]
fn saw_chi_dominates_convolutions() {
    let fam = MajorantFamily::saw(1.0, 5).unwrap();
    let radii = geometric_grid(1e-2, 40.0, 64);
    let chi = fam.chi(16, &default_radius_grid(16));
    for m in 1..=16 {
        for n in 1..=16 {
            let lhs = fam.gamma(m).convolve(&fam.gamma(n));
            let rhs = fam.gamma(m + n);
            for &r in &radii {
                let ratio = (lhs.ln_eval(r) - rhs.ln_eval(r)).exp();
                assert!(ratio <= chi.value(m, n) * (1.0 + 1e-9), "m={m} n={n} r={r}");
            }
        }
    }
}

#[test]
fn condition_reports() {
    let good = condition_report(&power_law(), 64).unwrap();
    assert!(good.all_pass(), "{:?}", good.violations);
    assert!(good.constants().iter().all(|k| k.is_finite() && *k > 0.0));
    let saw = condition_report(&MajorantFamily::saw(1.0, 5).unwrap(), 64).unwrap();
    assert!(saw.all_pass(), "{:?}", saw.violations);
    assert!(saw.constants().iter().all(|k| k.is_finite() && *k > 0.0));
    let slow = condition_report(&MajorantFamily::power_law(1.5, 5).unwrap(), 64).unwrap();
    assert!(!slow.passes(Condition::B4));
    assert!(!slow.tails.k4.bounded);
    let json = serde_json::to_value(&good).unwrap();
    for key in ["k1", "k2", "k3", "k4", "k5", "k6", "violations", "tails"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn b3_closed_form_matches_quadrature() {
    // ∫ φ_t(x − y) |y|^{2k} φ_v(y) dy over R^5 in polar coordinates around x.
    let d = 5;
    for &(t, v, x) in &[(2.0, 1.0, 0.5), (4.0, 2.0, 3.0), (3.0, 3.0, 1.7)] {
        for k in 0..=2u32 {
            let inner = |rho: f64| {
                simpson(
                    |th: f64| {
                        let dist2 = x * x + rho * rho - 2.0 * x * rho * th.cos();
                        phi(d, t, dist2.sqrt()) * th.sin().powi(d as i32 - 2)
                    },
                    0.0,
                    std::f64::consts::PI,
                    200,
                )
            };
            let s_minus = sphere(d - 1);
            let quad = s_minus
                * simpson(|rho| rho.powi(d as i32 - 1) * rho.powi(2 * k as i32) * phi(d, v, rho) * inner(rho), 0.0, 30.0, 1500);
            let beta = v / (t + v);
            let tau = t * v / (t + v);
            let closed = phi(d, t + v, x) * shifted_moment(d as f64, tau, beta * beta * x * x, k);
            assert!((quad - closed).abs() < 1e-7 * closed, "t={t} v={v} x={x} k={k}: {quad} vs {closed}");
        }
    }
}

#[test]
fn zeta_bar_decay_and_slope() {
    let z = ZetaTable::new(&power_law(), 256).unwrap();
    for n in 16..256 {
        assert!(z.zeta_bar(n + 1) < z.zeta_bar(n));
    }
    let slope = (z.zeta_bar(256).ln() - z.zeta_bar(16).ln()) / (256f64.ln() - 16f64.ln());
    assert!((slope - (2.0 - 2.5)).abs() < 0.3, "slope {slope}");
    let c = z.doubling_constant();
    assert!(c >= 1.0 && c < 2.0, "{c}");
}

#[test]
fn r_n_values() {
    assert_eq!(r_n(5, 4).unwrap(), 0.5);
    assert!((r_n(7, 10).unwrap() - 0.1).abs() < 1e-15);
    assert!((r_n(6, 10).unwrap() - 10f64.ln() / 10.0).abs() < 1e-15);
    assert!((r_n(6, 10).unwrap() - 0.230258509299).abs() < 1e-12);
    assert!(r_n(3, 10).is_err());
}

#[test]
fn psi_values() {
    let unit = PsiScale::new(1.0, 0.0).unwrap();
    let p = psi_n(5, unit, 3);
    for r in [0.0, 1.0, 2.5] {
        assert!((p.eval(r) - phi(5, 3.0, r)).abs() < 1e-16);
    }
    let s = PsiScale::new(0.95, 0.01).unwrap();
    assert!((s.variance(10) - 9.595).abs() < 1e-12);
    assert_eq!(psi_n(5, s, 10).mass(), 1.0);
}

#[test]
fn f_profile_mass_and_origin_quadrature() {
    let fam = power_law();
    let z = ZetaTable::new(&fam, 32).unwrap();
    let scale = PsiScale::new(1.02, 0.01).unwrap();
    for n in [2usize, 5, 16] {
        let f = f_profile(&fam, &z, scale, n);
        let mass: f64 = (1..=n / 2).map(|s| s as f64 * fam.gamma_moment(n - s, 0)).sum::<f64>() + z.zeta_bar(n);
        assert!((f.mass() - mass).abs() < 1e-12 * mass);
        assert!(f.terms().iter().all(|t| t.weight > 0.0));
    }
    // (ψ_s * Γ_{n−s})(0) = ∫ ψ_s(y) Γ_{n−s}(y) dy by symmetry.
    let n = 16;
    let direct: f64 = (1..=n / 2)
        .map(|s| {
            let t = scale.variance(s);
            let g = fam.gamma(n - s);
            s as f64 * radial_integral(5, |r| phi(5, t, r) * g.eval(r), 60.0)
        })
        .sum::<f64>()
        + z.zeta_bar(n) * phi(5, scale.variance(n), 0.0);
    let f16 = f_profile(&fam, &z, scale, n).eval(0.0);
    assert!((f16 - direct).abs() < 1e-8 * direct, "{f16} vs {direct}");
}

#[test]
fn kappa_and_le_main_stability() {
    let fam = power_law();
    let z = ZetaTable::new(&fam, 32).unwrap();
    let scale = PsiScale::new(1.02, 0.01).unwrap();
    for n in 2..=32 {
        assert!(kappa_profile(&fam, &z, scale, n).terms().iter().all(|t| t.weight > 0.0));
    }
    let radii = default_radius_grid(32);
    let l16 = le_main_check(&fam, &z, scale, 16, &radii).unwrap();
    let l32 = le_main_check(&fam, &z, scale, 32, &radii).unwrap();
    assert!(l16.is_finite() && l32 >= l16 && l32 / l16 < 4.0, "{l16} {l32}");
}

#[test]
fn semigroup_comparison_on_grid() {
    let mut pairs = Vec::new();
    for t in [0.5, 1.0, 3.0, 10.0] {
        for f in [1.0, 1.25, 1.5, 1.75, 2.0] {
            pairs.push((t, t * f));
        }
    }
    for d in [3, 5, 7] {
        assert!(phi1_sup(d, &pairs, &geometric_grid(1e-3, 30.0, 64)) <= 1.0);
    }
}

#[test]
fn four_gaussian_closed_form_in_one_dimension() {
    for &(u, v, s, t, x, y) in &[(1.0, 2.0, 0.5, 1.5, 0.3, -1.0), (3.0, 1.0, 2.0, 2.0, 2.0, 1.0)] {
        let quad = simpson(
            |z| phi(1, u, z) * phi(1, v, x - z) * phi(1, s, z) * phi(1, t, y - z),
            -30.0,
            30.0,
            20_000,
        );
        let p = PointPair { x: f64::abs(x), y: f64::abs(y), cos: (x * y).signum() };
        let closed = ln_four_gaussian(1, u, v, s, t, p).exp();
        assert!((quad - closed).abs() < 1e-10 * closed, "{quad} vs {closed}");
    }
    let c = convol_constant(5, &[0.5, 1.0, 2.0, 8.0], &[0.0, 0.5, 2.0, 6.0], &[-1.0, 0.0, 1.0]);
    assert!(c.is_finite() && c > 0.0);
}

fn mixture() -> impl Strategy<Value = GaussianMixture> {
    prop::collection::vec((-2.0f64..2.0, 0.1f64..5.0), 1..5)
        .prop_map(|terms| {
            let mut m = GaussianMixture::zero(5);
            for (w, t) in terms {
                m = m.add(&GaussianMixture::single(5, w, t).unwrap());
            }
            m
        })
}

proptest! {
    #[test]
    fn convolution_mass_is_multiplicative(a in mixture(), b in mixture()) {
        let c = a.convolve(&b);
        prop_assert!((c.mass() - a.mass() * b.mass()).abs() <= 1e-12 * (1.0 + a.abs_mass() * b.abs_mass()));
    }

    #[test]
    fn compaction_preserves_values(a in mixture(), r in 0.0f64..6.0) {
        let doubled = a.add(&a);
        let mut merged = doubled.clone();
        merged.compact();
        prop_assert!((merged.eval(r) - 2.0 * a.eval(r)).abs() <= 1e-12 * (1.0 + doubled.abs_mass()));
    }
}
