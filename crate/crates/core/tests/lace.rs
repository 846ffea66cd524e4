mod common;

use common::simpson;
use lacelab::lace::weights::{j_bruteforce_with, recursion_residual_with};
use lacelab::lace::{
    all_laces, basic_lace, beta, check_recursion_identity, compatible_edges, enumerate_laces, is_compatible,
    is_connected, is_minimally_connected, j_weight_bruteforce, j_weight_lace, k_weight, k_weight_expanded, lace_of,
    overline, underline, xi_mc, ConnectedGraphs, Contacts, Edge, EdgeIndex, Graph, JEvaluator, Lace, LaceTable,
    Path, XiKernel,
};
use lacelab::mc::{fill_standard_normal, sample_rng};
use lacelab::Exec;
use proptest::prelude::*;
use std::f64::consts::PI;

fn g(b: u32, pairs: &[(u32, u32)]) -> Graph {
    Graph::from_pairs(0, b, pairs).unwrap()
}

fn random_path(d: usize, n: usize, seed: u64, index: u64) -> Path {
    let mut rng = sample_rng(seed, index);
    let mut inc = vec![0.0; n * d];
    fill_standard_normal(&mut rng, &mut inc);
    Path::from_increments(d, &inc).unwrap()
}

/// Points on a line with the given coordinates (in R^1).
fn line(points: &[f64]) -> Path {
    Path::new(1, points.to_vec()).unwrap()
}

/// Every graph on [0, n] by bitmask.
fn all_graphs(n: u32) -> Vec<Graph> {
    let edges = Graph::all_edges(0, n);
    (0..1u32 << edges.len())
        .map(|mask| {
            let chosen = edges.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| *e).collect();
            Graph::new(0, n, chosen).unwrap()
        })
        .collect()
}

#[test]
fn connectivity_examples() {
    assert!(is_connected(&g(5, &[(0, 2), (1, 4), (3, 5)])));
    assert!(!is_connected(&g(5, &[(0, 2), (1, 3), (3, 5)])));
    for n in 1..6 {
        assert!(is_connected(&g(n, &[(0, n)])));
    }
}

#[test]
fn prescription_examples() {
    let l = g(5, &[(0, 2), (1, 4), (3, 5)]);
    assert_eq!(lace_of(&l).unwrap(), l);
    assert_eq!(lace_of(&g(5, &[(0, 2), (1, 4), (3, 5), (0, 4)])).unwrap(), g(5, &[(0, 4), (3, 5)]));
    assert!(lace_of(&g(5, &[(0, 2), (1, 3), (3, 5)])).is_err());
}

#[test]
fn exhaustive_interval_of_length_four() {
    let graphs = all_graphs(4);
    assert_eq!(graphs.len(), 1024);
    let mut connected = 0u64;
    for gr in &graphs {
        if !is_connected(gr) {
            continue;
        }
        connected += 1;
        let l = lace_of(gr).unwrap();
        assert!(is_connected(&l) && is_minimally_connected(&l));
        for e in l.edges() {
            assert!(!is_connected(&l.without_edge(*e)));
        }
        assert_eq!(lace_of(&l).unwrap(), l);
        // g is its lace plus edges compatible with it
        let compat = compatible_edges(&l).unwrap();
        assert!(gr.edges().iter().all(|e| l.contains(*e) || compat.contains(e)));
    }
    let census: u64 = all_laces(4).iter().map(|l| 1u64 << compatible_edges(&l.graph()).unwrap().len()).sum();
    assert_eq!(census, connected);
    assert_eq!(LaceTable::new(4).unwrap().census(), connected);
    assert_eq!(ConnectedGraphs::new(4, Exec::Sequential).unwrap().len() as u64, connected);
}

#[test]
fn compatibility_is_per_edge() {
    let spanning = g(5, &[(0, 5)]);
    let compat = compatible_edges(&spanning).unwrap();
    assert_eq!(compat.len(), Graph::all_edges(0, 5).len() - 1);
    for lace in all_laces(5) {
        let lg = lace.graph();
        let filtered: Vec<Edge> = Graph::all_edges(0, 5)
            .into_iter()
            .filter(|e| !lg.contains(*e) && lace_of(&lg.with_edge(*e)).unwrap() == lg)
            .collect();
        let per_edge: Vec<Edge> =
            Graph::all_edges(0, 5).into_iter().filter(|e| !lg.contains(*e) && is_compatible(&lg, *e)).collect();
        assert_eq!(filtered, per_edge);
        assert_eq!(compatible_edges(&lg).unwrap(), per_edge);
    }
}

#[test]
fn lace_counts_and_shapes() {
    let m = |l: &Lace| l.m().to_vec();
    let two_three = enumerate_laces(2, 3);
    assert_eq!(two_three.iter().map(m).collect::<Vec<_>>(), vec![vec![1, 1, 1]]);
    assert_eq!(enumerate_laces(2, 5).len(), 6);
    assert!(enumerate_laces(2, 5).iter().all(|l| l.m().iter().all(|&x| x >= 1)));
    let three_five = enumerate_laces(3, 5);
    assert_eq!(three_five.len(), 5);
    assert_eq!(three_five.iter().filter(|l| l.m()[2] == 0).count(), 4);
    assert_eq!(enumerate_laces(1, 4).iter().map(m).collect::<Vec<_>>(), vec![vec![4]]);
    assert!(enumerate_laces(3, 3).is_empty());
    for nb in 1..=5 {
        let basic = basic_lace(nb);
        let shortest = enumerate_laces(nb, 2 * nb as u32 - 1);
        assert!(shortest.contains(&basic));
        if nb <= 2 {
            assert_eq!(shortest, vec![basic.clone()]);
        }
        let expect: Vec<(u32, u32)> = (1..=nb as u32)
            .map(|i| if i == 1 { (0, 2.min(2 * nb as u32 - 1)) } else { (2 * i - 3, (2 * i).min(2 * nb as u32 - 1)) })
            .collect();
        assert_eq!(basic.graph(), g(2 * nb as u32 - 1, &expect));
    }
}

#[test]
fn m_form_and_edge_form_round_trip() {
    for n in 1..=7 {
        for lace in all_laces(n) {
            let back = Lace::from_graph(&lace.graph()).unwrap();
            assert_eq!(back, lace);
            assert_eq!(lace.m().iter().sum::<u32>(), n);
            let nb = lace.n_bonds();
            let points = lace.points();
            for p in 0..2 * nb {
                let i = beta(p, nb);
                assert!(underline(i) == p || overline(i, nb) == p);
            }
            for (i, e) in lace.edges().iter().enumerate() {
                assert_eq!((e.s, e.t), (points[underline(i + 1)], points[overline(i + 1, nb)]));
            }
        }
    }
}

#[test]
fn k_weight_cases() {
    let spread = line(&[0.0, 10.0, 20.0, 30.0]);
    assert_eq!(k_weight(&spread, 0, 3, 0.7, 1.0).unwrap(), 1.0);
    assert_eq!(k_weight(&spread, 0, 3, 0.0, 1.0).unwrap(), 1.0);
    let huddle = line(&[0.0, 0.1, 0.2, 0.3]);
    assert_eq!(k_weight(&huddle, 0, 3, 1.0, 1.0).unwrap(), 0.0);
    let one_pair = line(&[0.0, 10.0, 10.5, 30.0]);
    assert_eq!(k_weight(&one_pair, 0, 3, 0.3, 1.0).unwrap(), 0.7);
    // closed ball
    assert_eq!(k_weight(&line(&[0.0, 1.0]), 0, 1, 0.3, 1.0).unwrap(), 0.7);
}

#[test]
fn product_expansion_over_all_graphs() {
    for i in 0..50 {
        let path = random_path(2, 4, 11, i);
        for n in 1..=4 {
            let k = k_weight(&path, 0, n, 0.4, 1.0).unwrap();
            assert!((k_weight_expanded(&path, 0, n, 0.4, 1.0).unwrap() - k).abs() < 1e-12);
        }
    }
}

#[test]
fn small_j_by_hand() {
    let u = |p: &Path, i: usize, j: usize| f64::from(u8::from(p.dist2(i, j) <= 1.0));
    let lambda = 0.6;
    for i in 0..40 {
        let p = random_path(1, 2, 5, i);
        let j1 = j_weight_lace(&p, 1, lambda, 1.0, usize::MAX).unwrap();
        assert_eq!(j1, -lambda * u(&p, 0, 1));
        let j2 = j_weight_bruteforce(&p, 2, lambda, 1.0).unwrap();
        let hand = -lambda * u(&p, 0, 2) * (1.0 - lambda * u(&p, 0, 1)) * (1.0 - lambda * u(&p, 1, 2));
        assert!((j2 - hand).abs() < 1e-15);
        assert!((j_weight_lace(&p, 2, lambda, 1.0, usize::MAX).unwrap() - hand).abs() < 1e-15);
    }
}

#[test]
fn bruteforce_equals_lace_resummation() {
    let graphs: Vec<ConnectedGraphs> = (1..=5).map(|n| ConnectedGraphs::new(n, Exec::default()).unwrap()).collect();
    let eval = JEvaluator::new(5).unwrap();
    for i in 0..100 {
        let path = random_path(3, 5, 2718, i);
        let contacts = Contacts::new(&path, 1.0);
        for n in 1..=5 {
            let brute = j_bruteforce_with(&graphs[n - 1], &contacts, 0, 0.3, Exec::Sequential);
            let laced = eval.j(&contacts, 0, n, 0.3);
            assert!((brute - laced).abs() <= 1e-12 * brute.abs().max(1e-300) || brute == laced, "path {i} n={n}");
        }
    }
    assert!(j_weight_bruteforce(&random_path(3, 7, 1, 0), 7, 0.3, 1.0).is_err());
}

#[test]
fn recursion_identity_on_random_paths() {
    let eval = JEvaluator::new(5).unwrap();
    for lambda in [0.3, 1.0] {
        let mut worst = 0.0f64;
        for i in 0..100 {
            let path = random_path(3, 5, 99, i);
            worst = worst.max(recursion_residual_with(&eval, &Contacts::new(&path, 1.0), 5, lambda));
        }
        assert!(worst < 1e-12, "λ={lambda}: {worst}");
    }
    let path = random_path(3, 5, 99, 0);
    assert_eq!(check_recursion_identity(&path, 5, 0.0, 1.0).unwrap(), 0.0);
    for i in 0..20 {
        let p = random_path(1, 2, 3, i);
        assert!(check_recursion_identity(&p, 2, 0.8, 1.0).unwrap() < 1e-15);
    }
}

#[test]
fn mask_index_covers_seven_steps() {
    let idx = EdgeIndex::new(7).unwrap();
    assert_eq!(idx.edges().len(), 28);
    let eval = JEvaluator::new(7).unwrap();
    for i in 0..20 {
        let path = random_path(3, 7, 4, i);
        assert!(recursion_residual_with(&eval, &Contacts::new(&path, 1.0), 7, 0.5) < 1e-12);
    }
}

/// `P(|A| ≤ ρ, |B| ≤ ρ)` for `A = X₁ + X₂`, `B = X₂ + X₃`, `X_i` standard in `R³`:
/// conditioning on `X₂ = z` gives `E[p(|z|)²]` with `p(s) = P(|z + Y| ≤ ρ)`.
fn two_bond_overlap(rho: f64) -> f64 {
    let p = |s: f64| {
        simpson(
            |r: f64| {
                let rs = r * s;
                let shell = if rs < 1e-8 { 2.0 } else { 2.0 * rs.sinh() / rs };
                2.0 * PI * r * r * (2.0 * PI).powf(-1.5) * (-(r * r + s * s) / 2.0).exp() * shell
            },
            0.0,
            rho,
            400,
        )
    };
    simpson(|s| 4.0 * PI * s * s * (2.0 * PI).powf(-1.5) * (-s * s / 2.0).exp() * p(s).powi(2), 0.0, 12.0, 600)
}

#[test]
fn xi_against_quadrature_and_limits() {
    let lace = Lace::from_m(vec![1, 1, 1]).unwrap();
    let kernel = XiKernel::Semigroup { dim: 3 };
    let est = xi_mc(&lace, &kernel, 1.0, &[], 400_000, 17, Exec::default()).unwrap();
    let oracle = two_bond_overlap(1.0);
    assert!(est.z_score(oracle).abs() < 3.0, "{est:?} vs {oracle}");

    let wide = xi_mc(&lace, &kernel, 1e6, &[], 1000, 3, Exec::default()).unwrap();
    assert_eq!(wide.mean, 1.0);
    let maj = lacelab::MajorantFamily::power_law(2.5, 3).unwrap();
    let wide = xi_mc(&lace, &XiKernel::Majorant(maj), 1e6, &[], 1000, 3, Exec::default()).unwrap();
    let masses: f64 = lace.m().iter().map(|&m| maj.gamma_moment(m as usize, 0)).product();
    assert!((wide.mean - masses).abs() < 1e-12);

    let small = xi_mc(&lace, &kernel, 0.5, &[], 100_000, 5, Exec::default()).unwrap();
    let large = xi_mc(&lace, &kernel, 1.0, &[], 100_000, 5, Exec::default()).unwrap();
    assert!(small.mean <= large.mean);
    assert!(xi_mc(&basic_lace(4), &kernel, 1.0, &[], 10, 1, Exec::default()).is_err());
}

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (2u32..=6).prop_flat_map(|n| {
        let edges = Graph::all_edges(0, n);
        prop::collection::vec(any::<bool>(), edges.len()).prop_map(move |keep| {
            let chosen = edges.iter().zip(keep).filter(|(_, k)| *k).map(|(e, _)| *e).collect();
            Graph::new(0, n, chosen).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn lace_of_is_idempotent_and_minimal(gr in graph_strategy()) {
        if is_connected(&gr) {
            let l = lace_of(&gr).unwrap();
            prop_assert_eq!(lace_of(&l).unwrap(), l.clone());
            prop_assert!(is_minimally_connected(&l));
            prop_assert!(l.edges().iter().all(|e| gr.contains(*e)));
        } else {
            prop_assert!(lace_of(&gr).is_err());
        }
    }
}
