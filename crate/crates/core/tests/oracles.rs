mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use syntonet::graph::Graph;
use syntonet::metrics;
use syntonet::spectrum::PartialSpectrum;
use syntonet::syntony::{close_pairs, pair_consonance, pair_dissonance, SyntonyKind, SyntonyWindows};

#[test]
fn consonance_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..1000 {
        let delta_min = rng.random_range(1.0..30.0);
        let delta_max = delta_min * rng.random_range(1.2..6.0);
        let w = SyntonyWindows::new(delta_min, delta_max).unwrap();
        let x = oracle::random_spectrum(&mut rng, 20, delta_max / 2.0);
        let mut y = oracle::random_spectrum(&mut rng, 20, delta_max / 2.0);
        // Put some partials exactly on a window edge.
        if case % 4 == 0 {
            let shift = if case % 8 == 0 { delta_min / 2.0 } else { delta_max / 2.0 };
            y = x.iter().map(|&(f, a)| (f + shift, a)).collect();
        }
        let xs = PartialSpectrum::from_pairs(&x).unwrap();
        let ys = PartialSpectrum::from_pairs(&y).unwrap();
        let want = oracle::brute_syntony(&x, &y, delta_min, delta_max);
        let c = pair_consonance(&xs, &ys, &w).unwrap();
        let d = pair_dissonance(&xs, &ys, &w).unwrap();
        assert_eq!(c.to_bits(), want.consonance.to_bits(), "case {case}");
        assert_eq!(d.to_bits(), want.dissonance.to_bits(), "case {case}");
        assert_eq!(c.to_bits(), pair_consonance(&ys, &xs, &w).unwrap().to_bits());
        assert_eq!(d.to_bits(), pair_dissonance(&ys, &xs, &w).unwrap().to_bits());

        let pairs = close_pairs(&xs, &ys, &w).unwrap();
        let got_c: Vec<_> = pairs.iter().filter(|p| p.kind == SyntonyKind::Consonance).map(|p| (p.i, p.j)).collect();
        let got_d: Vec<_> = pairs.iter().filter(|p| p.kind == SyntonyKind::Dissonance).map(|p| (p.i, p.j)).collect();
        assert_eq!(got_c, want.consonant.iter().copied().collect::<Vec<_>>());
        assert_eq!(got_d, want.dissonant.iter().copied().collect::<Vec<_>>());
        assert!(want.consonant.is_disjoint(&want.dissonant));
    }
}

#[test]
fn window_edges_are_half_open() {
    let w = SyntonyWindows::new(10.0, 80.0).unwrap();
    let x = PartialSpectrum::from_pairs(&[(100.0, 1.0)]).unwrap();
    let at_min = PartialSpectrum::from_pairs(&[(105.0, 0.5)]).unwrap();
    let at_max = PartialSpectrum::from_pairs(&[(140.0, 0.5)]).unwrap();
    assert_eq!(pair_consonance(&x, &at_min, &w).unwrap(), 0.0);
    assert_eq!(pair_dissonance(&x, &at_min, &w).unwrap(), 0.5);
    assert_eq!(pair_dissonance(&x, &at_max, &w).unwrap(), 0.0);
}

fn corpus() -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    oracle::random_corpus(&mut rng, 500, 8)
}

#[test]
fn measurements_match_exhaustive_oracles() {
    let graphs = corpus();
    let mut checked = 0;
    for g in graphs.iter().filter(|g| g.is_connected()) {
        checked += 1;
        let (nb, eb) = metrics::betweenness_both(g);
        let (ob, oe) = oracle::betweenness(g);
        assert!(oracle::max_abs_diff(&nb, &ob) <= 1e-9, "{g:?}");
        assert!(oracle::max_abs_diff(&eb, &oe) <= 1e-9, "{g:?}");
        assert_eq!(metrics::eccentricity(g), oracle::eccentricity(g));
        for h in [1, 2, 3, 4] {
            assert_eq!(metrics::hierarchical_degree(g, h), oracle::hierarchical_degree(g, h));
            let a = metrics::accessibility(g, h);
            assert!(oracle::max_abs_diff(&a, &oracle::accessibility(g, h)) <= 1e-9, "{g:?} h={h}");
        }
    }
    assert!(checked > 250, "corpus has only {checked} connected graphs");
}

#[test]
fn closed_forms() {
    for n in 3..=9 {
        let k = oracle::complete(n);
        let s = oracle::star(n);
        let p = oracle::path(n);
        let c = oracle::cycle(n);
        let nf = n as f64;

        assert!(metrics::clustering(&k).iter().all(|&x| x == 1.0));
        assert!(metrics::clustering(&s).iter().all(|&x| x == 0.0));
        assert!(metrics::eccentricity(&k).iter().all(|&x| x == 1.0));
        assert_eq!(metrics::eccentricity(&s)[0], 1.0);
        assert!(metrics::eccentricity(&s)[1..].iter().all(|&x| x == 2.0));
        let ecc_p: Vec<f64> = (0..n).map(|i| i.max(n - 1 - i) as f64).collect();
        assert_eq!(metrics::eccentricity(&p), ecc_p);
        assert!(metrics::eccentricity(&c).iter().all(|&x| x == (n / 2) as f64));

        // Star centre lies on every leaf pair; leaves on none.
        let b = metrics::betweenness(&s);
        assert_eq!(b[0], 1.0);
        assert!(b[1..].iter().all(|&x| x == 0.0));
        assert!(metrics::betweenness(&k).iter().all(|&x| x == 0.0));
        // Path: node i separates i * (n - 1 - i) pairs.
        let bp = metrics::betweenness(&p);
        for (i, x) in bp.iter().enumerate() {
            let want = (i * (n - 1 - i)) as f64 / ((n - 1) * (n - 2)) as f64 * 2.0;
            assert!((x - want).abs() <= 1e-12, "path {n} node {i}");
        }

        // One step from anywhere in K_n is uniform over n - 1 nodes; two
        // steps return home with probability 1/(n-1).
        assert!(metrics::accessibility(&k, 1).iter().all(|&x| (x - (nf - 1.0)).abs() <= 1e-12));
        let home = 1.0 / (nf - 1.0);
        let other = (nf - 2.0) / (nf - 1.0).powi(2);
        let want = (-(home * home.ln()) - (nf - 1.0) * other * other.ln()).exp();
        assert!(metrics::accessibility(&k, 2).iter().all(|&x| (x - want).abs() <= 1e-12));
        // The star centre always returns after two steps.
        assert!((metrics::accessibility(&s, 2)[0] - 1.0).abs() <= 1e-12);

        if n >= 7 {
            assert!(metrics::hierarchical_degree(&c, 3).iter().all(|&x| x == 2.0));
        }
        let inv = 1.0 / nf.sqrt();
        let ev = metrics::eigenvector_centrality(&c).unwrap();
        assert!(ev.iter().all(|&x| (x - inv).abs() <= 1e-9));
    }
}
