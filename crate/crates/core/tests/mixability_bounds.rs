use costeff_core::mixability::{c_n, c_n_with_grid, divergence_table, m_plus, m_plus_with_grid, phi_n, psi, Exponential, FoldedCauchy, Lomax, TailDistribution, Uniform};

#[test]
fn heavy_tails_push_the_sum_past_linear_barriers() {
    let ns: Vec<usize> = (2..=8).collect();
    for m in [3.0, 5.0] {
        let rows = divergence_table(&FoldedCauchy, &ns, m).unwrap();
        assert!(rows.windows(2).all(|w| w[1].prob > w[0].prob), "M = {m}: {rows:?}");
    }
}

#[test]
fn integrable_tails_stay_below_markov() {
    let ns: Vec<usize> = (2..=8).collect();
    for (dist, mean) in [(&Uniform { hi: 1.0 } as &dyn TailDistribution, 0.5), (&Exponential { rate: 1.0 }, 1.0), (&Lomax { alpha: 3.0 }, 0.5)] {
        assert_eq!(dist.mean(), Some(mean));
        for m in [1.0, 2.0, 4.0] {
            for row in divergence_table(dist, &ns, m).unwrap() {
                assert!(row.prob <= mean / m + 1e-9, "M = {m}: {row:?}");
            }
        }
    }
}

#[test]
fn refined_grids_agree() {
    for (n, s) in [(2, 0.1), (4, 0.5), (8, 0.9)] {
        let a = c_n(&FoldedCauchy, n, s).unwrap();
        let b = c_n_with_grid(&FoldedCauchy, n, s, 10_000).unwrap();
        // a root at the right end is a double zero of ψ, located to about √ε
        let b_end = (1.0 - s) / n as f64;
        let tol = if b.c > 0.999 * b_end { 1e-7 * b_end } else { 1e-10 * b_end };
        assert!((a.c - b.c).abs() <= tol, "{n} {s}: {a:?} vs {b:?}");
    }
    for n in [3, 6] {
        let a = m_plus(&FoldedCauchy, n, 3.0 * n as f64).unwrap();
        let b = m_plus_with_grid(&FoldedCauchy, n, 3.0 * n as f64, 10_000).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn defining_inequality_holds_at_c_n() {
    for dist in [&FoldedCauchy as &dyn TailDistribution, &Lomax { alpha: 0.7 }, &Exponential { rate: 2.0 }] {
        for n in 2..6 {
            for s in [0.0, 0.3, 0.8] {
                let r = c_n(dist, n, s).unwrap();
                if r.no_root {
                    continue;
                }
                assert!(psi(dist, n, s, r.c).unwrap() >= -1e-9);
                // φ_n is H_s at c_n, and the bound inverts it
                let phi = phi_n(dist, n, s).unwrap();
                if s > 0.0 {
                    assert!((m_plus(dist, n, phi).unwrap() - s).abs() < 1e-8);
                }
            }
        }
    }
}
