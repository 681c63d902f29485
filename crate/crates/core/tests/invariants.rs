use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rcx::cluster::{ursell, xi_brute, XI_BRUTE_CAP, Arena, ClusterSeries, Pinning, Site, DEFAULT_CLUSTER_BUDGET};
use rcx::dynamics::{exact_kernel, rc_glauber_add_prob, Kernel};
use rcx::exact::{edwards_sokal_color, rc_distribution, z_rc_exact};
use rcx::graph::{component_count_mask, components, random_regular};
use rcx::logspace::{log_add, logsumexp};
use rcx::polymers::{boundary_closure, boundary_closure_in_order, enumerate_dis_polymers, w_dis};
use rcx::{EdgeConfig, Graph};

fn small_graph() -> impl Strategy<Value = Graph> {
    graph_up_to(8)
}

fn graph_up_to(max_n: usize) -> impl Strategy<Value = Graph> {
    (3usize..max_n, any::<u64>()).prop_map(|(n, bits)| {
        let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        let mut k = 0;
        for a in 0..n {
            for b in a + 2..n {
                if bits >> (k % 64) & 1 == 1 {
                    edges.push((a, b));
                }
                k += 1;
            }
        }
        let delta = (0..n).map(|v| edges.iter().filter(|&&(a, b)| a == v || b == v).count()).max().unwrap();
        Graph::new(n, delta, edges).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hex_round_trip(len in 1usize..200, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ids: Vec<usize> = (0..len).filter(|_| rand::Rng::random_bool(&mut rng, 0.5)).collect();
        let a = EdgeConfig::from_edges(len, ids);
        prop_assert_eq!(EdgeConfig::from_hex(len, &a.to_hex()).unwrap(), a);
    }

    #[test]
    fn closure_is_an_order_free_idempotent_superset(seed in any::<u64>(), mask in any::<u64>(), rot in 0usize..30) {
        let g = random_regular(12, 5, seed % 50).unwrap();
        let ne = g.num_edges();
        let b0 = EdgeConfig::from_edges(ne, (0..ne).filter(|&i| mask >> (i % 64) & 1 == 1 && i % 3 == 0));
        let b = boundary_closure(&g, &b0);
        prop_assert!(b0.iter().all(|id| b.contains(id)));
        prop_assert_eq!(&boundary_closure(&g, &b), &b);
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.rotate_left(rot % g.n());
        order.reverse();
        prop_assert_eq!(boundary_closure_in_order(&g, &b0, &order), b);
    }

    #[test]
    fn component_counts_agree(g in small_graph(), mask in any::<u64>()) {
        let ne = g.num_edges();
        let mask = if ne >= 64 { mask } else { mask & ((1u64 << ne) - 1) };
        let a = EdgeConfig::from_mask(ne, mask);
        prop_assert_eq!(components(&g, &a).count, component_count_mask(&g, mask));
    }

    #[test]
    fn coupling_colours_components_uniformly(g in small_graph(), mask in any::<u64>(), seed in any::<u64>()) {
        let ne = g.num_edges();
        let a = EdgeConfig::from_mask(ne, mask & ((1u64 << ne) - 1));
        let sigma = edwards_sokal_color(&g, &a, 4, &mut ChaCha8Rng::seed_from_u64(seed));
        for id in a.iter() {
            let (u, v) = g.edge(id);
            prop_assert_eq!(sigma[u], sigma[v]);
        }
    }

    #[test]
    fn disordered_polymers_resum_to_the_partition_function(g in graph_up_to(6), q in 1.5f64..50.0, beta in 0.05f64..3.0) {
        // every edge subset is a compatible family of connected pieces
        let ps = enumerate_dis_polymers(&g, g.num_edges()).unwrap();
        let arena = Arena::from_dis(&ps);
        prop_assume!(arena.len() <= XI_BRUTE_CAP);
        let lw = arena.log_weights(q, beta);
        for (p, &l) in ps.iter().zip(&lw) {
            prop_assert!((w_dis(p, q, beta) - l).abs() < 1e-12);
        }
        let xi = xi_brute(&arena, &lw).unwrap();
        let z = z_rc_exact(&g, q, beta, 0.01).unwrap().log_z;
        prop_assert!((g.n() as f64 * q.ln() + xi - z).abs() < 1e-9);
    }

    #[test]
    fn compatible_arena_sums_weights(k in 1usize..6, beta in 0.01f64..1.0) {
        let sites: Vec<Site> = (0..k).map(|i| Site { vertices: vec![2 * i, 2 * i + 1], size: 1, qa: 0, xb: 1 }).collect();
        let arena = Arena::new(sites);
        let t = ClusterSeries::build(&arena, 2, 0..k, Pinning::Plain, DEFAULT_CLUSTER_BUDGET).unwrap().evaluate(1.0, beta);
        prop_assert!((t - k as f64 * beta.exp_m1()).abs() < 1e-12);
    }

    #[test]
    fn glauber_probabilities_are_heat_bath(g in small_graph(), mask in any::<u64>(), q in 1.1f64..20.0, beta in 0.05f64..3.0) {
        prop_assume!(g.num_edges() <= 12);
        let ne = g.num_edges();
        let mask = mask & ((1u64 << ne) - 1);
        let pi = rc_distribution(&g, q, beta).unwrap();
        let a = EdgeConfig::from_mask(ne, mask);
        for id in 0..ne {
            let with = pi[(mask | 1 << id) as usize];
            let without = pi[(mask & !(1 << id)) as usize];
            let p = rc_glauber_add_prob(&g, &a, id, q, beta);
            prop_assert!((p - with / (with + without)).abs() < 1e-12);
        }
    }

    #[test]
    fn log_sums_are_stable(xs in prop::collection::vec(-50.0f64..50.0, 1..20)) {
        let naive = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        prop_assert!((logsumexp(&xs) - naive).abs() < 1e-12 * naive.abs().max(1.0));
        prop_assert!((log_add(xs[0], xs[xs.len() - 1]) - log_add(xs[xs.len() - 1], xs[0])).abs() == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn kernels_are_stochastic_and_reversible(g in small_graph(), q in 1.1f64..10.0, beta in 0.1f64..2.5) {
        prop_assume!(g.num_edges() <= 8);
        let pi = rc_distribution(&g, q, beta).unwrap();
        for kernel in [Kernel::RcGlauber, Kernel::Cm] {
            let p = exact_kernel(&g, q, beta, kernel).unwrap();
            for (i, row) in p.iter().enumerate() {
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                for (j, &pij) in row.iter().enumerate() {
                    prop_assert!((pi[i] * pij - pi[j] * p[j][i]).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn ursell_of_complete_graphs() {
    // spanning connected subgraphs of K_k, signed by edge count, sum to (−1)^{k−1}(k−1)!
    for k in 2..=7usize {
        let expected = if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
        let got = ursell(&Graph::complete(k)).unwrap();
        assert!((got - expected).abs() < 1e-12, "k={k}: {got}");
    }
}
