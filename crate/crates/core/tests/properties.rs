use num_bigint::BigInt;
use proptest::prelude::*;
use ustlab::cheeger::{cheeger_exact, cheeger_sweep};
use ustlab::estimators::bubble_sum_to_tolerance;
use ustlab::rng::derive_seed;
use ustlab::ust::enumerate_spanning_trees;
use ustlab::{
    loop_erase, spanning_tree_count, spectrum, wilson, ChainMode, Graph, Network, Network32, Network64, RngStream, VertexSet,
};

/// A connected graph: a random spanning tree plus extra edges from `mask`.
fn connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let parents = (1..n).map(|v| 0..v).collect::<Vec<_>>();
        let pairs = n * (n - 1) / 2;
        (Just(n), parents, proptest::collection::vec(any::<bool>(), pairs)).prop_map(|(n, parents, mask)| {
            let mut edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if mask[k] && !edges.contains(&(u, v)) {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

/// `min |∂S| / Vol S` over `0 < Vol S ≤ m`, by plain enumeration.
fn conductance_oracle(g: &Graph) -> f64 {
    let n = g.n();
    let m = g.m();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) - 1 {
        let s: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let vol: usize = s.iter().map(|&v| g.degree(v)).sum();
        if vol == 0 || vol > m {
            continue;
        }
        let cut = g.edges().filter(|&(u, v)| (mask >> u & 1) != (mask >> v & 1)).count();
        best = best.min(cut as f64 / vol as f64);
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn loop_erasure_is_self_avoiding(xs in proptest::collection::vec(0usize..6, 1..60)) {
        let path = loop_erase(&xs).vertices;
        prop_assert_eq!(path.first(), xs.first());
        prop_assert_eq!(path.last(), xs.last());
        let mut seen = path.clone();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), path.len());
        // every step of the erased path is a step of the walk
        for w in path.windows(2) {
            prop_assert!(xs.windows(2).any(|s| s == w));
        }
    }

    #[test]
    fn loop_erasure_is_idempotent(xs in proptest::collection::vec(0usize..8, 1..40)) {
        let once = loop_erase(&xs).vertices;
        prop_assert_eq!(loop_erase(&once).vertices, once);
    }

    #[test]
    fn wilson_gives_spanning_trees(g in connected_graph(12), seed in any::<u64>()) {
        let net = Network64::from_graph(&g);
        let tree = wilson(&net, &mut RngStream::new(seed)).unwrap();
        prop_assert!(tree.validate(&net).is_ok());
        prop_assert_eq!(tree.edges().len(), g.n() - 1);
        prop_assert!(tree.diameter() < g.n());
        prop_assert_eq!(tree.diameter(), tree.diameter_all_pairs());
    }

    #[test]
    fn wilson_replays_from_seed(g in connected_graph(10), seed in any::<u64>()) {
        let net = Network64::from_graph(&g);
        let a = wilson(&net, &mut RngStream::new(seed)).unwrap();
        let b = wilson(&net, &mut RngStream::new(seed)).unwrap();
        prop_assert_eq!(a.canonical_edges(), b.canonical_edges());
    }

    #[test]
    fn tree_count_matches_enumeration(g in connected_graph(7)) {
        let count = spanning_tree_count(&Network64::from_graph(&g)).unwrap();
        let listed = enumerate_spanning_trees(&g).unwrap().len();
        prop_assert_eq!(count.exact(), Some(&BigInt::from(listed)));
    }

    #[test]
    fn exact_conductance_matches_oracle(g in connected_graph(9)) {
        let (phi, set) = cheeger_exact(&g).unwrap();
        prop_assert!((phi - conductance_oracle(&g)).abs() < 1e-12);
        prop_assert!(g.volume(&set) <= g.m());
        prop_assert!((g.edge_boundary(&set) as f64 / g.volume(&set) as f64 - phi).abs() < 1e-12);
    }

    #[test]
    fn sweep_never_beats_exact(g in connected_graph(10)) {
        let (exact, _) = cheeger_exact(&g).unwrap();
        let (sweep, _) = cheeger_sweep(&g).unwrap();
        prop_assert!(sweep >= exact - 1e-12);
    }

    #[test]
    fn cheeger_inequality(g in connected_graph(10)) {
        let (phi, _) = cheeger_exact(&g).unwrap();
        let gap = spectrum(&Network64::from_graph(&g), ChainMode::Simple).unwrap().gap;
        prop_assert!(phi * phi / 2.0 - 1e-9 <= gap && gap <= 2.0 * phi + 1e-9);
    }

    #[test]
    fn lazy_gap_is_half(g in connected_graph(10)) {
        let net = Network64::from_graph(&g);
        let simple = spectrum(&net, ChainMode::Simple).unwrap().gap;
        let lazy = spectrum(&net, ChainMode::Lazy).unwrap().gap;
        prop_assert!((lazy - simple / 2.0).abs() < 1e-10);
    }

    #[test]
    fn single_precision_tracks_double(g in connected_graph(10)) {
        let s64 = spectrum(&Network64::from_graph(&g), ChainMode::Lazy).unwrap();
        let s32 = spectrum(&Network32::from_graph(&g), ChainMode::Lazy).unwrap();
        for (a, b) in s64.eigenvalues.iter().zip(&s32.eigenvalues) {
            prop_assert!((a - f64::from(*b)).abs() < 1e-4);
        }
    }

    #[test]
    fn bubble_sum_shrinks_as_w_grows(g in connected_graph(10), seed in any::<u64>()) {
        let n = g.n();
        let net: Network<f64> = Network::from_graph(&g);
        let first = (derive_seed(seed, 0) % n as u64) as usize;
        let second = (derive_seed(seed, 1) % n as u64) as usize;
        let small = VertexSet::from_vertices(n, [first]).unwrap();
        let large = VertexSet::from_vertices(n, [first, second]).unwrap();
        let a = bubble_sum_to_tolerance(&net, &small, 1e-9, 1.0 - 1e-9);
        let b = bubble_sum_to_tolerance(&net, &large, 1e-9, 1.0 - 1e-9);
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!(b.partial <= a.upper() + 1e-9);
            prop_assert!(a.partial <= a.upper() && b.partial <= b.upper());
            prop_assert!(a.partial >= 1.0 - 1e-12);
        }
    }
}
