mod common;

use echoloc_core::graphs::{
    are_isomorphic, automorphism_orbits, cospectral_vertex_pairs, enumerate_trees, parse_graph6, spectrum, to_graph6,
    DEFAULT_CLUSTER_TOL,
};
use echoloc_core::{Graph, Operator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Straightforward graph6 reader: N(n) byte, then upper-triangle bits
/// column by column, six per byte.
fn decode_graph6(s: &str) -> (usize, Vec<(usize, usize)>) {
    let bytes = s.as_bytes();
    let n = (bytes[0] - 63) as usize;
    let bits: Vec<bool> = bytes[1..].iter().flat_map(|&b| (0..6).rev().map(move |i| ((b - 63) >> i) & 1 == 1)).collect();
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bits[k] {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    (n, edges)
}

#[test]
fn graph6_agrees_with_independent_decoder() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let n = rng.gen_range(1..=30);
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.3) {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        let text = to_graph6(&g).unwrap();
        let (m, mut edges) = decode_graph6(&text);
        edges.sort_unstable();
        assert_eq!(m, n);
        assert_eq!(edges, g.edges());
        assert_eq!(parse_graph6(&text).unwrap(), g);
    }
    // Petersen graph in its standard graph6 form.
    let petersen = parse_graph6("IheA@GUAo").unwrap();
    assert_eq!(petersen.n(), 10);
    assert_eq!(petersen.edge_count(), 15);
    assert!(petersen.is_regular());
}

fn automorphisms(g: &Graph) -> Vec<Vec<usize>> {
    common::permutations(g.n())
        .into_iter()
        .filter(|s| g.edges().iter().all(|&(a, b)| g.has_edge(s[a], s[b])))
        .collect()
}

#[test]
fn tree_counts_satisfy_cayley() {
    // Σ_T n!/|Aut T| counts labelled trees, which Cayley gives as n^{n-2}.
    for n in 2..=8usize {
        let factorial: usize = (1..=n).product();
        let labelled: usize = enumerate_trees(n).unwrap().iter().map(|t| factorial / automorphisms(t).len()).sum();
        assert_eq!(labelled, n.pow(n as u32 - 2), "n = {n}");
    }
    let counts: Vec<usize> = (1..=12).map(|n| enumerate_trees(n).unwrap().len()).collect();
    assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23, 47, 106, 235, 551]);
}

#[test]
fn trees_are_pairwise_non_isomorphic() {
    let trees = enumerate_trees(8).unwrap();
    for i in 0..trees.len() {
        for j in i + 1..trees.len() {
            assert!(!are_isomorphic(&trees[i], &trees[j]));
        }
    }
}

fn brute_orbits(g: &Graph) -> Vec<Vec<usize>> {
    let autos = automorphisms(g);
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for v in 0..g.n() {
        if orbits.iter().any(|o| o.contains(&v)) {
            continue;
        }
        let mut o: Vec<usize> = autos.iter().map(|s| s[v]).collect();
        o.sort_unstable();
        o.dedup();
        orbits.push(o);
    }
    orbits
}

#[test]
fn orbits_match_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..150 {
        let n = rng.gen_range(1..=7);
        let p = rng.gen_range(0.2..0.8);
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        assert_eq!(automorphism_orbits(&g).unwrap(), brute_orbits(&g), "{}", g.id());
    }
}

#[test]
fn relabelling_preserves_isomorphism_class() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let g = common::random_connected(&mut rng, 9, 0.35);
        let mut perm: Vec<usize> = (0..9).collect();
        for i in (1..9).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let h = Graph::from_edges(9, &g.edges().iter().map(|&(a, b)| (perm[a], perm[b])).collect::<Vec<_>>()).unwrap();
        assert!(are_isomorphic(&g, &h));
    }
}

fn cubic_graphs() -> Vec<Graph> {
    let mut out = vec![
        parse_graph6("C~").unwrap(), // K4
        parse_graph6("IheA@GUAo").unwrap(),
    ];
    let prism = |k: usize| {
        let mut e = Vec::new();
        for i in 0..k {
            e.push((i, (i + 1) % k));
            e.push((k + i, k + (i + 1) % k));
            e.push((i, k + i));
        }
        Graph::from_edges(2 * k, &e).unwrap()
    };
    out.push(prism(3));
    out.push(prism(4));
    out.push(prism(5));
    out.push(Graph::from_edges(6, &[(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]).unwrap());
    // Möbius-Kantor style circulants and a random cubic graph by pairing.
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    while out.len() < 20 {
        let n = 2 * rng.gen_range(3..=6);
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| [v; 3]).collect();
        for i in (1..stubs.len()).rev() {
            stubs.swap(i, rng.gen_range(0..=i));
        }
        let mut g = Graph::empty(n);
        let ok = stubs.chunks(2).all(|c| c[0] != c[1] && !g.has_edge(c[0], c[1]) && g.add_edge(c[0], c[1]).is_ok());
        if ok && g.is_connected() {
            out.push(g);
        }
    }
    out
}

#[test]
fn regular_graphs_have_operator_independent_cospectrality() {
    for g in cubic_graphs() {
        assert!(g.is_regular());
        assert_eq!(
            cospectral_vertex_pairs(&g, Operator::Adjacency).unwrap(),
            cospectral_vertex_pairs(&g, Operator::NormalizedLaplacian).unwrap(),
            "{}",
            g.id()
        );
    }
}

#[test]
fn vertex_weights_are_complete() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let n = rng.gen_range(2..=14);
        let g = common::random_connected(&mut rng, n, 0.3);
        for op in [Operator::Adjacency, Operator::NormalizedLaplacian] {
            let spec = spectrum(&g, op, DEFAULT_CLUSTER_TOL).unwrap();
            let mult: usize = spec.clusters.iter().map(|c| c.multiplicity).sum();
            assert_eq!(mult, n);
            for v in 0..n {
                let s: f64 = spec.weights_of(v).iter().sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }
}
