//! Oracle equivalence for cut enumeration plus the metric and cut-family
//! invariants that do not need the full pipeline.

mod common;

use common::{random_connected, random_graph, rng};
use proptest::prelude::*;
use quasitree_core::cuts::{self, EnumCaps, FilterMode};
use quasitree_core::graph::{self, ExtNat, Vertex};
use quasitree_core::oracles;
use rand::Rng;

#[test]
fn enumerate_matches_brute_on_random_connected_graphs() {
    let mut r = rng(0xace1);
    let caps = EnumCaps::default();
    for case in 0..60 {
        let n = r.gen_range(4..=14);
        let g = random_connected(n, 4, r.gen_range(0..=n / 2), &mut r);
        for k in 0..=3 {
            for mode in [FilterMode::IvOnly, FilterMode::IvAndOv] {
                let fast = cuts::enumerate_cuts(&g, k, mode, &caps).unwrap();
                let brute = oracles::brute_cuts(&g, k, mode).unwrap();
                assert_eq!(
                    oracles::side_set(&fast),
                    oracles::side_set(&brute),
                    "case {case} n={n} k={k} mode={mode:?}"
                );
            }
        }
    }
}

#[test]
fn enumerate_matches_brute_on_disconnected_graphs() {
    let mut r = rng(0xace2);
    let caps = EnumCaps::default();
    for _ in 0..25 {
        let n = r.gen_range(4..=13);
        let g = random_graph(n, 3, 0.18, &mut r);
        for k in 0..=2 {
            for mode in [FilterMode::IvOnly, FilterMode::IvAndOv] {
                let fast = cuts::enumerate_cuts(&g, k, mode, &caps).unwrap();
                let brute = oracles::brute_cuts(&g, k, mode).unwrap();
                assert_eq!(oracles::side_set(&fast), oracles::side_set(&brute));
            }
        }
    }
}

#[test]
fn enumerated_cuts_satisfy_filter_and_closure() {
    let mut r = rng(0xace3);
    let caps = EnumCaps::default();
    for _ in 0..30 {
        let n = r.gen_range(4..=30);
        let g = random_connected(n, 4, r.gen_range(0..=6), &mut r);
        let k = r.gen_range(0..=2);
        let cs = cuts::enumerate_cuts(&g, k, FilterMode::IvAndOv, &caps).unwrap();
        let comps = graph::components(&g);
        for c in &cs {
            let bu = c.boundary_union();
            match graph::metric_diameter(&g, &bu) {
                ExtNat::Fin(d) => assert!(d <= k as u64),
                ExtNat::Inf => panic!("boundary spans components"),
            }
            // closed under complementation
            let comp_side = c.complement_side(&comps);
            assert!(cs.position_of(c.component(), &comp_side).is_some());
            // determined by the outgoing edge boundary
            assert_eq!(
                cuts::side_from_outgoing_edges(&g, c.outgoing_edges()),
                c.side()
            );
        }
    }
}

#[test]
fn census_bound_on_enumerated_cutsets() {
    let mut r = rng(0xace4);
    let caps = EnumCaps::default();
    for _ in 0..20 {
        let n = r.gen_range(4..=24);
        let g = random_connected(n, 4, r.gen_range(0..=5), &mut r);
        let k = r.gen_range(0..=2);
        let cs = cuts::enumerate_cuts(&g, k, FilterMode::IvAndOv, &caps).unwrap();
        if cs.is_empty() {
            continue;
        }
        let d = g.max_degree() as u64;
        let r_bound = cs
            .iter()
            .map(|c| graph::metric_diameter(&g, c.inner_boundary()).unwrap_fin())
            .max()
            .unwrap();
        // census <= 2^(d^(r+2)); compare in the exponent to avoid overflow
        let exponent = d.checked_pow(r_bound as u32 + 2);
        for x in 0..n as Vertex {
            let census = cuts::cut_census_at_vertex(&cs, x) as u64;
            match exponent {
                Some(e) if e < 63 => assert!(census <= 1u64 << e, "census {census} exceeds 2^{e}"),
                _ => {} // bound astronomically larger than any finite cutset
            }
        }
    }
}

#[test]
fn partition_postconditions_on_random_graphs() {
    let mut r = rng(0xace5);
    let caps = EnumCaps::default();
    for _ in 0..20 {
        let n = r.gen_range(4..=24);
        let g = random_connected(n, 4, r.gen_range(0..=6), &mut r);
        let k = r.gen_range(1..=2);
        let cs = cuts::enumerate_cuts(&g, k, FilterMode::IvAndOv, &caps).unwrap();
        let parts = cuts::partition_into_treesets(&g, &cs).unwrap();

        // union equals the input and the parts are disjoint
        let mut union: Vec<(u32, Vec<Vertex>)> = Vec::new();
        for ts in &parts {
            for c in ts.cuts() {
                union.push((c.component(), c.side().to_vec()));
            }
        }
        union.sort();
        let total = union.len();
        union.dedup();
        assert_eq!(union.len(), total, "parts overlap");
        let input: Vec<(u32, Vec<Vertex>)> = cs
            .iter()
            .map(|c| (c.component(), c.side().to_vec()))
            .collect();
        assert_eq!(union, input);

        // each part is a valid treeset (validate_treeset re-run)
        for ts in &parts {
            assert!(cuts::validate_treeset(&g, ts.cuts()).is_ok());
        }

        // count <= max conflict degree + 1, over complement-pair
        // representatives (one side per pair; which one is irrelevant since
        // nestedness is complement-invariant)
        let comps = graph::components(&g);
        let reps: Vec<&quasitree_core::Cut> = cs
            .iter()
            .filter(|c| {
                let other = c.complement_side(&comps);
                c.side() <= &other[..]
            })
            .collect();
        let mut max_deg = 0usize;
        for (i, a) in reps.iter().enumerate() {
            let mut deg = 0;
            for (j, b) in reps.iter().enumerate() {
                if i != j && !cuts::is_nested(a, b) {
                    deg += 1;
                }
            }
            max_deg = max_deg.max(deg);
        }
        assert!(parts.len() <= max_deg + 1, "{} parts, conflict degree {max_deg}", parts.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn acyclicity_formula_matches_dfs(seed in any::<u64>(), n in 2usize..40) {
        let mut r = rng(seed);
        let g = random_graph(n, 5, 0.1, &mut r);
        // independent cycle detection by DFS with parent tracking
        let mut color = vec![0u8; n];
        let mut has_cycle = false;
        for s in 0..n {
            if color[s] != 0 { continue; }
            let mut stack = vec![(s as Vertex, u32::MAX)];
            while let Some((u, parent)) = stack.pop() {
                if color[u as usize] != 0 { continue; }
                color[u as usize] = 1;
                let mut seen_parent = false;
                for &w in g.neighbors(u) {
                    if w == parent && !seen_parent {
                        seen_parent = true;
                        continue;
                    }
                    if color[w as usize] != 0 {
                        has_cycle = true;
                    } else {
                        stack.push((w, u));
                    }
                }
            }
        }
        prop_assert_eq!(graph::is_acyclic(&g), !has_cycle);
        // and the formula itself
        let acyclic = g.edge_count() == g.vertex_count() - graph::components(&g).count;
        prop_assert_eq!(graph::is_acyclic(&g), acyclic);
    }

    #[test]
    fn power_graph_monotone(seed in any::<u64>(), n in 2usize..25) {
        let mut r = rng(seed);
        let g = random_graph(n, 4, 0.15, &mut r);
        let mut prev = graph::power_graph(&g, 1);
        for k in 2..=5 {
            let next = graph::power_graph(&g, k);
            for (u, v) in prev.edges() {
                prop_assert!(next.has_edge(u, v));
            }
            prev = next;
        }
    }

    #[test]
    fn ball_diameter_bound(seed in any::<u64>(), n in 2usize..40, x in 0usize..40, radius in 0u32..=4) {
        let mut r = rng(seed);
        let g = random_connected(n, 4, 3, &mut r);
        let x = (x % n) as Vertex;
        let b = graph::ball(&g, x, radius).unwrap();
        match graph::metric_diameter(&g, &b) {
            ExtNat::Fin(d) => prop_assert!(d <= 2 * radius as u64),
            ExtNat::Inf => prop_assert!(false, "ball spans components"),
        }
    }

    #[test]
    fn lipschitz_symmetric_and_reflexive(seed in any::<u64>(), n in 2usize..20) {
        let mut r = rng(seed);
        let g = random_graph(n, 4, 0.2, &mut r);
        let h = random_graph(n, 4, 0.2, &mut r);
        prop_assert_eq!(
            graph::lipschitz_constant(&g, &h).unwrap(),
            graph::lipschitz_constant(&h, &g).unwrap()
        );
        let same_edges = g.edges() == h.edges();
        prop_assert_eq!(
            graph::lipschitz_constant(&g, &h).unwrap() == ExtNat::Fin(1),
            same_edges
        );
    }

    #[test]
    fn bfs_triangle_inequality(seed in any::<u64>(), n in 3usize..30) {
        let mut r = rng(seed);
        let g = random_connected(n, 4, 4, &mut r);
        let mut dist = Vec::new();
        for v in 0..n as Vertex {
            dist.push(g.distances_from(v));
        }
        for _ in 0..40 {
            let (a, b, c) = (
                r.gen_range(0..n),
                r.gen_range(0..n),
                r.gen_range(0..n),
            );
            let (ab, bc, ac) = (
                dist[a][b].unwrap() as u64,
                dist[b][c].unwrap() as u64,
                dist[a][c].unwrap() as u64,
            );
            prop_assert!(ac <= ab + bc);
        }
    }

    #[test]
    fn nestedness_symmetric_and_complement_invariant(seed in any::<u64>(), n in 4usize..14) {
        let mut r = rng(seed);
        let g = random_connected(n, 4, 2, &mut r);
        let cs = cuts::enumerate_cuts(&g, 2, FilterMode::IvAndOv, &EnumCaps::default()).unwrap();
        if cs.len() < 2 { return Ok(()); }
        let comps = graph::components(&g);
        for _ in 0..30 {
            let i = r.gen_range(0..cs.len());
            let j = r.gen_range(0..cs.len());
            let (a, b) = (&cs.cuts()[i], &cs.cuts()[j]);
            prop_assert_eq!(cuts::is_nested(a, b), cuts::is_nested(b, a));
            let a_bar = cuts::cut_from_side(&g, &a.complement_side(&comps)).unwrap();
            prop_assert_eq!(cuts::is_nested(a, b), cuts::is_nested(&a_bar, b));
        }
    }

    #[test]
    fn transport_identities(seed in any::<u64>(), n in 4usize..14) {
        let mut r = rng(seed);
        let g = random_connected(n, 4, 2, &mut r);
        let cs = cuts::enumerate_cuts(&g, 2, FilterMode::IvAndOv, &EnumCaps::default()).unwrap();
        // restrict to the graph itself is the identity
        let restricted = cuts::restrict_cutset(&cs, &g);
        prop_assert_eq!(oracles::side_set(&restricted), oracles::side_set(&cs));
        // pullback along the identity is the identity
        let id: Vec<Vertex> = (0..n as Vertex).collect();
        let pulled = cuts::pullback_cutset(&id, &cs, &g);
        prop_assert_eq!(oracles::side_set(&pulled), oracles::side_set(&cs));
    }
}

#[test]
fn quasi_isometry_identity_is_optimal() {
    let mut r = rng(0xace6);
    for _ in 0..10 {
        let n = r.gen_range(2..=15);
        let g = random_connected(n, 4, 2, &mut r);
        let id: Vec<Vertex> = (0..n as Vertex).collect();
        let qi =
            graph::quasi_isometry_constants(&id, &g, &g, graph::QiGrid::default()).unwrap();
        assert_eq!((qi.l, qi.c), (1, 0));
        assert_eq!(qi.codensity, ExtNat::Fin(0));
    }
}

#[test]
fn separating_cuts_match_brute_scan() {
    let mut r = rng(0xace7);
    for _ in 0..15 {
        let n = r.gen_range(4..=14);
        let g = random_connected(n, 4, 2, &mut r);
        let cs = cuts::enumerate_cuts(&g, 2, FilterMode::IvAndOv, &EnumCaps::default()).unwrap();
        for _ in 0..10 {
            let x = r.gen_range(0..n) as Vertex;
            let y = r.gen_range(0..n) as Vertex;
            let filtered = cuts::separating_cuts(&cs, x, y);
            let direct: Vec<&quasitree_core::Cut> = cs
                .iter()
                .filter(|c| c.side().contains(&x) && !c.side().contains(&y))
                .collect();
            assert_eq!(filtered.len(), direct.len());
        }
    }
}
