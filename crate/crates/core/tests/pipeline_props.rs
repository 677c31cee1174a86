//! Pipeline-level properties: subdivision bounds, stage certificates on
//! random inputs, the free-intersection oracle agreement, tree-edge cuts,
//! and treeify postconditions.

mod common;

use common::{random_connected, random_graph, rng};
use quasitree_core::cuts::{enumerate_cuts, partition_into_treesets, EnumCaps, FilterMode};
use quasitree_core::decompose::{
    accessibility_pipeline, free_intersection_check, modulus_profile, subdivide, treeify,
    PipelineOptions,
};
use quasitree_core::graph::{
    components, is_acyclic, quasi_isometry_constants, Edge, Graph, QiGrid, Vertex,
};
use quasitree_core::oracles::brute_alternating_words;
use quasitree_core::tree_edge_cuts;
use rand::Rng;

#[test]
fn subdivision_inclusion_is_bilipschitz_within_chain_bound() {
    let mut r = rng(0xcafe);
    for _ in 0..15 {
        let n = r.gen_range(4..=24);
        let g = random_connected(n, 4, r.gen_range(0..=5), &mut r);
        let cs = enumerate_cuts(&g, 2, FilterMode::IvAndOv, &EnumCaps::default()).unwrap();
        let parts = partition_into_treesets(&g, &cs).unwrap();
        for ts in parts.iter().take(2) {
            let sub = subdivide(&g, ts).unwrap();
            let id: Vec<Vertex> = (0..n as Vertex).collect();
            let qi = quasi_isometry_constants(
                &id,
                &g,
                &sub.graph,
                QiGrid { l_max: 64, c_max: 0 },
            )
            .unwrap();
            assert!(
                qi.l <= sub.max_chain as u64 + 1,
                "l = {} with max chain {}",
                qi.l,
                sub.max_chain
            );
            assert!(qi.codensity.is_finite());

            // the lift is an order- and complement-isomorphism onto its image
            let cuts = ts.cuts();
            let lifted = sub.lifted.cuts();
            assert_eq!(cuts.len(), lifted.len());
            // λ ∘ γ = identity on the originals
            for x in 0..n {
                assert_eq!(sub.lambda[x], x as Vertex);
            }
        }
    }
}

#[test]
fn pipeline_certificates_on_random_graphs() {
    let mut r = rng(0xcaff);
    for case in 0..25 {
        let n = r.gen_range(4..=40);
        let g = if case % 4 == 0 {
            random_graph(n, 4, 0.08, &mut r)
        } else {
            random_connected(n, 4, r.gen_range(0..=8), &mut r)
        };
        let k = r.gen_range(1..=2);
        let res = accessibility_pipeline(&g, k, &PipelineOptions::default()).unwrap();
        for (i, stage) in res.stages.iter().enumerate() {
            assert!(stage.certificate.all_pass(), "stage {i} of case {case}");
            let c = &stage.certificate;
            assert!(
                c.measured_lipschitz <= 3 * c.r.max(1),
                "stage {i}: lipschitz {} vs 3*max(r,1) with r = {}",
                c.measured_lipschitz,
                c.r
            );
        }
        // accumulated T stays acyclic and freely intersects the final H
        let y = res.final_graph.vertex_count();
        let t_graph = Graph::from_edges(y, &res.t_edges).unwrap();
        assert!(is_acyclic(&t_graph));
        assert!(free_intersection_check(y, &res.t_edges, &res.h_edges));
        assert!(res.qi.codensity.is_finite());
    }
}

#[test]
fn free_intersection_equals_word_oracle_exhaustively_small() {
    // On <= 8 vertices the class multigraph has <= 8 edges, so a minimal
    // violating cycle needs at most 8 alternating steps and the bounded DFS
    // is complete: exact equivalence holds.
    let mut r = rng(0xcb00);
    for _ in 0..60 {
        let n = r.gen_range(2..=8);
        let t = random_edge_set(n, &mut r);
        let h = random_edge_set(n, &mut r);
        let check = free_intersection_check(n, &t, &h);
        let word = brute_alternating_words(n, &t, &h, 8).unwrap();
        assert_eq!(
            check,
            word.is_none(),
            "n={n} t={t:?} h={h:?} word={word:?}"
        );
    }
}

#[test]
fn free_intersection_sound_against_word_oracle_medium() {
    // Up to 12 vertices the DFS at length 8 may miss long violations, so
    // only the two sound implications are asserted.
    let mut r = rng(0xcb01);
    for _ in 0..40 {
        let n = r.gen_range(9..=12);
        let t = random_edge_set(n, &mut r);
        let h = random_edge_set(n, &mut r);
        let check = free_intersection_check(n, &t, &h);
        let word = brute_alternating_words(n, &t, &h, 8).unwrap();
        if check {
            assert_eq!(word, None);
        }
        if let Some(w) = word {
            assert!(!check, "oracle found {w:?} but check passed");
        }
    }
}

fn random_edge_set(n: usize, r: &mut rand_chacha::ChaCha8Rng) -> Vec<Edge> {
    let mut edges = Vec::new();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if r.gen_bool(0.25) {
                edges.push((u, v));
            }
        }
    }
    edges
}

#[test]
fn split_outputs_have_no_alternating_words() {
    let mut r = rng(0xcb02);
    for _ in 0..15 {
        let n = r.gen_range(4..=12);
        let g = random_connected(n, 3, r.gen_range(0..=3), &mut r);
        let res = accessibility_pipeline(&g, 2, &PipelineOptions::default()).unwrap();
        for stage in &res.stages {
            let host = &stage.decomposition.host;
            if host.vertex_count() > 12 {
                continue;
            }
            let word = brute_alternating_words(
                host.vertex_count(),
                &stage.decomposition.t_edges,
                &stage.decomposition.h_edges,
                8,
            )
            .unwrap();
            assert_eq!(word, None);
        }
    }
}

#[test]
fn tree_edge_cuts_on_pipeline_output() {
    let mut r = rng(0xcb03);
    for _ in 0..10 {
        let n = r.gen_range(4..=20);
        let g = random_connected(n, 3, r.gen_range(0..=3), &mut r);
        let res = accessibility_pipeline(&g, 2, &PipelineOptions::default()).unwrap();
        let map = tree_edge_cuts(&res.final_graph, &res.t_edges, &res.h_edges).unwrap();
        for &(a, b) in &res.t_edges {
            let cut = &map[&(a, b)];
            assert_eq!(cut.outgoing_edges(), &[(a, b)]);
            assert!(cut.contains(a) && !cut.contains(b));
            let rev = &map[&(b, a)];
            assert_eq!(rev.outgoing_edges(), &[(b, a)]);
        }
    }
}

#[test]
fn treeify_random_corpus() {
    let mut r = rng(0xcb04);
    for case in 0..18 {
        let n = r.gen_range(4..=60);
        let g = if case % 4 == 0 {
            random_graph(n, 4, 0.06, &mut r)
        } else {
            random_connected(n, 4, r.gen_range(0..=10), &mut r)
        };
        let k = r.gen_range(1..=2);
        let res = treeify(&g, k, &PipelineOptions::default()).unwrap();
        assert!(is_acyclic(&res.tree));
        assert_eq!(components(&res.tree).id, components(&g).id);
        assert!(res.certificate.all_pass());
        assert!(res.lipschitz >= 1);
    }
}

#[test]
fn modulus_profile_is_monotone() {
    let mut r = rng(0xcb05);
    for _ in 0..10 {
        let n = r.gen_range(4..=20);
        let g = random_connected(n, 4, r.gen_range(0..=4), &mut r);
        for mode in [FilterMode::IvOnly, FilterMode::IvAndOv] {
            let profile = modulus_profile(&g, 3, mode, &EnumCaps::default()).unwrap();
            for w in profile.windows(2) {
                assert!(w[0].r <= w[1].r, "profile not monotone: {profile:?}");
            }
        }
    }
}
