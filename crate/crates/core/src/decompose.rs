//! The decomposition pipeline: the one-endedness modulus, subdivision along
//! separating chains, splitting into a free product of an acyclic part and a
//! remainder, iterated decomposition with treeset transport, spanning
//! forests of the remainder classes, and contraction back to the input
//! vertex set.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::cuts::{
    enumerate_cuts, make_cut, partition_into_treesets, pullback_cutset, restrict_cutset,
    validate_treeset, Cut, Cutset, EnumCaps, EnumError, FilterMode, PartitionError, Treeset,
};
use crate::graph::{
    components, is_acyclic, lipschitz_constant, metric_diameter, metric_diameter_exceeds,
    quasi_isometry_constants, Edge, ExtNat, Graph, GraphError, QiConstants, QiError, QiGrid,
    Vertex,
};
use crate::structure_tree::build_structure_tree;

/// One entry of the one-endedness modulus: at boundary bound `k`, every
/// enumerated cut has a side of diameter at most `r`.
#[derive(Debug, Clone, Serialize)]
pub struct ModulusEntry {
    pub k: u32,
    pub r: u64,
    pub cut_count: usize,
    /// A side realizing r (its smaller-diameter side has diameter exactly r).
    pub witness_side: Option<Vec<Vertex>>,
}

/// r = max over enumerated cuts of min(diam C, diam C̄); 0 when there are no
/// cuts. Bounded along a family signals one end, growth signals several.
pub fn one_endedness_modulus(
    g: &Graph,
    k: u32,
    mode: FilterMode,
    caps: &EnumCaps,
) -> Result<ModulusEntry, EnumError> {
    let cs = enumerate_cuts(g, k, mode, caps)?;
    let comps = components(g);
    let mut r = 0u64;
    let mut witness = None;
    for c in &cs {
        let other = c.complement_side(&comps);
        let (small, big) = if c.side().len() <= other.len() {
            (c.side(), other.as_slice())
        } else {
            (other.as_slice(), c.side())
        };
        let d_small = metric_diameter(g, small).unwrap_fin();
        // min(d_small, d_big) = d_small as soon as the big side reaches it
        let value = if metric_diameter_exceeds(g, big, d_small.saturating_sub(1)) {
            d_small
        } else {
            d_small.min(metric_diameter(g, big).unwrap_fin())
        };
        if witness.is_none() || value > r {
            r = value.max(r);
            if value == r {
                witness = Some(c.side().to_vec());
            }
        }
    }
    Ok(ModulusEntry {
        k,
        r,
        cut_count: cs.len(),
        witness_side: witness,
    })
}

/// The modulus profile k ↦ r for k = 0..=k_max; monotone non-decreasing.
pub fn modulus_profile(
    g: &Graph,
    k_max: u32,
    mode: FilterMode,
    caps: &EnumCaps,
) -> Result<Vec<ModulusEntry>, EnumError> {
    (0..=k_max)
        .map(|k| one_endedness_modulus(g, k, mode, caps))
        .collect()
}

/// Result of subdividing a graph so that every edge is separated by at most
/// one lifted cut.
///
/// Original vertices keep their ids (γ is the identity embedding); inserted
/// vertices are appended. λ collapses each inserted vertex to the nearer
/// endpoint of its edge, ties to the smaller index.
#[derive(Debug, Clone)]
pub struct SubdivisionResult {
    pub graph: Graph,
    pub lifted: Treeset,
    pub lambda: Vec<Vertex>,
    pub original_count: usize,
    /// Largest number of cuts separating one oriented edge.
    pub max_chain: usize,
    /// Chain length per oriented edge (u < v) of the input.
    pub chain_lengths: BTreeMap<Edge, usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubdivideError {
    #[error("separating chain of edge ({0}, {1}) is not totally ordered (nestedness bug)")]
    ChainNotOrdered(Vertex, Vertex),
    #[error("lifted cutset is not a valid treeset")]
    LiftInvalid,
}

fn is_sorted_subset(a: &[Vertex], b: &[Vertex]) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// Inserts (chain length − 1) vertices on every edge, orienting edges in
/// ascending index order, and lifts every cut of the treeset so that each
/// edge of the new graph is separated by at most one lifted cut.
pub fn subdivide(g: &Graph, ts: &Treeset) -> Result<SubdivisionResult, SubdivideError> {
    let n = g.vertex_count();
    let cuts = ts.cuts();

    // separating chain of every oriented edge (x0 < x1): cuts with
    // x0 ∈ C, x1 ∉ C, totally ordered by inclusion
    let mut chains: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for e in g.edges() {
        let (x0, x1) = e;
        let mut chain: Vec<usize> = (0..cuts.len())
            .filter(|&i| {
                let c = &cuts.cuts()[i];
                c.contains(x0) && !c.contains(x1)
            })
            .collect();
        chain.sort_by_key(|&i| cuts.cuts()[i].side().len());
        for w in chain.windows(2) {
            if !is_sorted_subset(cuts.cuts()[w[0]].side(), cuts.cuts()[w[1]].side()) {
                return Err(SubdivideError::ChainNotOrdered(x0, x1));
            }
        }
        chains.insert(e, chain);
    }
    let max_chain = chains.values().map(Vec::len).max().unwrap_or(0);

    // build the subdivided graph, appending inserted vertices in edge order
    let mut edges_y: Vec<Edge> = Vec::new();
    let mut lambda: Vec<Vertex> = (0..n as Vertex).collect();
    let mut inserted: BTreeMap<Edge, Vec<Vertex>> = BTreeMap::new();
    let mut next = n as Vertex;
    for (&(x0, x1), chain) in &chains {
        let to_insert = chain.len().saturating_sub(1);
        if to_insert == 0 {
            edges_y.push((x0, x1));
            inserted.insert((x0, x1), Vec::new());
            continue;
        }
        let ys: Vec<Vertex> = (0..to_insert).map(|i| next + i as Vertex).collect();
        next += to_insert as Vertex;
        let mut prev = x0;
        for (i, &y) in ys.iter().enumerate() {
            edges_y.push((prev.min(y), prev.max(y)));
            // y_i at distance i+1 from x0 and (n+1)-(i+1) from x1, n+1 = chain len
            let i1 = (i + 1) as usize;
            lambda.push(if 2 * i1 <= chain.len() { x0 } else { x1 });
            prev = y;
        }
        edges_y.push((prev.min(x1), prev.max(x1)));
        inserted.insert((x0, x1), ys);
    }
    let graph = Graph::from_edges(next as usize, &edges_y).expect("subdivision is a simple graph");

    // lift every cut by the chain rules
    let comps_y = components(&graph);
    let mut lifted_cuts: Vec<Cut> = Vec::with_capacity(cuts.len());
    for (ci, c) in cuts.iter().enumerate() {
        let mut side: Vec<Vertex> = c.side().to_vec();
        for (&(x0, x1), ys) in &inserted {
            if ys.is_empty() {
                continue;
            }
            let chain = &chains[&(x0, x1)];
            let (in0, in1) = (c.contains(x0), c.contains(x1));
            if in0 == in1 {
                if in0 {
                    side.extend_from_slice(ys);
                }
            } else if in0 {
                // C = C_j in this edge's chain: y_i ∈ C' iff i <= j
                let j = chain
                    .iter()
                    .position(|&i| i == ci)
                    .expect("separating cut lies in the chain");
                side.extend_from_slice(&ys[..j.min(ys.len())]);
            } else {
                // C̄ = C_j: y_i ∈ C' iff i > j
                let j = chain
                    .iter()
                    .position(|&i| i == ts.complement_of(ci))
                    .expect("complement lies in the chain");
                side.extend_from_slice(&ys[j.min(ys.len())..]);
            }
        }
        side.sort_unstable();
        lifted_cuts.push(make_cut(&graph, &comps_y, side).expect("lift is a valid cut"));
    }
    let lifted_cs = Cutset::from_cuts(lifted_cuts);
    let lifted = validate_treeset(&graph, &lifted_cs).map_err(|_| SubdivideError::LiftInvalid)?;

    // every edge of the subdivision is separated by at most one lifted cut
    for (u, v) in graph.edges() {
        let seps = lifted
            .cuts()
            .iter()
            .filter(|c| c.contains(u) != c.contains(v))
            .count();
        assert!(
            seps <= 2,
            "edge ({u},{v}) separated by {} lifted cut pairs",
            seps / 2
        );
    }

    Ok(SubdivisionResult {
        graph,
        lifted,
        lambda,
        original_count: n,
        max_chain,
        chain_lengths: chains.into_iter().map(|(e, c)| (e, c.len())).collect(),
    })
}

/// A free-product decomposition G' = T ∗ H of a host graph, with the
/// boundary-diameter bound used and the measured Lipschitz constant to the
/// input graph.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub host: Graph,
    pub t_edges: Vec<Edge>,
    pub h_edges: Vec<Edge>,
    pub r: u64,
    pub measured_lipschitz: u64,
    pub certificate: SplitCertificate,
}

/// The split postconditions, recorded as data.
#[derive(Debug, Clone, Serialize)]
pub struct SplitCertificate {
    pub t_acyclic: bool,
    pub free_intersection: bool,
    pub restriction_empty: bool,
    /// measured Lipschitz constant <= 3·max(r, 1)
    pub lipschitz_within_bound: bool,
}

impl SplitCertificate {
    pub fn all_pass(&self) -> bool {
        self.t_acyclic
            && self.free_intersection
            && self.restriction_empty
            && self.lipschitz_within_bound
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SplitError {
    #[error("edge ({0}, {1}) is separated by {2} cut pairs; subdivide first")]
    EdgeSeparatedTwice(Vertex, Vertex, usize),
    #[error("host graph construction failed: {0}")]
    Graph(#[from] GraphError),
}

/// Splits a graph along a treeset separating every edge at most once:
/// T takes one edge per structure-tree edge (the lexicographically least
/// boundary edge of the canonical side), the host adds cliques on all inner
/// boundaries, and H keeps the host edges with equal ρ.
pub fn split(g1: &Graph, ts: &Treeset) -> Result<Decomposition, SplitError> {
    let cuts = ts.cuts();
    for (u, v) in g1.edges() {
        let pairs = cuts
            .iter()
            .filter(|c| c.contains(u) && !c.contains(v))
            .count();
        if pairs > 1 {
            return Err(SplitError::EdgeSeparatedTwice(u, v, pairs));
        }
    }

    let st = build_structure_tree(g1, ts);

    // T: per complement pair, the least undirected boundary edge
    let mut t_edges: Vec<Edge> = st
        .pair_cuts
        .iter()
        .map(|&(can, _)| {
            cuts.cuts()[can]
                .outgoing_edges()
                .iter()
                .map(|&(a, b)| (a.min(b), a.max(b)))
                .min()
                .expect("cut has boundary edges")
        })
        .collect();
    t_edges.sort_unstable();
    t_edges.dedup();

    // host candidate edges: G_1 = g1 ∪ cliques on every ∂_iv C
    let mut g1_edges: BTreeSet<Edge> = g1.edges().into_iter().collect();
    for c in cuts {
        let iv = c.inner_boundary();
        for (i, &a) in iv.iter().enumerate() {
            for &b in &iv[i + 1..] {
                g1_edges.insert((a, b));
            }
        }
    }

    // H: host-candidate edges whose endpoints ρ agrees on
    let h_edges: Vec<Edge> = g1_edges
        .iter()
        .copied()
        .filter(|&(u, v)| st.rho_of(u) == st.rho_of(v))
        .collect();

    let mut host_edges = t_edges.clone();
    host_edges.extend_from_slice(&h_edges);
    host_edges.sort_unstable();
    host_edges.dedup();
    let host = Graph::from_edges(g1.vertex_count(), &host_edges)?;

    // r = sup over cuts of diam(∂_iv C), in the metric of g1
    let r = cuts
        .iter()
        .map(|c| metric_diameter(g1, c.inner_boundary()).unwrap_fin())
        .max()
        .unwrap_or(0);

    let measured = lipschitz_constant(g1, &host).expect("same vertex count");
    let measured_lipschitz = match measured {
        ExtNat::Fin(l) => l,
        ExtNat::Inf => u64::MAX,
    };

    let t_graph = Graph::from_edges(g1.vertex_count(), &t_edges)?;
    let certificate = SplitCertificate {
        t_acyclic: is_acyclic(&t_graph),
        free_intersection: free_intersection_check(g1.vertex_count(), &t_edges, &h_edges),
        restriction_empty: {
            let h_graph = Graph::from_edges(g1.vertex_count(), &h_edges)?;
            restrict_cutset(cuts, &h_graph).is_empty()
        },
        lipschitz_within_bound: measured_lipschitz <= 3 * r.max(1),
    };

    Ok(Decomposition {
        host,
        t_edges,
        h_edges,
        r,
        measured_lipschitz,
        certificate,
    })
}

/// True iff E_T and E_H are freely intersecting: the bipartite class
/// multigraph (one node per E_T-class and per E_H-class, one edge per
/// vertex) is a forest with no parallel edges.
pub fn free_intersection_check(n_vertices: usize, t_edges: &[Edge], h_edges: &[Edge]) -> bool {
    let t_id = components(&Graph::from_edges(n_vertices, t_edges).expect("valid T edges")).id;
    let h = components(&Graph::from_edges(n_vertices, h_edges).expect("valid H edges"));

    // union-find over T-class nodes and H-class nodes
    let t_count = t_id.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut parent: Vec<usize> = (0..t_count + h.count).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for x in 0..n_vertices {
        let a = find(&mut parent, t_id[x] as usize);
        let b = find(&mut parent, t_count + h.id[x] as usize);
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// How remaining treesets travel to the next stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Transport {
    /// λ⁻¹(·)|_H*: pull back along the collapse then restrict to H (the
    /// construction the decomposition theorem uses).
    Pullback,
    /// Re-enumerate cuts of each stage's H from scratch (for comparison).
    Reenumerate,
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub mode: FilterMode,
    pub caps: EnumCaps,
    pub transport: Transport,
    /// Stage guard for re-enumeration transport, which is not a priori
    /// finite.
    pub max_stages: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            mode: FilterMode::IvAndOv,
            caps: EnumCaps::default(),
            transport: Transport::Pullback,
            max_stages: 64,
        }
    }
}

/// Everything recorded about one pipeline stage.
#[derive(Debug, Clone)]
pub struct PipelineStage {
    pub subdivision: SubdivisionResult,
    pub decomposition: Decomposition,
    pub certificate: StageCertificate,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageCertificate {
    pub split: SplitCertificate,
    pub accumulated_t_acyclic: bool,
    pub accumulated_free_intersection: bool,
    pub transported_treesets_valid: bool,
    pub r: u64,
    pub measured_lipschitz: u64,
}

impl StageCertificate {
    pub fn all_pass(&self) -> bool {
        self.split.all_pass()
            && self.accumulated_t_acyclic
            && self.accumulated_free_intersection
            && self.transported_treesets_valid
    }

    pub fn first_failure(&self) -> Option<&'static str> {
        if !self.split.t_acyclic {
            Some("t_acyclic")
        } else if !self.split.free_intersection {
            Some("free_intersection")
        } else if !self.split.restriction_empty {
            Some("restriction_empty")
        } else if !self.split.lipschitz_within_bound {
            Some("lipschitz_within_bound")
        } else if !self.accumulated_t_acyclic {
            Some("accumulated_t_acyclic")
        } else if !self.accumulated_free_intersection {
            Some("accumulated_free_intersection")
        } else if !self.transported_treesets_valid {
            Some("transported_treesets_valid")
        } else {
            None
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub stages: Vec<PipelineStage>,
    /// T ∪ H on the final vertex set.
    pub final_graph: Graph,
    pub t_edges: Vec<Edge>,
    pub h_edges: Vec<Edge>,
    pub original_count: usize,
    /// Composite collapse from the final vertex set back to the input.
    pub lambda: Vec<Vertex>,
    /// Constants of the identity embedding of the input into the final graph.
    pub qi: QiConstants,
    pub cuts_enumerated: usize,
    pub treeset_count: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error(transparent)]
    Enumerate(#[from] EnumError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Subdivide(#[from] SubdivideError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("stage {stage} certificate failed: {check}")]
    CertificateFailed { stage: usize, check: &'static str },
    #[error("quasi-isometry measurement failed: {0}")]
    Qi(#[from] QiError),
    #[error("stage limit {0} exceeded")]
    StageLimit(usize),
    #[error(transparent)]
    Contract(#[from] ContractError),
    #[error("contracted graph is not acyclic")]
    ContractedNotAcyclic,
    #[error("tree does not span the input components")]
    WrongComponents,
}

/// Runs the full iterated decomposition: enumerate cuts at level `k`,
/// partition into treesets, then per treeset subdivide the current remainder,
/// split it, accumulate tree edges and transport the remaining treesets.
/// Every stage is certified; a failed certificate is an error.
pub fn accessibility_pipeline(
    g: &Graph,
    k: u32,
    options: &PipelineOptions,
) -> Result<PipelineResult, PipelineError> {
    let cs = enumerate_cuts(g, k, options.mode, &options.caps)?;
    let cuts_enumerated = cs.len();

    // the IvOnly filter does not yield a complement-closed family; close it
    // before partitioning (treesets are closed by definition)
    let cs = match options.mode {
        FilterMode::IvAndOv => cs,
        FilterMode::IvOnly => close_under_complement(g, &cs),
    };
    let mut remaining: VecDeque<Treeset> = partition_into_treesets(g, &cs)?.into();
    let treeset_count = remaining.len();
    if treeset_count > options.max_stages {
        return Err(PipelineError::StageLimit(options.max_stages));
    }

    let mut h_cur = g.clone();
    let mut t_accum: Vec<Edge> = Vec::new();
    let mut lambda: Vec<Vertex> = (0..g.vertex_count() as Vertex).collect();
    let mut stages: Vec<PipelineStage> = Vec::new();

    // The pullback route consumes exactly the stage-0 treesets. The
    // re-enumeration route re-derives a fresh treeset from the current
    // remainder each stage; since any remainder with an edge has cuts at
    // k >= the trivial scale, it runs on the same stage budget for
    // comparison rather than to exhaustion.
    for stage_index in 0..treeset_count {
        let ts = match options.transport {
            Transport::Pullback => match remaining.pop_front() {
                Some(ts) => ts,
                None => break,
            },
            Transport::Reenumerate => {
                let cs = enumerate_cuts(&h_cur, k, options.mode, &options.caps)?;
                let cs = match options.mode {
                    FilterMode::IvAndOv => cs,
                    FilterMode::IvOnly => close_under_complement(&h_cur, &cs),
                };
                match partition_into_treesets(&h_cur, &cs)?.into_iter().next() {
                    Some(ts) => ts,
                    None => break,
                }
            }
        };
        let sub = subdivide(&h_cur, &ts)?;
        let dec = split(&sub.graph, &sub.lifted)?;
        let y_count = sub.graph.vertex_count();

        // accumulated tree edges keep their ids: the embedding is the identity
        let mut t_new = t_accum.clone();
        t_new.extend_from_slice(&dec.t_edges);
        t_new.sort_unstable();
        t_new.dedup();

        let t_graph = Graph::from_edges(y_count, &t_new)?;
        let accumulated_t_acyclic = is_acyclic(&t_graph);
        let accumulated_free_intersection =
            free_intersection_check(y_count, &t_new, &dec.h_edges);

        // transport remaining treesets to the new remainder
        let h_graph = Graph::from_edges(y_count, &dec.h_edges)?;
        let mut transported_ok = true;
        if options.transport == Transport::Pullback {
            let mut next: VecDeque<Treeset> = VecDeque::with_capacity(remaining.len());
            for rem in &remaining {
                let pulled = pullback_cutset(&sub.lambda, rem.cuts(), &dec.host);
                let restricted = restrict_cutset(&pulled, &h_graph);
                match validate_treeset(&h_graph, &restricted) {
                    Ok(ts) => next.push_back(ts),
                    Err(_) => {
                        transported_ok = false;
                        break;
                    }
                }
            }
            if transported_ok {
                remaining = next;
            }
        }

        let certificate = StageCertificate {
            split: dec.certificate.clone(),
            accumulated_t_acyclic,
            accumulated_free_intersection,
            transported_treesets_valid: transported_ok,
            r: dec.r,
            measured_lipschitz: dec.measured_lipschitz,
        };
        if let Some(check) = certificate.first_failure() {
            return Err(PipelineError::CertificateFailed {
                stage: stage_index,
                check,
            });
        }

        // compose the collapse: new vertices first map into the previous stage
        lambda = sub
            .lambda
            .iter()
            .map(|&y| lambda[y as usize])
            .collect();
        t_accum = t_new;
        h_cur = h_graph;
        stages.push(PipelineStage {
            subdivision: sub,
            decomposition: dec,
            certificate,
        });
    }

    let final_count = h_cur.vertex_count();
    let mut all_edges = t_accum.clone();
    all_edges.extend(h_cur.edges());
    all_edges.sort_unstable();
    all_edges.dedup();
    let final_graph = Graph::from_edges(final_count, &all_edges)?;
    let h_edges = h_cur.edges();

    let embedding: Vec<Vertex> = (0..g.vertex_count() as Vertex).collect();
    let qi = quasi_isometry_constants(
        &embedding,
        g,
        &final_graph,
        QiGrid {
            l_max: 256,
            c_max: 256,
        },
    )?;

    Ok(PipelineResult {
        stages,
        final_graph,
        t_edges: t_accum,
        h_edges,
        original_count: g.vertex_count(),
        lambda,
        qi,
        cuts_enumerated,
        treeset_count,
    })
}

fn close_under_complement(g: &Graph, cs: &Cutset) -> Cutset {
    let comps = components(g);
    let mut cuts: Vec<Cut> = cs.iter().cloned().collect();
    for c in cs {
        let side = c.complement_side(&comps);
        if cs.position_of(c.component(), &side).is_none() {
            cuts.push(make_cut(g, &comps, side).expect("complement of a cut is a cut"));
        }
    }
    Cutset::from_cuts(cuts)
}

/// BFS spanning tree of every E_H-class, rooted at the class's least vertex.
pub fn spanning_forest_of_classes(n_vertices: usize, h_edges: &[Edge]) -> Vec<Edge> {
    let h = Graph::from_edges(n_vertices, h_edges).expect("valid H edges");
    let comps = components(&h);
    let mut out: Vec<Edge> = Vec::new();
    for members in &comps.members {
        if members.len() < 2 {
            continue;
        }
        let root = members[0];
        let mut seen: BTreeSet<Vertex> = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &w in h.neighbors(u) {
                if seen.insert(w) {
                    out.push((u.min(w), u.max(w)));
                    queue.push_back(w);
                }
            }
        }
    }
    out.sort_unstable();
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContractError {
    #[error("Tp is not acyclic")]
    NotAcyclic,
    #[error("gamma is not injective")]
    NotInjective,
    #[error("vertex {0} cannot reach the image of gamma within Tp")]
    Unreachable(Vertex),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Contracts the fibers of the nearest-image collapse: λ(y) is the least
/// x whose γ-image is closest to y in `tp`; the output joins x and x' when
/// some Tp-edge crosses their fibers. Fibers are Tp-subtrees, so the output
/// is acyclic.
pub fn contract(
    g_y: &Graph,
    tp_edges: &[Edge],
    gamma: &[Vertex],
) -> Result<Vec<Edge>, ContractError> {
    let n_y = g_y.vertex_count();
    let tp = Graph::from_edges(n_y, tp_edges)?;
    if !is_acyclic(&tp) {
        return Err(ContractError::NotAcyclic);
    }
    {
        let mut seen = vec![false; n_y];
        for &y in gamma {
            if seen[y as usize] {
                return Err(ContractError::NotInjective);
            }
            seen[y as usize] = true;
        }
    }

    // multi-source BFS; label[y] = least source index at minimal distance
    let mut dist = vec![u32::MAX; n_y];
    let mut label = vec![u32::MAX; n_y];
    let mut frontier: Vec<Vertex> = Vec::new();
    for (x, &y) in gamma.iter().enumerate() {
        dist[y as usize] = 0;
        label[y as usize] = x as u32;
        frontier.push(y);
    }
    let mut d = 0;
    while !frontier.is_empty() {
        let mut next: Vec<Vertex> = Vec::new();
        for &u in &frontier {
            for &w in tp.neighbors(u) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = d + 1;
                    next.push(w);
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        for &w in &next {
            let best = tp
                .neighbors(w)
                .iter()
                .filter(|&&z| dist[z as usize] == d)
                .map(|&z| label[z as usize])
                .min()
                .expect("frontier vertex has a parent");
            label[w as usize] = best;
        }
        frontier = next;
        d += 1;
    }
    if let Some(y) = dist.iter().position(|&d| d == u32::MAX) {
        return Err(ContractError::Unreachable(y as Vertex));
    }

    // fibers are connected: every non-root vertex has a neighbor one step
    // closer with the same label (the one its label came from)
    for y in 0..n_y as Vertex {
        if dist[y as usize] == 0 {
            continue;
        }
        let ok = tp.neighbors(y).iter().any(|&z| {
            dist[z as usize] + 1 == dist[y as usize] && label[z as usize] == label[y as usize]
        });
        assert!(ok, "fiber of {} is not Tp-connected", label[y as usize]);
    }

    let mut edges: BTreeSet<Edge> = BTreeSet::new();
    for &(a, b) in tp_edges {
        let (la, lb) = (label[a as usize], label[b as usize]);
        if la != lb {
            edges.insert((la.min(lb), lb.max(la)));
        }
    }
    Ok(edges.into_iter().collect())
}

/// The end-to-end certificate of `treeify`.
#[derive(Debug, Clone, Serialize)]
pub struct TreeifyCertificate {
    pub stages: Vec<StageCertificate>,
    pub t_prime_acyclic: bool,
    pub t_prime_free_intersection: bool,
    pub tree_acyclic: bool,
    pub spans_components: bool,
    pub lipschitz: u64,
}

impl TreeifyCertificate {
    pub fn all_pass(&self) -> bool {
        self.stages.iter().all(StageCertificate::all_pass)
            && self.t_prime_acyclic
            && self.t_prime_free_intersection
            && self.tree_acyclic
            && self.spans_components
    }
}

#[derive(Debug, Clone)]
pub struct TreeifyResult {
    pub tree: Graph,
    pub lipschitz: u64,
    pub t2_edges: Vec<Edge>,
    pub pipeline: PipelineResult,
    pub certificate: TreeifyCertificate,
}

/// The full construction: pipeline, spanning forest of the final remainder
/// classes, and contraction to an acyclic graph on the input vertices,
/// Lipschitz equivalent to the input.
pub fn treeify(g: &Graph, k: u32, options: &PipelineOptions) -> Result<TreeifyResult, PipelineError> {
    let pipeline = accessibility_pipeline(g, k, options)?;
    let y_count = pipeline.final_graph.vertex_count();

    let t2 = spanning_forest_of_classes(y_count, &pipeline.h_edges);
    let mut t_prime = pipeline.t_edges.clone();
    t_prime.extend_from_slice(&t2);
    t_prime.sort_unstable();
    t_prime.dedup();

    let t_prime_graph = Graph::from_edges(y_count, &t_prime)?;
    let t_prime_acyclic = is_acyclic(&t_prime_graph);
    let t_prime_free_intersection =
        free_intersection_check(y_count, &pipeline.t_edges, &t2);
    if !t_prime_acyclic {
        return Err(PipelineError::CertificateFailed {
            stage: pipeline.stages.len(),
            check: "t_prime_acyclic",
        });
    }
    if !t_prime_free_intersection {
        return Err(PipelineError::CertificateFailed {
            stage: pipeline.stages.len(),
            check: "t_prime_free_intersection",
        });
    }

    let embedding: Vec<Vertex> = (0..pipeline.original_count as Vertex).collect();
    let tree_edges = contract(&pipeline.final_graph, &t_prime, &embedding)?;
    let tree = Graph::from_edges(pipeline.original_count, &tree_edges)?;
    if !is_acyclic(&tree) {
        return Err(PipelineError::ContractedNotAcyclic);
    }
    if components(&tree).id != components(g).id {
        return Err(PipelineError::WrongComponents);
    }
    let lipschitz = match lipschitz_constant(g, &tree).expect("same vertex count") {
        ExtNat::Fin(l) => l,
        ExtNat::Inf => return Err(PipelineError::WrongComponents),
    };

    let certificate = TreeifyCertificate {
        stages: pipeline.stages.iter().map(|s| s.certificate.clone()).collect(),
        t_prime_acyclic,
        t_prime_free_intersection,
        tree_acyclic: true,
        spans_components: true,
        lipschitz,
    };

    Ok(TreeifyResult {
        tree,
        lipschitz,
        t2_edges: t2,
        pipeline,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::cut_from_side;

    fn path(n: usize) -> Graph {
        let edges: Vec<Edge> = (0..n as Vertex - 1).map(|i| (i, i + 1)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let mut edges: Vec<Edge> = (0..n as Vertex - 1).map(|i| (i, i + 1)).collect();
        edges.push((0, n as Vertex - 1));
        Graph::from_edges(n, &edges).unwrap()
    }

    fn two_triangles() -> Graph {
        Graph::from_edges(
            6,
            &[(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)],
        )
        .unwrap()
    }

    fn triangle_treeset() -> (Graph, Treeset) {
        let g = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let sides: [&[Vertex]; 6] = [&[0], &[1], &[2], &[1, 2], &[0, 2], &[0, 1]];
        let cs = Cutset::from_cuts(
            sides
                .iter()
                .map(|s| cut_from_side(&g, s).unwrap())
                .collect(),
        );
        let ts = validate_treeset(&g, &cs).unwrap();
        (g, ts)
    }

    fn default_caps() -> EnumCaps {
        EnumCaps::default()
    }

    #[test]
    fn modulus_fixtures() {
        let caps = default_caps();
        let m = one_endedness_modulus(&path(5), 1, FilterMode::IvAndOv, &caps).unwrap();
        assert_eq!(m.r, 1);
        let m = one_endedness_modulus(&path(9), 1, FilterMode::IvAndOv, &caps).unwrap();
        assert_eq!(m.r, 3);
        let m = one_endedness_modulus(&cycle(4), 1, FilterMode::IvAndOv, &caps).unwrap();
        assert_eq!((m.r, m.cut_count), (0, 0));
    }

    #[test]
    fn subdivide_noop_cases() {
        let g = path(4);
        let sub = subdivide(&g, &Treeset::empty()).unwrap();
        assert_eq!(sub.graph, g);
        assert_eq!(sub.max_chain, 0);

        let cs = enumerate_cuts(&g, 1, FilterMode::IvAndOv, &default_caps()).unwrap();
        let ts = validate_treeset(&g, &cs).unwrap();
        let sub = subdivide(&g, &ts).unwrap();
        assert_eq!(sub.graph, g); // every edge already separated exactly once
        assert_eq!(sub.max_chain, 1);
    }

    #[test]
    fn subdivide_triangle() {
        let (g, ts) = triangle_treeset();
        let sub = subdivide(&g, &ts).unwrap();
        assert_eq!(sub.graph.vertex_count(), 6);
        assert_eq!(sub.graph.edge_count(), 6);
        assert_eq!(sub.max_chain, 2);
        // lambda sends each midpoint to the smaller endpoint of its edge
        assert_eq!(&sub.lambda[3..], &[0, 0, 1]);
        // every subdivided edge is separated by exactly one lifted pair
        for (u, v) in sub.graph.edges() {
            let seps = sub
                .lifted
                .cuts()
                .iter()
                .filter(|c| c.contains(u) != c.contains(v))
                .count();
            assert_eq!(seps, 2, "edge ({u},{v})");
        }
    }

    #[test]
    fn split_two_triangles() {
        let g = two_triangles();
        let cs = Cutset::from_cuts(vec![
            cut_from_side(&g, &[0, 1, 2]).unwrap(),
            cut_from_side(&g, &[3, 4, 5]).unwrap(),
        ]);
        let ts = validate_treeset(&g, &cs).unwrap();
        let dec = split(&g, &ts).unwrap();
        assert_eq!(dec.t_edges, vec![(2, 3)]);
        assert_eq!(dec.h_edges.len(), 6);
        assert_eq!(dec.measured_lipschitz, 1);
        assert_eq!(dec.r, 0);
        assert!(dec.certificate.all_pass());
    }

    #[test]
    fn split_p4() {
        let g = path(4);
        let cs = enumerate_cuts(&g, 1, FilterMode::IvAndOv, &default_caps()).unwrap();
        let ts = validate_treeset(&g, &cs).unwrap();
        let dec = split(&g, &ts).unwrap();
        assert_eq!(dec.t_edges, g.edges());
        assert!(dec.h_edges.is_empty());
        assert_eq!(dec.host, g);
        assert!(dec.certificate.all_pass());
    }

    #[test]
    fn split_subdivided_triangle() {
        let (g, ts) = triangle_treeset();
        let sub = subdivide(&g, &ts).unwrap();
        let dec = split(&sub.graph, &sub.lifted).unwrap();
        assert_eq!(dec.t_edges.len(), 3);
        assert!(dec.certificate.all_pass());
        // H is the clique among the three midpoints
        assert_eq!(dec.h_edges, vec![(3, 4), (3, 5), (4, 5)]);
    }

    #[test]
    fn split_rejects_unsubdivided() {
        let (g, ts) = triangle_treeset();
        let err = split(&g, &ts).unwrap_err();
        assert!(matches!(err, SplitError::EdgeSeparatedTwice(_, _, 2)));
    }

    #[test]
    fn free_intersection_fixtures() {
        assert!(free_intersection_check(3, &[(0, 1)], &[(1, 2)]));
        assert!(!free_intersection_check(2, &[(0, 1)], &[(0, 1)]));
        let g = two_triangles();
        let cs = Cutset::from_cuts(vec![
            cut_from_side(&g, &[0, 1, 2]).unwrap(),
            cut_from_side(&g, &[3, 4, 5]).unwrap(),
        ]);
        let ts = validate_treeset(&g, &cs).unwrap();
        let dec = split(&g, &ts).unwrap();
        assert!(free_intersection_check(6, &dec.t_edges, &dec.h_edges));
    }

    #[test]
    fn pipeline_p4() {
        let g = path(4);
        let res = accessibility_pipeline(&g, 1, &PipelineOptions::default()).unwrap();
        assert_eq!(res.stages.len(), 1);
        assert!(res.h_edges.is_empty());
        assert_eq!(res.t_edges, g.edges());
        assert!(res.qi.codensity.is_finite());
    }

    #[test]
    fn pipeline_c4_no_cuts() {
        let g = cycle(4);
        let res = accessibility_pipeline(&g, 1, &PipelineOptions::default()).unwrap();
        assert!(res.stages.is_empty());
        assert!(res.t_edges.is_empty());
        assert_eq!(res.h_edges, g.edges());
    }

    #[test]
    fn spanning_forest_fixtures() {
        assert_eq!(
            spanning_forest_of_classes(3, &[(0, 1), (0, 2), (1, 2)]),
            vec![(0, 1), (0, 2)]
        );
        assert!(spanning_forest_of_classes(4, &[]).is_empty());
        let p = path(5);
        assert_eq!(spanning_forest_of_classes(5, &p.edges()), p.edges());
    }

    #[test]
    fn contract_fixtures() {
        // identity gamma: output = Tp
        let g = path(4);
        let id: Vec<Vertex> = (0..4).collect();
        assert_eq!(contract(&g, &g.edges(), &id).unwrap(), g.edges());

        // subdivided edge 0–2–1: midpoint ties to the smaller index
        let sub = Graph::from_edges(3, &[(0, 2), (1, 2)]).unwrap();
        let out = contract(&sub, &sub.edges(), &[0, 1]).unwrap();
        assert_eq!(out, vec![(0, 1)]);

        let err = contract(&cycle(3), &cycle(3).edges(), &[0, 1, 2]).unwrap_err();
        assert_eq!(err, ContractError::NotAcyclic);
    }

    #[test]
    fn treeify_p4_is_identity() {
        let g = path(4);
        let res = treeify(&g, 1, &PipelineOptions::default()).unwrap();
        assert_eq!(res.tree, g);
        assert_eq!(res.lipschitz, 1);
        assert!(res.certificate.all_pass());
    }

    #[test]
    fn treeify_triangle() {
        let g = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let res = treeify(&g, 1, &PipelineOptions::default()).unwrap();
        assert!(is_acyclic(&res.tree));
        assert_eq!(res.tree.edge_count(), 2);
        assert!(res.lipschitz <= 2);
        assert!(res.certificate.all_pass());
    }

    #[test]
    fn treeify_two_triangles() {
        let g = two_triangles();
        let res = treeify(&g, 2, &PipelineOptions::default()).unwrap();
        assert!(is_acyclic(&res.tree));
        assert_eq!(res.tree.edge_count(), 5);
        assert!(res.lipschitz <= 3, "constant {}", res.lipschitz);
        assert!(res.certificate.all_pass());
        assert!(res.pipeline.stages.len() >= 2);
    }

    #[test]
    fn treeify_cycle_degrades_to_spanning_tree() {
        let g = cycle(4);
        let res = treeify(&g, 1, &PipelineOptions::default()).unwrap();
        assert!(is_acyclic(&res.tree));
        assert_eq!(res.tree.edge_count(), 3);
        assert_eq!(res.lipschitz, 3);
    }

    #[test]
    fn reenumeration_transport_agrees_on_small_cases() {
        let g = two_triangles();
        let a = treeify(&g, 2, &PipelineOptions::default()).unwrap();
        let b = treeify(
            &g,
            2,
            &PipelineOptions {
                transport: Transport::Reenumerate,
                ..PipelineOptions::default()
            },
        )
        .unwrap();
        assert!(is_acyclic(&b.tree));
        assert_eq!(components(&a.tree).id, components(&b.tree).id);
    }
}
