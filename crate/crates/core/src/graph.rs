//! Finite simple undirected graphs with dense integer vertices, the path
//! metric they carry, and the metric-comparison measurements (Lipschitz
//! equivalence, quasi-isometry constants) used by every other module.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// A vertex id. Vertices of a graph on `n` vertices are `0..n`.
pub type Vertex = u32;

/// An undirected edge, stored canonically with `0 <= u < v`.
pub type Edge = (Vertex, Vertex);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} out of range (graph has {1} vertices)")]
    VertexOutOfRange(Vertex, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex counts differ: {0} vs {1}")]
    VertexCountMismatch(usize, usize),
}

/// An extended natural number: a finite value or ∞.
///
/// Results that can be infinite (diameters across components, Lipschitz
/// constants of graphs with different connectivity) use this instead of a
/// large-integer sentinel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

impl ExtNat {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtNat::Fin(_))
    }

    /// The finite value, panicking on ∞.
    pub fn unwrap_fin(self) -> u64 {
        match self {
            ExtNat::Fin(v) => v,
            ExtNat::Inf => panic!("unexpected infinite value"),
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(v) => write!(f, "{v}"),
            ExtNat::Inf => write!(f, "inf"),
        }
    }
}

impl From<u64> for ExtNat {
    fn from(v: u64) -> Self {
        ExtNat::Fin(v)
    }
}

/// A finite simple undirected graph: `n` vertices `0..n` and sorted
/// adjacency lists.
///
/// Invariants enforced at construction: adjacency is symmetric, irreflexive
/// and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<Vertex>>,
}

impl Graph {
    /// Builds a graph from undirected edges. Edges may be given in either
    /// orientation; duplicates and loops are rejected.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n {
                return Err(GraphError::VertexOutOfRange(u, n));
            }
            if v as usize >= n {
                return Err(GraphError::VertexOutOfRange(v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                let d = list.windows(2).find(|w| w[0] == w[1]).unwrap()[0];
                return Err(GraphError::DuplicateEdge(u as Vertex, d));
            }
        }
        Ok(Graph { n, adj })
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![Vec::new(); n],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// All edges as canonical `(u, v)` pairs with `u < v`, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n as Vertex {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Single-source shortest-path lengths; `None` for unreachable vertices.
    pub fn distances_from(&self, x: Vertex) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.n];
        let mut queue = std::collections::VecDeque::new();
        dist[x as usize] = Some(0);
        queue.push_back(x);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize].unwrap();
            for &w in self.neighbors(u) {
                if dist[w as usize].is_none() {
                    dist[w as usize] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Like `distances_from` but stops expanding beyond `depth`. Returns
    /// `(vertex, distance)` pairs in BFS order.
    pub fn distances_from_bounded(&self, x: Vertex, depth: u32) -> Vec<(Vertex, u32)> {
        let mut dist = std::collections::HashMap::new();
        let mut queue = std::collections::VecDeque::new();
        dist.insert(x, 0u32);
        queue.push_back(x);
        let mut out = vec![(x, 0)];
        while let Some(u) = queue.pop_front() {
            let du = dist[&u];
            if du == depth {
                continue;
            }
            for &w in self.neighbors(u) {
                if !dist.contains_key(&w) {
                    dist.insert(w, du + 1);
                    out.push((w, du + 1));
                    queue.push_back(w);
                }
            }
        }
        out
    }
}

/// A vertex partition into connected components, ids dense `0..count` in
/// order of least member.
#[derive(Debug, Clone)]
pub struct Components {
    pub id: Vec<u32>,
    pub count: usize,
    pub members: Vec<Vec<Vertex>>,
}

impl Components {
    pub fn class_of(&self, v: Vertex) -> u32 {
        self.id[v as usize]
    }

    pub fn same_class(&self, u: Vertex, v: Vertex) -> bool {
        self.id[u as usize] == self.id[v as usize]
    }
}

/// Connected components of `g`; two vertices share an id iff joined by a
/// path.
pub fn components(g: &Graph) -> Components {
    let n = g.vertex_count();
    let mut id = vec![u32::MAX; n];
    let mut members = Vec::new();
    for s in 0..n as Vertex {
        if id[s as usize] != u32::MAX {
            continue;
        }
        let c = members.len() as u32;
        let mut mem = vec![s];
        id[s as usize] = c;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if id[w as usize] == u32::MAX {
                    id[w as usize] = c;
                    mem.push(w);
                    queue.push_back(w);
                }
            }
        }
        mem.sort_unstable();
        members.push(mem);
    }
    Components {
        id,
        count: members.len(),
        members,
    }
}

/// The closed ball `{y : d_G(x,y) <= r}`, sorted.
pub fn ball(g: &Graph, x: Vertex, r: u32) -> Result<Vec<Vertex>, GraphError> {
    if x as usize >= g.vertex_count() {
        return Err(GraphError::VertexOutOfRange(x, g.vertex_count()));
    }
    let mut b: Vec<Vertex> = g
        .distances_from_bounded(x, r)
        .into_iter()
        .map(|(v, _)| v)
        .collect();
    b.sort_unstable();
    Ok(b)
}

/// Diameter of `A` in the ambient metric of `g` (not the induced-subgraph
/// metric). 0 for |A| <= 1; ∞ if `A` meets two components.
pub fn metric_diameter(g: &Graph, a: &[Vertex]) -> ExtNat {
    if a.len() <= 1 {
        return ExtNat::Fin(0);
    }
    let mut best = 0u64;
    for &x in &a[..a.len() - 1] {
        let dist = g.distances_from(x);
        for &y in a {
            match dist[y as usize] {
                Some(d) => best = best.max(d as u64),
                None => return ExtNat::Inf,
            }
        }
    }
    ExtNat::Fin(best)
}

/// True as soon as some pair of `A` is at ambient distance > `bound`
/// (including ∞). Equivalent to `metric_diameter(g, a) > bound` but with
/// early exit.
pub fn metric_diameter_exceeds(g: &Graph, a: &[Vertex], bound: u64) -> bool {
    if a.len() <= 1 {
        return false;
    }
    for &x in &a[..a.len() - 1] {
        let dist = g.distances_from(x);
        for &y in a {
            match dist[y as usize] {
                Some(d) => {
                    if d as u64 > bound {
                        return true;
                    }
                }
                None => return true,
            }
        }
    }
    false
}

/// The k-th power graph: edge (u,v) iff `1 <= d_G(u,v) <= k`.
pub fn power_graph(g: &Graph, k: u32) -> Graph {
    assert!(k >= 1, "power_graph requires k >= 1");
    let n = g.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for u in 0..n as Vertex {
        for (v, d) in g.distances_from_bounded(u, k) {
            if d >= 1 {
                adj[u as usize].push(v);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    Graph { n, adj }
}

/// True iff every component is a tree, i.e. |E| = |V| − |components|.
pub fn is_acyclic(g: &Graph) -> bool {
    g.edge_count() == g.vertex_count() - components(g).count
}

/// Minimal `l >= 1` with `h ⊆ g^l` and `g ⊆ h^l`; ∞ when the generated
/// equivalence relations differ (no such l exists).
pub fn lipschitz_constant(g: &Graph, h: &Graph) -> Result<ExtNat, GraphError> {
    if g.vertex_count() != h.vertex_count() {
        return Err(GraphError::VertexCountMismatch(
            g.vertex_count(),
            h.vertex_count(),
        ));
    }
    let mut l = 1u64;
    for (a, b) in [(g, h), (h, g)] {
        // every edge of b must be within the metric of a
        for u in 0..a.vertex_count() as Vertex {
            let dist = a.distances_from(u);
            for &v in b.neighbors(u) {
                match dist[v as usize] {
                    Some(d) => l = l.max(d as u64),
                    None => return Ok(ExtNat::Inf),
                }
            }
        }
    }
    Ok(ExtNat::Fin(l))
}

/// Search grid for quasi-isometry constants.
#[derive(Debug, Clone, Copy)]
pub struct QiGrid {
    pub l_max: u64,
    pub c_max: u64,
}

impl Default for QiGrid {
    fn default() -> Self {
        QiGrid { l_max: 16, c_max: 16 }
    }
}

/// Witnesses for an (extended) quasi-isometry: minimal `(l, c)` on the grid,
/// lexicographically, plus the exact codensity `sup_y d(y, image)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QiConstants {
    pub l: u64,
    pub c: u64,
    pub codensity: ExtNat,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QiError {
    #[error("map image {0} out of range (target has {1} vertices)")]
    ImageOutOfRange(Vertex, usize),
    #[error("map not total: domain has {0} vertices, map lists {1}")]
    MapNotTotal(usize, usize),
    #[error(
        "finiteness condition violated at pair ({0}, {1}): d_G and d_G' disagree on finiteness"
    )]
    FinitenessViolated(Vertex, Vertex),
    #[error("no (l, c) on the grid l <= {0}, c <= {1} satisfies the inequalities")]
    GridExhausted(u64, u64),
}

/// Minimal `(l, c)` with `l⁻¹·d_G(x1,x2) − c ≤ d_{G'}(γx1, γx2) ≤ l·d_G(x1,x2) + c`
/// over all pairs, scanned lexicographically on the given grid, plus exact
/// codensity of the image.
///
/// Fails if the biconditional `d_G < ∞ ⟺ d_{G'}∘(γ×γ) < ∞` is violated or
/// the grid is exhausted.
pub fn quasi_isometry_constants(
    map: &[Vertex],
    g: &Graph,
    g2: &Graph,
    grid: QiGrid,
) -> Result<QiConstants, QiError> {
    let n = g.vertex_count();
    if map.len() != n {
        return Err(QiError::MapNotTotal(n, map.len()));
    }
    for &y in map {
        if y as usize >= g2.vertex_count() {
            return Err(QiError::ImageOutOfRange(y, g2.vertex_count()));
        }
    }

    // collect all finite pairs (d, d') once; check the finiteness biconditional
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    for x1 in 0..n as Vertex {
        let dg = g.distances_from(x1);
        let dh = g2.distances_from(map[x1 as usize]);
        for x2 in x1 + 1..n as Vertex {
            let d = dg[x2 as usize];
            let d2 = dh[map[x2 as usize] as usize];
            match (d, d2) {
                (Some(a), Some(b)) => pairs.push((a as u64, b as u64)),
                (None, None) => {}
                _ => return Err(QiError::FinitenessViolated(x1, x2)),
            }
        }
    }

    // for fixed c, the minimal feasible l is forced by each pair:
    //   d' <= l d + c  and  d <= l (d' + c)
    let mut best: Option<(u64, u64)> = None;
    'c_scan: for c in 0..=grid.c_max {
        let mut l_needed = 1u64;
        for &(d, d2) in &pairs {
            if d > 0 {
                if d2 > c {
                    l_needed = l_needed.max((d2 - c).div_ceil(d));
                }
                if d2 + c == 0 {
                    continue 'c_scan; // l⁻¹·d − c ≤ 0 unreachable for any l
                }
                l_needed = l_needed.max(d.div_ceil(d2 + c));
            } else if d2 > c {
                continue 'c_scan; // d = 0 forces d' ≤ c
            }
            if l_needed > grid.l_max {
                continue 'c_scan;
            }
        }
        match best {
            Some((bl, _)) if bl <= l_needed => {}
            _ => best = Some((l_needed, c)),
        }
    }
    let (l, c) = best.ok_or(QiError::GridExhausted(grid.l_max, grid.c_max))?;

    // codensity: multi-source BFS in g2 from the image
    let codensity = {
        let mut dist = vec![u32::MAX; g2.vertex_count()];
        let mut queue = std::collections::VecDeque::new();
        for &y in map {
            if dist[y as usize] == u32::MAX {
                dist[y as usize] = 0;
                queue.push_back(y);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &w in g2.neighbors(u) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        if g2.vertex_count() == 0 {
            ExtNat::Fin(0)
        } else if dist.iter().any(|&d| d == u32::MAX) {
            ExtNat::Inf
        } else {
            ExtNat::Fin(*dist.iter().max().unwrap() as u64)
        }
    };

    Ok(QiConstants { l, c, codensity })
}
