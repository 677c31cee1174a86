//! Cuts and cutsets: boundary operators, enumeration of cuts with bounded
//! boundary diameter, nestedness, treeset validation, partition of a cutset
//! into nested treesets, and cutset transport (pullback along a collapse map,
//! restriction to a subgraph).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{components, Components, Graph, Vertex};

/// One side of a bipartition of a connected component, with the four
/// boundaries cached.
///
/// `iv`/`ov` are the inner/outer vertex boundaries, `oe`/`ie` the outgoing/
/// incoming directed edge boundaries. Cuts compare equal iff they have the
/// same component and side.
#[derive(Debug, Clone)]
pub struct Cut {
    component: u32,
    component_size: u32,
    side: Vec<Vertex>,
    iv: Vec<Vertex>,
    ov: Vec<Vertex>,
    oe: Vec<(Vertex, Vertex)>,
    ie: Vec<(Vertex, Vertex)>,
}

impl PartialEq for Cut {
    fn eq(&self, other: &Self) -> bool {
        self.component == other.component && self.side == other.side
    }
}
impl Eq for Cut {}
impl PartialOrd for Cut {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cut {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.component, &self.side).cmp(&(other.component, &other.side))
    }
}

impl Cut {
    pub fn component(&self) -> u32 {
        self.component
    }

    pub fn component_size(&self) -> usize {
        self.component_size as usize
    }

    /// The side C, sorted.
    pub fn side(&self) -> &[Vertex] {
        &self.side
    }

    /// ∂_iv C: vertices of C with a neighbor outside.
    pub fn inner_boundary(&self) -> &[Vertex] {
        &self.iv
    }

    /// ∂_ov C = ∂_iv C̄.
    pub fn outer_boundary(&self) -> &[Vertex] {
        &self.ov
    }

    /// ∂_oe C: directed edges (C × C̄) ∩ G, sorted.
    pub fn outgoing_edges(&self) -> &[(Vertex, Vertex)] {
        &self.oe
    }

    /// ∂_ie C: directed edges (C̄ × C) ∩ G, sorted.
    pub fn incoming_edges(&self) -> &[(Vertex, Vertex)] {
        &self.ie
    }

    /// ∂_iv C ∪ ∂_ov C, sorted.
    pub fn boundary_union(&self) -> Vec<Vertex> {
        let mut b: Vec<Vertex> = self.iv.iter().chain(self.ov.iter()).copied().collect();
        b.sort_unstable();
        b
    }

    pub fn contains(&self, x: Vertex) -> bool {
        self.side.binary_search(&x).is_ok()
    }

    /// The complement side C̄ within the component, sorted.
    pub fn complement_side(&self, comps: &Components) -> Vec<Vertex> {
        let members = &comps.members[self.component as usize];
        let mut out = Vec::with_capacity(members.len() - self.side.len());
        let mut it = self.side.iter().peekable();
        for &v in members {
            if it.peek() == Some(&&v) {
                it.next();
            } else {
                out.push(v);
            }
        }
        out
    }

    /// Smaller endpoint of the lexicographically least undirected boundary
    /// edge. The side containing it is the canonical representative of the
    /// complement pair.
    fn canonical_anchor(&self) -> Vertex {
        self.oe
            .iter()
            .map(|&(a, b)| if a < b { (a, b) } else { (b, a) })
            .min()
            .expect("a cut has a nonempty edge boundary")
            .0
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CutError {
    #[error("side is empty")]
    EmptySide,
    #[error("side is a whole component")]
    FullSide,
    #[error("side spans components {0} and {1}")]
    SpansComponents(u32, u32),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(Vertex),
}

/// Builds the cut with the given side, computing all four boundaries.
pub fn cut_from_side(g: &Graph, side: &[Vertex]) -> Result<Cut, CutError> {
    let comps = components(g);
    let mut side = side.to_vec();
    side.sort_unstable();
    side.dedup();
    make_cut(g, &comps, side)
}

/// `cut_from_side` with precomputed components; `side` must be sorted and
/// duplicate-free.
pub(crate) fn make_cut(g: &Graph, comps: &Components, side: Vec<Vertex>) -> Result<Cut, CutError> {
    let n = g.vertex_count();
    if side.is_empty() {
        return Err(CutError::EmptySide);
    }
    if let Some(&v) = side.iter().find(|&&v| v as usize >= n) {
        return Err(CutError::VertexOutOfRange(v));
    }
    let component = comps.class_of(side[0]);
    if let Some(&v) = side.iter().find(|&&v| comps.class_of(v) != component) {
        return Err(CutError::SpansComponents(component, comps.class_of(v)));
    }
    let component_size = comps.members[component as usize].len();
    if side.len() == component_size {
        return Err(CutError::FullSide);
    }

    let mut in_side = vec![false; n];
    for &v in &side {
        in_side[v as usize] = true;
    }
    let mut iv = Vec::new();
    let mut oe = Vec::new();
    for &x in &side {
        let mut boundary = false;
        for &y in g.neighbors(x) {
            if !in_side[y as usize] {
                boundary = true;
                oe.push((x, y));
            }
        }
        if boundary {
            iv.push(x);
        }
    }
    oe.sort_unstable();
    let mut ov: Vec<Vertex> = oe.iter().map(|&(_, y)| y).collect();
    ov.sort_unstable();
    ov.dedup();
    let mut ie: Vec<(Vertex, Vertex)> = oe.iter().map(|&(x, y)| (y, x)).collect();
    ie.sort_unstable();

    Ok(Cut {
        component,
        component_size: component_size as u32,
        side,
        iv,
        ov,
        oe,
        ie,
    })
}

/// A deduplicated family of cuts, sorted by (component, side).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cutset {
    cuts: Vec<Cut>,
}

impl Cutset {
    pub fn from_cuts(mut cuts: Vec<Cut>) -> Self {
        cuts.sort();
        cuts.dedup();
        Cutset { cuts }
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Cut> {
        self.cuts.iter()
    }

    pub fn position_of(&self, component: u32, side: &[Vertex]) -> Option<usize> {
        self.cuts
            .binary_search_by(|c| (c.component, c.side.as_slice()).cmp(&(component, side)))
            .ok()
    }

    /// Indices of cuts whose side contains `x` but not `y`.
    pub fn separating_indices(&self, x: Vertex, y: Vertex) -> Vec<usize> {
        self.cuts
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(x) && !c.contains(y))
            .map(|(i, _)| i)
            .collect()
    }
}

impl<'a> IntoIterator for &'a Cutset {
    type Item = &'a Cut;
    type IntoIter = std::slice::Iter<'a, Cut>;
    fn into_iter(self) -> Self::IntoIter {
        self.cuts.iter()
    }
}

/// Which boundary the diameter filter applies to.
///
/// The one-endedness definition reads the filter on ∂_iv alone; the
/// decomposition theorem's cutset uses ∂_iv ∪ ∂_ov. Both are supported,
/// defaulting to the latter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FilterMode {
    IvOnly,
    IvAndOv,
}

impl std::fmt::Display for FilterMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FilterMode::IvOnly => write!(f, "iv"),
            FilterMode::IvAndOv => write!(f, "ivov"),
        }
    }
}

/// Search guards for `enumerate_cuts`. Exceeding any is a clean error,
/// never silent truncation.
#[derive(Debug, Clone, Copy)]
pub struct EnumCaps {
    pub max_ball: usize,
    pub max_components: usize,
    pub max_cuts: usize,
}

impl Default for EnumCaps {
    fn default() -> Self {
        EnumCaps {
            max_ball: 64,
            max_components: 12,
            max_cuts: 200_000,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumError {
    #[error("ball of radius k at anchor {anchor} has {size} vertices, cap {cap}")]
    BallCapExceeded { anchor: Vertex, size: usize, cap: usize },
    #[error("removing a candidate boundary at anchor {anchor} leaves {count} components, cap {cap}")]
    ComponentCapExceeded { anchor: Vertex, count: usize, cap: usize },
    #[error("enumeration exceeded {cap} cuts")]
    CutCapExceeded { cap: usize },
}

/// Enumerates exactly the cuts whose filtered boundary has ambient diameter
/// at most `k`.
///
/// For each anchor `x` the candidate inner boundaries are the subsets
/// `D ⊆ ball(x,k)` with `min D = x` and `diam D <= k`; the sides are
/// `D ∪ (union of a subfamily of the components of the complement of D)`
/// such that every vertex of `D` keeps a neighbor outside. With the
/// IvAndOv filter the result is closed under complementation.
pub fn enumerate_cuts(
    g: &Graph,
    k: u32,
    mode: FilterMode,
    caps: &EnumCaps,
) -> Result<Cutset, EnumError> {
    let comps = components(g);
    let mut en = Enumerator {
        g,
        k,
        mode,
        caps,
        sides: BTreeSet::new(),
        local_of: vec![u32::MAX; g.vertex_count()],
        dmat: Vec::new(),
        lsize: 0,
        mark: vec![0; g.vertex_count()],
        epoch: 0,
        comp: 0,
        anchor: 0,
        members: &[],
    };

    for x in 0..g.vertex_count() as Vertex {
        let comp = comps.class_of(x);
        let members = &comps.members[comp as usize];
        if members.len() < 2 {
            continue;
        }
        en.comp = comp;
        en.anchor = x;
        en.members = members;

        // local universe: ball(x, k+1) holds every candidate boundary vertex
        // and every outer-boundary vertex of a candidate
        let reach = g.distances_from_bounded(x, k + 1);
        let mut local: Vec<Vertex> = reach.iter().map(|&(v, _)| v).collect();
        local.sort_unstable();
        let ball_k = reach.iter().filter(|&&(_, d)| d <= k).count();
        if ball_k > caps.max_ball {
            return Err(EnumError::BallCapExceeded {
                anchor: x,
                size: ball_k,
                cap: caps.max_ball,
            });
        }
        for (li, &v) in local.iter().enumerate() {
            en.local_of[v as usize] = li as u32;
        }

        // pairwise ambient distances (truncated at k) between local vertices
        en.lsize = local.len();
        en.dmat = vec![u32::MAX; en.lsize * en.lsize];
        for (li, &v) in local.iter().enumerate() {
            for (w, d) in g.distances_from_bounded(v, k) {
                let lw = en.local_of[w as usize];
                if lw != u32::MAX {
                    en.dmat[li * en.lsize + lw as usize] = d;
                }
            }
        }

        // candidates for D ∖ {x}: ball members above x, in ascending order
        let mut cand: Vec<Vertex> = reach
            .iter()
            .filter(|&&(v, d)| d <= k && v > x)
            .map(|&(v, _)| v)
            .collect();
        cand.sort_unstable();

        let mut chosen = vec![x];
        en.extend(&mut chosen, &cand, 0)?;

        for &v in &local {
            en.local_of[v as usize] = u32::MAX;
        }
    }

    let mut cuts = Vec::with_capacity(en.sides.len());
    for (_, side) in en.sides {
        cuts.push(make_cut(g, &comps, side).expect("enumerated side is a valid cut"));
    }
    Ok(Cutset::from_cuts(cuts))
}

struct Enumerator<'a> {
    g: &'a Graph,
    k: u32,
    mode: FilterMode,
    caps: &'a EnumCaps,
    sides: BTreeSet<(u32, Vec<Vertex>)>,
    // per-anchor state
    local_of: Vec<u32>,
    dmat: Vec<u32>,
    lsize: usize,
    mark: Vec<u32>,
    epoch: u32,
    comp: u32,
    anchor: Vertex,
    members: &'a [Vertex],
}

impl Enumerator<'_> {
    fn dist_ok(&self, a: Vertex, b: Vertex) -> bool {
        let (la, lb) = (self.local_of[a as usize], self.local_of[b as usize]);
        la != u32::MAX
            && lb != u32::MAX
            && self.dmat[la as usize * self.lsize + lb as usize] <= self.k
    }

    /// Depth-first growth of candidate boundaries, keeping `chosen` sorted
    /// and pairwise within distance k.
    fn extend(
        &mut self,
        chosen: &mut Vec<Vertex>,
        cand: &[Vertex],
        start: usize,
    ) -> Result<(), EnumError> {
        self.emit_cuts_for_boundary(chosen)?;
        for i in start..cand.len() {
            let y = cand[i];
            if chosen.iter().all(|&z| self.dist_ok(z, y)) {
                chosen.push(y);
                self.extend(chosen, cand, i + 1)?;
                chosen.pop();
            }
        }
        Ok(())
    }

    /// Expands one candidate inner boundary `D` into the cuts it bounds.
    fn emit_cuts_for_boundary(&mut self, d_set: &[Vertex]) -> Result<(), EnumError> {
        let g = self.g;
        // every d must keep some neighbor outside D, else ∂_iv never equals D
        if d_set
            .iter()
            .any(|&d| g.neighbors(d).iter().all(|y| d_set.binary_search(y).is_ok()))
        {
            return Ok(());
        }

        // connected components of (component ∖ D)
        self.epoch += 1;
        let e = self.epoch;
        for &d in d_set {
            self.mark[d as usize] = e;
        }
        let mut pieces: Vec<Vec<Vertex>> = Vec::new();
        let mut queue = VecDeque::new();
        for &s in self.members {
            if self.mark[s as usize] == e {
                continue;
            }
            let mut piece = vec![s];
            self.mark[s as usize] = e;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in g.neighbors(u) {
                    if self.mark[w as usize] != e {
                        self.mark[w as usize] = e;
                        piece.push(w);
                        queue.push_back(w);
                    }
                }
            }
            piece.sort_unstable();
            pieces.push(piece);
        }
        let m = pieces.len();
        if m == 0 {
            return Ok(()); // D is the whole component
        }
        if m > self.caps.max_components {
            return Err(EnumError::ComponentCapExceeded {
                anchor: self.anchor,
                count: m,
                cap: self.caps.max_components,
            });
        }

        // which pieces each d touches, and each piece's attachment to D
        let mut piece_index = BTreeMap::new();
        for (i, piece) in pieces.iter().enumerate() {
            for &v in piece {
                piece_index.insert(v, i);
            }
        }
        let mut d_adj: Vec<u64> = vec![0; d_set.len()];
        let mut attach: Vec<Vec<Vertex>> = vec![Vec::new(); m];
        for (di, &d) in d_set.iter().enumerate() {
            for &y in g.neighbors(d) {
                if let Some(&pi) = piece_index.get(&y) {
                    d_adj[di] |= 1 << pi;
                    attach[pi].push(y);
                }
            }
        }
        for a in &mut attach {
            a.sort_unstable();
            a.dedup();
        }

        let full: u64 = if m == 64 { u64::MAX } else { (1 << m) - 1 };
        'subsets: for s in 0..=full {
            if s == full {
                continue; // complement would be empty
            }
            // each d needs a neighbor in some unchosen piece
            if d_adj.iter().any(|&adj| (adj & !s & full) == 0) {
                continue;
            }
            if self.mode == FilterMode::IvAndOv {
                // ∂_ov = attachments of unchosen pieces; everything must sit
                // within diameter k of D and of each other
                let mut ov: Vec<Vertex> = Vec::new();
                for (pi, a) in attach.iter().enumerate() {
                    if s & (1 << pi) == 0 {
                        ov.extend_from_slice(a);
                    }
                }
                ov.sort_unstable();
                ov.dedup();
                for (i, &u) in ov.iter().enumerate() {
                    for &v in &ov[i + 1..] {
                        if !self.dist_ok(u, v) {
                            continue 'subsets;
                        }
                    }
                    for &d in d_set {
                        if !self.dist_ok(u, d) {
                            continue 'subsets;
                        }
                    }
                }
            }
            let mut side: Vec<Vertex> = d_set.to_vec();
            for (pi, piece) in pieces.iter().enumerate() {
                if s & (1 << pi) != 0 {
                    side.extend_from_slice(piece);
                }
            }
            side.sort_unstable();
            self.sides.insert((self.comp, side));
            if self.sides.len() > self.caps.max_cuts {
                return Err(EnumError::CutCapExceeded {
                    cap: self.caps.max_cuts,
                });
            }
        }
        Ok(())
    }
}

/// Four-corner nestedness test; cuts on different components are nested by
/// convention.
pub fn is_nested(a: &Cut, b: &Cut) -> bool {
    if a.component != b.component {
        return true;
    }
    let inter = sorted_intersection_size(&a.side, &b.side);
    inter == 0
        || a.side.len() == inter
        || b.side.len() == inter
        || a.side.len() + b.side.len() - inter == a.component_size as usize
}

fn sorted_intersection_size(a: &[Vertex], b: &[Vertex]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// A cutset closed under complementation and pairwise nested, with the
/// complement involution and a canonical orientation of each pair.
#[derive(Debug, Clone)]
pub struct Treeset {
    cutset: Cutset,
    pair: Vec<usize>,
    canonical: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TreesetViolation {
    MissingComplement { index: usize },
    NotNested { a: usize, b: usize },
}

impl Treeset {
    pub fn cuts(&self) -> &Cutset {
        &self.cutset
    }

    pub fn len(&self) -> usize {
        self.cutset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cutset.is_empty()
    }

    /// Index of the complement of cut `i`.
    pub fn complement_of(&self, i: usize) -> usize {
        self.pair[i]
    }

    pub fn is_canonical(&self, i: usize) -> bool {
        self.canonical[i]
    }

    /// Complement pairs as (canonical index, complement index), in canonical
    /// cut order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .filter(|&i| self.canonical[i])
            .map(|i| (i, self.pair[i]))
            .collect()
    }

    pub fn empty() -> Treeset {
        Treeset {
            cutset: Cutset::default(),
            pair: Vec::new(),
            canonical: Vec::new(),
        }
    }
}

/// Checks complement-closure and pairwise nestedness, returning the treeset
/// with its involution or the first violation. Finite separation is
/// automatic on finite graphs and asserted by construction.
pub fn validate_treeset(g: &Graph, cs: &Cutset) -> Result<Treeset, TreesetViolation> {
    let comps = components(g);
    let mut pair = vec![usize::MAX; cs.len()];
    for (i, c) in cs.iter().enumerate() {
        if pair[i] != usize::MAX {
            continue;
        }
        let comp_side = c.complement_side(&comps);
        match cs.position_of(c.component, &comp_side) {
            Some(j) => {
                pair[i] = j;
                pair[j] = i;
            }
            None => return Err(TreesetViolation::MissingComplement { index: i }),
        }
    }

    // pairwise nestedness over bitmasks of the sides
    let words = g.vertex_count().div_ceil(64);
    let masks: Vec<Vec<u64>> = cs
        .iter()
        .map(|c| {
            let mut m = vec![0u64; words];
            for &v in c.side() {
                m[v as usize / 64] |= 1 << (v % 64);
            }
            m
        })
        .collect();
    for i in 0..cs.len() {
        let a = &cs.cuts()[i];
        for j in i + 1..cs.len() {
            let b = &cs.cuts()[j];
            if a.component != b.component {
                continue;
            }
            let inter: usize = masks[i]
                .iter()
                .zip(&masks[j])
                .map(|(x, y)| (x & y).count_ones() as usize)
                .sum();
            let nested = inter == 0
                || inter == a.side.len()
                || inter == b.side.len()
                || a.side.len() + b.side.len() - inter == a.component_size as usize;
            if !nested {
                return Err(TreesetViolation::NotNested { a: i, b: j });
            }
        }
    }

    let canonical = canonical_flags(cs, &pair);
    Ok(Treeset {
        cutset: cs.clone(),
        pair,
        canonical,
    })
}

fn canonical_flags(cs: &Cutset, pair: &[usize]) -> Vec<bool> {
    let mut canonical = vec![false; cs.len()];
    for (i, c) in cs.iter().enumerate() {
        if i > pair[i] {
            continue;
        }
        let anchor = c.canonical_anchor();
        if c.contains(anchor) {
            canonical[i] = true;
        } else {
            canonical[pair[i]] = true;
        }
    }
    canonical
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("cutset is not closed under complementation (cut {0})")]
    NotComplementClosed(usize),
}

/// Splits a complement-closed cutset into nested treesets by greedy coloring
/// of the conflict graph on complement-pair representatives, in ascending
/// canonical cut order. Uses at most (max conflict degree + 1) colors.
pub fn partition_into_treesets(g: &Graph, cs: &Cutset) -> Result<Vec<Treeset>, PartitionError> {
    let comps = components(g);
    let mut pair = vec![usize::MAX; cs.len()];
    for (i, c) in cs.iter().enumerate() {
        if pair[i] != usize::MAX {
            continue;
        }
        let comp_side = c.complement_side(&comps);
        match cs.position_of(c.component, &comp_side) {
            Some(j) => {
                pair[i] = j;
                pair[j] = i;
            }
            None => return Err(PartitionError::NotComplementClosed(i)),
        }
    }
    let canonical = canonical_flags(cs, &pair);
    // representatives in ascending (component, side) order; cs is sorted
    let reps: Vec<usize> = (0..cs.len()).filter(|&i| canonical[i]).collect();

    let mut color = vec![usize::MAX; reps.len()];
    for (ri, &i) in reps.iter().enumerate() {
        let mut used: BTreeSet<usize> = BTreeSet::new();
        for (rj, &j) in reps.iter().enumerate().take(ri) {
            if !is_nested(&cs.cuts()[i], &cs.cuts()[j]) {
                used.insert(color[rj]);
            }
        }
        color[ri] = (0..).find(|c| !used.contains(c)).unwrap();
    }
    let classes = color.iter().max().map_or(0, |&m| m + 1);

    let mut out = Vec::with_capacity(classes);
    for cl in 0..classes {
        let mut cuts = Vec::new();
        for (ri, &i) in reps.iter().enumerate() {
            if color[ri] == cl {
                cuts.push(cs.cuts()[i].clone());
                cuts.push(cs.cuts()[pair[i]].clone());
            }
        }
        let part = Cutset::from_cuts(cuts);
        let ts = validate_treeset(g, &part)
            .expect("same-colored representatives are pairwise nested by construction");
        out.push(ts);
    }
    Ok(out)
}

/// The cuts of `cs` containing `x` and not `y`.
pub fn separating_cuts(cs: &Cutset, x: Vertex, y: Vertex) -> Cutset {
    Cutset::from_cuts(
        cs.iter()
            .filter(|c| c.contains(x) && !c.contains(y))
            .cloned()
            .collect(),
    )
}

/// |{C ∈ cs : x ∈ ∂_iv C}|.
pub fn cut_census_at_vertex(cs: &Cutset, x: Vertex) -> usize {
    cs.iter()
        .filter(|c| c.inner_boundary().binary_search(&x).is_ok())
        .count()
}

/// Pulls a cutset on X back along a collapse map λ: Y → X, starring out
/// preimages that are empty or not a proper subset of a single component of
/// `g_y`. Boundaries are recomputed in `g_y`.
pub fn pullback_cutset(collapse: &[Vertex], cs: &Cutset, g_y: &Graph) -> Cutset {
    let comps_y = components(g_y);
    let mut cuts = Vec::new();
    for c in cs {
        let mut pre: Vec<Vertex> = (0..collapse.len() as Vertex)
            .filter(|&y| c.contains(collapse[y as usize]))
            .collect();
        pre.sort_unstable();
        if pre.is_empty() {
            continue;
        }
        let comp = comps_y.class_of(pre[0]);
        if pre.iter().any(|&v| comps_y.class_of(v) != comp)
            || pre.len() == comps_y.members[comp as usize].len()
        {
            continue;
        }
        cuts.push(make_cut(g_y, &comps_y, pre).expect("starred preimage is a valid cut"));
    }
    Cutset::from_cuts(cuts)
}

/// Restriction 𝒞|_H*: intersects every cut with every E_H-class and keeps
/// the nonempty proper pieces, with boundaries computed in `h`.
pub fn restrict_cutset(cs: &Cutset, h: &Graph) -> Cutset {
    let comps_h = components(h);
    let mut cuts = Vec::new();
    for c in cs {
        let mut by_class: BTreeMap<u32, Vec<Vertex>> = BTreeMap::new();
        for &v in c.side() {
            by_class.entry(comps_h.class_of(v)).or_default().push(v);
        }
        for (cl, verts) in by_class {
            if verts.len() == comps_h.members[cl as usize].len() {
                continue;
            }
            cuts.push(make_cut(h, &comps_h, verts).expect("class piece is a valid cut"));
        }
    }
    Cutset::from_cuts(cuts)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeEdgeCutError {
    #[error("T is not acyclic")]
    NotAcyclic,
    #[error("T and H do not partition the graph's edges")]
    NotPartition,
    #[error("edge ({0}, {1}) lies on a cycle: no unique side")]
    NotUnique(Vertex, Vertex),
}

/// For each oriented tree edge t = (a, b), the unique cut with
/// ∂_oe C = {t}: the vertices reaching `a` without crossing t. Both
/// orientations of every T-edge are keyed.
pub fn tree_edge_cuts(
    gp: &Graph,
    t_edges: &[(Vertex, Vertex)],
    h_edges: &[(Vertex, Vertex)],
) -> Result<BTreeMap<(Vertex, Vertex), Cut>, TreeEdgeCutError> {
    let n = gp.vertex_count();
    let canon = |(a, b): (Vertex, Vertex)| if a < b { (a, b) } else { (b, a) };
    let t_graph = Graph::from_edges(n, t_edges).map_err(|_| TreeEdgeCutError::NotPartition)?;
    if !crate::graph::is_acyclic(&t_graph) {
        return Err(TreeEdgeCutError::NotAcyclic);
    }
    let mut all: BTreeSet<(Vertex, Vertex)> = gp.edges().into_iter().collect();
    for &e in t_edges.iter().chain(h_edges.iter()) {
        if !all.remove(&canon(e)) {
            return Err(TreeEdgeCutError::NotPartition);
        }
    }
    if !all.is_empty() {
        return Err(TreeEdgeCutError::NotPartition);
    }

    let comps = components(gp);
    let mut out = BTreeMap::new();
    for &(a, b) in t_edges {
        let (a, b) = canon((a, b));
        // BFS from a in gp minus the edge {a,b}
        let mut seen = vec![false; n];
        seen[a as usize] = true;
        let mut queue = VecDeque::from([a]);
        let mut side = vec![a];
        while let Some(u) = queue.pop_front() {
            for &w in gp.neighbors(u) {
                if (u, w) == (a, b) || (u, w) == (b, a) {
                    continue;
                }
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    side.push(w);
                    queue.push_back(w);
                }
            }
        }
        if seen[b as usize] {
            return Err(TreeEdgeCutError::NotUnique(a, b));
        }
        side.sort_unstable();
        let cut_a = make_cut(gp, &comps, side).expect("bridge side is a valid cut");
        let side_b = cut_a.complement_side(&comps);
        let cut_b = make_cut(gp, &comps, side_b).expect("bridge complement is a valid cut");
        out.insert((a, b), cut_a);
        out.insert((b, a), cut_b);
    }
    Ok(out)
}

/// Reconstructs a side from its outgoing edge boundary: the components of
/// the graph minus those edges that contain the edges' source endpoints.
/// A cut is determined by ∂_oe; this is the uniqueness check.
pub fn side_from_outgoing_edges(g: &Graph, oe: &[(Vertex, Vertex)]) -> Vec<Vertex> {
    let n = g.vertex_count();
    let removed: BTreeSet<(Vertex, Vertex)> = oe
        .iter()
        .flat_map(|&(a, b)| [(a, b), (b, a)])
        .collect();
    let mut seen = vec![false; n];
    let mut side = Vec::new();
    let mut queue = VecDeque::new();
    for &(a, _) in oe {
        if !seen[a as usize] {
            seen[a as usize] = true;
            side.push(a);
            queue.push_back(a);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if removed.contains(&(u, w)) || seen[w as usize] {
                continue;
            }
            seen[w as usize] = true;
            side.push(w);
            queue.push_back(w);
        }
    }
    side.sort_unstable();
    side
}
