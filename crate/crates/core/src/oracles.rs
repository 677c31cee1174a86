//! Deliberately naive brute-force ground truth for the fast paths: subset
//! scans and depth-first word search sharing nothing with them beyond the
//! `Graph` type.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::cuts::{Cutset, FilterMode, Treeset};
use crate::graph::{components, Graph, Vertex};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("component with {0} vertices exceeds the brute-force cap {1}")]
    ComponentTooLarge(usize, usize),
    #[error("word search bounds exceeded: {0} vertices (max 12), max_len {1} (max 24)")]
    WordBoundsExceeded(usize, usize),
}

pub const BRUTE_CUTS_DEFAULT_CAP: usize = 18;

/// Enumerates every nonempty proper subset of each component and keeps those
/// passing the diameter filter. Set-equal to `enumerate_cuts` by definition
/// of a cut.
pub fn brute_cuts(g: &Graph, k: u32, mode: FilterMode) -> Result<Cutset, OracleError> {
    brute_cuts_capped(g, k, mode, BRUTE_CUTS_DEFAULT_CAP)
}

/// `brute_cuts` with an explicit per-component size cap (2^size subsets are
/// scanned).
pub fn brute_cuts_capped(
    g: &Graph,
    k: u32,
    mode: FilterMode,
    cap: usize,
) -> Result<Cutset, OracleError> {
    let comps = components(g);
    let mut cuts = Vec::new();
    for members in &comps.members {
        let s = members.len();
        if s > cap {
            return Err(OracleError::ComponentTooLarge(s, cap));
        }
        if s < 2 {
            continue;
        }

        // local adjacency and pairwise ambient distances (paths between
        // members of a component never leave it)
        let mut adjm = vec![0u32; s];
        for (i, &u) in members.iter().enumerate() {
            for &w in g.neighbors(u) {
                if let Ok(j) = members.binary_search(&w) {
                    adjm[i] |= 1 << j;
                }
            }
        }
        let mut dist = vec![vec![u32::MAX; s]; s];
        for (i, &u) in members.iter().enumerate() {
            let d = g.distances_from(u);
            for (j, &w) in members.iter().enumerate() {
                dist[i][j] = d[w as usize].expect("same component");
            }
        }
        // near_k[i]: members within distance k of member i
        let near_k: Vec<u32> = (0..s)
            .map(|i| {
                let mut m = 0u32;
                for j in 0..s {
                    if dist[i][j] <= k {
                        m |= 1 << j;
                    }
                }
                m
            })
            .collect();

        let full: u32 = if s == 32 { u32::MAX } else { (1 << s) - 1 };
        'masks: for mask in 1..full {
            let mut iv = 0u32;
            let mut ov = 0u32;
            for i in 0..s {
                let bit = 1 << i;
                if mask & bit != 0 {
                    if adjm[i] & !mask & full != 0 {
                        iv |= bit;
                    }
                } else if adjm[i] & mask != 0 {
                    ov |= bit;
                }
            }
            let filter_set = match mode {
                FilterMode::IvOnly => iv,
                FilterMode::IvAndOv => iv | ov,
            };
            // cheap necessary test against the lowest member, then the full
            // pairwise scan
            let b0 = filter_set.trailing_zeros() as usize;
            if filter_set & !near_k[b0] != 0 {
                continue;
            }
            let mut rest = filter_set;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if filter_set & !near_k[i] != 0 {
                    continue 'masks;
                }
            }
            let side: Vec<Vertex> = (0..s)
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| members[i])
                .collect();
            cuts.push(crate::cuts::cut_from_side(g, &side).expect("subset of a component"));
        }
    }
    Ok(Cutset::from_cuts(cuts))
}

/// A violating alternating word: x_0, x_1, ..., x_{2n} with nontrivial
/// E_T/E_H steps and x_0 = x_{2n}.
pub type Word = Vec<Vertex>;

/// Depth-first search for an alternating E_T/E_H sequence returning to its
/// start; `max_len` bounds the number of steps 2n. Returns the witness or
/// None.
pub fn brute_alternating_words(
    n_vertices: usize,
    t_edges: &[(Vertex, Vertex)],
    h_edges: &[(Vertex, Vertex)],
    max_len: usize,
) -> Result<Option<Word>, OracleError> {
    if n_vertices > 12 || max_len > 24 {
        return Err(OracleError::WordBoundsExceeded(n_vertices, max_len));
    }
    let t_class = class_ids(n_vertices, t_edges);
    let h_class = class_ids(n_vertices, h_edges);

    // word[0] = start; steps alternate T, H, T, H, ...; a violation closes
    // after an H step with even positive length
    fn dfs(
        word: &mut Word,
        t_class: &[u32],
        h_class: &[u32],
        max_len: usize,
        n: usize,
    ) -> bool {
        let len = word.len() - 1;
        let start = word[0];
        let last = *word.last().unwrap();
        if len >= 2 && len % 2 == 0 && last == start {
            return true;
        }
        if len == max_len {
            return false;
        }
        let class: &[u32] = if len % 2 == 0 { t_class } else { h_class };
        for y in 0..n as Vertex {
            if y != last && class[y as usize] == class[last as usize] {
                word.push(y);
                if dfs(word, t_class, h_class, max_len, n) {
                    return true;
                }
                word.pop();
            }
        }
        false
    }

    for start in 0..n_vertices as Vertex {
        let mut word = vec![start];
        if dfs(&mut word, &t_class, &h_class, max_len, n_vertices) {
            return Ok(Some(word));
        }
    }
    Ok(None)
}

fn class_ids(n: usize, edges: &[(Vertex, Vertex)]) -> Vec<u32> {
    let g = Graph::from_edges(n, edges).expect("edge set on n vertices");
    components(&g).id
}

/// |{C ∈ ts : x ∈ C, y ∉ C}| by direct filter; must equal the structure-tree
/// distance between ρ(x) and ρ(y).
pub fn brute_separation_count(ts: &Treeset, x: Vertex, y: Vertex) -> usize {
    ts.cuts()
        .iter()
        .filter(|c| c.contains(x) && !c.contains(y))
        .count()
}

/// All distinct sides of a cutset, for set comparisons in tests.
pub fn side_set(cs: &Cutset) -> BTreeSet<(u32, Vec<Vertex>)> {
    cs.iter()
        .map(|c| (c.component(), c.side().to_vec()))
        .collect()
}
