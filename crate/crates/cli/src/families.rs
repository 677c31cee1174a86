//! Deterministic graph family generators. The families witness the
//! dichotomies the toolkit measures: paths and ladders are multi-ended,
//! grids are one-ended, trees of triangles and free-product balls are
//! quasi-trees.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use quasitree_core::graph::{Edge, Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    Path { n: usize },
    Cycle { n: usize },
    Grid { rows: usize, cols: usize },
    Ladder { len: usize },
    Complete { n: usize },
    BalancedTree { branching: usize, depth: usize },
    SubdividedTree { branching: usize, depth: usize, times: usize },
    TreeOfTriangles { m: usize, seed: u64 },
    TreeWithChords { m: usize, seed: u64 },
    FreeProductBall { radius: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("unknown family '{0}'")]
    UnknownFamily(String),
    #[error("bad parameters '{0}' for family '{1}'")]
    BadParams(String, String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}

impl FamilySpec {
    /// Parses `name:params` (e.g. `path:4`, `grid:3x3`, `ladder:2x20`,
    /// `tree_of_triangles:5`). Randomized families take the seed given.
    pub fn parse(spec: &str, seed: u64) -> Result<FamilySpec, FamilyError> {
        let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
        let bad = || FamilyError::BadParams(params.to_string(), name.to_string());
        let nums: Vec<usize> = params
            .split('x')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let one = || nums.first().copied().ok_or_else(bad);
        match name {
            "path" => Ok(FamilySpec::Path { n: one()? }),
            "cycle" => Ok(FamilySpec::Cycle { n: one()? }),
            "grid" => match nums[..] {
                [r, c] => Ok(FamilySpec::Grid { rows: r, cols: c }),
                _ => Err(bad()),
            },
            "ladder" => match nums[..] {
                [len] => Ok(FamilySpec::Ladder { len }),
                [2, len] => Ok(FamilySpec::Ladder { len }),
                _ => Err(bad()),
            },
            "complete" => Ok(FamilySpec::Complete { n: one()? }),
            "balanced_tree" => match nums[..] {
                [b, d] => Ok(FamilySpec::BalancedTree {
                    branching: b,
                    depth: d,
                }),
                _ => Err(bad()),
            },
            "subdivided_tree" => match nums[..] {
                [b, d, s] => Ok(FamilySpec::SubdividedTree {
                    branching: b,
                    depth: d,
                    times: s,
                }),
                _ => Err(bad()),
            },
            "tree_of_triangles" => Ok(FamilySpec::TreeOfTriangles { m: one()?, seed }),
            "tree_with_chords" => Ok(FamilySpec::TreeWithChords { m: one()?, seed }),
            "free_product_ball" => Ok(FamilySpec::FreeProductBall { radius: one()? }),
            other => Err(FamilyError::UnknownFamily(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Path { .. } => "path",
            FamilySpec::Cycle { .. } => "cycle",
            FamilySpec::Grid { .. } => "grid",
            FamilySpec::Ladder { .. } => "ladder",
            FamilySpec::Complete { .. } => "complete",
            FamilySpec::BalancedTree { .. } => "balanced_tree",
            FamilySpec::SubdividedTree { .. } => "subdivided_tree",
            FamilySpec::TreeOfTriangles { .. } => "tree_of_triangles",
            FamilySpec::TreeWithChords { .. } => "tree_with_chords",
            FamilySpec::FreeProductBall { .. } => "free_product_ball",
        }
    }

    pub fn size_label(&self) -> String {
        match self {
            FamilySpec::Path { n } | FamilySpec::Cycle { n } | FamilySpec::Complete { n } => {
                n.to_string()
            }
            FamilySpec::Grid { rows, cols } => format!("{rows}x{cols}"),
            FamilySpec::Ladder { len } => format!("2x{len}"),
            FamilySpec::BalancedTree { branching, depth } => format!("{branching}x{depth}"),
            FamilySpec::SubdividedTree {
                branching,
                depth,
                times,
            } => format!("{branching}x{depth}x{times}"),
            FamilySpec::TreeOfTriangles { m, .. } | FamilySpec::TreeWithChords { m, .. } => {
                m.to_string()
            }
            FamilySpec::FreeProductBall { radius } => radius.to_string(),
        }
    }
}

/// Generates the graph of a family spec; deterministic given (spec, seed).
pub fn generate(spec: &FamilySpec) -> Result<Graph, FamilyError> {
    match *spec {
        FamilySpec::Path { n } => {
            require(n >= 1 && n <= 100_000, "path size")?;
            Ok(path(n))
        }
        FamilySpec::Cycle { n } => {
            require((3..=100_000).contains(&n), "cycle size")?;
            let mut edges: Vec<Edge> = (0..n as Vertex - 1).map(|i| (i, i + 1)).collect();
            edges.push((0, n as Vertex - 1));
            Ok(Graph::from_edges(n, &edges).unwrap())
        }
        FamilySpec::Grid { rows, cols } => {
            require(rows >= 1 && cols >= 1 && rows * cols <= 100_000, "grid size")?;
            Ok(grid(rows, cols))
        }
        FamilySpec::Ladder { len } => {
            require(len >= 1 && len <= 50_000, "ladder length")?;
            Ok(grid(2, len))
        }
        FamilySpec::Complete { n } => {
            require((1..=500).contains(&n), "complete size")?;
            let mut edges = Vec::new();
            for u in 0..n as Vertex {
                for v in u + 1..n as Vertex {
                    edges.push((u, v));
                }
            }
            Ok(Graph::from_edges(n, &edges).unwrap())
        }
        FamilySpec::BalancedTree { branching, depth } => {
            require(branching >= 1 && depth <= 12, "balanced tree shape")?;
            let edges = balanced_tree_edges(branching, depth)?;
            let n = edges.len() + 1;
            Ok(Graph::from_edges(n.max(1), &edges).unwrap())
        }
        FamilySpec::SubdividedTree {
            branching,
            depth,
            times,
        } => {
            require(branching >= 1 && depth <= 12 && times <= 16, "subdivided tree shape")?;
            let tree = balanced_tree_edges(branching, depth)?;
            let n = tree.len() + 1;
            Ok(subdivide_every_edge(n.max(1), &tree, times))
        }
        FamilySpec::TreeOfTriangles { m, seed } => {
            require((1..=10_000).contains(&m), "triangle count")?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // a degree-capped random tree keeps the family uniformly bounded:
            // each triangle hosts at most one bridge per corner
            let parents = random_bounded_tree(m, 2, &mut rng);
            let mut edges = Vec::new();
            for i in 0..m as Vertex {
                edges.push((3 * i, 3 * i + 1));
                edges.push((3 * i, 3 * i + 2));
                edges.push((3 * i + 1, 3 * i + 2));
            }
            // a child receives its parent at corner 0; the first child hangs
            // off corner 2 of the parent triangle, the second off the
            // parent's corner 0 when it is free (the root) and corner 1
            // otherwise
            let mut child_count = vec![0u32; m];
            for (child, &parent) in parents.iter().enumerate().skip(1) {
                let corner = match (child_count[parent], parent) {
                    (0, _) => 2,
                    (_, 0) => 0,
                    _ => 1,
                };
                child_count[parent] += 1;
                edges.push((3 * parent as Vertex + corner, 3 * child as Vertex));
            }
            Ok(Graph::from_edges(3 * m, &edges).unwrap())
        }
        FamilySpec::TreeWithChords { m, seed } => {
            require((1..=10_000).contains(&m), "node count")?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let parents = random_bounded_tree(m, 2, &mut rng);
            let mut edges: Vec<Edge> = parents
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &p)| (p as Vertex, i as Vertex))
                .collect();
            // chord to the grandparent with probability 1/2 closes a triangle
            for i in 1..m {
                let p = parents[i];
                if p == 0 {
                    continue;
                }
                let gp = parents[p];
                if rng.gen_bool(0.5) {
                    edges.push((gp as Vertex, i as Vertex));
                }
            }
            edges.sort_unstable();
            edges.dedup();
            Ok(Graph::from_edges(m, &edges).unwrap())
        }
        FamilySpec::FreeProductBall { radius } => {
            require(radius <= 16, "ball radius")?;
            Ok(free_product_ball(radius))
        }
    }
}

fn require(cond: bool, what: &str) -> Result<(), FamilyError> {
    if cond {
        Ok(())
    } else {
        Err(FamilyError::OutOfRange(what.to_string()))
    }
}

fn path(n: usize) -> Graph {
    let edges: Vec<Edge> = (0..n.saturating_sub(1) as Vertex).map(|i| (i, i + 1)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

fn grid(rows: usize, cols: usize) -> Graph {
    let at = |r: usize, c: usize| (r * cols + c) as Vertex;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((at(r, c), at(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((at(r, c), at(r + 1, c)));
            }
        }
    }
    Graph::from_edges(rows * cols, &edges).unwrap()
}

fn balanced_tree_edges(branching: usize, depth: usize) -> Result<Vec<Edge>, FamilyError> {
    let mut edges = Vec::new();
    let mut level: Vec<Vertex> = vec![0];
    let mut next = 1 as Vertex;
    for _ in 0..depth {
        let mut new_level = Vec::new();
        for &p in &level {
            for _ in 0..branching {
                require((next as usize) < 200_000, "balanced tree size")?;
                edges.push((p, next));
                new_level.push(next);
                next += 1;
            }
        }
        level = new_level;
    }
    Ok(edges)
}

fn subdivide_every_edge(n: usize, edges: &[Edge], times: usize) -> Graph {
    if times == 0 {
        return Graph::from_edges(n, edges).unwrap();
    }
    let mut out: Vec<Edge> = Vec::new();
    let mut next = n as Vertex;
    for &(u, v) in edges {
        let mut prev = u;
        for _ in 0..times {
            out.push((prev.min(next), prev.max(next)));
            prev = next;
            next += 1;
        }
        out.push((prev.min(v), prev.max(v)));
    }
    Graph::from_edges(next as usize, &out).unwrap()
}

fn random_recursive_tree(m: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut parents = vec![0usize; m];
    for i in 1..m {
        parents[i] = rng.gen_range(0..i);
    }
    parents
}

/// Random tree with at most `max_children` children per node.
fn random_bounded_tree(m: usize, max_children: u32, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut parents = vec![0usize; m];
    let mut children = vec![0u32; m];
    let mut eligible: Vec<usize> = vec![0];
    for i in 1..m {
        let slot = rng.gen_range(0..eligible.len());
        let p = eligible[slot];
        parents[i] = p;
        children[p] += 1;
        if children[p] >= max_children {
            eligible.swap_remove(slot);
        }
        eligible.push(i);
    }
    parents
}

/// Ball of the Cayley-style graph of (Z/2) ∗ (Z/3) with generating set
/// {a, b, b²}, truncated at the given radius. Elements are reduced
/// alternating words; vertex ids follow BFS discovery order with generator
/// order a, b, b².
fn free_product_ball(radius: usize) -> Graph {
    // tokens: 1 = a, 2 = b, 3 = b²
    type Word = Vec<u8>;
    fn mul(w: &Word, g: u8) -> Word {
        let mut out = w.clone();
        match (out.last().copied(), g) {
            (Some(1), 1) => {
                out.pop();
            }
            (Some(last), g) if last >= 2 && g >= 2 => {
                // b^x · b^y with x, y ∈ {1, 2}
                let exp = (last - 1 + g - 1) % 3;
                out.pop();
                if exp > 0 {
                    out.push(exp + 1);
                }
            }
            _ => out.push(g),
        }
        out
    }

    let mut ids: std::collections::HashMap<Word, Vertex> = Default::default();
    let mut order: Vec<Word> = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    let empty: Word = Vec::new();
    ids.insert(empty.clone(), 0);
    order.push(empty.clone());
    queue.push_back((empty, 0usize));
    while let Some((w, d)) = queue.pop_front() {
        if d == radius {
            continue;
        }
        for g in [1u8, 2, 3] {
            let w2 = mul(&w, g);
            if w2.len() > w.len() && !ids.contains_key(&w2) {
                ids.insert(w2.clone(), order.len() as Vertex);
                order.push(w2.clone());
                queue.push_back((w2, d + 1));
            }
        }
    }

    let mut edges: Vec<Edge> = Vec::new();
    for w in &order {
        let u = ids[w];
        for g in [1u8, 2, 3] {
            let w2 = mul(w, g);
            if let Some(&v) = ids.get(&w2) {
                if u < v {
                    edges.push((u, v));
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Graph::from_edges(order.len(), &edges).unwrap()
}
