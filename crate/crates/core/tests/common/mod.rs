use quasitree_core::{Graph, Vertex};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random connected graph: a degree-capped random recursive tree plus extra
/// edges respecting the cap.
pub fn random_connected(n: usize, max_deg: usize, extra: usize, rng: &mut ChaCha8Rng) -> Graph {
    assert!(n >= 1 && max_deg >= 2);
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    let mut deg = vec![0usize; n];
    for v in 1..n {
        let p = loop {
            let cand = rng.gen_range(0..v);
            if deg[cand] < max_deg {
                break cand;
            }
        };
        edges.push((p as Vertex, v as Vertex));
        deg[p] += 1;
        deg[v] += 1;
    }
    let mut g = Graph::from_edges(n, &edges).unwrap();
    let mut added = 0;
    let mut attempts = 0;
    while added < extra && attempts < 20 * (extra + 1) {
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || deg[u] >= max_deg || deg[v] >= max_deg {
            continue;
        }
        let (u, v) = (u.min(v) as Vertex, u.max(v) as Vertex);
        if g.has_edge(u, v) {
            continue;
        }
        edges.push((u, v));
        deg[u as usize] += 1;
        deg[v as usize] += 1;
        g = Graph::from_edges(n, &edges).unwrap();
        added += 1;
    }
    g
}

/// Random graph that may be disconnected: each edge of a degree-capped pool
/// kept with the given density.
pub fn random_graph(n: usize, max_deg: usize, density: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    let mut deg = vec![0usize; n];
    for u in 0..n {
        for v in u + 1..n {
            if deg[u] < max_deg && deg[v] < max_deg && rng.gen_bool(density) {
                edges.push((u as Vertex, v as Vertex));
                deg[u] += 1;
                deg[v] += 1;
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}
