//! GraphDocument JSON (the single source format) and DOT output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use quasitree_core::graph::{Edge, Graph, GraphError};
use quasitree_core::structure_tree::StructureTree;

/// The on-disk graph format: vertex count and edge pairs with u < v.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub n: usize,
    pub edges: Vec<[u32; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metadata: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("edge [{0}, {1}] is not ordered u < v")]
    UnorderedEdge(u32, u32),
    #[error("duplicate edge [{0}, {1}]")]
    DuplicateEdge(u32, u32),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Parses a GraphDocument, enforcing 0 <= u < v < n and no duplicates.
pub fn parse_graph(text: &str) -> Result<(Graph, GraphDocument), IoError> {
    let doc: GraphDocument = serde_json::from_str(text)?;
    let mut seen = std::collections::BTreeSet::new();
    for &[u, v] in &doc.edges {
        if u >= v {
            return Err(IoError::UnorderedEdge(u, v));
        }
        if !seen.insert((u, v)) {
            return Err(IoError::DuplicateEdge(u, v));
        }
    }
    let edges: Vec<Edge> = doc.edges.iter().map(|&[u, v]| (u, v)).collect();
    let graph = Graph::from_edges(doc.n, &edges)?;
    Ok((graph, doc))
}

/// Emits the canonical document: edges sorted with u < v, pretty JSON with a
/// trailing newline.
pub fn emit_graph(g: &Graph, name: Option<&str>, metadata: Option<&BTreeMap<String, String>>) -> String {
    let doc = GraphDocument {
        n: g.vertex_count(),
        edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        name: name.map(str::to_owned),
        metadata: metadata.cloned(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("document serializes");
    out.push('\n');
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DotError {
    #[error("edge ({0}, {1}) appears in both classes")]
    ClassOverlap(u32, u32),
}

/// Edge classes for DOT styling: the acyclic part and the remainder.
pub struct EdgeClasses<'a> {
    pub t_edges: &'a [Edge],
    pub h_edges: &'a [Edge],
}

/// DOT text with class-colored edges, and ρ labels when a structure tree is
/// supplied. Edges in neither class render thin gray.
pub fn emit_dot(
    g: &Graph,
    classes: Option<&EdgeClasses<'_>>,
    tree: Option<&StructureTree>,
) -> Result<String, DotError> {
    use std::fmt::Write;

    let mut t_set = std::collections::BTreeSet::new();
    let mut h_set = std::collections::BTreeSet::new();
    if let Some(cl) = classes {
        for &(u, v) in cl.t_edges {
            t_set.insert((u.min(v), u.max(v)));
        }
        for &(u, v) in cl.h_edges {
            let e = (u.min(v), u.max(v));
            if t_set.contains(&e) {
                return Err(DotError::ClassOverlap(e.0, e.1));
            }
            h_set.insert(e);
        }
    }

    let mut out = String::new();
    writeln!(out, "graph {{").unwrap();
    writeln!(out, "  node [shape=circle, fontsize=10];").unwrap();
    for v in 0..g.vertex_count() as u32 {
        match tree {
            Some(st) => writeln!(out, "  {v} [label=\"{v}\\nρ{}\"];", st.rho_of(v)).unwrap(),
            None => writeln!(out, "  {v};").unwrap(),
        }
    }
    for (u, v) in g.edges() {
        let style = if t_set.contains(&(u, v)) {
            " [color=firebrick, penwidth=2]"
        } else if h_set.contains(&(u, v)) {
            " [color=steelblue, style=dashed]"
        } else if classes.is_some() {
            " [color=gray70]"
        } else {
            ""
        };
        writeln!(out, "  {u} -- {v}{style};").unwrap();
    }
    writeln!(out, "}}").unwrap();
    Ok(out)
}
