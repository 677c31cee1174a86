//! Cut structure of finite bounded-degree graphs: enumeration of cuts with
//! bounded boundary diameter, nested treesets and their structure trees,
//! free-product decomposition into an acyclic part and a one-ended-at-scale
//! remainder, and tree approximation of quasi-trees — each step certified
//! against independent brute-force oracles.

pub mod cuts;
pub mod decompose;
pub mod graph;
pub mod oracles;
pub mod structure_tree;

pub use cuts::{
    cut_census_at_vertex, cut_from_side, enumerate_cuts, is_nested, partition_into_treesets,
    pullback_cutset, restrict_cutset, separating_cuts, tree_edge_cuts, validate_treeset, Cut,
    Cutset, EnumCaps, FilterMode, Treeset,
};
pub use decompose::{
    accessibility_pipeline, contract, free_intersection_check, one_endedness_modulus, split,
    spanning_forest_of_classes, subdivide, treeify, Decomposition, ModulusEntry, PipelineOptions,
    PipelineResult, SubdivisionResult, Transport, TreeifyResult,
};
pub use graph::{
    ball, components, is_acyclic, lipschitz_constant, metric_diameter, power_graph,
    quasi_isometry_constants, ExtNat, Graph, QiConstants, QiGrid, Vertex,
};
pub use structure_tree::{build_structure_tree, validate_structure_tree, StructureTree};
