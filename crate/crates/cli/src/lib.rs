//! Serialization, family generators and the benchmark harness behind the
//! `quasitree` binary.

pub mod bench;
pub mod families;
pub mod io;

pub use families::{generate, FamilySpec};
pub use io::{emit_dot, emit_graph, parse_graph, EdgeClasses, GraphDocument};
