//! The benchmark sweep: a fixed family grid, one CSV row per (instance, k).

use std::time::Instant;

use thiserror::Error;

use quasitree_core::cuts::{EnumCaps, FilterMode};
use quasitree_core::decompose::{one_endedness_modulus, treeify, PipelineOptions};

use crate::families::{generate, FamilyError, FamilySpec};

pub const CSV_HEADER: &str = "family,size,k,filter,modulus,treeify_lipschitz,stages,cuts,runtime_ms";

/// The fixed sweep: 24 instances × k ∈ {1, 2} = 48 rows.
pub fn default_sweep(seed: u64) -> Vec<FamilySpec> {
    let mut specs = Vec::new();
    for n in [8, 16, 32] {
        specs.push(FamilySpec::Path { n });
    }
    for n in [8, 16, 32] {
        specs.push(FamilySpec::Cycle { n });
    }
    for s in [4, 6, 8] {
        specs.push(FamilySpec::Grid { rows: s, cols: s });
    }
    for len in [8, 12, 16] {
        specs.push(FamilySpec::Ladder { len });
    }
    for n in [4, 6] {
        specs.push(FamilySpec::Complete { n });
    }
    specs.push(FamilySpec::BalancedTree {
        branching: 2,
        depth: 3,
    });
    specs.push(FamilySpec::BalancedTree {
        branching: 2,
        depth: 4,
    });
    specs.push(FamilySpec::SubdividedTree {
        branching: 2,
        depth: 3,
        times: 2,
    });
    for m in [2, 5, 10] {
        specs.push(FamilySpec::TreeOfTriangles { m, seed });
    }
    for m in [8, 16] {
        specs.push(FamilySpec::TreeWithChords { m, seed });
    }
    for radius in [4, 6] {
        specs.push(FamilySpec::FreeProductBall { radius });
    }
    specs
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("{family}:{size} k={k}: {message}")]
    Instance {
        family: &'static str,
        size: String,
        k: u32,
        message: String,
    },
}

/// Runs the sweep and renders the CSV. With `zero_runtime` the last column
/// is written as 0 so two runs with identical flags are byte-identical.
pub fn run_bench(seed: u64, caps: &EnumCaps, zero_runtime: bool) -> Result<String, BenchError> {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let mode = FilterMode::IvAndOv;
    for spec in default_sweep(seed) {
        let g = generate(&spec)?;
        for k in [1u32, 2] {
            let started = Instant::now();
            let options = PipelineOptions {
                mode,
                caps: *caps,
                ..PipelineOptions::default()
            };
            let modulus =
                one_endedness_modulus(&g, k, mode, caps).map_err(|e| BenchError::Instance {
                    family: spec.name(),
                    size: spec.size_label(),
                    k,
                    message: e.to_string(),
                })?;
            let res = treeify(&g, k, &options).map_err(|e| BenchError::Instance {
                family: spec.name(),
                size: spec.size_label(),
                k,
                message: e.to_string(),
            })?;
            let runtime_ms = if zero_runtime {
                0
            } else {
                started.elapsed().as_millis()
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                spec.name(),
                spec.size_label(),
                k,
                mode,
                modulus.r,
                res.lipschitz,
                res.pipeline.stages.len(),
                res.pipeline.cuts_enumerated,
                runtime_ms
            ));
        }
    }
    Ok(out)
}
