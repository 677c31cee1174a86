use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use quasitree_cli::bench::run_bench;
use quasitree_cli::families::{generate, FamilySpec};
use quasitree_cli::io::{emit_dot, emit_graph, parse_graph, EdgeClasses};
use quasitree_core::cuts::{
    cut_census_at_vertex, enumerate_cuts, partition_into_treesets, Cutset, EnumCaps, FilterMode,
};
use quasitree_core::decompose::{
    accessibility_pipeline, modulus_profile, one_endedness_modulus, treeify, ModulusEntry,
    PipelineError, PipelineOptions, StageCertificate, Transport,
};
use quasitree_core::graph::{components, is_acyclic, metric_diameter, Graph, QiConstants};
use quasitree_core::oracles::{brute_alternating_words, brute_cuts, brute_separation_count, side_set};
use quasitree_core::structure_tree::{build_structure_tree, validate_structure_tree, Check};

/// Exit codes: 0 success, 1 violated certificate, 2 cap or parse errors.
const EXIT_CERT: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "quasitree",
    version,
    about = "Cut enumeration, structure trees and tree approximation for finite graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a family graph (or normalize a document) as GraphDocument JSON
    Gen {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Enumerate the cuts with bounded boundary diameter
    Cuts {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        scale: ScaleArgs,
        #[command(flatten)]
        caps: CapArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Partition the enumerated cutset into nested treesets
    Treesets {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        scale: ScaleArgs,
        #[command(flatten)]
        caps: CapArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build and validate the structure tree of each treeset
    #[command(name = "structure-tree")]
    StructureTree {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        scale: ScaleArgs,
        #[command(flatten)]
        caps: CapArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the iterated decomposition pipeline and report stage certificates
    Decompose {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        scale: ScaleArgs,
        #[command(flatten)]
        caps: CapArgs,
        #[arg(long, value_enum, default_value_t = TransportArg::Pullback)]
        transport: TransportArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Produce an acyclic graph on the input vertices Lipschitz equivalent to it
    Treeify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        scale: ScaleArgs,
        #[command(flatten)]
        caps: CapArgs,
        #[arg(long, value_enum, default_value_t = TransportArg::Pullback)]
        transport: TransportArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// The one-endedness modulus r at scale k
    Modulus {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        scale: ScaleArgs,
        #[command(flatten)]
        caps: CapArgs,
        /// Report the whole profile 0..=k instead of a single entry
        #[arg(long)]
        profile: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check the instance against the brute-force oracles
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        scale: ScaleArgs,
        #[command(flatten)]
        caps: CapArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sweep the family grid and emit CSV
    Bench {
        /// Seed for randomized families in the sweep
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        caps: CapArgs,
        /// Write 0 in the runtime column for byte-stable output
        #[arg(long)]
        zero_runtime: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct InputArgs {
    /// GraphDocument JSON file ("-" reads stdin)
    input: Option<PathBuf>,
    /// Generate the input from a family spec instead (e.g. path:4, grid:3x3,
    /// ladder:2x20, tree_of_triangles:5)
    #[arg(long, conflicts_with = "input")]
    family: Option<String>,
    /// Seed for randomized families
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ScaleArgs {
    /// Boundary-diameter bound k
    #[arg(short, default_value_t = 2)]
    k: u32,
    /// Boundary the diameter filter applies to
    #[arg(long, value_enum, default_value_t = FilterArg::Ivov)]
    filter: FilterArg,
}

#[derive(Args)]
struct CapArgs {
    /// Largest admissible ball around an enumeration anchor
    #[arg(long, default_value_t = 64)]
    max_ball: usize,
    /// Most components a candidate boundary may split off
    #[arg(long, default_value_t = 12)]
    max_components: usize,
    /// Most cuts an enumeration may produce
    #[arg(long, default_value_t = 200_000)]
    max_cuts: usize,
}

impl CapArgs {
    fn caps(&self) -> EnumCaps {
        EnumCaps {
            max_ball: self.max_ball,
            max_components: self.max_components,
            max_cuts: self.max_cuts,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write the result here instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write a DOT rendering
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    Iv,
    Ivov,
}

impl From<FilterArg> for FilterMode {
    fn from(f: FilterArg) -> FilterMode {
        match f {
            FilterArg::Iv => FilterMode::IvOnly,
            FilterArg::Ivov => FilterMode::IvAndOv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TransportArg {
    Pullback,
    Reenumerate,
}

impl From<TransportArg> for Transport {
    fn from(t: TransportArg) -> Transport {
        match t {
            TransportArg::Pullback => Transport::Pullback,
            TransportArg::Reenumerate => Transport::Reenumerate,
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl ToString) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }

    fn cert(message: impl ToString) -> Self {
        CliError {
            code: EXIT_CERT,
            message: message.to_string(),
        }
    }

    fn from_pipeline(e: PipelineError) -> Self {
        match e {
            PipelineError::Enumerate(_) | PipelineError::Partition(_) => CliError::input(e),
            other => CliError::cert(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn load_graph(input: &InputArgs) -> Result<(Graph, Option<String>), CliError> {
    if let Some(spec_text) = &input.family {
        let spec = FamilySpec::parse(spec_text, input.seed).map_err(CliError::input)?;
        let g = generate(&spec).map_err(CliError::input)?;
        return Ok((g, Some(format!("{}:{}", spec.name(), spec.size_label()))));
    }
    let Some(path) = &input.input else {
        return Err(CliError::input("provide an input file or --family"));
    };
    let text = if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(CliError::input)?;
        buf
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?
    };
    let (g, doc) = parse_graph(&text).map_err(CliError::input)?;
    Ok((g, doc.name))
}

fn write_out(out: &OutputArgs, content: &str) -> Result<(), CliError> {
    match &out.output {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn write_dot(out: &OutputArgs, dot: &str) -> Result<(), CliError> {
    if let Some(path) = &out.dot {
        std::fs::write(path, dot).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct CutView {
    side: Vec<u32>,
    inner_boundary: Vec<u32>,
    outer_boundary: Vec<u32>,
}

#[derive(Serialize)]
struct CutsOutput {
    n: usize,
    k: u32,
    filter: String,
    count: usize,
    cuts: Vec<CutView>,
}

#[derive(Serialize)]
struct TreesetView {
    pair_count: usize,
    sides: Vec<Vec<u32>>,
}

#[derive(Serialize)]
struct TreesetsOutput {
    k: u32,
    filter: String,
    cut_count: usize,
    treeset_count: usize,
    treesets: Vec<TreesetView>,
}

#[derive(Serialize)]
struct StructureTreeView {
    treeset: usize,
    vertex_count: usize,
    edge_count: usize,
    rho: Vec<usize>,
    all_checks_pass: bool,
    checks: Vec<Check>,
}

#[derive(Serialize)]
struct StageView {
    vertex_count: usize,
    r: u64,
    measured_lipschitz: u64,
    t_edge_count: usize,
    h_edge_count: usize,
    certificate: StageCertificate,
}

#[derive(Serialize)]
struct DecomposeOutput {
    k: u32,
    filter: String,
    cuts: usize,
    treesets: usize,
    stages: Vec<StageView>,
    final_vertex_count: usize,
    t_edge_count: usize,
    h_edge_count: usize,
    embedding_qi: QiConstants,
}

#[derive(Serialize)]
struct TreeifyOutput {
    k: u32,
    filter: String,
    acyclic: bool,
    lipschitz: u64,
    stages: usize,
    cuts: usize,
    certificate_pass: bool,
    tree_edges: Vec<[u32; 2]>,
}

#[derive(Serialize)]
struct ModulusOutput {
    filter: String,
    entries: Vec<ModulusEntry>,
}

#[derive(Serialize)]
struct VerifyCheck {
    name: &'static str,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerifyOutput {
    pass: bool,
    checks: Vec<VerifyCheck>,
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Gen { input, out } => {
            let (g, name) = load_graph(&input)?;
            let meta: Option<BTreeMap<String, String>> = input.family.as_ref().map(|_| {
                BTreeMap::from([("seed".to_string(), input.seed.to_string())])
            });
            write_out(&out, &emit_graph(&g, name.as_deref(), meta.as_ref()))?;
            write_dot(&out, &emit_dot(&g, None, None).map_err(CliError::input)?)?;
            Ok(0)
        }
        Command::Cuts {
            input,
            scale,
            caps,
            out,
        } => {
            let (g, _) = load_graph(&input)?;
            let mode: FilterMode = scale.filter.into();
            let cs = enumerate_cuts(&g, scale.k, mode, &caps.caps()).map_err(CliError::input)?;
            let output = CutsOutput {
                n: g.vertex_count(),
                k: scale.k,
                filter: mode.to_string(),
                count: cs.len(),
                cuts: cs
                    .iter()
                    .map(|c| CutView {
                        side: c.side().to_vec(),
                        inner_boundary: c.inner_boundary().to_vec(),
                        outer_boundary: c.outer_boundary().to_vec(),
                    })
                    .collect(),
            };
            write_out(&out, &to_json(&output))?;
            write_dot(&out, &emit_dot(&g, None, None).map_err(CliError::input)?)?;
            Ok(0)
        }
        Command::Treesets {
            input,
            scale,
            caps,
            out,
        } => {
            let (g, _) = load_graph(&input)?;
            let mode: FilterMode = scale.filter.into();
            let cs = enumerate_cuts(&g, scale.k, mode, &caps.caps()).map_err(CliError::input)?;
            let parts = partition_for_mode(&g, &cs, mode).map_err(CliError::input)?;
            let output = TreesetsOutput {
                k: scale.k,
                filter: mode.to_string(),
                cut_count: cs.len(),
                treeset_count: parts.len(),
                treesets: parts
                    .iter()
                    .map(|ts| TreesetView {
                        pair_count: ts.pairs().len(),
                        sides: ts.cuts().iter().map(|c| c.side().to_vec()).collect(),
                    })
                    .collect(),
            };
            write_out(&out, &to_json(&output))?;
            Ok(0)
        }
        Command::StructureTree {
            input,
            scale,
            caps,
            out,
        } => {
            let (g, _) = load_graph(&input)?;
            let mode: FilterMode = scale.filter.into();
            let cs = enumerate_cuts(&g, scale.k, mode, &caps.caps()).map_err(CliError::input)?;
            let parts = partition_for_mode(&g, &cs, mode).map_err(CliError::input)?;
            let mut views = Vec::new();
            let mut first_tree = None;
            let mut all_pass = true;
            for (i, ts) in parts.iter().enumerate() {
                let st = build_structure_tree(&g, ts);
                let report = validate_structure_tree(&st, &g, ts);
                all_pass &= report.all_pass();
                views.push(StructureTreeView {
                    treeset: i,
                    vertex_count: st.vertices.len(),
                    edge_count: st.edges.len(),
                    rho: st.rho.clone(),
                    all_checks_pass: report.all_pass(),
                    checks: report.checks,
                });
                if first_tree.is_none() {
                    first_tree = Some(st);
                }
            }
            write_out(&out, &to_json(&views))?;
            let dot = emit_dot(&g, None, first_tree.as_ref()).map_err(CliError::input)?;
            write_dot(&out, &dot)?;
            Ok(if all_pass { 0 } else { EXIT_CERT })
        }
        Command::Decompose {
            input,
            scale,
            caps,
            transport,
            out,
        } => {
            let (g, _) = load_graph(&input)?;
            let mode: FilterMode = scale.filter.into();
            let options = PipelineOptions {
                mode,
                caps: caps.caps(),
                transport: transport.into(),
                ..PipelineOptions::default()
            };
            let res =
                accessibility_pipeline(&g, scale.k, &options).map_err(CliError::from_pipeline)?;
            let output = DecomposeOutput {
                k: scale.k,
                filter: mode.to_string(),
                cuts: res.cuts_enumerated,
                treesets: res.treeset_count,
                stages: res
                    .stages
                    .iter()
                    .map(|s| StageView {
                        vertex_count: s.decomposition.host.vertex_count(),
                        r: s.decomposition.r,
                        measured_lipschitz: s.decomposition.measured_lipschitz,
                        t_edge_count: s.decomposition.t_edges.len(),
                        h_edge_count: s.decomposition.h_edges.len(),
                        certificate: s.certificate.clone(),
                    })
                    .collect(),
                final_vertex_count: res.final_graph.vertex_count(),
                t_edge_count: res.t_edges.len(),
                h_edge_count: res.h_edges.len(),
                embedding_qi: res.qi,
            };
            write_out(&out, &to_json(&output))?;
            let dot = emit_dot(
                &res.final_graph,
                Some(&EdgeClasses {
                    t_edges: &res.t_edges,
                    h_edges: &res.h_edges,
                }),
                None,
            )
            .map_err(CliError::input)?;
            write_dot(&out, &dot)?;
            Ok(0)
        }
        Command::Treeify {
            input,
            scale,
            caps,
            transport,
            out,
        } => {
            let (g, _) = load_graph(&input)?;
            let mode: FilterMode = scale.filter.into();
            let options = PipelineOptions {
                mode,
                caps: caps.caps(),
                transport: transport.into(),
                ..PipelineOptions::default()
            };
            let res = treeify(&g, scale.k, &options).map_err(CliError::from_pipeline)?;
            let output = TreeifyOutput {
                k: scale.k,
                filter: mode.to_string(),
                acyclic: is_acyclic(&res.tree),
                lipschitz: res.lipschitz,
                stages: res.pipeline.stages.len(),
                cuts: res.pipeline.cuts_enumerated,
                certificate_pass: res.certificate.all_pass(),
                tree_edges: res.tree.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            };
            write_out(&out, &to_json(&output))?;
            write_dot(&out, &emit_dot(&res.tree, None, None).map_err(CliError::input)?)?;
            Ok(if output.certificate_pass { 0 } else { EXIT_CERT })
        }
        Command::Modulus {
            input,
            scale,
            caps,
            profile,
            out,
        } => {
            let (g, _) = load_graph(&input)?;
            let mode: FilterMode = scale.filter.into();
            let entries = if profile {
                modulus_profile(&g, scale.k, mode, &caps.caps()).map_err(CliError::input)?
            } else {
                vec![one_endedness_modulus(&g, scale.k, mode, &caps.caps())
                    .map_err(CliError::input)?]
            };
            let output = ModulusOutput {
                filter: mode.to_string(),
                entries,
            };
            write_out(&out, &to_json(&output))?;
            Ok(0)
        }
        Command::Verify {
            input,
            scale,
            caps,
            out,
        } => {
            let (g, _) = load_graph(&input)?;
            let mode: FilterMode = scale.filter.into();
            let report = run_verify(&g, scale.k, mode, &caps.caps());
            let code = if report.pass { 0 } else { EXIT_CERT };
            write_out(&out, &to_json(&report))?;
            Ok(code)
        }
        Command::Bench {
            seed,
            caps,
            zero_runtime,
            out,
        } => {
            let csv = run_bench(seed, &caps.caps(), zero_runtime)
                .map_err(|e| CliError::input(e))?;
            write_out(&out, &csv)?;
            Ok(0)
        }
    }
}

/// The IvOnly filter yields a family that is not complement-closed; close it
/// before partitioning, since treesets are closed by definition.
fn partition_for_mode(
    g: &Graph,
    cs: &Cutset,
    mode: FilterMode,
) -> Result<Vec<quasitree_core::Treeset>, String> {
    let cs_closed = match mode {
        FilterMode::IvAndOv => cs.clone(),
        FilterMode::IvOnly => {
            let comps = components(g);
            let mut cuts: Vec<quasitree_core::Cut> = cs.iter().cloned().collect();
            for c in cs {
                let side = c.complement_side(&comps);
                if cs.position_of(c.component(), &side).is_none() {
                    cuts.push(
                        quasitree_core::cut_from_side(g, &side).map_err(|e| e.to_string())?,
                    );
                }
            }
            Cutset::from_cuts(cuts)
        }
    };
    partition_into_treesets(g, &cs_closed).map_err(|e| e.to_string())
}

fn run_verify(g: &Graph, k: u32, mode: FilterMode, caps: &EnumCaps) -> VerifyOutput {
    let mut checks: Vec<VerifyCheck> = Vec::new();
    let mut push = |name: &'static str, pass: bool, detail: String| {
        checks.push(VerifyCheck { name, pass, detail });
    };

    // cut enumeration against the subset-scan oracle
    let enumerated = enumerate_cuts(g, k, mode, caps);
    match &enumerated {
        Err(e) => push("oracle_cut_enumeration", false, format!("enumeration failed: {e}")),
        Ok(cs) => {
            let comp_cap = components(g).members.iter().map(Vec::len).max().unwrap_or(0);
            if comp_cap <= 18 {
                match brute_cuts(g, k, mode) {
                    Ok(brute) => {
                        let equal = side_set(cs) == side_set(&brute);
                        push(
                            "oracle_cut_enumeration",
                            equal,
                            format!("fast {} vs brute {}", cs.len(), brute.len()),
                        );
                    }
                    Err(e) => push("oracle_cut_enumeration", false, e.to_string()),
                }
            } else {
                push(
                    "oracle_cut_enumeration",
                    true,
                    format!("skipped: component of {comp_cap} vertices exceeds the oracle cap 18"),
                );
            }
        }
    }

    if let Ok(cs) = &enumerated {
        // census bound 2^(d^(r+2))
        let d = g.max_degree() as u64;
        let r_bound = cs
            .iter()
            .map(|c| metric_diameter(g, c.inner_boundary()).unwrap_fin())
            .max()
            .unwrap_or(0);
        let ok = match d.checked_pow(r_bound as u32 + 2) {
            Some(e) if e < 63 => (0..g.vertex_count() as u32)
                .all(|x| (cut_census_at_vertex(cs, x) as u64) <= (1u64 << e)),
            _ => true,
        };
        push("census_bound", ok, format!("d={d}, r={r_bound}"));

        // structure-tree theorems per treeset
        match partition_for_mode(g, cs, mode) {
            Err(e) => push("structure_tree_theorems", false, e),
            Ok(parts) => {
                let mut pass = true;
                let mut detail = format!("{} treesets", parts.len());
                'outer: for ts in &parts {
                    let st = build_structure_tree(g, ts);
                    let report = validate_structure_tree(&st, g, ts);
                    if !report.all_pass() {
                        pass = false;
                        detail = format!("{:?}", report.first_failure());
                        break;
                    }
                    let comps = components(g);
                    let n = g.vertex_count() as u32;
                    for x in 0..n {
                        for y in x + 1..n {
                            if !comps.same_class(x, y) {
                                continue;
                            }
                            let lhs = st.tree_distance(st.rho_of(x), st.rho_of(y)).unwrap();
                            if lhs as usize != brute_separation_count(ts, x, y) {
                                pass = false;
                                detail = format!("distance identity fails at ({x}, {y})");
                                break 'outer;
                            }
                        }
                    }
                }
                push("structure_tree_theorems", pass, detail);
            }
        }
    }

    // pipeline stage certificates and the word oracle on small hosts
    let options = PipelineOptions {
        mode,
        caps: *caps,
        ..PipelineOptions::default()
    };
    match accessibility_pipeline(g, k, &options) {
        Err(e) => push("pipeline_certificates", false, e.to_string()),
        Ok(res) => {
            push(
                "pipeline_certificates",
                true,
                format!("{} stages", res.stages.len()),
            );
            let mut words_ok = true;
            let mut scanned = 0;
            for stage in &res.stages {
                let host = &stage.decomposition.host;
                if host.vertex_count() > 12 {
                    continue;
                }
                scanned += 1;
                if let Ok(Some(w)) = brute_alternating_words(
                    host.vertex_count(),
                    &stage.decomposition.t_edges,
                    &stage.decomposition.h_edges,
                    8,
                ) {
                    words_ok = false;
                    push(
                        "alternating_words",
                        false,
                        format!("violating word {w:?}"),
                    );
                    break;
                }
            }
            if words_ok {
                push(
                    "alternating_words",
                    true,
                    format!("{scanned} stages within oracle range"),
                );
            }
        }
    }

    match treeify(g, k, &options) {
        Err(e) => push("treeify_certificate", false, e.to_string()),
        Ok(res) => push(
            "treeify_certificate",
            res.certificate.all_pass() && is_acyclic(&res.tree),
            format!("lipschitz {}", res.lipschitz),
        ),
    }

    let pass = checks.iter().all(|c| c.pass);
    VerifyOutput { pass, checks }
}
