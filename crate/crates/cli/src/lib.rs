//! Command implementations behind the `qpoint` binary.
//!
//! Every command writes its report to the supplied writer and, when an
//! output directory is given, stores its artifacts there together with a
//! `manifest.json` describing the run.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use qpoint_core::collections::enumerate_adequate;
use qpoint_core::degeneration::{self, forced_solutions, last_column_normalization, DegNode};
use qpoint_core::point_variety::{components, good_triples, ideal_generators};
use qpoint_core::realize::{realize, RealizationResult};
use qpoint_core::{Collection, QMatrix, TripleSet};

#[derive(Debug, Parser)]
#[command(name = "qpoint", version, about = "Point varieties of quantum polynomial algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Emit JSON instead of the text report.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads for parallel scans (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Directory receiving artifacts and a run manifest.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Point variety of a defining matrix.
    Pts {
        /// Matrix JSON file.
        matrix: PathBuf,
    },
    /// Adequate collections or degeneration nodes, up to relabeling.
    Enumerate(EnumerateArgs),
    /// Degeneration graph.
    Graph {
        n: usize,
        /// Write the DOT graph to this file.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        /// Allow n = 5.
        #[arg(long)]
        long: bool,
    },
    /// Build a matrix whose point variety misses exactly the given planes.
    Realize(RealizeArgs),
    /// Label-0 nodes of the degeneration graph.
    Sinks {
        n: usize,
        #[arg(long)]
        long: bool,
    },
    /// Solve b_t = 1 over a required good set.
    Forced(ForcedArgs),
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    pub n: usize,
    #[arg(long, conflicts_with = "nodes", required_unless_present = "nodes")]
    pub adequate: bool,
    #[arg(long)]
    pub nodes: bool,
    /// Allow n = 5 in node mode.
    #[arg(long)]
    pub long: bool,
}

#[derive(Debug, Args)]
pub struct RealizeArgs {
    /// Collection JSON file `{"n": .., "triples": [[i,j,k], ..]}`.
    #[arg(required_unless_present = "class", conflicts_with = "class")]
    pub collection: Option<PathBuf>,
    /// Orbit class `N INDEX` from the adequate catalog.
    #[arg(long, num_args = 2, value_names = ["N", "INDEX"])]
    pub class: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct ForcedArgs {
    /// Required good set, in the collection JSON format.
    pub good: PathBuf,
    /// Pin q_ij = 1; repeatable, written `i,j`.
    #[arg(long = "pin", value_parser = parse_pair)]
    pub pins: Vec<(usize, usize)>,
    /// Pin every q_in = 1 for i < n.
    #[arg(long)]
    pub last_column: bool,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected i,j, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("not adequate: {0}")]
    NotAdequate(String),
    #[error("realization failed: {0}")]
    Realization(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::NotAdequate(_) => 4,
            CliError::Realization(_) => 5,
        }
    }
}

impl From<qpoint_core::Error> for CliError {
    fn from(e: qpoint_core::Error) -> Self {
        use qpoint_core::Error as E;
        match e {
            E::NotAdequate => CliError::NotAdequate(e.to_string()),
            E::Verification(_) | E::Overflow => CliError::Invariant(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Record of one invocation, enough to rerun it.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub inputs: Vec<PathBuf>,
    pub determinism: &'static str,
    pub outputs: Vec<PathBuf>,
    pub versions: serde_json::Value,
}

impl RunManifest {
    fn new(inputs: Vec<PathBuf>) -> Self {
        RunManifest {
            command: std::env::args().collect(),
            inputs,
            determinism: "no randomness; generators are named sequentially, so reruns are byte-identical",
            outputs: Vec::new(),
            versions: json!({
                "qpoint": env!("CARGO_PKG_VERSION"),
                "format": 1,
            }),
        }
    }
}

/// Collects artifacts for `--out`.
struct Artifacts {
    dir: Option<PathBuf>,
    manifest: RunManifest,
}

impl Artifacts {
    fn new(dir: Option<PathBuf>, inputs: Vec<PathBuf>) -> Self {
        Artifacts { dir, manifest: RunManifest::new(inputs) }
    }

    fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        if let Some(dir) = &self.dir {
            fs::create_dir_all(dir)?;
            let path = dir.join(name);
            fs::write(&path, contents)?;
            self.manifest.outputs.push(path);
        }
        Ok(())
    }

    fn write_to(&mut self, path: &Path, contents: &str) -> CliResult<()> {
        fs::write(path, contents)?;
        self.manifest.outputs.push(path.to_path_buf());
        Ok(())
    }

    fn finish(self) -> CliResult<()> {
        if let Some(dir) = &self.dir {
            fs::create_dir_all(dir)?;
            let text = serde_json::to_string_pretty(&self.manifest)?;
            fs::write(dir.join("manifest.json"), text + "\n")?;
        }
        Ok(())
    }
}

/// Runs one parsed invocation, writing the report to `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let mut report = String::new();
    let inputs = match &cli.command {
        Command::Pts { matrix } => vec![matrix.clone()],
        Command::Realize(RealizeArgs { collection: Some(p), .. }) => vec![p.clone()],
        Command::Forced(args) => vec![args.good.clone()],
        _ => Vec::new(),
    };
    let mut artifacts = Artifacts::new(cli.out.clone(), inputs);
    let outcome = match &cli.command {
        Command::Pts { matrix } => cmd_pts(&read_matrix(matrix)?, cli.json, &mut report),
        Command::Enumerate(args) => cmd_enumerate(args, cli.json, &mut report, &mut artifacts),
        Command::Graph { n, dot, long } => cmd_graph(*n, dot.as_deref(), *long, cli.json, &mut report, &mut artifacts),
        Command::Realize(args) => cmd_realize(args, cli.json, &mut report, &mut artifacts),
        Command::Sinks { n, long } => cmd_sinks(*n, *long, cli.json, &mut report),
        Command::Forced(args) => cmd_forced(args, cli.json, &mut report, &mut artifacts),
    };
    stdout.write_all(report.as_bytes())?;
    outcome?;
    artifacts.finish()
}

pub fn read_matrix(path: &Path) -> CliResult<QMatrix> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(QMatrix::from_json(&text)?)
}

pub fn read_triples(path: &Path) -> CliResult<TripleSet> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn type_string(ty: &[usize]) -> String {
    let parts: Vec<String> = ty.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(","))
}

fn monomial(indices: &[usize]) -> String {
    let vars: Vec<String> = indices.iter().map(|i| format!("u{i}")).collect();
    vars.join("*")
}

pub fn cmd_pts(q: &QMatrix, as_json: bool, out: &mut String) -> CliResult<()> {
    let good = good_triples(q);
    let config = components(&good);
    config.check(&good).map_err(|e| CliError::Invariant(e.to_string()))?;
    let ideal = ideal_generators(&good);
    if as_json {
        let value = json!({
            "n": q.n(),
            "good_triples": good.to_vec(),
            "components": config.components(),
            "type": config.type_vector(),
            "ideal": ideal,
        });
        writeln!(out, "{}", serde_json::to_string(&value)?).ok();
        return Ok(());
    }
    writeln!(out, "good triples: {good}").ok();
    if config.is_whole_space() {
        writeln!(out, "point variety = P^{}", q.n()).ok();
    } else {
        writeln!(out, "point variety = {config}").ok();
    }
    writeln!(out, "type: {}", type_string(config.type_vector())).ok();
    let gens: Vec<String> = ideal.iter().map(|t| monomial(&t.indices())).collect();
    if gens.is_empty() {
        writeln!(out, "ideal: (0)").ok();
    } else {
        writeln!(out, "ideal: ({})", gens.join(", ")).ok();
    }
    Ok(())
}

/// Names the flag that lifts the node budget.
fn long_hint(n: usize, long: bool) -> impl Fn(qpoint_core::Error) -> CliError {
    move |e| match e {
        qpoint_core::Error::DimensionTooLarge { .. } if n == 5 && !long => {
            CliError::Input(format!("{e}; pass --long for n = 5"))
        }
        other => other.into(),
    }
}

fn node_record(node: &DegNode) -> serde_json::Value {
    serde_json::to_value(node).expect("node serializes")
}

fn cmd_enumerate(args: &EnumerateArgs, as_json: bool, out: &mut String, artifacts: &mut Artifacts) -> CliResult<()> {
    let n = args.n;
    let mut lines = String::new();
    let summary;
    if args.nodes {
        let nodes = degeneration::enumerate_nodes(n, args.long).map_err(long_hint(n, args.long))?;
        for node in &nodes {
            writeln!(lines, "{}", node_record(node)).ok();
        }
        let closed: usize = nodes.iter().map(|v| v.orbit_size).sum();
        summary = format!("nodes={} closed_sets={closed}", nodes.len());
        artifacts.write(&format!("nodes-p{n}.jsonl"), &lines)?;
    } else {
        let catalog = enumerate_adequate(n)?;
        for entry in &catalog.entries {
            writeln!(lines, "{}", serde_json::to_string(entry)?).ok();
        }
        summary = format!("total={} orbits={}", catalog.total, catalog.num_orbits());
        artifacts.write(&format!("adequate-p{n}.jsonl"), &lines)?;
    }
    if as_json {
        out.push_str(&lines);
    } else {
        writeln!(out, "{summary}").ok();
    }
    Ok(())
}

fn cmd_graph(
    n: usize,
    dot: Option<&Path>,
    long: bool,
    as_json: bool,
    out: &mut String,
    artifacts: &mut Artifacts,
) -> CliResult<()> {
    let graph = degeneration::build_graph(n, long).map_err(long_hint(n, long))?;
    if !graph.is_acyclic() {
        return Err(CliError::Invariant("degeneration graph has a cycle".into()));
    }
    let dot_text = graph.to_dot();
    let json_text = graph.to_json() + "\n";
    artifacts.write(&format!("graph-p{n}.dot"), &dot_text)?;
    artifacts.write(&format!("graph-p{n}.json"), &json_text)?;
    if let Some(path) = dot {
        artifacts.write_to(path, &dot_text)?;
    }
    if as_json {
        out.push_str(&json_text);
    } else if dot.is_some() {
        writeln!(out, "nodes={} arrows={}", graph.nodes.len(), graph.arrows.len()).ok();
    } else {
        out.push_str(&dot_text);
    }
    Ok(())
}

fn realize_target(args: &RealizeArgs) -> CliResult<Collection> {
    match (&args.collection, &args.class) {
        (Some(path), _) => Ok(Collection::new(read_triples(path)?)),
        (None, Some(class)) => {
            let (n, index) = (class[0], class[1]);
            let catalog = enumerate_adequate(n)?;
            catalog
                .entries
                .get(index)
                .map(|e| e.representative)
                .ok_or_else(|| CliError::Input(format!("class {index} out of range: {} classes for n = {n}", catalog.num_orbits())))
        }
        (None, None) => Err(CliError::Input("need a collection file or --class".into())),
    }
}

pub fn realization_json(r: &RealizationResult) -> serde_json::Value {
    json!({
        "n": r.target.n(),
        "target": r.target.triples().to_vec(),
        "achieved": r.achieved.triples().to_vec(),
        "success": r.success,
        "method": r.method,
        "matrix": r.matrix.to_file(),
    })
}

fn cmd_realize(args: &RealizeArgs, as_json: bool, out: &mut String, artifacts: &mut Artifacts) -> CliResult<()> {
    let target = realize_target(args)?;
    if !target.is_adequate() {
        return Err(CliError::NotAdequate(format!("{}", target.triples())));
    }
    let result = realize(&target)?;
    let matrix_json = result.matrix.to_json();
    artifacts.write("matrix.json", &(matrix_json.clone() + "\n"))?;
    if as_json {
        writeln!(out, "{}", serde_json::to_string(&realization_json(&result))?).ok();
    } else {
        writeln!(out, "target:   {}", result.target.triples()).ok();
        writeln!(out, "achieved: {}", result.achieved.triples()).ok();
        writeln!(out, "method: {}", serde_json::to_value(result.method)?.as_str().unwrap_or("?")).ok();
        writeln!(out, "verdict: {}", if result.success { "success" } else { "FAILURE" }).ok();
        writeln!(out, "{matrix_json}").ok();
    }
    if result.success {
        Ok(())
    } else {
        let extra = result.achieved.triples().difference(result.target.triples());
        let missing = result.target.triples().difference(result.achieved.triples());
        Err(CliError::Realization(format!("achieved differs from target; extra {extra}, missing {missing}")))
    }
}

fn cmd_sinks(n: usize, long: bool, as_json: bool, out: &mut String) -> CliResult<()> {
    let sinks = degeneration::sinks(n, long).map_err(long_hint(n, long))?;
    if as_json {
        let records: Vec<_> = sinks.iter().map(node_record).collect();
        writeln!(out, "{}", serde_json::to_string(&records)?).ok();
        return Ok(());
    }
    for node in &sinks {
        writeln!(out, "{} {}", node.caption(), node.closed_set).ok();
    }
    writeln!(out, "sinks={}", sinks.len()).ok();
    Ok(())
}

fn cmd_forced(args: &ForcedArgs, as_json: bool, out: &mut String, artifacts: &mut Artifacts) -> CliResult<()> {
    let good = read_triples(&args.good)?;
    let mut pins = args.pins.clone();
    if args.last_column {
        pins.extend(last_column_normalization(good.n()));
    }
    pins.sort_unstable();
    pins.dedup();
    let solutions = forced_solutions(&good, &pins)?;
    let files: Vec<_> = solutions.solutions.iter().map(|q| q.to_file()).collect();
    let value = json!({
        "free_dimension": solutions.free_dimension,
        "torsion_orders": solutions.torsion_orders,
        "solutions": files,
    });
    artifacts.write("solutions.json", &(serde_json::to_string_pretty(&value)? + "\n"))?;
    if as_json {
        writeln!(out, "{}", serde_json::to_string(&value)?).ok();
        return Ok(());
    }
    writeln!(
        out,
        "free_dimension={} torsion={:?} solutions={}",
        solutions.free_dimension,
        solutions.torsion_orders,
        solutions.solutions.len()
    )
    .ok();
    for q in &solutions.solutions {
        let n = q.n();
        let entries: Vec<String> = (0..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .map(|(i, j)| format!("q{i}{j}={}", q.upper(i, j)))
            .collect();
        writeln!(out, "{}", entries.join(" ")).ok();
    }
    Ok(())
}
