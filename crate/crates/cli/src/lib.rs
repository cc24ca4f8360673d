//! Command-line front end: argument parsing, file handling and exit codes.
//!
//! Exit codes: 0 success, 1 infeasible or no solution, 2 usage or input error,
//! 3 internal invariant violation.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use netcurv_core::cycles::enumerate_cycles_capped;
use netcurv_core::eadp::{eadp_approx, eadp_exact, DEFAULT_EXACT_CAP};
use netcurv_core::gadgets::{self, GadgetInstance, GadgetOutput};
use netcurv_core::gromov::DEFAULT_GEODESIC_CAP;
use netcurv_core::random::{self, DEFAULT_SEED};
use netcurv_core::tadp::{curvature_gap, tadp_exact, tadp_greedy, DEFAULT_TADP_CAP};
use netcurv_core::{
    densest_subgraph, four_point_hyperbolicity, parse_edge_list, parse_ratio, ratio_string, slim_hyperbolicity,
    Aggregation, Direction, EadpInstance, EdgeSet, Error, GeodesicChoice, Graph, Measure, OutcomeKind, Rational64,
    ScanOptions, SlimOptions, SnapshotSeries, TadpInstance,
};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_SOLUTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "netcurv", version, about = "Curvature measures and curvature-based anomaly detection for networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Geometric curvature: nodes minus edges plus cycles of at most d nodes.
    Curvature(CurvatureArgs),
    /// Gromov hyperbolicity by slim triangles or the four-point condition.
    Hyperbolicity(HyperbolicityArgs),
    /// Densest induced subgraph (edges per node).
    Densest(DensestArgs),
    /// Fewest deletions from a removable edge set that push curvature past a target.
    Eadp(EadpArgs),
    /// Fewest deletions that bring G1's curvature to G2's.
    Tadp(TadpArgs),
    /// Generate a reduction gadget or a random graph.
    Gen(GenArgs),
    /// Curvature scan over a directory of snapshots.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MeasureName {
    Geometric,
    GromovSlim,
    #[value(name = "gromov-4pt")]
    Gromov4pt,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AggregationName {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DirectionName {
    Increase,
    Decrease,
}

#[derive(Args, Debug, Clone)]
struct MeasureArgs {
    #[arg(long, value_enum, default_value = "geometric")]
    measure: MeasureName,
    /// Largest cycle size counted by the geometric measure.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(3..))]
    d: u32,
    #[arg(long, value_enum, default_value = "max")]
    aggregation: AggregationName,
    #[arg(long, default_value_t = DEFAULT_GEODESIC_CAP)]
    geodesic_cap: usize,
    #[arg(long, default_value_t = netcurv_core::cycles::DEFAULT_CYCLE_CAP)]
    cycle_cap: usize,
}

impl MeasureArgs {
    fn measure(&self) -> Measure {
        match self.measure {
            MeasureName::Geometric => Measure::Geometric { d: self.d as usize },
            MeasureName::GromovSlim => Measure::GromovSlim(SlimOptions {
                aggregation: aggregation(self.aggregation),
                geodesic_cap: self.geodesic_cap,
                ..SlimOptions::default()
            }),
            MeasureName::Gromov4pt => Measure::GromovFourPoint,
        }
    }

    /// Fails early if the cycle catalog would exceed `--cycle-cap`.
    fn check_cycles(&self, g: &Graph) -> netcurv_core::Result<()> {
        if let MeasureName::Geometric = self.measure {
            enumerate_cycles_capped(g, self.d as usize, self.cycle_cap)?;
        }
        Ok(())
    }
}

fn aggregation(a: AggregationName) -> Aggregation {
    match a {
        AggregationName::Max => Aggregation::Max,
        AggregationName::Min => Aggregation::Min,
    }
}

#[derive(Args, Debug)]
struct CurvatureArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(3..))]
    d: u32,
    #[arg(long, default_value_t = netcurv_core::cycles::DEFAULT_CYCLE_CAP)]
    cycle_cap: usize,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Slim,
    FourPoint,
}

#[derive(Args, Debug)]
struct HyperbolicityArgs {
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "slim")]
    method: Method,
    #[arg(long, value_enum, default_value = "max")]
    aggregation: AggregationName,
    #[arg(long, default_value_t = DEFAULT_GEODESIC_CAP)]
    geodesic_cap: usize,
    /// Score each triple by its most favourable geodesics instead of the worst.
    #[arg(long)]
    best_geodesics: bool,
    /// Subdivide every edge first, which resolves half-integer values.
    #[arg(long)]
    subdivide: bool,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DensestArgs {
    graph: PathBuf,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(id = "solver", multiple = false)]
struct SolverArgs {
    #[arg(long, group = "solver")]
    exact: bool,
    #[arg(long, group = "solver")]
    approx: bool,
    #[arg(long, group = "solver")]
    greedy: bool,
}

#[derive(Args, Debug)]
struct EadpArgs {
    graph: PathBuf,
    /// Edge list of the removable edges.
    removable: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    gamma: String,
    #[arg(long, value_enum)]
    direction: DirectionName,
    #[arg(long, default_value = "1/5")]
    epsilon: String,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    measure: MeasureArgs,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TadpArgs {
    g1: PathBuf,
    g2: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    measure: MeasureArgs,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Construction {
    /// Triangle deletion to geometric TADP (d = 3).
    Tdp,
    /// Node cover to geometric TADP (needs --d >= 4).
    Mnc,
    /// Hamiltonian path on cubic graphs to slim-hyperbolicity TADP.
    CubicHp,
    /// Dense k-subgraph on degree-3 graphs to geometric EADP.
    Dks,
    /// Cycle-and-path blow-up producing degree-3 inputs.
    FeigeSeltser,
    /// Random G(n, p).
    Gnp,
    /// Random connected cubic graph.
    Cubic,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(value_enum)]
    construction: Construction,
    /// Input graph for the reduction gadgets.
    input: Option<PathBuf>,
    /// Output directory for the generated edge lists and the JSON sidecar.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(3..))]
    d: u32,
    #[arg(long)]
    v1: Option<String>,
    #[arg(long)]
    vn: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long, default_value_t = 1)]
    mu: usize,
    #[arg(long, default_value_t = 1)]
    alpha: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value = "1/2")]
    p: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ScanArgs {
    dir: PathBuf,
    /// Measures to compute; repeat the flag for several.
    #[arg(long, value_enum, default_value = "geometric")]
    measure: Vec<MeasureName>,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(3..))]
    d: u32,
    #[arg(long, value_enum, default_value = "max")]
    aggregation: AggregationName,
    #[arg(long, default_value_t = DEFAULT_GEODESIC_CAP)]
    geodesic_cap: usize,
    #[arg(long, default_value = "1")]
    threshold: String,
    #[arg(long)]
    explain: bool,
    #[arg(long)]
    fixed_nodes: bool,
    #[arg(long)]
    json: Option<PathBuf>,
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_internal() { EXIT_INTERNAL } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

type CliResult = std::result::Result<i32, Failure>;

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run_cli<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Curvature(a) => curvature(a, out),
        Command::Hyperbolicity(a) => hyperbolicity(a, out),
        Command::Densest(a) => densest(a, out),
        Command::Eadp(a) => eadp(a, out),
        Command::Tadp(a) => tadp(a, out),
        Command::Gen(a) => gen(a, out),
        Command::Scan(a) => scan(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_graph(path: &Path) -> netcurv_core::Result<Graph> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_edge_list(&text).map_err(|e| Error::InFile { path: path.to_path_buf(), source: Box::new(e) })
}

fn read_edge_set(path: &Path) -> netcurv_core::Result<EdgeSet> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    EdgeSet::parse(&text).map_err(|e| Error::InFile { path: path.to_path_buf(), source: Box::new(e) })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serialises");
    s.push('\n');
    s
}

fn write_file(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    std::fs::write(path, text).map_err(|source| Failure::from(Error::Io { path: path.to_path_buf(), source }))
}

fn emit(out: &mut dyn Write, text: &str) -> std::result::Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| usage(format!("cannot write output: {e}")))
}

/// Writes `value` to `--json` when given, else to stdout.
fn report(out: &mut dyn Write, json_path: &Option<PathBuf>, value: &Value) -> std::result::Result<(), Failure> {
    match json_path {
        Some(p) => write_file(p, &pretty(value)),
        None => emit(out, &pretty(value)),
    }
}

fn curvature(a: CurvatureArgs, out: &mut dyn Write) -> CliResult {
    let g = read_graph(&a.graph)?;
    let cat = enumerate_cycles_capped(&g, a.d as usize, a.cycle_cap)?;
    let value = netcurv_core::cycles::curvature_from_count(g.n(), g.m(), cat.count());
    emit(out, &format!("{value}\n"))?;
    if let Some(p) = &a.json {
        let v = json!({
            "measure": "geometric",
            "d": a.d,
            "nodes": g.n(),
            "edges": g.m(),
            "cycles": cat.count(),
            "curvature": value,
        });
        write_file(p, &pretty(&v))?;
    }
    Ok(EXIT_OK)
}

fn hyperbolicity(a: HyperbolicityArgs, out: &mut dyn Write) -> CliResult {
    let g = read_graph(&a.graph)?;
    let (value, detail) = match a.method {
        Method::FourPoint => {
            let v = four_point_hyperbolicity(&g)?;
            (v, json!({ "method": "four-point", "value": ratio_string(&v) }))
        }
        Method::Slim => {
            let opts = SlimOptions {
                aggregation: aggregation(a.aggregation),
                geodesics: if a.best_geodesics { GeodesicChoice::Best } else { GeodesicChoice::Worst },
                geodesic_cap: a.geodesic_cap,
                subdivide: a.subdivide,
            };
            let r = slim_hyperbolicity(&g, &opts)?;
            let mut v = serde_json::to_value(&r).expect("result serialises");
            v["method"] = json!("slim");
            (r.value, v)
        }
    };
    emit(out, &format!("{}\n", ratio_string(&value)))?;
    if let Some(p) = &a.json {
        write_file(p, &pretty(&detail))?;
    }
    Ok(EXIT_OK)
}

fn densest(a: DensestArgs, out: &mut dyn Write) -> CliResult {
    let g = read_graph(&a.graph)?;
    let d = densest_subgraph(&g)?;
    emit(out, &format!("{} {}\n", ratio_string(&d.density), d.nodes.join(" ")))?;
    if let Some(p) = &a.json {
        write_file(p, &pretty(&serde_json::to_value(&d).expect("result serialises")))?;
    }
    Ok(EXIT_OK)
}

fn parse_gamma(s: &str) -> std::result::Result<i64, Failure> {
    let r = parse_ratio(s)?;
    if !r.is_integer() {
        return Err(usage(format!("gamma must be an integer, got {s}")));
    }
    Ok(r.to_integer())
}

fn eadp(a: EadpArgs, out: &mut dyn Write) -> CliResult {
    let g = read_graph(&a.graph)?;
    let tilde = read_edge_set(&a.removable)?;
    let gamma = parse_gamma(&a.gamma)?;
    let direction = match a.direction {
        DirectionName::Increase => Direction::Increase,
        DirectionName::Decrease => Direction::Decrease,
    };
    if a.solver.greedy {
        return Err(usage("--greedy applies to tadp only; use --exact or --approx"));
    }
    a.measure.check_cycles(&g)?;
    let inst = EadpInstance::new(g, tilde, gamma, direction, a.measure.measure())?;
    let (value, kind) = if a.solver.approx {
        let eps = parse_ratio(&a.epsilon)?;
        let r = eadp_approx(&inst, eps)?;
        let kind = r.outcome.kind;
        (serde_json::to_value(&r).expect("report serialises"), kind)
    } else {
        let r = eadp_exact(&inst, DEFAULT_EXACT_CAP)?;
        let kind = r.kind;
        (json!({ "outcome": r }), kind)
    };
    let mut value = value;
    value["instance"] = json!({
        "direction": direction,
        "gamma": gamma,
        "measure": inst.measure().name(),
        "curvature": ratio_string(&inst.base_curvature()),
        "removable": inst.tilde().len(),
    });
    report(out, &a.json, &value)?;
    Ok(if kind == OutcomeKind::Infeasible { EXIT_NO_SOLUTION } else { EXIT_OK })
}

fn tadp(a: TadpArgs, out: &mut dyn Write) -> CliResult {
    let g1 = read_graph(&a.g1)?;
    let g2 = read_graph(&a.g2)?;
    if a.solver.approx {
        return Err(usage("--approx applies to eadp only; use --exact or --greedy"));
    }
    a.measure.check_cycles(&g1)?;
    let inst = TadpInstance::new(g1, g2, a.measure.measure())?;
    let outcome = if a.solver.greedy { tadp_greedy(&inst)? } else { tadp_exact(&inst, DEFAULT_TADP_CAP)? };
    let value = json!({
        "measure": inst.measure().name(),
        "curvature_g1": ratio_string(&inst.curvature_g1()),
        "curvature_g2": ratio_string(&inst.target()),
        "gap": ratio_string(&curvature_gap(&inst)),
        "removable": inst.removable_ids().len(),
        "outcome": outcome,
    });
    report(out, &a.json, &value)?;
    Ok(if outcome.found() { EXIT_OK } else { EXIT_NO_SOLUTION })
}

fn need<T: Clone>(v: &Option<T>, flag: &str) -> std::result::Result<T, Failure> {
    v.clone().ok_or_else(|| usage(format!("this construction needs {flag}")))
}

fn gadget_sidecar(o: &GadgetOutput) -> Value {
    json!({
        "construction": o.construction,
        "parameters": o.parameters,
        "expected_counts": o.expected_counts,
        "observed_counts": o.observed_counts,
        "discrepancies": o.discrepancies,
        "node_map": o.node_map,
    })
}

fn gen(a: GenArgs, out: &mut dyn Write) -> CliResult {
    std::fs::create_dir_all(&a.out).map_err(|source| Failure::from(Error::Io { path: a.out.clone(), source }))?;
    let mut files: BTreeMap<&str, String> = BTreeMap::new();
    let sidecar = match a.construction {
        Construction::Gnp | Construction::Cubic => {
            let n = need(&a.n, "--n")?;
            let mut rng = random::rng(a.seed);
            let g = match a.construction {
                Construction::Gnp => {
                    let p = parse_ratio(&a.p)?;
                    random::gnp(n, *p.numer() as f64 / *p.denom() as f64, &mut rng)?
                }
                _ => random::cubic(n, &mut rng)?,
            };
            files.insert("graph.edges", g.to_edge_list());
            json!({ "construction": format!("{:?}", a.construction).to_lowercase(), "n": n, "seed": a.seed })
        }
        _ => {
            let input = read_graph(&need(&a.input, "an input graph")?)?;
            let o = match a.construction {
                Construction::Tdp => gadgets::gen_tdp_tadp(&input)?,
                Construction::Mnc => gadgets::gen_mnc_tadp(&input, a.d as usize)?,
                Construction::CubicHp => {
                    gadgets::gen_cubic_hp_gromov(&input, &need(&a.v1, "--v1")?, &need(&a.vn, "--vn")?)?
                }
                Construction::Dks => gadgets::gen_dks_eadp(&input, need(&a.k, "--k")?, need(&a.t, "--t")?, a.mu)?,
                Construction::FeigeSeltser => gadgets::gen_feige_seltser(&input, a.alpha)?,
                Construction::Gnp | Construction::Cubic => unreachable!("handled above"),
            };
            match &o.instance {
                GadgetInstance::Tadp(t) => {
                    files.insert("g1.edges", t.g1().to_edge_list());
                    files.insert("g2.edges", t.g2().to_edge_list());
                }
                GadgetInstance::Eadp(e) => {
                    files.insert("graph.edges", e.graph().to_edge_list());
                    let removable: String = e.tilde().iter().map(|(x, y)| format!("{x} {y}\n")).collect();
                    files.insert("removable.edges", removable);
                }
                GadgetInstance::Graph(g) => {
                    files.insert("graph.edges", g.to_edge_list());
                }
            }
            if let Some(h) = o.auxiliary.get("H") {
                files.insert("h.edges", h.to_edge_list());
            }
            let mut s = gadget_sidecar(&o);
            if let GadgetInstance::Eadp(e) = &o.instance {
                s["gamma"] = json!(e.gamma());
            }
            s
        }
    };
    for (name, text) in &files {
        write_file(&a.out.join(name), text)?;
    }
    write_file(&a.out.join("gadget.json"), &pretty(&sidecar))?;
    let listing: Vec<&str> = files.keys().copied().chain(["gadget.json"]).collect();
    emit(out, &format!("wrote {} to {}\n", listing.join(", "), a.out.display()))?;
    Ok(EXIT_OK)
}

fn scan(a: ScanArgs, out: &mut dyn Write) -> CliResult {
    let series = SnapshotSeries::load_dir(&a.dir)?;
    if a.fixed_nodes {
        series.require_fixed_nodes()?;
    }
    let threshold: Rational64 = parse_ratio(&a.threshold)?;
    if threshold < Rational64::from(0) {
        return Err(usage("threshold must be non-negative"));
    }
    let mut measures = Vec::new();
    for m in &a.measure {
        let args = MeasureArgs {
            measure: *m,
            d: a.d,
            aggregation: a.aggregation,
            geodesic_cap: a.geodesic_cap,
            cycle_cap: netcurv_core::cycles::DEFAULT_CYCLE_CAP,
        };
        if !measures.contains(&args.measure()) {
            measures.push(args.measure());
        }
    }
    let opts = ScanOptions { measures, threshold, explain: a.explain, ..ScanOptions::default() };
    let report = netcurv_core::scan(&series, &opts)?;
    let text = report.to_json();
    match &a.json {
        Some(p) => {
            write_file(p, &text)?;
            let flagged = report.transitions.iter().filter(|t| t.flagged).count();
            emit(
                out,
                &format!(
                    "{} snapshots, {} transitions, {flagged} flagged\n",
                    report.snapshots.len(),
                    report.transitions.len()
                ),
            )?;
        }
        None => emit(out, &text)?,
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_to_exit_codes() {
        assert_eq!(Failure::from(Error::Internal("bad".into())).code, EXIT_INTERNAL);
        let nested = Error::InFile { path: "g.edges".into(), source: Box::new(Error::Internal("bad".into())) };
        assert_eq!(Failure::from(nested).code, EXIT_INTERNAL);
        assert_eq!(Failure::from(Error::InvalidParameter("x".into())).code, EXIT_USAGE);
    }
}
