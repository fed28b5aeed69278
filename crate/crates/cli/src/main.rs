//! `givental` — batch driver for the givental-core library.
//!
//! Exit codes: 0 success, 1 mismatch, 2 bad input, 3 caps too small.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use givental_core::givental::{required_table_caps, transform_table, RMatrix};
use givental_core::graphs::{enumerate_graphs, graph_sum, GraphCaps, GraphContext};
use givental_core::hierarchy::{verify_hierarchy, HierarchyReport, SpanRow};
use givental_core::inversion::{
    givental_inverse, inversion_table, invert_potential, verify_inversion_theorem, GiventalRoute,
};
use givental_core::io::{parse_potential, parse_rmatrix, PotentialInput};
use givental_core::rational::{factorial_r, format_rational};
use givental_core::series::{Caps, Monomial, TruncatedSeries, Var};
use givental_core::Error;

#[derive(Parser)]
#[command(
    name = "givental",
    version,
    about = "Exact Givental action, inversion and hierarchy checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply an R-matrix to the CohFT of a potential.
    Transform(TransformArgs),
    /// Check the inversion of a potential against its Givental form.
    Invert(InvertArgs),
    /// Compare transformed Hamiltonian densities with the LXZ formulas.
    Hierarchy(HierarchyArgs),
    /// Dump the stable graphs within the given bounds.
    Graphs(GraphsArgs),
}

#[derive(Args)]
struct Common {
    /// Report format.
    #[arg(long, value_enum, default_value = "text")]
    report: Report,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Report {
    Text,
    Structured,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum TransformRoute {
    Operator,
    Graphs,
    Both,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum InvertRoute {
    Coord,
    Givental,
    Both,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Engine {
    Graphs,
    Operator,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Compare {
    Lxz,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    rmatrix: PathBuf,
    /// Largest total degree of the output.
    #[arg(long)]
    cap: u32,
    /// Largest genus of the output.
    #[arg(long, default_value_t = 0)]
    genus_cap: u32,
    #[arg(long, value_enum, default_value = "operator")]
    route: TransformRoute,
    /// Also write the contributing graphs of every output coefficient here.
    #[arg(long)]
    emit_graphs: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct InvertArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    cap: u32,
    #[arg(long, value_enum, default_value = "both")]
    route: InvertRoute,
    /// How the Givental side is computed.
    #[arg(long, value_enum, default_value = "graphs")]
    engine: Engine,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct HierarchyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 2)]
    pmax: u32,
    #[arg(long)]
    cap: u32,
    #[arg(long, value_enum, default_value = "lxz")]
    compare: Compare,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GraphsArgs {
    #[arg(long, default_value_t = 3)]
    leaves: u32,
    #[arg(long, default_value_t = 3)]
    vertices: u32,
    #[arg(long, default_value_t = 2)]
    edges: u32,
    #[arg(long, default_value_t = 0)]
    genus: u32,
    /// Keep only stable graphs.
    #[arg(long)]
    stable: bool,
    #[command(flatten)]
    common: Common,
}

/// A finished report and whether its checks passed.
struct Outcome {
    text: String,
    passed: bool,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Caps(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapInsufficient(_) | Error::OutsideCaps(_) | Error::NonTerminating(_) => {
                Failure::Caps(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_potential(path: &Path) -> Result<PotentialInput, Failure> {
    let input = parse_potential(&read(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    if !input.potential.satisfies_wdvv()? {
        return Err(Failure::Input(format!(
            "{}: the potential does not satisfy WDVV",
            path.display()
        )));
    }
    Ok(input)
}

fn load_rmatrix(path: &Path) -> Result<RMatrix, Failure> {
    parse_rmatrix(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn positive(name: &str, v: u32) -> Result<(), Failure> {
    if v == 0 {
        return Err(Failure::Input(format!("--{name} must be positive")));
    }
    Ok(())
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Failure::Input(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn structured(v: Value) -> String {
    serde_json::to_string_pretty(&v).expect("json values serialize") + "\n"
}

fn series_json(s: &TruncatedSeries) -> Value {
    Value::Array(
        s.terms()
            .map(|(m, c)| json!({"monomial": m.to_string(), "coefficient": format_rational(c)}))
            .collect(),
    )
}

fn status(passed: bool) -> &'static str {
    if passed {
        "ok"
    } else {
        "mismatch"
    }
}

fn run_transform(a: &TransformArgs) -> Result<Outcome, Failure> {
    positive("cap", a.cap)?;
    let input = load_potential(&a.input)?;
    let r = load_rmatrix(&a.rmatrix)?;
    let n = input.potential.dimension();
    if r.dimension() != n {
        return Err(Failure::Input(format!(
            "R-matrix has dimension {} but the potential has {n}",
            r.dimension()
        )));
    }
    let caps = Caps::new(a.cap, a.genus_cap);
    let table = input.table(required_table_caps(&r, caps, a.genus_cap))?;
    let operator = match a.route {
        TransformRoute::Graphs => None,
        _ => Some(transform_table(&r, &table, caps)?),
    };
    let graphs = match a.route {
        TransformRoute::Operator => None,
        _ => Some(graph_sum(&table, &r, caps)?),
    };
    let mismatches: Vec<Monomial> = match (&operator, &graphs) {
        (Some(x), Some(y)) => {
            let mut ms: Vec<Monomial> =
                x.terms().chain(y.terms()).map(|(m, _)| m.clone()).collect();
            ms.sort();
            ms.dedup();
            ms.into_iter().filter(|m| x.get(m) != y.get(m)).collect()
        }
        _ => Vec::new(),
    };
    let out = operator.or(graphs).expect("some route ran");
    if let Some(path) = &a.emit_graphs {
        write_atomic(path, &graph_dump(&table, &r, &out)?)?;
    }
    // σ̃_k = k!·coefficient of (t²)^k/ħ: the two-dimensional normal form
    let sigmas: Vec<(u32, String)> = if n == 2 {
        (3..=a.cap)
            .map(|k| {
                let m = Monomial::from_factors(-1, &[(Var::primary(2), k)]);
                (k, format_rational(&(out.get(&m) * factorial_r(k))))
            })
            .collect()
    } else {
        Vec::new()
    };
    let passed = mismatches.is_empty();
    let route = match a.route {
        TransformRoute::Operator => "operator",
        TransformRoute::Graphs => "graphs",
        TransformRoute::Both => "both",
    };
    let text = match a.common.report {
        Report::Text => {
            let mut s = format!(
                "# transform n={n} degree_cap={} genus_cap={} route={route}\n",
                a.cap, a.genus_cap
            );
            for line in out.to_text().lines().skip(1) {
                s += line;
                s.push('\n');
            }
            for (k, v) in &sigmas {
                s += &format!("sigma~{k} = {v}\n");
            }
            for m in &mismatches {
                s += &format!("MISMATCH {m}\n");
            }
            s += &format!("status {}\n", status(passed));
            s
        }
        Report::Structured => structured(json!({
            "command": "transform",
            "dimension": n,
            "degree_cap": a.cap,
            "genus_cap": a.genus_cap,
            "route": route,
            "terms": series_json(&out),
            "sigmas": sigmas.iter().map(|(k, v)| json!({"k": k, "value": v})).collect::<Vec<_>>(),
            "mismatches": mismatches.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "status": status(passed),
        })),
    };
    Ok(Outcome { text, passed })
}

fn graph_dump(
    table: &givental_core::cohft::CorrelatorTable,
    r: &RMatrix,
    out: &TruncatedSeries,
) -> Result<String, Failure> {
    let monos: Vec<&Monomial> = out.terms().map(|(m, _)| m).collect();
    let zcap = monos
        .iter()
        .map(|m| GraphContext::zcap_for(m))
        .max()
        .unwrap_or(0);
    let ctx = GraphContext::new(table, r, zcap)?;
    let mut s = String::new();
    for m in monos {
        s += &format!("monomial {m} = {}\n", format_rational(&out.get(m)));
        for t in ctx.terms(m)? {
            s += &format!(
                "  1/{} * {} : {}\n",
                t.automorphisms,
                format_rational(&t.contribution),
                t.graph
            );
        }
    }
    Ok(s)
}

fn run_invert(a: &InvertArgs) -> Result<Outcome, Failure> {
    positive("cap", a.cap)?;
    let f = load_potential(&a.input)?.potential;
    let route = match a.engine {
        Engine::Graphs => GiventalRoute::Graphs,
        Engine::Operator => GiventalRoute::Operator,
    };
    let n = f.dimension();
    let single = |label: &str, s: &TruncatedSeries| -> Outcome {
        let text = match a.common.report {
            Report::Text => {
                let mut t = format!("# invert n={n} cap={} route={label}\n", a.cap);
                for line in s.to_text().lines().skip(1) {
                    t += line;
                    t.push('\n');
                }
                t
            }
            Report::Structured => structured(json!({
                "command": "invert",
                "dimension": n,
                "cap": a.cap,
                "route": label,
                "terms": series_json(s),
            })),
        };
        Outcome { text, passed: true }
    };
    match a.route {
        InvertRoute::Coord => Ok(single("coord", invert_potential(&f, a.cap)?.series())),
        InvertRoute::Givental => {
            let table = inversion_table(&f, a.cap)?;
            Ok(single("givental", &givental_inverse(&table, a.cap, route)?))
        }
        InvertRoute::Both => {
            let report = verify_inversion_theorem(&f, a.cap, route)?;
            let passed = report.all_equal();
            let text = match a.common.report {
                Report::Text => format!("{report}status {}\n", status(passed)),
                Report::Structured => structured(json!({
                    "command": "invert",
                    "dimension": n,
                    "cap": a.cap,
                    "route": "both",
                    "monomials": report.entries.len(),
                    "mismatches": report.mismatches().map(|e| json!({
                        "monomial": e.monomial.to_string(),
                        "coordinate": format_rational(&e.coordinate),
                        "givental": format_rational(&e.givental),
                    })).collect::<Vec<_>>(),
                    "status": status(passed),
                })),
            };
            Ok(Outcome { text, passed })
        }
    }
}

fn span_json(s: &givental_core::hierarchy::SpanComparison) -> Value {
    Value::Array(
        s.rows
            .iter()
            .map(|((a, p), row)| match row {
                SpanRow::Combination(c) => json!({
                    "alpha": a,
                    "p": p,
                    "combination": c.iter().map(|((b, q), x)| json!({
                        "alpha": b, "p": q, "coefficient": format_rational(x)
                    })).collect::<Vec<_>>(),
                }),
                SpanRow::Outside(v) => json!({
                    "alpha": a,
                    "p": p,
                    "residual": v.iter().map(|(m, x)| json!({
                        "monomial": m.to_string(), "coefficient": format_rational(x)
                    })).collect::<Vec<_>>(),
                }),
            })
            .collect(),
    )
}

fn hierarchy_json(r: &HierarchyReport) -> Value {
    let flags = |v: &[(u32, u32, bool)]| -> Value {
        Value::Array(
            v.iter()
                .map(|(a, p, ok)| json!({"alpha": a, "p": p, "ok": ok}))
                .collect(),
        )
    };
    json!({
        "command": "hierarchy",
        "dimension": r.dimension,
        "pmax": r.pmax,
        "cap": r.cap,
        "equal": flags(&r.middle),
        "first_order": flags(&r.first_order),
        "exp_closed_form": flags(&r.closed_form),
        "forward": span_json(&r.forward),
        "backward": span_json(&r.backward),
        "status": status(r.passed()),
    })
}

fn run_hierarchy(a: &HierarchyArgs) -> Result<Outcome, Failure> {
    positive("cap", a.cap)?;
    let Compare::Lxz = a.compare;
    let f = load_potential(&a.input)?.potential;
    let report = verify_hierarchy(&f, a.pmax, a.cap)?;
    let passed = report.passed();
    let text = match a.common.report {
        Report::Text => report.to_string(),
        Report::Structured => structured(hierarchy_json(&report)),
    };
    Ok(Outcome { text, passed })
}

fn run_graphs(a: &GraphsArgs) -> Result<Outcome, Failure> {
    let caps = GraphCaps {
        max_leaves: a.leaves,
        max_vertices: a.vertices,
        max_edges: a.edges,
        max_genus: a.genus,
        max_z: 0,
    };
    let graphs: Vec<_> = enumerate_graphs(&caps)
        .into_iter()
        .filter(|g| !a.stable || g.is_stable())
        .collect();
    let text = match a.common.report {
        Report::Text => {
            let mut s = format!("# graphs count={}\n", graphs.len());
            for g in &graphs {
                s += &format!("aut={} genus={} : {g}\n", g.automorphism_order(), g.genus());
            }
            s
        }
        Report::Structured => structured(json!({
            "command": "graphs",
            "graphs": graphs.iter().map(|g| json!({
                "graph": g.to_string(),
                "genus": g.genus(),
                "automorphisms": g.automorphism_order(),
            })).collect::<Vec<_>>(),
        })),
    };
    Ok(Outcome { text, passed: true })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("GIVENTAL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Failure::Input(format!("GIVENTAL_THREADS={v:?} is not a number")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| {
        let (outcome, output) = match &cli.command {
            Command::Transform(a) => (run_transform(a)?, &a.common.output),
            Command::Invert(a) => (run_invert(a)?, &a.common.output),
            Command::Hierarchy(a) => (run_hierarchy(a)?, &a.common.output),
            Command::Graphs(a) => (run_graphs(a)?, &a.common.output),
        };
        match output {
            Some(p) => write_atomic(p, &outcome.text)?,
            None => print!("{}", outcome.text),
        }
        Ok(outcome.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Caps(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
