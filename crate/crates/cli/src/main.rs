//! `scattered-lab`: JSON reports on scattered linearized polynomials.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scattered_core::{
    arith, families, mrd, plane, scatter, selftest, stabilizer, standard_form, ElementFormat, Error, Fe,
    FieldSpec, FieldTower, LinearizedPoly, Result,
};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

const SCHEMA_VERSION: u32 = 1;
const FMT: ElementFormat = ElementFormat::Gk;

#[derive(Parser)]
#[command(name = "scattered-lab", version, about = "Scattered linearized polynomials over finite fields")]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "SCATTERED_LAB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Input {
    /// Field spec JSON; optional when the polynomial file carries a "field" key.
    #[arg(long, value_name = "FILE")]
    field: Option<PathBuf>,
    /// Polynomial JSON (may also be given positionally).
    #[arg(long = "poly", value_name = "FILE")]
    poly_flag: Option<PathBuf>,
    #[arg(value_name = "POLY")]
    poly: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run several analyses on one polynomial.
    Analyze {
        #[command(flatten)]
        input: Input,
        /// Comma-separated subset of scatter, stabilizer, standard-form, mrd, plane, equiv, families.
        #[arg(long, value_delimiter = ',', required = true)]
        tasks: Vec<String>,
        /// Second polynomial, for the equiv task.
        #[arg(long, value_name = "FILE")]
        other: Option<PathBuf>,
        /// Include the slopes of the linear set.
        #[arg(long)]
        emit_points: bool,
        /// Use the pairwise scatteredness test and exhaustive minimum distance.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = mrd::DEFAULT_EXACT_BOUND)]
        exact_mrd_bound: u64,
    },
    /// Stabilizer of U_f in GL(2, q^n).
    Stabilizer {
        #[command(flatten)]
        input: Input,
    },
    /// Standard form, conjugating matrix and (s, t).
    StandardForm {
        #[command(flatten)]
        input: Input,
    },
    /// GL- or ΓL-equivalence of two polynomials.
    Equiv {
        #[arg(long, value_name = "FILE")]
        field: Option<PathBuf>,
        f: PathBuf,
        g: PathBuf,
        /// Only look for GL-equivalence.
        #[arg(long)]
        gl: bool,
    },
    /// Minimum distance and idealizers of the code <x, f(x)>.
    Mrd {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = mrd::DEFAULT_EXACT_BOUND)]
        exact_mrd_bound: u64,
    },
    /// Translation plane analyses.
    Plane {
        #[command(subcommand)]
        action: PlaneCommand,
    },
    /// Known families of scattered polynomials.
    Families {
        #[command(subcommand)]
        action: FamiliesCommand,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Run a fast subset.
        #[arg(long)]
        quick: bool,
        /// Build this field first and report construction failures.
        #[arg(long, value_name = "FILE")]
        field: Option<PathBuf>,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Subcommand)]
enum PlaneCommand {
    /// Central collineations, H_f and the André witness.
    Analyze {
        #[command(flatten)]
        input: Input,
    },
    /// Spread axioms, kernel scalars and semilinear maps.
    Audit {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum FamiliesCommand {
    /// Build one family instance with its predicted stabilizer.
    Generate {
        /// 1 pseudoregulus, 2 Lunardon-Polverino, 3 half-degree, 4 trinomial, 5 psi.
        #[arg(long)]
        family: u8,
        #[arg(long)]
        q: u64,
        /// Extension degree; implied by t for family 5 and fixed to 6 for family 4.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 1)]
        s: usize,
        /// δ as "g^k", digits or an integer.
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        h: Option<String>,
        /// Search for the first valid δ.
        #[arg(long)]
        find_delta: bool,
        /// Search for the first valid h.
        #[arg(long)]
        find_h: bool,
        /// Selects the modulus among the irreducible polynomials.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Error::Parse(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
    })
}

fn field_from(doc: &Value) -> Option<&Value> {
    doc.get("field").or_else(|| doc.get("header").and_then(|h| h.get("field")))
}

fn tower_from_value(v: &Value) -> Result<FieldTower> {
    let spec: FieldSpec =
        serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("field spec: {e}")))?;
    FieldTower::from_spec(&spec)
}

fn poly_from(tw: &FieldTower, doc: &Value) -> Result<LinearizedPoly> {
    LinearizedPoly::from_json(tw, doc.get("poly").unwrap_or(doc))
}

fn load_tower(field: Option<&PathBuf>, docs: &[&Value]) -> Result<FieldTower> {
    match field {
        Some(path) => tower_from_value(&parse_json(path)?),
        None => docs
            .iter()
            .find_map(|d| field_from(d))
            .ok_or_else(|| Error::Parse("no field given: pass --field or add a \"field\" key".into()))
            .and_then(tower_from_value),
    }
}

fn load_input(input: &Input) -> Result<(FieldTower, LinearizedPoly)> {
    let path = input
        .poly_flag
        .as_ref()
        .or(input.poly.as_ref())
        .ok_or_else(|| Error::Parse("no polynomial file given".into()))?;
    let doc = parse_json(path)?;
    let tw = load_tower(input.field.as_ref(), &[&doc])?;
    let f = poly_from(&tw, &doc)?;
    Ok((tw, f))
}

fn header(tw: &FieldTower) -> Value {
    json!({
        "field": serde_json::to_value(tw.spec()).expect("serializable"),
        "q": tw.q(),
        "order": tw.order(),
        "generator": "g",
        "generator_digits": tw.to_json_digits(tw.generator()),
    })
}

fn report(tw: &FieldTower, command: &str, body: Value) -> Value {
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "header": header(tw),
    });
    if let (Value::Object(out), Value::Object(b)) = (&mut v, body) {
        out.extend(b);
    }
    v
}

fn sha_hex(v: &Value) -> String {
    let digest = Sha256::digest(v.to_string().as_bytes());
    format!("{digest:x}")[..16].to_string()
}

fn scatter_section(tw: &FieldTower, f: &LinearizedPoly, emit_points: bool, oracle: bool) -> Value {
    let ls = scatter::linear_set(tw, f);
    let mut v = ls.to_json(tw, emit_points);
    if oracle {
        v["scattered"] = json!(scatter::is_scattered_pairwise(tw, f));
        v["method"] = json!("pairwise");
    } else {
        v["method"] = json!("fiber-count");
    }
    v
}

fn stabilizer_section(tw: &FieldTower, f: &LinearizedPoly) -> Result<Value> {
    let mut v = stabilizer::analyze(tw, f)?.to_json(tw, FMT);
    let ls = scatter::linear_set(tw, f);
    v["f_hash"] = json!(sha_hex(&f.to_json(tw, ElementFormat::Digits)));
    v["linear_set_hash"] = json!(sha_hex(&ls.to_json(tw, true)));
    Ok(v)
}

fn mrd_section(tw: &FieldTower, f: &LinearizedPoly, oracle: bool, bound: u64) -> Result<Value> {
    let mut v = mrd::analyze(tw, f, bound, oracle)?.to_json();
    v["method"] = json!(if oracle { "exhaustive" } else { "projective-classes" });
    Ok(v)
}

fn equiv_section(tw: &FieldTower, f: &LinearizedPoly, g: &LinearizedPoly, gl: bool) -> Result<Value> {
    let eq = if gl { standard_form::gl_equivalent(tw, f, g)? } else { standard_form::gammal_equivalent(tw, f, g)? };
    Ok(eq.to_json(tw, FMT))
}

/// Catalog instances that can be built over this field, first valid parameters.
fn families_section(tw: &FieldTower) -> Value {
    let mut out = Vec::new();
    let mut push = |r: Result<families::FamilyInstance>| {
        if let Ok(inst) = r {
            out.push(inst.to_json(tw, FMT));
        }
    };
    push(families::pseudoregulus(tw, 1));
    if let Some(d) = families::lp_deltas(tw).next() {
        push(families::lunardon_polverino(tw, 1, d));
    }
    if matches!(tw.n(), 6 | 8) && tw.order() <= plane::MAX_PLANE_ORDER {
        push(families::find_half_degree(tw, 1));
    }
    if tw.n() == 6 {
        for d in families::trinomial_deltas(tw) {
            push(families::trinomial(tw, d));
        }
    }
    if tw.n().is_multiple_of(2) && tw.n() >= 6 {
        if let Some(h) = families::psi_hs(tw, tw.n() / 2).next() {
            push(families::psi(tw, h, tw.n() / 2, 1));
        }
    }
    json!(out)
}

fn error_json(e: &Error) -> Value {
    json!({"code": e.code(), "message": e.to_string()})
}

fn exit_for(e: &Error) -> u8 {
    if e.is_refusal() {
        2
    } else {
        1
    }
}

struct AnalyzeOptions<'a> {
    tasks: &'a [String],
    other: Option<&'a PathBuf>,
    emit_points: bool,
    oracle: bool,
    bound: u64,
}

/// Each task gets its own section; failed tasks carry an "error" object.
fn analyze(tw: &FieldTower, f: &LinearizedPoly, opts: &AnalyzeOptions) -> Result<(Value, u8)> {
    let tasks: Vec<&str> = opts.tasks.iter().map(|t| t.trim()).filter(|t| !t.is_empty()).collect();
    if tasks.is_empty() {
        return Err(Error::Parse("no tasks given".into()));
    }
    const KNOWN: [&str; 7] = ["scatter", "stabilizer", "standard-form", "mrd", "plane", "equiv", "families"];
    if let Some(bad) = tasks.iter().find(|t| !KNOWN.contains(t)) {
        return Err(Error::Parse(format!("unknown task {bad:?}")));
    }
    let mut body = json!({"poly": f.to_json(tw, FMT)["coeffs"], "tasks": tasks});
    let mut failures: Vec<Error> = Vec::new();
    for &task in &tasks {
        let section = match task {
            "scatter" => {
                let v = scatter_section(tw, f, opts.emit_points, opts.oracle);
                body["scattered"] = v["scattered"].clone();
                Ok(v)
            }
            "stabilizer" => stabilizer_section(tw, f),
            "standard-form" => standard_form::to_standard_form(tw, f).map(|r| r.to_json(tw, FMT)),
            "mrd" => mrd_section(tw, f, opts.oracle, opts.bound),
            "plane" => plane::analyze(tw, f, FMT),
            "equiv" => opts
                .other
                .ok_or_else(|| Error::Parse("the equiv task needs --other".into()))
                .and_then(|p| parse_json(p))
                .and_then(|doc| poly_from(tw, &doc))
                .and_then(|g| equiv_section(tw, f, &g, false)),
            _ => Ok(families_section(tw)),
        };
        body[task] = match section {
            Ok(v) => v,
            Err(e) => {
                let v = json!({"error": error_json(&e)});
                failures.push(e);
                v
            }
        };
    }
    let code = if failures.is_empty() {
        0
    } else if failures.iter().all(Error::is_refusal) {
        2
    } else {
        1
    };
    Ok((body, code))
}

fn parse_q(q: u64) -> Result<(u64, u32)> {
    match arith::factorize(q).as_slice() {
        [(p, e)] => Ok((*p, *e)),
        _ => Err(Error::BadParams(format!("q = {q} is not a prime power"))),
    }
}

struct GenerateArgs {
    family: u8,
    q: u64,
    n: Option<usize>,
    t: Option<usize>,
    s: usize,
    delta: Option<String>,
    h: Option<String>,
    find_delta: bool,
    find_h: bool,
    seed: u64,
}

fn parse_param(tw: &FieldTower, s: &str) -> Result<Fe> {
    let v = serde_json::from_str::<Value>(s).unwrap_or_else(|_| json!(s));
    tw.parse_element(&v)
}

fn generate(a: &GenerateArgs) -> Result<(FieldTower, Value)> {
    let (p, e) = parse_q(a.q)?;
    let n = match a.family {
        4 => a.n.unwrap_or(6),
        5 => a.n.or(a.t.map(|t| 2 * t)).ok_or_else(|| Error::BadParams("family 5 needs --t".into()))?,
        _ => a.n.ok_or_else(|| Error::BadParams("--n is required".into()))?,
    };
    let tw = FieldTower::with_seed(p, e, n, a.seed)?;
    let param = |name: &str, given: &Option<String>, find: bool, search: &mut dyn Iterator<Item = Fe>| {
        match (given, find) {
            (Some(s), _) => parse_param(&tw, s),
            (None, true) => search.next().ok_or_else(|| Error::BadParams(format!("no valid {name} found"))),
            (None, false) => Err(Error::BadParams(format!("pass --{name} or --find-{name}"))),
        }
    };
    let inst = match a.family {
        1 => families::pseudoregulus(&tw, a.s)?,
        2 => {
            let d = param("delta", &a.delta, a.find_delta, &mut families::lp_deltas(&tw))?;
            families::lunardon_polverino(&tw, a.s, d)?
        }
        3 => match (&a.delta, a.find_delta) {
            (None, true) => families::find_half_degree(&tw, a.s)?,
            _ => families::half_degree(&tw, a.s, param("delta", &a.delta, false, &mut std::iter::empty())?)?,
        },
        4 => {
            let d = param("delta", &a.delta, a.find_delta, &mut families::trinomial_deltas(&tw).into_iter())?;
            families::trinomial(&tw, d)?
        }
        5 => {
            let t = a.t.unwrap_or(n / 2);
            let h = param("h", &a.h, a.find_h, &mut families::psi_hs(&tw, t))?;
            families::psi(&tw, h, t, a.s)?
        }
        other => return Err(Error::BadParams(format!("unknown family {other}"))),
    };
    let mut v = inst.to_json(&tw, FMT);
    v["field"] = serde_json::to_value(tw.spec()).expect("serializable");
    if a.family == 5 {
        let (h, t) = (inst.params.h.expect("h"), inst.params.t.expect("t"));
        v["theta"] = tw.element_json(families::psi_theta(&tw, h, t, a.s), FMT);
        if let Ok(closed) = families::psi_standard_form_closed(&tw, h, t, a.s) {
            v["standard_form_closed"] = closed.to_json(&tw, FMT)["coeffs"].clone();
        }
    }
    Ok((tw, v))
}

fn emit(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn fail(e: &Error) -> ExitCode {
    emit(&json!({"schema_version": SCHEMA_VERSION, "error": error_json(e)}));
    ExitCode::from(exit_for(e))
}

fn run_selftest(quick: bool, field: Option<&PathBuf>, only: &[u8]) -> ExitCode {
    if let Some(path) = field {
        if let Err(e) = parse_json(path).and_then(|v| tower_from_value(&v)) {
            println!("[FAIL] field construction: {} ({})", e, e.code());
            return ExitCode::from(1);
        }
    }
    let results: Vec<selftest::CriterionResult> = if only.is_empty() {
        selftest::run(quick)
    } else {
        only.iter().filter_map(|&id| selftest::run_criterion(id, quick)).collect()
    };
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    ExitCode::from(if failed == 0 && !results.is_empty() { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<ExitCode> {
    let out = match cli.command {
        Command::Analyze { input, tasks, other, emit_points, oracle, exact_mrd_bound } => {
            let (tw, f) = load_input(&input)?;
            let opts = AnalyzeOptions { tasks: &tasks, other: other.as_ref(), emit_points, oracle, bound: exact_mrd_bound };
            let (body, code) = analyze(&tw, &f, &opts)?;
            emit(&report(&tw, "analyze", body));
            return Ok(ExitCode::from(code));
        }
        Command::Stabilizer { input } => {
            let (tw, f) = load_input(&input)?;
            report(&tw, "stabilizer", json!({"stabilizer": stabilizer_section(&tw, &f)?}))
        }
        Command::StandardForm { input } => {
            let (tw, f) = load_input(&input)?;
            let r = standard_form::to_standard_form(&tw, &f)?;
            report(&tw, "standard-form", r.to_json(&tw, FMT))
        }
        Command::Equiv { field, f, g, gl } => {
            let (df, dg) = (parse_json(&f)?, parse_json(&g)?);
            let tw = load_tower(field.as_ref(), &[&df, &dg])?;
            let (pf, pg) = (poly_from(&tw, &df)?, poly_from(&tw, &dg)?);
            report(&tw, "equiv", equiv_section(&tw, &pf, &pg, gl)?)
        }
        Command::Mrd { input, oracle, exact_mrd_bound } => {
            let (tw, f) = load_input(&input)?;
            report(&tw, "mrd", mrd_section(&tw, &f, oracle, exact_mrd_bound)?)
        }
        Command::Plane { action: PlaneCommand::Analyze { input } } => {
            let (tw, f) = load_input(&input)?;
            report(&tw, "plane analyze", plane::analyze(&tw, &f, FMT)?)
        }
        Command::Plane { action: PlaneCommand::Audit { input, samples, seed } } => {
            let (tw, f) = load_input(&input)?;
            let spread = plane::build_spread(&tw, &f)?;
            let body = json!({
                "spread": spread.audit(&tw)?.to_json(),
                "kernel_scalars": plane::kernel_scalar_audit(&tw, &f)?.ok,
                "semilinear": plane::semilinear_part_audit(&tw, &f, samples, seed)?.to_json(),
            });
            report(&tw, "plane audit", body)
        }
        Command::Families { action: FamiliesCommand::Generate { family, q, n, t, s, delta, h, find_delta, find_h, seed } } => {
            let args = GenerateArgs { family, q, n, t, s, delta, h, find_delta, find_h, seed };
            let (tw, v) = generate(&args)?;
            report(&tw, "families generate", v)
        }
        Command::Selftest { quick, field, only } => return Ok(run_selftest(quick, field.as_ref(), &only)),
    };
    emit(&out);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads.filter(|&n| n > 0) {
        // only fails if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    run(cli).unwrap_or_else(|e| fail(&e))
}
