//! Command-line front end: verification, analysis, optimization,
//! construction, and measurement as reproducible batch commands.
//!
//! Exit codes: 0 ok, 1 usage, 2 check failure, 3 resource limit.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{
    bit_exponent, builtin_matrix, builtin_system, check_balance, matrix_exponent, optimize_params,
    paper_params, plan_levels, plan_levels_matrix, Budget, CostSystem, MatrixSystem, ParamSet,
    PlanError,
};
use crate::blocks::{block, block_library, BlockSpec};
use crate::build::{
    build_bit, build_counter, build_symmetric, counter_oracle, growth_report, selftest, Counter,
    CsaChoice, SelftestMode,
};
use crate::formula::{parse, render, Basis};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK_FAILURE: i32 = 2;
pub const EXIT_RESOURCE_LIMIT: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BasisArg {
    B0,
    B2,
}

impl From<BasisArg> for Basis {
    fn from(b: BasisArg) -> Basis {
        match b {
            BasisArg::B0 => Basis::B0,
            BasisArg::B2 => Basis::B2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "csakit",
    version,
    about = "Carry-save formula toolkit: blocks, exponents, and counter synthesis"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// Random seed (every command is deterministic given the seed).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output format for the report on stdout.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Optional output path (formula file for build commands, report copy
    /// otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallelizable phases.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Search effort: number of random restarts per inner solve.
    #[arg(long, default_value_t = 6)]
    budget: usize,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exhaustively verify every block in the registry.
    VerifyBlocks {
        #[command(flatten)]
        common: Common,
    },
    /// List all blocks: slots, significances, templates.
    Catalog {
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate balance margins of a cost system at given parameters.
    Check {
        /// Cost system: mdfa | sfa5 | sfa7 | path to a system file.
        #[arg(long)]
        system: String,
        /// Parameters: paper-mdfa | paper-sfa5 | paper-sfa7 | path to a
        /// JSON parameter file.
        #[arg(long)]
        params: String,
        #[command(flatten)]
        common: Common,
    },
    /// Maximize the certified exponent parameter p for a cost system.
    Optimize {
        #[arg(long)]
        system: String,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Maximize p for the transfer-matrix balance condition.
    MatrixExponent {
        /// Matrix: paper-15x6 | paper-17x6 | path to a matrix file.
        #[arg(long)]
        matrix: String,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Maximize p for the per-significance (single output bit) condition.
    BitExponent {
        #[arg(long)]
        matrix: String,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Discretize certified parameters onto an integer level ladder.
    Plan {
        #[arg(long, conflicts_with = "matrix")]
        system: Option<String>,
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        params: String,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Build all output bits of the n-input counter.
    Build {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum)]
        basis: BasisArg,
        /// Composite: fig2 | fig4 | chain4 | csa17 (default chosen by basis).
        #[arg(long)]
        csa: Option<String>,
        /// Oracle check: exhaustive | random:K | off.
        #[arg(long, default_value = "off")]
        selftest: String,
        #[command(flatten)]
        common: Common,
    },
    /// Build a single output bit of the counter.
    BuildBit {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        bit: u32,
        #[arg(long, value_enum)]
        basis: BasisArg,
        #[arg(long)]
        csa: Option<String>,
        #[arg(long, default_value = "off")]
        selftest: String,
        #[command(flatten)]
        common: Common,
    },
    /// Synthesize a symmetric function from its weight-value vector.
    SynthSym {
        #[arg(long)]
        n: u64,
        /// n+1 characters of {0,1}: the value at each input weight.
        #[arg(long)]
        values: String,
        #[arg(long, value_enum)]
        basis: BasisArg,
        #[arg(long)]
        csa: Option<String>,
        #[arg(long, default_value = "off")]
        selftest: String,
        #[command(flatten)]
        common: Common,
    },
    /// Measure construction sizes over an n-grid and fit the growth slope.
    Fit {
        /// Comma-separated list of input counts, ascending.
        #[arg(long, value_name = "N1,N2,...")]
        n_list: String,
        /// Measure one output bit instead of the whole counter.
        #[arg(long)]
        bit: Option<u32>,
        #[arg(long, value_enum)]
        basis: BasisArg,
        #[arg(long)]
        csa: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Parse a formula file and evaluate it on an assignment.
    Eval {
        /// Path to a `.sexp` formula file.
        #[arg(long)]
        formula: PathBuf,
        /// Assignment: one {0,1} character per variable, x0 first.
        #[arg(long)]
        assign: String,
        #[command(flatten)]
        common: Common,
    },
}

/// A usage/check/resource failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Failure {
        Failure { code: EXIT_USAGE, message: msg.into() }
    }
    fn check(msg: impl Into<String>) -> Failure {
        Failure { code: EXIT_CHECK_FAILURE, message: msg.into() }
    }
    fn resource(msg: impl Into<String>) -> Failure {
        Failure { code: EXIT_RESOURCE_LIMIT, message: msg.into() }
    }
}

/// Round every number in a JSON tree to 10 significant digits.
fn round_sig10(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    let r: f64 = format!("{f:.9e}").parse().unwrap_or(f);
                    if let Some(num) = serde_json::Number::from_f64(r) {
                        *v = Value::Number(num);
                    }
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_sig10),
        Value::Object(o) => o.values_mut().for_each(round_sig10),
        _ => {}
    }
}

fn to_payload<T: serde::Serialize>(t: &T) -> Result<Value, Failure> {
    let mut v = serde_json::to_value(t)
        .map_err(|e| Failure::check(format!("serialization failed: {e}")))?;
    round_sig10(&mut v);
    Ok(v)
}

/// The full catalog: registry blocks plus the named composites.
fn catalog_blocks() -> Vec<BlockSpec> {
    let mut v = block_library();
    for name in ["chain1", "chain2", "chain3", "chain4", "csa17"] {
        v.push(block(name).expect("named composite"));
    }
    v
}

fn load_system(arg: &str) -> Result<CostSystem, Failure> {
    if let Ok(sys) = builtin_system(arg) {
        return Ok(sys);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(Failure::usage(format!(
            "unknown system {arg:?}: not a builtin (mdfa, sfa5, sfa7) and no such file"
        )));
    }
    let src = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {arg}: {e}")))?;
    let hint = path.file_stem().and_then(|s| s.to_str()).unwrap_or("file");
    CostSystem::parse(hint, &src).map_err(|e| Failure::usage(format!("{arg}: {e}")))
}

fn load_matrix(arg: &str) -> Result<MatrixSystem, Failure> {
    if let Ok(ms) = builtin_matrix(arg) {
        return Ok(ms);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(Failure::usage(format!(
            "unknown matrix {arg:?}: not a builtin (paper-15x6, paper-17x6) and no such file"
        )));
    }
    let src = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {arg}: {e}")))?;
    let hint = path.file_stem().and_then(|s| s.to_str()).unwrap_or("file");
    MatrixSystem::parse(hint, &src).map_err(|e| Failure::usage(format!("{arg}: {e}")))
}

fn load_params(arg: &str) -> Result<ParamSet, Failure> {
    if let Ok(ps) = paper_params(arg) {
        return Ok(ps);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(Failure::usage(format!(
            "unknown params {arg:?}: not a fixture (paper-mdfa, paper-sfa5, paper-sfa7) \
             and no such file"
        )));
    }
    let src = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {arg}: {e}")))?;
    serde_json::from_str(&src).map_err(|e| Failure::usage(format!("{arg}: {e}")))
}

fn parse_csa(arg: &Option<String>, basis: Basis) -> Result<CsaChoice, Failure> {
    match arg {
        None => Ok(CsaChoice::default_for(basis)),
        Some(s) => CsaChoice::from_name(s).ok_or_else(|| {
            Failure::usage(format!(
                "unknown composite {s:?}: expected fig2, fig4, chain4, or csa17"
            ))
        }),
    }
}

fn parse_selftest(arg: &str) -> Result<SelftestMode, Failure> {
    SelftestMode::from_name(arg).ok_or_else(|| {
        Failure::usage(format!(
            "bad --selftest {arg:?}: expected exhaustive, off, or random:K"
        ))
    })
}

fn parse_values(arg: &str, n: u64) -> Result<Vec<bool>, Failure> {
    if arg.len() as u64 != n + 1 || !arg.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Failure::usage(format!(
            "--values must be {} characters of {{0,1}} (one per input weight)",
            n + 1
        )));
    }
    Ok(arg.bytes().map(|b| b == b'1').collect())
}

fn parse_n_list(arg: &str) -> Result<Vec<u64>, Failure> {
    let ns: Result<Vec<u64>, _> = arg.split(',').map(|s| s.trim().parse()).collect();
    let ns = ns.map_err(|e| Failure::usage(format!("bad --n-list: {e}")))?;
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::usage("--n-list must be a strictly ascending list"));
    }
    Ok(ns)
}

fn budget_of(search: &SearchArgs, common: &Common) -> Budget {
    Budget {
        seed: common.seed,
        restarts: search.budget,
        jobs: common.jobs.max(1),
        ..Budget::default()
    }
}

/// Run a selftest, mapping its failure modes onto exit codes.
fn run_selftest<Fx>(
    n: u64,
    counter: &Counter,
    mode: SelftestMode,
    seed: u64,
    oracle: Fx,
) -> Result<Value, Failure>
where
    Fx: Fn(&[bool]) -> Vec<bool>,
{
    match selftest(n, &counter.bits, mode, seed, oracle) {
        Ok(checked) => Ok(json!({ "checked": checked, "pass": true })),
        Err(msg) if msg.contains("infeasible") => Err(Failure::resource(msg)),
        Err(msg) => Err(Failure::check(format!("selftest failed: {msg}"))),
    }
}

fn write_formulas(counter: &Counter, out: &Path, multi: bool) -> Result<Vec<String>, Failure> {
    let mut files = Vec::new();
    if multi && counter.bits.len() > 1 {
        let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
        let ext = out.extension().and_then(|s| s.to_str()).unwrap_or("sexp");
        for (k, f) in counter.bits.iter().enumerate() {
            let path = out.with_file_name(format!("{stem}.bit{k}.{ext}"));
            std::fs::write(&path, render(f) + "\n")
                .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
            files.push(path.display().to_string());
        }
    } else {
        std::fs::write(out, render(&counter.bits[0]) + "\n")
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", out.display())))?;
        files.push(out.display().to_string());
    }
    Ok(files)
}

fn map_build_err(e: crate::build::BuildError) -> Failure {
    use crate::build::BuildError as B;
    match e {
        B::UnsupportedN { .. } | B::BasisMismatch { .. } | B::BadBit { .. }
        | B::BadValues { .. } => Failure::usage(e.to_string()),
        B::Block(_) | B::Formula(_) => Failure::check(e.to_string()),
    }
}

fn map_plan_err(e: PlanError) -> Failure {
    match e {
        PlanError::ResourceLimit => Failure::resource(e.to_string()),
        _ => Failure::check(e.to_string()),
    }
}

/// Execute one subcommand, returning (command name, config echo, payload,
/// extra exit code). The payload is already rounded to 10 significant
/// digits.
fn execute(cmd: &Cmd) -> Result<(&'static str, Value, Value), Failure> {
    match cmd {
        Cmd::VerifyBlocks { .. } => {
            let mut reports = Vec::new();
            let mut all_pass = true;
            for spec in catalog_blocks() {
                let rep = spec.verify().map_err(|e| Failure::resource(e.to_string()))?;
                all_pass &= rep.pass;
                reports.push(rep);
            }
            let payload = json!({
                "blocks": to_payload(&reports)?,
                "pass": all_pass,
            });
            if !all_pass {
                return Err(Failure::check(format!(
                    "block verification failed: {}",
                    serde_json::to_string(&payload).unwrap_or_default()
                )));
            }
            Ok(("verify-blocks", json!({}), payload))
        }
        Cmd::Catalog { .. } => {
            let entries: Vec<Value> = catalog_blocks()
                .iter()
                .map(|spec| {
                    let slot = |s: &crate::blocks::Slot| {
                        json!({
                            "name": s.name,
                            "encoding": serde_json::to_value(s.encoding).unwrap(),
                            "significance": s.significance,
                        })
                    };
                    json!({
                        "name": spec.name,
                        "basis": serde_json::to_value(spec.basis).unwrap(),
                        "inputs": spec.inputs.iter().map(slot).collect::<Vec<_>>(),
                        "outputs": spec.outputs.iter().map(slot).collect::<Vec<_>>(),
                        "templates": spec.templates.iter().map(render).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok(("catalog", json!({}), json!({ "blocks": entries })))
        }
        Cmd::Check { system, params, .. } => {
            let sys = load_system(system)?;
            let ps = load_params(params)?;
            let margins = check_balance(&sys, &ps).map_err(|e| Failure::usage(e.to_string()))?;
            let config = json!({ "system": system, "params": to_payload(&ps)? });
            let payload = to_payload(&margins)?;
            if !margins.feasible {
                eprintln!("check: parameters are not feasible (some margin <= 1e-9)");
                let mut out = serde_json::to_string(&json!({
                    "command": "check", "config": config, "payload": payload, "status": "check-failure"
                }))
                .unwrap_or_default();
                out.push('\n');
                print!("{out}");
                return Err(Failure { code: EXIT_CHECK_FAILURE, message: String::new() });
            }
            Ok(("check", config, payload))
        }
        Cmd::Optimize { system, search, common } => {
            let sys = load_system(system)?;
            let budget = budget_of(search, common);
            let config = json!({
                "system": system, "seed": budget.seed,
                "restarts": budget.restarts, "jobs": budget.jobs,
            });
            match optimize_params(&sys, &budget) {
                Some(out) => Ok(("optimize", config, to_payload(&out)?)),
                None => Err(Failure::check("no certified feasible point within budget")),
            }
        }
        Cmd::MatrixExponent { matrix, search, common } => {
            let ms = load_matrix(matrix)?;
            let budget = budget_of(search, common);
            let config = json!({
                "matrix": matrix, "seed": budget.seed,
                "restarts": budget.restarts, "jobs": budget.jobs,
            });
            match matrix_exponent(&ms, &budget) {
                Some(out) => Ok(("matrix-exponent", config, to_payload(&out)?)),
                None => Err(Failure::check("no certified feasible point within budget")),
            }
        }
        Cmd::BitExponent { matrix, search, common } => {
            let ms = load_matrix(matrix)?;
            let budget = budget_of(search, common);
            let config = json!({
                "matrix": matrix, "seed": budget.seed,
                "restarts": budget.restarts, "jobs": budget.jobs,
            });
            match bit_exponent(&ms, &budget) {
                Some(out) => {
                    let mut payload = to_payload(&out)?;
                    if let Value::Object(o) = &mut payload {
                        let mut sym = Value::from(1.0 + out.inv_p);
                        round_sig10(&mut sym);
                        o.insert("symmetric_exponent".into(), sym);
                    }
                    Ok(("bit-exponent", config, payload))
                }
                None => Err(Failure::check("no certified feasible point within budget")),
            }
        }
        Cmd::Plan { system, matrix, params, n, .. } => {
            let ps = load_params(params)?;
            let plan = match (system, matrix) {
                (Some(sname), None) => {
                    let sys = load_system(sname)?;
                    plan_levels(&sys, &ps, *n).map_err(map_plan_err)?
                }
                (None, Some(mname)) => {
                    let ms = load_matrix(mname)?;
                    plan_levels_matrix(&ms, &ps, *n).map_err(map_plan_err)?
                }
                _ => {
                    return Err(Failure::usage(
                        "plan needs exactly one of --system or --matrix",
                    ))
                }
            };
            let config = json!({ "params": to_payload(&ps)?, "n": n });
            Ok(("plan", config, to_payload(&plan)?))
        }
        Cmd::Build { n, basis, csa, selftest: st, common } => {
            let basis = Basis::from(*basis);
            let csa = parse_csa(csa, basis)?;
            let mode = parse_selftest(st)?;
            let counter = build_counter(*n, basis, csa).map_err(map_build_err)?;
            let nbits = counter.bits.len();
            let st_result =
                run_selftest(*n, &counter, mode, common.seed, counter_oracle(nbits))?;
            let files = match &common.out {
                Some(out) => write_formulas(&counter, out, true)?,
                None => Vec::new(),
            };
            let config = json!({
                "n": n, "basis": serde_json::to_value(basis).unwrap(),
                "csa": csa.name(), "selftest": st, "seed": common.seed,
            });
            let payload = json!({
                "stats": to_payload(&counter.stats)?,
                "selftest": st_result,
                "files": files,
            });
            Ok(("build", config, payload))
        }
        Cmd::BuildBit { n, bit, basis, csa, selftest: st, common } => {
            let basis = Basis::from(*basis);
            let csa = parse_csa(csa, basis)?;
            let mode = parse_selftest(st)?;
            let counter = build_bit(*n, *bit, basis, csa).map_err(map_build_err)?;
            let k = *bit;
            let st_result = run_selftest(*n, &counter, mode, common.seed, move |bits| {
                let w = bits.iter().filter(|&&b| b).count() as u64;
                vec![w >> k & 1 == 1]
            })?;
            let files = match &common.out {
                Some(out) => write_formulas(&counter, out, false)?,
                None => Vec::new(),
            };
            let config = json!({
                "n": n, "bit": bit, "basis": serde_json::to_value(basis).unwrap(),
                "csa": csa.name(), "selftest": st, "seed": common.seed,
            });
            let payload = json!({
                "stats": to_payload(&counter.stats)?,
                "selftest": st_result,
                "files": files,
            });
            Ok(("build-bit", config, payload))
        }
        Cmd::SynthSym { n, values, basis, csa, selftest: st, common } => {
            let basis = Basis::from(*basis);
            let csa = parse_csa(csa, basis)?;
            let mode = parse_selftest(st)?;
            let vals = parse_values(values, *n)?;
            let counter = build_symmetric(*n, &vals, basis, csa).map_err(map_build_err)?;
            let oracle_vals = vals.clone();
            let st_result = run_selftest(*n, &counter, mode, common.seed, move |bits| {
                let w = bits.iter().filter(|&&b| b).count();
                vec![oracle_vals[w]]
            })?;
            let files = match &common.out {
                Some(out) => write_formulas(&counter, out, false)?,
                None => Vec::new(),
            };
            let config = json!({
                "n": n, "values": values, "basis": serde_json::to_value(basis).unwrap(),
                "csa": csa.name(), "selftest": st, "seed": common.seed,
            });
            let payload = json!({
                "stats": to_payload(&counter.stats)?,
                "selftest": st_result,
                "files": files,
            });
            Ok(("synth-sym", config, payload))
        }
        Cmd::Fit { n_list, bit, basis, csa, .. } => {
            let basis = Basis::from(*basis);
            let csa = parse_csa(csa, basis)?;
            let ns = parse_n_list(n_list)?;
            let report = growth_report(&ns, *bit, basis, csa).map_err(map_build_err)?;
            let config = json!({
                "n_list": ns, "bit": bit,
                "basis": serde_json::to_value(basis).unwrap(), "csa": csa.name(),
            });
            Ok(("fit", config, to_payload(&report)?))
        }
        Cmd::Eval { formula, assign, .. } => {
            let src = std::fs::read_to_string(formula)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", formula.display())))?;
            let f = parse(&src).map_err(|e| Failure::usage(e.to_string()))?;
            if !assign.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Failure::usage("--assign must be a string of 0/1"));
            }
            let bits: Vec<bool> = assign.bytes().map(|b| b == b'1').collect();
            let value = f
                .eval(&bits)
                .map_err(|e| Failure::usage(format!("evaluation failed: {e}")))?;
            let config = json!({ "formula": formula.display().to_string(), "assign": assign });
            let payload = json!({
                "value": value,
                "arity": f.arity(),
                "leaves": f.leaf_count(),
            });
            Ok(("eval", config, payload))
        }
    }
}

fn common_of(cmd: &Cmd) -> &Common {
    match cmd {
        Cmd::VerifyBlocks { common }
        | Cmd::Catalog { common }
        | Cmd::Check { common, .. }
        | Cmd::Optimize { common, .. }
        | Cmd::MatrixExponent { common, .. }
        | Cmd::BitExponent { common, .. }
        | Cmd::Plan { common, .. }
        | Cmd::Build { common, .. }
        | Cmd::BuildBit { common, .. }
        | Cmd::SynthSym { common, .. }
        | Cmd::Fit { common, .. }
        | Cmd::Eval { common, .. } => common,
    }
}

fn csv_of(command: &str, payload: &Value) -> Result<String, Failure> {
    match command {
        "fit" => {
            let mut out = String::from("n,bit,leaves\n");
            let bit = payload
                .get("bit")
                .and_then(Value::as_u64)
                .map(|b| b.to_string())
                .unwrap_or_else(|| "all".into());
            for row in payload["rows"].as_array().into_iter().flatten() {
                out.push_str(&format!("{},{},{}\n", row["n"], bit, row["leaves"]));
            }
            out.push_str(&format!(
                "# slope={} residual={}\n",
                payload["slope"], payload["residual"]
            ));
            Ok(out)
        }
        "check" => {
            let mut out = String::from("type,margin\n");
            for row in payload["per_type"].as_array().into_iter().flatten() {
                let pair = row.as_array().cloned().unwrap_or_default();
                if pair.len() == 2 {
                    out.push_str(&format!(
                        "{},{}\n",
                        pair[0].as_str().unwrap_or("?"),
                        pair[1]
                    ));
                }
            }
            Ok(out)
        }
        _ => Err(Failure::usage(format!(
            "--format csv is not available for `{command}`"
        ))),
    }
}

fn text_of(command: &str, config: &Value, payload: &Value) -> String {
    let mut out = format!("command: {command}\n");
    if let Some(o) = config.as_object() {
        for (k, v) in o {
            out.push_str(&format!("  {k}: {v}\n"));
        }
    }
    out.push_str(&format!(
        "{}\n",
        serde_json::to_string_pretty(payload).unwrap_or_default()
    ));
    out
}

/// Run the CLI on the given arguments; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let started = std::time::Instant::now();
    let common = common_of(&cli.cmd);
    let format = common.format;
    let report_out = common.out.clone();
    match execute(&cli.cmd) {
        Ok((command, config, payload)) => {
            let rendered = match format {
                Format::Json => {
                    let report = json!({
                        "command": command,
                        "config": config,
                        "seed": common_of(&cli.cmd).seed,
                        "payload": payload,
                        "status": "ok",
                    });
                    let mut s = serde_json::to_string(&report).unwrap_or_default();
                    s.push('\n');
                    s
                }
                Format::Csv => match csv_of(command, &payload) {
                    Ok(s) => s,
                    Err(f) => {
                        eprintln!("{}", f.message);
                        return f.code;
                    }
                },
                Format::Text => text_of(command, &config, &payload),
            };
            print!("{rendered}");
            // wall time goes to stderr so stdout stays byte-stable
            eprintln!("wall_ms: {}", started.elapsed().as_millis());
            if !matches!(command, "build" | "build-bit" | "synth-sym") {
                if let Some(path) = report_out {
                    if std::fs::write(&path, &rendered).is_err() {
                        eprintln!("warning: could not write report to {}", path.display());
                    }
                }
            }
            EXIT_OK
        }
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("{}", f.message);
            }
            f.code
        }
    }
}
