//! Command-line front end: moment polynomials, the exact tiny-size oracle,
//! spectral curves, invariant suites, and duality reports, all as JSON.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use superloop::curve::{assemble_eext, solve_rational_curve, verify_residue_data, CurveSpec};
use superloop::fatgraph::moment_polynomial;
use superloop::invariants::{run_suite, SUITES};
use superloop::oracle::GaussianEnsemble;
use superloop::partition::{
    cq_from_ser, cq_to_ser, oracle_duality_ratio, partition_function, times_roundtrip_check,
    SerCq,
};
use superloop::scalar::CQ;
use superloop::supermatrix::Grading;
use superloop::toprec::duality_report;

#[derive(Parser)]
#[command(
    name = "superloop",
    about = "Gaussian supermatrix models: moments, exact oracles, spectral curves and duality checks",
    version
)]
struct Cli {
    /// Write the JSON output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the topological moment polynomial of a supertrace product
    Moments(MomentsArgs),
    /// Run the exact Gaussian oracle on a JSON request
    Oracle(OracleArgs),
    /// Solve a spectral curve and verify its residue data
    Curve(CurveArgs),
    /// Run the named invariant suites
    Invariants(InvariantsArgs),
    /// Compare free energies across the x<->y swap (plus exact oracle ratios)
    Duality(DualityArgs),
}

#[derive(Args)]
struct MomentsArgs {
    /// Comma-separated trace valencies, e.g. "2" or "4,2"
    #[arg(long, value_delimiter = ',')]
    valencies: Vec<usize>,
}

#[derive(Args)]
struct OracleArgs {
    /// Path to a JSON request (see README for the schema)
    #[arg(long, conflicts_with = "inline")]
    spec: Option<PathBuf>,
    /// Inline JSON request
    #[arg(long)]
    inline: Option<String>,
}

#[derive(Args)]
struct CurveArgs {
    /// Path to a curve spec JSON: {"hbar": .., "sources": [..], "fields": [..]}
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Sample count for the on-curve check of the algebraic equation
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Also compute free energies F_0..F_gmax on the solved curve
    #[arg(long)]
    gmax: Option<usize>,
}

#[derive(Args)]
struct InvariantsArgs {
    /// Suite name, or "all"
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct DualityArgs {
    /// Path to a curve spec JSON
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 3)]
    gmax: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Also run the exact oracle comparison "m,p" at terminating sizes
    #[arg(long)]
    oracle: Option<String>,
    /// ħ for the oracle comparison, as "num/den"
    #[arg(long, default_value = "1/2")]
    oracle_hbar: String,
}

fn log_enabled() -> bool {
    std::env::var("SUPERLOOP_LOG")
        .map(|v| v != "off" && !v.is_empty())
        .unwrap_or(false)
}

fn emit<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    match out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| e.to_string()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn parse_cq(v: &serde_json::Value, what: &str) -> Result<CQ, String> {
    let arr = v
        .as_array()
        .ok_or_else(|| format!("{what}: expected [re, im] of \"num/den\" strings"))?;
    if arr.len() != 2 {
        return Err(format!("{what}: expected two entries"));
    }
    let ser: SerCq = [
        arr[0]
            .as_str()
            .ok_or_else(|| format!("{what}: re not a string"))?
            .to_string(),
        arr[1]
            .as_str()
            .ok_or_else(|| format!("{what}: im not a string"))?
            .to_string(),
    ];
    cq_from_ser(&ser).ok_or_else(|| format!("{what}: cannot parse rational"))
}

fn parse_grading(v: &serde_json::Value, what: &str) -> Result<Grading, String> {
    let arr = v.as_array().ok_or_else(|| format!("{what}: expected [p, q]"))?;
    let p = arr
        .first()
        .and_then(|x| x.as_u64())
        .ok_or_else(|| format!("{what}: bad p"))?;
    let q = arr
        .get(1)
        .and_then(|x| x.as_u64())
        .ok_or_else(|| format!("{what}: bad q"))?;
    Ok(Grading::new(p as usize, q as usize))
}

fn run_oracle(request: &serde_json::Value) -> Result<serde_json::Value, String> {
    let kind = request
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or("missing \"kind\"")?;
    match kind {
        "trace_moment" => {
            let grading =
                parse_grading(request.get("grading").ok_or("missing grading")?, "grading")?;
            let hbar = parse_cq(request.get("hbar").ok_or("missing hbar")?, "hbar")?;
            let valencies: Vec<usize> = request
                .get("valencies")
                .and_then(|v| v.as_array())
                .ok_or("missing valencies")?
                .iter()
                .map(|x| x.as_u64().map(|v| v as usize).ok_or("bad valency"))
                .collect::<Result<_, _>>()?;
            let y: Vec<CQ> = request
                .get("y")
                .and_then(|v| v.as_array())
                .ok_or("missing y")?
                .iter()
                .map(|v| parse_cq(v, "y entry"))
                .collect::<Result<_, _>>()?;
            if y.len() != grading.dim() {
                return Err("y length must equal p+q".into());
            }
            let ens = GaussianEnsemble::new(grading, hbar).map_err(|e| e.to_string())?;
            let value = ens.trace_moment(&valencies, &y);
            Ok(json!({ "kind": kind, "value": cq_to_ser(&value) }))
        }
        "entry_product" => {
            let grading =
                parse_grading(request.get("grading").ok_or("missing grading")?, "grading")?;
            let hbar = parse_cq(request.get("hbar").ok_or("missing hbar")?, "hbar")?;
            let indices: Vec<(usize, usize)> = request
                .get("indices")
                .and_then(|v| v.as_array())
                .ok_or("missing indices")?
                .iter()
                .map(|pair| {
                    let a = pair.as_array().ok_or("bad index pair")?;
                    let i = a.first().and_then(|x| x.as_u64()).ok_or("bad index")? as usize;
                    let j = a.get(1).and_then(|x| x.as_u64()).ok_or("bad index")? as usize;
                    if i == 0 || j == 0 || i > grading.dim() || j > grading.dim() {
                        return Err("indices are 1-based and bounded by p+q");
                    }
                    Ok((i - 1, j - 1))
                })
                .collect::<Result<_, _>>()?;
            let ens = GaussianEnsemble::new(grading, hbar).map_err(|e| e.to_string())?;
            let value = ens.expect_entry_product(&indices);
            Ok(json!({ "kind": kind, "value": cq_to_ser(&value) }))
        }
        "partition" => {
            let grading =
                parse_grading(request.get("grading").ok_or("missing grading")?, "grading")?;
            let hbar = parse_cq(request.get("hbar").ok_or("missing hbar")?, "hbar")?;
            let signs: Vec<i64> = request
                .get("source_signs")
                .and_then(|v| v.as_array())
                .ok_or("missing source_signs")?
                .iter()
                .map(|x| x.as_i64().ok_or("bad sign"))
                .collect::<Result<_, _>>()?;
            let y: Vec<CQ> = request
                .get("y")
                .and_then(|v| v.as_array())
                .ok_or("missing y")?
                .iter()
                .map(|v| parse_cq(v, "y entry"))
                .collect::<Result<_, _>>()?;
            let trunc = request
                .get("truncation")
                .and_then(|v| v.as_u64())
                .unwrap_or(4) as usize;
            let series = partition_function(grading, &signs, &y, &hbar, trunc)
                .map_err(|e| e.to_string())?;
            serde_json::to_value(&series).map_err(|e| e.to_string())
        }
        "times_roundtrip" => {
            let s_grading = parse_grading(
                request.get("s_grading").ok_or("missing s_grading")?,
                "s_grading",
            )?;
            let grading =
                parse_grading(request.get("grading").ok_or("missing grading")?, "grading")?;
            let hbar = parse_cq(request.get("hbar").ok_or("missing hbar")?, "hbar")?;
            let gamma = request.get("gamma").and_then(|v| v.as_i64()).unwrap_or(1);
            let trunc = request
                .get("truncation")
                .and_then(|v| v.as_u64())
                .unwrap_or(4) as usize;
            let ok = times_roundtrip_check(s_grading, gamma, grading, &hbar, trunc)
                .map_err(|e| e.to_string())?;
            Ok(json!({ "kind": kind, "match": ok }))
        }
        other => Err(format!("unknown oracle kind {other:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Moments(args) => {
            if args.valencies.is_empty() {
                return fail(2, "at least one valency required");
            }
            match moment_polynomial(&args.valencies) {
                Ok(poly) => {
                    let terms: Vec<_> = poly
                        .terms
                        .iter()
                        .map(|((hbar_exp, faces), count)| {
                            json!({ "hbar_exp": hbar_exp, "faces": faces, "count": count })
                        })
                        .collect();
                    let doc = json!({ "valencies": args.valencies, "terms": terms });
                    match emit(&cli.out, &doc) {
                        Ok(()) => ExitCode::SUCCESS,
                        Err(e) => fail(1, &e),
                    }
                }
                Err(e) => fail(1, &format!("{e}")),
            }
        }
        Command::Oracle(args) => {
            let text = match (&args.spec, &args.inline) {
                (Some(path), None) => match std::fs::read_to_string(path) {
                    Ok(t) => t,
                    Err(e) => return fail(2, &format!("cannot read {}: {e}", path.display())),
                },
                (None, Some(inline)) => inline.clone(),
                _ => return fail(2, "exactly one of --spec/--inline required"),
            };
            let request: serde_json::Value = match serde_json::from_str(&text) {
                Ok(v) => v,
                Err(e) => return fail(2, &format!("malformed JSON: {e}")),
            };
            match run_oracle(&request) {
                Ok(doc) => match emit(&cli.out, &doc) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => fail(1, &e),
                },
                Err(e) => fail(1, &e),
            }
        }
        Command::Curve(args) => {
            let text = match std::fs::read_to_string(&args.spec) {
                Ok(t) => t,
                Err(e) => return fail(2, &format!("cannot read {}: {e}", args.spec.display())),
            };
            let spec: CurveSpec = match serde_json::from_str(&text) {
                Ok(s) => s,
                Err(e) => return fail(2, &format!("malformed curve spec: {e}")),
            };
            let curve = match solve_rational_curve(&spec, args.tol, args.max_iter) {
                Ok(c) => c,
                Err(e) => return fail(1, &format!("{e}")),
            };
            if log_enabled() {
                eprintln!(
                    "newton: {} iterations, residual {:.3e}",
                    curve.newton_iterations, curve.newton_residual
                );
            }
            let residues = verify_residue_data(&curve, 1e-10);
            let eext = assemble_eext(&curve, args.samples);
            let free_energies = match args.gmax {
                None => None,
                Some(gmax) => match superloop::toprec::free_energy_table(&curve, gmax) {
                    Ok(table) => Some(table),
                    Err(e) => return fail(1, &format!("{e}")),
                },
            };
            let pack = |z: &Vec<num_complex::Complex64>| -> Vec<[f64; 2]> {
                z.iter().map(|c| [c.re, c.im]).collect()
            };
            let doc = json!({
                "spec": spec,
                "xi": pack(&curve.xi),
                "s_res": pack(&curve.s_res),
                "eta": pack(&curve.eta),
                "r_res": pack(&curve.r_res),
                "branch_points": pack(&curve.branch_points),
                "newton": { "iterations": curve.newton_iterations, "residual": curve.newton_residual },
                "residues": residues,
                "free_energies": free_energies,
                "eext": eext.as_ref().ok().map(|e| json!({
                    "x_degree": e.x_degree,
                    "y_degree": e.y_degree,
                    "max_on_curve": e.max_on_curve,
                    "pair_coefficients": e.pair_coefficients,
                })),
            });
            if emit(&cli.out, &doc).is_err() {
                return ExitCode::from(1);
            }
            if residues.pass && eext.is_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Invariants(args) => {
            let names: Vec<&str> = if args.suite == "all" {
                SUITES.to_vec()
            } else {
                vec![args.suite.as_str()]
            };
            let mut reports = Vec::new();
            for name in names {
                match run_suite(name, args.seed, args.jobs) {
                    Some(rep) => {
                        if log_enabled() {
                            eprintln!(
                                "suite {}: {} cases, {} failures",
                                rep.suite, rep.cases, rep.failures
                            );
                        }
                        reports.push(rep);
                    }
                    None => return fail(2, &format!("unknown suite {:?}", args.suite)),
                }
            }
            let pass = reports.iter().all(|r| r.passed());
            if emit(&cli.out, &reports).is_err() {
                return ExitCode::from(1);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Duality(args) => {
            let text = match std::fs::read_to_string(&args.spec) {
                Ok(t) => t,
                Err(e) => return fail(2, &format!("cannot read {}: {e}", args.spec.display())),
            };
            let spec: CurveSpec = match serde_json::from_str(&text) {
                Ok(s) => s,
                Err(e) => return fail(2, &format!("malformed curve spec: {e}")),
            };
            let report = match duality_report(&spec, args.gmax, args.tol) {
                Ok(r) => r,
                Err(e) => return fail(1, &format!("{e}")),
            };
            let oracle = match &args.oracle {
                None => None,
                Some(sizes) => {
                    let parts: Vec<usize> = sizes
                        .split(',')
                        .filter_map(|s| s.trim().parse().ok())
                        .collect();
                    if parts.len() != 2 {
                        return fail(2, "--oracle expects \"m,p\"");
                    }
                    let hbar = match cq_from_ser(&[args.oracle_hbar.clone(), "0".into()]) {
                        Some(h) => h,
                        None => return fail(2, "bad --oracle-hbar"),
                    };
                    match oracle_duality_ratio(parts[0], parts[1], &hbar, 4) {
                        Ok(r) => Some(r),
                        Err(e) => return fail(1, &format!("{e}")),
                    }
                }
            };
            let pass = report.pass;
            let doc = json!({ "free_energies": report, "oracle": oracle });
            if emit(&cli.out, &doc).is_err() {
                return ExitCode::from(1);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
