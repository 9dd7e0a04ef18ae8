//! Command-line surface: build/merge/estimate sketch states from files, run
//! verification suites, and emit space/error experiment tables.
//!
//! Exit codes: 0 success, 1 internal failure or failed verification, 2
//! malformed input, 3 fingerprint mismatch, 4 enumeration budget refusal.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::battery;
use crate::decode::{self, BoundsMode, DecodeBudget};
use crate::error::{Error, Result};
use crate::lattice::{read_kernel_file, write_kernel_file, EnumBudget};
use crate::sketch::{read_state_file, read_stream_file, write_state_file, KernelSpec};
use crate::verify::{self, Report};
use crate::{automaton, lattice};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_FINGERPRINT: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Parser)]
#[command(
    name = "lattice-sketch",
    about = "Deterministic mergeable frequency sketches over integer lattice quotients",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build, merge and decode sketch state files.
    Sketch {
        #[command(subcommand)]
        cmd: SketchCmd,
    },
    /// Run a verification suite and print pass/fail per case.
    Verify(VerifyArgs),
    /// Emit a per-kernel table of measured error and coset-count bits.
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum SketchCmd {
    /// Process a stream file into a sketch state file.
    Build {
        /// Kernel file (JSON: {"n": .., "basis": [[..], ..]}).
        #[arg(long)]
        kernel: PathBuf,
        /// Stream file (text: "i,delta" per line, '#' comments).
        #[arg(long)]
        stream: PathBuf,
        /// Output state file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge two state files produced with the same kernel.
    Merge {
        a: PathBuf,
        b: PathBuf,
        /// Kernel file; supplies the moduli and gates the fingerprints.
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode a state file into a frequency estimate.
    Estimate {
        state: PathBuf,
        #[arg(long)]
        kernel: PathBuf,
        /// Print only this coordinate (1-based).
        #[arg(long)]
        coord: Option<usize>,
        /// Decode over the saturated kernel (torsion-free quotient) instead
        /// of the kernel itself.
        #[arg(long)]
        saturate: bool,
        /// Maximum points the decoder may enumerate.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value = "text")]
        format: OutputFormat,
    },
    /// Canonicalize a kernel file in place (HNF basis).
    Canonicalize {
        kernel: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name; `all` runs every named suite at desk scale.
    suite: String,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    len: Option<usize>,
    #[arg(long, default_value_t = 2)]
    slack: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    samples: Option<usize>,
    /// Kernel generator name for single-kernel suites (space-count).
    #[arg(long)]
    kernel: Option<String>,
    /// Automaton file for the quotient suite.
    #[arg(long)]
    automaton: Option<PathBuf>,
    #[arg(long, default_value = "text")]
    format: OutputFormat,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    n: usize,
    /// Comma-separated box radii.
    #[arg(long, default_value = "1,2,4,8")]
    m_list: String,
    /// Comma-separated kernel generator names; defaults to the standard
    /// battery.
    #[arg(long)]
    kernels: Option<String>,
    /// Box radius for the measured worst-case error of the saturated kernel.
    #[arg(long, default_value_t = 10)]
    err_radius: u32,
    /// Lower edge of the epsilon window tagged in the output; defaults to
    /// `1/(24 sqrt(n))`.
    #[arg(long)]
    eps_lower: Option<f64>,
    /// Upper edge of the epsilon window; defaults to `1/32`.
    #[arg(long)]
    eps_upper: Option<f64>,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
    Json,
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Malformed(_)
        | Error::DimensionMismatch { .. }
        | Error::IndexOutOfRange { .. }
        | Error::NotPathReversible(_)
        | Error::Io(_) => EXIT_MALFORMED,
        Error::FingerprintMismatch { .. } | Error::InconsistentState(_) => EXIT_FINGERPRINT,
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::SelfTestFailed(_) => EXIT_FAILURE,
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Malformed(_) => "malformed",
        Error::DimensionMismatch { .. } => "dimension-mismatch",
        Error::IndexOutOfRange { .. } => "index-out-of-range",
        Error::NotPathReversible(_) => "not-path-reversible",
        Error::Io(_) => "io",
        Error::FingerprintMismatch { .. } => "fingerprint-mismatch",
        Error::InconsistentState(_) => "inconsistent-state",
        Error::BudgetExceeded { .. } => "budget-exceeded",
        Error::SelfTestFailed(_) => "self-test-failed",
    }
}

fn report_error(err: &Error, json: bool) -> i32 {
    if json {
        eprintln!(
            "{}",
            serde_json::json!({"error": {"kind": error_kind(err), "message": err.to_string()}})
        );
    } else {
        eprintln!("error: {err}");
    }
    exit_code_for(err)
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own usage text; 2 for usage errors
            let _ = e.print();
            return if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Sketch { cmd } => run_sketch(cmd),
        Command::Verify(args) => run_verify(args),
        Command::Experiment(args) => run_experiment(args),
    }
}

fn run_sketch(cmd: SketchCmd) -> i32 {
    let json = matches!(
        cmd,
        SketchCmd::Estimate {
            format: OutputFormat::Json,
            ..
        }
    );
    match sketch_inner(cmd) {
        Ok(()) => EXIT_OK,
        Err(e) => report_error(&e, json),
    }
}

fn sketch_inner(cmd: SketchCmd) -> Result<()> {
    match cmd {
        SketchCmd::Build {
            kernel,
            stream,
            out,
        } => {
            let module = read_kernel_file(&kernel)?;
            let spec = KernelSpec::compile(&module)?;
            let records = read_stream_file(&stream)?;
            let state = spec.process_stream(&spec.init(), records)?;
            write_state_file(&out, &state)?;
            Ok(())
        }
        SketchCmd::Merge { a, b, kernel, out } => {
            let module = read_kernel_file(&kernel)?;
            let spec = KernelSpec::compile(&module)?;
            let sa = read_state_file(&a, &spec)?;
            let sb = read_state_file(&b, &spec)?;
            let merged = spec.merge(&sa, &sb)?;
            write_state_file(&out, &merged)?;
            Ok(())
        }
        SketchCmd::Estimate {
            state,
            kernel,
            coord,
            saturate,
            budget,
            format,
        } => {
            let module = read_kernel_file(&kernel)?;
            let spec = KernelSpec::compile(&module)?;
            let s = read_state_file(&state, &spec)?;
            let decode_budget = DecodeBudget {
                max_enumerated_points: budget.unwrap_or(10_000_000),
                bounds: BoundsMode::LinfFromL1,
            };
            let est = if saturate {
                let rep = decode::coset_representative(&spec, &s)?;
                decode::min_l1_in_coset(&module.saturate(), &rep, &decode_budget)?
            } else {
                decode::estimate(&spec, &s, &decode_budget)?
            };
            let n = est.len();
            if let Some(i) = coord {
                if i == 0 || i > n {
                    return Err(Error::IndexOutOfRange { index: i, n });
                }
                match format {
                    OutputFormat::Json => println!(
                        "{}",
                        serde_json::json!({"coordinate": i, "value": est[i - 1].to_string()})
                    ),
                    _ => println!("{}", est[i - 1]),
                }
            } else {
                match format {
                    OutputFormat::Json => {
                        let vals: Vec<String> = est.iter().map(|v| v.to_string()).collect();
                        println!("{}", serde_json::json!({ "estimate": vals }));
                    }
                    _ => {
                        let vals: Vec<String> = est.iter().map(|v| v.to_string()).collect();
                        println!("{}", vals.join(" "));
                    }
                }
            }
            Ok(())
        }
        SketchCmd::Canonicalize { kernel, out } => {
            let module = read_kernel_file(&kernel)?;
            write_kernel_file(&out, &module)?;
            Ok(())
        }
    }
}

fn print_report(report: &Report, format: OutputFormat) {
    match format {
        OutputFormat::Json => {
            let cases: Vec<serde_json::Value> = report
                .cases
                .iter()
                .map(|c| {
                    serde_json::json!({"label": c.label, "pass": c.pass, "detail": c.detail})
                })
                .collect();
            println!(
                "{}",
                serde_json::json!({
                    "suite": report.name,
                    "pass": report.passed(),
                    "cases": cases,
                })
            );
        }
        _ => {
            for c in &report.cases {
                let tag = if c.pass { "PASS" } else { "FAIL" };
                println!("[{tag}] {}: {} — {}", report.name, c.label, c.detail);
            }
            println!("{}", report.summary());
        }
    }
}

fn run_verify(args: VerifyArgs) -> i32 {
    let json = args.format == OutputFormat::Json;
    match verify_inner(&args) {
        Ok(reports) => {
            let mut all_pass = true;
            for r in &reports {
                print_report(r, args.format);
                all_pass &= r.passed();
            }
            if all_pass {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }
        Err(e) => report_error(&e, json),
    }
}

fn verify_inner(args: &VerifyArgs) -> Result<Vec<Report>> {
    let suite = args.suite.as_str();
    let trials = args.trials.unwrap_or(1000);
    let seed = args.seed;
    let named = |name: &str, args: &VerifyArgs| -> Result<Option<Report>> {
        let name = match name {
            // descriptive aliases
            "pathindependent" => "fourfold",
            "space-lower-bound" => "coset-count",
            other => other,
        };
        Ok(Some(match name {
            "mergeability" => verify::merge_suite(
                trials,
                args.n.unwrap_or(8),
                args.len.unwrap_or(200),
                seed,
            )?,
            "kernel-equality" => {
                verify::kernel_equality_suite(args.n.unwrap_or(4), args.m.unwrap_or(3))?
            }
            "normal-forms" => verify::normal_forms_suite(trials, args.n.unwrap_or(6), 10, seed)?,
            "l1min" => verify::l1min_suite(trials, args.n.unwrap_or(5), seed)?,
            "zero" => verify::zero_symmetric_suite(
                args.n.unwrap_or(4),
                args.m.unwrap_or(3),
                args.samples.unwrap_or(100),
                seed,
            )?,
            "fourfold" => verify::fourfold_suite(args.n.unwrap_or(3), args.m.unwrap_or(3))?,
            "fourfold-candidates" => {
                verify::fourfold_candidates_suite(args.n.unwrap_or(2), args.m.unwrap_or(2))?
            }
            "coset-count" => verify::coset_count_suite(args.n.unwrap_or(4), args.m.unwrap_or(2))?,
            "extension" => verify::extension_suite(
                args.n.unwrap_or(4),
                args.m.unwrap_or(10),
                args.samples.unwrap_or(100_000),
                seed,
            )?,
            "rank-bound" => verify::rank_bound_suite()?,
            "pipeline" => verify::pipeline_suite(
                args.m.unwrap_or(4),
                args.len.unwrap_or(6),
                args.slack,
            )?,
            "cancellation" => verify::cancellation_suite(args.m.unwrap_or(4))?,
            "kernel-structure" => verify::kernel_structure_suite(args.m.unwrap_or(3))?,
            "space-scaling" => verify::space_scaling_suite(&[1, 2, 4, 8])?,
            _ => return Ok(None),
        }))
    };
    if suite == "all" {
        let mut out = Vec::new();
        for name in [
            "normal-forms",
            "kernel-equality",
            "mergeability",
            "l1min",
            "zero",
            "fourfold",
            "fourfold-candidates",
            "coset-count",
            "extension",
            "rank-bound",
            "pipeline",
            "cancellation",
            "kernel-structure",
            "space-scaling",
        ] {
            match named(name, args)? {
                Some(r) => out.push(r),
                None => unreachable!(),
            }
        }
        return Ok(out);
    }
    if let Some(r) = named(suite, args)? {
        return Ok(vec![r]);
    }
    match suite {
        "space-count" => {
            let n = args.n.ok_or_else(|| {
                Error::Malformed("space-count needs --n".into())
            })?;
            let m = args.m.unwrap_or(1);
            let budget = EnumBudget::from_env();
            let mut report = Report { name: "space-count".into(), cases: vec![] };
            let kernels: Vec<(String, crate::lattice::Submodule)> = match &args.kernel {
                Some(name) => {
                    let kind = battery::parse_kind(name)?;
                    vec![(name.clone(), battery::generate(&kind, n)?)]
                }
                None => battery::standard_battery(n),
            };
            for (name, module) in kernels {
                let spec = KernelSpec::compile(&module)?;
                let rep = spec.space_report(m, &budget)?;
                let lower = (2u128 * m as u128 + 1).pow((n - module.rank()) as u32);
                report.cases.push(verify::Case {
                    label: format!("{name} n={n} m={m}"),
                    pass: rep.coset_count as u128 >= lower,
                    detail: format!(
                        "cosets={} >= {lower}; bits {:.3} vs bound {:.3}",
                        rep.coset_count, rep.coset_count_bits, rep.lower_bound_bits
                    ),
                });
            }
            Ok(vec![report])
        }
        "quotient" => {
            let path = args.automaton.as_ref().ok_or_else(|| {
                Error::Malformed("quotient needs --automaton FILE".into())
            })?;
            let a = automaton::read_automaton_file(path)?;
            let m = args.m.unwrap_or(4);
            let len = args.len.unwrap_or(6);
            let budget = EnumBudget::from_env();
            let mut report = Report { name: "quotient".into(), cases: vec![] };
            let rev = automaton::reversibilize(&a, m, &budget)?;
            report.cases.push(verify::Case {
                label: "reversibilized automaton is path reversible".into(),
                pass: rev.automaton.is_path_reversible(),
                detail: format!("{} configs", rev.automaton.num_configs()),
            });
            let (spec, outputs) =
                automaton::quotient_path_independent(&rev.automaton, m, &budget)?;
            let q = automaton::quotient_automaton(&spec, &outputs, m, &budget)?;
            report.cases.push(verify::Case {
                label: "quotient automaton is path independent".into(),
                pass: automaton::is_path_independent(&q, m, &budget)?,
                detail: format!("kernel rank {}", spec.module().rank()),
            });
            let revl = automaton::reversibilize(&a, len as u32, &budget)?;
            let (spec_l, outputs_l) =
                automaton::quotient_path_independent(&revl.automaton, len as u32, &budget)?;
            let ql = automaton::quotient_automaton(&spec_l, &outputs_l, len as u32, &budget)?;
            let check = automaton::is_output_restriction(&ql, &a, len, args.slack, &budget)?;
            report.cases.push(verify::Case {
                label: format!("quotient is an output restriction (len {len})"),
                pass: check.ok,
                detail: check
                    .witness
                    .map(|w| format!("witness {w:?}"))
                    .unwrap_or_else(|| "exhaustive".into()),
            });
            Ok(vec![report])
        }
        _ => Err(Error::Malformed(format!("unknown suite {suite:?}"))),
    }
}

fn run_experiment(args: ExperimentArgs) -> i32 {
    let json = args.format == OutputFormat::Json;
    match experiment_inner(&args) {
        Ok(()) => EXIT_OK,
        Err(e) => report_error(&e, json),
    }
}

/// Splits a kernel-name list on commas outside parentheses, so
/// `zero,diagonal-mod(2,3)` yields two names.
fn split_kernel_list(list: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in list.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            ',' if depth == 0 => {
                if !cur.trim().is_empty() {
                    out.push(cur.trim().to_string());
                }
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

struct ExperimentRow {
    kernel: String,
    n: usize,
    rank: usize,
    eps_hat: String,
    eps_hat_f64: f64,
    eps_window: String,
    rank_floor: String,
    m: u32,
    status: String,
    coset_bits: f64,
    lower_bits: f64,
}

fn experiment_inner(args: &ExperimentArgs) -> Result<()> {
    let n = args.n;
    let radii: Vec<u32> = args
        .m_list
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Malformed(format!("bad radius {s:?}")))
        })
        .collect::<Result<Vec<u32>>>()?;
    let kernels: Vec<(String, lattice::Submodule)> = match &args.kernels {
        Some(list) => split_kernel_list(list)
            .into_iter()
            .map(|name| {
                let kind = battery::parse_kind(&name)?;
                Ok((name, battery::generate(&kind, n)?))
            })
            .collect::<Result<Vec<_>>>()?,
        None => battery::standard_battery(n),
    };
    let budget = EnumBudget::from_env();
    let eps_lower = args.eps_lower.unwrap_or(1.0 / (24.0 * (n as f64).sqrt()));
    let eps_upper = args.eps_upper.unwrap_or(1.0 / 32.0);
    let mut rows = Vec::new();
    for (name, module) in &kernels {
        let sat = module.saturate();
        let (eps_str, eps_f64) = match decode::worst_case_err_zero(&sat, args.err_radius, &budget)
        {
            Ok(e) => (e.to_string(), e.to_f64()),
            Err(Error::BudgetExceeded { .. }) => ("refused".into(), f64::NAN),
            Err(e) => return Err(e),
        };
        let eps_window = if eps_f64.is_nan() {
            "n/a".to_string()
        } else if eps_f64 < eps_lower {
            "below".to_string()
        } else if eps_f64 > eps_upper {
            "above".to_string()
        } else {
            "in-window".to_string()
        };
        let rank_floor = if eps_f64 > 0.0 {
            format!("{:.6}", 1.0 / (72.0 * eps_f64 * eps_f64))
        } else if eps_f64 == 0.0 {
            "inf".into()
        } else {
            "n/a".into()
        };
        let spec = KernelSpec::compile(module)?;
        for &m in &radii {
            let (status, coset_bits, lower_bits) = match spec.space_report(m, &budget) {
                Ok(rep) => ("ok".to_string(), rep.coset_count_bits, rep.lower_bound_bits),
                Err(Error::BudgetExceeded { required, budget }) => (
                    format!("refused(required={required},budget={budget})"),
                    f64::NAN,
                    f64::NAN,
                ),
                Err(e) => return Err(e),
            };
            rows.push(ExperimentRow {
                kernel: name.clone(),
                n,
                rank: module.rank(),
                eps_hat: eps_str.clone(),
                eps_hat_f64: eps_f64,
                eps_window: eps_window.clone(),
                rank_floor: rank_floor.clone(),
                m,
                status,
                coset_bits,
                lower_bits,
            });
        }
    }
    let text = match args.format {
        OutputFormat::Json => {
            let objs: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "kernel": r.kernel,
                        "n": r.n,
                        "rank": r.rank,
                        "eps_hat": r.eps_hat,
                        "eps_hat_f64": if r.eps_hat_f64.is_nan() {
                            serde_json::Value::Null
                        } else {
                            serde_json::json!(r.eps_hat_f64)
                        },
                        "eps_window": r.eps_window,
                        "rank_floor_72eps2": r.rank_floor,
                        "m": r.m,
                        "status": r.status,
                        "coset_bits": if r.coset_bits.is_nan() {
                            serde_json::Value::Null
                        } else {
                            serde_json::json!(r.coset_bits)
                        },
                        "lower_bound_bits": if r.lower_bits.is_nan() {
                            serde_json::Value::Null
                        } else {
                            serde_json::json!(r.lower_bits)
                        },
                    })
                })
                .collect();
            serde_json::to_string_pretty(&objs).map_err(|e| Error::Malformed(e.to_string()))?
                + "\n"
        }
        _ => {
            let mut out = String::from(
                "kernel,n,rank,eps_hat,eps_hat_f64,eps_window,rank_floor_72eps2,m,status,coset_bits,lower_bound_bits\n",
            );
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    r.kernel,
                    r.n,
                    r.rank,
                    r.eps_hat,
                    if r.eps_hat_f64.is_nan() {
                        "n/a".into()
                    } else {
                        format!("{:.6}", r.eps_hat_f64)
                    },
                    r.eps_window,
                    r.rank_floor,
                    r.m,
                    r.status,
                    if r.coset_bits.is_nan() {
                        "n/a".into()
                    } else {
                        format!("{:.6}", r.coset_bits)
                    },
                    if r.lower_bits.is_nan() {
                        "n/a".into()
                    } else {
                        format!("{:.6}", r.lower_bits)
                    },
                ));
            }
            out
        }
    };
    match &args.out {
        Some(path) => std::fs::write(Path::new(path), text)?,
        None => print!("{text}"),
    }
    Ok(())
}
