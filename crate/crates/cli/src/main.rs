//! `trl`: analyze, decompose, and census small dense tensors.
//!
//! Machine-readable JSON goes to stdout (or `--out`); human summaries and
//! progress stream to stderr. Exit codes: 0 ok, 2 bad input, 3 budget
//! exceeded, 4 unsupported field, 5 no convergence.

use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use trl_core::io::{decomposition_from_json, decomposition_to_json, tensor_from_json, tensor_to_json};
use trl_core::numeric::{border_form_residual, eps_curve_error};
use trl_core::oracle::sweep::Progress;
use trl_core::{
    analyze, banach_symmetry_check, best_sym_rank1, census, decompose_s3f2, detect_border_rank2,
    eps_curve, instances, theorem_sweep, AnalyzeOptions, Budget, Error, FieldTag, Scalar,
    SweepMode, SymTensor, Tensor, TheoremId,
};

#[derive(Parser)]
#[command(name = "trl", version, about = "tensor rank laboratory")]
struct Cli {
    /// Write the JSON result to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Node/table budget for exhaustive searches.
    #[arg(long)]
    budget: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        match self.budget {
            Some(b) => Budget::with_nodes(b),
            None => Budget::default(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Rank report for a tensor file (stdin when no file is given).
    Analyze {
        file: Option<PathBuf>,
        /// Relative tolerance for float ranks.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Certify a decomposition (JSON file) against the tensor.
        #[arg(long)]
        certify: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Decompose a symmetric 2x2x2 tensor into symmetric rank-one terms.
    Decompose { file: Option<PathBuf> },
    /// Exhaustive census of a symmetric tensor space over a finite field.
    Census {
        #[arg(long)]
        field: String,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Sweep a statement over a symmetric tensor space.
    Sweep {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        field: String,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        /// Sample size; exhaustive when omitted.
        #[arg(long)]
        samples: Option<u64>,
        /// Seed for sampling (required with --samples).
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Best symmetric rank-one approximation plus the symmetry check.
    Approx {
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Include the winning start's per-iteration objective values.
        #[arg(long)]
        trajectory: bool,
    },
    /// Border-rank-2 detection and the approximating curve.
    Border {
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Curve parameters to evaluate, e.g. --eps 0.1 --eps 0.01
        #[arg(long)]
        eps: Vec<f64>,
    },
    /// Emit a named instance tensor as JSON.
    Generate {
        /// One of: z2-counterexample, w-tensor, pencil-example, random-sym.
        name: String,
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Top coefficient of the pencil example.
        #[arg(long, default_value_t = 0.0)]
        a: f64,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded(_) => 3,
        Error::UnsupportedField(_, _) | Error::InfiniteField(_) | Error::BadCharacteristic(_, _) => 4,
        Error::DidNotConverge(_) => 5,
        Error::Internal(_) => 1,
        _ => 2,
    }
}

fn read_tensor(file: &Option<PathBuf>) -> Result<Tensor, Error> {
    let text = match file {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::Parse(format!("cannot read stdin: {e}")))?;
            buf
        }
    };
    let v: Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
    tensor_from_json(&v)
}

fn emit(out: &Option<PathBuf>, v: &Value) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(v).expect("serializable");
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn progress_printer(start: Instant) -> impl Fn(u64, u64) + Sync {
    move |done, total| {
        let secs = start.elapsed().as_secs_f64().max(1e-9);
        eprintln!(
            "progress: {done}/{total} tensors ({:.0} tensors/s)",
            done as f64 / secs
        );
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Analyze { file, tol, certify, budget } => {
            let t = read_tensor(&file)?;
            let mut opts = AnalyzeOptions { tol, budget: budget.budget(), certify: None };
            if let Some(path) = certify {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
                let v: Value = serde_json::from_str(&text)
                    .map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
                let (dec, tag, order, dim) = decomposition_from_json(&v)?;
                if tag != t.tag() || order != t.order() || dim != t.dim() {
                    return Err(Error::ShapeMismatch(
                        "certificate shape or field differs from the tensor".into(),
                    ));
                }
                opts.certify = Some(dec);
            }
            let report = analyze(&t, &opts)?;
            eprintln!(
                "analyze: ({}, {}) over {}: rank_a = {}{}{}",
                t.order(),
                t.dim(),
                t.tag(),
                report.rank_a,
                report
                    .rank
                    .as_ref()
                    .map(|r| format!(", rank = {} ({})", r.value, r.method.name()))
                    .unwrap_or_default(),
                report
                    .srank
                    .as_ref()
                    .map(|s| match s.value {
                        Some(v) => format!(", srank = {v} ({})", s.method.name()),
                        None => ", srank = not expressible".to_string(),
                    })
                    .unwrap_or_default(),
            );
            emit(&cli.out, &report.to_json())
        }
        Command::Decompose { file } => {
            let t = read_tensor(&file)?;
            let s = SymTensor::new(t)?;
            let (dec, trace) = decompose_s3f2(&s)?;
            let steps: Vec<Value> = trace
                .steps
                .iter()
                .map(|step| {
                    json!({
                        "case": step.label.name(),
                        "substitution": step.substitution.as_ref().map(|m| {
                            (0..m.rows())
                                .map(|i| m.row(i).iter().map(trl_core::io::scalar_to_json).collect::<Vec<_>>())
                                .collect::<Vec<_>>()
                        }),
                    })
                })
                .collect();
            eprintln!("decompose: {} symmetric terms", dec.terms.len());
            emit(
                &cli.out,
                &json!({
                    "term_count": dec.terms.len(),
                    "decomposition": decomposition_to_json(&dec, s.tag(), s.order(), s.dim()),
                    "trace": steps,
                }),
            )
        }
        Command::Census { field, d, n, budget } => {
            let tag = FieldTag::parse(&field)?;
            let start = Instant::now();
            let printer = progress_printer(start);
            let progress: Progress = Some(&printer);
            let report = census(tag, d, n, &budget.budget(), progress)?;
            eprintln!(
                "census: {} symmetric tensors, {} nonzero expressible",
                report.total_symmetric, report.expressible_nonzero
            );
            emit(&cli.out, &serde_json::to_value(&report).expect("serializable"))
        }
        Command::Sweep { theorem, field, d, n, samples, seed, budget } => {
            let id = TheoremId::parse(&theorem)?;
            let tag = FieldTag::parse(&field)?;
            let mode = match (samples, seed) {
                (None, _) => SweepMode::Exhaustive,
                (Some(count), Some(seed)) => SweepMode::Sample { count, seed },
                (Some(_), None) => {
                    return Err(Error::Parse("--samples requires an explicit --seed".into()));
                }
            };
            let start = Instant::now();
            let printer = progress_printer(start);
            let progress: Progress = Some(&printer);
            let report = theorem_sweep(id, tag, d, n, mode, &budget.budget(), progress)?;
            eprintln!(
                "sweep {}: {} tensors, {} hypothesis, {} held, {} violations",
                report.theorem,
                report.total,
                report.hypothesis_met,
                report.conclusion_held,
                report.violations.len()
            );
            emit(&cli.out, &serde_json::to_value(&report).expect("serializable"))
        }
        Command::Approx { file, restarts, seed, tol, trajectory } => {
            let t = read_tensor(&file)?;
            let s = SymTensor::new(t)?;
            let best = best_sym_rank1(&s, restarts, seed, tol)?;
            let banach = banach_symmetry_check(&s, restarts, seed, tol)?;
            eprintln!(
                "approx: |sigma| = {:.9}, residual = {:.3e}, banach gap = {:.3e}",
                best.sigma.abs_f64(),
                best.residual,
                banach.residual_gap
            );
            let mut rank_one = json!({
                "sigma": trl_core::io::scalar_to_json(&best.sigma),
                "u": best.u.iter().map(trl_core::io::scalar_to_json).collect::<Vec<_>>(),
                "residual": best.residual,
                "converged_starts": best.converged_starts,
                "failed_starts": best.failed_starts,
            });
            if trajectory {
                rank_one
                    .as_object_mut()
                    .unwrap()
                    .insert("objective_trajectory".into(), json!(best.objective_history));
            }
            emit(
                &cli.out,
                &json!({
                    "rank_one": rank_one,
                    "banach": serde_json::to_value(&banach).expect("serializable"),
                    "seed": seed,
                }),
            )
        }
        Command::Border { file, tol, eps } => {
            let t = read_tensor(&file)?;
            let s = SymTensor::new(t)?;
            let found = detect_border_rank2(&s, tol)?;
            let payload = match &found {
                None => json!({"border_rank_2": false}),
                Some(form) => {
                    let resid = border_form_residual(form, s.as_tensor())?;
                    let curve = eps_curve(form);
                    let mut curve_points = Vec::new();
                    for &e in &eps {
                        curve_points.push(json!({
                            "eps": e,
                            "error": eps_curve_error(&curve, s.as_tensor(), e)?,
                        }));
                    }
                    json!({
                        "border_rank_2": true,
                        "form": {
                            "x": form.x.iter().map(trl_core::io::scalar_to_json).collect::<Vec<_>>(),
                            "y": form.y.iter().map(trl_core::io::scalar_to_json).collect::<Vec<_>>(),
                            "a": trl_core::io::scalar_to_json(&form.a),
                            "b": trl_core::io::scalar_to_json(&form.b),
                            "order": form.order,
                            "residual": resid,
                        },
                        "curve": curve_points,
                    })
                }
            };
            eprintln!(
                "border: {}",
                if found.is_some() { "normal form found" } else { "no border-rank-2 form" }
            );
            emit(&cli.out, &payload)
        }
        Command::Generate { name, field, d, n, seed, a } => {
            let tensor = match name.as_str() {
                "z2-counterexample" => instances::z2_counterexample().into_tensor(),
                "w-tensor" => {
                    let tag = match field {
                        Some(f) => FieldTag::parse(&f)?,
                        None => FieldTag::ComplexFloat,
                    };
                    instances::w_tensor(tag).into_tensor()
                }
                "pencil-example" => {
                    let tag = match field {
                        Some(f) => FieldTag::parse(&f)?,
                        None => FieldTag::ComplexFloat,
                    };
                    instances::pencil_example(tag, Scalar::from_f64(tag, a)?).into_tensor()
                }
                "random-sym" => {
                    let tag = FieldTag::parse(
                        &field.ok_or_else(|| Error::Parse("random-sym needs --field".into()))?,
                    )?;
                    let d = d.ok_or_else(|| Error::Parse("random-sym needs --d".into()))?;
                    let n = n.ok_or_else(|| Error::Parse("random-sym needs --n".into()))?;
                    let seed =
                        seed.ok_or_else(|| Error::Parse("random-sym needs an explicit --seed".into()))?;
                    instances::random_sym(tag, d, n, seed)?.into_tensor()
                }
                other => {
                    return Err(Error::Parse(format!(
                        "unknown instance {other:?}; try z2-counterexample, w-tensor, \
                         pencil-example, or random-sym"
                    )));
                }
            };
            eprintln!("generate {name}: ({}, {}) over {}", tensor.order(), tensor.dim(), tensor.tag());
            emit(&cli.out, &tensor_to_json(&tensor))
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
