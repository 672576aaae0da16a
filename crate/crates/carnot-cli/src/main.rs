//! `carnot`: command line front end for carnot-core.
//!
//! Subcommands mirror the library pipeline: `validate`, `info`, `cohomology`,
//! `rumin`, `isotropic`, `bounds`, the `lab` experiments, and `builtin` to
//! emit a named algebra as a spec file. Exit codes: 0 success, 1 I/O error,
//! 2 validation failure, 3 capacity or step limitation.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use carnot_core::error::Error;
use carnot_core::ratio::format_ratio;
use carnot_core::{algebra, bounds, cohomology, exterior, isotropic, metric, rumin};
use carnot_core::{CarnotAlgebra, GroupElement};

const SPEC_VERSION: &str = "carnot-bounds/1";

#[derive(Parser)]
#[command(name = "carnot", disable_version_flag = true)]
struct Cli {
    /// Print the spec version string and exit.
    #[arg(long, short = 'V')]
    version: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate an algebra description.
    Validate(FileArgs),
    /// Dimensions, strata, weights and the form-space table.
    Info(FileArgs),
    /// Bigraded cohomology dimensions H^(q,w).
    Cohomology(FileArgs),
    /// The splitting E + im d0 + F and its identity checks.
    Rumin(FileArgs),
    /// Search for regular isotropic k-planes.
    Isotropic(IsotropicArgs),
    /// Holder exponent bounds with provenance.
    Bounds(BoundsArgs),
    /// Monte Carlo and optimization experiments (step-2 groups).
    #[command(subcommand)]
    Lab(LabCommand),
    /// Emit a builtin algebra as a spec document.
    Builtin(BuiltinArgs),
}

#[derive(Args)]
struct FileArgs {
    /// Path to the algebra JSON document.
    file: String,
    /// Machine-readable JSON output.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct IsotropicArgs {
    file: String,
    /// Plane dimension to search for.
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BoundsArgs {
    file: String,
    /// Trials per plane dimension for the richness-bound search.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum LabCommand {
    /// Volume of gauge balls across scales; fits the scaling exponent.
    Volume(VolumeArgs),
    /// Volume of the flow tube over a gauge box.
    Tube(TubeArgs),
    /// Upper bound for the Carnot-Caratheodory distance (Heisenberg only).
    Ccdist(CcdistArgs),
}

#[derive(Args)]
struct VolumeArgs {
    file: String,
    /// Comma-separated gauge radii.
    #[arg(long, default_value = "0.5,0.75,1.0,1.5,2.0", value_delimiter = ',')]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct TubeArgs {
    file: String,
    /// Comma-separated box scales.
    #[arg(long, default_value = "0.05,0.1,0.2", value_delimiter = ',')]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = 200_000)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct CcdistArgs {
    file: String,
    /// Target point x,y,z in exponential coordinates.
    #[arg(long, default_value = "0.0,0.0,1.0", value_delimiter = ',')]
    target: Vec<f64>,
    #[arg(long, default_value_t = 24)]
    segments: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct BuiltinArgs {
    /// One of: abelian, heisenberg, quaternionic_heisenberg, engel,
    /// free_rank2_step3.
    name: String,
    /// Parameter for the parametrized families.
    #[arg(long)]
    m: Option<u32>,
}

fn main() -> ExitCode {
    // Die quietly when the read end of a pipe closes (e.g. `carnot ... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if cli.version {
        println!("{SPEC_VERSION}");
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (try --help)");
        return ExitCode::from(2);
    };
    let json_mode = wants_json(&command);
    match run_command(command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(MainError::Exit(code)) => ExitCode::from(code),
        Err(MainError::Lib(err)) => {
            if json_mode {
                let diag = json!({"error": {"kind": err.kind(), "message": err.to_string()}});
                println!("{diag}");
            } else {
                eprintln!("error: {err}");
            }
            ExitCode::from(exit_code(&err))
        }
    }
}

fn wants_json(command: &Command) -> bool {
    match command {
        Command::Validate(a) | Command::Info(a) | Command::Cohomology(a) | Command::Rumin(a) => {
            a.json
        }
        Command::Isotropic(a) => a.json,
        Command::Bounds(a) => a.json,
        Command::Lab(LabCommand::Volume(a)) => a.json,
        Command::Lab(LabCommand::Tube(a)) => a.json,
        Command::Lab(LabCommand::Ccdist(a)) => a.json,
        Command::Builtin(_) => false,
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::CapacityExceeded { .. } | Error::StepUnsupported { .. } => 3,
        Error::NonStabilization { .. } | Error::NonConvergence { .. } => 1,
        _ => 2,
    }
}

enum MainError {
    Lib(Error),
    Exit(u8),
}

impl From<Error> for MainError {
    fn from(e: Error) -> Self {
        MainError::Lib(e)
    }
}

fn load(path: &str) -> Result<CarnotAlgebra, MainError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {path}: {e}");
        MainError::Exit(1)
    })?;
    let spec = algebra::parse_spec(&text)?;
    Ok(algebra::validate(&spec)?)
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => s,
        None => {
            eprintln!("note: no --seed given, using default seed 0");
            0
        }
    }
}

fn run_command(command: Command) -> Result<(), MainError> {
    match command {
        Command::Validate(args) => {
            let alg = load(&args.file)?;
            if args.json {
                println!(
                    "{}",
                    json!({
                        "name": alg.name,
                        "n": alg.n,
                        "step": alg.step,
                        "strata": alg.strata_dims,
                        "Q": alg.hausdorff_dim,
                        "valid": true,
                    })
                );
            } else {
                println!(
                    "{}: valid Carnot algebra, n={}, step={}, Q={}",
                    alg.name, alg.n, alg.step, alg.hausdorff_dim
                );
            }
            Ok(())
        }
        Command::Info(args) => {
            let alg = load(&args.file)?;
            let space = exterior::FormSpace::new(&alg)?;
            let mut lambda_dims = BTreeMap::new();
            for q in 0..=alg.n {
                for (&w, positions) in space.blocks(q) {
                    lambda_dims.insert(format!("{q},{w}"), positions.len());
                }
            }
            if args.json {
                println!(
                    "{}",
                    json!({
                        "name": alg.name,
                        "n": alg.n,
                        "step": alg.step,
                        "strata": alg.strata_dims,
                        "Q": alg.hausdorff_dim,
                        "lambda_dims": lambda_dims,
                    })
                );
            } else {
                println!("name:   {}", alg.name);
                println!("n:      {}", alg.n);
                println!("step:   {}", alg.step);
                println!("strata: {:?}", alg.strata_dims);
                println!("Q:      {}", alg.hausdorff_dim);
                println!("dim Lambda^(q,w):");
                for q in 0..=alg.n {
                    let row: Vec<String> = space
                        .blocks(q)
                        .iter()
                        .map(|(w, p)| format!("w={w}:{}", p.len()))
                        .collect();
                    println!("  q={q}  {}", row.join("  "));
                }
            }
            Ok(())
        }
        Command::Cohomology(args) => {
            let alg = load(&args.file)?;
            let table = cohomology::compute_cohomology(&alg)?;
            if args.json {
                let dims: BTreeMap<String, usize> = table
                    .dims
                    .iter()
                    .map(|((q, w), d)| (format!("{q},{w}"), *d))
                    .collect();
                println!("{}", json!({"dims": dims, "betti": table.betti}));
            } else {
                println!("H^(q,w) dimensions for {}:", alg.name);
                for ((q, w), d) in &table.dims {
                    println!("  H^({q},{w}) = {d}");
                }
                println!("betti: {:?}", table.betti);
            }
            Ok(())
        }
        Command::Rumin(args) => {
            let alg = load(&args.file)?;
            let data = rumin::build_rumin(&alg)?;
            let table = cohomology::compute_cohomology(&alg)?;
            let report = rumin::verify_rumin_identities(&data, &alg, &table);
            let dims_e: Vec<usize> = data
                .degrees
                .iter()
                .map(|d| d.harmonic_basis.cols())
                .collect();
            let dims_f: Vec<usize> = data
                .degrees
                .iter()
                .map(|d| d.complement_basis.cols())
                .collect();
            let dims_im: Vec<usize> = data.degrees.iter().map(|d| d.image_basis.cols()).collect();
            if args.json {
                let checks: Vec<Value> = report
                    .checks
                    .iter()
                    .map(|c| json!({"name": c.name, "ok": c.ok}))
                    .collect();
                println!(
                    "{}",
                    json!({
                        "dims": {"E": dims_e, "F": dims_f, "im_d0": dims_im},
                        "checks": checks,
                        "all_ok": report.all_ok(),
                    })
                );
            } else {
                println!("splitting dimensions per degree for {}:", alg.name);
                println!("  E     = {dims_e:?}");
                println!("  im d0 = {dims_im:?}");
                println!("  F     = {dims_f:?}");
                for c in &report.checks {
                    println!("  [{}] {}", if c.ok { "ok" } else { "FAIL" }, c.name);
                }
            }
            Ok(())
        }
        Command::Isotropic(args) => {
            let alg = load(&args.file)?;
            let seed = resolve_seed(args.seed);
            let outcome = isotropic::random_search(&alg, args.k, args.trials, seed);
            let d0_level_note = alg.step >= 3;
            let cross = match &outcome.found {
                None => None,
                Some(plane) => {
                    let table = cohomology::compute_cohomology(&alg)?;
                    Some(isotropic::cross_check_weight_vanishing(&alg, plane, &table))
                }
            };
            if args.json {
                let basis: Option<Vec<Vec<String>>> = outcome.found.as_ref().map(|p| {
                    (0..p.basis.cols())
                        .map(|c| p.basis.column(c).iter().map(format_ratio).collect())
                        .collect()
                });
                println!(
                    "{}",
                    json!({
                        "k": args.k,
                        "seed": seed,
                        "trials": args.trials,
                        "trials_run": outcome.trials_run,
                        "samples_drawn": outcome.samples_drawn,
                        "found": outcome.found.is_some(),
                        "basis": basis,
                        "d0_level_only": d0_level_note,
                        "cross_check_ok": cross.as_ref().map(|c| c.all_ok()),
                    })
                );
            } else {
                println!(
                    "search for regular isotropic {}-planes in {} (seed {seed}, {} trials)",
                    args.k, alg.name, args.trials
                );
                if d0_level_note {
                    println!(
                        "note: step {} >= 3, verdicts refer to the weight-graded differential only",
                        alg.step
                    );
                }
                match &outcome.found {
                    Some(plane) => {
                        println!("found after {} trials; basis columns:", outcome.trials_run);
                        for c in 0..plane.basis.cols() {
                            let col: Vec<String> =
                                plane.basis.column(c).iter().map(format_ratio).collect();
                            println!("  [{}]", col.join(", "));
                        }
                        if let Some(cross) = &cross {
                            println!(
                                "cohomology vanishing cross-check: {}",
                                if cross.all_ok() { "ok" } else { "FAILED" }
                            );
                        }
                    }
                    None => println!("none found in {} trials", outcome.trials_run),
                }
            }
            Ok(())
        }
        Command::Bounds(args) => {
            let alg = load(&args.file)?;
            let seed = resolve_seed(args.seed);
            let table = cohomology::compute_cohomology(&alg)?;
            let h = alg.horizontal_dim();
            let mut verified = Vec::new();
            for k in 1..=h {
                if !isotropic::dimension_check(h, alg.n, k) {
                    continue;
                }
                if isotropic::random_search(&alg, k, args.trials, seed)
                    .found
                    .is_some()
                {
                    verified.push(k);
                }
            }
            let report = bounds::holder_report(&alg, &table, &verified);
            if args.json {
                let uppers: Vec<Value> = report
                    .uppers
                    .iter()
                    .map(|u| {
                        json!({
                            "value": format_ratio(&u.value),
                            "rule": u.rule.to_string(),
                            "cite": u.cite,
                        })
                    })
                    .collect();
                let w_alg: BTreeMap<String, u32> = report
                    .w_alg
                    .iter()
                    .map(|(q, w)| (q.to_string(), *w))
                    .collect();
                println!(
                    "{}",
                    json!({
                        "lower": format_ratio(&report.lower),
                        "uppers": uppers,
                        "best_upper": format_ratio(&report.best_upper),
                        "W_alg": w_alg,
                    })
                );
            } else {
                println!(
                    "Holder exponent bounds for {} (n={}, Q={}, step={}):",
                    alg.name, report.n, report.hausdorff_dim, report.step
                );
                println!("  lower bound: {}", format_ratio(&report.lower));
                for u in &report.uppers {
                    println!(
                        "  upper {} via {} [{}]",
                        format_ratio(&u.value),
                        u.rule,
                        u.cite
                    );
                }
                println!("  best upper: {}", format_ratio(&report.best_upper));
                if !verified.is_empty() {
                    println!("  regular isotropic planes verified for k = {verified:?}");
                }
            }
            Ok(())
        }
        Command::Lab(lab) => run_lab(lab),
        Command::Builtin(args) => {
            let alg = algebra::builtin(&args.name, args.m)?;
            println!("{}", algebra::serialize_spec(&alg.to_spec()));
            Ok(())
        }
    }
}

fn run_lab(lab: LabCommand) -> Result<(), MainError> {
    match lab {
        LabCommand::Volume(args) => {
            let alg = load(&args.file)?;
            let seed = resolve_seed(args.seed);
            let result =
                metric::volume::volume_scaling_experiment(&alg, &args.eps, args.samples, seed)?;
            if args.csv {
                println!("parameter,estimate,stderr");
                for p in &result.points {
                    println!("{},{},{}", p.eps, p.volume, p.stderr);
                }
                println!("slope,{},", result.slope);
            } else if args.json {
                let points: Vec<Value> = result
                    .points
                    .iter()
                    .map(|p| json!({"eps": p.eps, "volume": p.volume, "stderr": p.stderr}))
                    .collect();
                println!(
                    "{}",
                    json!({
                        "points": points,
                        "slope": result.slope,
                        "samples": result.samples,
                        "seed": seed,
                    })
                );
            } else {
                println!(
                    "gauge-ball volume scaling ({} samples, seed {seed}):",
                    result.samples
                );
                for p in &result.points {
                    println!(
                        "  eps={:<8} vol={:.6e}  (se {:.2e})",
                        p.eps, p.volume, p.stderr
                    );
                }
                println!("  fitted exponent: {:.4}", result.slope);
            }
            Ok(())
        }
        LabCommand::Tube(args) => {
            let alg = load(&args.file)?;
            let seed = resolve_seed(args.seed);
            let mut rows = Vec::new();
            for &eps in &args.eps {
                rows.push(metric::tube::tube_experiment(
                    &alg,
                    eps,
                    args.tau,
                    args.samples,
                    seed,
                )?);
            }
            if args.csv {
                println!("parameter,estimate,stderr");
                for r in &rows {
                    println!("{},{},{}", r.eps, r.ratio, r.stderr);
                }
            } else if args.json {
                let out: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        json!({
                            "eps": r.eps,
                            "tau": r.tau,
                            "tube_volume": r.tube_volume,
                            "ratio": r.ratio,
                            "stderr": r.stderr,
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    json!({"tau": args.tau, "samples": args.samples, "seed": seed, "rows": out})
                );
            } else {
                println!(
                    "flow-tube volume over gauge boxes (tau={}, {} samples, seed {seed}):",
                    args.tau, args.samples
                );
                for r in &rows {
                    println!(
                        "  eps={:<8} vol(Tube)={:.6e}  ratio vs (tau/eps)vol(B) = {:.4}",
                        r.eps, r.tube_volume, r.ratio
                    );
                }
            }
            Ok(())
        }
        LabCommand::Ccdist(args) => {
            let alg = load(&args.file)?;
            let seed = resolve_seed(args.seed);
            if args.target.len() != 3 {
                return Err(MainError::Lib(Error::InvalidParameter(
                    "--target needs exactly three coordinates".into(),
                )));
            }
            let target = GroupElement::from_coords(&args.target);
            let result = metric::ccdist::cc_distance_upper(
                &alg,
                &target,
                args.segments,
                args.restarts,
                seed,
            )?;
            if args.csv {
                println!("parameter,estimate,stderr");
                println!("length,{},", result.length);
                println!("constraint_violation,{:e},", result.constraint_violation);
            } else if args.json {
                println!(
                    "{}",
                    json!({
                        "target": args.target,
                        "length": result.length,
                        "constraint_violation": result.constraint_violation,
                        "segments": result.segments,
                        "restarts": result.restarts,
                        "seed": seed,
                    })
                );
            } else {
                println!(
                    "distance upper bound to ({}, {}, {}): {:.6}",
                    args.target[0], args.target[1], args.target[2], result.length
                );
                println!(
                    "  segments={}, restarts={}, seed={seed}, constraint violation {:.2e}",
                    result.segments, result.restarts, result.constraint_violation
                );
            }
            Ok(())
        }
    }
}
