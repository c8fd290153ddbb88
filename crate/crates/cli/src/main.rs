//! Command-line front end: config-driven estimators, the case runner and
//! report merging. JSON results, CSV traces, deterministic for a fixed seed.
//!
//! Exit codes: 0 all pass, 1 a case failed, 2 invalid input or config,
//! 3 internal error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use campanato::cases::{all_case_ids, run_case, CaseResult, Verdict};
use campanato::config::ExperimentConfig;
use campanato::domain::{check_property_a, validate_atlas, DomainDescriptor};
use campanato::error::{Error, Result};
use campanato::extend::{
    atlas_extend, mcshane_extend, reflect_extend, AtlasExtendOptions, McShaneConfig,
};
use campanato::field::{make_partition_of_unity, ScalarField};
use campanato::metric::MetricParams;
use campanato::report::{to_json, write_json, write_trace_csv};
use campanato::seminorm::estimate_seminorm;

#[derive(Parser)]
#[command(
    name = "campanato",
    about = "Anisotropic Campanato/BMO seminorm estimation and extension operators",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Seminorm estimators.
    Seminorm {
        #[command(subcommand)]
        command: SeminormCommand,
    },
    /// Domain checks.
    Domain {
        #[command(subcommand)]
        command: DomainCommand,
    },
    /// Extension operators.
    Extend {
        #[command(subcommand)]
        command: ExtendCommand,
    },
    /// The case catalog.
    Case {
        #[command(subcommand)]
        command: CaseCommand,
    },
    /// Report aggregation.
    Report {
        #[command(subcommand)]
        command: ReportCommand,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to the experiment configuration (JSON).
    #[arg(short = 'c', long = "config")]
    config: PathBuf,
    /// Output directory; results print to stdout when absent.
    #[arg(long = "out")]
    out: Option<PathBuf>,
    /// Extra refinement rounds on top of the configured sampler.
    #[arg(long = "refine")]
    refine: Option<usize>,
}

#[derive(Subcommand)]
enum SeminormCommand {
    /// Estimate the configured seminorm of the configured field.
    Estimate(ConfigArgs),
}

#[derive(Subcommand)]
enum DomainCommand {
    /// Verify property (A): |B ∩ Ω| >= c r^(N_gamma) over sampled centers.
    CheckA(ConfigArgs),
}

#[derive(Subcommand)]
enum ExtendCommand {
    /// Even reflection across the graph of an elementary domain, with the
    /// seminorm comparison of the extension against the original.
    Reflect(ConfigArgs),
    /// McShane inf-convolution of the configured boundary function.
    Mcshane(ConfigArgs),
    /// Atlas extension of the configured field via a partition of unity.
    Atlas(ConfigArgs),
}

#[derive(Subcommand)]
enum CaseCommand {
    /// Run one case by id.
    Run {
        id: String,
        #[arg(long = "seed", default_value_t = 42)]
        seed: u64,
        #[arg(long = "out", default_value = "out")]
        out: PathBuf,
    },
    /// Run the whole catalog.
    RunAll {
        #[arg(long = "seed", default_value_t = 42)]
        seed: u64,
        #[arg(long = "out", default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Merge case result JSON files from a directory into one CSV summary.
    Merge { dir: PathBuf },
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// CAMPANATO_THREADS caps the case-runner parallelism; 0 or unset = auto.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("CAMPANATO_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Seminorm {
            command: SeminormCommand::Estimate(args),
        } => cmd_seminorm_estimate(&args),
        Command::Domain {
            command: DomainCommand::CheckA(args),
        } => cmd_check_a(&args),
        Command::Extend { command } => match command {
            ExtendCommand::Reflect(args) => cmd_extend_reflect(&args),
            ExtendCommand::Mcshane(args) => cmd_extend_mcshane(&args),
            ExtendCommand::Atlas(args) => cmd_extend_atlas(&args),
        },
        Command::Case { command } => match command {
            CaseCommand::Run { id, seed, out } => cmd_case_run(&id, seed, &out),
            CaseCommand::RunAll { seed, out } => cmd_case_run_all(seed, &out),
        },
        Command::Report {
            command: ReportCommand::Merge { dir },
        } => cmd_report_merge(&dir),
    }
}

fn load_config(args: &ConfigArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(extra) = args.refine {
        cfg.sampler.refinement_rounds += extra;
    }
    Ok(cfg)
}

fn emit<T: serde::Serialize>(value: &T, out: &Option<PathBuf>, file: &str) -> Result<()> {
    match out {
        Some(dir) => {
            let path = dir.join(file);
            write_json(value, &path)?;
            println!("wrote {}", path.display());
        }
        None => println!("{}", to_json(value)?),
    }
    Ok(())
}

fn cmd_seminorm_estimate(args: &ConfigArgs) -> Result<ExitCode> {
    let cfg = load_config(args)?;
    let domain = cfg.require_domain()?;
    let spec = cfg.require_seminorm()?;
    let field = cfg.build_field()?;
    let report = estimate_seminorm(&field, domain, spec, &cfg.sampler)?;
    if let Some(dir) = &args.out {
        write_trace_csv(
            ("r", "ratio"),
            &report.per_radius_trace,
            &dir.join("seminorm.perRadiusTrace.csv"),
        )?;
    }
    emit(&report, &args.out, "seminorm.json")?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_check_a(args: &ConfigArgs) -> Result<ExitCode> {
    let cfg = load_config(args)?;
    let domain = cfg.require_domain()?;
    let m = cfg.metric.build()?;
    let report = check_property_a(domain, &m, &cfg.sampler)?;
    if let Some(dir) = &args.out {
        write_trace_csv(
            ("r", "minRatio"),
            &report.trace,
            &dir.join("propertyA.trace.csv"),
        )?;
    }
    emit(&report, &args.out, "propertyA.json")?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_extend_reflect(args: &ConfigArgs) -> Result<ExitCode> {
    let cfg = load_config(args)?;
    let domain = cfg.require_domain()?.clone();
    if !matches!(domain, DomainDescriptor::Elementary(_)) {
        return Err(Error::invalid(
            "extend reflect requires an elementary domain (the subgraph of a Hölder function)",
        ));
    }
    let spec = cfg.require_seminorm()?;
    let field = cfg.build_field()?;
    let tilde = reflect_extend(&field)?;
    let omega_est = estimate_seminorm(&field, &domain, spec, &cfg.sampler)?;
    let full = DomainDescriptor::FullSpace {
        dim: cfg.metric.dimension,
    };
    let rn_est = estimate_seminorm(&tilde, &full, spec, &cfg.sampler)?;
    let summary = serde_json::json!({
        "field": field.label(),
        "omegaEstimate": omega_est.estimate,
        "extendedEstimate": rn_est.estimate,
        "ratio": if omega_est.estimate > 0.0 { rn_est.estimate / omega_est.estimate } else { f64::NAN },
        "omegaWitness": omega_est.witness_ball,
        "extendedWitness": rn_est.witness_ball,
    });
    emit(&summary, &args.out, "reflect.json")?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_extend_mcshane(args: &ConfigArgs) -> Result<ExitCode> {
    let cfg = load_config(args)?;
    let section = cfg.require_mcshane()?;
    let ext = mcshane_extend(
        &section.phi,
        &section.window,
        section.gamma,
        section.lip,
        McShaneConfig::default(),
    )?;
    // Profile trace over an interval spanning three window widths
    // (dimension N = 2, so the window is one-dimensional).
    let mut profile = Vec::new();
    if section.window.len() == 1 {
        let (lo, hi) = section.window[0];
        let span = hi - lo;
        let n = 512;
        for i in 0..=n {
            let t = lo - span + 3.0 * span * i as f64 / n as f64;
            profile.push((t, ext.eval(&[t])));
        }
        if let Some(dir) = &args.out {
            write_trace_csv(
                ("x", "phiTilde"),
                &profile,
                &dir.join("mcshane.profile.csv"),
            )?;
        }
    }
    let summary = serde_json::json!({
        "lipUsed": ext.lip(),
        "window": section.window,
        "gamma": section.gamma,
        "profilePoints": profile.len(),
    });
    emit(&summary, &args.out, "mcshane.json")?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_extend_atlas(args: &ConfigArgs) -> Result<ExitCode> {
    let cfg = load_config(args)?;
    let domain = cfg.require_domain()?.clone();
    let DomainDescriptor::AtlasDomain(atlas) = &domain else {
        return Err(Error::invalid("extend atlas requires an atlas domain"));
    };
    let validation = validate_atlas(atlas, &domain, &cfg.sampler)?;
    if !validation.passed() {
        return Err(Error::Precondition(format!(
            "atlas validation failed: {}",
            to_json(&validation)?
        )));
    }
    let field = cfg.build_field()?;
    let pou = make_partition_of_unity(atlas)?;
    let m = MetricParams::new(domain.dim(), atlas.gamma)?;
    pou.check_coverage(&domain, &m, &cfg.sampler)?;
    let parts: Vec<(ScalarField, usize)> = (0..pou.len())
        .map(|k| (pou.member_field(k).product_with(&field), k))
        .collect();
    let result = atlas_extend(
        &parts,
        atlas,
        &domain,
        &cfg.sampler,
        &AtlasExtendOptions::default(),
    )?;
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(
            dir.join("atlas.provenance.txt"),
            result.provenance.join("\n") + "\n",
        )?;
    }
    let summary = serde_json::json!({
        "patches": atlas.patches.len(),
        "maxRestrictionError": result.max_restriction_error,
        "provenance": result.provenance,
    });
    emit(&summary, &args.out, "atlas.json")?;
    Ok(ExitCode::SUCCESS)
}

fn write_case_outputs(result: &CaseResult, out: &Path) -> Result<()> {
    write_json(result, &out.join(format!("{}.json", result.case_id)))?;
    for (name, series) in &result.traces {
        write_trace_csv(
            ("x", "y"),
            series,
            &out.join(format!("{}.{}.csv", result.case_id, name)),
        )?;
    }
    Ok(())
}

fn verdict_line(result: &CaseResult) -> String {
    let v = match result.verdict {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Inconclusive => "INCONCLUSIVE",
    };
    format!("case {:<24} {}", result.case_id, v)
}

fn cmd_case_run(id: &str, seed: u64, out: &Path) -> Result<ExitCode> {
    let result = run_case(id, seed)?;
    write_case_outputs(&result, out)?;
    println!("{}", verdict_line(&result));
    for a in result.assertions.iter().filter(|a| !a.passed) {
        println!("  failed: {} — {}", a.name, a.detail);
    }
    Ok(if result.verdict == Verdict::Pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_case_run_all(seed: u64, out: &Path) -> Result<ExitCode> {
    use rayon::prelude::*;
    let ids = all_case_ids();
    let results: Vec<Result<CaseResult>> = ids.par_iter().map(|id| run_case(id, seed)).collect();
    let mut all = Vec::with_capacity(results.len());
    for r in results {
        all.push(r?);
    }
    for result in &all {
        write_case_outputs(result, out)?;
        println!("{}", verdict_line(result));
    }
    write_json(&all, &out.join("summary.json"))?;
    let any_fail = all.iter().any(|r| r.verdict != Verdict::Pass);
    Ok(if any_fail {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_report_merge(dir: &Path) -> Result<ExitCode> {
    let mut rows: BTreeMap<(String, String), f64> = BTreeMap::new();
    let mut verdicts: BTreeMap<String, String> = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().map(|e| e == "json") != Some(true) {
            continue;
        }
        let text = std::fs::read_to_string(&path)?;
        let Ok(value) = serde_json::from_str::<serde_json::Value>(&text) else {
            continue;
        };
        // Accept single case results and arrays of them (summary.json).
        let items: Vec<&serde_json::Value> = match value.as_array() {
            Some(arr) => arr.iter().collect(),
            None => vec![&value],
        };
        for item in items {
            let Some(case_id) = item.get("caseId").and_then(|v| v.as_str()) else {
                continue;
            };
            let verdict = item
                .get("verdict")
                .and_then(|v| v.as_str())
                .unwrap_or("unknown");
            verdicts.insert(case_id.to_string(), verdict.to_string());
            if let Some(metrics) = item.get("metrics").and_then(|v| v.as_object()) {
                for (k, v) in metrics {
                    if let Some(x) = v.as_f64() {
                        rows.insert((case_id.to_string(), k.clone()), x);
                    }
                }
            }
        }
    }
    if verdicts.is_empty() {
        return Err(Error::invalid(format!(
            "no case result JSON files found in {}",
            dir.display()
        )));
    }
    let mut csv = String::from("caseId,verdict,metric,value\n");
    for ((case_id, metric), value) in &rows {
        csv.push_str(&format!(
            "{case_id},{},{metric},{value}\n",
            verdicts[case_id]
        ));
    }
    let out_path = dir.join("summary.csv");
    std::fs::write(&out_path, &csv)?;
    println!("wrote {}", out_path.display());
    Ok(ExitCode::SUCCESS)
}
