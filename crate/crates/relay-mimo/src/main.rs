//! Command-line front end: `run`, `slope`, `validate`, `selftest`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use relay_mimo::analytic::{
    diversity_order, ser_mpsk, MgfEvaluator, SnrModel,
};
use relay_mimo::campaign::{
    analytic_ser, manifest, parse_results, run_spec, slopes, to_csv, to_jsonl, CampaignSpec,
    CliError,
};
use relay_mimo::config::SystemConfig;
use relay_mimo::harness::{run_point, CsiMode, StopRule};
use relay_mimo::ostbc::Constellation;

#[derive(Parser)]
#[command(name = "relay-mimo", version, about = "Two-way AF MIMO relay OSTBC simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a campaign spec and write a result table plus run manifest.
    Run {
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the seed in the spec.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores). Results are identical for
        /// any value.
        #[arg(long)]
        workers: Option<usize>,
        /// Output path; stdout when omitted (manifest is skipped then).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Fit log-log slopes (diversity estimates) on a result file.
    Slope {
        /// Result file produced by `run` (CSV or JSONL).
        results: PathBuf,
        /// Number of highest-SNR points in the fit.
        #[arg(long, default_value_t = 2)]
        points: usize,
        /// Optional campaign spec; prints the theoretical diversity order
        /// when the scenario is covered by the analysis.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Parse and validate a campaign spec without running it.
    Validate {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Fast internal cross-checks of the numerical machinery.
    Selftest {
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn set_workers(workers: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = workers {
        if n == 0 {
            return Err(CliError::Config("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn cmd_run(
    spec_path: &PathBuf,
    seed: Option<u64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
    format: Format,
) -> Result<(), CliError> {
    set_workers(workers)?;
    let spec = CampaignSpec::load(spec_path)?;
    let effective_seed = seed.unwrap_or(spec.campaign.seed);
    let rows = run_spec(&spec, seed)?;
    let (text, fmt_name) = match format {
        Format::Csv => (to_csv(&rows), "csv"),
        Format::Jsonl => (to_jsonl(&rows), "jsonl"),
    };
    match out {
        Some(path) => {
            std::fs::write(&path, text)?;
            let mpath = path.with_extension(format!(
                "{}manifest.toml",
                path.extension().map(|e| format!("{}.", e.to_string_lossy())).unwrap_or_default()
            ));
            std::fs::write(&mpath, manifest(&spec, effective_seed, fmt_name))?;
            eprintln!("wrote {} and {}", path.display(), mpath.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_slope(results: &PathBuf, points: usize, spec: Option<PathBuf>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(results)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", results.display())))?;
    let rows = parse_results(&text)?;
    for (mode, slope) in slopes(&rows, points)? {
        println!("{mode}\t{slope:.4}");
    }
    if let Some(spec_path) = spec {
        let spec = CampaignSpec::load(&spec_path)?;
        let cfg = spec.system_config(0.0);
        let model = SnrModel::from_config(&cfg, 1, false);
        match diversity_order(&model) {
            Ok(d) => println!(
                "theory\t{}{}",
                d.order,
                if d.extrapolated { " (extrapolated)" } else { "" }
            ),
            Err(_) => println!("theory\tnot covered for this antenna configuration"),
        }
    }
    Ok(())
}

fn cmd_validate(spec_path: &PathBuf) -> Result<(), CliError> {
    let spec = CampaignSpec::load(spec_path)?;
    println!(
        "ok: {} SNR points, {} mode(s), seed {}",
        spec.campaign.snr_db.len(),
        spec.campaign.modes.len(),
        spec.campaign.seed
    );
    Ok(())
}

/// Quick cross-checks: each exercises an independent route through the
/// numerics and fails with exit code 2 on disagreement.
fn cmd_selftest(workers: Option<usize>) -> Result<(), CliError> {
    set_workers(workers)?;
    let check = |name: &str, ok: bool, detail: String| {
        if ok {
            println!("ok   {name}");
            Ok(())
        } else {
            println!("FAIL {name}: {detail}");
            Err(CliError::CrossCheck(format!("{name}: {detail}")))
        }
    };

    // m.g.f. normalization and the closed-form/quadrature Hankel routes
    // (the evaluator itself raises CrossCheck on route disagreement).
    let model = SnrModel::estimated(2, 2, 2, 1, 1, 1.0, 10.0, 1.0);
    let ev = MgfEvaluator::new(model.clone());
    let m0 = ev.mgf(0.0)?;
    check("mgf-normalization", (m0 - 1.0).abs() < 1e-9, format!("M(0) = {m0}"))?;
    for s in [0.1, 1.0, 10.0, 100.0] {
        ev.mgf(s)?;
    }
    check("mgf-route-agreement", true, String::new())?;

    // closed-form BPSK vs quadrature on a q = 1 scenario
    let q1 = SnrModel::estimated(1, 2, 2, 1, 1, 1.0, 10.0, 1.0);
    let cf = relay_mimo::analytic::bpsk_q1_closed_form(&q1)?;
    let quad = ser_mpsk(&q1, 2)?;
    check("bpsk-closed-form", (cf - quad).abs() < 1e-8, format!("{cf} vs {quad}"))?;

    // simulator determinism and zero-noise sanity
    let cfg = SystemConfig::symmetric_alamouti(2, 2, 1, 10.0, Constellation::psk(2).unwrap());
    let stop = StopRule { max_trials: 2_000, min_error_events: u64::MAX };
    let a = run_point(&cfg, 10.0, CsiMode::Estimated, 42, stop);
    let b = run_point(&cfg, 10.0, CsiMode::Estimated, 42, stop);
    check(
        "simulator-determinism",
        a.symbol_errors == b.symbol_errors && a.bit_errors == b.bit_errors,
        format!("{} vs {}", a.symbol_errors, b.symbol_errors),
    )?;

    // simulated perfect-CSI point against the analytical engine (loose
    // binomial tolerance)
    let stop = StopRule { max_trials: 200_000, min_error_events: 400 };
    let sim = run_point(&cfg, 10.0, CsiMode::Perfect, 7, stop);
    let mut pcfg = cfg.clone();
    pcfg.gamma_bar_1 = 10.0;
    pcfg.gamma_bar_2 = 10.0;
    let reference = analytic_ser(&pcfg, true)?;
    let z = (sim.ber() - reference).abs() / sim.ci95_ber().max(1e-12) * 1.96;
    check(
        "sim-vs-analytic-perfect-csi",
        z < 4.0,
        format!("ber {} vs {reference} (z = {z:.2})", sim.ber()),
    )?;

    println!("selftest passed");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run { spec, seed, workers, out, format } => cmd_run(&spec, seed, workers, out, format),
        Cmd::Slope { results, points, spec } => cmd_slope(&results, points, spec),
        Cmd::Validate { spec } => cmd_validate(&spec),
        Cmd::Selftest { workers } => cmd_selftest(workers),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
