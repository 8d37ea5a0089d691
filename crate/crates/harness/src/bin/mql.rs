use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mql_core::recovery::{decode_matrix, encode_probe, probe_observation};
use mql_core::{Rational, Vector};
use mql_harness::bounds::{dyadic_grid, sweep, DEFAULT_C};
use mql_harness::config::RawConfig;
use mql_harness::emit::{emit_bounds, emit_results};
use mql_harness::experiment::{run_experiment, ExperimentResult};
use mql_harness::io::{read_alphabet, read_matrix};
use mql_harness::verify::{run_criterion, CRITERIA};

#[derive(Parser)]
#[command(
    name = "mql",
    version,
    about = "Query-model experiments for zero-sum matrix games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a learner against a fixed matrix.
    Solve {
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[command(flatten)]
        learner: LearnerArgs,
        /// exact | float
        #[arg(long)]
        mode: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a learner against an adaptive adversary.
    Adversary {
        #[arg(long, value_enum, default_value = "exact")]
        mode: AdversaryMode,
        #[arg(long)]
        k: usize,
        /// Learner budget; also the approximate adversary's horizon.
        #[arg(long = "T", alias = "t")]
        horizon: usize,
        #[arg(long, default_value = "uniform")]
        learner: String,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Encode a one-query probe for an alphabet and decode a matrix from it.
    Recover {
        #[arg(long)]
        alphabet: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Sweep the bound formulas over eps = 2^-1 .. 2^-n.
    Bounds {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_C)]
        c: f64,
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// CSV output path (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance checks.
    Verify {
        #[arg(long)]
        criterion: Option<usize>,
    },
    /// Run an experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct LearnerArgs {
    #[arg(long, default_value = "uniform")]
    learner: String,
    #[arg(long = "T", alias = "t")]
    horizon: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long)]
    repetitions: Option<usize>,
    /// Directory for CSV/JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config overrides, `key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AdversaryMode {
    Exact,
    Approx,
}

fn set_opt<T: ToString>(raw: &mut RawConfig, key: &str, v: &Option<T>) -> anyhow::Result<()> {
    if let Some(v) = v {
        raw.set(key, &v.to_string())?;
    }
    Ok(())
}

fn apply_common(raw: &mut RawConfig, common: &CommonArgs) -> anyhow::Result<()> {
    set_opt(raw, "repetitions", &common.repetitions)?;
    set_opt(
        raw,
        "output.dir",
        &common.out.as_ref().map(|p| p.display().to_string()),
    )?;
    for pair in &common.set {
        raw.set_pair(pair)?;
    }
    Ok(())
}

fn run_and_report(raw: &RawConfig) -> anyhow::Result<()> {
    let config = raw.build()?;
    let result = run_experiment(&config)?;
    print_result(&result);
    if let Some(dir) = &config.output_dir {
        emit_results(dir, &result)?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}

fn print_result(result: &ExperimentResult) {
    for r in &result.runs {
        let gap = mql_harness::emit::decimal(&r.gap);
        print!(
            "rep {} seed {}: {} vs {} K={} queries={} gap={gap}",
            r.repetition, r.seed, r.learner, r.oracle, r.k, r.queries_used
        );
        if let Some(w) = &r.witness_kind {
            print!(" witness={w}");
        }
        if let Some(ok) = r.certificate_holds {
            print!(" certificate={}", if ok { "ok" } else { "VIOLATED" });
        }
        println!();
    }
    let s = &result.summary;
    println!(
        "summary: {} runs, gap mean {:.6e} min {:.6e} max {:.6e}, {} queries",
        s.runs, s.mean_gap, s.min_gap, s.max_gap, s.total_queries
    );
}

fn recover(alphabet: &Path, k: usize, matrix: &Path) -> anyhow::Result<bool> {
    let alphabet = read_alphabet(alphabet)?;
    let m = read_matrix::<Rational>(matrix)?;
    if m.k() != k {
        bail!("matrix is {}x{}, expected K = {k}", m.k(), m.k());
    }
    let probe = encode_probe(&alphabet, k)?;
    let observed = probe_observation(&m, &probe);
    let show = |v: Vector<Rational>| v.to_canonical().join(" ");
    println!("probe: {}", show(probe.weights().clone()));
    println!("observation: {}", show(observed.clone()));
    match decode_matrix(&alphabet, k, &observed) {
        Ok(d) => {
            println!("decoded:");
            for i in 0..k {
                println!("  {}", show(d.matrix().row(i)));
            }
            let ok = d.matrix() == m.matrix();
            println!("round trip: {}", if ok { "ok" } else { "MISMATCH" });
            Ok(ok)
        }
        Err(e) => {
            println!("decode failed: {e}");
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Solve {
            matrix,
            learner,
            mode,
            common,
        } => {
            let mut raw = RawConfig::default();
            raw.set("oracle.kind", "fixed")?;
            set_opt(
                &mut raw,
                "oracle.matrix",
                &matrix.map(|p| p.display().to_string()),
            )?;
            raw.set("learner.kind", &learner.learner)?;
            set_opt(&mut raw, "learner.T", &learner.horizon)?;
            set_opt(&mut raw, "learner.eta", &learner.eta)?;
            set_opt(&mut raw, "learner.seed", &learner.seed)?;
            set_opt(&mut raw, "mode", &mode)?;
            apply_common(&mut raw, &common)?;
            run_and_report(&raw)?;
        }
        Command::Adversary {
            mode,
            k,
            horizon,
            learner,
            eta,
            seed,
            common,
        } => {
            let mut raw = RawConfig::default();
            match mode {
                AdversaryMode::Exact => raw.set("oracle.kind", "exact_adversary")?,
                AdversaryMode::Approx => {
                    raw.set("oracle.kind", "approx_adversary")?;
                    raw.set("oracle.T", &horizon.to_string())?;
                }
            }
            raw.set("k", &k.to_string())?;
            raw.set("mode", "exact")?;
            raw.set("learner.kind", &learner)?;
            raw.set("learner.T", &horizon.to_string())?;
            set_opt(&mut raw, "learner.eta", &eta)?;
            set_opt(&mut raw, "learner.seed", &seed)?;
            apply_common(&mut raw, &common)?;
            run_and_report(&raw)?;
        }
        Command::Recover {
            alphabet,
            k,
            matrix,
        } => return recover(&alphabet, k, &matrix),
        Command::Bounds { k, c, n, out } => {
            let records = sweep(k, &dyadic_grid(n), c)?;
            match out {
                Some(path) => {
                    let f = std::fs::File::create(&path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    emit_bounds(f, &records)?;
                }
                None => emit_bounds(std::io::stdout().lock(), &records)?,
            }
        }
        Command::Verify { criterion } => {
            let reports = match criterion {
                Some(id) => vec![run_criterion(id)
                    .with_context(|| format!("criteria are numbered 1..={}", CRITERIA.len()))?],
                None => CRITERIA.iter().map(|f| f()).collect(),
            };
            let mut all = true;
            for r in &reports {
                println!("{r}");
                all &= r.passed();
            }
            return Ok(all);
        }
        Command::Run { config, common } => {
            let mut raw = RawConfig::load(&config)?;
            apply_common(&mut raw, &common)?;
            run_and_report(&raw)?;
        }
    }
    Ok(true)
}
