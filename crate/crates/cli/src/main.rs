//! CLI for the torus Strichartz-estimate laboratory.
//!
//! Subcommands e1..e6 run the sweeps and persist records, summaries,
//! verdicts and plot data under `--out`; `evolve` and `kernel` are
//! one-shot dumps. Exit codes: 0 success, 1 configuration/usage error,
//! 2 numerical degeneracy, 3 resource/I-O error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use strichartz_core::bump::BumpProfile;
use strichartz_core::error::{Error, Result};
use strichartz_core::experiments::{
    run_elliptic_compare, run_kernel_sweep, run_lp_sweep, run_optimality, run_sobolev,
    run_strichartz_sweep, ExperimentId, SweepConfig, SweepOutcome,
};
use strichartz_core::kernel::{default_zgrid, kernel_1d};
use strichartz_core::output::{write_atomic, write_records_csv, write_records_json, write_series};
use strichartz_core::propagator::{evolve, EvolutionKind};
use strichartz_core::spectral::{make_grid, synthesize, Dim, SpectralField};
use strichartz_core::util::GaussianStream;

#[derive(Parser)]
#[command(
    name = "strichartz",
    version,
    about = "Numerical laboratory for space-time estimates of the periodic \
             non-elliptic Schrödinger evolution",
    propagate_version = true
)]
struct Cli {
    /// TOML file overriding the experiment's default sweep parameters
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for records, summaries, verdicts and plot data
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,

    /// Base seed for every randomized estimator
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 = all available cores)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Result file format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    NonElliptic,
    Elliptic,
}

#[derive(Subcommand)]
enum Command {
    /// E1: best-constant growth over the full frequency box (loss 1/p)
    #[command(name = "e1-strichartz")]
    E1Strichartz,
    /// E2: frequency-localised constant vs scale h, full and short window
    #[command(name = "e2-lp")]
    E2Lp,
    /// E3: dispersive kernel ceilings and the window fraction α̂
    #[command(name = "e3-kernel")]
    E3Kernel,
    /// E4: stationary-family ratio growth (sharpness exponent 1/p - s)
    #[command(name = "e4-optimality")]
    E4Optimality,
    /// E5: Sobolev embedding scaling on the circle
    #[command(name = "e5-sobolev")]
    E5Sobolev,
    /// E6: elliptic vs non-elliptic localised sweep (exploratory)
    #[command(name = "e6-elliptic")]
    E6Elliptic,
    /// One-shot propagation dump of a seeded random field
    Evolve {
        /// Frequency truncation
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, value_enum, default_value_t = KindArg::NonElliptic)]
        kind: KindArg,
        /// Evolution time
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        /// Sobolev weight of the random initial datum
        #[arg(long, default_value_t = 0.0)]
        s: f64,
    },
    /// One-shot dump of the localised 1D kernel table
    Kernel {
        /// Semiclassical scale in (0, 1]
        #[arg(long, default_value_t = 0.125)]
        h: f64,
        /// Evaluation time
        #[arg(long, default_value_t = 0.05)]
        t: f64,
        /// z-grid size (defaults to four points per kernel mode)
        #[arg(long)]
        zgrid: Option<usize>,
    },
}

fn main() {
    // usage problems (unknown flag/subcommand) exit 1 with the usage text
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(1);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Error::resource(format!("cannot size the worker pool: {e}")))?;
    }
    ensure_writable(&cli.out)?;

    match &cli.command {
        Command::E1Strichartz => run_experiment(&cli, ExperimentId::E1, run_strichartz_sweep),
        Command::E2Lp => run_experiment(&cli, ExperimentId::E2, run_lp_sweep),
        Command::E3Kernel => run_experiment(&cli, ExperimentId::E3, run_kernel_sweep),
        Command::E4Optimality => run_experiment(&cli, ExperimentId::E4, run_optimality),
        Command::E5Sobolev => run_experiment(&cli, ExperimentId::E5, run_sobolev),
        Command::E6Elliptic => run_experiment(&cli, ExperimentId::E6, run_elliptic_compare),
        Command::Evolve { n, kind, t, s } => dump_evolve(&cli, *n, *kind, *t, *s),
        Command::Kernel { h, t, zgrid } => dump_kernel(&cli, *h, *t, *zgrid),
    }
}

/// Fail fast (exit 3) before any sweep work if the output directory
/// cannot take files; everything later is written atomically.
fn ensure_writable(out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    let probe = out.join(".write_probe");
    fs::write(&probe, b"")?;
    fs::remove_file(&probe)?;
    Ok(())
}

fn resolve_config(cli: &Cli, experiment: ExperimentId) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::default_for(experiment);
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).map_err(|e| {
            Error::config(format!("cannot read config {}: {e}", path.display()))
        })?;
        cfg = cfg.with_overrides(&text)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_experiment(
    cli: &Cli,
    experiment: ExperimentId,
    runner: impl Fn(&SweepConfig) -> Result<SweepOutcome>,
) -> Result<()> {
    let cfg = resolve_config(cli, experiment)?;
    println!(
        "{} sweep starting (seed {}, config hash {})",
        experiment.as_str(),
        cfg.seed,
        cfg.hash()
    );
    let mut outcome = runner(&cfg)?;
    persist(cli, experiment, &cfg, &mut outcome)?;
    for v in &outcome.verdicts {
        println!("{v}");
    }
    println!(
        "{}: {} records, {} series → {}",
        experiment.as_str(),
        outcome.records.len(),
        outcome.summaries.len(),
        cli.out.display()
    );
    Ok(())
}

fn persist(
    cli: &Cli,
    experiment: ExperimentId,
    cfg: &SweepConfig,
    outcome: &mut SweepOutcome,
) -> Result<()> {
    let stem = experiment.as_str().to_lowercase();
    strichartz_core::output::sort_records(&mut outcome.records);

    match cli.format {
        Format::Csv => write_records_csv(
            &cli.out.join(format!("{stem}_records.csv")),
            &outcome.records,
        )?,
        Format::Json => write_records_json(
            &cli.out.join(format!("{stem}_records.json")),
            &outcome.records,
        )?,
    }

    // summary of fitted series
    match cli.format {
        Format::Csv => {
            let mut text =
                String::from("label,slope,intercept,stderr,points,excluded,expected_slope\n");
            for s in &outcome.summaries {
                let (slope, intercept, stderr) = s
                    .fit
                    .map(|f| {
                        (
                            format!("{}", f.slope),
                            format!("{}", f.intercept),
                            format!("{}", f.stderr),
                        )
                    })
                    .unwrap_or_default();
                let expected = s.expected_slope.map(|e| format!("{e}")).unwrap_or_default();
                text.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    s.label,
                    slope,
                    intercept,
                    stderr,
                    s.points.len(),
                    s.excluded,
                    expected
                ));
            }
            write_atomic(&cli.out.join(format!("{stem}_summary.csv")), &text)?;
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = outcome
                .summaries
                .iter()
                .map(|s| {
                    serde_json::json!({
                        "label": s.label,
                        "slope": s.fit.map(|f| f.slope),
                        "intercept": s.fit.map(|f| f.intercept),
                        "stderr": s.fit.map(|f| f.stderr),
                        "points": s.points.len(),
                        "excluded": s.excluded,
                        "expected_slope": s.expected_slope,
                    })
                })
                .collect();
            let body = serde_json::to_string_pretty(&rows)
                .map_err(|e| Error::config(format!("summary serialization: {e}")))?;
            write_atomic(&cli.out.join(format!("{stem}_summary.json")), &body)?;
        }
    }

    for s in &outcome.summaries {
        write_series(&cli.out.join(format!("{stem}_{}.dat", s.label)), &s.points)?;
    }

    let mut verdict_text = String::new();
    for v in &outcome.verdicts {
        verdict_text.push_str(v);
        verdict_text.push('\n');
    }
    write_atomic(&cli.out.join(format!("{stem}_verdicts.txt")), &verdict_text)?;
    write_atomic(
        &cli.out.join(format!("{stem}_config.json")),
        &format!(
            "{}\n",
            serde_json::to_string_pretty(cfg)
                .map_err(|e| Error::config(format!("config serialization: {e}")))?
        ),
    )?;
    Ok(())
}

fn dump_evolve(cli: &Cli, n: usize, kind: KindArg, t: f64, s: f64) -> Result<()> {
    let kind = match kind {
        KindArg::NonElliptic => EvolutionKind::NonElliptic2d,
        KindArg::Elliptic => EvolutionKind::Elliptic2d,
    };
    let seed = cli.seed.unwrap_or(42);
    let mut field = SpectralField::zeros(n, Dim::Two);
    let mut stream = GaussianStream::from_key(seed);
    let weights: Vec<f64> = field
        .modes()
        .map(|(_, k)| (1.0 + k.norm_sq() as f64).powf(-s / 2.0))
        .collect();
    for (c, w) in field.coeffs_mut().iter_mut().zip(weights) {
        *c = stream.next_complex() * w;
    }
    let evolved = evolve(&field, t, kind)?;

    match cli.format {
        Format::Csv => {
            let mut text = String::from("m,n,re_in,im_in,re_out,im_out\n");
            for (idx, k) in field.modes() {
                if let strichartz_core::spectral::FrequencyIndex::Two { m, n } = k {
                    let a = field.coeffs()[idx];
                    let b = evolved.coeffs()[idx];
                    text.push_str(&format!("{m},{n},{},{},{},{}\n", a.re, a.im, b.re, b.im));
                }
            }
            write_atomic(&cli.out.join("evolve.csv"), &text)?;
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = field
                .modes()
                .filter_map(|(idx, k)| match k {
                    strichartz_core::spectral::FrequencyIndex::Two { m, n } => {
                        let a = field.coeffs()[idx];
                        let b = evolved.coeffs()[idx];
                        Some(serde_json::json!({
                            "m": m, "n": n,
                            "re_in": a.re, "im_in": a.im,
                            "re_out": b.re, "im_out": b.im,
                        }))
                    }
                    _ => None,
                })
                .collect();
            write_atomic(
                &cli.out.join("evolve.json"),
                &serde_json::to_string_pretty(&rows)
                    .map_err(|e| Error::config(format!("dump serialization: {e}")))?,
            )?;
        }
    }

    // quick physical check printed for the user
    let grid = make_grid(n, 2.0, 1.0)?;
    let before = strichartz_core::spectral::hs_norm(&field, 0.0);
    let after = strichartz_core::spectral::hs_norm(&evolved, 0.0);
    let _ = synthesize(&evolved, &grid)?;
    println!(
        "evolved N={n} field to t={t} ({:?}); L² before {before:.6e}, after {after:.6e}",
        kind
    );
    Ok(())
}

fn dump_kernel(cli: &Cli, h: f64, t: f64, zgrid: Option<usize>) -> Result<()> {
    let profile = BumpProfile::default();
    let z = zgrid.unwrap_or_else(|| default_zgrid(h));
    let table = kernel_1d(t, h, &profile, z)?;
    match cli.format {
        Format::Csv => {
            let mut text = String::from("z,re,im,abs\n");
            for (j, v) in table.values().iter().enumerate() {
                let zj = std::f64::consts::TAU * j as f64 / table.zgrid_size() as f64;
                text.push_str(&format!("{zj},{},{},{}\n", v.re, v.im, v.norm()));
            }
            write_atomic(&cli.out.join("kernel.csv"), &text)?;
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = table
                .values()
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let zj = std::f64::consts::TAU * j as f64 / table.zgrid_size() as f64;
                    serde_json::json!({"z": zj, "re": v.re, "im": v.im, "abs": v.norm()})
                })
                .collect();
            write_atomic(
                &cli.out.join("kernel.json"),
                &serde_json::to_string_pretty(&rows)
                    .map_err(|e| Error::config(format!("dump serialization: {e}")))?,
            )?;
        }
    }
    println!(
        "kernel table: h={h}, t={t}, truncation {} modes, {} z-points, sup |K₁| = {:.6e}",
        table.n_max,
        table.zgrid_size(),
        table.sup_abs()
    );
    Ok(())
}
