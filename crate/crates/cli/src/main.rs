use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use sidlab::harness::{
    coding_gain, emit_csv, parse_csv, render_csv, simulate_point, stage_curve, stage_gains,
    BerRecord, EbN0Sweep, SimConfig, Stage,
};
use sidlab::pipeline::Scheme;
use sidlab::sid::SidConfig;

#[derive(Parser)]
#[command(
    name = "sidlab",
    version,
    about = "Soft input decryption BER simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an Eb/N0 sweep and write the BER table.
    Sweep(SweepArgs),
    /// Coding gain between two BER tables at a target BER.
    Gain(GainArgs),
}

#[derive(clap::Args)]
struct SweepArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// baseline, feedback, serial or parallel.
    #[arg(long)]
    scheme: Option<Scheme>,
    /// Sweep as START:STOP:STEP in dB, or a single point.
    #[arg(long, value_name = "A:B:STEP")]
    ebno: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    flip_budget: Option<u32>,
    /// CSV output path; the manifest goes to `<PATH>.manifest`. Without
    /// it the table is printed to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Target BER for the stage gains in the manifest.
    #[arg(long, default_value_t = 1e-4)]
    target_ber: f64,
}

#[derive(clap::Args)]
struct GainArgs {
    #[arg(long = "ref", value_name = "CSV")]
    reference: PathBuf,
    #[arg(long, value_name = "CSV")]
    test: PathBuf,
    #[arg(long)]
    target_ber: f64,
    #[arg(long, default_value = "ber_cd1")]
    ref_column: String,
    /// Defaults to the last populated stage of the test table.
    #[arg(long)]
    test_column: Option<String>,
}

fn apply_overrides(cfg: &mut SimConfig, args: &SweepArgs) -> Result<()> {
    if let Some(s) = args.scheme {
        cfg.scheme = s;
    }
    if let Some(e) = &args.ebno {
        cfg.sweep = EbN0Sweep::parse(e)?;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(d) = args.flip_budget {
        cfg.sid = SidConfig::new(d)?;
    }
    if let Some(o) = &args.out {
        cfg.out = Some(o.clone());
    }
    cfg.validate()?;
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let mut cfg = SimConfig::from_file(&args.config)?;
    apply_overrides(&mut cfg, &args)?;
    let mut records = Vec::new();
    for db in cfg.sweep.points() {
        let r = simulate_point(&cfg, db)?;
        eprintln!(
            "{:>6.2} dB  cd1 {:.3e}{}",
            db,
            r.cd1.ber,
            r.sid2
                .map(|s| format!("  2sid {:.3e}", s.ber))
                .unwrap_or_default()
        );
        records.push(r);
    }
    let gains = stage_gains(&records, args.target_ber);
    for g in &gains {
        eprintln!(
            "gain {} over {} at {:e}: {:.3} dB",
            g.test, g.reference, g.target_ber, g.gain_db
        );
    }
    match &cfg.out {
        Some(path) => {
            let manifest = emit_csv(&records, &gains, &cfg, path)?;
            eprintln!("wrote {} and {}", path.display(), manifest.display());
        }
        None => print!("{}", render_csv(&records)),
    }
    Ok(())
}

fn read_table(path: &Path) -> Result<Vec<BerRecord>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_csv(&text).with_context(|| format!("parsing {}", path.display()))
}

fn column(name: &str) -> Result<Stage> {
    match Stage::from_column(name) {
        Some(s) => Ok(s),
        None => bail!("unknown column `{name}` (expected ber_cd1, ber_1sid, ber_cd2 or ber_2sid)"),
    }
}

fn gain(args: GainArgs) -> Result<()> {
    let reference = read_table(&args.reference)?;
    let test = read_table(&args.test)?;
    let ref_stage = column(&args.ref_column)?;
    let test_stage = match &args.test_column {
        Some(c) => column(c)?,
        None => *Stage::ALL
            .iter()
            .rev()
            .find(|&&s| test.iter().all(|r| r.stage(s).is_some()))
            .unwrap_or(&Stage::Cd1),
    };
    for (recs, stage, path) in [
        (&reference, ref_stage, &args.reference),
        (&test, test_stage, &args.test),
    ] {
        if recs.iter().any(|r| r.stage(stage).is_none()) {
            bail!("{} has no {} values", path.display(), stage.column());
        }
    }
    let report = coding_gain(
        &stage_curve(args.reference.display().to_string(), &reference, ref_stage),
        &stage_curve(args.test.display().to_string(), &test, test_stage),
        args.target_ber,
    )
    .context("target BER is not bracketed by both curves")?;
    println!("reference_column={}", ref_stage.column());
    println!("test_column={}", test_stage.column());
    println!("target_ber={:e}", report.target_ber);
    println!("reference_db={:.4}", report.reference_db);
    println!("test_db={:.4}", report.test_db);
    println!("gain_db={:.4}", report.gain_db);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Gain(a) => gain(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
