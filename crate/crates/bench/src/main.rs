use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use montsim::designs::{DesignConfig, DesignId};
use montsim::karatsuba::DspMode;
use montsim::{FieldElement, WordSize};

use montsim_bench::bench::{self, BenchConfig, Warmup, DEFAULT_ITERATIONS, DEFAULT_WARMUP};
use montsim_bench::redc;
use montsim_bench::report::Report;
use montsim_bench::vectors;
use montsim_bench::verify::verify;

const SPOT_CHECKS: usize = 100;

#[derive(Parser)]
#[command(name = "montsim", version, about = "Cycle-accurate Montgomery multiplier harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate golden vectors with the arbitrary-precision oracle.
    Vecgen {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a design over a vector file and double-check every result.
    Verify {
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long)]
        vectors: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Batch throughput protocol at an assumed clock frequency.
    Bench {
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long)]
        freq_mhz: f64,
        /// Comma-separated batch sizes.
        #[arg(long, value_delimiter = ',', default_values_t = bench::DEFAULT_BATCHES)]
        batches: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
        iters: usize,
        #[arg(long, default_value_t = format!("{}x{}", DEFAULT_WARMUP.batches, DEFAULT_WARMUP.size))]
        warmup: String,
        /// Seed for operands when no vector file is given.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        vectors: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Write the unit and design tables with reference verdicts.
    Report {
        #[arg(long)]
        out_dir: PathBuf,
        /// Emit one format only; all three by default.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Comma-separated configuration labels, e.g. rs-24,kara32-auto.
        #[arg(long, value_delimiter = ',')]
        designs: Option<Vec<String>>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Table,
}

#[derive(clap::Args)]
struct DesignArgs {
    #[arg(long)]
    design: String,
    #[arg(long, value_parser = ["24", "32", "64"])]
    word: Option<String>,
    #[arg(long, default_value = "forced")]
    dsp_mode: String,
}

impl DesignArgs {
    fn config(&self) -> Result<DesignConfig, String> {
        let id: DesignId = self.design.parse().map_err(|e| format!("{e}"))?;
        let mode: DspMode = self.dsp_mode.parse().map_err(|e| format!("{e}"))?;
        let word = match &self.word {
            Some(w) => Some(WordSize::from_bits(w.parse().expect("validated by clap")).map_err(|e| e.to_string())?),
            None if id.is_karatsuba() => None,
            None => return Err(format!("--word is required for {id}")),
        };
        DesignConfig::new(id, word, mode).map_err(|e| e.to_string())
    }
}

enum Failure {
    Verification(String),
    Usage(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("FAIL: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Vecgen { seed, count, out } => vecgen(seed, count as usize, &out),
        Command::Verify { design, vectors, json } => {
            run_verify(design.config().map_err(Failure::Usage)?, &vectors, json)
        }
        Command::Bench {
            design,
            freq_mhz,
            batches,
            iters,
            warmup,
            seed,
            vectors,
            json,
        } => {
            let config = design.config().map_err(Failure::Usage)?;
            let warmup: Warmup = warmup.parse().map_err(Failure::Usage)?;
            let mut b = BenchConfig::new(config, freq_mhz * 1e6);
            b.batch_sizes = batches;
            b.iterations = iters;
            b.warmup = warmup;
            b.seed = seed;
            run_bench(&b, vectors.as_deref(), json)
        }
        Command::Report {
            out_dir,
            format,
            designs,
        } => run_report(&out_dir, format, designs),
    }
}

fn vecgen(seed: u64, count: usize, out: &Path) -> Result<(), Failure> {
    let generated = vectors::generate(seed, count);
    let bad = redc::spot_check(&generated, SPOT_CHECKS);
    if !bad.is_empty() {
        return Err(Failure::Verification(format!(
            "second oracle disagrees on records {bad:?}"
        )));
    }
    vectors::write_file(out, seed, &generated).map_err(|e| Failure::Usage(e.to_string()))?;
    println!(
        "wrote {count} vectors to {} (seed {seed}, {} spot-checked)",
        out.display(),
        SPOT_CHECKS.min(count)
    );
    Ok(())
}

fn run_verify(config: DesignConfig, path: &Path, json: bool) -> Result<(), Failure> {
    let file = vectors::read_file(path).map_err(|e| Failure::Usage(e.to_string()))?;
    for e in &file.malformed {
        eprintln!("malformed: {e}");
    }
    let report = verify(config, &file.vectors, file.malformed);
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        println!(
            "{}: {} vectors, {} mont mismatches, {} field mismatches, {} malformed, {} cycles",
            report.config,
            report.total,
            report.mont_mismatches,
            report.field_mismatches,
            report.malformed.len(),
            report.cycles
        );
        for m in &report.mismatches {
            let kind = if m.field { "field" } else { "mont" };
            println!("  line {}: {kind} mismatch", m.line);
        }
    }
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} failed verification", report.config)))
    }
}

fn load_pairs(path: &Path, config: DesignConfig) -> Result<Vec<(FieldElement, FieldElement)>, Failure> {
    let file = vectors::read_file(path).map_err(|e| Failure::Usage(e.to_string()))?;
    for e in &file.malformed {
        eprintln!("malformed: {e}");
    }
    Ok(file
        .vectors
        .iter()
        .map(|(_, v)| {
            (
                FieldElement::from_biguint(&v.a, config.word).expect("parsed operands fit 384 bits"),
                FieldElement::from_biguint(&v.b, config.word).expect("parsed operands fit 384 bits"),
            )
        })
        .collect())
}

fn run_bench(b: &BenchConfig, vectors: Option<&Path>, json: bool) -> Result<(), Failure> {
    let pairs = match vectors {
        Some(path) => load_pairs(path, b.config)?,
        None => bench::pairs_from_seed(b.seed, b.vectors_needed(), b.config),
    };
    let report = bench::run(b, &pairs).map_err(|e| Failure::Usage(e.to_string()))?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        return Ok(());
    }
    println!(
        "{} at {} MHz: interval {} cycles, ideal {:.0} ops/s",
        report.config, report.frequency_mhz, report.interval, report.ideal_ops_per_s
    );
    println!(
        "{:>10}  {:>14}  {:>14}  {:>12}",
        "batch", "mean cycles", "sim ops/s", "wall ops/s"
    );
    for s in &report.batches {
        println!(
            "{:>10}  {:>14.1}  {:>14.0}  {:>12.0}",
            s.size, s.mean_cycles, s.sim_ops_per_s, s.wall_ops_per_s
        );
    }
    println!(
        "mean: {:.0} simulated ops/s, {:.0} wall ops/s",
        report.mean_sim_ops_per_s, report.mean_wall_ops_per_s
    );
    Ok(())
}

fn select_configs(labels: Option<Vec<String>>) -> Result<Vec<DesignConfig>, Failure> {
    let all = DesignConfig::all();
    let Some(labels) = labels else {
        return Ok(all);
    };
    labels
        .iter()
        .filter(|l| !l.is_empty())
        .map(|l| {
            all.iter()
                .copied()
                .find(|c| c.label() == *l)
                .ok_or_else(|| Failure::Usage(format!("unknown configuration {l:?}")))
        })
        .collect()
}

fn run_report(out_dir: &Path, format: Option<Format>, designs: Option<Vec<String>>) -> Result<(), Failure> {
    let configs = select_configs(designs)?;
    let report = Report::build(&configs);
    fs::create_dir_all(out_dir)?;
    let wants = |f: Format| format.is_none() || format == Some(f);
    if wants(Format::Csv) {
        fs::write(out_dir.join("units.csv"), report.units_csv())?;
        fs::write(out_dir.join("designs.csv"), report.designs_csv())?;
    }
    if wants(Format::Json) {
        fs::write(out_dir.join("report.json"), report.to_json())?;
    }
    let table = report.table();
    if wants(Format::Table) {
        fs::write(out_dir.join("report.txt"), &table)?;
    }
    print!("{table}");
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::Verification("report has failing cells".into()))
    }
}
