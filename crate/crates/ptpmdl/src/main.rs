use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use ptpmdl::{load_source, run_experiment, summarize, write_csv, ExperimentSpec, Threads};
use ptpmdl_core::bits::{pack_symbols, unpack_symbols};
use ptpmdl_core::codec::{decode_bytes, encode};
use ptpmdl_core::{EncodeConfig, Error, Mode, MAX_DEPTH};

/// Deepest context chosen when `--depth` is not given.
const AUTO_DEPTH_CAP: u32 = 12;

#[derive(Parser)]
#[command(
    name = "ptpmdl",
    version,
    about = "Parallel two-pass MDL compression of binary sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a file, read as bits (MSB first).
    Compress {
        input: PathBuf,
        output: PathBuf,
        #[arg(short, long, default_value_t = 1)]
        blocks: u32,
        /// Maximum context depth; defaults to the largest allowed, capped at 12.
        #[arg(short, long)]
        depth: Option<u32>,
        #[arg(short, long, default_value = "ptp-mdl")]
        mode: Mode,
        /// Worker threads; defaults to one per core.
        #[arg(short, long)]
        workers: Option<usize>,
        /// Skip the decode check before writing.
        #[arg(long)]
        no_verify: bool,
    },
    /// Restore a file written by `compress`.
    Decompress {
        input: PathBuf,
        output: PathBuf,
        #[arg(short, long)]
        workers: Option<usize>,
    },
    /// Write symbols drawn from a tree source, bit-packed MSB first.
    Gen {
        /// Source config (TOML).
        source: PathBuf,
        #[arg(short, long)]
        n: usize,
        #[arg(short, long, default_value_t = 0)]
        seed: u64,
        output: PathBuf,
    },
    /// Run a coding-length sweep and write one CSV row per run.
    Experiment {
        spec: PathBuf,
        /// Overrides the spec's output path; `-` writes to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(short, long)]
        repetitions: Option<u32>,
        #[arg(short, long)]
        workers: Option<usize>,
    },
}

fn threads(workers: Option<usize>) -> Threads {
    workers.map_or_else(Threads::available, Threads::new)
}

/// Writes through a sibling temporary file so a failed run leaves nothing
/// behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().context("output path has no file name")?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        anyhow::Error::new(e).context(format!("writing {}", path.display()))
    })
}

fn auto_depth(n: usize, blocks: u32) -> u32 {
    let per_block = n / blocks.max(1) as usize;
    if per_block == 0 {
        return 0;
    }
    per_block.ilog2().min(AUTO_DEPTH_CAP).min(MAX_DEPTH)
}

fn compress(
    input: &Path,
    output: &Path,
    blocks: u32,
    depth: Option<u32>,
    mode: Mode,
    exec: &Threads,
    verify: bool,
) -> Result<()> {
    let bytes = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let x = unpack_symbols(&bytes);
    let depth = depth.unwrap_or_else(|| auto_depth(x.len(), blocks));
    let enc = encode(&x, EncodeConfig::new(blocks, depth, mode), exec)?;
    let out = enc.to_bytes();
    if verify && decode_bytes(&out, exec)? != x {
        anyhow::bail!("internal decode check failed");
    }
    write_atomic(output, &out)?;

    let r = &enc.report;
    let n = x.len();
    let coded = enc.container.coded_bits();
    println!("N = {n}, B = {blocks}, D = {depth}, mode = {mode}");
    println!("states: {}", enc.states());
    println!("analytic bits: {:.1}", r.l_phase1 + r.l_phase2);
    println!("actual bits: {coded} ({} container bytes)", out.len());
    if n > 0 {
        println!("bits/symbol: {:.4}", coded as f64 / n as f64);
    }
    Ok(())
}

fn decompress(input: &Path, output: &Path, exec: &Threads) -> Result<()> {
    let bytes = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let x = decode_bytes(&bytes, exec)?;
    write_atomic(output, &pack_symbols(&x))
}

fn gen(source: &Path, n: usize, seed: u64, output: &Path) -> Result<()> {
    let src = load_source(source)?;
    write_atomic(output, &pack_symbols(&src.generate_default(n, seed)))
}

fn experiment(spec_path: &Path, output: Option<PathBuf>, repetitions: Option<u32>, exec: &Threads) -> Result<()> {
    let mut spec = ExperimentSpec::load(spec_path)?;
    if let Some(r) = repetitions {
        spec.repetitions = r;
    }
    spec.validate()?;
    let source = load_source(&spec.source)?;
    let rows = run_experiment(&spec, &source, exec)?;

    let output = output.or_else(|| spec.output.clone());
    match output.as_deref() {
        Some(p) if p != Path::new("-") => {
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            write_atomic(p, &buf)?;
            eprintln!("wrote {} rows to {}", rows.len(), p.display());
        }
        _ => write_csv(&rows, io::stdout().lock())?,
    }

    let mut err = io::stderr().lock();
    writeln!(
        err,
        "{:<13} {:>3} {:>12} {:>12} {:>7} {:>11} {:>11}",
        "mode", "B", "analytic", "actual", "states", "redundancy", "bound"
    )?;
    for s in summarize(&rows) {
        writeln!(
            err,
            "{:<13} {:>3} {:>12.1} {:>12.1} {:>7.2} {:>11.1} {:>11.1}",
            s.mode.name(),
            s.blocks,
            s.analytic_bits,
            s.actual_bits,
            s.states,
            s.redundancy,
            s.theorem1_bound
        )?;
    }
    Ok(())
}

/// 1 for usage and configuration problems, 2 for bad data or containers.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Config(_) => 1,
                _ => 2,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Compress {
            input,
            output,
            blocks,
            depth,
            mode,
            workers,
            no_verify,
        } => compress(&input, &output, blocks, depth, mode, &threads(workers), !no_verify),
        Command::Decompress { input, output, workers } => decompress(&input, &output, &threads(workers)),
        Command::Gen {
            source,
            n,
            seed,
            output,
        } => gen(&source, n, seed, &output),
        Command::Experiment {
            spec,
            output,
            repetitions,
            workers,
        } => experiment(&spec, output, repetitions, &threads(workers)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
