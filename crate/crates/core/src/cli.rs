//! Command-line surface: `compress`, `decompress`, `bench`, `report`, `generate`.
//!
//! Exit codes: 0 success, 1 runtime/IO/integrity failure (or any failed bench
//! cell), 2 usage error.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::corpus::{generate_synthetic, load_dataset, SizeClass};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::harness::{rank_records, run_measurements, BenchRecord, Dataset, DatasetRanking};
use crate::metrics::DsBasis;
use crate::pipeline::{compress_pipeline, decompress_pipeline, enumerate_pipelines, PipelineSpec};
use crate::report::{
    emit_balance, emit_frequency, emit_measurements, emit_report_with, emit_top_table_md,
    Environment, ReportFormat, ReportOptions,
};
use crate::scoring::{balance_table, component_frequency, head_to_head, Weights};

#[derive(Debug, Parser)]
#[command(name = "hybc", version, about = "Chained two-stage lossless compression and benchmarking")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress a file into a .hybc container.
    Compress {
        /// Pipeline such as "Zstd" or "Zstd+LZ4HC".
        #[arg(long, short)]
        pipeline: PipelineSpec,
        input: PathBuf,
        output: PathBuf,
    },
    /// Restore a .hybc container; the pipeline is read from its header.
    Decompress { input: PathBuf, output: PathBuf },
    /// Measure pipelines on corpora and write ranking reports.
    Bench(BenchArgs),
    /// Re-rank a saved measurements.json with new weights or formats.
    Report(ReportArgs),
    /// Write a synthetic Devanagari corpus.
    Generate {
        #[arg(long, default_value = "small")]
        size: SizeClass,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        output: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ScoringArgs {
    /// Weights for CR, CS and DS.
    #[arg(long, default_value = "0.4,0.3,0.3")]
    pub weights: Weights,
    /// Size used for decompression speed: compressed or original.
    #[arg(long, default_value = "compressed")]
    pub ds_basis: DsBasis,
    /// Output directory.
    #[arg(long, default_value = "hybc-report")]
    pub out: PathBuf,
    /// Comma-separated subset of csv,json,md,svg.
    #[arg(long, value_delimiter = ',', default_value = "csv,json,md,svg")]
    pub format: Vec<ReportFormat>,
    /// Pipeline compared against the five singles in the head-to-head table.
    #[arg(long, default_value = "Zstd+LZ4HC")]
    pub head_to_head: PipelineSpec,
    /// Rows per dataset counted in the top table and component frequency.
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// UTF-8 text files to benchmark.
    pub inputs: Vec<PathBuf>,
    /// Also benchmark generated corpora of these size classes.
    #[arg(long, value_delimiter = ',')]
    pub synthetic: Vec<SizeClass>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// "all" or a comma-separated list of pipelines.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub pipelines: Vec<String>,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    #[command(flatten)]
    pub scoring: ScoringArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// measurements.json written by `bench`.
    pub measurements: PathBuf,
    #[command(flatten)]
    pub scoring: ScoringArgs,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub inputs: Vec<PathBuf>,
    pub synthetic: Vec<(SizeClass, u64)>,
    pub pipelines: Vec<PipelineSpec>,
    pub repetitions: usize,
    pub weights: Weights,
    pub ds_basis: DsBasis,
    pub output_dir: PathBuf,
    pub formats: Vec<ReportFormat>,
    pub head_to_head: PipelineSpec,
    pub top_k: usize,
}

impl BenchConfig {
    pub fn new(output_dir: impl Into<PathBuf>) -> Self {
        BenchConfig {
            inputs: Vec::new(),
            synthetic: Vec::new(),
            pipelines: enumerate_pipelines(),
            repetitions: 5,
            weights: Weights::default(),
            ds_basis: DsBasis::default(),
            output_dir: output_dir.into(),
            formats: ReportFormat::ALL.to_vec(),
            head_to_head: "Zstd+LZ4HC".parse().expect("valid pipeline"),
            top_k: 10,
        }
    }
}

#[derive(Debug)]
pub struct BenchOutcome {
    pub records: Vec<BenchRecord>,
    pub rankings: Vec<DatasetRanking>,
    pub files: Vec<PathBuf>,
}

impl BenchOutcome {
    pub fn all_ok(&self) -> bool {
        self.records.iter().all(BenchRecord::is_ok)
    }
}

fn parse_pipeline_list(items: &[String]) -> std::result::Result<Vec<PipelineSpec>, String> {
    if items.iter().any(|s| s.trim().eq_ignore_ascii_case("all")) {
        return Ok(enumerate_pipelines());
    }
    let mut out = Vec::new();
    for s in items {
        let p: PipelineSpec = s.parse().map_err(|e: Error| e.to_string())?;
        if !out.contains(&p) {
            out.push(p);
        }
    }
    if out.is_empty() {
        return Err("no pipelines selected".to_string());
    }
    Ok(out)
}

fn file_slug(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() {
        "dataset".to_string()
    } else {
        s
    }
}

fn load_inputs(cfg: &BenchConfig) -> Result<Vec<Dataset>> {
    let mut datasets = Vec::new();
    let mut names = HashSet::new();
    let mut unique = |base: String| {
        let mut name = base.clone();
        let mut n = 2;
        while !names.insert(name.clone()) {
            name = format!("{base}-{n}");
            n += 1;
        }
        name
    };
    for path in &cfg.inputs {
        let (mut desc, bytes) = load_dataset(path)?;
        desc.name = unique(desc.name);
        datasets.push(Dataset { descriptor: desc, bytes });
    }
    for &(class, seed) in &cfg.synthetic {
        let name = unique(format!("synthetic-{class}"));
        datasets.push(Dataset::from_bytes(&name, generate_synthetic(class, seed))?);
    }
    Ok(datasets)
}

/// Load corpora, measure every (dataset, pipeline) cell and write reports.
pub fn run_bench(cfg: &BenchConfig, log: &mut dyn Write) -> Result<BenchOutcome> {
    let datasets = load_inputs(cfg)?;
    for d in &datasets {
        let _ = writeln!(
            log,
            "dataset {}: {} bytes, {}, devanagari {:.3}",
            d.name(),
            d.descriptor.byte_len,
            d.descriptor.size_class,
            d.descriptor.devanagari_fraction
        );
    }
    let records = run_measurements(&datasets, &cfg.pipelines, cfg.repetitions, |r| {
        let _ = match (&r.measurement, &r.error) {
            (Some(m), _) => writeln!(
                log,
                "  {:<10} {:<16} {:>12} -> {:>12} bytes",
                r.dataset, r.pipeline.to_string(), m.original_bytes, m.compressed_bytes
            ),
            (None, e) => writeln!(log, "  {:<10} {:<16} FAILED: {}", r.dataset, r.pipeline.to_string(), e.as_deref().unwrap_or("")),
        };
    });
    write_reports(cfg, records, log)
}

/// Rank `records` and write every report into `cfg.output_dir`.
pub fn write_reports(cfg: &BenchConfig, records: Vec<BenchRecord>, log: &mut dyn Write) -> Result<BenchOutcome> {
    let out_dir = &cfg.output_dir;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    // a dataset with fewer than two successful rows cannot be normalized
    let rankable: Vec<BenchRecord> = {
        let mut ok_counts = std::collections::HashMap::new();
        for r in records.iter().filter(|r| r.is_ok()) {
            *ok_counts.entry(r.dataset.as_str()).or_insert(0usize) += 1;
        }
        records
            .iter()
            .filter(|r| r.is_ok() && ok_counts[r.dataset.as_str()] >= 2)
            .cloned()
            .collect()
    };
    let rankings = rank_records(&rankable, &cfg.weights, cfg.ds_basis, Execution::default())?;

    let opts = ReportOptions {
        weights: cfg.weights,
        ds_basis: cfg.ds_basis,
        environment: Some(Environment::capture(cfg.repetitions, cfg.weights, cfg.ds_basis)),
        title: None,
    };
    let mut files = Vec::new();
    let mut write = |name: String, bytes: Vec<u8>| -> Result<()> {
        let path = out_dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        files.push(path);
        Ok(())
    };

    for &fmt in &cfg.formats {
        let ext = fmt.extension();
        if let Some(bytes) = emit_measurements(&records, fmt, &opts) {
            write(format!("measurements.{ext}"), bytes)?;
        }
        for r in &rankings {
            let slug = file_slug(&r.dataset);
            let titled = |t: String| ReportOptions {
                title: Some(t),
                ..opts.clone()
            };
            write(
                format!("ranking_{slug}.{ext}"),
                emit_report_with(&r.rows, fmt, &titled(format!("Efficiency ranking: {}", r.dataset))),
            )?;
            let h2h = head_to_head(&r.rows, &cfg.head_to_head);
            write(
                format!("head_to_head_{slug}.{ext}"),
                emit_report_with(
                    &h2h,
                    fmt,
                    &titled(format!("{} vs standalone codecs: {}", cfg.head_to_head, r.dataset)),
                ),
            )?;
            write(
                format!("balance_{slug}.{ext}"),
                emit_balance(&balance_table(&r.rows), fmt, &titled(format!("Performance balance: {}", r.dataset))),
            )?;
        }
        let top: Vec<_> = rankings
            .iter()
            .flat_map(|r| r.rows.iter().take(cfg.top_k).cloned())
            .collect();
        let counts = component_frequency(&top, cfg.top_k);
        write(format!("frequency.{ext}"), emit_frequency(&counts, top.len(), fmt, &opts))?;
        if fmt == ReportFormat::Markdown {
            write("top.md".to_string(), emit_top_table_md(&rankings, cfg.top_k))?;
        }
    }
    let _ = writeln!(log, "wrote {} report files to {}", files.len(), out_dir.display());
    Ok(BenchOutcome {
        records,
        rankings,
        files,
    })
}

#[derive(Deserialize)]
struct SavedMeasurements {
    rows: Vec<BenchRecord>,
}

pub fn read_measurements(path: &Path) -> Result<Vec<BenchRecord>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let saved: SavedMeasurements = serde_json::from_slice(&bytes)?;
    Ok(saved.rows)
}

fn config_from(scoring: &ScoringArgs) -> BenchConfig {
    BenchConfig {
        weights: scoring.weights,
        ds_basis: scoring.ds_basis,
        formats: scoring.format.clone(),
        head_to_head: scoring.head_to_head,
        top_k: scoring.top_k,
        ..BenchConfig::new(&scoring.out)
    }
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn runtime_error(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(1)
}

pub fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Compress { pipeline, input, output } => {
            let result = fs::read(&input)
                .map_err(|e| Error::io(&input, e))
                .and_then(|data| {
                    let container = compress_pipeline(&pipeline, &data)?;
                    fs::write(&output, &container).map_err(|e| Error::io(&output, e))?;
                    Ok((data.len(), container.len()))
                });
            match result {
                Ok((orig, comp)) => {
                    println!("pipeline: {pipeline}");
                    println!("original: {orig} bytes");
                    println!("compressed: {comp} bytes");
                    println!("ratio: {:.4}", orig as f64 / comp as f64);
                    ExitCode::SUCCESS
                }
                Err(e) => runtime_error(e),
            }
        }
        Command::Decompress { input, output } => {
            let result = fs::read(&input)
                .map_err(|e| Error::io(&input, e))
                .and_then(|c| decompress_pipeline(&c))
                .and_then(|data| fs::write(&output, &data).map(|_| data.len()).map_err(|e| Error::io(&output, e)));
            match result {
                Ok(n) => {
                    println!("restored: {n} bytes");
                    ExitCode::SUCCESS
                }
                Err(e) => runtime_error(e),
            }
        }
        Command::Bench(args) => {
            let pipelines = match parse_pipeline_list(&args.pipelines) {
                Ok(p) => p,
                Err(e) => return usage_error(e),
            };
            if args.inputs.is_empty() && args.synthetic.is_empty() {
                return usage_error("bench needs at least one input file or --synthetic class");
            }
            if args.scoring.format.is_empty() {
                return usage_error("at least one --format is required");
            }
            let cfg = BenchConfig {
                inputs: args.inputs.clone(),
                synthetic: args.synthetic.iter().map(|&c| (c, args.seed)).collect(),
                pipelines,
                repetitions: args.reps as usize,
                ..config_from(&args.scoring)
            };
            match run_bench(&cfg, &mut std::io::stderr()) {
                Ok(outcome) if outcome.all_ok() => ExitCode::SUCCESS,
                Ok(outcome) => {
                    let failed = outcome.records.iter().filter(|r| !r.is_ok()).count();
                    eprintln!("error: {failed} benchmark cell(s) failed");
                    ExitCode::from(1)
                }
                Err(e) => runtime_error(e),
            }
        }
        Command::Report(args) => {
            if args.scoring.format.is_empty() {
                return usage_error("at least one --format is required");
            }
            let cfg = config_from(&args.scoring);
            let result = read_measurements(&args.measurements).and_then(|records| {
                let mut cfg = cfg;
                cfg.repetitions = records
                    .iter()
                    .find_map(|r| r.measurement.as_ref().map(|m| m.repetitions))
                    .unwrap_or(0);
                write_reports(&cfg, records, &mut std::io::stderr())
            });
            match result {
                Ok(_) => ExitCode::SUCCESS,
                Err(e) => runtime_error(e),
            }
        }
        Command::Generate { size, seed, output } => {
            let bytes = generate_synthetic(size, seed);
            match fs::write(&output, &bytes) {
                Ok(()) => {
                    println!("wrote {} bytes ({size}, seed {seed})", bytes.len());
                    ExitCode::SUCCESS
                }
                Err(e) => runtime_error(Error::io(&output, e)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pipeline_lists() {
        assert_eq!(parse_pipeline_list(&["all".into()]).unwrap().len(), 25);
        let p = parse_pipeline_list(&["Zstd".into(), "zstd".into(), "LZMA + Brotli".into()]).unwrap();
        assert_eq!(p.len(), 2);
        assert!(parse_pipeline_list(&["Zstd+Zstd".into()]).is_err());
    }

    #[test]
    fn slugs() {
        assert_eq!(file_slug("synthetic-small"), "synthetic-small");
        assert_eq!(file_slug("a b/c"), "a_b_c");
        assert_eq!(file_slug(""), "dataset");
    }

    #[test]
    fn cli_parses() {
        let cli = Cli::try_parse_from(["hybc", "compress", "--pipeline", "zstd + lz4hc", "a", "b"]).unwrap();
        match cli.command {
            Command::Compress { pipeline, .. } => assert_eq!(pipeline.to_string(), "Zstd + LZ4HC"),
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["hybc", "compress", "--pipeline", "gzip", "a", "b"]).is_err());
        let cli = Cli::try_parse_from([
            "hybc", "bench", "x.txt", "--reps", "3", "--weights", "0.5,0.25,0.25", "--format", "csv,md",
            "--ds-basis", "original",
        ])
        .unwrap();
        match cli.command {
            Command::Bench(b) => {
                assert_eq!(b.reps, 3);
                assert_eq!(b.scoring.ds_basis, DsBasis::Original);
                assert_eq!(b.scoring.format, vec![ReportFormat::Csv, ReportFormat::Markdown]);
            }
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["hybc", "bench", "x", "--reps", "0"]).is_err());
        assert!(Cli::try_parse_from(["hybc", "bench", "x", "--weights", "0.5,0.5,0.5"]).is_err());
    }
}
