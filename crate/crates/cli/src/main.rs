//! `kstar`: k* latent space analysis from the command line.
//!
//! Exit codes:
//!
//! | code | meaning                                                         |
//! |------|-----------------------------------------------------------------|
//! | 0    | success                                                         |
//! | 1    | `oracle-check` found mismatches                                 |
//! | 2    | usage error                                                     |
//! | 3    | invalid data (single concept, non-finite values, bad spec, ...) |
//! | 4    | malformed file (bad magic, truncated, bad label, parse, schema) |
//! | 5    | I/O failure                                                     |
//! | 6    | analysis limit (instance too large, all concepts degenerate)    |

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kstar_core::check::{run_sweep, sweep_instances};
use kstar_core::io::{self, ReportFormat};
use kstar_core::report::metadata_value;
use kstar_core::{
    analyze, compare_reports, generate, kstar_scan_with, AnalysisOptions, DistanceMetric, EmbeddingSet,
    Error, Pattern, RecipeParams, ScanOptions, SynthSpec,
};

#[derive(Debug, Parser)]
#[command(name = "kstar", version, about = "k* distribution analysis of labeled latent spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute k* distributions, skewness coefficients and patterns for a set.
    Analyze(AnalyzeArgs),
    /// Tabulate several reports side by side.
    Compare(CompareArgs),
    /// Generate a synthetic set exhibiting one pattern.
    Synth(SynthArgs),
    /// Check the k* kernel against the reference scan on seeded instances.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InputFormat {
    Auto,
    Kse,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    CsvSummary,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Embedding set (.kse or .csv).
    input: PathBuf,
    /// Report destination; JSON goes to stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    #[arg(long, value_enum, default_value = "auto")]
    input_format: InputFormat,
    #[arg(long, default_value = "euclidean")]
    metric: DistanceMetric,
    /// Histogram bins over (0, 1].
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(2..))]
    bins: u64,
    /// Include per-sample raw k* values in the report.
    #[arg(long)]
    raw_kstar: bool,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "KSTAR_WORKERS", default_value_t = 0)]
    workers: usize,
    /// Extra report metadata, e.g. natural_accuracy=0.92. Repeatable.
    #[arg(long = "metadata", value_name = "KEY=VALUE", value_parser = parse_key_value)]
    metadata: Vec<(String, String)>,
    /// Provenance string stored in the report (model, dataset).
    #[arg(long)]
    source: Option<String>,
    /// Do not print the summary table.
    #[arg(short, long)]
    quiet: bool,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Report files (JSON) to compare.
    #[arg(required = true, num_args = 2..)]
    reports: Vec<PathBuf>,
    /// Write a plot-ready CSV (one row per report) here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, value_parser = parse_pattern)]
    pattern: Pattern,
    #[arg(long, default_value_t = 4)]
    concepts: usize,
    /// Samples per concept.
    #[arg(long, default_value_t = 60)]
    samples: usize,
    #[arg(long, default_value_t = 8)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Standard deviation of within-blob noise.
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    /// Blob center separation for the clustered recipe, in noise units.
    #[arg(long, default_value_t = RecipeParams::default().cluster_separation)]
    separation: f64,
    /// Sub-blob spacing for the fractured recipe, in noise units.
    #[arg(long, default_value_t = RecipeParams::default().fracture_spacing)]
    spacing: f64,
    /// Sub-blobs per concept for the fractured recipe.
    #[arg(long, default_value_t = RecipeParams::default().fracture_parts)]
    parts: usize,
    /// Maximum shared-center offset for the overlapped recipe, in noise units.
    #[arg(long, default_value_t = RecipeParams::default().overlap_offset)]
    offset: f64,
    /// Fraction of each concept placed in its isolated core (overlapped recipe).
    #[arg(long, default_value_t = RecipeParams::default().overlap_core_fraction)]
    core_fraction: f64,
    /// Output path; `.csv` writes CSV, anything else KSE.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricChoice {
    Both,
    Euclidean,
    Cosine,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 50)]
    instances: usize,
    /// Largest instance size; sizes cycle through 200, 1000, 2000 capped here.
    #[arg(long = "max-n", default_value_t = 2000)]
    max_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "both")]
    metric: MetricChoice,
    #[arg(long, env = "KSTAR_WORKERS", default_value_t = 0)]
    workers: usize,
}

fn parse_key_value(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.is_empty() => Ok((k.to_owned(), v.to_owned())),
        _ => Err(format!("expected KEY=VALUE, got {s:?}")),
    }
}

fn parse_pattern(s: &str) -> Result<Pattern, String> {
    match s.to_ascii_lowercase().as_str() {
        "fractured" => Ok(Pattern::Fractured),
        "overlapped" => Ok(Pattern::Overlapped),
        "clustered" => Ok(Pattern::Clustered),
        other => Err(format!("unknown pattern {other:?} (fractured, overlapped, clustered)")),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::ZeroDimension
        | Error::NonFiniteValue { .. }
        | Error::LengthMismatch { .. }
        | Error::SingleConcept { .. }
        | Error::TooFewSamples { .. }
        | Error::ZeroNormVector { .. }
        | Error::InvalidSpec(_) => 3,
        Error::BadMagic { .. }
        | Error::Truncated { .. }
        | Error::TrailingBytes { .. }
        | Error::LabelOutOfRange { .. }
        | Error::Parse { .. }
        | Error::RaggedRows { .. }
        | Error::SchemaMismatch { .. } => 4,
        Error::Io { .. } => 5,
        Error::InstanceTooLarge { .. } | Error::EmptyInput | Error::AllDegenerate => 6,
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn load(path: &Path, format: InputFormat) -> Result<EmbeddingSet, Error> {
    let csv = match format {
        InputFormat::Auto => is_csv(path),
        InputFormat::Csv => true,
        InputFormat::Kse => false,
    };
    if csv {
        io::read_csv(path)
    } else {
        io::read_kse(path)
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<u8, Error> {
    let mut set = load(&args.input, args.input_format)?;
    if let Some(source) = &args.source {
        set = set.with_source(source);
    }
    let opts = AnalysisOptions {
        metric: args.metric,
        histogram_bins: args.bins as usize,
        include_raw_kstar: args.raw_kstar,
        scan: ScanOptions { workers: args.workers, ..ScanOptions::default() },
    };
    let mut report = analyze(&set, &opts)?;
    for (k, v) in &args.metadata {
        report.metadata.insert(k.clone(), metadata_value(v));
    }

    let format = match args.format {
        OutputFormat::Json => ReportFormat::Json,
        OutputFormat::CsvSummary => ReportFormat::CsvSummary,
    };
    match &args.output {
        Some(path) => {
            io::write_report(&report, path, format)?;
            if !args.quiet {
                print!("{}", output::summary_table(&report));
            }
        }
        None => {
            let body = match format {
                ReportFormat::Json => io::report_json(&report),
                ReportFormat::CsvSummary => io::report_csv_summary(&report),
            };
            print!("{body}");
            if !args.quiet {
                eprint!("{}", output::summary_table(&report));
            }
        }
    }
    Ok(0)
}

fn cmd_compare(args: CompareArgs) -> Result<u8, Error> {
    let mut reports = Vec::with_capacity(args.reports.len());
    for path in &args.reports {
        let report = io::read_report(path)?;
        let label = report.source.clone().unwrap_or_else(|| path.display().to_string());
        reports.push((label, report));
    }
    let cmp = compare_reports(&reports);
    print!("{}", output::comparison_table(&cmp));
    if let Some(path) = &args.csv {
        io::write_text(path, &io::comparison_csv(&cmp))?;
    }
    Ok(0)
}

fn cmd_synth(args: SynthArgs) -> Result<u8, Error> {
    let spec = SynthSpec {
        pattern: args.pattern,
        concepts: args.concepts,
        samples_per_concept: args.samples,
        dim: args.dim,
        seed: args.seed,
        noise_scale: args.noise,
        params: RecipeParams {
            cluster_separation: args.separation,
            fracture_spacing: args.spacing,
            fracture_parts: args.parts,
            overlap_offset: args.offset,
            overlap_core_fraction: args.core_fraction,
            ..RecipeParams::default()
        },
    };
    let set = generate(&spec)?;
    if is_csv(&args.output) {
        io::write_csv(&set, &args.output)?;
    } else {
        io::write_kse(&set, &args.output)?;
    }
    println!("wrote {} samples x {} dims, {} concepts to {}", set.len(), set.dim(), set.concept_count(), args.output.display());
    Ok(0)
}

fn cmd_oracle_check(args: OracleArgs) -> Result<u8, Error> {
    let mut instances = sweep_instances(args.instances, args.max_n, args.seed)?;
    match args.metric {
        MetricChoice::Both => {}
        MetricChoice::Euclidean => instances.iter_mut().for_each(|i| i.metric = DistanceMetric::Euclidean),
        MetricChoice::Cosine => instances.iter_mut().for_each(|i| i.metric = DistanceMetric::Cosine),
    }
    let scan = ScanOptions { workers: args.workers, ..ScanOptions::default() };
    let outcomes = run_sweep(&instances, |set, metric| kstar_scan_with(set, metric, &scan))?;
    let report = output::oracle_report(&outcomes);
    print!("{}", report.text);
    Ok(if report.mismatches == 0 { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Synth(a) => cmd_synth(a),
        Command::OracleCheck(a) => cmd_oracle_check(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
