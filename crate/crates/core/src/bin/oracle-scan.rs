use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use oracle_scan::analytics::Denominator;
use oracle_scan::cfg::CfgOptions;
use oracle_scan::detector::load_keywords;
use oracle_scan::scan::{
    default_cache_dir, emit, scan, write_dumps, write_outputs, AnalysisOptions, DumpOptions,
    Format, ScanOptions, ThresholdMode,
};
use oracle_scan::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_EMPTY: u8 = 2;
const EXIT_OUTPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "oracle-scan",
    version,
    about = "External-data dependency and complexity scanner for Solidity corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a directory of .sol files, a single file, or a manifest CSV.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum DenominatorArg {
    Parsed,
    Scanned,
}

#[derive(clap::Args)]
struct ScanArgs {
    path: PathBuf,
    /// CSV with header file,project_id,domain,audited_frequency; paths relative to PATH.
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,
    /// Keyword file with category,keyword lines.
    #[arg(long, value_name = "FILE")]
    keywords: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    #[arg(long, value_name = "DIR", default_value = "oracle-scan-out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "parsed")]
    denominator: DenominatorArg,
    /// `auto` or `T1,T2`.
    #[arg(long, default_value = "auto", value_parser = parse_thresholds)]
    thresholds: ThresholdMode,
    /// Count require/assert/revert as decision points.
    #[arg(long)]
    require_branches: bool,
    /// Let structural strategy matches mark a contract as interacting.
    #[arg(long)]
    structural_interacts: bool,
    #[arg(long)]
    no_cache: bool,
    /// Write ast/<file>.json under the output directory.
    #[arg(long)]
    dump_ast: bool,
    /// Write cfg/<file>/*.dot under the output directory.
    #[arg(long)]
    dump_cfg: bool,
    /// Write the corpus name index to index.csv.
    #[arg(long)]
    dump_index: bool,
}

fn parse_thresholds(s: &str) -> Result<ThresholdMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::Scan(args) => run_scan(args),
    }
}

fn run_scan(args: ScanArgs) -> ExitCode {
    let keyword_bytes = match &args.keywords {
        Some(p) => match std::fs::read(p) {
            Ok(b) => Some(b),
            Err(e) => {
                eprintln!("error: cannot read keyword file {}: {e}", p.display());
                return ExitCode::from(EXIT_USAGE);
            }
        },
        None => None,
    };
    let keywords = match load_keywords(keyword_bytes.as_deref()) {
        Ok(k) => k,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let analysis = AnalysisOptions {
        keywords,
        cfg: CfgOptions {
            require_branches: args.require_branches,
        },
        structural_interacts: args.structural_interacts,
    };
    let timestamp = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0))
        .map(|t| t.to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    let opts = ScanOptions {
        analysis,
        keywords_source: args
            .keywords
            .as_ref()
            .map_or_else(|| "builtin".into(), |p| p.display().to_string()),
        denominator: match args.denominator {
            DenominatorArg::Parsed => Denominator::Parsed,
            DenominatorArg::Scanned => Denominator::Scanned,
        },
        thresholds: args.thresholds,
        manifest: args.manifest.clone(),
        cache_dir: (!args.no_cache).then(default_cache_dir),
        timestamp,
    };

    let outcome = match scan(&args.path, &opts) {
        Ok(o) => o,
        Err(e @ Error::EmptyCorpus(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_EMPTY);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let format = match args.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let dumps = DumpOptions {
        ast: args.dump_ast,
        cfg: args.dump_cfg,
        index: args.dump_index,
    };
    let written = write_outputs(&args.out, &emit(&outcome.report, format))
        .and_then(|_| write_dumps(&args.out, &outcome.inputs, &opts.analysis, dumps));
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_OUTPUT);
    }

    let s = &outcome.report.summary;
    eprintln!(
        "scanned {} files ({} parsed ok, {} missing, {} from cache); {} interacting ({:.2}% of {}); report in {}",
        s.scanned,
        s.parsed_ok,
        outcome.report.missing.len(),
        outcome.cache_hits,
        s.interacting,
        s.proportion_percent,
        s.denominator.as_str(),
        args.out.display(),
    );
    if outcome.report.all_failed() {
        eprintln!("error: no file could be analyzed");
        return ExitCode::from(EXIT_EMPTY);
    }
    ExitCode::SUCCESS
}
