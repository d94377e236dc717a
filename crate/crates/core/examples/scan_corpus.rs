// Scan a directory of Solidity files and write JSON and CSV reports.

use std::fs;
use std::path::Path;

use oracle_scan::scan::{emit, scan, write_outputs, Format, ScanOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let listings = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/listings");
    let work = std::env::temp_dir().join(format!("oracle-scan-example-{}", std::process::id()));
    let corpus = work.join("corpus");
    fs::create_dir_all(&corpus)?;
    for entry in fs::read_dir(&listings)? {
        let path = entry?.path();
        fs::copy(&path, corpus.join(path.file_name().unwrap()))?;
    }
    fs::write(
        work.join("manifest.csv"),
        "file,project_id,domain,audited_frequency\n\
         listing1.sol,feeds,defi,\n\
         listing2.sol,feeds,defi,\n\
         listing4.sol,bridge,infrastructure,42\n",
    )?;

    let opts = ScanOptions {
        cache_dir: Some(work.join("cache")),
        ..Default::default()
    };
    let outcome = scan(&corpus, &opts)?;
    let summary = &outcome.report.summary;
    println!(
        "{} files, {} interacting ({:.2}%), cache hits {}",
        summary.scanned, summary.interacting, summary.proportion_percent, outcome.cache_hits
    );

    let managed = ScanOptions {
        manifest: Some(work.join("manifest.csv")),
        ..opts
    };
    let outcome = scan(&corpus, &managed)?;
    for project in &outcome.report.projects {
        println!(
            "{} frequency={} level={:?}",
            project.record.project_id, project.record.access_frequency, project.level
        );
    }

    for note in &outcome.report.notes {
        println!("note: {note}");
    }

    for format in [Format::Json, Format::Csv] {
        for path in write_outputs(&work.join("out"), &emit(&outcome.report, format))? {
            println!("wrote {}", path.display());
        }
    }
    fs::remove_dir_all(&work)?;
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
