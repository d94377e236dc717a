// Classify each reference listing by its cross-chain interaction strategy.

use std::path::Path;

use oracle_scan::detector::classify_strategies;
use oracle_scan::{parse_source, SourceFile};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/listings");
    for i in 1..=5 {
        let path = dir.join(format!("listing{i}.sol"));
        let (ast, _) = parse_source(&SourceFile::read(&path)?);
        for contract in ast.children.iter().filter(|c| c.kind.is_contract_like()) {
            let labels: Vec<_> = classify_strategies(contract)
                .into_iter()
                .map(|l| l.as_str())
                .collect();
            println!(
                "listing{i} {:<28} {}",
                contract.name().unwrap_or("-"),
                labels.join(";")
            );
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
