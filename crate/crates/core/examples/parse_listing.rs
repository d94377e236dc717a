// Parse a Solidity listing and print its top-level declarations.

use std::path::Path;

use oracle_scan::{parse_source, SourceFile};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/listings/listing1.sol");
    let source = SourceFile::read(&path)?;
    let (ast, diagnostics) = parse_source(&source);
    if !diagnostics.is_empty() {
        return Err(format!("unexpected diagnostics: {diagnostics:?}").into());
    }
    for node in &ast.children {
        println!(
            "{:?} {} at {}:{}",
            node.kind,
            node.name().unwrap_or("-"),
            node.span.start.line,
            node.span.start.column
        );
        for member in &node.children {
            if let Some(name) = member.name() {
                println!("  {:?} {name}", member.kind);
            }
        }
    }

    // Broken input still yields the contracts that parse.
    let broken = "contract A { function ( § ; }\ncontract B { function ok() public {} }\n";
    let (ast, diagnostics) = parse_source(&SourceFile::new("broken.sol", broken));
    println!(
        "{} diagnostics, recovered {:?}",
        diagnostics.len(),
        ast.children
            .iter()
            .filter_map(|c| c.name())
            .collect::<Vec<_>>()
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
