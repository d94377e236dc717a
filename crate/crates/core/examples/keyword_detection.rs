// Match declared names against the default and a custom keyword list.

use oracle_scan::detector::{load_keywords, match_names, usage_counts, usage_table, KeywordList};
use oracle_scan::names::build_index;
use oracle_scan::{parse_source, SourceFile};

const SOURCE: &str = r#"
interface AggregatorV3Interface { function latestRoundData() external view returns (int256); }
contract ChainlinkOracleClient {
    function requestOracleData() public {}
    function bridgeTokens() public {}
}
"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (ast, _) = parse_source(&SourceFile::new("client.sol", SOURCE));
    let index = build_index([(&ast, "client.sol")]);

    let defaults = KeywordList::default();
    let matches = match_names(&index, &defaults);
    for m in &matches {
        println!(
            "{:<24} matches {:<10} ({})",
            m.entry.name,
            m.keyword,
            m.category.as_str()
        );
    }
    for row in usage_table(&defaults, &usage_counts(&matches)) {
        println!("{},{},{}", row.keyword, row.category.as_str(), row.count);
    }

    let custom = load_keywords(Some(b"# category,keyword\nOracleServices,aggregator\n"))?;
    println!(
        "custom list finds {} match(es)",
        match_names(&index, &custom).len()
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
