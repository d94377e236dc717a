// Build a corpus-wide name index and export it as CSV.

use oracle_scan::names::{build_index, NameKind};
use oracle_scan::{parse_source, SourceFile};

const FEED: &str = r#"
contract PriceFeed {
    event PriceUpdated(uint256 price);
    modifier onlyOwner() { _; }
    function latestPrice() public view returns (uint256) { return 1; }
}
"#;

const VAULT: &str = r#"
library SafeMath { function add(uint a, uint b) internal pure returns (uint) { return a + b; } }
contract Vault { function deposit() public payable {} }
"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let units: Vec<_> = [("vault.sol", VAULT), ("feed.sol", FEED)]
        .into_iter()
        .map(|(file, text)| (parse_source(&SourceFile::new(file, text)).0, file))
        .collect();
    let index = build_index(units.iter().map(|(ast, file)| (ast, *file)));
    print!("{}", String::from_utf8(index.to_csv())?);

    let types = index.filter_kinds(&[NameKind::Contract, NameKind::Library]);
    println!(
        "{} of {} entries are contracts or libraries",
        types.len(),
        index.len()
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
