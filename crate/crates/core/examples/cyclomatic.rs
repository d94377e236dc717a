// Build a control-flow graph and compute cyclomatic complexity.

use oracle_scan::cfg::{build_cfg, cyclomatic, decision_point_count, CfgOptions};
use oracle_scan::{parse_source, SourceFile};

const SOURCE: &str = r#"
contract Settlement {
    function settle(uint256 price, uint256 limit) public returns (bool) {
        require(price > 0, "no price");
        for (uint256 i = 0; i < limit; i++) {
            if (price > i && limit != 3) { return true; }
        }
        return price > limit ? true : false;
    }
    function noop() public {}
}
"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (ast, _) = parse_source(&SourceFile::new("settle.sol", SOURCE));
    for opts in [
        CfgOptions::default(),
        CfgOptions {
            require_branches: true,
        },
    ] {
        let graph = build_cfg(&ast, opts);
        println!(
            "require_branches={}: N={} E={} P={} V={} (decision points {})",
            opts.require_branches,
            graph.node_count(),
            graph.edge_count(),
            graph.connected_components(),
            cyclomatic(&graph),
            decision_point_count(&ast, opts)
        );
        for (i, c) in graph.components().iter().enumerate() {
            println!(
                "  {}.{} V={}",
                c.owner.as_deref().unwrap_or("_"),
                c.name,
                graph.component_complexity(i)
            );
        }
    }
    print!("{}", build_cfg(&ast, CfgOptions::default()).to_dot(0));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
