// Fit Low/Medium/High dependency thresholds to a frequency vector.

use oracle_scan::analytics::{fit_thresholds, LevelThresholds};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let frequencies = [0, 1, 1, 2, 3, 3, 40, 44, 51, 60, 700, 812, 11_724];
    let fitted = fit_thresholds(&frequencies)?;
    println!("t1={} t2={}", fitted.t1, fitted.t2);
    for f in frequencies {
        println!("{f:>6} {}", fitted.level(f).as_str());
    }

    let fixed = LevelThresholds::parse("10,1000")?;
    println!("fixed thresholds put 812 in {}", fixed.level(812).as_str());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
