// Pearson correlation with a two-sided Student t p-value.

use oracle_scan::analytics::pearson;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let frequency = [3.0, 8.0, 1.0, 14.0, 6.0, 22.0, 9.0, 2.0, 17.0, 11.0];
    let complexity = [4.0, 9.0, 2.0, 11.0, 10.0, 19.0, 7.0, 5.0, 12.0, 8.0];
    let c = pearson(&frequency, &complexity)?;
    println!(
        "n={} r={:.4} t={:.4} p={:.6}",
        c.n, c.r, c.t_stat, c.p_two_sided
    );

    if let Err(e) = pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]) {
        println!("constant series: {e}");
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
