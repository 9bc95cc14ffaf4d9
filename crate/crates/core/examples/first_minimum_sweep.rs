//! Depth of the first entropy minimum as the interaction grows.

use mbchaos::harness::{preset, run_experiment};

fn main() -> mbchaos::Result<()> {
    let mut cfg = preset("fig2")?;
    cfg.realizations = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    cfg.sweep.j = vec![0.0, 10.0, 30.0, 100.0, 200.0];
    let result = run_experiment(&cfg)?;
    let table = result.table("first_minimum").expect("first-minimum table");
    let col = |name: &str| table.columns.iter().position(|c| c == name).unwrap();
    let (j, sp, found, ratio) = (col("J"), col("sigma_p"), col("found"), col("ratio"));
    println!("{:>6} {:>8} {:>10}", "J", "σ_p", "Smin/Smax");
    for row in &table.rows {
        let r = if row[found] > 0.5 { format!("{:.3}", row[ratio]) } else { "none".into() };
        println!("{:>6} {:>8} {r:>10}", row[j], row[sp]);
    }
    Ok(())
}
