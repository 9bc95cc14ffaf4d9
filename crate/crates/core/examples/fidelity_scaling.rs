//! Fidelity against ε·t for three perturbation strengths. Without interaction
//! the curves fall on one Gaussian; with J = 100 they separate.

use mbchaos::harness::{preset, run_experiment};

fn main() -> mbchaos::Result<()> {
    let mut cfg = preset("fig5")?;
    cfg.realizations = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    cfg.steps = 61;
    let result = run_experiment(&cfg)?;
    for j in ["J=0", "J=100"] {
        println!("{j}_sigma_p=0");
        println!("{:>6} {:>8} {:>8} {:>8}", "εt", "ε=3", "ε=5", "ε=7");
        let cols: Vec<_> = ["3", "5", "7"]
            .iter()
            .map(|e| result.series(&format!("{j}_sigma_p=0.F_eps={e}")).expect("fidelity column"))
            .collect();
        for i in (0..result.axis.len()).step_by(5) {
            println!(
                "{:>6.2} {:>8.4} {:>8.4} {:>8.4}",
                result.axis[i], cols[0].mean[i], cols[1].mean[i], cols[2].mean[i]
            );
        }
        println!();
    }
    Ok(())
}
