//! Early entropy growth against the cascade estimate `Γ t ln N_f`, with Γ
//! read off the measured return probability.

use mbchaos::harness::{preset, run_experiment};

fn main() -> mbchaos::Result<()> {
    let mut cfg = preset("fig3")?;
    cfg.realizations = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let result = run_experiment(&cfg)?;
    let l = 8f64;
    for sp in ["0", "15", "50"] {
        let label = format!("sigma_p={sp}");
        let get = |k: &str| result.scalar(&format!("{label}.{k}")).map(|s| s.mean);
        match (get("entropy_slope"), get("gamma_w0")) {
            (Some(slope), Some(gamma)) => println!(
                "σ_p = {sp:>2}: dS/dt = {slope:8.2}, Γ ln L = {:8.2}, ratio {:.3}  (window t ∈ [{:.4}, {:.4}])",
                gamma * l.ln(),
                slope / (gamma * l.ln()),
                get("window_t0").unwrap_or(f64::NAN),
                get("window_t1").unwrap_or(f64::NAN)
            ),
            _ => println!("σ_p = {sp:>2}: no pre-saturation window"),
        }
    }
    Ok(())
}
