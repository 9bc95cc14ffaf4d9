//! Normalized entropy of the driven chain for the nine (J, σ_p) pairs of the
//! `fig1` preset, with a reduced ensemble. Pass the realization count as the
//! first argument.

use mbchaos::harness::{preset, run_experiment};

fn main() -> mbchaos::Result<()> {
    let mut cfg = preset("fig1")?;
    cfg.realizations = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let result = run_experiment(&cfg)?;
    let quarter = result.axis.len() / 4;
    println!("{:<20} {:>10} {:>10}", "point", "S/S_max", "±");
    for s in result.series.iter().filter(|s| s.name.ends_with(".S_norm")) {
        let tail = &s.mean[s.mean.len() - quarter..];
        let err = s.stderr.as_ref().map_or(0.0, |e| e[e.len() - 1]);
        let label = s.name.trim_end_matches(".S_norm");
        println!("{label:<20} {:>10.3} {err:>10.3}", tail.iter().sum::<f64>() / quarter as f64);
    }
    Ok(())
}
