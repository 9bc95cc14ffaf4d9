//! Nearest-neighbour statistics of the chain spectrum: the interacting chain
//! shows level repulsion, the non-interacting one does not.

use mbchaos::basis::SpinBasis;
use mbchaos::hamiltonian::{build_spin_chain, SpinChainParams};
use mbchaos::spectral::{diagonalize, level_spacing_with, SpacingOptions};

fn main() -> mbchaos::Result<()> {
    let basis = SpinBasis::new(8)?;
    println!("reference: Poisson ⟨r⟩ ≈ 0.386, GOE ⟨r⟩ ≈ 0.531");
    for j in [0.0, 10.0, 100.0] {
        let mut p = SpinChainParams::new(8);
        p.a = 1.0;
        p.rabi = 100.0;
        p.j = j;
        let (h0, v) = build_spin_chain(&basis, &p)?;
        let dec = diagonalize(&h0.sum(&v)?)?;
        let stats = level_spacing_with(dec.energies(), &SpacingOptions::default())?;
        println!(
            "J = {j:>5}: ⟨r⟩ = {:.3} over {} levels, degenerate fraction {:.3}{}",
            stats.mean_gap_ratio,
            stats.levels_used,
            stats.degenerate_fraction,
            if stats.degenerate { " (flagged degenerate)" } else { "" }
        );
        let bars: String = stats
            .histogram
            .iter()
            .map(|&p| [' ', '.', ':', '|', '#'][((p * 4.0).round() as usize).min(4)])
            .collect();
        println!("          P(s) on [0, {}]: [{bars}]", SpacingOptions::default().max_spacing);
    }
    Ok(())
}
