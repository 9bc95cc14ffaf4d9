//! Strength function of one TBRI realization and its one-parameter fit.
//!
//! `cargo run --release --example tbri_strength_function -- [orbitals particles v0 seed]`

use mbchaos::basis::FermionBasis;
use mbchaos::hamiltonian::{build_tbri, delta_e_squared_direct, delta_e_squared_tbri, TbriParams};
use mbchaos::observables::center_state;
use mbchaos::spectral::{diagonalize, strength_function_in};
use mbchaos::theory::{fit_strength_function, regime_label};

fn main() -> mbchaos::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let num = |i: usize, default: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(default);
    let params = TbriParams::new(num(0, 12.0) as usize, num(1, 6.0) as usize, num(2, 0.4), num(3, 0.0) as u64);

    let basis = FermionBasis::new(params.orbitals, params.particles)?;
    let h = build_tbri(&basis, &params)?;
    let slater: Vec<f64> = basis
        .states()
        .iter()
        .map(|s| (0..params.orbitals).filter(|k| s >> k & 1 == 1).map(|k| k as f64 * params.d0).sum())
        .collect();
    let k0 = center_state(&slater);
    let dec = diagonalize(&h)?;

    let d2 = delta_e_squared_direct(&h, k0)?;
    let d2_formula = delta_e_squared_tbri(params.v0, params.particles, params.orbitals);
    let centre = h.get(k0, k0);
    let half = 6.0 * d2.sqrt();
    let profile = strength_function_in(&dec, k0, 40, centre - half, centre + half)?;
    let fit = fit_strength_function(&profile)?;

    println!("N = {}, k0 = {k0}", basis.states().len());
    println!("ΔE² measured {d2:.5}, closed form {d2_formula:.5}");
    println!("centroid {:.5} (H_k0k0 = {centre:.5}), variance {:.5}", profile.centroid, profile.variance);
    println!(
        "fit: Γ = {:.4}, σ = {:.4}, B = {:.4}, residual {:.3e}",
        fit.gamma, fit.sigma, fit.b, fit.residual
    );
    println!("Γ/σ = {:.3} → {:?}", fit.gamma / fit.sigma, regime_label(fit.gamma / fit.sigma));
    println!("\n{:>10} {:>10} {:>10}", "E", "P", "fit");
    for (e, p) in profile.bin_centers().iter().zip(&profile.heights) {
        println!("{e:>10.4} {p:>10.4} {:>10.4}", fit.density(*e));
    }
    Ok(())
}
