//! Return probability of TBRI states against the golden-rule and Gaussian laws.
//!
//! A weak-coupling instance (Γ0 well below ΔE) decays exponentially at the
//! golden-rule rate; a strong-coupling one follows exp(−ΔE² t²).

use mbchaos::harness::{build_instance, ModelConfig};
use mbchaos::hamiltonian::{delta_e_squared_direct, TbriParams};
use mbchaos::observables::center_state;
use mbchaos::spectral::{diagonalize, return_probability};
use mbchaos::theory::{gamma_golden_rule, gamma_golden_rule_with, w0_predicted, DecayInputs, DecayRegime, RhoEstimator};

fn report(params: TbriParams, t_end_widths: f64) -> mbchaos::Result<()> {
    let model = ModelConfig::Tbri(params);
    let inst = build_instance(&model, 3)?;
    let k0 = center_state(&inst.reference_diagonal);
    let d2 = delta_e_squared_direct(&inst.h, k0)?;
    let g_span = gamma_golden_rule(&inst.h, k0)?;
    let g_kernel = gamma_golden_rule_with(&inst.h, k0, RhoEstimator::Kernel { width: params.d0 })?;
    let dec = diagonalize(&inst.h)?;
    let t_end = t_end_widths / d2.sqrt();
    let times: Vec<f64> = (0..=12).map(|i| t_end * i as f64 / 12.0).collect();
    let w0 = return_probability(&dec, k0, &times)?;

    println!(
        "M={} Np={} V0={}: ΔE = {:.4}, Γ0 (span) = {:.4}, Γ0 (kernel) = {:.4}, Γ0/ΔE = {:.3}",
        params.orbitals, params.particles, params.v0, d2.sqrt(), g_span, g_kernel, g_kernel / d2.sqrt()
    );
    let inputs = DecayInputs { delta_e2: d2, gamma0: g_kernel, gamma: g_kernel };
    // the Lorentzian form only makes sense while Γ0 < ΔE
    let regime = if g_kernel < d2.sqrt() { DecayRegime::LorentzianExponential } else { DecayRegime::Gaussian };
    println!("{:>9} {:>9} {:>12}", "t", "W0", format!("{regime:?}").chars().take(12).collect::<String>());
    for (t, w) in times.iter().zip(&w0) {
        println!("{t:>9.3} {w:>9.4} {:>12.4}", w0_predicted(regime, &inputs, *t));
    }
    println!();
    Ok(())
}

fn main() -> mbchaos::Result<()> {
    report(TbriParams::new(16, 3, 0.05, 0), 12.0)?;
    report(TbriParams::new(12, 6, 0.4, 0), 2.0)
}
