//! Short-time fidelity decay compared with the second-order expansion
//! `F ≈ 1 − (δE² + ⟨R⟩) t²`.

use mbchaos::basis::SpinBasis;
use mbchaos::hamiltonian::{add_perturbation, build_spin_chain, SpinChainParams};
use mbchaos::observables::center_state;
use mbchaos::spectral::{diagonalize, overlap_fidelity};
use mbchaos::theory::perturbative_fidelity;

fn main() -> mbchaos::Result<()> {
    let mut p = SpinChainParams::new(6);
    p.a = 1.0;
    p.rabi = 100.0;
    p.j = 100.0;
    p.sigma_p = 15.0;
    p.seed = 11;
    let basis = SpinBasis::new(6)?;
    let (h0, v) = build_spin_chain(&basis, &p)?;
    let h = h0.sum(&v)?;
    let sigma = add_perturbation(&v, 5.0, 11)?;
    let k0 = center_state(h0.diagonal());

    let unp = diagonalize(&h)?;
    let pert = diagonalize(&h.sum(&sigma)?)?;
    let mut psi0 = vec![0.0; h.dimension()];
    psi0[k0] = 1.0;

    let pf = perturbative_fidelity(&h, &sigma, k0, 0.0)?;
    println!(
        "δE² = {:.4} (N_ε = {}, mean ε² = {:.3}), Re⟨R⟩ = {:.3e}",
        pf.delta_e2, pf.n_eps, pf.mean_square, pf.commutator
    );
    let tau = 1.0 / pf.delta_e2.sqrt();
    let times: Vec<f64> = [0.0, 0.002, 0.005, 0.01, 0.02, 0.05].iter().map(|x| x * tau).collect();
    let exact = overlap_fidelity(&unp, &pert, &psi0, &times)?;
    println!("{:>10} {:>14} {:>14}", "t·δE", "1−F exact", "1−F 2nd order");
    for (t, f) in times.iter().zip(&exact) {
        let approx = perturbative_fidelity(&h, &sigma, k0, *t)?.fidelity;
        println!("{:>10.3} {:>14.6e} {:>14.6e}", t / tau, 1.0 - f, 1.0 - approx);
    }
    Ok(())
}
