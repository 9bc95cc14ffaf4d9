mod common;

use common::{erf_maclaurin, simpson, synthetic_profile};
use mbchaos::basis::FermionBasis;
use mbchaos::hamiltonian::{build_tbri, TbriParams};
use mbchaos::observables::center_state;
use mbchaos::theory::{
    cascade_wn, entropy_predicted, erf, fit_strength_function, gamma_golden_rule_with,
    poisson_entropy, sf_relations, solve_sigma, w0_predicted, CascadeArgument, DecayInputs,
    DecayRegime, EntropyVariant, RhoEstimator, SfFitParams,
};
use proptest::prelude::*;

#[test]
fn erf_against_exact_series() {
    for i in 0..100 {
        let x = -6.0 + 12.0 * i as f64 / 99.0;
        let diff = (erf(x) - erf_maclaurin(x)).abs();
        assert!(diff < 1e-12, "x = {x}: {diff:e}");
    }
    assert!((erf_maclaurin(1.0) - 0.8427007929497149).abs() < 1e-15);
}

#[test]
fn sf_relations_quadrature() {
    for &(gamma, sigma) in &[(1.0, 1.0), (0.2, 3.0), (4.0, 1.5), (10.0, 0.5)] {
        let p = SfFitParams::from_widths(gamma, sigma, 0.7);
        let (lo, hi) = (0.7 - 12.0 * sigma, 0.7 + 12.0 * sigma);
        let n = 400_000;
        let mass = simpson(|e| p.density(e), lo, hi, n);
        let second = simpson(|e| (e - 0.7).powi(2) * p.density(e), lo, hi, n);
        assert!((mass - 1.0).abs() < 1e-6, "Γ={gamma} σ={sigma}: mass {mass}");
        assert!((second - p.delta_e2).abs() < 1e-6, "Γ={gamma} σ={sigma}: {second} vs {}", p.delta_e2);
    }
    let (b, _) = sf_relations(1.0, 1.0);
    assert!((b - 0.2276).abs() < 5e-5, "B = {b}");
    // small-Γ limit B → Γ/2π
    let (b, _) = sf_relations(1e-6, 1.0);
    assert!((b / (1e-6 / (2.0 * std::f64::consts::PI)) - 1.0).abs() < 1e-5);
}

#[test]
fn fit_recovers_generating_widths() {
    let truth = SfFitParams::from_widths(2.0, 5.0, 0.0);
    let profile = synthetic_profile(|e| truth.density(e), -40.0, 40.0, 80, 0.0, truth.delta_e2);
    let fit = fit_strength_function(&profile).unwrap();
    assert!((fit.gamma / 2.0 - 1.0).abs() < 0.1, "Γ = {}", fit.gamma);
    assert!((fit.sigma / 5.0 - 1.0).abs() < 0.1, "σ = {}", fit.sigma);
}

/// Full width at half maximum of a histogram, by linear interpolation.
fn fwhm(centers: &[f64], heights: &[f64]) -> f64 {
    let (peak, &max) = heights
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let half = max / 2.0;
    let cross = |range: Box<dyn Iterator<Item = usize>>| -> f64 {
        let mut prev = peak;
        for i in range {
            if heights[i] < half {
                let f = (heights[prev] - half) / (heights[prev] - heights[i]);
                return centers[prev] + f * (centers[i] - centers[prev]);
            }
            prev = i;
        }
        f64::NAN
    };
    cross(Box::new(peak + 1..heights.len())) - cross(Box::new((0..peak).rev()))
}

#[test]
fn near_lorentzian_width_is_the_full_width() {
    // Γ ≪ σ: the core is a Lorentzian whose half width at half maximum is Γ/2
    let truth = SfFitParams::from_widths(1.0, 40.0, 0.0);
    let profile = synthetic_profile(|e| truth.density(e), -240.0, 240.0, 4800, 0.0, truth.delta_e2);
    let width = fwhm(&profile.bin_centers(), &profile.heights);
    let fit = fit_strength_function(&profile).unwrap();
    assert!((fit.gamma / width - 1.0).abs() < 0.15, "Γ = {}, FWHM = {width}", fit.gamma);
    assert!((fit.gamma / (width / 2.0) - 2.0).abs() < 0.3, "HWHM is half of Γ");
}

#[test]
fn near_gaussian_sigma_matches_second_moment() {
    let s: f64 = 3.0;
    let norm = 1.0 / (s * (2.0 * std::f64::consts::PI).sqrt());
    let profile = synthetic_profile(
        |e| norm * (-e * e / (2.0 * s * s)).exp(),
        -18.0,
        18.0,
        72,
        0.0,
        s * s,
    );
    let fit = fit_strength_function(&profile).unwrap();
    assert!((fit.sigma / s - 1.0).abs() < 0.1, "σ = {}", fit.sigma);
    assert!(fit.gamma > 3.0 * fit.sigma, "Γ/σ = {}", fit.gamma / fit.sigma);
}

#[test]
fn golden_rule_ratio_grows_with_coupling() {
    // Γ0 ∝ V0² while ΔE ∝ V0, so weak coupling is the small-ratio end
    let basis = FermionBasis::new(10, 4).unwrap();
    let mut last = 0.0;
    for v0 in [0.02, 0.05, 0.1, 0.2, 0.4] {
        let mut ratio = 0.0;
        for seed in 0..4 {
            let params = TbriParams::new(10, 4, v0, seed);
            let h = build_tbri(&basis, &params).unwrap();
            let slater: Vec<f64> = basis
                .states()
                .iter()
                .map(|s| (0..10).filter(|k| s >> k & 1 == 1).map(|k| k as f64).sum())
                .collect();
            let k0 = center_state(&slater);
            let g = gamma_golden_rule_with(&h, k0, RhoEstimator::Span).unwrap();
            let d2 = mbchaos::hamiltonian::delta_e_squared_direct(&h, k0).unwrap();
            ratio += g / d2.sqrt() / 4.0;
        }
        assert!(ratio > last, "V0 = {v0}: ratio {ratio} after {last}");
        last = ratio;
    }
}

#[test]
fn lorentzian_correction_vanishes_at_weak_coupling() {
    let p = DecayInputs { delta_e2: 1.0, gamma0: 1e-3, gamma: 1e-3 };
    let factor = w0_predicted(DecayRegime::LorentzianExponential, &p, 0.0);
    assert!((factor - 1.0).abs() < 1e-6);
}

#[test]
fn cascade_values() {
    let w = cascade_wn(1.0, 2.0, 2, CascadeArgument::Linear);
    assert!((w - 2.0 * (-2f64).exp()).abs() < 1e-15);
    assert_eq!(cascade_wn(3.0, 0.0, 0, CascadeArgument::Linear), 1.0);
    assert_eq!(cascade_wn(3.0, 0.0, 4, CascadeArgument::Linear), 0.0);
    assert!((entropy_predicted(1.0, 2.0, 8, EntropyVariant::Linear) - 2.0 * 8f64.ln()).abs() < 1e-12);
}

proptest! {
    #[test]
    fn cascade_mass_is_conserved(x in 0.0f64..50.0) {
        let mut sum = 0.0;
        let mut n = 0;
        while sum < 1.0 - 1e-12 {
            sum += cascade_wn(1.0, x, n, CascadeArgument::Linear);
            n += 1;
            prop_assert!(n < 400, "partial sums stalled at {sum}");
        }
        prop_assert!(sum <= 1.0 + 1e-12);
    }

    #[test]
    fn cascade_regrouping_identity(gamma in 0.01f64..5.0, t in 0.0f64..8.0, nf in 1usize..500) {
        let x = gamma * t;
        let exact = entropy_predicted(gamma, t, nf, EntropyVariant::ExactCascade);
        // Σ_n e^{−x} (x^n/n!) ln(x^n/n!), summed directly
        let mut sum = 0.0;
        let mut ln_fact = 0.0;
        if x > 0.0 {
            for n in 0..400u32 {
                if n > 0 {
                    ln_fact += (n as f64).ln();
                }
                let ln_term = n as f64 * x.ln() - ln_fact;
                sum += (ln_term - x).exp() * ln_term;
            }
        }
        prop_assert!((exact - x * (nf as f64).ln() - x + sum).abs() < 1e-10);
        // same value as the Shannon entropy of W_n shared evenly by N_f^n states
        let shannon: f64 = (0..400u32)
            .map(|n| cascade_wn(gamma, t, n, CascadeArgument::Linear))
            .enumerate()
            .filter(|&(_, w)| w > 0.0)
            .map(|(n, w)| -w * (w.ln() - n as f64 * (nf as f64).ln()))
            .sum();
        prop_assert!((exact - shannon).abs() < 1e-9, "{exact} vs {shannon}");
        prop_assert!((exact - x * (nf as f64).ln() - poisson_entropy(x)).abs() < 1e-9);
    }

    #[test]
    fn sigma_solution_round_trips(gamma in 0.05f64..20.0, sigma in 0.5f64..10.0) {
        let (_, d2) = sf_relations(gamma, sigma);
        if let Some(s) = solve_sigma(gamma, d2) {
            prop_assert!((s / sigma - 1.0).abs() < 1e-8, "{s} vs {sigma}");
        }
    }

    #[test]
    fn erf_is_odd_and_bounded(x in -8.0f64..8.0) {
        prop_assert_eq!(erf(-x), -erf(x));
        prop_assert!(erf(x).abs() <= 1.0);
    }
}
