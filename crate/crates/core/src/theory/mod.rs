//! Closed-form predictions: strength-function phenomenology, return-probability
//! decay laws, Fock-space cascade and entropy growth, short-time fidelity.

mod erf;

use std::f64::consts::PI;

pub use erf::{erf, erfc, erfcx};

use crate::error::{Error, Result};
use crate::hamiltonian::SymmetricHamiltonian;
use crate::spectral::StrengthFunctionProfile;

/// Parameters of `P(E) = B exp(−(E−E0)²/2σ²) / ((E−E0)² + Γ²/4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfFitParams {
    pub b: f64,
    pub gamma: f64,
    pub sigma: f64,
    /// Second central moment the parameters are constrained to.
    pub delta_e2: f64,
    pub e0: f64,
    /// Sum of squared height residuals of the fit (0 when not fitted).
    pub residual: f64,
}

impl SfFitParams {
    /// Parameters for given `(Γ, σ)`, with `B` and `Δ_E²` from the normalization relations.
    pub fn from_widths(gamma: f64, sigma: f64, e0: f64) -> Self {
        let (b, delta_e2) = sf_relations(gamma, sigma);
        Self {
            b,
            gamma,
            sigma,
            delta_e2,
            e0,
            residual: 0.0,
        }
    }

    pub fn density(&self, e: f64) -> f64 {
        let x = e - self.e0;
        self.b * (-x * x / (2.0 * self.sigma * self.sigma)).exp()
            / (x * x + 0.25 * self.gamma * self.gamma)
    }
}

/// `(B, Δ_E²)` implied by unit normalization and the second moment of the
/// phenomenological strength function. Uses `erfcx` so large `Γ/σ` stays finite.
pub fn sf_relations(gamma: f64, sigma: f64) -> (f64, f64) {
    assert!(gamma > 0.0 && sigma > 0.0, "Γ and σ must be positive");
    let scaled = erfcx(gamma / (sigma * 8f64.sqrt()));
    let inv_b = 2.0 * scaled * PI / gamma;
    let b = 1.0 / inv_b;
    let delta_e2 = b * (sigma * (2.0 * PI).sqrt() - 0.5 * PI * gamma * scaled);
    (b, delta_e2)
}

/// σ with `Δ_E²(Γ, σ) = target`, bracketed in `[Δ_E/10, 10 Δ_E]`.
pub fn solve_sigma(gamma: f64, delta_e2: f64) -> Option<f64> {
    let de = delta_e2.sqrt();
    let f = |s: f64| sf_relations(gamma, s).1 - delta_e2;
    let (mut lo, mut hi) = (de / 10.0, de * 10.0);
    let (flo, fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() {
        return None;
    }
    let rising = fhi > flo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= 1e-10 * mid {
            break;
        }
        if (f(mid) > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

const SUBSAMPLES: usize = 8;

fn fit_objective(profile: &StrengthFunctionProfile, p: &SfFitParams) -> f64 {
    let w = profile.bin_width();
    profile
        .edges
        .windows(2)
        .zip(&profile.heights)
        .map(|(e, &h)| {
            let avg = (0..SUBSAMPLES)
                .map(|j| p.density(e[0] + w * (j as f64 + 0.5) / SUBSAMPLES as f64))
                .sum::<f64>()
                / SUBSAMPLES as f64;
            (avg - h).powi(2)
        })
        .sum()
}

/// One-parameter least-squares fit of the phenomenological strength function.
///
/// `E0` is pinned to the measured centroid; for each trial `Γ`, `σ` is solved
/// from the measured second moment and `B` from normalization. `Γ` is scanned
/// on a logarithmic grid and refined by golden-section search.
pub fn fit_strength_function(profile: &StrengthFunctionProfile) -> Result<SfFitParams> {
    let delta_e2 = profile.variance;
    if !(delta_e2 > 0.0) {
        return Err(Error::FitFailure("strength function has zero width".into()));
    }
    let e0 = profile.centroid;
    let de = delta_e2.sqrt();
    let eval = |log_g: f64| -> Option<(f64, SfFitParams)> {
        let gamma = log_g.exp();
        let sigma = solve_sigma(gamma, delta_e2)?;
        let p = SfFitParams::from_widths(gamma, sigma, e0);
        Some((fit_objective(profile, &p), p))
    };

    const GRID: usize = 161;
    let (lo, hi) = ((de * 1e-3).ln(), (de * 1e3).ln());
    let step = (hi - lo) / (GRID - 1) as f64;
    let scan: Vec<Option<(f64, SfFitParams)>> =
        (0..GRID).map(|i| eval(lo + step * i as f64)).collect();
    let best = scan
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|(obj, _)| (i, obj)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .ok_or_else(|| {
            Error::FitFailure(format!(
                "no Γ admits a σ root in [{:.3e}, {:.3e}] for Δ_E² = {delta_e2:.6e}",
                de / 10.0,
                de * 10.0
            ))
        })?;

    // golden-section refinement inside the neighbouring grid cells
    let mut a = lo + step * best.saturating_sub(1) as f64;
    let mut b = lo + step * (best + 1).min(GRID - 1) as f64;
    let score = |x: f64| eval(x).map_or(f64::INFINITY, |r| r.0);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (score(c), score(d));
    for _ in 0..80 {
        if (b - a).abs() < 1e-10 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = score(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = score(d);
        }
    }
    let refined = eval(0.5 * (a + b));
    let grid_best = scan[best].expect("feasible");
    let (obj, mut params) = match refined {
        Some(r) if r.0 <= grid_best.0 => r,
        _ => grid_best,
    };
    params.residual = obj;
    Ok(params)
}

/// Qualitative label for a width ratio (`Γ0/Δ_E` or `Γ/σ`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeLabel {
    LorentzianLike,
    Intermediate,
    GaussianLike,
}

pub fn regime_label(ratio: f64) -> RegimeLabel {
    if ratio < 0.3 {
        RegimeLabel::LorentzianLike
    } else if ratio > 3.0 {
        RegimeLabel::GaussianLike
    } else {
        RegimeLabel::Intermediate
    }
}

/// How the density `ρ_f` of directly coupled states is estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoEstimator {
    /// `(N_f − 1) / span` of the coupled states' diagonal energies.
    Span,
    /// Gaussian kernel density of the coupled states' diagonal energies,
    /// evaluated at `H_{k0,k0}` with the given kernel width.
    Kernel { width: f64 },
}

/// Golden-rule width `Γ0 = 2π ⟨V²⟩ ρ_f` with the span estimator.
pub fn gamma_golden_rule(h: &SymmetricHamiltonian, k0: usize) -> Result<f64> {
    gamma_golden_rule_with(h, k0, RhoEstimator::Span)
}

/// Golden-rule width with an explicit `ρ_f` estimator. `⟨V²⟩` is the mean
/// square of the non-zero couplings in column `k0`; energies are taken from
/// the diagonal of `h`.
pub fn gamma_golden_rule_with(
    h: &SymmetricHamiltonian,
    k0: usize,
    estimator: RhoEstimator,
) -> Result<f64> {
    if k0 >= h.dimension() {
        return Err(Error::IndexOutOfRange {
            index: k0,
            dimension: h.dimension(),
        });
    }
    let col = h.column(k0);
    if col.is_empty() {
        return Ok(0.0);
    }
    let mean_sq = col.iter().map(|(_, v)| v * v).sum::<f64>() / col.len() as f64;
    let diag = h.diagonal();
    let rho = match estimator {
        RhoEstimator::Span => {
            if col.len() < 2 {
                return Err(Error::InvalidParameter(
                    "golden rule needs at least two coupled states".into(),
                ));
            }
            let (lo, hi) = col.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(m, _)| {
                (lo.min(diag[m]), hi.max(diag[m]))
            });
            let span = hi - lo;
            if !(span > 0.0) {
                return Err(Error::InvalidParameter(
                    "coupled states are degenerate: zero energy span".into(),
                ));
            }
            (col.len() - 1) as f64 / span
        }
        RhoEstimator::Kernel { width } => {
            if !(width > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "kernel width must be positive, got {width}"
                )));
            }
            let e0 = diag[k0];
            let norm = 1.0 / (width * (2.0 * PI).sqrt());
            col.iter()
                .map(|&(m, _)| {
                    let x = (diag[m] - e0) / width;
                    norm * (-0.5 * x * x).exp()
                })
                .sum()
        }
    };
    Ok(2.0 * PI * mean_sq * rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayRegime {
    /// `1 − Δ_E² t²`, clamped at 0.
    PerturbativeQuadratic,
    /// `exp(Γ0²/(πΔ_E²) − Γ0 t)`.
    LorentzianExponential,
    /// `exp(−Δ_E² t²)`.
    Gaussian,
    /// `(π²Γ²/8Δ_E²) exp(Γ²/4Δ_E² − Γ t)`.
    LongTimeExponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayInputs {
    pub delta_e2: f64,
    /// Golden-rule width.
    pub gamma0: f64,
    /// Effective strength-function width.
    pub gamma: f64,
}

impl DecayInputs {
    pub fn from_fit(fit: &SfFitParams, gamma0: f64) -> Self {
        Self {
            delta_e2: fit.delta_e2,
            gamma0,
            gamma: fit.gamma,
        }
    }
}

pub fn w0_predicted(regime: DecayRegime, p: &DecayInputs, t: f64) -> f64 {
    let d2 = p.delta_e2;
    match regime {
        DecayRegime::PerturbativeQuadratic => (1.0 - d2 * t * t).max(0.0),
        DecayRegime::LorentzianExponential => {
            (p.gamma0 * p.gamma0 / (PI * d2) - p.gamma0 * t).exp()
        }
        DecayRegime::Gaussian => (-d2 * t * t).exp(),
        DecayRegime::LongTimeExponential => {
            PI * PI * p.gamma * p.gamma / (8.0 * d2)
                * (0.25 * p.gamma * p.gamma / d2 - p.gamma * t).exp()
        }
    }
}

/// What drives the cascade argument `x` in `W_n = x^n e^{−x}/n!`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CascadeArgument {
    /// `x = Γ t`.
    Linear,
    /// `x = −ln W0(t)` with the given measured or predicted `W0`.
    ReturnProbability(f64),
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Occupation of the `n`-th shell of the Fock-space cascade.
pub fn cascade_wn(gamma: f64, t: f64, n: u32, arg: CascadeArgument) -> f64 {
    let x = match arg {
        CascadeArgument::Linear => gamma * t,
        CascadeArgument::ReturnProbability(w0) => -w0.ln(),
    };
    if x <= 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (n as f64 * x.ln() - x - ln_factorial(n)).exp()
}

/// Shannon entropy of the Poisson distribution with mean `x`.
pub fn poisson_entropy(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut s = 0.0;
    let mut n = 0u32;
    loop {
        let ln_p = n as f64 * x.ln() - x - ln_factorial(n);
        let p = ln_p.exp();
        s -= p * ln_p;
        if n as f64 > x && p < 1e-16 {
            break;
        }
        n += 1;
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyVariant {
    /// Full cascade expression with the Poisson sum.
    ExactCascade,
    /// `Γ t ln N_f`.
    Linear,
    /// Leading short-time term `Δ_E² t²`.
    SmallTime { delta_e2: f64 },
}

pub fn entropy_predicted(gamma: f64, t: f64, n_f: usize, variant: EntropyVariant) -> f64 {
    assert!(n_f >= 1);
    let x = gamma * t;
    let ln_nf = (n_f as f64).ln();
    match variant {
        EntropyVariant::Linear => x * ln_nf,
        EntropyVariant::SmallTime { delta_e2 } => delta_e2 * t * t,
        EntropyVariant::ExactCascade => {
            if x <= 0.0 {
                return 0.0;
            }
            // Σ_n (x^n/n!) ln(x^n/n!), weighted by e^{−x}
            let mut acc = 0.0;
            let mut n = 0u32;
            loop {
                let ln_term = n as f64 * x.ln() - ln_factorial(n);
                let weight = (ln_term - x).exp();
                acc += weight * ln_term;
                if n as f64 > x && weight < 1e-16 {
                    break;
                }
                n += 1;
            }
            x * ln_nf + x - acc
        }
    }
}

/// `S = −W0 ln W0 − (1−W0) ln((1−W0)/N_pc)` for each sample of a `W0` trace.
pub fn entropy_phenomenological(w0: &[f64], npc_max: f64) -> Vec<f64> {
    assert!(npc_max >= 1.0);
    w0.iter()
        .map(|&w| {
            let a = if w > 0.0 { -w * w.ln() } else { 0.0 };
            let r = 1.0 - w;
            let b = if r > 0.0 { -r * (r / npc_max).ln() } else { 0.0 };
            a + b
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeFidelity {
    pub fidelity: f64,
    /// `Σ_{m≠k0} Σ_{m,k0}²`.
    pub delta_e2: f64,
    /// `Re⟨k0|HΣ − ΣH|k0⟩`.
    pub commutator: f64,
    /// Non-zero off-diagonal entries of Σ in column `k0`.
    pub n_eps: usize,
    /// `δ_E² / N_ε`, the empirical `ε²`.
    pub mean_square: f64,
}

/// Second-order fidelity `1 − δ_E² t² − Re⟨R⟩ t²`, `R = HΣ − ΣH`.
pub fn perturbative_fidelity(
    h: &SymmetricHamiltonian,
    sigma: &SymmetricHamiltonian,
    k0: usize,
    t: f64,
) -> Result<PerturbativeFidelity> {
    if h.dimension() != sigma.dimension() {
        return Err(Error::DimensionMismatch {
            expected: h.dimension(),
            found: sigma.dimension(),
        });
    }
    let delta_e2 = crate::hamiltonian::delta_e_squared_direct(sigma, k0)?;
    let scol = sigma.column(k0);
    let hcol = h.column(k0);
    // (HΣ)_{k0k0} = Σ_m H_{k0m} Σ_{mk0}, (ΣH)_{k0k0} = Σ_m Σ_{k0m} H_{mk0}
    let mut h_sigma = h.get(k0, k0) * sigma.get(k0, k0);
    for &(m, s) in &scol {
        h_sigma += h.get(k0, m) * s;
    }
    let mut sigma_h = sigma.get(k0, k0) * h.get(k0, k0);
    for &(m, hv) in &hcol {
        sigma_h += sigma.get(k0, m) * hv;
    }
    let commutator = h_sigma - sigma_h;
    let n_eps = scol.len();
    Ok(PerturbativeFidelity {
        fidelity: 1.0 - delta_e2 * t * t - commutator * t * t,
        delta_e2,
        commutator,
        n_eps,
        mean_square: if n_eps > 0 { delta_e2 / n_eps as f64 } else { 0.0 },
    })
}
