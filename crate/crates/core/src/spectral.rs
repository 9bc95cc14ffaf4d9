//! Exact diagonalization and spectral time evolution.
//!
//! With `H = Σ_α E^α |α⟩⟨α|` and `|α⟩ = Σ_k C_k^α |k⟩`, a packet started in
//! basis state `k0` has amplitudes `A_m(t) = Σ_α C_m^α C_{k0}^α e^{−iE^α t}`
//! (ħ = 1). Every time sample is evaluated independently, so the grid can be
//! split across threads without changing any result.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonian::SymmetricHamiltonian;
use crate::theory::SfFitParams;

const MAX_SWEEPS: usize = 10_000;

/// Eigenvalues (ascending) and eigenvectors (columns) of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    energies: Vec<f64>,
    states: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn dimension(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `C[(k, α)]` is the component of basis state `k` in eigenstate `α`.
    pub fn states(&self) -> &DMatrix<f64> {
        &self.states
    }

    /// Strength-function weights `(C_{k0}^α)²` for all `α`.
    pub fn weights(&self, k0: usize) -> Vec<f64> {
        self.states.row(k0).iter().map(|c| c * c).collect()
    }

    /// `max_α ‖H C^α − E^α C^α‖₂`.
    pub fn max_residual(&self, h: &SymmetricHamiltonian) -> f64 {
        let n = self.dimension();
        (0..n)
            .map(|a| {
                let v: Vec<f64> = self.states.column(a).iter().copied().collect();
                let hv = h.apply(&v);
                hv.iter()
                    .zip(&v)
                    .map(|(x, y)| (x - self.energies[a] * y).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Rebuilds `C diag(E) Cᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&self.energies));
        &self.states * d * self.states.transpose()
    }

    fn check_index(&self, k0: usize) -> Result<()> {
        if k0 >= self.dimension() {
            return Err(Error::IndexOutOfRange {
                index: k0,
                dimension: self.dimension(),
            });
        }
        Ok(())
    }
}

pub fn diagonalize(h: &SymmetricHamiltonian) -> Result<SpectralDecomposition> {
    let n = h.dimension();
    let dense = h.to_dense();
    let eig = dense
        .try_symmetric_eigen(f64::EPSILON, MAX_SWEEPS)
        .ok_or_else(|| Error::Convergence {
            dimension: n,
            max_abs: h.max_abs(),
            frobenius: h.frobenius_norm(),
        })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let energies = order.iter().map(|&a| eig.eigenvalues[a]).collect();
    let mut states = DMatrix::zeros(n, n);
    for (col, &a) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(a);
        // largest-magnitude component positive (first one on ties)
        let (mut pivot, mut best) = (0, -1.0);
        for (k, c) in v.iter().enumerate() {
            if c.abs() > best {
                best = c.abs();
                pivot = k;
            }
        }
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        states.column_mut(col).copy_from(&(v * sign));
    }
    Ok(SpectralDecomposition { energies, states })
}

/// Probabilities `w_m(t)` of a packet started in one basis state.
#[derive(Debug, Clone)]
pub struct PacketTrajectory {
    pub k0: usize,
    pub times: Vec<f64>,
    /// `w[i][m]` at `times[i]`.
    pub w: Vec<Vec<f64>>,
    /// Return probability `w_{k0}(t)`.
    pub w0: Vec<f64>,
    pub entropy: Option<Vec<f64>>,
    pub fidelity: Option<Vec<f64>>,
}

impl PacketTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("non-finite time".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Real and imaginary parts of `C (a ∘ e^{−iEt})`.
fn propagate(dec: &SpectralDecomposition, coeffs: &[f64], t: f64) -> (DVector<f64>, DVector<f64>) {
    let n = dec.dimension();
    let mut c = DVector::zeros(n);
    let mut s = DVector::zeros(n);
    for (a, (&e, &x)) in dec.energies.iter().zip(coeffs).enumerate() {
        let (sin, cos) = (e * t).sin_cos();
        c[a] = x * cos;
        s[a] = -x * sin;
    }
    (&dec.states * c, &dec.states * s)
}

/// Evolves basis state `k0` over `times`.
pub fn evolve_packet(
    dec: &SpectralDecomposition,
    k0: usize,
    times: &[f64],
) -> Result<PacketTrajectory> {
    dec.check_index(k0)?;
    check_grid(times)?;
    let coeffs: Vec<f64> = dec.states.row(k0).iter().copied().collect();
    let w: Vec<Vec<f64>> = times
        .par_iter()
        .map(|&t| {
            let (re, im) = propagate(dec, &coeffs, t);
            re.iter().zip(im.iter()).map(|(x, y)| x * x + y * y).collect()
        })
        .collect();
    let w0 = w.iter().map(|row: &Vec<f64>| row[k0]).collect();
    Ok(PacketTrajectory {
        k0,
        times: times.to_vec(),
        w,
        w0,
        entropy: None,
        fidelity: None,
    })
}

/// `W0(t) = |Σ_α (C_{k0}^α)² e^{−iE^α t}|²`.
pub fn return_probability(dec: &SpectralDecomposition, k0: usize, times: &[f64]) -> Result<Vec<f64>> {
    dec.check_index(k0)?;
    let weights = dec.weights(k0);
    Ok(times
        .par_iter()
        .map(|&t| fourier_power(dec.energies(), &weights, t))
        .collect())
}

/// `|Σ_α p_α e^{−iE_α t}|²`.
pub fn fourier_power(energies: &[f64], weights: &[f64], t: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (&e, &p) in energies.iter().zip(weights) {
        let (s, c) = (e * t).sin_cos();
        re += p * c;
        im -= p * s;
    }
    re * re + im * im
}

/// `F(t) = |⟨Ψ_p(t)|Ψ_u(t)⟩|²` for a real initial state `psi0`.
pub fn overlap_fidelity(
    unperturbed: &SpectralDecomposition,
    perturbed: &SpectralDecomposition,
    psi0: &[f64],
    times: &[f64],
) -> Result<Vec<f64>> {
    let n = unperturbed.dimension();
    for found in [perturbed.dimension(), psi0.len()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    let norm: f64 = psi0.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "initial state norm {norm} differs from 1"
        )));
    }
    check_grid(times)?;
    let psi = DVector::from_column_slice(psi0);
    let au: Vec<f64> = (unperturbed.states.transpose() * &psi).iter().copied().collect();
    let ap: Vec<f64> = (perturbed.states.transpose() * &psi).iter().copied().collect();
    Ok(times
        .par_iter()
        .map(|&t| {
            let (ur, ui) = propagate(unperturbed, &au, t);
            let (pr, pi) = propagate(perturbed, &ap, t);
            // ⟨p|u⟩ = Σ conj(p) u
            let re = pr.dot(&ur) + pi.dot(&ui);
            let im = pr.dot(&ui) - pi.dot(&ur);
            re * re + im * im
        })
        .collect())
}

/// Binned local density of states `P(E, E_{k0})` with exact moments.
#[derive(Debug, Clone)]
pub struct StrengthFunctionProfile {
    pub k0: usize,
    pub edges: Vec<f64>,
    /// Density per bin; `Σ heights · widths` equals the captured weight.
    pub heights: Vec<f64>,
    /// Total weight falling inside `edges` (1 for the full-range profile).
    pub captured: f64,
    /// `Σ_α w_α E^α` from the unbinned weights.
    pub centroid: f64,
    /// `Σ_α w_α (E^α − centroid)²` from the unbinned weights.
    pub variance: f64,
    pub fit: Option<SfFitParams>,
}

impl StrengthFunctionProfile {
    pub fn bin_centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect()
    }

    pub fn bin_width(&self) -> f64 {
        (self.edges[self.edges.len() - 1] - self.edges[0]) / self.heights.len() as f64
    }

    pub fn integral(&self) -> f64 {
        self.heights.iter().sum::<f64>() * self.bin_width()
    }
}

/// Strength function over the full spectral range.
pub fn strength_function(
    dec: &SpectralDecomposition,
    k0: usize,
    bins: usize,
) -> Result<StrengthFunctionProfile> {
    let e = dec.energies();
    let (mut lo, mut hi) = (e[0], e[e.len() - 1]);
    if hi - lo <= f64::EPSILON * (1.0 + lo.abs().max(hi.abs())) {
        lo -= 0.5;
        hi += 0.5;
    }
    strength_function_in(dec, k0, bins, lo, hi)
}

/// Strength function binned on `[lo, hi]`; weight outside the window is not binned.
pub fn strength_function_in(
    dec: &SpectralDecomposition,
    k0: usize,
    bins: usize,
    lo: f64,
    hi: f64,
) -> Result<StrengthFunctionProfile> {
    dec.check_index(k0)?;
    if bins == 0 || !(hi > lo) {
        return Err(Error::InvalidParameter(format!(
            "need bins > 0 and hi > lo, got {bins} bins on [{lo}, {hi}]"
        )));
    }
    let weights = dec.weights(k0);
    let energies = dec.energies();
    if (dec.dimension() as f64) / (bins as f64) < 5.0 {
        log::warn!(
            "strength function: {} levels over {bins} bins (< 5 per bin)",
            dec.dimension()
        );
    }
    let width = (hi - lo) / bins as f64;
    let mut mass = vec![0.0; bins];
    for (&en, &wt) in energies.iter().zip(&weights) {
        if en < lo || en > hi {
            continue;
        }
        let b = (((en - lo) / width) as usize).min(bins - 1);
        mass[b] += wt;
    }
    let captured = mass.iter().sum();
    let centroid: f64 = energies.iter().zip(&weights).map(|(e, w)| e * w).sum();
    let variance = energies
        .iter()
        .zip(&weights)
        .map(|(e, w)| w * (e - centroid).powi(2))
        .sum();
    Ok(StrengthFunctionProfile {
        k0,
        edges: (0..=bins).map(|i| lo + width * i as f64).collect(),
        heights: mass.into_iter().map(|m| m / width).collect(),
        captured,
        centroid,
        variance,
        fit: None,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct SpacingOptions {
    /// Unfolding window as a fraction of the spectral width.
    pub window_fraction: f64,
    /// Fraction of levels dropped at each spectral edge.
    pub edge_fraction: f64,
    /// Levels closer than `degeneracy_tol × width` are merged.
    pub degeneracy_tol: f64,
    pub min_levels: usize,
    pub bins: usize,
    pub max_spacing: f64,
}

impl Default for SpacingOptions {
    fn default() -> Self {
        Self {
            window_fraction: 0.05,
            edge_fraction: 0.1,
            degeneracy_tol: 1e-9,
            min_levels: 100,
            bins: 40,
            max_spacing: 4.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LevelSpacingStats {
    /// Unfolded nearest-neighbour spacings of the bulk levels.
    pub normalized: Vec<f64>,
    pub edges: Vec<f64>,
    /// Probability density of the unfolded spacings.
    pub histogram: Vec<f64>,
    /// `⟨min(s_i, s_{i+1}) / max(s_i, s_{i+1})⟩`.
    pub mean_gap_ratio: f64,
    pub levels_used: usize,
    /// Fraction of input levels merged as degenerate.
    pub degenerate_fraction: f64,
    /// Set when more than 5% of the levels were degenerate.
    pub degenerate: bool,
}

pub fn level_spacing_statistics(energies: &[f64], window_fraction: f64) -> Result<LevelSpacingStats> {
    level_spacing_with(
        energies,
        &SpacingOptions {
            window_fraction,
            ..SpacingOptions::default()
        },
    )
}

pub fn level_spacing_with(energies: &[f64], opts: &SpacingOptions) -> Result<LevelSpacingStats> {
    if energies.len() < 2 {
        return Err(Error::TooFewLevels {
            found: energies.len(),
            needed: opts.min_levels,
        });
    }
    let mut sorted = energies.to_vec();
    sorted.sort_by(f64::total_cmp);
    let width = sorted[sorted.len() - 1] - sorted[0];
    let tol = opts.degeneracy_tol * width.max(f64::MIN_POSITIVE);

    let mut unique: Vec<f64> = Vec::with_capacity(sorted.len());
    for &e in &sorted {
        match unique.last() {
            Some(&last) if e - last <= tol => {}
            _ => unique.push(e),
        }
    }
    let degenerate_fraction = 1.0 - unique.len() as f64 / sorted.len() as f64;

    let cut = (opts.edge_fraction * unique.len() as f64).floor() as usize;
    let bulk = &unique[cut..unique.len() - cut];
    if bulk.len() < opts.min_levels {
        return Err(Error::TooFewLevels {
            found: bulk.len(),
            needed: opts.min_levels,
        });
    }

    let spacings: Vec<f64> = bulk.windows(2).map(|w| w[1] - w[0]).collect();
    let mids: Vec<f64> = bulk.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let half = 0.5 * opts.window_fraction * width;
    let mut normalized = Vec::with_capacity(spacings.len());
    let (mut lo, mut hi) = (0, 0);
    for (i, &x) in mids.iter().enumerate() {
        while hi < mids.len() && mids[hi] <= x + half {
            hi += 1;
        }
        while mids[lo] < x - half {
            lo += 1;
        }
        let local = spacings[lo..hi].iter().sum::<f64>() / (hi - lo) as f64;
        normalized.push(spacings[i] / local);
    }

    let ratios: Vec<f64> = spacings
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            if a.max(b) > 0.0 {
                a.min(b) / a.max(b)
            } else {
                1.0
            }
        })
        .collect();
    let mean_gap_ratio = ratios.iter().sum::<f64>() / ratios.len().max(1) as f64;

    let bw = opts.max_spacing / opts.bins as f64;
    let mut histogram = vec![0.0; opts.bins];
    for &s in &normalized {
        if s < opts.max_spacing {
            histogram[(s / bw) as usize] += 1.0;
        }
    }
    let total = normalized.len() as f64;
    histogram.iter_mut().for_each(|h| *h /= total * bw);

    Ok(LevelSpacingStats {
        normalized,
        edges: (0..=opts.bins).map(|i| i as f64 * bw).collect(),
        histogram,
        mean_gap_ratio,
        levels_used: bulk.len(),
        degenerate_fraction,
        degenerate: degenerate_fraction > 0.05,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Provenance;
    use crate::rng::{gaussian, stream_rng};
    use rand::Rng;

    fn two_level(v: f64) -> SymmetricHamiltonian {
        let mut h = SymmetricHamiltonian::zeros(2);
        h.set(0, 1, v, Provenance::Deterministic);
        h
    }

    fn random_symmetric(n: usize, seed: u64) -> SymmetricHamiltonian {
        let mut rng = stream_rng(seed, 9);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x = gaussian(&mut rng, 1.0);
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        SymmetricHamiltonian::from_dense(&m).unwrap()
    }

    #[test]
    fn diagonal_input() {
        let h = SymmetricHamiltonian::from_diagonal(vec![3.0, -1.0, 2.0]);
        let d = diagonalize(&h).unwrap();
        assert_eq!(d.energies(), &[-1.0, 2.0, 3.0]);
        let perm = [1, 2, 0];
        for (a, &k) in perm.iter().enumerate() {
            for m in 0..3 {
                let want = if m == k { 1.0 } else { 0.0 };
                assert_eq!(d.states()[(m, a)], want);
            }
        }
    }

    #[test]
    fn two_level_system() {
        let d = diagonalize(&two_level(0.7)).unwrap();
        assert!((d.energies()[0] + 0.7).abs() < 1e-14);
        assert!((d.energies()[1] - 0.7).abs() < 1e-14);
        for c in d.states().iter() {
            assert!((c.abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        }
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        let h = random_symmetric(50, 4);
        let d = diagonalize(&h).unwrap();
        let diff = (d.reconstruct() - h.to_dense()).abs().max();
        assert!(diff < 1e-10, "reconstruction error {diff}");
        let gram = d.states().transpose() * d.states();
        assert!((gram - DMatrix::identity(50, 50)).abs().max() < 1e-12);
        assert!(d.max_residual(&h) <= 1e-10 * h.frobenius_norm());
        assert!(d.energies().windows(2).all(|w| w[0] <= w[1]));
        for a in 0..50 {
            let col = d.states().column(a);
            let big = col.iter().fold(0.0f64, |m, c| if c.abs() > m.abs() { *c } else { m });
            assert!(big > 0.0);
        }
    }

    #[test]
    fn packet_basics() {
        let h = random_symmetric(20, 5);
        let d = diagonalize(&h).unwrap();
        let times: Vec<f64> = (0..30).map(|i| i as f64 * 0.3).collect();
        let tr = evolve_packet(&d, 7, &times).unwrap();
        for (i, row) in tr.w.iter().enumerate() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            assert_eq!(tr.w0[i], row[7]);
        }
        for (m, &x) in tr.w[0].iter().enumerate() {
            let want = if m == 7 { 1.0 } else { 0.0 };
            assert!((x - want).abs() < 1e-12);
        }
        let rp = return_probability(&d, 7, &times).unwrap();
        for (a, b) in rp.iter().zip(&tr.w0) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(evolve_packet(&d, 20, &times).is_err());
        assert!(evolve_packet(&d, 0, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn diagonal_hamiltonian_is_stationary() {
        let d = diagonalize(&SymmetricHamiltonian::from_diagonal(vec![0.0, 1.0, 5.0])).unwrap();
        let tr = evolve_packet(&d, 1, &[0.0, 1.0, 10.0]).unwrap();
        assert!(tr.w0.iter().all(|&w| (w - 1.0).abs() < 1e-15));
    }

    #[test]
    fn rabi_oscillation() {
        let v = 0.9;
        let d = diagonalize(&two_level(v)).unwrap();
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.13).collect();
        let w0 = return_probability(&d, 0, &times).unwrap();
        for (t, w) in times.iter().zip(&w0) {
            assert!((w - (v * t).cos().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn time_reversal_symmetry() {
        let h = random_symmetric(12, 8);
        let d = diagonalize(&h).unwrap();
        let fwd = evolve_packet(&d, 3, &[0.5, 1.7]).unwrap();
        let bwd = evolve_packet(&d, 3, &[-1.7, -0.5]).unwrap();
        for m in 0..12 {
            assert!((fwd.w[0][m] - bwd.w[1][m]).abs() < 1e-12);
            assert!((fwd.w[1][m] - bwd.w[0][m]).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_identical_hamiltonians() {
        let h = random_symmetric(15, 2);
        let d = diagonalize(&h).unwrap();
        let mut psi = vec![0.0; 15];
        psi[4] = 1.0;
        let f = overlap_fidelity(&d, &d, &psi, &[0.0, 0.4, 3.0]).unwrap();
        assert!(f.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        let mut rng = stream_rng(1, 0);
        let raw: Vec<f64> = (0..15).map(|_| rng.random::<f64>() - 0.5).collect();
        let nrm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let psi: Vec<f64> = raw.iter().map(|x| x / nrm).collect();
        let f = overlap_fidelity(&d, &d, &psi, &[1.0, 2.0]).unwrap();
        assert!(f.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        let small = diagonalize(&two_level(1.0)).unwrap();
        assert!(matches!(
            overlap_fidelity(&d, &small, &psi, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(overlap_fidelity(&d, &d, &vec![1.0; 15], &[1.0]).is_err());
    }

    #[test]
    fn strength_function_without_coupling() {
        let d = diagonalize(&SymmetricHamiltonian::from_diagonal(vec![0.0, 1.0, 2.0, 3.0])).unwrap();
        let sf = strength_function(&d, 2, 3).unwrap();
        let nonzero: Vec<usize> = (0..3).filter(|&b| sf.heights[b] > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert!((sf.integral() - 1.0).abs() < 1e-12);
        assert_eq!(sf.centroid, 2.0);
        assert_eq!(sf.variance, 0.0);
    }

    #[test]
    fn strength_function_sum_rules() {
        let h = random_symmetric(40, 13);
        let d = diagonalize(&h).unwrap();
        for k0 in [0, 17, 39] {
            let sf = strength_function(&d, k0, 12).unwrap();
            assert!((sf.integral() - 1.0).abs() < 1e-8);
            assert!((sf.centroid - h.get(k0, k0)).abs() < 1e-8);
            let width = crate::hamiltonian::delta_e_squared_direct(&h, k0).unwrap();
            assert!((sf.variance - width).abs() < 1e-8);
        }
    }

    #[test]
    fn equally_spaced_levels() {
        let e: Vec<f64> = (0..400).map(|i| i as f64 * 0.25).collect();
        let st = level_spacing_statistics(&e, 0.05).unwrap();
        assert!(st.normalized.iter().all(|s| (s - 1.0).abs() < 1e-9));
        assert!((st.mean_gap_ratio - 1.0).abs() < 1e-9);
        assert!(!st.degenerate);
        assert!(matches!(
            level_spacing_statistics(&e[..100], 0.05),
            Err(Error::TooFewLevels { .. })
        ));
    }

    #[test]
    fn degenerate_levels_are_flagged() {
        let e: Vec<f64> = (0..300).map(|i| (i / 2) as f64).collect();
        let st = level_spacing_statistics(&e, 0.05);
        match st {
            Ok(s) => assert!(s.degenerate),
            Err(Error::TooFewLevels { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
}
