//! Hamiltonian construction for the two models.
//!
//! Matrices are real symmetric and sparse in the unperturbed basis. Each
//! off-diagonal pair is stored once under the key `(i, j)` with `i < j`, so
//! `H_ij = H_ji` holds bit-for-bit.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::basis::{FermionBasis, ManyBodyBasis, SpinBasis};
use crate::error::{Error, Result};
use crate::rng::{gaussian, stream_rng, DISORDER_STREAM, PERTURBATION_STREAM, TWO_BODY_STREAM};

/// Origin of an off-diagonal element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Deterministic,
    Disorder,
    Perturbation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub value: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricHamiltonian {
    dimension: usize,
    diagonal: Vec<f64>,
    offdiag: BTreeMap<(usize, usize), Coupling>,
}

impl SymmetricHamiltonian {
    pub fn zeros(dimension: usize) -> Self {
        Self {
            dimension,
            diagonal: vec![0.0; dimension],
            offdiag: BTreeMap::new(),
        }
    }

    pub fn from_diagonal(diagonal: Vec<f64>) -> Self {
        Self {
            dimension: diagonal.len(),
            diagonal,
            offdiag: BTreeMap::new(),
        }
    }

    /// Dense symmetric input; entries below `|x| == 0` are not stored.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let n = m.nrows();
        let mut h = Self::from_diagonal((0..n).map(|i| m[(i, i)]).collect());
        for i in 0..n {
            for j in i + 1..n {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::InvalidParameter(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
                if m[(i, j)] != 0.0 {
                    h.set(i, j, m[(i, j)], Provenance::Deterministic);
                }
            }
        }
        Ok(h)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn diagonal_mut(&mut self) -> &mut [f64] {
        &mut self.diagonal
    }

    /// Stored off-diagonal pairs, keyed `(i, j)` with `i < j`.
    pub fn offdiag(&self) -> &BTreeMap<(usize, usize), Coupling> {
        &self.offdiag
    }

    /// Sets `H_ij = H_ji = value`.
    ///
    /// # Panics
    /// If `i == j` or either index is out of range.
    pub fn set(&mut self, i: usize, j: usize, value: f64, provenance: Provenance) {
        assert!(i != j, "use diagonal_mut for diagonal entries");
        assert!(i < self.dimension && j < self.dimension);
        let key = (i.min(j), i.max(j));
        self.offdiag.insert(key, Coupling { value, provenance });
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diagonal[i];
        }
        self.offdiag
            .get(&(i.min(j), i.max(j)))
            .map_or(0.0, |c| c.value)
    }

    /// Non-zero off-diagonal entries `(m, H_mk)` of column `k`, ascending in `m`.
    pub fn column(&self, k: usize) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = (0..k)
            .filter_map(|i| self.offdiag.get(&(i, k)).map(|c| (i, c.value)))
            .collect();
        out.extend(
            self.offdiag
                .range((k, k + 1)..(k + 1, 0))
                .map(|(&(_, j), c)| (j, c.value)),
        );
        out.retain(|&(_, v)| v != 0.0);
        out
    }

    /// Element-wise sum. Provenance of shared entries follows `self`.
    pub fn sum(&self, other: &SymmetricHamiltonian) -> Result<SymmetricHamiltonian> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: other.dimension,
            });
        }
        let mut out = self.clone();
        for (d, o) in out.diagonal.iter_mut().zip(&other.diagonal) {
            *d += o;
        }
        for (&key, c) in &other.offdiag {
            out.offdiag
                .entry(key)
                .and_modify(|e| e.value += c.value)
                .or_insert(*c);
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dimension;
        let mut m = DMatrix::zeros(n, n);
        for (i, &d) in self.diagonal.iter().enumerate() {
            m[(i, i)] = d;
        }
        for (&(i, j), c) in &self.offdiag {
            m[(i, j)] = c.value;
            m[(j, i)] = c.value;
        }
        m
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.diagonal.iter().zip(x).map(|(d, v)| d * v).collect();
        for (&(i, j), c) in &self.offdiag {
            y[i] += c.value * x[j];
            y[j] += c.value * x[i];
        }
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.diagonal
            .iter()
            .chain(self.offdiag.values().map(|c| &c.value))
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        let d: f64 = self.diagonal.iter().map(|v| v * v).sum();
        let o: f64 = self.offdiag.values().map(|c| c.value * c.value).sum();
        (d + 2.0 * o).sqrt()
    }
}

// ---------------------------------------------------------------------------
// TBRI model

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TbriParams {
    pub orbitals: usize,
    pub particles: usize,
    /// Mean single-particle spacing.
    pub d0: f64,
    /// Standard deviation of the two-body amplitudes.
    pub v0: f64,
    pub seed: u64,
}

impl TbriParams {
    pub fn new(orbitals: usize, particles: usize, v0: f64, seed: u64) -> Self {
        Self {
            orbitals,
            particles,
            d0: 1.0,
            v0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d0 > 0.0 && self.d0.is_finite()) {
            return Err(Error::InvalidParameter(format!("d0 must be > 0, got {}", self.d0)));
        }
        if !(self.v0 >= 0.0 && self.v0.is_finite()) {
            return Err(Error::InvalidParameter(format!("V0 must be >= 0, got {}", self.v0)));
        }
        if self.particles > self.orbitals {
            return Err(Error::InvalidParameter(format!(
                "particle count {} exceeds orbital count {}",
                self.particles, self.orbitals
            )));
        }
        Ok(())
    }
}

/// `ε_s = d0 · s`, `s = 0 … M-1`.
pub fn single_particle_energies(orbitals: usize, d0: f64) -> Vec<f64> {
    (0..orbitals).map(|s| d0 * s as f64).collect()
}

/// Independent two-body amplitudes `W_{ab,cd}` for pairs `a < b`, `c < d`.
///
/// The interaction is `Σ_{a<b, c<d} W_{ab,cd} a†_a a†_b a_d a_c`. Hermiticity
/// requires `W_{ab,cd} = W_{cd,ab}`, so one Gaussian is drawn per unordered
/// pair of pairs (diagonal `ab = cd` included). With this normalization the
/// off-diagonal variance of a two-particle move is exactly `V0²`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBodyAmplitudes {
    orbitals: usize,
    pair_count: usize,
    values: Vec<f64>,
}

impl TwoBodyAmplitudes {
    pub fn draw(orbitals: usize, v0: f64, seed: u64) -> Self {
        let pair_count = orbitals * orbitals.saturating_sub(1) / 2;
        let mut values = vec![0.0; pair_count * pair_count];
        let mut rng = stream_rng(seed, TWO_BODY_STREAM);
        for p in 0..pair_count {
            for q in p..pair_count {
                let w = gaussian(&mut rng, v0);
                values[p * pair_count + q] = w;
                values[q * pair_count + p] = w;
            }
        }
        Self {
            orbitals,
            pair_count,
            values,
        }
    }

    pub fn orbitals(&self) -> usize {
        self.orbitals
    }

    fn pair_index(&self, a: usize, b: usize) -> usize {
        debug_assert!(a < b && b < self.orbitals);
        // pairs enumerated (0,1),(0,2),…,(0,M-1),(1,2),…
        a * (2 * self.orbitals - a - 1) / 2 + (b - a - 1)
    }

    /// Antisymmetrized amplitude for arbitrary orbital order.
    pub fn amplitude(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        if a == b || c == d {
            return 0.0;
        }
        let mut sign = 1.0;
        let (a, b) = if a < b { (a, b) } else { sign = -sign; (b, a) };
        let (c, d) = if c < d { (c, d) } else { sign = -sign; (d, c) };
        let p = self.pair_index(a, b);
        let q = self.pair_index(c, d);
        sign * self.values[p * self.pair_count + q]
    }
}

/// `a_s` on a bitmask; `None` if `s` is empty. Sign is `(-1)^{#occupied below s}`.
fn annihilate(state: u64, s: usize) -> Option<(u64, f64)> {
    if state >> s & 1 == 0 {
        return None;
    }
    let below = (state & ((1u64 << s) - 1)).count_ones();
    Some((state & !(1u64 << s), if below % 2 == 0 { 1.0 } else { -1.0 }))
}

fn create(state: u64, s: usize) -> Option<(u64, f64)> {
    if state >> s & 1 == 1 {
        return None;
    }
    let below = (state & ((1u64 << s) - 1)).count_ones();
    Some((state | (1u64 << s), if below % 2 == 0 { 1.0 } else { -1.0 }))
}

pub fn build_tbri(basis: &FermionBasis, params: &TbriParams) -> Result<SymmetricHamiltonian> {
    params.validate()?;
    let amps = TwoBodyAmplitudes::draw(params.orbitals, params.v0, params.seed);
    build_tbri_with(basis, params, &amps)
}

/// TBRI matrix for a given set of amplitudes.
pub fn build_tbri_with(
    basis: &FermionBasis,
    params: &TbriParams,
    amps: &TwoBodyAmplitudes,
) -> Result<SymmetricHamiltonian> {
    params.validate()?;
    if basis.orbitals() != params.orbitals
        || basis.particles() != params.particles
        || amps.orbitals() != params.orbitals
    {
        return Err(Error::InvalidParameter(
            "basis, parameters and amplitudes disagree on M or Np".into(),
        ));
    }
    let m_orb = params.orbitals;
    let eps = single_particle_energies(m_orb, params.d0);
    let n = basis.dimension();
    let mut h = SymmetricHamiltonian::zeros(n);
    let mut row: BTreeMap<usize, f64> = BTreeMap::new();

    for k in 0..n {
        let ket = basis.state(k);
        let occ = basis.occupied(k);
        h.diagonal[k] = occ.iter().map(|&s| eps[s]).sum();

        row.clear();
        for (ci, &c) in occ.iter().enumerate() {
            for &d in &occ[ci + 1..] {
                // a_d a_c |ket>
                let (s1, sg1) = annihilate(ket, c).expect("c occupied");
                let (s2, sg2) = annihilate(s1, d).expect("d occupied");
                for a in 0..m_orb {
                    if s2 >> a & 1 == 1 {
                        continue;
                    }
                    for b in a + 1..m_orb {
                        if s2 >> b & 1 == 1 {
                            continue;
                        }
                        let w = amps.amplitude(a, b, c, d);
                        if w == 0.0 {
                            continue;
                        }
                        let (s3, sg3) = create(s2, b).expect("b empty");
                        let (s4, sg4) = create(s3, a).expect("a empty");
                        let m = basis
                            .index_of(s4)
                            .expect("particle number conserved");
                        if m >= k {
                            *row.entry(m).or_insert(0.0) += sg1 * sg2 * sg3 * sg4 * w;
                        }
                    }
                }
            }
        }
        for (&m, &v) in &row {
            if m == k {
                h.diagonal[k] += v;
            } else if v != 0.0 {
                h.set(k, m, v, Provenance::Disorder);
            }
        }
    }
    Ok(h)
}

/// Closed-form TBRI strength-function variance `V0² Np(Np-1)(M-Np)(M-Np+3)/4`.
pub fn delta_e_squared_tbri(v0: f64, particles: usize, orbitals: usize) -> f64 {
    assert!(particles <= orbitals);
    let np = particles as f64;
    let holes = (orbitals - particles) as f64;
    0.25 * v0 * v0 * np * (np - 1.0).max(0.0) * holes * (holes + 3.0)
}

/// `Σ_{m≠k0} H_{m,k0}²`.
pub fn delta_e_squared_direct(h: &SymmetricHamiltonian, k0: usize) -> Result<f64> {
    if k0 >= h.dimension() {
        return Err(Error::IndexOutOfRange {
            index: k0,
            dimension: h.dimension(),
        });
    }
    Ok(h.column(k0).iter().map(|(_, v)| v * v).sum())
}

// ---------------------------------------------------------------------------
// Spin chain

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinChainParams {
    pub qubits: usize,
    /// Field gradient: `ω_k = ω0 + a k`.
    pub a: f64,
    pub omega0: f64,
    /// Drive frequency; detuning `ξ_k = ω_k − ν`.
    pub nu: f64,
    /// Nearest-neighbour Ising coupling.
    pub j: f64,
    /// Mean Rabi frequency.
    pub rabi: f64,
    /// Standard deviation of the per-element Rabi disorder.
    pub sigma_p: f64,
    /// Standard deviation of the perturbation Σ.
    pub epsilon: f64,
    pub seed: u64,
}

impl SpinChainParams {
    /// `L` qubits with `a = 1`, `Ω0 = 100`, `ν = ω0 = 0` and no disorder.
    pub fn new(qubits: usize) -> Self {
        Self {
            qubits,
            a: 1.0,
            omega0: 0.0,
            nu: 0.0,
            j: 0.0,
            rabi: 100.0,
            sigma_p: 0.0,
            epsilon: 0.0,
            seed: 0,
        }
    }

    pub fn detuning(&self, k: usize) -> f64 {
        self.omega0 + self.a * k as f64 - self.nu
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits == 0 {
            return Err(Error::InvalidParameter("L must be >= 1".into()));
        }
        for (name, v) in [("sigma_p", self.sigma_p), ("epsilon", self.epsilon)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be >= 0, got {v}")));
            }
        }
        for (name, v) in [
            ("a", self.a),
            ("omega0", self.omega0),
            ("nu", self.nu),
            ("J", self.j),
            ("Omega0", self.rabi),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} is not finite")));
            }
        }
        Ok(())
    }
}

/// Unperturbed diagonal part and single-flip coupling of the one-pulse chain.
///
/// `H0(s) = −Σ_k ξ_k m_k − 2J Σ_k m_k m_{k+1}` with `m_k = ±1/2` (open chain),
/// and `V_{s,s'} = −(Ω0 + ξ_p)/2` for every pair differing in one digit.
pub fn build_spin_chain(
    basis: &SpinBasis,
    params: &SpinChainParams,
) -> Result<(SymmetricHamiltonian, SymmetricHamiltonian)> {
    params.validate()?;
    if basis.qubits() != params.qubits {
        return Err(Error::InvalidParameter(format!(
            "basis has {} qubits, parameters {}",
            basis.qubits(),
            params.qubits
        )));
    }
    let l = params.qubits;
    let n = basis.dimension();
    let mz = |s: usize, k: usize| if basis.is_excited(s, k) { 0.5 } else { -0.5 };

    let diagonal = (0..n)
        .map(|s| {
            let field: f64 = (0..l).map(|k| params.detuning(k) * mz(s, k)).sum();
            let ising: f64 = (0..l.saturating_sub(1)).map(|k| mz(s, k) * mz(s, k + 1)).sum();
            -field - 2.0 * params.j * ising
        })
        .collect();
    let h0 = SymmetricHamiltonian::from_diagonal(diagonal);

    let mut v = SymmetricHamiltonian::zeros(n);
    let mut rng = stream_rng(params.seed, DISORDER_STREAM);
    let provenance = if params.sigma_p > 0.0 {
        Provenance::Disorder
    } else {
        Provenance::Deterministic
    };
    for s in 0..n {
        for k in 0..l {
            let t = s ^ (1 << k);
            if t > s {
                // drawn even when sigma_p = 0 so streams align across sweeps
                let xi = gaussian(&mut rng, params.sigma_p);
                let value = -(params.rabi + xi) / 2.0;
                if value != 0.0 {
                    v.set(s, t, value, provenance);
                }
            }
        }
    }
    Ok((h0, v))
}

/// Random perturbation Σ sharing the sparsity pattern of `v`, entries `N(0, ε²)`.
pub fn add_perturbation(
    v: &SymmetricHamiltonian,
    epsilon: f64,
    seed: u64,
) -> Result<SymmetricHamiltonian> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be >= 0, got {epsilon}"
        )));
    }
    let mut sigma = SymmetricHamiltonian::zeros(v.dimension());
    let mut rng = stream_rng(seed, PERTURBATION_STREAM);
    for &(i, j) in v.offdiag().keys() {
        let x = gaussian(&mut rng, epsilon);
        if x != 0.0 {
            sigma.set(i, j, x, Provenance::Perturbation);
        }
    }
    Ok(sigma)
}
