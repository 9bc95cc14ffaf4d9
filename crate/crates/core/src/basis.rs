//! Many-body bases of the unperturbed Hamiltonian.
//!
//! Both bases label states by an integer bitmask. For fermions bit `s` is the
//! occupation of orbital `s`; for the spin chain bit `k` is the binary digit
//! `i_k` of the state index (1 = qubit `k` excited). States are kept in
//! ascending bitmask order so that index lookup is a binary search.

/// Default cap on the many-body dimension.
pub const DEFAULT_DIMENSION_CAP: usize = 1 << 16;

const MAX_ORBITALS: usize = 24;
const MAX_QUBITS: usize = 16;

use crate::error::{Error, Result};

/// Which single application of the interaction connects two basis states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingKind {
    /// Two-body fermion interaction: up to two orbitals change each way.
    TwoBody,
    /// One spin flip.
    SingleFlip,
}

/// Common view over the two bases.
pub trait ManyBodyBasis {
    fn dimension(&self) -> usize;
    /// Bitmask of basis state `index`.
    fn state(&self, index: usize) -> u64;
    fn index_of(&self, state: u64) -> Option<usize>;
    fn coupling_kind(&self) -> CouplingKind;
}

/// Slater-determinant basis of `particles` fermions in `orbitals` levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FermionBasis {
    orbitals: usize,
    particles: usize,
    states: Vec<u64>,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Next larger integer with the same popcount (Gosper's hack).
fn next_same_popcount(v: u64) -> u64 {
    let t = v | (v.wrapping_sub(1));
    let shifted = (!t & t.wrapping_add(1)).wrapping_sub(1) >> (v.trailing_zeros() + 1);
    t.wrapping_add(1) | shifted
}

impl FermionBasis {
    pub fn new(orbitals: usize, particles: usize) -> Result<Self> {
        Self::with_cap(orbitals, particles, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(orbitals: usize, particles: usize, cap: usize) -> Result<Self> {
        if particles > orbitals {
            return Err(Error::InvalidParameter(format!(
                "particle count {particles} exceeds orbital count {orbitals}"
            )));
        }
        let dimension = binomial(orbitals, particles);
        if orbitals > MAX_ORBITALS || dimension > cap as u128 {
            return Err(Error::Sizing {
                what: format!("{particles} fermions in {orbitals} orbitals"),
                dimension,
                cap,
            });
        }
        let mut states = Vec::with_capacity(dimension as usize);
        if particles == 0 {
            states.push(0);
        } else {
            let last = ((1u64 << particles) - 1) << (orbitals - particles);
            let mut v = (1u64 << particles) - 1;
            loop {
                states.push(v);
                if v == last {
                    break;
                }
                v = next_same_popcount(v);
            }
        }
        debug_assert_eq!(states.len() as u128, dimension);
        Ok(Self {
            orbitals,
            particles,
            states,
        })
    }

    pub fn orbitals(&self) -> usize {
        self.orbitals
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    /// Occupied orbitals of state `index`, ascending.
    pub fn occupied(&self, index: usize) -> Vec<usize> {
        let mask = self.states[index];
        (0..self.orbitals).filter(|&s| mask >> s & 1 == 1).collect()
    }
}

impl ManyBodyBasis for FermionBasis {
    fn dimension(&self) -> usize {
        self.states.len()
    }

    fn state(&self, index: usize) -> u64 {
        self.states[index]
    }

    fn index_of(&self, state: u64) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }

    fn coupling_kind(&self) -> CouplingKind {
        CouplingKind::TwoBody
    }
}

/// Computational basis of an `L`-qubit chain, `2^L` states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinBasis {
    qubits: usize,
}

impl SpinBasis {
    pub fn new(qubits: usize) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::Sizing {
                what: format!("{qubits}-qubit chain (allowed 1..={MAX_QUBITS})"),
                dimension: if qubits < 128 { 1u128 << qubits } else { u128::MAX },
                cap: 1 << MAX_QUBITS,
            });
        }
        Ok(Self { qubits })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Binary digits `(i_{L-1}, …, i_0)` of `index`, most significant first.
    pub fn digits(&self, index: usize) -> Vec<u8> {
        (0..self.qubits)
            .rev()
            .map(|k| ((index >> k) & 1) as u8)
            .collect()
    }

    /// Inverse of [`SpinBasis::digits`].
    pub fn from_digits(&self, digits: &[u8]) -> Option<usize> {
        if digits.len() != self.qubits || digits.iter().any(|&d| d > 1) {
            return None;
        }
        Some(digits.iter().fold(0usize, |acc, &d| acc << 1 | d as usize))
    }

    /// Whether qubit `k` is excited in state `index`.
    pub fn is_excited(&self, index: usize, k: usize) -> bool {
        (index >> k) & 1 == 1
    }
}

impl ManyBodyBasis for SpinBasis {
    fn dimension(&self) -> usize {
        1 << self.qubits
    }

    fn state(&self, index: usize) -> u64 {
        index as u64
    }

    fn index_of(&self, state: u64) -> Option<usize> {
        ((state as usize) < self.dimension()).then_some(state as usize)
    }

    fn coupling_kind(&self) -> CouplingKind {
        CouplingKind::SingleFlip
    }
}

/// Basis indices reachable from `k0` by one application of the interaction,
/// ascending. The length of the returned list is `N_f`.
pub fn directly_coupled<B: ManyBodyBasis + ?Sized>(
    basis: &B,
    k0: usize,
    kind: CouplingKind,
) -> Result<Vec<usize>> {
    let n = basis.dimension();
    if k0 >= n {
        return Err(Error::IndexOutOfRange {
            index: k0,
            dimension: n,
        });
    }
    let origin = basis.state(k0);
    let coupled = match kind {
        // a two-body term needs a second particle, even for one-orbital moves
        CouplingKind::TwoBody if origin.count_ones() < 2 => Vec::new(),
        // equal particle number, so the xor popcount is 2 × (orbitals moved)
        CouplingKind::TwoBody => (0..n)
            .filter(|&m| {
                let d = (basis.state(m) ^ origin).count_ones();
                m != k0 && d <= 4
            })
            .collect(),
        CouplingKind::SingleFlip => {
            let bits = usize::BITS - (n - 1).leading_zeros();
            let mut out: Vec<usize> = (0..bits)
                .filter_map(|k| basis.index_of(origin ^ (1u64 << k)))
                .collect();
            out.sort_unstable();
            out
        }
    };
    Ok(coupled)
}
