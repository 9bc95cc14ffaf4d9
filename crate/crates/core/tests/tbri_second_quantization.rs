//! The TBRI matrix against a dense Jordan–Wigner construction of the same
//! second-quantized operator.

use mbchaos::basis::{directly_coupled, CouplingKind, FermionBasis, ManyBodyBasis};
use mbchaos::hamiltonian::{build_tbri_with, single_particle_energies, TbriParams, TwoBodyAmplitudes};
use nalgebra::DMatrix;

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// Annihilator of orbital `s` on the full `2^M` Fock space; orbital `s` is
/// bit `s` of the state index.
fn annihilator(m: usize, s: usize) -> DMatrix<f64> {
    let id = DMatrix::<f64>::identity(2, 2);
    let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let lower = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let mut op = DMatrix::<f64>::identity(1, 1);
    for q in (0..m).rev() {
        let factor = if q == s {
            &lower
        } else if q < s {
            &z
        } else {
            &id
        };
        op = kron(&op, factor);
    }
    op
}

fn dense_fock_hamiltonian(params: &TbriParams, amps: &TwoBodyAmplitudes) -> DMatrix<f64> {
    let m = params.orbitals;
    let c: Vec<DMatrix<f64>> = (0..m).map(|s| annihilator(m, s)).collect();
    let cd: Vec<DMatrix<f64>> = c.iter().map(|x| x.transpose()).collect();
    let eps = single_particle_energies(m, params.d0);
    let dim = 1 << m;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for s in 0..m {
        h += &cd[s] * &c[s] * eps[s];
    }
    for a in 0..m {
        for b in a + 1..m {
            for cc in 0..m {
                for d in cc + 1..m {
                    let w = amps.amplitude(a, b, cc, d);
                    h += &cd[a] * &cd[b] * &c[d] * &c[cc] * w;
                }
            }
        }
    }
    h
}

fn check(m: usize, np: usize, seed: u64) {
    let params = TbriParams::new(m, np, 0.7, seed);
    let amps = TwoBodyAmplitudes::draw(m, params.v0, seed);
    let basis = FermionBasis::new(m, np).unwrap();
    let ours = build_tbri_with(&basis, &params, &amps).unwrap().to_dense();
    let full = dense_fock_hamiltonian(&params, &amps);

    let n = basis.dimension();
    let mut max_err: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let oracle = full[(basis.state(i) as usize, basis.state(j) as usize)];
            max_err = max_err.max((oracle - ours[(i, j)]).abs());
        }
    }
    assert!(max_err < 1e-12, "M={m} Np={np}: max deviation {max_err:e}");

    // the operator conserves particle number: no leakage out of the sector
    let in_sector = |x: usize| x.count_ones() as usize == np;
    for x in (0..full.nrows()).filter(|&x| in_sector(x)) {
        for y in (0..full.ncols()).filter(|&y| !in_sector(y)) {
            assert_eq!(full[(x, y)], 0.0);
        }
    }

    // generic amplitudes couple every state to the same number of partners;
    // a lone particle feels no two-body term
    let holes = m - np;
    let expected = if np < 2 {
        0
    } else {
        np * holes + np * (np - 1) / 2 * holes * (holes - 1) / 2
    };
    for k in 0..n {
        let nonzero = (0..n).filter(|&j| j != k && ours[(j, k)].abs() > 1e-14).count();
        assert_eq!(nonzero, expected, "state {k}");
        assert_eq!(directly_coupled(&basis, k, CouplingKind::TwoBody).unwrap().len(), expected);
    }
}

#[test]
fn four_orbitals_two_particles() {
    check(4, 2, 1);
}

#[test]
fn six_orbitals_three_particles() {
    check(6, 3, 2);
}

#[test]
fn five_orbitals_one_particle() {
    check(5, 1, 3);
}
