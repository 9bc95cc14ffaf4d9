//! Independent reference computations shared by the integration suites.
#![allow(dead_code)]

use mbchaos::spectral::StrengthFunctionProfile;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// `erf(x)` from its Maclaurin series summed in 512-bit fixed point, so the
/// alternating terms cancel without rounding loss even at `|x| = 6`.
pub fn erf_maclaurin(x: f64) -> f64 {
    const P: u32 = 512;
    // x is a dyadic rational, so this scaling is exact
    let (mant, exp) = {
        let bits = x.abs().to_bits();
        if x == 0.0 {
            return 0.0;
        }
        let e = ((bits >> 52) & 0x7ff) as i32;
        let m = if e == 0 { (bits & ((1 << 52) - 1)) << 1 } else { (bits & ((1 << 52) - 1)) | (1 << 52) };
        (BigInt::from(m), e - 1075)
    };
    let xs = if exp >= 0 { (mant << exp as u32) << P } else { (mant << P) >> (-exp) as u32 };
    let x2 = (&xs * &xs) >> P;
    let mut term = xs.clone();
    let mut sum = xs;
    let mut n: u64 = 0;
    while !term.is_zero() {
        n += 1;
        term = -((&term * &x2) >> P) / BigInt::from(n);
        sum += &term / BigInt::from(2 * n + 1);
    }
    let top = (sum.abs() >> (P - 62)).to_u64().unwrap() as f64 / (1u64 << 62) as f64;
    x.signum() * top * std::f64::consts::FRAC_2_SQRT_PI
}

/// Composite Simpson rule on `[a, b]` with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n % 2 == 0);
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// Histogram of a density on `[lo, hi]` (bin averages by Simpson), with the
/// exact moments supplied by the caller.
pub fn synthetic_profile(
    density: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    bins: usize,
    centroid: f64,
    variance: f64,
) -> StrengthFunctionProfile {
    let w = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + w * i as f64).collect();
    let heights: Vec<f64> = edges
        .windows(2)
        .map(|e| simpson(&density, e[0], e[1], 16) / w)
        .collect();
    let captured = heights.iter().sum::<f64>() * w;
    StrengthFunctionProfile {
        k0: 0,
        edges,
        heights,
        captured,
        centroid,
        variance,
        fit: None,
    }
}

/// Eigenvalues of a GOE matrix with off-diagonal variance 1/2.
pub fn goe_spectrum(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let g: f64 = StandardNormal.sample(&mut rng);
            let v = if i == j { g } else { g / 2f64.sqrt() };
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m.symmetric_eigenvalues().iter().copied().collect()
}

/// Points of a unit-density Poisson process.
pub fn poisson_levels(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = 0.0;
    (0..n)
        .map(|_| {
            let u: f64 = rand::Rng::random(&mut rng);
            e += -(1.0 - u).ln();
            e
        })
        .collect()
}

/// Coefficient of determination of `fit` against `y`.
pub fn r_squared(y: &[f64], fit: &[f64]) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_res: f64 = y.iter().zip(fit).map(|(a, b)| (a - b).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|a| (a - mean).powi(2)).sum();
    1.0 - ss_res / ss_tot
}
