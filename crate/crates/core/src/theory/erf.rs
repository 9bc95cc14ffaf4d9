//! Error function family.
//!
//! Below `|z| = 2.5` the positive-term series
//! `erf z = (2/√π) z e^{−z²} Σ (2z²)^n / (2n+1)!!` is summed (no cancellation);
//! above it `erfc` comes from its continued fraction, evaluated with the
//! modified Lentz method.

use std::f64::consts::PI;

const SERIES_LIMIT: f64 = 2.5;
const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

fn erf_series(z: f64) -> f64 {
    let two_z2 = 2.0 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0.0;
    while term > sum * 1e-17 {
        n += 1.0;
        term *= two_z2 / (2.0 * n + 1.0);
        sum += term;
    }
    FRAC_2_SQRT_PI * z * (-z * z).exp() * sum
}

/// `√π e^{z²} erfc(z)` for `z > 0` by continued fraction
/// `1/(z + (1/2)/(z + 1/(z + (3/2)/(z + …))))`.
fn erfc_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = z + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

pub fn erf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    let x = z.abs();
    let v = if x < SERIES_LIMIT {
        erf_series(x)
    } else if x > 27.0 {
        1.0
    } else {
        1.0 - (-x * x).exp() * erfc_fraction(x) / PI.sqrt()
    };
    v.copysign(z)
}

pub fn erfc(z: f64) -> f64 {
    if z < SERIES_LIMIT {
        1.0 - erf(z)
    } else if z > 27.0 {
        0.0
    } else {
        (-z * z).exp() * erfc_fraction(z) / PI.sqrt()
    }
}

/// Scaled complement `e^{z²} erfc(z)`, finite for large positive `z`.
pub fn erfcx(z: f64) -> f64 {
    if z < 0.0 {
        return 2.0 * (z * z).exp() - erfcx(-z);
    }
    if z < SERIES_LIMIT {
        (z * z).exp() * (1.0 - erf_series(z))
    } else {
        erfc_fraction(z) / PI.sqrt()
    }
}
