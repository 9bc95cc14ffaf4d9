//! Scalar diagnostics on packet trajectories.

use crate::error::{Error, Result};
use crate::spectral::PacketTrajectory;

const NORM_TOL: f64 = 1e-8;

fn check_normalized(w: &[f64]) -> Result<()> {
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > NORM_TOL || w.iter().any(|&x| x < -NORM_TOL) {
        return Err(Error::Normalization { sum });
    }
    Ok(())
}

/// `S = −Σ w ln w` in nats, with `0 ln 0 = 0`.
pub fn shannon_entropy(w: &[f64]) -> Result<f64> {
    check_normalized(w)?;
    Ok(entropy_unchecked(w))
}

fn entropy_unchecked(w: &[f64]) -> f64 {
    -w.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Participation {
    /// `exp(S)`.
    pub exp_entropy: f64,
    /// `1 / Σ w²`.
    pub participation_ratio: f64,
}

pub fn participation_number(w: &[f64]) -> Result<Participation> {
    let s = shannon_entropy(w)?;
    let ipr: f64 = w.iter().map(|x| x * x).sum();
    Ok(Participation {
        exp_entropy: s.exp(),
        participation_ratio: 1.0 / ipr,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyTrace {
    pub times: Vec<f64>,
    /// `S(t)` in nats.
    pub entropy: Vec<f64>,
    /// `ln N`.
    pub s_max: f64,
}

impl EntropyTrace {
    pub fn from_trajectory(traj: &PacketTrajectory) -> Result<Self> {
        let n = traj.w.first().map_or(1, Vec::len);
        let entropy = traj
            .w
            .iter()
            .map(|w| shannon_entropy(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            times: traj.times.clone(),
            entropy,
            s_max: (n as f64).ln(),
        })
    }

    pub fn normalized(&self) -> Vec<f64> {
        if self.s_max == 0.0 {
            return vec![0.0; self.entropy.len()];
        }
        self.entropy.iter().map(|s| s / self.s_max).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstMinimumReport {
    pub found: bool,
    pub index: usize,
    pub t_min: f64,
    pub s_min: f64,
    /// `S_min / S_max`.
    pub ratio: f64,
}

/// Centered moving average; the window shrinks at the ends.
pub fn moving_average(x: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    (0..x.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(x.len());
            x[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// First strict local minimum after the first strict local maximum of the
/// smoothed trace. `S_min` is read from the raw trace.
pub fn first_minimum(trace: &EntropyTrace, window: usize) -> FirstMinimumReport {
    let not_found = FirstMinimumReport {
        found: false,
        index: 0,
        t_min: f64::NAN,
        s_min: f64::NAN,
        ratio: f64::NAN,
    };
    let s = &trace.entropy;
    if s.len() < 3 {
        return not_found;
    }
    let window = if window % 2 == 0 { window + 1 } else { window.max(1) };
    let sm = moving_average(s, window);
    let Some(peak) = (1..sm.len() - 1).find(|&i| sm[i] > sm[i - 1] && sm[i] > sm[i + 1]) else {
        return not_found;
    };
    match (peak + 1..sm.len() - 1).find(|&i| sm[i] < sm[i - 1] && sm[i] < sm[i + 1]) {
        Some(i) => FirstMinimumReport {
            found: true,
            index: i,
            t_min: trace.times[i],
            s_min: s[i],
            ratio: if trace.s_max > 0.0 { s[i] / trace.s_max } else { f64::NAN },
        },
        None => not_found,
    }
}

/// Basis state whose diagonal energy is closest to the median diagonal energy;
/// ties go to the lowest index.
pub fn center_state(diagonal: &[f64]) -> usize {
    assert!(!diagonal.is_empty());
    let mut sorted = diagonal.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let mut best = 0;
    for (i, &e) in diagonal.iter().enumerate() {
        if (e - median).abs() < (diagonal[best] - median).abs() {
            best = i;
        }
    }
    best
}
