use std::collections::BTreeMap;

use rayon::prelude::*;

use super::config::{ExperimentConfig, K0Policy, ModelConfig, Output, SweepPoint, TimeAxis};
use crate::basis::{directly_coupled, CouplingKind, FermionBasis, ManyBodyBasis, SpinBasis};
use crate::error::{Error, Result};
use crate::hamiltonian::{
    add_perturbation, build_spin_chain, build_tbri, delta_e_squared_direct,
    single_particle_energies, SymmetricHamiltonian,
};
use crate::observables::{center_state, first_minimum, EntropyTrace};
use crate::rng::realization_seed;
use crate::spectral::{
    diagonalize, evolve_packet, level_spacing_with, overlap_fidelity, return_probability,
    strength_function_in, SpacingOptions, StrengthFunctionProfile,
};
use crate::theory::{self, EntropyVariant};

/// A mean trace over realizations, sampled on the result axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub mean: Vec<f64>,
    /// Standard error of the mean; `None` for derived (theory) columns.
    pub stderr: Option<Vec<f64>>,
}

/// A numeric side table (strength-function histogram, first minima, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scalar {
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub config: ExperimentConfig,
    pub preset: Option<String>,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    /// `"t"` or `"eps_t"`.
    pub axis_name: String,
    pub axis: Vec<f64>,
    pub series: Vec<Series>,
    pub tables: Vec<Table>,
    pub scalars: BTreeMap<String, Scalar>,
    pub metadata: Metadata,
}

impl EnsembleResult {
    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn scalar(&self, name: &str) -> Option<Scalar> {
        self.scalars.get(name).copied()
    }
}

/// Mean and standard error of the mean, accumulated in slice order.
pub fn mean_stderr(samples: &[f64]) -> Scalar {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return Scalar { mean, stderr: 0.0 };
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Scalar {
        mean,
        stderr: (var / n).sqrt(),
    }
}

fn reduce_traces(traces: &[&[f64]]) -> (Vec<f64>, Vec<f64>) {
    let len = traces[0].len();
    let mut column = vec![0.0; traces.len()];
    let mut mean = Vec::with_capacity(len);
    let mut stderr = Vec::with_capacity(len);
    for i in 0..len {
        for (c, t) in column.iter_mut().zip(traces) {
            *c = t[i];
        }
        let s = mean_stderr(&column);
        mean.push(s.mean);
        stderr.push(s.stderr);
    }
    (mean, stderr)
}

/// Everything measured on one realization of one sweep point.
#[derive(Debug, Clone)]
struct Realization {
    w0: Option<Vec<f64>>,
    entropy: Option<Vec<f64>>,
    fidelity: Vec<Vec<f64>>,
    fidelity_delta2: Vec<f64>,
    sf: Option<StrengthFunctionProfile>,
    gap_ratio: Option<f64>,
    spacing_histogram: Option<Vec<f64>>,
    spacing_degenerate: bool,
    delta_e2: f64,
    gamma0: Option<f64>,
    n_f: usize,
    k0: usize,
    s_max: f64,
}

/// Hamiltonian pieces of one realization: `H = H0 + V` and the diagonal used
/// to pick the initial state.
pub struct Instance {
    pub h: SymmetricHamiltonian,
    /// The coupling part alone, which fixes the sparsity pattern of Σ.
    pub v: SymmetricHamiltonian,
    pub reference_diagonal: Vec<f64>,
    pub n_f: usize,
}

/// Builds realization `seed` of a model.
pub fn build_instance(model: &ModelConfig, seed: u64) -> Result<Instance> {
    match *model {
        ModelConfig::Tbri(mut p) => {
            p.seed = seed;
            let basis = FermionBasis::new(p.orbitals, p.particles)?;
            let h = build_tbri(&basis, &p)?;
            let eps = single_particle_energies(p.orbitals, p.d0);
            let reference_diagonal: Vec<f64> = (0..basis.dimension())
                .map(|i| basis.occupied(i).iter().map(|&s| eps[s]).sum())
                .collect();
            let mut v = h.clone();
            v.diagonal_mut().iter_mut().for_each(|d| *d = 0.0);
            let n_f = if basis.dimension() > 0 {
                directly_coupled(&basis, 0, CouplingKind::TwoBody)?.len()
            } else {
                0
            };
            Ok(Instance {
                h,
                v,
                reference_diagonal,
                n_f,
            })
        }
        ModelConfig::SpinChain(mut p) => {
            p.seed = seed;
            let basis = SpinBasis::new(p.qubits)?;
            let (h0, v) = build_spin_chain(&basis, &p)?;
            let h = h0.sum(&v)?;
            Ok(Instance {
                reference_diagonal: h0.diagonal().to_vec(),
                h,
                v,
                n_f: p.qubits,
            })
        }
    }
}

fn pick_k0(policy: K0Policy, reference: &[f64]) -> Result<usize> {
    match policy {
        K0Policy::Index(i) if i < reference.len() => Ok(i),
        K0Policy::Index(i) => Err(Error::IndexOutOfRange {
            index: i,
            dimension: reference.len(),
        }),
        K0Policy::SpectrumCenter => Ok(center_state(reference)),
    }
}

/// Strength-function window shared by all realizations of a sweep point.
fn sf_window(model: &ModelConfig, centre: f64) -> (f64, f64) {
    let de = model.expected_delta_e2().sqrt().max(1e-12);
    (centre - 6.0 * de, centre + 6.0 * de)
}

fn run_realization(
    cfg: &ExperimentConfig,
    point: &SweepPoint,
    index: usize,
    axis: &[f64],
) -> Result<Realization> {
    let seed = realization_seed(cfg.seed, index as u64);
    let inst = build_instance(&point.model, seed)?;
    let k0 = pick_k0(cfg.k0, &inst.reference_diagonal)?;
    let dec = diagonalize(&inst.h)?;
    let n = inst.h.dimension();
    let s_max = (n as f64).ln();
    let want = |o: Output| cfg.outputs.contains(&o);
    let overlay = want(Output::TheoryOverlay);
    let time_axis = cfg.time_axis == TimeAxis::Time;

    let mut entropy = None;
    let mut w0 = None;
    if time_axis && want(Output::Entropy) {
        let traj = evolve_packet(&dec, k0, axis)?;
        let trace = EntropyTrace::from_trajectory(&traj)?;
        entropy = Some(trace.entropy);
        w0 = Some(traj.w0);
    } else if time_axis && (want(Output::W0) || overlay) {
        w0 = Some(return_probability(&dec, k0, axis)?);
    }

    let mut fidelity = Vec::new();
    let mut fidelity_delta2 = Vec::new();
    if want(Output::Fidelity) {
        let mut psi0 = vec![0.0; n];
        psi0[k0] = 1.0;
        for &eps in &cfg.epsilons {
            // one Σ pattern per realization, scaled by ε
            let sigma = add_perturbation(&inst.v, eps, seed)?;
            let perturbed = diagonalize(&inst.h.sum(&sigma)?)?;
            let times: Vec<f64> = match cfg.time_axis {
                TimeAxis::Time => axis.to_vec(),
                TimeAxis::EpsilonTime => axis.iter().map(|x| x / eps).collect(),
            };
            fidelity.push(overlap_fidelity(&dec, &perturbed, &psi0, &times)?);
            fidelity_delta2.push(delta_e_squared_direct(&sigma, k0)?);
        }
    }

    let mut sf = None;
    if want(Output::Sf) {
        let (lo, hi) = sf_window(&point.model, inst.reference_diagonal[k0]);
        sf = Some(strength_function_in(&dec, k0, cfg.sf_bins, lo, hi)?);
    }

    let (mut gap_ratio, mut spacing_histogram, mut spacing_degenerate) = (None, None, false);
    if want(Output::Spacing) {
        let stats = level_spacing_with(dec.energies(), &SpacingOptions::default())?;
        gap_ratio = Some(stats.mean_gap_ratio);
        spacing_histogram = Some(stats.histogram);
        spacing_degenerate = stats.degenerate;
    }

    let gamma0 = if overlay && inst.h.column(k0).len() >= 2 {
        theory::gamma_golden_rule(&inst.h, k0).ok()
    } else {
        None
    };

    Ok(Realization {
        w0,
        entropy,
        fidelity,
        fidelity_delta2,
        sf,
        gap_ratio,
        spacing_histogram,
        spacing_degenerate,
        delta_e2: delta_e_squared_direct(&inst.h, k0)?,
        gamma0,
        n_f: inst.n_f,
        k0,
        s_max,
    })
}

/// Index range of the linear-growth window of a mean entropy trace: from the
/// first sample with `t ≥ t_start` up to (excluding) the first sample where
/// `S` reaches `level·S_plateau`, with `S_plateau` the mean over the last
/// quarter of the trace.
pub fn presaturation_window(
    times: &[f64],
    entropy: &[f64],
    t_start: f64,
    level: f64,
) -> Option<std::ops::Range<usize>> {
    let n = entropy.len();
    if n < 4 || times.len() != n {
        return None;
    }
    let tail = &entropy[n - n / 4..];
    let plateau = tail.iter().sum::<f64>() / tail.len() as f64;
    let start = times.iter().position(|&t| t >= t_start)?;
    let stop = start + entropy[start..].iter().position(|&s| s >= level * plateau)?;
    (stop > start + 1).then_some(start..stop)
}

/// `Γ = mean of −ln W0(t)/t` over the given window (samples with `t > 0`).
pub fn decay_rate_on_window(times: &[f64], w0: &[f64], window: std::ops::Range<usize>) -> f64 {
    let vals: Vec<f64> = window
        .filter(|&i| times[i] > 0.0 && w0[i] > 0.0)
        .map(|i| -w0[i].ln() / times[i])
        .collect();
    vals.iter().sum::<f64>() / vals.len() as f64
}

/// Least-squares slope of `y` against `x`.
pub fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn fmt_eps(e: f64) -> String {
    if e.fract() == 0.0 {
        format!("{}", e as i64)
    } else {
        format!("{e}")
    }
}

/// Runs every sweep point of `cfg` over `cfg.realizations` disorder
/// realizations on the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<EnsembleResult> {
    run_experiment_named(cfg, None)
}

/// As [`run_experiment`], recording a preset name in the metadata.
pub fn run_experiment_named(cfg: &ExperimentConfig, preset: Option<&str>) -> Result<EnsembleResult> {
    cfg.validate()?;
    let axis = cfg.axis();
    let points = cfg.sweep.points(&cfg.model)?;
    let want = |o: Output| cfg.outputs.contains(&o);
    let time_axis = cfg.time_axis == TimeAxis::Time;

    let mut series = Vec::new();
    let mut tables = Vec::new();
    let mut scalars = BTreeMap::new();
    let mut minima_rows = Vec::new();
    let mut sf_rows: Vec<Vec<f64>> = Vec::new();
    let mut sf_columns = Vec::new();
    let mut spacing_rows: Vec<Vec<f64>> = Vec::new();
    let mut spacing_columns = vec!["s".to_string()];

    for point in &points {
        let runs: Vec<Realization> = (0..cfg.realizations)
            .into_par_iter()
            .map(|r| {
                run_realization(cfg, point, r, &axis).map_err(|e| Error::Realization {
                    index: r,
                    source: Box::new(e),
                })
            })
            .collect::<Result<_>>()?;
        let label = &point.label;
        let scalar = |name: &str, xs: Vec<f64>, out: &mut BTreeMap<String, Scalar>| {
            out.insert(format!("{label}.{name}"), mean_stderr(&xs));
        };
        let delta_e2 = mean_stderr(&runs.iter().map(|r| r.delta_e2).collect::<Vec<_>>());
        scalars.insert(format!("{label}.delta_e2"), delta_e2);
        scalar("k0", runs.iter().map(|r| r.k0 as f64).collect(), &mut scalars);
        scalar("n_f", runs.iter().map(|r| r.n_f as f64).collect(), &mut scalars);

        let mut w0_mean = None;
        if let Some(first) = runs[0].w0.as_ref() {
            let traces: Vec<&[f64]> = runs.iter().map(|r| r.w0.as_deref().unwrap()).collect();
            let (mean, err) = reduce_traces(&traces);
            debug_assert_eq!(first.len(), mean.len());
            if want(Output::W0) || want(Output::TheoryOverlay) {
                series.push(Series {
                    name: format!("{label}.w0"),
                    mean: mean.clone(),
                    stderr: Some(err),
                });
            }
            w0_mean = Some(mean);
        }

        let mut entropy_mean = None;
        if want(Output::Entropy) && time_axis {
            let s_max = runs[0].s_max;
            let traces: Vec<&[f64]> = runs.iter().map(|r| r.entropy.as_deref().unwrap()).collect();
            let (mean, err) = reduce_traces(&traces);
            let norm = |v: &[f64]| v.iter().map(|x| x / s_max).collect::<Vec<_>>();
            series.push(Series {
                name: format!("{label}.S"),
                mean: mean.clone(),
                stderr: Some(err.clone()),
            });
            series.push(Series {
                name: format!("{label}.S_norm"),
                mean: norm(&mean),
                stderr: Some(norm(&err)),
            });
            let report = first_minimum(
                &EntropyTrace {
                    times: axis.clone(),
                    entropy: mean.clone(),
                    s_max,
                },
                cfg.smoothing_window,
            );
            let tail = &mean[mean.len() - mean.len() / 4..];
            let plateau = tail.iter().sum::<f64>() / tail.len() as f64 / s_max;
            scalars.insert(format!("{label}.plateau_norm"), Scalar { mean: plateau, stderr: 0.0 });
            minima_rows.push(
                sweep_coordinates(cfg, point)
                    .into_iter()
                    .chain([
                        if report.found { 1.0 } else { 0.0 },
                        report.t_min,
                        report.s_min,
                        report.ratio,
                        plateau,
                    ])
                    .collect(),
            );
            entropy_mean = Some(mean);
        }

        if want(Output::Fidelity) {
            for (e_idx, &eps) in cfg.epsilons.iter().enumerate() {
                let traces: Vec<&[f64]> = runs.iter().map(|r| r.fidelity[e_idx].as_slice()).collect();
                let (mean, err) = reduce_traces(&traces);
                let tag = fmt_eps(eps);
                series.push(Series {
                    name: format!("{label}.F_eps={tag}"),
                    mean,
                    stderr: Some(err),
                });
                let d2 = mean_stderr(&runs.iter().map(|r| r.fidelity_delta2[e_idx]).collect::<Vec<_>>());
                scalars.insert(format!("{label}.sigma_delta_e2_eps={tag}"), d2);
                if want(Output::TheoryOverlay) {
                    let pert: Vec<f64> = axis
                        .iter()
                        .map(|&x| {
                            let t = if time_axis { x } else { x / eps };
                            (1.0 - d2.mean * t * t).max(0.0)
                        })
                        .collect();
                    series.push(Series {
                        name: format!("{label}.F_eps={tag}_perturbative"),
                        mean: pert,
                        stderr: None,
                    });
                }
            }
        }

        if want(Output::Sf) {
            let profiles: Vec<&StrengthFunctionProfile> = runs.iter().map(|r| r.sf.as_ref().unwrap()).collect();
            let heights: Vec<&[f64]> = profiles.iter().map(|p| p.heights.as_slice()).collect();
            let (mean, err) = reduce_traces(&heights);
            let mut avg = profiles[0].clone();
            avg.heights = mean.clone();
            let r = profiles.len() as f64;
            avg.centroid = profiles.iter().map(|p| p.centroid).sum::<f64>() / r;
            avg.variance = profiles.iter().map(|p| p.variance).sum::<f64>() / r;
            avg.captured = profiles.iter().map(|p| p.captured).sum::<f64>() / r;
            if sf_rows.is_empty() {
                sf_rows = vec![Vec::new(); mean.len()];
            }
            // each point has its own energy window, so it carries its own E column
            sf_columns.push(format!("{label}.E"));
            sf_columns.push(format!("{label}.P"));
            sf_columns.push(format!("{label}.P_stderr"));
            let centers = avg.bin_centers();
            for (i, row) in sf_rows.iter_mut().enumerate() {
                row.push(centers[i]);
                row.push(mean[i]);
                row.push(err[i]);
            }
            scalar("sf_centroid", profiles.iter().map(|p| p.centroid).collect(), &mut scalars);
            scalar("sf_variance", profiles.iter().map(|p| p.variance).collect(), &mut scalars);
            if want(Output::TheoryOverlay) {
                match theory::fit_strength_function(&avg) {
                    Ok(fit) => {
                        for (name, v) in [
                            ("fit_B", fit.b),
                            ("fit_gamma", fit.gamma),
                            ("fit_sigma", fit.sigma),
                            ("fit_residual", fit.residual),
                        ] {
                            scalars.insert(format!("{label}.{name}"), Scalar { mean: v, stderr: 0.0 });
                        }
                        sf_columns.push(format!("{label}.P_fit"));
                        for (row, c) in sf_rows.iter_mut().zip(&centers) {
                            row.push(fit.density(*c));
                        }
                    }
                    Err(e) => log::warn!("{label}: {e}"),
                }
            }
        }

        if want(Output::Spacing) {
            scalar(
                "gap_ratio",
                runs.iter().map(|r| r.gap_ratio.unwrap()).collect(),
                &mut scalars,
            );
            scalar(
                "spacing_degenerate",
                runs.iter().map(|r| f64::from(u8::from(r.spacing_degenerate))).collect(),
                &mut scalars,
            );
            let hists: Vec<&[f64]> = runs.iter().map(|r| r.spacing_histogram.as_deref().unwrap()).collect();
            let (mean, _) = reduce_traces(&hists);
            let opts = SpacingOptions::default();
            if spacing_rows.is_empty() {
                let w = opts.max_spacing / opts.bins as f64;
                spacing_rows = (0..opts.bins).map(|i| vec![(i as f64 + 0.5) * w]).collect();
            }
            spacing_columns.push(format!("{label}.P"));
            for (row, v) in spacing_rows.iter_mut().zip(mean) {
                row.push(v);
            }
        }

        if want(Output::TheoryOverlay) && time_axis {
            let d2 = delta_e2.mean;
            let gauss = axis.iter().map(|t| (-d2 * t * t).exp()).collect();
            series.push(Series {
                name: format!("{label}.w0_gaussian"),
                mean: gauss,
                stderr: None,
            });
            let g0s: Vec<f64> = runs.iter().filter_map(|r| r.gamma0).collect();
            if g0s.len() == runs.len() {
                let g0 = mean_stderr(&g0s);
                scalars.insert(format!("{label}.gamma0"), g0);
                let inputs = theory::DecayInputs {
                    delta_e2: d2,
                    gamma0: g0.mean,
                    gamma: g0.mean,
                };
                series.push(Series {
                    name: format!("{label}.w0_lorentzian"),
                    mean: axis
                        .iter()
                        .map(|&t| theory::w0_predicted(theory::DecayRegime::LorentzianExponential, &inputs, t))
                        .collect(),
                    stderr: None,
                });
            }
            if let (Some(s), Some(w0)) = (&entropy_mean, &w0_mean) {
                let t_c = 1.0 / d2.sqrt();
                if let Some(win) = presaturation_window(&axis, s, t_c, SATURATION_ONSET) {
                    let gamma = decay_rate_on_window(&axis, w0, win.clone());
                    let n_f = runs[0].n_f;
                    scalars.insert(format!("{label}.gamma_w0"), Scalar { mean: gamma, stderr: 0.0 });
                    let slope = linear_slope(&axis[win.clone()], &s[win.clone()]);
                    scalars.insert(format!("{label}.entropy_slope"), Scalar { mean: slope, stderr: 0.0 });
                    scalars.insert(
                        format!("{label}.window_t0"),
                        Scalar { mean: axis[win.start], stderr: 0.0 },
                    );
                    scalars.insert(
                        format!("{label}.window_t1"),
                        Scalar { mean: axis[win.end - 1], stderr: 0.0 },
                    );
                    series.push(Series {
                        name: format!("{label}.S_theory"),
                        mean: axis
                            .iter()
                            .map(|&t| theory::entropy_predicted(gamma, t, n_f, EntropyVariant::Linear))
                            .collect(),
                        stderr: None,
                    });
                }
            }
        }
    }

    if !minima_rows.is_empty() {
        let mut columns = sweep_axis_names(cfg);
        columns.extend(["found", "t_min", "s_min", "ratio", "plateau_norm"].map(String::from));
        tables.push(Table {
            name: "first_minimum".into(),
            columns,
            rows: minima_rows,
        });
    }
    if want(Output::Sf) {
        tables.push(Table {
            name: "sf".into(),
            columns: sf_columns,
            rows: sf_rows,
        });
    }
    if want(Output::Spacing) {
        tables.push(Table {
            name: "spacing".into(),
            columns: spacing_columns,
            rows: spacing_rows,
        });
    }

    Ok(EnsembleResult {
        axis_name: match cfg.time_axis {
            TimeAxis::Time => "t".into(),
            TimeAxis::EpsilonTime => "eps_t".into(),
        },
        axis,
        series,
        tables,
        scalars,
        metadata: Metadata {
            config: cfg.clone(),
            preset: preset.map(String::from),
            version: env!("CARGO_PKG_VERSION").into(),
        },
    })
}

/// Fraction of the entropy plateau taken as the onset of saturation.
pub const SATURATION_ONSET: f64 = 0.7;

fn sweep_axis_names(cfg: &ExperimentConfig) -> Vec<String> {
    let mut names = Vec::new();
    if !cfg.sweep.j.is_empty() {
        names.push("J".to_string());
    }
    if !cfg.sweep.sigma_p.is_empty() {
        names.push("sigma_p".to_string());
    }
    if !cfg.sweep.v0.is_empty() {
        names.push("V0".to_string());
    }
    names
}

fn sweep_coordinates(cfg: &ExperimentConfig, point: &SweepPoint) -> Vec<f64> {
    let mut out = Vec::new();
    match point.model {
        ModelConfig::SpinChain(p) => {
            if !cfg.sweep.j.is_empty() {
                out.push(p.j);
            }
            if !cfg.sweep.sigma_p.is_empty() {
                out.push(p.sigma_p);
            }
        }
        ModelConfig::Tbri(p) => {
            if !cfg.sweep.v0.is_empty() {
                out.push(p.v0);
            }
        }
    }
    out
}
