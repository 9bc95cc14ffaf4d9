use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{delta_e_squared_tbri, SpinChainParams, TbriParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelConfig {
    Tbri(TbriParams),
    SpinChain(SpinChainParams),
}

impl ModelConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::Tbri(_) => "tbri",
            ModelConfig::SpinChain(_) => "spin-chain",
        }
    }

    /// Ensemble-expected `Δ_E²` of a basis state.
    ///
    /// For the spin chain every state has `L` couplings with mean square
    /// `(Ω0² + σ_p²)/4`.
    pub fn expected_delta_e2(&self) -> f64 {
        match self {
            ModelConfig::Tbri(p) => delta_e_squared_tbri(p.v0, p.particles, p.orbitals),
            ModelConfig::SpinChain(p) => {
                p.qubits as f64 * 0.25 * (p.rabi * p.rabi + p.sigma_p * p.sigma_p)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelConfig::Tbri(p) => p.validate(),
            ModelConfig::SpinChain(p) => p.validate(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum K0Policy {
    Index(usize),
    SpectrumCenter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeSpan {
    Absolute(f64),
    /// Multiple of `1/Δ_E`, using the ensemble-expected width of the base model.
    WidthUnits(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeAxis {
    Time,
    /// Column 1 is `ε t`; each fidelity trace is sampled at `t = x/ε`.
    EpsilonTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Output {
    Entropy,
    Fidelity,
    W0,
    Sf,
    Spacing,
    TheoryOverlay,
}

impl Output {
    pub const ALL: [Output; 6] = [
        Output::Entropy,
        Output::Fidelity,
        Output::W0,
        Output::Sf,
        Output::Spacing,
        Output::TheoryOverlay,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Output::Entropy => "entropy",
            Output::Fidelity => "fidelity",
            Output::W0 => "w0",
            Output::Sf => "sf",
            Output::Spacing => "spacing",
            Output::TheoryOverlay => "theory-overlay",
        }
    }
}

impl FromStr for Output {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Output::ALL
            .into_iter()
            .find(|o| o.key() == s)
            .ok_or_else(|| Error::Config(format!("unknown output `{s}`")))
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Parameter axes swept as a Cartesian product; empty axes keep the base value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub j: Vec<f64>,
    pub sigma_p: Vec<f64>,
    pub v0: Vec<f64>,
}

/// One concrete parameter set of a sweep, with a label used in column names.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub label: String,
    pub model: ModelConfig,
}

fn fmt_value(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

impl Sweep {
    pub fn is_empty(&self) -> bool {
        self.j.is_empty() && self.sigma_p.is_empty() && self.v0.is_empty()
    }

    /// Expands the sweep over `base`. Labels look like `J=10_sigma_p=5`.
    pub fn points(&self, base: &ModelConfig) -> Result<Vec<SweepPoint>> {
        let is_spin = matches!(base, ModelConfig::SpinChain(_));
        if is_spin && !self.v0.is_empty() {
            return Err(Error::Config("sweep over v0 needs the tbri model".into()));
        }
        if !is_spin && (!self.j.is_empty() || !self.sigma_p.is_empty()) {
            return Err(Error::Config(
                "sweeps over j and sigma_p need the spin-chain model".into(),
            ));
        }
        let axis = |v: &[f64]| -> Vec<Option<f64>> {
            if v.is_empty() {
                vec![None]
            } else {
                v.iter().copied().map(Some).collect()
            }
        };
        let mut out = Vec::new();
        for j in axis(&self.j) {
            for sp in axis(&self.sigma_p) {
                for v0 in axis(&self.v0) {
                    let mut model = *base;
                    let mut parts = Vec::new();
                    match &mut model {
                        ModelConfig::SpinChain(p) => {
                            if let Some(j) = j {
                                p.j = j;
                                parts.push(format!("J={}", fmt_value(j)));
                            }
                            if let Some(sp) = sp {
                                p.sigma_p = sp;
                                parts.push(format!("sigma_p={}", fmt_value(sp)));
                            }
                        }
                        ModelConfig::Tbri(p) => {
                            if let Some(v0) = v0 {
                                p.v0 = v0;
                                parts.push(format!("V0={}", fmt_value(v0)));
                            }
                        }
                    }
                    model.validate()?;
                    let label = if parts.is_empty() {
                        "base".to_string()
                    } else {
                        parts.join("_")
                    };
                    out.push(SweepPoint { label, model });
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub k0: K0Policy,
    pub t_max: TimeSpan,
    pub steps: usize,
    pub realizations: usize,
    pub seed: u64,
    pub outputs: BTreeSet<Output>,
    pub epsilons: Vec<f64>,
    pub sweep: Sweep,
    pub time_axis: TimeAxis,
    pub sf_bins: usize,
    pub smoothing_window: usize,
}

pub const DEFAULT_REALIZATIONS: usize = 20;

impl ExperimentConfig {
    pub fn new(model: ModelConfig) -> Self {
        Self {
            model,
            k0: K0Policy::SpectrumCenter,
            t_max: TimeSpan::WidthUnits(20.0),
            steps: 400,
            realizations: DEFAULT_REALIZATIONS,
            seed: 1,
            outputs: [Output::Entropy, Output::W0].into_iter().collect(),
            epsilons: Vec::new(),
            sweep: Sweep::default(),
            time_axis: TimeAxis::Time,
            sf_bins: 40,
            smoothing_window: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.realizations < 1 {
            return Err(Error::Config("realizations must be at least 1".into()));
        }
        if self.steps < 2 {
            return Err(Error::Config("steps must be at least 2".into()));
        }
        let t = match self.t_max {
            TimeSpan::Absolute(t) | TimeSpan::WidthUnits(t) => t,
        };
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Config(format!("t_max must be positive, got {t}")));
        }
        if self.outputs.contains(&Output::Fidelity) && self.epsilons.is_empty() {
            return Err(Error::Config("fidelity output needs a non-empty epsilon list".into()));
        }
        if self.epsilons.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::Config("epsilons must be finite and non-negative".into()));
        }
        if self.time_axis == TimeAxis::EpsilonTime {
            if self.epsilons.iter().any(|&e| e == 0.0) {
                return Err(Error::Config("the ε·t axis needs non-zero epsilons".into()));
            }
            if self.outputs.iter().any(|o| !matches!(o, Output::Fidelity)) {
                return Err(Error::Config(
                    "the ε·t axis supports only the fidelity output".into(),
                ));
            }
        }
        if self.sf_bins < 1 {
            return Err(Error::Config("sf_bins must be at least 1".into()));
        }
        self.sweep.points(&self.model)?;
        Ok(())
    }

    /// Absolute end of the time grid (or of the `ε t` grid).
    pub fn t_end(&self) -> f64 {
        match self.t_max {
            TimeSpan::Absolute(t) => t,
            TimeSpan::WidthUnits(c) => {
                let d2 = self.model.expected_delta_e2();
                if d2 > 0.0 {
                    c / d2.sqrt()
                } else {
                    c
                }
            }
        }
    }

    /// Linear grid from 0 to `t_end` with `steps` samples.
    pub fn axis(&self) -> Vec<f64> {
        let end = self.t_end();
        let n = self.steps;
        (0..n).map(|i| end * i as f64 / (n - 1) as f64).collect()
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        file.into_config()
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// Renders the configuration in the same format `from_toml_str` reads.
    pub fn to_toml_string(&self) -> String {
        ConfigFile::from_config(self).render()
    }
}

/// On-disk layout: top-level run keys plus a `[model]` section.
#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    k0: Option<K0Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_unit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    realizations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    outputs: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilons: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    time_axis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sf_bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    smoothing_window: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep_j: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep_sigma_p: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep_v0: Option<Vec<f64>>,
    #[serde(default)]
    model: ModelSection,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
enum K0Value {
    Index(usize),
    Named(String),
}

#[derive(Debug, Default, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    orbitals: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    particles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    qubits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    j: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rabi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
}

impl ConfigFile {
    fn into_config(self) -> Result<ExperimentConfig> {
        let s = &self.model;
        let kind = s.kind.as_deref().unwrap_or("spin-chain");
        let model = match kind {
            "tbri" => {
                let orbitals = s
                    .orbitals
                    .ok_or_else(|| Error::Config("tbri needs model.orbitals".into()))?;
                let particles = s
                    .particles
                    .ok_or_else(|| Error::Config("tbri needs model.particles".into()))?;
                for (name, set) in [
                    ("qubits", s.qubits.is_some()),
                    ("a", s.a.is_some()),
                    ("omega0", s.omega0.is_some()),
                    ("nu", s.nu.is_some()),
                    ("j", s.j.is_some()),
                    ("rabi", s.rabi.is_some()),
                    ("sigma_p", s.sigma_p.is_some()),
                ] {
                    if set {
                        return Err(Error::Config(format!("model.{name} is not a tbri parameter")));
                    }
                }
                let mut p = TbriParams::new(orbitals, particles, s.v0.unwrap_or(0.0), 0);
                if let Some(d0) = s.d0 {
                    p.d0 = d0;
                }
                ModelConfig::Tbri(p)
            }
            "spin-chain" => {
                for (name, set) in [
                    ("orbitals", s.orbitals.is_some()),
                    ("particles", s.particles.is_some()),
                    ("d0", s.d0.is_some()),
                    ("v0", s.v0.is_some()),
                ] {
                    if set {
                        return Err(Error::Config(format!(
                            "model.{name} is not a spin-chain parameter"
                        )));
                    }
                }
                let mut p = SpinChainParams::new(s.qubits.unwrap_or(8));
                if let Some(v) = s.a {
                    p.a = v;
                }
                if let Some(v) = s.omega0 {
                    p.omega0 = v;
                }
                // detuning reference defaults to the base Larmor frequency
                p.nu = s.nu.unwrap_or(p.omega0);
                if let Some(v) = s.j {
                    p.j = v;
                }
                if let Some(v) = s.rabi {
                    p.rabi = v;
                }
                if let Some(v) = s.sigma_p {
                    p.sigma_p = v;
                }
                if let Some(v) = s.epsilon {
                    p.epsilon = v;
                }
                ModelConfig::SpinChain(p)
            }
            other => return Err(Error::Config(format!("unknown model `{other}`"))),
        };

        let mut cfg = ExperimentConfig::new(model);
        if let Some(k0) = self.k0 {
            cfg.k0 = match k0 {
                K0Value::Index(i) => K0Policy::Index(i),
                K0Value::Named(n) if n == "center" => K0Policy::SpectrumCenter,
                K0Value::Named(n) => {
                    return Err(Error::Config(format!(
                        "k0 must be an index or \"center\", got `{n}`"
                    )))
                }
            };
        }
        if let Some(t) = self.t_max {
            cfg.t_max = match self.t_unit.as_deref().unwrap_or("absolute") {
                "absolute" => TimeSpan::Absolute(t),
                "width" => TimeSpan::WidthUnits(t),
                u => return Err(Error::Config(format!("unknown t_unit `{u}`"))),
            };
        } else if self.t_unit.is_some() {
            return Err(Error::Config("t_unit given without t_max".into()));
        }
        if let Some(v) = self.steps {
            cfg.steps = v;
        }
        if let Some(v) = self.realizations {
            cfg.realizations = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(list) = self.outputs {
            cfg.outputs = list
                .iter()
                .map(|s| s.parse())
                .collect::<Result<BTreeSet<_>>>()?;
        }
        if let Some(v) = self.epsilons {
            cfg.epsilons = v;
        }
        if let Some(axis) = self.time_axis {
            cfg.time_axis = match axis.as_str() {
                "t" => TimeAxis::Time,
                "eps_t" => TimeAxis::EpsilonTime,
                other => return Err(Error::Config(format!("unknown time_axis `{other}`"))),
            };
        }
        if let Some(v) = self.sf_bins {
            cfg.sf_bins = v;
        }
        if let Some(v) = self.smoothing_window {
            cfg.smoothing_window = v;
        }
        cfg.sweep = Sweep {
            j: self.sweep_j.unwrap_or_default(),
            sigma_p: self.sweep_sigma_p.unwrap_or_default(),
            v0: self.sweep_v0.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn from_config(cfg: &ExperimentConfig) -> Self {
        let mut section = ModelSection {
            kind: Some(cfg.model.name().into()),
            ..ModelSection::default()
        };
        match cfg.model {
            ModelConfig::Tbri(p) => {
                section.orbitals = Some(p.orbitals);
                section.particles = Some(p.particles);
                section.d0 = Some(p.d0);
                section.v0 = Some(p.v0);
            }
            ModelConfig::SpinChain(p) => {
                section.qubits = Some(p.qubits);
                section.a = Some(p.a);
                section.omega0 = Some(p.omega0);
                section.nu = Some(p.nu);
                section.j = Some(p.j);
                section.rabi = Some(p.rabi);
                section.sigma_p = Some(p.sigma_p);
                section.epsilon = Some(p.epsilon);
            }
        }
        let (t_max, t_unit) = match cfg.t_max {
            TimeSpan::Absolute(t) => (t, "absolute"),
            TimeSpan::WidthUnits(t) => (t, "width"),
        };
        let nonempty = |v: &Vec<f64>| (!v.is_empty()).then(|| v.clone());
        ConfigFile {
            k0: Some(match cfg.k0 {
                K0Policy::Index(i) => K0Value::Index(i),
                K0Policy::SpectrumCenter => K0Value::Named("center".into()),
            }),
            t_max: Some(t_max),
            t_unit: Some(t_unit.into()),
            steps: Some(cfg.steps),
            realizations: Some(cfg.realizations),
            seed: Some(cfg.seed),
            outputs: Some(cfg.outputs.iter().map(|o| o.key().to_string()).collect()),
            epsilons: Some(cfg.epsilons.clone()),
            time_axis: Some(
                match cfg.time_axis {
                    TimeAxis::Time => "t",
                    TimeAxis::EpsilonTime => "eps_t",
                }
                .into(),
            ),
            sf_bins: Some(cfg.sf_bins),
            smoothing_window: Some(cfg.smoothing_window),
            sweep_j: nonempty(&cfg.sweep.j),
            sweep_sigma_p: nonempty(&cfg.sweep.sigma_p),
            sweep_v0: nonempty(&cfg.sweep.v0),
            model: section,
        }
    }

    fn render(&self) -> String {
        toml::to_string(self).expect("config renders")
    }
}
