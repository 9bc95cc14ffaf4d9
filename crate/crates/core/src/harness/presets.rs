use super::config::{ExperimentConfig, ModelConfig, Output, Sweep, TimeAxis, TimeSpan};
use crate::error::{Error, Result};
use crate::hamiltonian::{SpinChainParams, TbriParams};

/// Names accepted by [`preset`], in listing order.
pub const PRESETS: [(&str, &str); 7] = [
    ("fig1", "normalized entropy, L=8, a=1, Ω0=100, J ∈ {0,10,100} × σ_p ∈ {5,10,20}"),
    ("fig2", "first-minimum depth S_min/S_max versus J for σ_p ∈ {5,20}"),
    ("fig3", "short-time entropy growth, J=100, σ_p ∈ {0,15,50}, with linear-growth overlay"),
    ("fig4", "fidelity, J ∈ {0,100} × σ_p ∈ {0,15,50}, ε ∈ {5,10,20}"),
    ("fig5", "fidelity versus ε·t, σ_p=0, J ∈ {0,100}, ε ∈ {3,5,7}"),
    ("tbri-sf", "TBRI strength function and Gaussian decay, M=12, Np=6, V0=0.4"),
    ("tbri-fidelity", "TBRI golden-rule decay, M=20, Np=3, V0=0.04"),
];

/// Spin chain with `L = 8`, `a = 1`, `Ω0 = 100` and `ν = ω0 = 0`.
fn chain() -> SpinChainParams {
    let mut p = SpinChainParams::new(8);
    p.a = 1.0;
    p.rabi = 100.0;
    p
}

fn outputs(list: &[Output]) -> std::collections::BTreeSet<Output> {
    list.iter().copied().collect()
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let cfg = match name {
        "fig1" => {
            let mut c = ExperimentConfig::new(ModelConfig::SpinChain(chain()));
            c.sweep = Sweep {
                j: vec![0.0, 10.0, 100.0],
                sigma_p: vec![5.0, 10.0, 20.0],
                ..Sweep::default()
            };
            c.outputs = outputs(&[Output::Entropy]);
            c
        }
        "fig2" => {
            let mut c = ExperimentConfig::new(ModelConfig::SpinChain(chain()));
            c.sweep = Sweep {
                j: vec![0.0, 5.0, 10.0, 15.0, 20.0, 30.0, 50.0, 70.0, 100.0, 150.0, 200.0],
                sigma_p: vec![5.0, 20.0],
                ..Sweep::default()
            };
            c.outputs = outputs(&[Output::Entropy]);
            c
        }
        "fig3" => {
            let mut p = chain();
            p.j = 100.0;
            let mut c = ExperimentConfig::new(ModelConfig::SpinChain(p));
            c.sweep = Sweep {
                sigma_p: vec![0.0, 15.0, 50.0],
                ..Sweep::default()
            };
            c.t_max = TimeSpan::WidthUnits(4.0);
            c.steps = 400;
            c.outputs = outputs(&[Output::Entropy, Output::W0, Output::TheoryOverlay]);
            c
        }
        "fig4" => {
            let mut c = ExperimentConfig::new(ModelConfig::SpinChain(chain()));
            c.sweep = Sweep {
                j: vec![0.0, 100.0],
                sigma_p: vec![0.0, 15.0, 50.0],
                ..Sweep::default()
            };
            c.epsilons = vec![5.0, 10.0, 20.0];
            c.t_max = TimeSpan::Absolute(1.0);
            c.outputs = outputs(&[Output::Fidelity]);
            c
        }
        "fig5" => {
            let mut c = ExperimentConfig::new(ModelConfig::SpinChain(chain()));
            c.sweep = Sweep {
                j: vec![0.0, 100.0],
                sigma_p: vec![0.0],
                ..Sweep::default()
            };
            c.epsilons = vec![3.0, 5.0, 7.0];
            c.time_axis = TimeAxis::EpsilonTime;
            c.t_max = TimeSpan::Absolute(6.0);
            c.outputs = outputs(&[Output::Fidelity]);
            c
        }
        "tbri-sf" => {
            let mut c = ExperimentConfig::new(ModelConfig::Tbri(TbriParams::new(12, 6, 0.4, 0)));
            c.realizations = 10;
            c.t_max = TimeSpan::WidthUnits(2.0);
            c.steps = 200;
            c.outputs = outputs(&[Output::Sf, Output::W0, Output::TheoryOverlay]);
            c
        }
        "tbri-fidelity" => {
            let mut c = ExperimentConfig::new(ModelConfig::Tbri(TbriParams::new(20, 3, 0.04, 0)));
            c.realizations = 10;
            c.t_max = TimeSpan::WidthUnits(15.0);
            c.steps = 400;
            c.outputs = outputs(&[Output::W0, Output::TheoryOverlay]);
            c
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset `{other}`; known: {}",
                PRESETS.map(|p| p.0).join(", ")
            )))
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn captioned_parameters() {
        assert_eq!(preset("fig5").unwrap().epsilons, vec![3.0, 5.0, 7.0]);
        assert_eq!(preset("fig4").unwrap().epsilons, vec![5.0, 10.0, 20.0]);
        let f1 = preset("fig1").unwrap();
        assert_eq!(f1.sweep.j, vec![0.0, 10.0, 100.0]);
        assert_eq!(f1.sweep.sigma_p, vec![5.0, 10.0, 20.0]);
        assert_eq!(f1.sweep.points(&f1.model).unwrap().len(), 9);
        let ModelConfig::SpinChain(p) = f1.model else { panic!() };
        assert_eq!((p.qubits, p.a, p.rabi), (8, 1.0, 100.0));
        let f3 = preset("fig3").unwrap();
        assert_eq!(f3.sweep.sigma_p, vec![0.0, 15.0, 50.0]);
        let ModelConfig::SpinChain(p) = f3.model else { panic!() };
        assert_eq!((p.j, p.a, p.rabi), (100.0, 1.0, 100.0));
        assert!(f3.outputs.contains(&Output::TheoryOverlay));
        let f5 = preset("fig5").unwrap();
        assert_eq!(f5.time_axis, TimeAxis::EpsilonTime);
        assert_eq!(f5.sweep.sigma_p, vec![0.0]);
    }

    #[test]
    fn every_listed_preset_builds() {
        for (name, _) in PRESETS {
            preset(name).unwrap();
        }
        assert!(matches!(preset("fig9"), Err(Error::Config(_))));
    }
}
