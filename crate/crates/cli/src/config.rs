use std::path::Path;

use indirect_coulomb::coulomb::ConfigDescriptor;
use indirect_coulomb::density::{ProfileDescriptor, TailModel};
use indirect_coulomb::manybody::WaveFunctionDescriptor;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::RunError;

pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, RunError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))
}

fn default_gammas() -> Vec<f64> {
    vec![1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75]
}

fn default_epsilons() -> Vec<f64> {
    vec![0.01, 0.1, 0.5, 1.0, 10.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    #[serde(default = "default_gammas")]
    pub gamma: Vec<f64>,
    #[serde(default = "default_epsilons")]
    pub epsilon: Vec<f64>,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        Self {
            gamma: default_gammas(),
            epsilon: default_epsilons(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianExampleConfig {
    #[serde(rename = "N")]
    pub n: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Gaussian width; G/L does not depend on it.
    #[serde(rename = "A", default = "one")]
    pub a: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for GaussianExampleConfig {
    fn default() -> Self {
        Self {
            n: vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
            gamma: vec![1.5, 2.0, 2.5],
            a: 1.0,
        }
    }
}

/// Shared by `verify-bound` and `scan`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConfig {
    pub specs: Vec<WaveFunctionDescriptor>,
    pub gamma: Vec<f64>,
    pub epsilon: Vec<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Default for BoundConfig {
    fn default() -> Self {
        let mut specs: Vec<WaveFunctionDescriptor> = [2, 3, 5, 10]
            .into_iter()
            .map(|n| WaveFunctionDescriptor::GaussianProduct {
                n,
                a: 1.0,
                seed: 0,
                samples: None,
            })
            .collect();
        specs.push(WaveFunctionDescriptor::ShiftedGaussianMixture {
            n: 3,
            a: 1.0,
            centers: vec![[-1.0, 0.0], [1.0, 0.0]],
            weights: None,
            seed: 0,
            samples: Some(200_000),
        });
        Self {
            specs,
            gamma: vec![1.2, 1.5, 1.8, 2.0, 2.4, 2.8],
            epsilon: vec![0.05, 0.2, 0.5, 1.0, 2.0, 10.0],
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    pub gamma: f64,
    pub epsilon: f64,
    /// Overrides of the default coefficients.
    #[serde(default)]
    pub a_tilde_sq: Option<f64>,
    #[serde(default)]
    pub b_tilde_sq: Option<f64>,
    pub corpus: Vec<ProfileDescriptor>,
    pub configs: Vec<ConfigDescriptor>,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        let mut corpus = Vec::new();
        for a in [0.25, 0.5, 1.0, 2.0, 4.0] {
            for n in [0.5, 1.0, 3.0] {
                corpus.push(ProfileDescriptor::Gaussian {
                    c: n * a / std::f64::consts::PI,
                    a,
                    center: [0.0, 0.0],
                });
            }
        }
        corpus.push(ProfileDescriptor::Exponential {
            c: 0.5,
            b: 1.5,
            center: [0.0, 0.0],
        });
        let r: Vec<f64> = (0..=60).map(|i| i as f64 * 0.05).collect();
        let rho = r.iter().map(|x: &f64| 0.4 * (1.0 - (x / 3.0).powi(2)).powi(3)).collect();
        corpus.push(ProfileDescriptor::Tabulated {
            r,
            rho,
            tail: TailModel::Zero,
            center: [0.0, 0.0],
        });
        let h = 3f64.sqrt() / 2.0 * 2.0;
        Self {
            gamma: 2.0,
            epsilon: 0.5,
            a_tilde_sq: None,
            b_tilde_sq: None,
            corpus,
            configs: vec![
                ConfigDescriptor {
                    z: 1.0,
                    positions: vec![[0.0, 0.0]],
                },
                ConfigDescriptor {
                    z: 1.0,
                    positions: vec![[-1.0, 0.0], [1.0, 0.0]],
                },
                ConfigDescriptor {
                    z: 1.0,
                    positions: vec![[-1.0, -h / 3.0], [1.0, -h / 3.0], [0.0, 2.0 * h / 3.0]],
                },
            ],
        }
    }
}
