//! TOML study configuration.
//!
//! ```toml
//! seed = 20250101
//! N = 5000
//! sample_sizes = [300, 1000]
//!
//! [study]
//! name = "paper-grid"
//!
//! [[dgms]]
//! kind = "beta"
//! alpha = 2.0
//! beta = 5.0
//!
//! [[dgms]]
//! kind = "empirical"
//! label = "smoking"
//! synthetic = { incidence = 0.263, size = 5000, seed = 263 }
//!
//! [[transforms]]
//! kind = "uniform_noise"
//! half_width = 0.1
//! ```
//!
//! Empirical pools take either `path` (relative to the config file) or
//! `synthetic`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::StudyPlan;
use crate::dgm::{
    load_empirical_pool, load_empirical_pool_column, synthesize_pool, PredictorTransformSpec,
    TrueDistributionSpec,
};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 20_250_101;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyMeta {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticPoolConfig {
    pub incidence: f64,
    pub size: usize,
    #[serde(default = "default_spread")]
    pub spread: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_spread() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DgmConfig {
    Uniform {
        a: f64,
        b: f64,
    },
    Beta {
        alpha: f64,
        beta: f64,
    },
    Constant {
        c: f64,
    },
    TwoPoint {
        v0: f64,
        v1: f64,
        w: f64,
    },
    Empirical {
        label: Option<String>,
        path: Option<PathBuf>,
        column: Option<String>,
        synthetic: Option<SyntheticPoolConfig>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TransformConfig {
    Perfect,
    AdditiveBias { delta: f64 },
    UniformNoise { half_width: f64 },
    RademacherNoise { magnitude: f64 },
}

impl From<TransformConfig> for PredictorTransformSpec {
    fn from(c: TransformConfig) -> Self {
        match c {
            TransformConfig::Perfect => Self::Perfect,
            TransformConfig::AdditiveBias { delta } => Self::AdditiveBias { delta },
            TransformConfig::UniformNoise { half_width } => Self::UniformNoise { half_width },
            TransformConfig::RademacherNoise { magnitude } => Self::RademacherNoise { magnitude },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(rename = "N")]
    pub replications: usize,
    pub sample_sizes: Vec<usize>,
    pub study: StudyMeta,
    pub dgms: Vec<DgmConfig>,
    pub transforms: Vec<TransformConfig>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Prefixes the field of a config error raised by a nested validator.
fn scoped(prefix: String, err: Error) -> Error {
    match err {
        Error::Config { field, message } => Error::Config {
            field: format!("{prefix}.{field}"),
            message,
        },
        other => Error::Config {
            field: prefix,
            message: other.to_string(),
        },
    }
}

impl StudyConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config {
            field: "<document>".to_owned(),
            message: e.to_string().trim_end().to_owned(),
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// The simulation grid: seven distributions of true risks (two uniform,
    /// three beta, two synthetic stand-ins for logistic-model pools at 7% and
    /// 26.3% incidence) crossed with five predictor transforms at n = 300 and
    /// n = 1000, 5000 replications each.
    pub fn paper_preset() -> Self {
        let synthetic = |label: &str, incidence: f64, seed: u64| DgmConfig::Empirical {
            label: Some(label.to_owned()),
            path: None,
            column: None,
            synthetic: Some(SyntheticPoolConfig {
                incidence,
                size: 5000,
                spread: 1.0,
                seed,
            }),
        };
        Self {
            seed: DEFAULT_SEED,
            replications: 5000,
            sample_sizes: vec![300, 1000],
            study: StudyMeta {
                name: "paper-grid".to_owned(),
            },
            dgms: vec![
                DgmConfig::Uniform { a: 0.0, b: 1.0 },
                DgmConfig::Uniform { a: 0.0, b: 0.2 },
                DgmConfig::Beta {
                    alpha: 2.0,
                    beta: 5.0,
                },
                DgmConfig::Beta {
                    alpha: 5.0,
                    beta: 5.0,
                },
                DgmConfig::Beta {
                    alpha: 3.0,
                    beta: 3.0,
                },
                synthetic("osteoporosis_synthetic", 0.07, 7),
                synthetic("smoking_synthetic", 0.263, 263),
            ],
            transforms: vec![
                TransformConfig::Perfect,
                TransformConfig::AdditiveBias { delta: 0.1 },
                TransformConfig::UniformNoise { half_width: 0.1 },
                TransformConfig::UniformNoise { half_width: 0.05 },
                TransformConfig::RademacherNoise { magnitude: 0.1 },
            ],
        }
    }

    /// Resolves pools (relative paths against `base_dir`) and validates every
    /// field, naming the offending one on error.
    pub fn resolve(&self, base_dir: &Path) -> Result<StudyPlan> {
        let dgms = self
            .dgms
            .iter()
            .enumerate()
            .map(|(i, d)| resolve_dgm(d, base_dir).map_err(|e| scoped(format!("dgms[{i}]"), e)))
            .collect::<Result<Vec<_>>>()?;
        let transforms = self
            .transforms
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let spec = PredictorTransformSpec::from(t);
                spec.validate()
                    .map(|_| spec)
                    .map_err(|e| scoped(format!("transforms[{i}]"), e))
            })
            .collect::<Result<Vec<_>>>()?;
        if self.study.name.trim().is_empty() {
            return Err(Error::config("study.name", "must not be empty"));
        }
        StudyPlan::grid(
            self.study.name.clone(),
            self.seed,
            self.replications,
            &self.sample_sizes,
            &dgms,
            &transforms,
        )
    }
}

fn resolve_dgm(config: &DgmConfig, base_dir: &Path) -> Result<TrueDistributionSpec> {
    match config {
        DgmConfig::Uniform { a, b } => TrueDistributionSpec::uniform(*a, *b),
        DgmConfig::Beta { alpha, beta } => TrueDistributionSpec::beta(*alpha, *beta),
        DgmConfig::Constant { c } => TrueDistributionSpec::constant(*c),
        DgmConfig::TwoPoint { v0, v1, w } => TrueDistributionSpec::two_point(*v0, *v1, *w),
        DgmConfig::Empirical {
            label,
            path,
            column,
            synthetic,
        } => {
            let pool = match (path, synthetic) {
                (Some(path), None) => {
                    let full = if path.is_absolute() {
                        path.clone()
                    } else {
                        base_dir.join(path)
                    };
                    let loaded = match column {
                        Some(col) => load_empirical_pool_column(&full, col),
                        None => load_empirical_pool(&full),
                    };
                    let pool = loaded.map_err(|e| Error::config("path", e.to_string()))?;
                    match label {
                        Some(l) => crate::dgm::EmpiricalProbabilityPool::new(
                            l.clone(),
                            pool.probabilities().to_vec(),
                        )?,
                        None => pool,
                    }
                }
                (None, Some(s)) => {
                    let name = label
                        .clone()
                        .unwrap_or_else(|| format!("synthetic_{}", s.incidence));
                    synthesize_pool(name, s.incidence, s.size, s.spread, s.seed)
                        .map_err(|e| Error::config("synthetic", e.to_string()))?
                }
                _ => {
                    return Err(Error::config(
                        "path",
                        "empirical distributions need exactly one of `path` or `synthetic`",
                    ))
                }
            };
            Ok(TrueDistributionSpec::empirical(pool))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_preset_has_35_scenarios_per_sample_size() {
        let plan = StudyConfig::paper_preset().resolve(Path::new(".")).unwrap();
        assert_eq!(plan.scenarios.len(), 70);
        for n in [300, 1000] {
            assert_eq!(plan.scenarios.iter().filter(|s| s.n == n).count(), 35);
        }
        assert_eq!(plan.replications, 5000);
    }

    #[test]
    fn checked_in_config_matches_preset() {
        let text = include_str!("../../../../configs/paper.toml");
        assert_eq!(
            StudyConfig::from_toml_str(text).unwrap(),
            StudyConfig::paper_preset()
        );
    }

    #[test]
    fn toml_round_trip() {
        let preset = StudyConfig::paper_preset();
        assert_eq!(
            StudyConfig::from_toml_str(&preset.to_toml_string()).unwrap(),
            preset
        );
    }

    #[test]
    fn invalid_beta_names_field() {
        let text = r#"
            N = 10
            sample_sizes = [10]
            [study]
            name = "x"
            [[dgms]]
            kind = "uniform"
            a = 0.0
            b = 1.0
            [[dgms]]
            kind = "beta"
            alpha = 0.0
            beta = 2.0
            [[transforms]]
            kind = "perfect"
        "#;
        let err = StudyConfig::from_toml_str(text)
            .unwrap()
            .resolve(Path::new("."))
            .unwrap_err();
        match err {
            Error::Config { field, .. } => assert_eq!(field, "dgms[1].alpha"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_transforms_rejected() {
        let mut cfg = StudyConfig::paper_preset();
        cfg.transforms.clear();
        assert!(
            matches!(cfg.resolve(Path::new(".")), Err(Error::Config { field, .. }) if field == "transforms")
        );
    }

    #[test]
    fn unknown_field_rejected() {
        let text = "N = 1\nsample_sizes=[1]\nbogus = 3\n[study]\nname='x'\n[[dgms]]\nkind='constant'\nc=0.5\n[[transforms]]\nkind='perfect'\n";
        assert!(StudyConfig::from_toml_str(text).is_err());
    }

    #[test]
    fn pool_path_resolved_relative_to_config() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("pool.txt"), "0.1\n0.2\n0.3\n").unwrap();
        let text = "N = 2\nsample_sizes=[3]\n[study]\nname='x'\n[[dgms]]\nkind='empirical'\npath='pool.txt'\n[[transforms]]\nkind='perfect'\n";
        let plan = StudyConfig::from_toml_str(text)
            .unwrap()
            .resolve(dir.path())
            .unwrap();
        assert_eq!(plan.scenarios[0].label, "pool__perfect__n3");
        let missing = "N = 2\nsample_sizes=[3]\n[study]\nname='x'\n[[dgms]]\nkind='empirical'\n[[transforms]]\nkind='perfect'\n";
        let err = StudyConfig::from_toml_str(missing)
            .unwrap()
            .resolve(dir.path())
            .unwrap_err();
        assert!(matches!(err, Error::Config { field, .. } if field == "dgms[0].path"));
    }
}
