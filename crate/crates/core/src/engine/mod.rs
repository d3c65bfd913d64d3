//! Monte Carlo simulation study.
//!
//! A [`Scenario`] fixes the distribution of true risks, the predictor
//! transform and the sample size. Each replication draws `q`, derives `p`,
//! draws `y`, and records
//!
//! - the Brier score and CIL of `p`,
//! - the gap `(ȳ - ȳ²) - BS(q, y)` between the incidence reference and the
//!   perfect-prediction score,
//! - whether the perfect-prediction score exceeds `ȳ - ȳ²`.
//!
//! The perfect-prediction score is computed in every scenario, whatever
//! transform is applied, because the gap and exceedance estimands are defined
//! against it.
//!
//! Replication `r` of a scenario labelled `L` under root seed `s` always uses
//! the streams of `StreamKey { s, hash(L), r }`, so results do not depend on
//! the worker count or on which other scenarios are in the study.

mod config;
mod results;
mod summary;

pub use config::{DgmConfig, StudyConfig, StudyMeta, SyntheticPoolConfig, TransformConfig};
pub use results::{
    read_manifest, read_scenario_csv, read_summary, write_results, ManifestRow, ReplicationRow,
    SummaryRow, MANIFEST_FILE, MANIFEST_HEADER, SCENARIO_DIR, SCENARIO_HEADER, SUMMARY_FILE,
    SUMMARY_HEADER,
};
pub use summary::{quantile_sorted, summarize, Summary};

use std::collections::HashSet;

use crate::analytic::TrueProbabilityVector;
use crate::dgm::{
    apply_predictor_transform, sample_outcomes, sample_true_probs, PredictorTransformSpec,
    TrueDistributionSpec,
};
use crate::exec::Executor;
use crate::rng::{stable_hash, ReplicationStreams, StreamKey};
use crate::scoring::{brier_score, cil, reference_scores, OutcomeVector, PredictionVector};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub true_dist: TrueDistributionSpec,
    pub transform: PredictorTransformSpec,
    pub n: usize,
    pub label: String,
}

impl Scenario {
    /// Builds a scenario with the canonical label `<dgm>__<transform>__n<n>`.
    pub fn new(
        true_dist: TrueDistributionSpec,
        transform: PredictorTransformSpec,
        n: usize,
    ) -> Result<Self> {
        let label = format!("{}__{}__n{}", true_dist.label(), transform.label(), n);
        Self::with_label(true_dist, transform, n, label)
    }

    pub fn with_label(
        true_dist: TrueDistributionSpec,
        transform: PredictorTransformSpec,
        n: usize,
        label: impl Into<String>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("n", "sample size must be >= 1"));
        }
        true_dist.validate()?;
        transform.validate()?;
        Ok(Self {
            true_dist,
            transform,
            n,
            label: label.into(),
        })
    }

    /// Key mixed into every stream of this scenario.
    pub fn stream_key(&self) -> u64 {
        stable_hash(&self.label)
    }
}

/// The vectors drawn in one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationDraw {
    pub q: TrueProbabilityVector,
    pub p: PredictionVector,
    pub y: OutcomeVector,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationMetrics {
    pub brier: f64,
    pub cil: f64,
    /// `(ȳ - ȳ²) - BS(q, y)`.
    pub gap: f64,
    /// `BS(q, y) > ȳ - ȳ²`.
    pub exceeded: bool,
    pub ybar: f64,
    pub brier_perfect: f64,
}

pub fn draw_replication(
    scenario: &Scenario,
    streams: &mut ReplicationStreams,
) -> Result<ReplicationDraw> {
    let q = sample_true_probs(&scenario.true_dist, scenario.n, &mut streams.truth)?;
    let p = apply_predictor_transform(&q, &scenario.transform, &mut streams.predictions);
    let y = sample_outcomes(&q, &mut streams.outcomes);
    Ok(ReplicationDraw { q, p, y })
}

pub fn score_replication(draw: &ReplicationDraw) -> Result<ReplicationMetrics> {
    let brier = brier_score(&draw.p, &draw.y)?;
    let brier_perfect = brier_score(&draw.q.as_prediction(), &draw.y)?;
    let reference = reference_scores(&draw.y).reference_incidence;
    Ok(ReplicationMetrics {
        brier,
        cil: cil(&draw.p, &draw.y)?,
        gap: reference - brier_perfect,
        exceeded: brier_perfect > reference,
        ybar: draw.y.incidence(),
        brier_perfect,
    })
}

pub fn run_replication(
    scenario: &Scenario,
    streams: &mut ReplicationStreams,
) -> Result<ReplicationMetrics> {
    score_replication(&draw_replication(scenario, streams)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub scenario: Scenario,
    pub seed: u64,
    pub replications: usize,
    pub brier_samples: Vec<f64>,
    pub cil_samples: Vec<f64>,
    pub gap_samples: Vec<f64>,
    pub ybar_samples: Vec<f64>,
    pub exceeded: Vec<bool>,
    pub exceed_count: usize,
    pub brier_summary: Summary,
    pub cil_summary: Summary,
    pub gap_summary: Summary,
}

impl ScenarioResult {
    pub fn exceed_probability(&self) -> f64 {
        self.exceed_count as f64 / self.replications as f64
    }

    /// Binomial standard error of [`Self::exceed_probability`].
    pub fn exceed_standard_error(&self) -> f64 {
        let p = self.exceed_probability();
        (p * (1.0 - p) / self.replications as f64).sqrt()
    }
}

pub fn run_scenario(
    scenario: &Scenario,
    replications: usize,
    root_seed: u64,
    executor: &Executor,
) -> Result<ScenarioResult> {
    if replications == 0 {
        return Err(Error::config("N", "replication count must be >= 1"));
    }
    let key = scenario.stream_key();
    let metrics = executor
        .map(replications, |rep| {
            let mut streams = ReplicationStreams::new(StreamKey::new(root_seed, key, rep as u64));
            run_replication(scenario, &mut streams)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let brier_samples: Vec<f64> = metrics.iter().map(|m| m.brier).collect();
    let cil_samples: Vec<f64> = metrics.iter().map(|m| m.cil).collect();
    let gap_samples: Vec<f64> = metrics.iter().map(|m| m.gap).collect();
    let exceeded: Vec<bool> = metrics.iter().map(|m| m.exceeded).collect();
    Ok(ScenarioResult {
        scenario: scenario.clone(),
        seed: root_seed,
        replications,
        brier_summary: summarize(&brier_samples)?,
        cil_summary: summarize(&cil_samples)?,
        gap_summary: summarize(&gap_samples)?,
        ybar_samples: metrics.iter().map(|m| m.ybar).collect(),
        exceed_count: exceeded.iter().filter(|&&e| e).count(),
        brier_samples,
        cil_samples,
        gap_samples,
        exceeded,
    })
}

/// A resolved, validated study: every scenario plus replication count and
/// seed.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyPlan {
    pub name: String,
    pub seed: u64,
    pub replications: usize,
    pub scenarios: Vec<Scenario>,
}

impl StudyPlan {
    /// Full cartesian grid, ordered by sample size, then distribution, then
    /// transform.
    pub fn grid(
        name: impl Into<String>,
        seed: u64,
        replications: usize,
        sample_sizes: &[usize],
        dgms: &[TrueDistributionSpec],
        transforms: &[PredictorTransformSpec],
    ) -> Result<Self> {
        if replications == 0 {
            return Err(Error::config("N", "replication count must be >= 1"));
        }
        if sample_sizes.is_empty() {
            return Err(Error::config(
                "sample_sizes",
                "at least one sample size is required",
            ));
        }
        if dgms.is_empty() {
            return Err(Error::config(
                "dgms",
                "at least one distribution is required",
            ));
        }
        if transforms.is_empty() {
            return Err(Error::config(
                "transforms",
                "at least one transform is required",
            ));
        }
        let mut scenarios = Vec::with_capacity(sample_sizes.len() * dgms.len() * transforms.len());
        let mut labels = HashSet::new();
        for (i, &n) in sample_sizes.iter().enumerate() {
            if n == 0 {
                return Err(Error::config(
                    format!("sample_sizes[{i}]"),
                    "sample size must be >= 1",
                ));
            }
            for dgm in dgms {
                for transform in transforms {
                    let scenario = Scenario::new(dgm.clone(), *transform, n)?;
                    if !labels.insert(scenario.label.clone()) {
                        return Err(Error::config(
                            "dgms/transforms",
                            format!("duplicate scenario label `{}`", scenario.label),
                        ));
                    }
                    scenarios.push(scenario);
                }
            }
        }
        Ok(Self {
            name: name.into(),
            seed,
            replications,
            scenarios,
        })
    }

    /// Keeps only scenarios whose sample size is listed.
    pub fn restrict_sample_sizes(&mut self, sizes: &[usize]) {
        self.scenarios.retain(|s| sizes.contains(&s.n));
    }
}

/// Runs every scenario of the plan, in plan order. `progress` is called once
/// per finished scenario with its index.
pub fn run_study(
    plan: &StudyPlan,
    executor: &Executor,
    mut progress: impl FnMut(usize, &ScenarioResult),
) -> Result<Vec<ScenarioResult>> {
    let mut out = Vec::with_capacity(plan.scenarios.len());
    for (i, scenario) in plan.scenarios.iter().enumerate() {
        let result = run_scenario(scenario, plan.replications, plan.seed, executor)?;
        progress(i, &result);
        out.push(result);
    }
    Ok(out)
}
