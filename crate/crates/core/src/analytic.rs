//! Closed-form behaviour of the Brier score when each outcome is an
//! independent `Bernoulli(q_i)` draw.
//!
//! For a single observation with prediction `p` and true risk `q`,
//!
//! ```text
//! g(p, q) = E[(p - Y)^2] = p^2 - 2pq + q
//! f(q)    = g(q, q)      = q - q^2
//! ```
//!
//! The expectation over a vector is the mean of the per-observation terms.
//! Because `g(p, q) - f(q) = (p - q)^2`, the expected score orders prediction
//! vectors exactly as their Euclidean distance to the truth does.

use serde::Serialize;

use crate::scoring::{check_lengths, check_probability, validate_probabilities, PredictionVector};
use crate::{Error, Result, PROB_TOLERANCE};

/// Unobservable per-subject risks.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueProbabilityVector(Vec<f64>);

impl TrueProbabilityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        validate_probabilities(values, "true probability").map(Self)
    }

    pub fn constant(c: f64, n: usize) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub(crate) fn from_validated(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True mean incidence q̄.
    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    /// The perfect prediction `p = q`.
    pub fn as_prediction(&self) -> PredictionVector {
        PredictionVector::from_validated(self.0.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    epsilon: f64,
    direction: Direction,
}

impl PerturbationSpec {
    pub fn new(epsilon: f64, direction: Direction) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::Domain(format!(
                "epsilon = {epsilon} must be finite and >= 0"
            )));
        }
        Ok(Self { epsilon, direction })
    }

    pub fn plus(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, Direction::Plus)
    }

    pub fn minus(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, Direction::Minus)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }
}

/// Normal approximation of the score: `sqrt(n) (BS - mean)` is
/// asymptotically `N(0, variance)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticSummary {
    pub mean: f64,
    /// Average variance of a single squared-error term.
    pub variance: f64,
    pub n: usize,
    pub sd_of_mean: f64,
}

/// `g(p, q) = p² - 2pq + q`, the expected single-observation score.
pub fn expected_bs_single(p1: f64, q1: f64) -> Result<f64> {
    let p1 = check_probability(p1, "p1")?;
    let q1 = check_probability(q1, "q1")?;
    Ok(g(p1, q1))
}

#[inline]
fn g(p: f64, q: f64) -> f64 {
    p * p - 2.0 * p * q + q
}

#[inline]
fn f(q: f64) -> f64 {
    q - q * q
}

/// `f(q) = q - q²`, the expected score of the perfect prediction.
pub fn expected_bs_perfect_single(q1: f64) -> Result<f64> {
    check_probability(q1, "q1").map(f)
}

pub fn expected_bs(p: &PredictionVector, q: &TrueProbabilityVector) -> Result<f64> {
    check_lengths(q.len(), p.len())?;
    let n = p.len() as f64;
    Ok(p.values()
        .iter()
        .zip(q.values())
        .map(|(&p, &q)| g(p, q))
        .sum::<f64>()
        / n)
}

/// Change in the perfect-prediction expectation when the true risk moves by
/// ε towards 1/2: `f(q1 + ε) - f(q1) = ε(1 - 2q1 - ε)` for [`Direction::Plus`]
/// (requires `q1 + ε <= 1/2`), and `f(q1 - ε) - f(q1) = ε(2q1 - 1 - ε)` for
/// [`Direction::Minus`] (requires `q1 - ε >= 1/2`).
pub fn shift_difference(q1: f64, eps: PerturbationSpec) -> Result<f64> {
    let q1 = check_probability(q1, "q1")?;
    let e = eps.epsilon;
    match eps.direction {
        Direction::Plus => {
            if q1 + e > 0.5 + PROB_TOLERANCE {
                return Err(Error::Domain(format!(
                    "shift plus requires q1 + eps <= 0.5, got {q1} + {e}"
                )));
            }
            Ok(e * (1.0 - 2.0 * q1 - e))
        }
        Direction::Minus => {
            if q1 - e < 0.5 - PROB_TOLERANCE {
                return Err(Error::Domain(format!(
                    "shift minus requires q1 - eps >= 0.5, got {q1} - {e}"
                )));
            }
            Ok(e * (2.0 * q1 - 1.0 - e))
        }
    }
}

/// Cost of moving a perfect prediction by ε in either direction:
/// `g(q1 ± ε, q1) - g(q1, q1) = ε²`, whatever `q1` is.
pub fn perturb_difference(eps: PerturbationSpec) -> f64 {
    eps.epsilon * eps.epsilon
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectivenessOrder {
    FirstBetter,
    SecondBetter,
    Tie,
}

/// Squared Euclidean distance between two equal-length slices.
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Orders two prediction vectors by their ℓ₂ distance to the truth, which is
/// the same order as their expected Brier scores.
pub fn effectiveness_compare(
    p: &PredictionVector,
    p2: &PredictionVector,
    q: &TrueProbabilityVector,
) -> Result<EffectivenessOrder> {
    check_lengths(q.len(), p.len())?;
    check_lengths(q.len(), p2.len())?;
    let d1 = squared_distance(p.values(), q.values());
    let d2 = squared_distance(p2.values(), q.values());
    let tol = PROB_TOLERANCE * d1.max(d2).max(1.0);
    Ok(if (d1 - d2).abs() <= tol {
        EffectivenessOrder::Tie
    } else if d1 < d2 {
        EffectivenessOrder::FirstBetter
    } else {
        EffectivenessOrder::SecondBetter
    })
}

/// Variance of the single-observation squared error `(p1 - Y)²`, which takes
/// `(1 - p1)²` with probability `q1` and `p1²` otherwise:
/// `q1 (1 - q1) (1 - 2 p1)²`.
pub fn variance_single(p1: f64, q1: f64) -> Result<f64> {
    let p1 = check_probability(p1, "p1")?;
    let q1 = check_probability(q1, "q1")?;
    Ok(var_term(p1, q1))
}

#[inline]
fn var_term(p: f64, q: f64) -> f64 {
    let d = 1.0 - 2.0 * p;
    q * (1.0 - q) * d * d
}

/// Normal approximation for independent, non-identically distributed terms:
/// the per-term variances are averaged, so `Var(BS) = variance / n`.
pub fn clt_normal_approx(
    p: &PredictionVector,
    q: &TrueProbabilityVector,
) -> Result<AsymptoticSummary> {
    let mean = expected_bs(p, q)?;
    let n = p.len();
    let variance = p
        .values()
        .iter()
        .zip(q.values())
        .map(|(&p, &q)| var_term(p, q))
        .sum::<f64>()
        / n as f64;
    Ok(AsymptoticSummary {
        mean,
        variance,
        n,
        sd_of_mean: (variance / n as f64).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JensenBound {
    pub bound: f64,
    /// True iff every `q_i` equals `q̄`, the only case where the expected
    /// perfect-prediction score reaches the bound.
    pub tight: bool,
}

/// Upper bound `q̄ - q̄²` on the expected perfect-prediction score.
pub fn jensen_bound(q: &TrueProbabilityVector) -> JensenBound {
    let mean = q.mean();
    JensenBound {
        bound: f(mean),
        tight: q
            .values()
            .iter()
            .all(|&v| (v - mean).abs() <= PROB_TOLERANCE),
    }
}

/// Smallest Brier score any outcome realization can give the perfect
/// prediction: `ε²/n` with `ε = max_i min(q_i, 1 - q_i)`. Strictly positive
/// as soon as one `q_i` lies in `(0, 1)`.
pub fn perfect_bs_lower_bound(q: &TrueProbabilityVector) -> f64 {
    let eps = q
        .values()
        .iter()
        .map(|&v| v.min(1.0 - v))
        .fold(0.0_f64, f64::max);
    eps * eps / q.len() as f64
}
