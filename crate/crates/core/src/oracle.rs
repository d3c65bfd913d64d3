//! Exact computations by enumerating all `2^n` outcome vectors.
//!
//! Outcome vectors are encoded as bit masks (bit `i` set means `y_i = 1`).
//! The mask space is cut into a fixed number of contiguous chunks whose
//! partial results are combined in chunk order, so the answer is the same
//! whether the chunks run on one thread or many.

use serde::Serialize;

use crate::analytic::TrueProbabilityVector;
use crate::exec::Executor;
use crate::scoring::{check_lengths, PredictionVector};
use crate::{Error, Result};

/// Largest `n` the enumeration accepts.
pub const MAX_ENUMERATION_N: usize = 20;

/// Atoms closer than this are merged into one support point.
pub const ATOM_MERGE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactScoreDistribution {
    /// `(score, mass)` pairs sorted by score.
    pub support: Vec<(f64, f64)>,
    pub n: usize,
}

impl ExactScoreDistribution {
    pub fn mean(&self) -> f64 {
        self.support.iter().map(|(s, m)| s * m).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.support
            .iter()
            .map(|(s, m)| m * (s - mean) * (s - mean))
            .sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.support.iter().map(|(_, m)| m).sum()
    }
}

fn check_budget(n: usize) -> Result<()> {
    if n > MAX_ENUMERATION_N {
        Err(Error::Budget {
            n,
            max: MAX_ENUMERATION_N,
        })
    } else {
        Ok(())
    }
}

#[inline]
fn mask_probability(q: &[f64], mask: u32) -> f64 {
    q.iter()
        .enumerate()
        .map(|(i, &qi)| if mask >> i & 1 == 1 { qi } else { 1.0 - qi })
        .product()
}

/// Brier score of `p` against the outcomes encoded in `mask`, summed in index
/// order exactly like [`crate::scoring::brier_score`].
#[inline]
fn mask_brier(p: &[f64], mask: u32) -> f64 {
    let sse: f64 = p
        .iter()
        .enumerate()
        .map(|(i, &pi)| {
            let y = f64::from(mask >> i & 1);
            (pi - y) * (pi - y)
        })
        .sum();
    sse / p.len() as f64
}

/// Runs `visit` over every mask, chunked, and returns one accumulator per
/// chunk in chunk order.
fn enumerate_chunks<T, F>(n: usize, visit: F) -> Vec<T>
where
    T: Send + Default,
    F: Fn(&mut T, u32) + Sync + Send,
{
    let total: u64 = 1 << n;
    let chunk_bits = n.min(8);
    let chunks = 1usize << chunk_bits;
    let per_chunk = total >> chunk_bits;
    let executor = if n >= 12 {
        Executor::default()
    } else {
        Executor::sequential()
    };
    executor.map(chunks, |c| {
        let mut acc = T::default();
        let start = c as u64 * per_chunk;
        for mask in start..start + per_chunk {
            visit(&mut acc, mask as u32);
        }
        acc
    })
}

/// `Σ_y Pr(y) · BS(p, y)` over all outcome vectors.
pub fn exact_expected_bs(p: &PredictionVector, q: &TrueProbabilityVector) -> Result<f64> {
    check_lengths(q.len(), p.len())?;
    check_budget(p.len())?;
    let (p, q) = (p.values(), q.values());
    let partials: Vec<f64> = enumerate_chunks(p.len(), |acc: &mut f64, mask| {
        *acc += mask_probability(q, mask) * mask_brier(p, mask);
    });
    Ok(partials.into_iter().sum())
}

/// Full law of `BS(p, Y)`.
pub fn exact_distribution(
    p: &PredictionVector,
    q: &TrueProbabilityVector,
) -> Result<ExactScoreDistribution> {
    check_lengths(q.len(), p.len())?;
    check_budget(p.len())?;
    let (pv, qv) = (p.values(), q.values());
    let chunks: Vec<Vec<(f64, f64)>> =
        enumerate_chunks(pv.len(), |acc: &mut Vec<(f64, f64)>, mask| {
            let mass = mask_probability(qv, mask);
            if mass > 0.0 {
                acc.push((mask_brier(pv, mask), mass));
            }
        });
    let mut atoms: Vec<(f64, f64)> = chunks.into_iter().flatten().collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut support: Vec<(f64, f64)> = Vec::new();
    let mut anchor = f64::NEG_INFINITY;
    for (score, mass) in atoms {
        match support.last_mut() {
            Some(last) if score - anchor <= ATOM_MERGE_TOLERANCE => last.1 += mass,
            _ => {
                anchor = score;
                support.push((score, mass));
            }
        }
    }
    Ok(ExactScoreDistribution {
        support,
        n: pv.len(),
    })
}

/// Probability that the perfect prediction `p = q` scores strictly above the
/// incidence reference `ȳ - ȳ²` of the same outcome vector.
pub fn exact_exceedance_probability(q: &TrueProbabilityVector) -> Result<f64> {
    check_budget(q.len())?;
    let qv = q.values();
    let n = qv.len() as f64;
    let partials: Vec<f64> = enumerate_chunks(qv.len(), |acc: &mut f64, mask| {
        let ybar = f64::from(mask.count_ones()) / n;
        if mask_brier(qv, mask) > ybar - ybar * ybar {
            *acc += mask_probability(qv, mask);
        }
    });
    Ok(partials.into_iter().sum())
}

/// Smallest realized Brier score of `p` over all outcome vectors with
/// positive probability under `q`.
pub fn exact_min_realized_bs(p: &PredictionVector, q: &TrueProbabilityVector) -> Result<f64> {
    let dist = exact_distribution(p, q)?;
    Ok(dist.support.first().map_or(0.0, |(s, _)| *s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pv(v: &[f64]) -> PredictionVector {
        PredictionVector::new(v.to_vec()).unwrap()
    }

    fn tv(v: &[f64]) -> TrueProbabilityVector {
        TrueProbabilityVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn expected_examples() {
        assert_abs_diff_eq!(
            exact_expected_bs(&pv(&[0.5]), &tv(&[0.5])).unwrap(),
            0.25,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            exact_expected_bs(&pv(&[0.25]), &tv(&[0.1])).unwrap(),
            0.1125,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            exact_expected_bs(&pv(&[0.1, 0.9]), &tv(&[0.1, 0.9])).unwrap(),
            0.09,
            epsilon = 1e-15
        );
    }

    #[test]
    fn distribution_examples() {
        let d = exact_distribution(&pv(&[0.5]), &tv(&[0.5])).unwrap();
        assert_eq!(d.support, vec![(0.25, 1.0)]);

        let d = exact_distribution(&pv(&[0.1]), &tv(&[0.1])).unwrap();
        assert_eq!(d.support.len(), 2);
        assert_abs_diff_eq!(d.support[0].0, 0.01, epsilon = 1e-15);
        assert_abs_diff_eq!(d.support[0].1, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(d.support[1].0, 0.81, epsilon = 1e-15);
        assert_abs_diff_eq!(d.support[1].1, 0.1, epsilon = 1e-15);

        let d = exact_distribution(&pv(&[0.0, 0.0]), &tv(&[0.5, 0.5])).unwrap();
        assert_eq!(d.support, vec![(0.0, 0.25), (0.5, 0.5), (1.0, 0.25)]);
    }

    #[test]
    fn zero_mass_outcomes_dropped() {
        let d = exact_distribution(&pv(&[0.0, 1.0]), &tv(&[0.0, 1.0])).unwrap();
        assert_eq!(d.support, vec![(0.0, 1.0)]);
    }

    #[test]
    fn exceedance_examples() {
        assert_eq!(exact_exceedance_probability(&tv(&[0.0; 5])).unwrap(), 0.0);
        assert_abs_diff_eq!(
            exact_exceedance_probability(&tv(&[0.5, 0.5])).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        // BS ≡ 0.25 and ȳ-ȳ² < 0.25 unless exactly five events occur.
        let expected = 1.0 - 252.0 / 1024.0;
        let got = exact_exceedance_probability(&tv(&[0.5; 10])).unwrap();
        assert!(got > 0.0);
        assert_abs_diff_eq!(got, expected, epsilon = 1e-12);
    }

    #[test]
    fn budget_enforced() {
        let q = TrueProbabilityVector::constant(0.5, 21).unwrap();
        assert!(matches!(
            exact_expected_bs(&q.as_prediction(), &q),
            Err(Error::Budget { n: 21, .. })
        ));
        assert!(exact_exceedance_probability(&q).is_err());
    }

    #[test]
    fn mass_sums_to_one() {
        let q = tv(&[
            0.13, 0.5, 0.77, 0.01, 0.99, 0.3, 0.62, 0.45, 0.2, 0.8, 0.33, 0.66, 0.05,
        ]);
        let d = exact_distribution(&pv(&[0.2; 13]), &q).unwrap();
        assert_abs_diff_eq!(d.total_mass(), 1.0, epsilon = 1e-12);
        assert!(d
            .support
            .iter()
            .all(|&(s, m)| (0.0..=1.0).contains(&s) && m >= 0.0));
        assert!(d
            .support
            .windows(2)
            .all(|w| w[1].0 - w[0].0 > ATOM_MERGE_TOLERANCE));
    }

    #[test]
    fn min_realized_matches_hand_enumeration() {
        // q = (0.1, 0, 1): only y_1 is random; BS is 0.01/3 or 0.81/3.
        let q = tv(&[0.1, 0.0, 1.0]);
        assert_abs_diff_eq!(
            exact_min_realized_bs(&q.as_prediction(), &q).unwrap(),
            0.01 / 3.0,
            epsilon = 1e-15
        );
    }
}
