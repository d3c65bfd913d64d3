use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub median: f64,
    pub q05: f64,
    pub q95: f64,
    pub mean: f64,
}

/// Quantile of an ascending slice by linear interpolation between the order
/// statistics at position `h = (len - 1) · prob`.
pub fn quantile_sorted(sorted: &[f64], prob: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * prob.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

pub fn summarize(samples: &[f64]) -> Result<Summary> {
    if samples.is_empty() {
        return Err(Error::Empty("samples"));
    }
    if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::Validation {
            what: "sample",
            index,
            value: samples[index],
            domain: "finite reals",
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(Summary {
        median: quantile_sorted(&sorted, 0.5),
        q05: quantile_sorted(&sorted, 0.05),
        q95: quantile_sorted(&sorted, 0.95),
        mean: samples.iter().sum::<f64>() / samples.len() as f64,
    })
}
