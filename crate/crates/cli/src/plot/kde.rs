use brier_core::engine::{summarize, Summary};

/// Silverman's rule of thumb: `0.9 · min(sd, IQR/1.34) · n^(-1/5)`, falling
/// back to the sd when the IQR is zero. Zero for constant samples.
pub fn silverman_bandwidth(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let sd = (samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = brier_core::engine::quantile_sorted(&sorted, 0.75)
        - brier_core::engine::quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    0.9 * spread * (n as f64).powf(-0.2)
}

const GAUSS_NORM: f64 = 0.398_942_280_401_432_7; // 1/sqrt(2π)

#[derive(Debug, Clone, PartialEq)]
pub struct Violin {
    pub label: String,
    pub summary: Summary,
    pub bandwidth: f64,
    pub min: f64,
    pub max: f64,
    /// `(value, density)` on an even grid; empty when the bandwidth is zero.
    pub density: Vec<(f64, f64)>,
}

impl Violin {
    pub fn new(
        label: impl Into<String>,
        samples: &[f64],
        grid_points: usize,
    ) -> brier_core::Result<Self> {
        let summary = summarize(samples)?;
        let bandwidth = silverman_bandwidth(samples);
        let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let density = if bandwidth > 0.0 {
            let lo = min - 3.0 * bandwidth;
            let hi = max + 3.0 * bandwidth;
            let step = (hi - lo) / (grid_points - 1) as f64;
            let scale = 1.0 / (samples.len() as f64 * bandwidth);
            (0..grid_points)
                .map(|i| {
                    let x = lo + step * i as f64;
                    let d: f64 = samples
                        .iter()
                        .map(|s| {
                            let u = (x - s) / bandwidth;
                            (-0.5 * u * u).exp()
                        })
                        .sum();
                    (x, d * GAUSS_NORM * scale)
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            label: label.into(),
            summary,
            bandwidth,
            min,
            max,
            density,
        })
    }

    pub fn value_range(&self) -> (f64, f64) {
        match (self.density.first(), self.density.last()) {
            (Some(a), Some(b)) => (a.0, b.0),
            _ => (self.min, self.max),
        }
    }
}
