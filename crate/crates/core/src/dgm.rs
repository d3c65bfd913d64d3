//! Data-generating mechanisms: true risks, predictions derived from them, and
//! Bernoulli outcomes.
//!
//! Every sampler takes an explicit stream so a replication can be replayed
//! from its [`crate::rng::StreamKey`] alone.

use std::fmt;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal, Uniform};

use crate::analytic::TrueProbabilityVector;
use crate::scoring::{OutcomeVector, PredictionVector};
use crate::{Error, Result, PROB_TOLERANCE};

/// A finite collection of per-subject risks (for instance the fitted values
/// of an external model) that replications subsample without replacement.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalProbabilityPool {
    probabilities: Vec<f64>,
    label: String,
    nominal_incidence: f64,
}

impl EmpiricalProbabilityPool {
    pub fn new(label: impl Into<String>, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::Empty("empirical pool"));
        }
        let probabilities = crate::scoring::validate_probabilities(probabilities, "pool value")?;
        let nominal_incidence = probabilities.iter().sum::<f64>() / probabilities.len() as f64;
        Ok(Self {
            probabilities,
            label: label.into(),
            nominal_incidence,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn nominal_incidence(&self) -> f64 {
        self.nominal_incidence
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Writes the pool in the format [`load_empirical_pool`] reads.
    pub fn write(&self, path: &Path) -> Result<()> {
        let io = |e| Error::io(path, e);
        let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
        writeln!(out, "# pool: {}", self.label).map_err(io)?;
        writeln!(
            out,
            "# size: {}  mean: {}",
            self.len(),
            self.nominal_incidence
        )
        .map_err(io)?;
        for v in &self.probabilities {
            writeln!(out, "{v}").map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

/// Reads a pool file: one decimal probability per line, `#` comments and
/// blank lines ignored. The label is the file stem.
pub fn load_empirical_pool(path: &Path) -> Result<EmpiricalProbabilityPool> {
    load_pool_impl(path, None)
}

/// Like [`load_empirical_pool`] for a comma-delimited file with a header row,
/// taking the values from the named column.
pub fn load_empirical_pool_column(path: &Path, column: &str) -> Result<EmpiricalProbabilityPool> {
    load_pool_impl(path, Some(column))
}

fn load_pool_impl(path: &Path, column: Option<&str>) -> Result<EmpiricalProbabilityPool> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut col_index: Option<usize> = None;
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let field = match column {
            None => line,
            Some(name) => {
                let fields: Vec<&str> = line.split(',').map(str::trim).collect();
                match col_index {
                    None => {
                        let found = fields.iter().position(|f| *f == name).ok_or_else(|| {
                            parse_err(lineno, format!("header has no column `{name}`"))
                        })?;
                        col_index = Some(found);
                        continue;
                    }
                    Some(i) => *fields
                        .get(i)
                        .ok_or_else(|| parse_err(lineno, format!("missing column {}", i + 1)))?,
                }
            }
        };
        let v: f64 = field
            .parse()
            .map_err(|_| parse_err(lineno, format!("`{field}` is not a number")))?;
        if !(v.is_finite() && (-PROB_TOLERANCE..=1.0 + PROB_TOLERANCE).contains(&v)) {
            return Err(parse_err(lineno, format!("value {v} is outside [0, 1]")));
        }
        values.push(v.clamp(0.0, 1.0));
    }
    if values.is_empty() {
        return Err(Error::Empty("empirical pool file"));
    }
    let label = path
        .file_stem()
        .map_or_else(|| "pool".to_owned(), |s| s.to_string_lossy().into_owned());
    EmpiricalProbabilityPool::new(label, values)
}

/// Synthesizes a logistic-model-like pool: `q_i = logistic(b + spread · z_i)`
/// with standard normal `z_i`, where the intercept `b` is solved by bisection
/// so the pool mean equals `target_incidence`.
pub fn synthesize_pool(
    label: impl Into<String>,
    target_incidence: f64,
    size: usize,
    spread: f64,
    seed: u64,
) -> Result<EmpiricalProbabilityPool> {
    if !(target_incidence > 0.0 && target_incidence < 1.0) {
        return Err(Error::Domain(format!(
            "target incidence {target_incidence} must lie strictly inside (0, 1)"
        )));
    }
    if !(spread.is_finite() && spread >= 0.0) {
        return Err(Error::Domain(format!(
            "spread {spread} must be finite and >= 0"
        )));
    }
    if size == 0 {
        return Err(Error::Empty("synthetic pool"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z: Vec<f64> = (0..size).map(|_| StandardNormal.sample(&mut rng)).collect();
    let logistic = |x: f64| 1.0 / (1.0 + (-x).exp());
    let mean_at = |b: f64| z.iter().map(|&zi| logistic(b + spread * zi)).sum::<f64>() / size as f64;

    let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_at(mid) < target_incidence {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let b = 0.5 * (lo + hi);
    let values = z.iter().map(|&zi| logistic(b + spread * zi)).collect();
    EmpiricalProbabilityPool::new(label, values)
}

/// Distribution of the true risks `q_i`.
#[derive(Debug, Clone, PartialEq)]
pub enum TrueDistributionSpec {
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
    /// `v1` with probability `w`, otherwise `v0`.
    TwoPoint {
        v0: f64,
        v1: f64,
        w: f64,
    },
    Empirical(Arc<EmpiricalProbabilityPool>),
}

fn in_unit(x: f64) -> bool {
    x.is_finite() && (0.0..=1.0).contains(&x)
}

impl TrueDistributionSpec {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        let s = Self::Uniform { a, b };
        s.validate().map(|_| s)
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        let s = Self::Beta { alpha, beta };
        s.validate().map(|_| s)
    }

    pub fn constant(c: f64) -> Result<Self> {
        let s = Self::Constant { c };
        s.validate().map(|_| s)
    }

    pub fn two_point(v0: f64, v1: f64, w: f64) -> Result<Self> {
        let s = Self::TwoPoint { v0, v1, w };
        s.validate().map(|_| s)
    }

    pub fn empirical(pool: EmpiricalProbabilityPool) -> Self {
        Self::Empirical(Arc::new(pool))
    }

    /// Checks parameters; errors name the offending parameter.
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, message: String| Err(Error::config(field, message));
        match *self {
            Self::Uniform { a, b } => {
                if !(in_unit(a) && in_unit(b) && a < b) {
                    return bad(
                        if in_unit(a) { "b" } else { "a" },
                        format!("uniform needs 0 <= a < b <= 1, got a={a}, b={b}"),
                    );
                }
            }
            Self::Beta { alpha, beta } => {
                if !(alpha.is_finite() && alpha > 0.0) {
                    return bad("alpha", format!("must be > 0, got {alpha}"));
                }
                if !(beta.is_finite() && beta > 0.0) {
                    return bad("beta", format!("must be > 0, got {beta}"));
                }
            }
            Self::Constant { c } => {
                if !in_unit(c) {
                    return bad("c", format!("must lie in [0, 1], got {c}"));
                }
            }
            Self::TwoPoint { v0, v1, w } => {
                for (name, v) in [("v0", v0), ("v1", v1), ("w", w)] {
                    if !in_unit(v) {
                        return bad(name, format!("must lie in [0, 1], got {v}"));
                    }
                }
            }
            Self::Empirical(ref pool) => {
                if pool.is_empty() {
                    return bad("pool", "empirical pool is empty".to_owned());
                }
            }
        }
        Ok(())
    }

    /// File-name friendly identifier, e.g. `beta_2_5`.
    pub fn label(&self) -> String {
        match self {
            Self::Uniform { a, b } => format!("unif_{a}_{b}"),
            Self::Beta { alpha, beta } => format!("beta_{alpha}_{beta}"),
            Self::Constant { c } => format!("const_{c}"),
            Self::TwoPoint { v0, v1, w } => format!("twopoint_{v0}_{v1}_{w}"),
            Self::Empirical(pool) => pool.label().to_owned(),
        }
    }
}

impl fmt::Display for TrueDistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform { a, b } => write!(f, "Unif({a},{b})"),
            Self::Beta { alpha, beta } => write!(f, "Beta({alpha},{beta})"),
            Self::Constant { c } => write!(f, "Constant({c})"),
            Self::TwoPoint { v0, v1, w } => write!(f, "TwoPoint({v0},{v1};w={w})"),
            Self::Empirical(pool) => write!(f, "Empirical({})", pool.label()),
        }
    }
}

/// How predictions are derived from the true risks before clamping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PredictorTransformSpec {
    Perfect,
    AdditiveBias { delta: f64 },
    UniformNoise { half_width: f64 },
    RademacherNoise { magnitude: f64 },
}

impl PredictorTransformSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Perfect => Ok(()),
            Self::AdditiveBias { delta } if delta.is_finite() && delta.abs() < 1.0 => Ok(()),
            Self::AdditiveBias { delta } => Err(Error::config(
                "delta",
                format!("|delta| must be < 1, got {delta}"),
            )),
            Self::UniformNoise { half_width } if half_width > 0.0 && half_width < 1.0 => Ok(()),
            Self::UniformNoise { half_width } => Err(Error::config(
                "half_width",
                format!("must lie in (0, 1), got {half_width}"),
            )),
            Self::RademacherNoise { magnitude } if magnitude.is_finite() && magnitude > 0.0 => {
                Ok(())
            }
            Self::RademacherNoise { magnitude } => Err(Error::config(
                "magnitude",
                format!("must be > 0, got {magnitude}"),
            )),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Perfect => "perfect".to_owned(),
            Self::AdditiveBias { delta } => format!("bias_{delta}"),
            Self::UniformNoise { half_width } => format!("unifnoise_{half_width}"),
            Self::RademacherNoise { magnitude } => format!("rademacher_{magnitude}"),
        }
    }
}

impl fmt::Display for PredictorTransformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Perfect => f.write_str("perfect"),
            Self::AdditiveBias { delta } => write!(f, "{delta:+}"),
            Self::UniformNoise { half_width } => write!(f, "+Unif(-{half_width},{half_width})"),
            Self::RademacherNoise { magnitude } => write!(f, "+(1-2Bern(1/2))*{magnitude}"),
        }
    }
}

/// Draws `n` true risks. Parametric kinds are iid; empirical pools are
/// subsampled without replacement.
pub fn sample_true_probs<R: Rng + ?Sized>(
    spec: &TrueDistributionSpec,
    n: usize,
    rng: &mut R,
) -> Result<TrueProbabilityVector> {
    if n == 0 {
        return Err(Error::Empty("sample"));
    }
    spec.validate()?;
    let values: Vec<f64> = match spec {
        TrueDistributionSpec::Uniform { a, b } => {
            let dist = Uniform::new_inclusive(*a, *b).map_err(|e| Error::Domain(e.to_string()))?;
            (0..n).map(|_| dist.sample(rng)).collect()
        }
        TrueDistributionSpec::Beta { alpha, beta } => {
            let dist = Beta::new(*alpha, *beta).map_err(|e| Error::Domain(e.to_string()))?;
            (0..n).map(|_| dist.sample(rng)).collect()
        }
        TrueDistributionSpec::Constant { c } => vec![*c; n],
        TrueDistributionSpec::TwoPoint { v0, v1, w } => (0..n)
            .map(|_| if rng.random::<f64>() < *w { *v1 } else { *v0 })
            .collect(),
        TrueDistributionSpec::Empirical(pool) => {
            if pool.len() < n {
                return Err(Error::InsufficientPool {
                    pool: pool.len(),
                    requested: n,
                });
            }
            index::sample(rng, pool.len(), n)
                .into_iter()
                .map(|i| pool.probabilities[i])
                .collect()
        }
    };
    Ok(TrueProbabilityVector::from_validated(values))
}

/// Applies the transform elementwise, then clamps to `[0, 1]`.
pub fn apply_predictor_transform<R: Rng + ?Sized>(
    q: &TrueProbabilityVector,
    spec: &PredictorTransformSpec,
    rng: &mut R,
) -> PredictionVector {
    let clamp = |v: f64| v.clamp(0.0, 1.0);
    let values: Vec<f64> = match *spec {
        PredictorTransformSpec::Perfect => q.values().to_vec(),
        PredictorTransformSpec::AdditiveBias { delta } => {
            q.values().iter().map(|&v| clamp(v + delta)).collect()
        }
        PredictorTransformSpec::UniformNoise { half_width } => {
            let noise = Uniform::new(-half_width, half_width).expect("validated half width");
            q.values()
                .iter()
                .map(|&v| clamp(v + noise.sample(rng)))
                .collect()
        }
        PredictorTransformSpec::RademacherNoise { magnitude } => q
            .values()
            .iter()
            .map(|&v| {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                clamp(v + sign * magnitude)
            })
            .collect(),
    };
    PredictionVector::from_validated(values)
}

/// Independent `Bernoulli(q_i)` outcomes.
pub fn sample_outcomes<R: Rng + ?Sized>(q: &TrueProbabilityVector, rng: &mut R) -> OutcomeVector {
    OutcomeVector::from_validated(
        q.values()
            .iter()
            .map(|&qi| u8::from(rng.random::<f64>() < qi))
            .collect(),
    )
}
