//! Observed metrics for a vector of predicted probabilities scored against
//! binary outcomes.
//!
//! The Brier score is `(1/n) Σ (p_i - y_i)^2`. Its square root is the RMSE,
//! and the two companions reported alongside it satisfy, for every input,
//!
//! ```text
//! CIL <= MAE <= RMSE        Brier <= MAE
//! ```
//!
//! where CIL (calibration-in-the-large) is the mean prediction minus the
//! observed incidence.

use std::fmt;
use std::io::BufRead;
use std::path::Path;

use serde::Serialize;

use crate::{Error, Result, PROB_TOLERANCE};

/// Validates a probability slice, snapping values within `PROB_TOLERANCE` of
/// the boundary onto `[0, 1]`.
pub(crate) fn validate_probabilities(values: Vec<f64>, what: &'static str) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Empty(what));
    }
    values
        .into_iter()
        .enumerate()
        .map(|(index, v)| {
            if v.is_finite() && (-PROB_TOLERANCE..=1.0 + PROB_TOLERANCE).contains(&v) {
                Ok(v.clamp(0.0, 1.0))
            } else {
                Err(Error::Validation {
                    what,
                    index,
                    value: v,
                    domain: "[0, 1]",
                })
            }
        })
        .collect()
}

pub(crate) fn check_probability(value: f64, name: &str) -> Result<f64> {
    if value.is_finite() && (-PROB_TOLERANCE..=1.0 + PROB_TOLERANCE).contains(&value) {
        Ok(value.clamp(0.0, 1.0))
    } else {
        Err(Error::Domain(format!(
            "{name} = {value} is not a probability in [0, 1]"
        )))
    }
}

pub(crate) fn check_lengths(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

/// Predicted probabilities entered into the score.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionVector(Vec<f64>);

impl PredictionVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        validate_probabilities(values, "prediction").map(Self)
    }

    /// Constant prediction `c` repeated `n` times.
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

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Realized binary outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeVector(Vec<u8>);

impl OutcomeVector {
    pub fn new(values: Vec<u8>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("outcome"));
        }
        if let Some((index, &v)) = values.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(Error::Validation {
                what: "outcome",
                index,
                value: f64::from(v),
                domain: "{0, 1}",
            });
        }
        Ok(Self(values))
    }

    pub fn from_bools(values: &[bool]) -> Result<Self> {
        Self::new(values.iter().map(|&b| u8::from(b)).collect())
    }

    pub(crate) fn from_validated(values: Vec<u8>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn events(&self) -> usize {
        self.0.iter().map(|&y| usize::from(y)).sum()
    }

    /// Observed incidence ȳ.
    pub fn incidence(&self) -> f64 {
        self.events() as f64 / self.0.len() as f64
    }
}

fn paired<'a>(
    p: &'a PredictionVector,
    y: &'a OutcomeVector,
) -> Result<impl Iterator<Item = (f64, f64)> + 'a> {
    check_lengths(p.len(), y.len())?;
    Ok(p.0.iter().zip(&y.0).map(|(&p, &y)| (p, f64::from(y))))
}

pub fn brier_score(p: &PredictionVector, y: &OutcomeVector) -> Result<f64> {
    let n = p.len() as f64;
    Ok(paired(p, y)?.map(|(p, y)| (p - y) * (p - y)).sum::<f64>() / n)
}

pub fn rmse(p: &PredictionVector, y: &OutcomeVector) -> Result<f64> {
    brier_score(p, y).map(f64::sqrt)
}

pub fn mae(p: &PredictionVector, y: &OutcomeVector) -> Result<f64> {
    let n = p.len() as f64;
    Ok(paired(p, y)?.map(|(p, y)| (p - y).abs()).sum::<f64>() / n)
}

/// Calibration-in-the-large: mean prediction minus observed incidence.
pub fn cil(p: &PredictionVector, y: &OutcomeVector) -> Result<f64> {
    check_lengths(p.len(), y.len())?;
    Ok(p.mean() - y.incidence())
}

/// Brier score of the constant 1/2 predictor (always 0.25) and of the
/// constant predictor equal to the observed incidence (ȳ - ȳ²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceScores {
    pub reference_half: f64,
    pub reference_incidence: f64,
}

pub fn reference_scores(y: &OutcomeVector) -> ReferenceScores {
    let ybar = y.incidence();
    ReferenceScores {
        reference_half: 0.25,
        reference_incidence: ybar - ybar * ybar,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WarningCode {
    ZeroScoreSuspect,
    AllExtremePredictions,
    NearReference,
}

impl WarningCode {
    pub fn as_str(self) -> &'static str {
        match self {
            WarningCode::ZeroScoreSuspect => "ZERO_SCORE_SUSPECT",
            WarningCode::AllExtremePredictions => "ALL_EXTREME_PREDICTIONS",
            WarningCode::NearReference => "NEAR_REFERENCE",
        }
    }
}

impl fmt::Display for WarningCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Warning {
    pub code: WarningCode,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnoseOptions {
    /// Half-width of the band around ȳ - ȳ² that triggers `NEAR_REFERENCE`.
    pub near_reference_delta: f64,
    /// Minimum sample size for which a zero score is flagged.
    pub zero_score_min_n: usize,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        Self {
            near_reference_delta: 0.01,
            zero_score_min_n: 10,
        }
    }
}

/// Describes (never adjudicates) patterns in a score that are commonly
/// misread.
pub fn diagnose(
    p: &PredictionVector,
    y: &OutcomeVector,
    options: &DiagnoseOptions,
) -> Result<Vec<Warning>> {
    let brier = brier_score(p, y)?;
    let reference = reference_scores(y).reference_incidence;
    let mut warnings = Vec::new();

    if brier == 0.0 && p.len() >= options.zero_score_min_n {
        warnings.push(Warning {
            code: WarningCode::ZeroScoreSuspect,
            message: format!(
                "Brier score is exactly 0 over {} observations; with any true risk strictly \
                 between 0 and 1 even perfect predictions cannot reach 0, so check for leakage \
                 or outcome-derived predictions",
                p.len()
            ),
        });
    }
    if p.values().iter().all(|&v| v == 0.0 || v == 1.0) {
        warnings.push(Warning {
            code: WarningCode::AllExtremePredictions,
            message: "every prediction is exactly 0 or 1".to_owned(),
        });
    }
    if (brier - reference).abs() < options.near_reference_delta {
        warnings.push(Warning {
            code: WarningCode::NearReference,
            message: format!(
                "Brier score {brier:.6} is within {} of the incidence reference ȳ-ȳ² = {reference:.6}; \
                 this does NOT show the model is non-informative, since perfect predictions \
                 score near this value when true risks cluster around ȳ",
                options.near_reference_delta
            ),
        });
    }
    Ok(warnings)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub n: usize,
    pub incidence: f64,
    pub brier: f64,
    pub rmse: f64,
    pub mae: f64,
    pub cil: f64,
    pub reference_half: f64,
    pub reference_incidence: f64,
    pub warnings: Vec<Warning>,
}

impl ScoreReport {
    pub fn compute(
        p: &PredictionVector,
        y: &OutcomeVector,
        options: &DiagnoseOptions,
    ) -> Result<Self> {
        let brier = brier_score(p, y)?;
        let refs = reference_scores(y);
        Ok(Self {
            n: p.len(),
            incidence: y.incidence(),
            brier,
            rmse: brier.sqrt(),
            mae: mae(p, y)?,
            cil: cil(p, y)?,
            reference_half: refs.reference_half,
            reference_incidence: refs.reference_incidence,
            warnings: diagnose(p, y, options)?,
        })
    }

    pub fn warning_codes(&self) -> Vec<WarningCode> {
        self.warnings.iter().map(|w| w.code).collect()
    }

    /// Flat `key,value` rendering; warnings are a `;`-separated code list.
    pub fn to_key_value(&self) -> String {
        let codes = self
            .warnings
            .iter()
            .map(|w| w.code.as_str())
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "key,value\nn,{}\nincidence,{}\nbrier,{}\nrmse,{}\nmae,{}\ncil,{}\nreference_half,{}\nreference_incidence,{}\nwarnings,{}\n",
            self.n,
            self.incidence,
            self.brier,
            self.rmse,
            self.mae,
            self.cil,
            self.reference_half,
            self.reference_incidence,
            codes
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Reads a `p,y` pair file: header line `p,y`, then one decimal probability
/// and one 0/1 outcome per line. Blank lines are skipped.
pub fn read_pairs(path: &Path) -> Result<(PredictionVector, OutcomeVector)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_pairs(std::io::BufReader::new(file), path)
}

pub fn parse_pairs<R: BufRead>(
    reader: R,
    path: &Path,
) -> Result<(PredictionVector, OutcomeVector)> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let lines = reader.lines().enumerate();
    let mut header_seen = false;
    let mut ps = Vec::new();
    let mut ys = Vec::new();

    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if !header_seen {
            if fields != ["p", "y"] {
                return Err(parse_err(
                    lineno,
                    format!("expected header `p,y`, found `{trimmed}`"),
                ));
            }
            header_seen = true;
            continue;
        }
        if fields.len() != 2 {
            return Err(parse_err(
                lineno,
                format!("expected 2 fields, found {}", fields.len()),
            ));
        }
        let p: f64 = fields[0]
            .parse()
            .map_err(|_| parse_err(lineno, format!("`{}` is not a number", fields[0])))?;
        if !(p.is_finite() && (-PROB_TOLERANCE..=1.0 + PROB_TOLERANCE).contains(&p)) {
            return Err(parse_err(
                lineno,
                format!("prediction {p} is outside [0, 1]"),
            ));
        }
        let y = match fields[1] {
            "0" => 0u8,
            "1" => 1u8,
            other => {
                return Err(parse_err(
                    lineno,
                    format!("outcome `{other}` is not 0 or 1"),
                ))
            }
        };
        ps.push(p);
        ys.push(y);
    }
    if !header_seen {
        return Err(parse_err(1, "missing header `p,y`".to_owned()));
    }
    if ps.is_empty() {
        return Err(Error::Empty("pair file"));
    }
    Ok((PredictionVector::new(ps)?, OutcomeVector::new(ys)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pv(v: &[f64]) -> PredictionVector {
        PredictionVector::new(v.to_vec()).unwrap()
    }

    fn ov(v: &[u8]) -> OutcomeVector {
        OutcomeVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn extremes_that_match_score_zero() {
        assert_eq!(brier_score(&pv(&[1.0, 0.0]), &ov(&[1, 0])).unwrap(), 0.0);
    }

    #[test]
    fn half_predictor_scores_quarter() {
        let y = ov(&[1, 0, 0, 1, 1, 1, 0]);
        let p = PredictionVector::constant(0.5, y.len()).unwrap();
        assert_eq!(brier_score(&p, &y).unwrap(), 0.25);
    }

    #[test]
    fn single_term() {
        assert_eq!(brier_score(&pv(&[0.25]), &ov(&[0])).unwrap(), 0.0625);
    }

    #[test]
    fn companions_symmetric_errors() {
        let (p, y) = (pv(&[0.5, 0.5]), ov(&[1, 0]));
        assert_eq!(rmse(&p, &y).unwrap(), 0.5);
        assert_eq!(mae(&p, &y).unwrap(), 0.5);
        assert_eq!(cil(&p, &y).unwrap(), 0.0);
    }

    #[test]
    fn companions_one_sided_error() {
        let (p, y) = (pv(&[0.2, 0.2]), ov(&[0, 0]));
        assert_abs_diff_eq!(cil(&p, &y).unwrap(), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(mae(&p, &y).unwrap(), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(rmse(&p, &y).unwrap(), 0.2, epsilon = 1e-15);
    }

    #[test]
    fn reference_scores_examples() {
        assert_eq!(reference_scores(&ov(&[1, 0])).reference_incidence, 0.25);
        let tenth = ov(&[1, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert_abs_diff_eq!(
            reference_scores(&tenth).reference_incidence,
            0.09,
            epsilon = 1e-15
        );
        assert_eq!(reference_scores(&ov(&[0, 0, 0])).reference_incidence, 0.0);
        assert_eq!(reference_scores(&ov(&[0, 0, 0])).reference_half, 0.25);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            PredictionVector::new(vec![]),
            Err(Error::Empty(_))
        ));
        assert!(matches!(
            PredictionVector::new(vec![0.5, 1.1]),
            Err(Error::Validation { index: 1, .. })
        ));
        assert!(PredictionVector::new(vec![f64::NAN]).is_err());
        assert!(matches!(
            OutcomeVector::new(vec![0, 2]),
            Err(Error::Validation { index: 1, .. })
        ));
        assert!(matches!(
            brier_score(&pv(&[0.5]), &ov(&[0, 1])),
            Err(Error::Dimension {
                expected: 1,
                found: 2
            })
        ));
    }

    #[test]
    fn tolerates_rounding_at_the_boundary() {
        let p = PredictionVector::new(vec![1.0 + 1e-13, -1e-13]).unwrap();
        assert_eq!(p.values(), &[1.0, 0.0]);
        assert!(PredictionVector::new(vec![1.0 + 1e-9]).is_err());
    }

    #[test]
    fn diagnose_zero_score() {
        let y: Vec<u8> = (0..20).map(|i| (i % 2 == 0) as u8).collect();
        let p: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
        let codes: Vec<_> = diagnose(&pv(&p), &ov(&y), &DiagnoseOptions::default())
            .unwrap()
            .into_iter()
            .map(|w| w.code)
            .collect();
        assert_eq!(
            codes,
            vec![
                WarningCode::ZeroScoreSuspect,
                WarningCode::AllExtremePredictions
            ]
        );
    }

    #[test]
    fn diagnose_zero_score_small_n_not_flagged() {
        let codes: Vec<_> = diagnose(&pv(&[1.0, 0.0]), &ov(&[1, 0]), &DiagnoseOptions::default())
            .unwrap()
            .into_iter()
            .map(|w| w.code)
            .collect();
        assert_eq!(codes, vec![WarningCode::AllExtremePredictions]);
    }

    #[test]
    fn diagnose_near_reference() {
        let y = ov(&[1, 0, 1, 0, 1, 0]);
        let p = PredictionVector::constant(0.5, 6).unwrap();
        let warnings = diagnose(&p, &y, &DiagnoseOptions::default()).unwrap();
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].code, WarningCode::NearReference);
        assert!(warnings[0].message.contains("does NOT"));
    }

    #[test]
    fn diagnose_clean() {
        // ȳ = 0.5 so ȳ-ȳ² = 0.25; brier = mean of 0.01 and 0.04 = 0.025.
        let y = ov(&[1, 0, 1, 0]);
        let p = pv(&[0.9, 0.1, 0.8, 0.2]);
        let brier = brier_score(&p, &y).unwrap();
        assert!((brier - 0.25).abs() >= 0.05);
        assert!(diagnose(&p, &y, &DiagnoseOptions::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn near_reference_threshold_is_configurable() {
        let y = ov(&[1, 0, 1, 0]);
        let p = pv(&[0.9, 0.1, 0.8, 0.2]);
        let wide = DiagnoseOptions {
            near_reference_delta: 0.5,
            ..Default::default()
        };
        let codes: Vec<_> = diagnose(&p, &y, &wide)
            .unwrap()
            .into_iter()
            .map(|w| w.code)
            .collect();
        assert_eq!(codes, vec![WarningCode::NearReference]);
    }

    #[test]
    fn parse_pairs_reports_line() {
        let text = "p,y\n0.5,1\n0.5,2\n";
        let err = parse_pairs(text.as_bytes(), Path::new("in.csv")).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_pairs("p,y\n1.3,1\n".as_bytes(), Path::new("in.csv")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(parse_pairs("a,b\n".as_bytes(), Path::new("x")).is_err());
        assert!(matches!(
            parse_pairs("p,y\n".as_bytes(), Path::new("x")),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn report_renderings() {
        let (p, y) = parse_pairs("p,y\n0.5,1\n\n0.5,0\n".as_bytes(), Path::new("x")).unwrap();
        let report = ScoreReport::compute(&p, &y, &DiagnoseOptions::default()).unwrap();
        let kv = report.to_key_value();
        assert!(kv.starts_with("key,value\n"));
        assert!(kv.contains("brier,0.25\n"));
        assert!(kv.contains("warnings,NEAR_REFERENCE\n"));
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["brier"], 0.25);
        assert_eq!(json["warnings"][0]["code"], "NEAR_REFERENCE");
    }
}
