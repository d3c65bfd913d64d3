//! Persisted study output.
//!
//! ```text
//! <out>/manifest.csv              scenario,dgm,transform,n,reps,seed
//! <out>/summary.csv               scenario,n,metric,median,q05,q95,mean,exceed_prob
//! <out>/scenarios/<label>.csv     rep,brier,cil,gap,exceeded,ybar
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so the
//! files are byte-identical for identical results. `summary.csv` is written
//! last; a directory without it is an incomplete run.

use std::fs;
use std::path::{Path, PathBuf};

use super::{summarize, ScenarioResult, Summary};
use crate::{Error, Result};

pub const SCENARIO_DIR: &str = "scenarios";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const MANIFEST_FILE: &str = "manifest.csv";
pub const SCENARIO_HEADER: [&str; 6] = ["rep", "brier", "cil", "gap", "exceeded", "ybar"];
pub const SUMMARY_HEADER: [&str; 8] = [
    "scenario",
    "n",
    "metric",
    "median",
    "q05",
    "q95",
    "mean",
    "exceed_prob",
];
pub const MANIFEST_HEADER: [&str; 6] = ["scenario", "dgm", "transform", "n", "reps", "seed"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationRow {
    pub rep: usize,
    pub brier: f64,
    pub cil: f64,
    pub gap: f64,
    pub exceeded: bool,
    pub ybar: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scenario: String,
    pub n: usize,
    pub metric: String,
    pub summary: Summary,
    pub exceed_prob: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub scenario: String,
    pub dgm: String,
    pub transform: String,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("{other:?}"),
        },
    }
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| csv_err(path, e))
}

fn summary_rows(result: &ScenarioResult) -> [(&'static str, Summary); 3] {
    [
        ("brier", result.brier_summary),
        ("cil", result.cil_summary),
        ("gap", result.gap_summary),
    ]
}

/// Writes all study files into `dir`, creating it if needed. On failure any
/// files already written by this call are removed.
pub fn write_results(dir: &Path, results: &[ScenarioResult]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let outcome = write_all(dir, results, &mut written);
    if outcome.is_err() {
        for path in &written {
            let _ = fs::remove_file(path);
        }
    }
    outcome.map(|_| written)
}

fn write_all(dir: &Path, results: &[ScenarioResult], written: &mut Vec<PathBuf>) -> Result<()> {
    let scen_dir = dir.join(SCENARIO_DIR);
    fs::create_dir_all(&scen_dir).map_err(|e| Error::io(&scen_dir, e))?;

    for r in results {
        let path = scen_dir.join(format!("{}.csv", r.scenario.label));
        written.push(path.clone());
        let mut w = writer(&path)?;
        w.write_record(SCENARIO_HEADER)
            .map_err(|e| csv_err(&path, e))?;
        for i in 0..r.replications {
            w.write_record([
                i.to_string(),
                r.brier_samples[i].to_string(),
                r.cil_samples[i].to_string(),
                r.gap_samples[i].to_string(),
                u8::from(r.exceeded[i]).to_string(),
                r.ybar_samples[i].to_string(),
            ])
            .map_err(|e| csv_err(&path, e))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    }

    let path = dir.join(MANIFEST_FILE);
    written.push(path.clone());
    let mut w = writer(&path)?;
    w.write_record(MANIFEST_HEADER)
        .map_err(|e| csv_err(&path, e))?;
    for r in results {
        w.write_record([
            r.scenario.label.clone(),
            r.scenario.true_dist.to_string(),
            r.scenario.transform.to_string(),
            r.scenario.n.to_string(),
            r.replications.to_string(),
            r.seed.to_string(),
        ])
        .map_err(|e| csv_err(&path, e))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = dir.join(SUMMARY_FILE);
    written.push(path.clone());
    let mut w = writer(&path)?;
    w.write_record(SUMMARY_HEADER)
        .map_err(|e| csv_err(&path, e))?;
    for r in results {
        for (metric, s) in summary_rows(r) {
            w.write_record([
                r.scenario.label.clone(),
                r.scenario.n.to_string(),
                metric.to_owned(),
                s.median.to_string(),
                s.q05.to_string(),
                s.q95.to_string(),
                s.mean.to_string(),
                r.exceed_probability().to_string(),
            ])
            .map_err(|e| csv_err(&path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))
}

/// Opens a CSV file and checks its header against `expected`.
fn reader(path: &Path, expected: &[&str]) -> Result<csv::Reader<fs::File>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let headers = r.headers().map_err(|e| csv_err(path, e))?;
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!(
                "header `{}` does not match expected `{}`",
                headers.iter().collect::<Vec<_>>().join(","),
                expected.join(",")
            ),
        });
    }
    Ok(r)
}

fn field<T: std::str::FromStr>(
    path: &Path,
    record: &csv::StringRecord,
    idx: usize,
    name: &str,
) -> Result<T> {
    let line = record.position().map_or(0, |p| p.line() as usize);
    let raw = record.get(idx).unwrap_or("");
    raw.parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("column `{name}`: cannot parse `{raw}`"),
    })
}

pub fn read_scenario_csv(path: &Path) -> Result<Vec<ReplicationRow>> {
    let mut r = reader(path, &SCENARIO_HEADER)?;
    let mut rows = Vec::new();
    for record in r.records() {
        let rec = record.map_err(|e| csv_err(path, e))?;
        let exceeded: u8 = field(path, &rec, 4, "exceeded")?;
        rows.push(ReplicationRow {
            rep: field(path, &rec, 0, "rep")?,
            brier: field(path, &rec, 1, "brier")?,
            cil: field(path, &rec, 2, "cil")?,
            gap: field(path, &rec, 3, "gap")?,
            exceeded: exceeded == 1,
            ybar: field(path, &rec, 5, "ybar")?,
        });
    }
    if rows.is_empty() {
        return Err(Error::Empty("scenario file"));
    }
    Ok(rows)
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = reader(path, &SUMMARY_HEADER)?;
    r.records()
        .map(|record| {
            let rec = record.map_err(|e| csv_err(path, e))?;
            Ok(SummaryRow {
                scenario: field(path, &rec, 0, "scenario")?,
                n: field(path, &rec, 1, "n")?,
                metric: field(path, &rec, 2, "metric")?,
                summary: Summary {
                    median: field(path, &rec, 3, "median")?,
                    q05: field(path, &rec, 4, "q05")?,
                    q95: field(path, &rec, 5, "q95")?,
                    mean: field(path, &rec, 6, "mean")?,
                },
                exceed_prob: field(path, &rec, 7, "exceed_prob")?,
            })
        })
        .collect()
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let mut r = reader(path, &MANIFEST_HEADER)?;
    r.records()
        .map(|record| {
            let rec = record.map_err(|e| csv_err(path, e))?;
            Ok(ManifestRow {
                scenario: field(path, &rec, 0, "scenario")?,
                dgm: field(path, &rec, 1, "dgm")?,
                transform: field(path, &rec, 2, "transform")?,
                n: field(path, &rec, 3, "n")?,
                reps: field(path, &rec, 4, "reps")?,
                seed: field(path, &rec, 5, "seed")?,
            })
        })
        .collect()
}

impl ReplicationRow {
    /// Recomputes the summary of one column from persisted rows.
    pub fn summarize_column(
        rows: &[ReplicationRow],
        column: impl Fn(&ReplicationRow) -> f64,
    ) -> Result<Summary> {
        summarize(&rows.iter().map(column).collect::<Vec<_>>())
    }
}
