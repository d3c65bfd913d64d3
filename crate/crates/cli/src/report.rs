//! Figures from a results directory written by `simulate`.
//!
//! | figure | scenarios               | content                          |
//! |--------|-------------------------|----------------------------------|
//! | 1      | n = 1000, perfect + U±0.1 | Brier violins                  |
//! | 2      | n = 300, every transform | Brier and CIL violins           |
//! | 3      | n = 300, perfect         | gap violins (reference − BS)     |
//! | 4      | n = 300, perfect         | P(BS > reference) bars           |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use brier_core::engine::{
    read_manifest, read_scenario_csv, read_summary, ManifestRow, ReplicationRow, Summary,
    MANIFEST_FILE, SCENARIO_DIR, SUMMARY_FILE,
};

use crate::error::{CliError, CliResult};
use crate::plot::{render_bars, render_violins, Bar, Panel, Violin};

const GRID_POINTS: usize = 128;
const PERFECT: &str = "perfect";
const UNIFORM_NOISE: &str = "unifnoise_0.1";

type Column = fn(&ReplicationRow) -> f64;

/// One manifest entry split into its label parts.
#[derive(Debug, Clone)]
struct Entry {
    row: ManifestRow,
    dgm_key: String,
    transform_key: String,
}

fn parse_label(label: &str) -> Option<(String, String, usize)> {
    let mut parts = label.rsplitn(3, "__");
    let n = parts.next()?.strip_prefix('n')?.parse().ok()?;
    let transform = parts.next()?.to_owned();
    let dgm = parts.next()?.to_owned();
    Some((dgm, transform, n))
}

struct Study {
    dir: std::path::PathBuf,
    entries: Vec<Entry>,
    summaries: BTreeMap<(String, String), Summary>,
}

impl Study {
    fn load(dir: &Path) -> CliResult<Self> {
        let manifest = dir.join(MANIFEST_FILE);
        let summary = dir.join(SUMMARY_FILE);
        if !manifest.is_file() || !summary.is_file() {
            return Err(CliError::Missing(format!(
                "{} does not contain {MANIFEST_FILE} and {SUMMARY_FILE}; run `brier simulate` first",
                dir.display()
            )));
        }
        let entries = read_manifest(&manifest)?
            .into_iter()
            .map(|row| {
                let (dgm_key, transform_key, n) = parse_label(&row.scenario).ok_or_else(|| {
                    CliError::Usage(format!(
                        "{}: malformed scenario label `{}`",
                        manifest.display(),
                        row.scenario
                    ))
                })?;
                if n != row.n {
                    return Err(CliError::Usage(format!(
                        "{}: scenario `{}` has n = {} in its label but {} in the manifest",
                        manifest.display(),
                        row.scenario,
                        n,
                        row.n
                    )));
                }
                Ok(Entry {
                    row,
                    dgm_key,
                    transform_key,
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        if entries.is_empty() {
            return Err(CliError::Missing(format!(
                "{} lists no scenarios",
                manifest.display()
            )));
        }
        let summaries = read_summary(&summary)?
            .into_iter()
            .map(|r| ((r.scenario, r.metric), r.summary))
            .collect();
        Ok(Self {
            dir: dir.to_path_buf(),
            entries,
            summaries,
        })
    }

    /// Distribution keys in manifest order, each with its display name.
    fn dgms(&self) -> Vec<(String, String)> {
        let mut seen = Vec::<(String, String)>::new();
        for e in &self.entries {
            if !seen.iter().any(|(k, _)| *k == e.dgm_key) {
                seen.push((e.dgm_key.clone(), e.row.dgm.clone()));
            }
        }
        seen
    }

    fn transforms(&self) -> Vec<(String, String)> {
        let mut seen = Vec::<(String, String)>::new();
        for e in &self.entries {
            if !seen.iter().any(|(k, _)| *k == e.transform_key) {
                seen.push((e.transform_key.clone(), e.row.transform.clone()));
            }
        }
        seen
    }

    /// Looks up every `(dgm, transform)` at `n`, listing all absent labels at once.
    fn select(&self, n: usize, transforms: &[String]) -> CliResult<Vec<&Entry>> {
        let mut found = Vec::new();
        let mut missing = Vec::new();
        for (dgm, _) in self.dgms() {
            for t in transforms {
                match self
                    .entries
                    .iter()
                    .find(|e| e.dgm_key == dgm && e.transform_key == *t && e.row.n == n)
                {
                    Some(e) => found.push(e),
                    None => missing.push(format!("{dgm}__{t}__n{n}")),
                }
            }
        }
        if missing.is_empty() {
            Ok(found)
        } else {
            Err(CliError::Missing(format!(
                "figure needs {}",
                missing.join(", ")
            )))
        }
    }

    /// Reads one scenario file and checks its summaries against `summary.csv`.
    fn rows(&self, entry: &Entry) -> CliResult<Vec<ReplicationRow>> {
        let path = self
            .dir
            .join(SCENARIO_DIR)
            .join(format!("{}.csv", entry.row.scenario));
        if !path.is_file() {
            return Err(CliError::Missing(format!("{}", path.display())));
        }
        let rows = read_scenario_csv(&path)?;
        if rows.len() != entry.row.reps {
            return Err(CliError::Usage(format!(
                "{}: {} rows but the manifest records {} replications",
                path.display(),
                rows.len(),
                entry.row.reps
            )));
        }
        let columns: [(&str, Column); 3] = [
            ("brier", |r| r.brier),
            ("cil", |r| r.cil),
            ("gap", |r| r.gap),
        ];
        for (metric, column) in columns {
            let recomputed = ReplicationRow::summarize_column(&rows, column)?;
            match self
                .summaries
                .get(&(entry.row.scenario.clone(), metric.to_owned()))
            {
                Some(s) if *s == recomputed => {}
                Some(_) => {
                    return Err(CliError::Usage(format!(
                        "{SUMMARY_FILE} disagrees with {} for metric {metric}",
                        path.display()
                    )))
                }
                None => {
                    return Err(CliError::Missing(format!(
                        "{SUMMARY_FILE} has no {metric} row for {}",
                        entry.row.scenario
                    )))
                }
            }
        }
        Ok(rows)
    }
}

fn slot_label(entry: &Entry, with_transform: bool) -> String {
    if with_transform {
        format!("{} {}", entry.row.dgm, entry.row.transform)
    } else {
        entry.row.dgm.clone()
    }
}

const VIOLIN_HEADER: &str = "panel,slot,scenario,label,n,reps,median,q05,q95,mean,bandwidth";

fn violin_csv_row(out: &mut String, panel: &str, slot: usize, entry: &Entry, v: &Violin) {
    let s = &v.summary;
    let _ = writeln!(
        out,
        "{panel},{slot},{},\"{}\",{},{},{:.6},{:.6},{:.6},{:.6},{:.6}",
        entry.row.scenario,
        v.label.replace('"', "\"\""),
        entry.row.n,
        entry.row.reps,
        s.median,
        s.q05,
        s.q95,
        s.mean,
        v.bandwidth
    );
}

struct Figure {
    svg: String,
    csv: String,
}

fn violin_figure(
    study: &Study,
    title: &str,
    entries: &[&Entry],
    metrics: &[(&str, &str, Column, Option<f64>)],
    with_transform: bool,
) -> CliResult<Figure> {
    let data = entries
        .iter()
        .map(|e| study.rows(e))
        .collect::<CliResult<Vec<_>>>()?;
    let mut csv = format!("{VIOLIN_HEADER}\n");
    let mut panels = Vec::new();
    for &(metric, y_label, column, reference) in metrics {
        let mut violins = Vec::new();
        for (slot, (entry, rows)) in entries.iter().zip(&data).enumerate() {
            let samples: Vec<f64> = rows.iter().map(column).collect();
            let v = Violin::new(slot_label(entry, with_transform), &samples, GRID_POINTS)?;
            violin_csv_row(&mut csv, metric, slot, entry, &v);
            violins.push(v);
        }
        panels.push(Panel {
            title: format!("{y_label}, n = {}", entries[0].row.n),
            y_label: y_label.to_owned(),
            violins,
            reference,
        });
    }
    Ok(Figure {
        svg: render_violins(title, &panels),
        csv,
    })
}

fn figure1(study: &Study) -> CliResult<Figure> {
    let entries = study.select(1000, &[PERFECT.to_owned(), UNIFORM_NOISE.to_owned()])?;
    violin_figure(
        study,
        "Brier score: perfect vs noisy predictions, n = 1000",
        &entries,
        &[("brier", "Brier score", |r| r.brier, None)],
        true,
    )
}

fn figure2(study: &Study) -> CliResult<Figure> {
    let transforms: Vec<String> = study.transforms().into_iter().map(|(k, _)| k).collect();
    let entries = study.select(300, &transforms)?;
    violin_figure(
        study,
        "Brier score and calibration-in-the-large across predictors, n = 300",
        &entries,
        &[
            ("brier", "Brier score", |r| r.brier, None),
            ("cil", "CIL", |r| r.cil, Some(0.0)),
        ],
        true,
    )
}

fn figure3(study: &Study) -> CliResult<Figure> {
    let entries = study.select(300, &[PERFECT.to_owned()])?;
    violin_figure(
        study,
        "Reference score minus Brier score of the perfect predictor, n = 300",
        &entries,
        &[("gap", "reference - BS", |r| r.gap, Some(0.0))],
        false,
    )
}

fn figure4(study: &Study) -> CliResult<Figure> {
    let entries = study.select(300, &[PERFECT.to_owned()])?;
    let mut csv =
        String::from("slot,scenario,label,n,reps,exceed_count,exceed_prob,standard_error\n");
    let mut bars = Vec::new();
    for (slot, entry) in entries.iter().enumerate() {
        let rows = study.rows(entry)?;
        let count = rows.iter().filter(|r| r.exceeded).count();
        let p = count as f64 / rows.len() as f64;
        let se = (p * (1.0 - p) / rows.len() as f64).sqrt();
        let label = slot_label(entry, false);
        let _ = writeln!(
            csv,
            "{slot},{},\"{}\",{},{},{count},{p:.6},{se:.6}",
            entry.row.scenario,
            label.replace('"', "\"\""),
            entry.row.n,
            entry.row.reps
        );
        bars.push(Bar {
            label,
            value: p,
            error: se,
        });
    }
    Ok(Figure {
        svg: render_bars(
            "P(perfect predictor scores worse than the incidence reference), n = 300",
            "exceedance probability",
            &bars,
        ),
        csv,
    })
}

/// Renders figure `figure` (1-4) from `results` into `out` as
/// `figure<k>.svg` plus the plotted numbers in `figure<k>.csv`.
pub fn run(results: &Path, figure: u8, out: &Path) -> CliResult<()> {
    let study = Study::load(results)?;
    let fig = match figure {
        1 => figure1(&study)?,
        2 => figure2(&study)?,
        3 => figure3(&study)?,
        4 => figure4(&study)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown figure {other}; expected 1-4"
            )))
        }
    };
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    for (ext, body) in [("svg", &fig.svg), ("csv", &fig.csv)] {
        let path = out.join(format!("figure{figure}.{ext}"));
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
    }
    eprintln!(
        "wrote {}",
        out.join(format!("figure{figure}.svg")).display()
    );
    Ok(())
}
