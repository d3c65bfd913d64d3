use std::io::Write;
use std::path::Path;

use brier_core::scoring::{read_pairs, DiagnoseOptions, ScoreReport};

use crate::error::{CliError, CliResult};
use crate::Format;

pub fn render(input: &Path, format: Format, delta: f64) -> CliResult<String> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(CliError::Usage(format!(
            "--delta must be a finite value >= 0, got {delta}"
        )));
    }
    let (p, y) = read_pairs(input)?;
    let options = DiagnoseOptions {
        near_reference_delta: delta,
        ..Default::default()
    };
    let report = ScoreReport::compute(&p, &y, &options)?;
    Ok(match format {
        Format::Csv => report.to_key_value(),
        Format::Json => report.to_json() + "\n",
    })
}

pub fn run(input: &Path, format: Format, delta: f64, out: Option<&Path>) -> CliResult<()> {
    let text = render(input, format, delta)?;
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}
