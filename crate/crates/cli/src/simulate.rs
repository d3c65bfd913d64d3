use std::path::{Path, PathBuf};
use std::time::Instant;

use brier_core::engine::{run_study, write_results, StudyConfig};
use brier_core::exec::Executor;

use crate::error::{CliError, CliResult};
use crate::Preset;

#[derive(Debug, Clone)]
pub struct SimulateArgs {
    pub config: Option<PathBuf>,
    pub preset: Preset,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub reps: Option<usize>,
    pub sample_sizes: Vec<usize>,
    pub out: PathBuf,
    pub quiet: bool,
}

const MISCONCEPTIONS_TOML: &str = include_str!("../../../configs/misconceptions.toml");

fn load_config(args: &SimulateArgs) -> CliResult<(StudyConfig, PathBuf)> {
    match &args.config {
        Some(path) => {
            let cfg = StudyConfig::from_path(path)?;
            let base = path
                .parent()
                .map_or_else(|| PathBuf::from("."), Path::to_path_buf);
            Ok((cfg, base))
        }
        None => {
            let cfg = match args.preset {
                Preset::Paper => StudyConfig::paper_preset(),
                Preset::Misconceptions => StudyConfig::from_toml_str(MISCONCEPTIONS_TOML)?,
            };
            Ok((cfg, PathBuf::from(".")))
        }
    }
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let (mut cfg, base) = load_config(args)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(reps) = args.reps {
        cfg.replications = reps;
    }
    if args.workers == Some(0) {
        return Err(CliError::Usage("--workers must be >= 1".into()));
    }
    let mut plan = cfg.resolve(&base)?;
    if !args.sample_sizes.is_empty() {
        plan.restrict_sample_sizes(&args.sample_sizes);
        if plan.scenarios.is_empty() {
            return Err(CliError::Usage(format!(
                "no scenario has sample size in {:?}; config lists {:?}",
                args.sample_sizes, cfg.sample_sizes
            )));
        }
    }

    let executor = Executor::new(args.workers);
    let total = plan.scenarios.len();
    let started = Instant::now();
    if !args.quiet {
        eprintln!(
            "study `{}`: {total} scenarios x {} replications, seed {}",
            plan.name, plan.replications, plan.seed
        );
    }
    let results = run_study(&plan, &executor, |i, r| {
        if !args.quiet {
            eprintln!(
                "[{:>3}/{total}] {:<45} median BS {:.4}  P(exceed) {:.4}",
                i + 1,
                r.scenario.label,
                r.brier_summary.median,
                r.exceed_probability()
            );
        }
    })?;
    let files = write_results(&args.out, &results)?;
    if !args.quiet {
        eprintln!(
            "wrote {} files to {} in {:.1}s",
            files.len(),
            args.out.display(),
            started.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
