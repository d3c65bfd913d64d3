use brier_core::analytic::{
    clt_normal_approx, expected_bs, expected_bs_perfect_single, expected_bs_single, jensen_bound,
    perfect_bs_lower_bound, perturb_difference, shift_difference, Direction, PerturbationSpec,
    TrueProbabilityVector,
};
use brier_core::scoring::PredictionVector;

use crate::error::{CliError, CliResult};
use crate::{DirectionArg, Mode};

#[derive(Debug, Clone, Default)]
pub struct ExpectArgs {
    pub p1: Option<f64>,
    pub q1: Option<f64>,
    pub eps: Option<f64>,
    pub direction: DirectionArg,
    pub p: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub mode: Option<Mode>,
}

fn need<T: Copy>(value: Option<T>, flag: &str, mode: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("--mode {mode} requires {flag}")))
}

/// The true probability vector from `--q`, or `--q1` repeated `--n` times.
fn truth(args: &ExpectArgs) -> CliResult<Option<TrueProbabilityVector>> {
    Ok(match (&args.q, args.q1, args.n) {
        (Some(q), _, _) => Some(TrueProbabilityVector::new(q.clone())?),
        (None, Some(q1), Some(n)) => Some(TrueProbabilityVector::constant(q1, n)?),
        _ => None,
    })
}

/// Predictions from `--p`, `--p1` repeated, or the perfect prediction.
fn predictions(args: &ExpectArgs, q: &TrueProbabilityVector) -> CliResult<PredictionVector> {
    Ok(match (&args.p, args.p1) {
        (Some(p), _) => PredictionVector::new(p.clone())?,
        (None, Some(p1)) if args.q.is_none() => PredictionVector::constant(p1, q.len())?,
        _ => q.as_prediction(),
    })
}

fn eval(mode: Mode, args: &ExpectArgs, lines: &mut Vec<(String, String)>) -> CliResult<()> {
    fn push(lines: &mut Vec<(String, String)>, k: &str, v: f64) {
        lines.push((k.to_owned(), v.to_string()));
    }
    match mode {
        Mode::G => match (args.p1, args.q1, &args.p, &args.q) {
            (Some(p1), Some(q1), _, None) => push(lines, "g", expected_bs_single(p1, q1)?),
            (_, _, Some(p), Some(q)) => push(
                lines,
                "expected_bs",
                expected_bs(
                    &PredictionVector::new(p.clone())?,
                    &TrueProbabilityVector::new(q.clone())?,
                )?,
            ),
            _ => {
                return Err(CliError::Usage(
                    "--mode g requires --p1 and --q1 (or --p and --q)".into(),
                ))
            }
        },
        Mode::F => match (&args.q, args.q1) {
            (Some(q), _) => {
                let q = TrueProbabilityVector::new(q.clone())?;
                push(
                    lines,
                    "expected_bs_perfect",
                    expected_bs(&q.as_prediction(), &q)?,
                );
            }
            (None, Some(q1)) => push(lines, "f", expected_bs_perfect_single(q1)?),
            _ => return Err(CliError::Usage("--mode f requires --q1 (or --q)".into())),
        },
        Mode::Shift => {
            let q1 = need(args.q1, "--q1", "shift")?;
            let eps = need(args.eps, "--eps", "shift")?;
            let direction = match args.direction {
                DirectionArg::Plus => Direction::Plus,
                DirectionArg::Minus => Direction::Minus,
            };
            push(
                lines,
                "shift_difference",
                shift_difference(q1, PerturbationSpec::new(eps, direction)?)?,
            );
        }
        Mode::Perturb => {
            let eps = need(args.eps, "--eps", "perturb")?;
            push(
                lines,
                "perturb_difference",
                perturb_difference(PerturbationSpec::plus(eps)?),
            );
        }
        Mode::Jensen => {
            let q = truth(args)?.ok_or_else(|| {
                CliError::Usage("--mode jensen requires --q (or --q1 with --n)".into())
            })?;
            let b = jensen_bound(&q);
            push(lines, "jensen_bound", b.bound);
            lines.push(("jensen_tight".into(), b.tight.to_string()));
            lines.push((
                "expected_bs_perfect".into(),
                expected_bs(&q.as_prediction(), &q)?.to_string(),
            ));
            lines.push((
                "perfect_bs_lower_bound".into(),
                perfect_bs_lower_bound(&q).to_string(),
            ));
        }
        Mode::Clt => {
            let q = truth(args)?.ok_or_else(|| {
                CliError::Usage("--mode clt requires --q (or --q1 with --n)".into())
            })?;
            let p = predictions(args, &q)?;
            let s = clt_normal_approx(&p, &q)?;
            push(lines, "clt_mean", s.mean);
            push(lines, "clt_term_variance", s.variance);
            lines.push(("clt_n".into(), s.n.to_string()));
            push(lines, "clt_sd_of_mean", s.sd_of_mean);
        }
    }
    Ok(())
}

fn applicable(args: &ExpectArgs) -> Vec<Mode> {
    let has_q = args.q.is_some() || (args.q1.is_some() && args.n.is_some());
    let mut modes = Vec::new();
    if (args.p1.is_some() && args.q1.is_some() && args.q.is_none())
        || (args.p.is_some() && args.q.is_some())
    {
        modes.push(Mode::G);
    }
    if args.q1.is_some() || args.q.is_some() {
        modes.push(Mode::F);
    }
    if let (Some(q1), Some(eps)) = (args.q1, args.eps) {
        let ok = match args.direction {
            DirectionArg::Plus => q1 + eps <= 0.5 + 1e-12,
            DirectionArg::Minus => q1 - eps >= 0.5 - 1e-12,
        };
        if ok {
            modes.push(Mode::Shift);
        }
    }
    if args.eps.is_some() {
        modes.push(Mode::Perturb);
    }
    if has_q {
        modes.push(Mode::Jensen);
        modes.push(Mode::Clt);
    }
    modes
}

pub fn render(args: &ExpectArgs) -> CliResult<String> {
    let modes = match args.mode {
        Some(m) => vec![m],
        None => applicable(args),
    };
    if modes.is_empty() {
        return Err(CliError::Usage(
            "nothing to evaluate: pass --p1/--q1, --eps, or --q (see --help)".into(),
        ));
    }
    let mut lines = Vec::new();
    for mode in modes {
        eval(mode, args, &mut lines)?;
    }
    let mut out = String::from("key,value\n");
    for (k, v) in lines {
        out.push_str(&format!("{k},{v}\n"));
    }
    Ok(out)
}

pub fn run(args: &ExpectArgs) -> CliResult<()> {
    print!("{}", render(args)?);
    Ok(())
}
