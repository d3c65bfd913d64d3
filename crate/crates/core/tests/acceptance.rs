//! Acceptance suite: one test per exit criterion, each printing a
//! `[PASS]`/`[FAIL]` line with the measured values before asserting.
//!
//! Run with `cargo test -p brier-core --test acceptance -- --nocapture` to
//! see the report lines.

use brier_core::analytic::{
    clt_normal_approx, effectiveness_compare, expected_bs, expected_bs_single, jensen_bound,
    perfect_bs_lower_bound, perturb_difference, shift_difference, squared_distance,
    EffectivenessOrder, PerturbationSpec, TrueProbabilityVector,
};
use brier_core::dgm::{synthesize_pool, PredictorTransformSpec, TrueDistributionSpec};
use brier_core::engine::{
    run_scenario, write_results, Scenario, ScenarioResult, StudyConfig, StudyPlan,
};
use brier_core::exec::Executor;
use brier_core::oracle::{exact_distribution, exact_exceedance_probability, exact_expected_bs};
use brier_core::scoring::{brier_score, cil, mae, rmse, OutcomeVector, PredictionVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_250_101;

fn report(id: &str, ok: bool, detail: impl AsRef<str>) {
    println!(
        "[{}] criterion {id}: {}",
        if ok { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ tag)
}

fn random_probs(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

fn scenario(dist: TrueDistributionSpec, transform: PredictorTransformSpec, n: usize) -> Scenario {
    Scenario::new(dist, transform, n).unwrap()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sd(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

#[test]
fn criterion_1_worked_examples() {
    let checks = [
        ("g(0.5,0.5)", expected_bs_single(0.5, 0.5).unwrap(), 0.25),
        ("g(0.1,0.1)", expected_bs_single(0.1, 0.1).unwrap(), 0.09),
        ("g(0,0.1)", expected_bs_single(0.0, 0.1).unwrap(), 0.1),
        (
            "g(0.25,0.1)",
            expected_bs_single(0.25, 0.1).unwrap(),
            0.1125,
        ),
        (
            "shift(0.1,+0.1)",
            shift_difference(0.1, PerturbationSpec::plus(0.1).unwrap()).unwrap(),
            0.07,
        ),
        (
            "perturb(0.1)",
            perturb_difference(PerturbationSpec::plus(0.1).unwrap()),
            0.01,
        ),
    ];
    let mut all = true;
    let mut detail = Vec::new();
    for (name, got, want) in checks {
        let ok = (got - want).abs() <= 1e-12;
        all &= ok;
        detail.push(format!("{name}={got}"));
    }
    report("1 worked-example exactness (1e-12)", all, detail.join(", "));
    assert!(all);
}

#[test]
fn criterion_2_oracle_equivalence() {
    let mut r = rng(2);
    let mut worst_mean = 0.0_f64;
    let mut worst_dist_mean = 0.0_f64;
    let mut worst_var = 0.0_f64;
    for _ in 0..200 {
        let n = r.random_range(1..=12);
        let p = PredictionVector::new(random_probs(&mut r, n)).unwrap();
        let q = TrueProbabilityVector::new(random_probs(&mut r, n)).unwrap();
        let analytic = expected_bs(&p, &q).unwrap();
        worst_mean = worst_mean.max((analytic - exact_expected_bs(&p, &q).unwrap()).abs());

        let dist = exact_distribution(&p, &q).unwrap();
        let clt = clt_normal_approx(&p, &q).unwrap();
        worst_dist_mean = worst_dist_mean.max((dist.mean() - clt.mean).abs());
        // Var(BS) = Σ var_i / n² = (average term variance) / n.
        worst_var = worst_var.max((dist.variance() - clt.variance / n as f64).abs());
    }
    let ok = worst_mean <= 1e-12 && worst_dist_mean <= 1e-12 && worst_var <= 1e-12;
    report(
        "2 oracle equivalence (200 cases, n<=12, 1e-12)",
        ok,
        format!("max |Δmean|={worst_mean:.2e}, max |Δdist mean|={worst_dist_mean:.2e}, max |Δvar|={worst_var:.2e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_3_expectations_by_simulation() {
    let exec = Executor::default();
    let n = 1000;
    let reps = 5000;
    let cases: [(&str, TrueDistributionSpec, PredictorTransformSpec, f64, f64); 4] = [
        (
            "constant(0.5)+perfect",
            TrueDistributionSpec::constant(0.5).unwrap(),
            PredictorTransformSpec::Perfect,
            0.25,
            0.005,
        ),
        (
            "two_point(0,1,0.5)+perfect",
            TrueDistributionSpec::two_point(0.0, 1.0, 0.5).unwrap(),
            PredictorTransformSpec::Perfect,
            0.0,
            0.0,
        ),
        (
            "uniform(0,1)+perfect",
            TrueDistributionSpec::uniform(0.0, 1.0).unwrap(),
            PredictorTransformSpec::Perfect,
            1.0 / 6.0,
            0.005,
        ),
        (
            "uniform(0,1)+uniform_noise(0.1)",
            TrueDistributionSpec::uniform(0.0, 1.0).unwrap(),
            PredictorTransformSpec::UniformNoise { half_width: 0.1 },
            0.17,
            0.005,
        ),
    ];
    let mut all = true;
    for (name, dist, transform, target, tol) in cases {
        let r = run_scenario(&scenario(dist, transform, n), reps, SEED, &exec).unwrap();
        let m = r.brier_summary.mean;
        let ok = if tol == 0.0 {
            r.brier_samples.iter().all(|&b| b == 0.0)
        } else {
            (m - target).abs() <= tol
        };
        all &= ok;
        let extra = if name.ends_with("uniform_noise(0.1)") {
            // Unclamped expectation is 1/6 + 0.1²/3; clamping at 0 and 1 pulls it down.
            format!(
                " (unclamped 1/6+0.01/3={:.6}, offset {:+.6})",
                1.0 / 6.0 + 0.01 / 3.0,
                m - (1.0 / 6.0 + 0.01 / 3.0)
            )
        } else {
            String::new()
        };
        report(
            &format!("3 {name}, n=1000, N=5000"),
            ok,
            format!("mean brier {m:.6}, target {target:.6} ± {tol}{extra}"),
        );
    }
    assert!(all);
}

#[test]
fn criterion_4_exceedance_nonzero_and_matches_oracle() {
    let exec = Executor::default();
    let half = TrueDistributionSpec::constant(0.5).unwrap();

    let r300 = run_scenario(
        &scenario(half.clone(), PredictorTransformSpec::Perfect, 300),
        5000,
        SEED,
        &exec,
    )
    .unwrap();
    let ok300 = r300.exceed_probability() > 0.0;
    report(
        "4a constant(0.5)+perfect n=300 P(BS_perf > ȳ-ȳ²) > 0",
        ok300,
        format!(
            "estimate {:.4} ({} of 5000)",
            r300.exceed_probability(),
            r300.exceed_count
        ),
    );

    let check_small = |label: &str, result: &ScenarioResult, exact: f64| {
        let est = result.exceed_probability();
        let se = result.exceed_standard_error();
        let ok = (est - exact).abs() <= 3.0 * se;
        report(
            label,
            ok,
            format!(
                "estimate {est:.4}, exact {exact:.4}, |Δ|={:.4}, 3·SE={:.4}",
                (est - exact).abs(),
                3.0 * se
            ),
        );
        ok
    };

    let r10 = run_scenario(
        &scenario(half, PredictorTransformSpec::Perfect, 10),
        5000,
        SEED,
        &exec,
    )
    .unwrap();
    let exact10 =
        exact_exceedance_probability(&TrueProbabilityVector::constant(0.5, 10).unwrap()).unwrap();
    let ok10 = check_small(
        "4b constant(0.5) n=10 analog within 3 SE of exact",
        &r10,
        exact10,
    );

    // Heterogeneous analog: a 10-value pool subsampled without replacement
    // at n = 10 is a permutation of the pool, and exceedance is
    // permutation-invariant, so the exact value applies to every replication.
    let pool_values = vec![0.05, 0.12, 0.2, 0.33, 0.41, 0.5, 0.58, 0.7, 0.86, 0.95];
    let pool =
        brier_core::dgm::EmpiricalProbabilityPool::new("fixed10", pool_values.clone()).unwrap();
    let rfix = run_scenario(
        &scenario(
            TrueDistributionSpec::empirical(pool),
            PredictorTransformSpec::Perfect,
            10,
        ),
        5000,
        SEED,
        &exec,
    )
    .unwrap();
    let exact_fix =
        exact_exceedance_probability(&TrueProbabilityVector::new(pool_values).unwrap()).unwrap();
    let okfix = check_small(
        "4c heterogeneous n=10 analog within 3 SE of exact",
        &rfix,
        exact_fix,
    );

    assert!(ok300 && ok10 && okfix);
}

#[test]
fn criterion_5_gap_quantiles_uniform_perfect_n300() {
    let r = run_scenario(
        &scenario(
            TrueDistributionSpec::uniform(0.0, 1.0).unwrap(),
            PredictorTransformSpec::Perfect,
            300,
        ),
        5000,
        SEED,
        &Executor::default(),
    )
    .unwrap();
    let s = r.gap_summary;
    let ok = s.median < 0.01 && s.q05 < 0.005;
    report(
        "5 uniform(0,1)+perfect n=300: median(gap) < 0.01 and q05(gap) < 0.005",
        ok,
        format!(
            "median {:.5}, q05 {:.5}, q95 {:.5}; closed form E[gap] = 1/12 - 1/(4n) = {:.5}",
            s.median,
            s.q05,
            s.q95,
            1.0 / 12.0 - 1.0 / 1200.0
        ),
    );
    assert!(
        ok,
        "gap median {} / q05 {} exceed the stated thresholds",
        s.median, s.q05
    );
}

#[test]
fn criterion_6_property_suites() {
    let mut r = rng(6);
    let cases = 1000;

    // Strict propriety.
    let mut propriety = true;
    for _ in 0..cases {
        let n = r.random_range(1..=50);
        let q = TrueProbabilityVector::new(random_probs(&mut r, n)).unwrap();
        let p = PredictionVector::new(random_probs(&mut r, n)).unwrap();
        if p.values() != q.values() {
            propriety &=
                expected_bs(&q.as_prediction(), &q).unwrap() < expected_bs(&p, &q).unwrap();
        }
    }
    report(
        "6a strict propriety (1000 cases)",
        propriety,
        "E[BS(q)] < E[BS(p)] whenever p ≠ q",
    );

    // Effectiveness: ℓ₂ order equals expected-score order.
    let mut effective = true;
    for _ in 0..cases {
        let n = r.random_range(1..=50);
        let q = TrueProbabilityVector::new(random_probs(&mut r, n)).unwrap();
        let p = PredictionVector::new(random_probs(&mut r, n)).unwrap();
        let p2 = PredictionVector::new(random_probs(&mut r, n)).unwrap();
        let dl2 =
            squared_distance(p.values(), q.values()) - squared_distance(p2.values(), q.values());
        let dbs = expected_bs(&p, &q).unwrap() - expected_bs(&p2, &q).unwrap();
        let order = effectiveness_compare(&p, &p2, &q).unwrap();
        let expected_order = if dbs < 0.0 {
            EffectivenessOrder::FirstBetter
        } else {
            EffectivenessOrder::SecondBetter
        };
        effective &= dl2.signum() == dbs.signum() && order == expected_order;
    }
    report(
        "6b ℓ₂ effectiveness ordering (1000 cases)",
        effective,
        "sign(Δℓ₂) = sign(ΔE[BS])",
    );

    // Inequality chains on observed data.
    let mut chains = true;
    for _ in 0..cases {
        let n = r.random_range(1..=100);
        let p = PredictionVector::new(random_probs(&mut r, n)).unwrap();
        let y = OutcomeVector::new((0..n).map(|_| u8::from(r.random::<bool>())).collect()).unwrap();
        let (c, m, rm, b) = (
            cil(&p, &y).unwrap(),
            mae(&p, &y).unwrap(),
            rmse(&p, &y).unwrap(),
            brier_score(&p, &y).unwrap(),
        );
        chains &=
            c <= m + 1e-15 && m <= rm + 1e-15 && b <= m + 1e-15 && (b - rm * rm).abs() <= 1e-12;
    }
    report(
        "6c CIL <= MAE <= RMSE and Brier <= MAE (1000 cases)",
        chains,
        "all chains hold",
    );

    // Jensen bound with tightness iff constant.
    let mut jensen = true;
    for i in 0..cases {
        let n = r.random_range(1..=40);
        let values = if i % 4 == 0 {
            vec![r.random::<f64>(); n]
        } else {
            random_probs(&mut r, n)
        };
        let constant = values.iter().all(|&v| v == values[0]);
        let q = TrueProbabilityVector::new(values).unwrap();
        let b = jensen_bound(&q);
        let e = expected_bs(&q.as_prediction(), &q).unwrap();
        jensen &= e <= b.bound + 1e-15 && b.tight == constant;
        if constant {
            jensen &= (e - b.bound).abs() <= 1e-12;
        }
    }
    report(
        "6d Jensen bound, tight iff q constant (1000 cases)",
        jensen,
        "E[BS(q,q)] <= q̄-q̄²",
    );

    // Lower bound under every enumerated realization.
    let mut lower = true;
    for _ in 0..cases {
        let n = r.random_range(1..=12);
        let mut values = random_probs(&mut r, n);
        // Mix in degenerate coordinates; keep at least one interior value.
        for v in values.iter_mut().skip(1) {
            if r.random::<f64>() < 0.3 {
                *v = f64::from(u8::from(r.random::<bool>()));
            }
        }
        let q = TrueProbabilityVector::new(values).unwrap();
        let bound = perfect_bs_lower_bound(&q);
        lower &= bound > 0.0;
        let p = q.as_prediction();
        for mask in 0u32..(1 << n) {
            let y = OutcomeVector::new((0..n).map(|i| (mask >> i & 1) as u8).collect()).unwrap();
            lower &= brier_score(&p, &y).unwrap() >= bound;
        }
    }
    report(
        "6e perfect_bs_lower_bound <= every realization (exhaustive, n<=12) and > 0",
        lower,
        "1000 random q with an interior coordinate",
    );

    assert!(propriety && effective && chains && jensen && lower);
}

#[test]
fn criterion_7_clt_standard_deviation() {
    let r = run_scenario(
        &scenario(
            TrueDistributionSpec::constant(0.1).unwrap(),
            PredictorTransformSpec::Perfect,
            300,
        ),
        5000,
        SEED,
        &Executor::default(),
    )
    .unwrap();
    let q = TrueProbabilityVector::constant(0.1, 300).unwrap();
    let approx = clt_normal_approx(&q.as_prediction(), &q).unwrap();
    let empirical = sd(&r.brier_samples);
    let rel = (empirical - approx.sd_of_mean).abs() / approx.sd_of_mean;
    let ok = rel <= 0.10;
    report(
        "7 CLT sd, constant(0.1)+perfect n=300 N=5000 (±10%)",
        ok,
        format!(
            "empirical sd {empirical:.5}, normal approx {:.5}, rel. diff {:.2}%",
            approx.sd_of_mean,
            100.0 * rel
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_8_reproducible_csv_across_worker_counts() {
    let mut cfg = StudyConfig::paper_preset();
    cfg.replications = 200;
    cfg.sample_sizes = vec![300];
    let plan: StudyPlan = cfg.resolve(std::path::Path::new(".")).unwrap();

    let run = |workers: usize| {
        let dir = tempfile::tempdir().unwrap();
        let results =
            brier_core::engine::run_study(&plan, &Executor::new(Some(workers)), |_, _| {}).unwrap();
        let files = write_results(dir.path(), &results).unwrap();
        let mut contents: Vec<(String, Vec<u8>)> = files
            .iter()
            .map(|f| {
                (
                    f.strip_prefix(dir.path()).unwrap().display().to_string(),
                    std::fs::read(f).unwrap(),
                )
            })
            .collect();
        contents.sort();
        contents
    };
    let one = run(1);
    let eight = run(8);
    let ok = one == eight && one.len() == 35 + 2;
    report(
        "8 byte-identical CSVs at 1 and 8 workers",
        ok,
        format!(
            "{} files compared (35 scenarios + manifest + summary)",
            one.len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_note_synthetic_pools() {
    let mut ok = true;
    let exec = Executor::default();
    for (label, target) in [
        ("osteoporosis_synthetic", 0.07),
        ("smoking_synthetic", 0.263),
    ] {
        let pool = synthesize_pool(label, target, 5000, 1.0, 11).unwrap();
        let incidence = pool.nominal_incidence();
        let within = (incidence - target).abs() <= 0.001;
        let r = run_scenario(
            &scenario(
                TrueDistributionSpec::empirical(pool),
                PredictorTransformSpec::Perfect,
                300,
            ),
            500,
            SEED,
            &exec,
        )
        .unwrap();
        let ybar = mean(&r.ybar_samples);
        ok &= within;
        report(
            &format!("note {label}: nominal incidence within ±0.001 of {target}"),
            within,
            format!("pool mean {incidence:.6}; mean ȳ over 500 reps at n=300: {ybar:.4}"),
        );
    }
    assert!(ok);
}
