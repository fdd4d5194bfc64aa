//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;

use common::{beta_integer_first, rel, tanh_sinh, trapezoid};
use sconvex::campaign::{self, CampaignConfig, CampaignOutcome, SRange};
use sconvex::certification::{self, FunctionClass, Resolution};
use sconvex::function_model::{random_convex_on, random_s_convex};
use sconvex::inequality::{eval_c29, eval_t1, eval_t2, eval_t3, proof_step_pointwise};
use sconvex::quadrature::{self, WeightKind};
use sconvex::special::{self, beta_fn, gamma_fn, BetaArgs};
use sconvex::{FunctionSpec, InequalityId, InequalityReport, Interval, Tolerances, Verdict};

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn beta(u: f64, v: f64) -> Result<f64, String> {
    beta_fn(BetaArgs::new(u, v).map_err(err)?).map_err(err)
}

fn certified_convex(
    seed: u64,
    complexity: u32,
    interval: &Interval,
) -> Result<FunctionSpec, String> {
    let f = random_convex_on(seed, complexity, interval).map_err(err)?;
    let verdict =
        certification::check_convex(&f, interval, Resolution::default(), seed).map_err(err)?;
    ensure!(
        verdict.passed(),
        "generated convex spec failed certification: {f}"
    );
    Ok(f)
}

fn certified_s_convex(
    seed: u64,
    s: f64,
    complexity: u32,
    interval: &Interval,
) -> Result<FunctionSpec, String> {
    let f = random_s_convex(seed, s, complexity).map_err(err)?;
    let verdict =
        certification::check_s_convex(&f, s, interval, Resolution::default(), seed).map_err(err)?;
    ensure!(
        verdict.passed(),
        "generated {s}-convex spec failed certification: {f}"
    );
    Ok(f)
}

const S_GRID: [f64; 5] = [0.1, 0.3, 0.5, 0.75, 1.0];
const UV_GRID: [f64; 5] = [0.3, 0.75, 1.0, 2.5, 4.2];

fn special_function_identities() -> Check {
    let mut worst_quad: f64 = 0.0;
    for &u in &UV_GRID {
        for &v in &UV_GRID {
            let (buv, bvu) = (beta(u, v)?, beta(v, u)?);
            ensure!(
                rel(buv, bvu) <= 1e-12,
                "β({u},{v}) = {buv} but β({v},{u}) = {bvu}"
            );
            let brute = tanh_sinh(|x, xc| x.powf(u - 1.0) * xc.powf(v - 1.0));
            worst_quad = worst_quad.max(rel(buv, brute));
            ensure!(
                rel(buv, brute) <= 1e-10,
                "β({u},{v}) = {buv}, defining integral {brute}"
            );
        }
    }
    for &s1 in &S_GRID {
        for &s2 in &S_GRID {
            let closed = special::beta_2_splus1(s2).map_err(err)?;
            let via_beta = beta(2.0, s2 + 1.0)?;
            ensure!(
                rel(closed, via_beta) <= 1e-12,
                "β(2,{s2}+1): {via_beta} vs {closed}"
            );

            let cross = special::beta_cross(s1, s2).map_err(err)?;
            let gammas = gamma_fn(s1 + 1.0).map_err(err)? * gamma_fn(s2 + 1.0).map_err(err)?
                / gamma_fn(s1 + s2 + 2.0).map_err(err)?;
            ensure!(
                rel(cross, gammas) <= 1e-12,
                "β({s1}+1,{s2}+1): {cross} vs Γ form {gammas}"
            );
            let brute = tanh_sinh(|x, xc| x.powf(s1) * xc.powf(s2));
            worst_quad = worst_quad.max(rel(cross, brute));
            ensure!(
                rel(cross, brute) <= 1e-10,
                "β({s1}+1,{s2}+1) = {cross}, integral {brute}"
            );
        }
    }
    Ok(format!(
        "worst quadrature relative difference {worst_quad:.1e}"
    ))
}

fn equality_battery() -> Check {
    let tol = Tolerances::default();
    let mut worst: f64 = 0.0;
    let mut track = |r: &InequalityReport, bound: f64| -> Result<(), String> {
        worst = worst.max(r.slack.abs());
        ensure!(
            r.slack.abs() <= bound,
            "{} slack {:e} exceeds ±{bound:e}",
            r.inequality_id,
            r.slack
        );
        Ok(())
    };

    for interval in [iv(0.0, 1.0), iv(0.5, 2.0), iv(0.0, 3.0)] {
        for (cf, cg) in [(1.0, 1.0), (2.5, 0.4), (0.0, 3.0)] {
            let (f, g) = (FunctionSpec::constant(cf), FunctionSpec::constant(cg));
            track(&eval_t1(&f, &g, &interval, &tol).map_err(err)?, 1e-9)?;
            track(&eval_c29(&f, &g, &interval, &tol).map_err(err)?, 1e-9)?;
            for s in [0.25, 0.5, 0.75, 1.0] {
                track(&eval_t2(&f, &g, s, &interval, &tol).map_err(err)?, 1e-9)?;
            }
        }
    }

    let unit = iv(0.0, 1.0);
    for k in 0..10u64 {
        let s = [0.25, 0.5, 0.75, 1.0][k as usize % 4];
        let f = FunctionSpec::affine(0.3 * k as f64 - 1.2, 0.5 + 0.1 * k as f64);
        let g = certified_s_convex(1000 + k, s, 1 + (k % 3) as u32, &unit)?;
        track(&eval_t2(&f, &g, s, &unit, &tol).map_err(err)?, 1e-8)?;
    }

    for k in 0..10u64 {
        let s = [0.25, 0.5, 0.75, 1.0][k as usize % 4];
        let interval = iv(0.0, 1.0 + 0.5 * k as f64);
        let gamma = 0.2 + 0.3 * k as f64;
        let g = FunctionSpec::power_s(0.0, gamma, 0.0, s);
        let f = certified_convex(2000 + k, 3, &interval)?;
        track(&eval_t2(&f, &g, s, &interval, &tol).map_err(err)?, 1e-8)?;
    }
    Ok(format!("max |slack| {worst:.1e}"))
}

fn closed_form_cases() -> Check {
    let tol = Tolerances::default();
    let unit = iv(0.0, 1.0);
    let xsq = FunctionSpec::polynomial([0.0, 0.0, 1.0]);
    let sqrt1 = FunctionSpec::power_s(1.0, 1.0, 1.0, 0.5);
    let one = FunctionSpec::constant(1.0);

    let t1 = eval_t1(&xsq, &xsq, &unit, &tol).map_err(err)?.slack;
    ensure!((t1 - 1.0 / 30.0).abs() <= 1e-9, "t1(x², x²) slack {t1}");
    let t2 = eval_t2(&xsq, &sqrt1, 0.5, &unit, &tol).map_err(err)?.slack;
    ensure!((t2 - 13.0 / 210.0).abs() <= 1e-8, "t2(x², √x+1) slack {t2}");
    let t3 = eval_t3(&one, 0.5, &one, 0.5, &unit, &tol)
        .map_err(err)?
        .slack;
    let t3_expected = 2.0 + PI / 4.0 - 8.0 / 3.0;
    ensure!(
        (t3 - t3_expected).abs() <= 1e-8,
        "t3(1, 1) slack {t3}, expected {t3_expected}"
    );
    let c29 = eval_c29(
        &FunctionSpec::affine(1.0, 0.0),
        &FunctionSpec::affine(-1.0, 1.0),
        &unit,
        &tol,
    )
    .map_err(err)?;
    ensure!(c29.slack == -1.0 / 12.0, "c29(x, 1−x) slack {}", c29.slack);
    ensure!(
        c29.verdict == Verdict::Violated,
        "c29 verdict {:?}",
        c29.verdict
    );
    Ok(format!(
        "errors t1 {:.0e}, t2 {:.0e}, t3 {:.0e}, c29 exact",
        (t1 - 1.0 / 30.0).abs(),
        (t2 - 13.0 / 210.0).abs(),
        (t3 - t3_expected).abs()
    ))
}

fn componentwise_gap(a: &InequalityReport, b: &InequalityReport) -> f64 {
    let mut gap = (a.lhs - b.lhs)
        .abs()
        .max((a.rhs - b.rhs).abs())
        .max((a.slack - b.slack).abs());
    for (key, value) in &a.terms {
        if let Some(other) = b.terms.get(key) {
            gap = gap.max((value - other).abs());
        }
    }
    gap
}

fn reductions_to_t1() -> Check {
    let tol = Tolerances::default();
    let mut worst: f64 = 0.0;
    for interval in [iv(0.0, 1.0), iv(0.5, 3.0)] {
        for k in 0..20u64 {
            let f = certified_convex(3000 + 2 * k, 3, &interval)?;
            let g = certified_convex(3001 + 2 * k, 3, &interval)?;
            let t1 = eval_t1(&f, &g, &interval, &tol).map_err(err)?;
            let t2 = eval_t2(&f, &g, 1.0, &interval, &tol).map_err(err)?;
            let t3 = eval_t3(&f, 1.0, &g, 1.0, &interval, &tol).map_err(err)?;
            for (name, other) in [("t2", &t2), ("t3", &t3)] {
                let gap = componentwise_gap(&t1, other);
                worst = worst.max(gap);
                ensure!(
                    gap <= 1e-8,
                    "{name} differs from t1 by {gap:e} on {interval} for f={f}, g={g}"
                );
            }
        }
    }
    Ok(format!("max componentwise gap {worst:.1e}"))
}

fn membership_fixtures() -> Check {
    let resolution = Resolution::default();
    let mut nonneg_checked = 0;
    for k in 0..20u32 {
        let a0 = 0.5 + 0.25 * (k % 4) as f64;
        let b_coef = 0.5 * (k % 5) as f64;
        let c_off = a0 * (k % 3) as f64 / 2.0;
        let s = 0.2 + 0.04 * k as f64;
        let interval = iv(0.0, 1.0 + (k % 3) as f64);
        let spec = FunctionSpec::power_s(a0, b_coef, c_off, s);
        let verdict = certification::check_s_convex(&spec, s, &interval, resolution, k as u64)
            .map_err(err)?;
        ensure!(
            verdict.passed(),
            "member {spec} on {interval} produced witness {:?}",
            verdict.witness
        );
        if s < 1.0 {
            let nn = certification::check_nonnegative(&spec, &interval, 257).map_err(err)?;
            ensure!(nn.passed(), "member {spec} failed nonnegativity");
            nonneg_checked += 1;
        }
    }
    for k in 0..20u32 {
        let a0 = 0.5 * (k % 4) as f64;
        let b_coef = 0.5 + 1.5 * (k % 5) as f64 / 4.0;
        let c_off = -0.05 - 0.95 * (k % 7) as f64 / 6.0;
        let s = 0.2 + 0.035 * k as f64;
        let interval = iv(0.0, 1.0 + (k % 3) as f64);
        let spec = FunctionSpec::power_s(a0, b_coef, c_off, s);
        let class = FunctionClass::SConvex { s };
        let verdict = certification::check_class(&spec, class, &interval, resolution, k as u64)
            .map_err(err)?;
        let witness = verdict
            .witness
            .ok_or_else(|| format!("non-member {spec} on {interval} produced no witness"))?;
        let recheck = witness.recheck(&spec, class).map_err(err)?;
        ensure!(
            recheck > 0.0,
            "witness for {spec} does not recheck: {recheck}"
        );
    }
    for k in 0..40u64 {
        let s = 0.1 + 0.85 * (k as f64) / 40.0;
        let interval = iv(0.0, 1.0 + (k % 4) as f64);
        let spec = certified_s_convex(4000 + k, s, 1 + (k % 4) as u32, &interval)?;
        let nn = certification::check_nonnegative(&spec, &interval, 257).map_err(err)?;
        ensure!(nn.passed(), "generated member {spec} failed nonnegativity");
        nonneg_checked += 1;
    }
    Ok(format!(
        "20 members, 20 non-members, {nonneg_checked} nonnegativity checks"
    ))
}

fn campaign_in_pool(config: &CampaignConfig, threads: usize) -> Result<CampaignOutcome, String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(err)?;
    pool.install(|| campaign::run_campaign(config)).map_err(err)
}

fn product_campaigns() -> Check {
    let mut summary = Vec::new();
    for id in [InequalityId::T1, InequalityId::T2, InequalityId::T3] {
        for interval in [iv(0.0, 1.0), iv(0.25, 2.0)] {
            let mut config = CampaignConfig::new(id, 10_000, 42, interval);
            config.s_range = SRange::new(0.1, 1.0).map_err(err)?;
            let first = campaign_in_pool(&config, 1)?;
            let r = &first.report;
            ensure!(
                r.samples_run == 10_000,
                "{id} on {interval}: ran {}",
                r.samples_run
            );
            ensure!(
                r.violations.is_empty() && r.inconclusive_count == 0,
                "{id} on {interval}: {} violations, {} inconclusive, min slack {:e}",
                r.violations.len(),
                r.inconclusive_count,
                r.min_slack
            );
            let second = campaign_in_pool(&config, 4)?;
            let (a, b) = (
                serde_json::to_string(&first.report).map_err(err)?,
                serde_json::to_string(&second.report).map_err(err)?,
            );
            ensure!(
                a == b,
                "{id} on {interval}: reports differ between 1 and 4 threads"
            );
            ensure!(
                first.to_csv() == second.to_csv(),
                "{id} on {interval}: rows differ"
            );
            let sample = r
                .min_slack_sample
                .as_ref()
                .ok_or("campaign recorded no minimum-slack sample")?;
            let replayed = campaign::replay(&sample.trial).map_err(err)?;
            ensure!(
                replayed.slack.to_bits() == r.min_slack.to_bits(),
                "{id} on {interval}: min-slack sample replays to {:e}, recorded {:e}",
                replayed.slack,
                r.min_slack
            );
            summary.push(format!("{id}{interval} min {:.1e}", r.min_slack));
        }
    }
    Ok(summary.join(", "))
}

fn exact_c29_slack(
    f: &FunctionSpec,
    g: &FunctionSpec,
    interval: &Interval,
) -> Result<BigRational, String> {
    let q = |x: f64| BigRational::from_float(x).ok_or_else(|| format!("non-finite value {x}"));
    let at = |h: &FunctionSpec, x: f64| h.evaluate(x).map_err(err).and_then(q);
    let (a, b, m) = (interval.a(), interval.b(), interval.midpoint());
    let (fa, fb, fm) = (at(f, a)?, at(f, b)?, at(f, m)?);
    let (ga, gb, gm) = (at(g, a)?, at(g, b)?, at(g, m)?);
    let two = q(2.0)?;
    let lhs = (&fa + &fb) / &two * &gm + (&ga + &gb) / &two * &fm;
    let rhs = &fm * &gm + (&fa * &ga + &fb * &gb) / q(3.0)? + (&fa * &gb + &fb * &ga) / q(6.0)?;
    Ok(rhs - lhs)
}

fn corollary_falsification() -> Check {
    let unit = iv(0.0, 1.0);
    let outcome = campaign::run_campaign(&CampaignConfig::new(InequalityId::C29, 1000, 42, unit))
        .map_err(err)?;
    let report = &outcome.report;
    ensure!(
        !report.violations.is_empty(),
        "no c29 violation in 1000 trials"
    );
    let affine_hits = report
        .violations
        .iter()
        .filter(|v| {
            v.trial.f.render().contains("affine")
                || v.trial.g.iter().any(|g| g.render().contains("affine"))
        })
        .count();
    ensure!(affine_hits > 0, "no violating trial uses the affine family");
    for record in &report.violations {
        let replayed = campaign::replay(&record.trial).map_err(err)?;
        ensure!(
            replayed == record.report,
            "trial {} does not replay identically",
            record.trial.index
        );
        ensure!(
            replayed.verdict == Verdict::Violated && replayed.slack < 0.0,
            "trial {} replays to {:?}",
            record.trial.index,
            replayed.verdict
        );
        let g = record.trial.g.as_ref().ok_or("c29 trial without g")?;
        let exact = exact_c29_slack(&record.trial.f, g, &unit)?;
        ensure!(
            exact < BigRational::zero(),
            "trial {} exact slack is not negative",
            record.trial.index
        );
    }
    Ok(format!(
        "{} violations ({} with affine terms), min slack {:.4}",
        report.violations.len(),
        affine_hits,
        report.min_slack
    ))
}

fn quadrature_battery() -> Check {
    let unit = iv(0.0, 1.0);
    let mut worst_weighted: f64 = 0.0;
    for k in 0..=3u32 {
        for s in [0.25, 0.5, 0.75, 1.0] {
            let expected = beta_integer_first(k, s);
            let left =
                quadrature::integrate(|x| x.powi(k as i32), &unit, WeightKind::LeftPower(s), 1e-12)
                    .map_err(err)?;
            let right = quadrature::integrate(
                |x| (1.0 - x).powi(k as i32),
                &unit,
                WeightKind::RightPower(s),
                1e-12,
            )
            .map_err(err)?;
            for (side, est) in [("left", left), ("right", right)] {
                let e = (est.value - expected).abs();
                worst_weighted = worst_weighted.max(e);
                ensure!(
                    e <= 1e-10,
                    "{side} weight k={k} s={s}: {} vs {expected}",
                    est.value
                );
            }
        }
    }
    let mut worst_poly: f64 = 0.0;
    for interval in [iv(0.0, 1.0), iv(-1.0, 2.0), iv(0.5, 3.0)] {
        for degree in [0usize, 1, 5, 12, 20, 31] {
            let coefficients: Vec<f64> = (0..=degree)
                .map(|j| 1.0 + ((j * 7) % 5) as f64 * 0.25)
                .collect();
            let antiderivative = |x: f64| {
                coefficients
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * x.powi(j as i32 + 1) / (j + 1) as f64)
                    .sum::<f64>()
            };
            let exact = antiderivative(interval.b()) - antiderivative(interval.a());
            let spec = FunctionSpec::polynomial(coefficients.clone());
            let est = quadrature::integrate_spec(&spec, &interval, WeightKind::None, 1e-10)
                .map_err(err)?;
            let r = rel(est.value, exact);
            worst_poly = worst_poly.max(r);
            ensure!(
                r <= 1e-13,
                "degree {degree} on {interval}: relative error {r:e}"
            );
        }
    }
    Ok(format!(
        "weighted max error {worst_weighted:.1e}, polynomial max relative {worst_poly:.1e}"
    ))
}

fn s_pair(seed: u64, lo: f64) -> (f64, f64) {
    let unit = |x: u64| (sconvex::stream::derive(seed, x) >> 11) as f64 / (1u64 << 53) as f64;
    (lo + (1.0 - lo) * unit(0), lo + (1.0 - lo) * unit(1))
}

fn proof_step_property() -> Check {
    let mut min_pointwise = f64::INFINITY;
    let intervals = [iv(0.0, 1.0), iv(0.25, 2.0), iv(0.0, 3.0), iv(1.0, 1.5)];
    for k in 0..100u64 {
        let (s1, s2) = s_pair(5000 + k, 0.1);
        let interval = intervals[k as usize % intervals.len()];
        let f = certified_s_convex(6000 + k, s1, 1 + (k % 3) as u32, &interval)?;
        let g = certified_s_convex(7000 + k, s2, 1 + ((k / 3) % 3) as u32, &interval)?;
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let v = proof_step_pointwise(&f, &g, s1, s2, t, &interval).map_err(err)?;
            min_pointwise = min_pointwise.min(v);
            ensure!(
                v >= -1e-12,
                "product {v:e} at t={t} for f={f}, g={g}, s=({s1},{s2}) on {interval}"
            );
        }
    }

    let mut worst_trap: f64 = 0.0;
    let tol = Tolerances::default();
    for k in 0..20u64 {
        let (s1, s2) = s_pair(8000 + k, 0.85);
        let interval = [iv(0.5, 1.5), iv(0.25, 1.25)][k as usize % 2];
        let f = certified_s_convex(9000 + k, s1, 1 + (k % 2) as u32, &interval)?;
        let g = certified_s_convex(9500 + k, s2, 1 + ((k / 2) % 2) as u32, &interval)?;
        let slack = eval_t3(&f, s1, &g, s2, &interval, &tol).map_err(err)?.slack;
        let mut failure = None;
        let trap = trapezoid(101, |t| {
            match proof_step_pointwise(&f, &g, s1, s2, t, &interval) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(err(e));
                    f64::NAN
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        let gap = (trap - slack).abs();
        worst_trap = worst_trap.max(gap);
        ensure!(
            gap <= 1e-6,
            "trapezoid {trap} vs slack {slack} (s=({s1:.3},{s2:.3}), f={f}, g={g})"
        );
    }
    Ok(format!(
        "min pointwise {min_pointwise:.1e}, worst trapezoid gap {worst_trap:.1e}"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "special-function identities",
            Duration::from_secs(1),
            special_function_identities,
        ),
        (
            "equality battery",
            Duration::from_secs(10),
            equality_battery,
        ),
        (
            "closed-form strict cases",
            Duration::from_secs(5),
            closed_form_cases,
        ),
        (
            "reduction to the convex product",
            Duration::from_secs(20),
            reductions_to_t1,
        ),
        (
            "membership fixtures",
            Duration::from_secs(10),
            membership_fixtures,
        ),
        (
            "product-inequality campaigns",
            Duration::from_secs(120),
            product_campaigns,
        ),
        (
            "corollary falsification",
            Duration::from_secs(10),
            corollary_falsification,
        ),
        (
            "quadrature oracle battery",
            Duration::from_secs(5),
            quadrature_battery,
        ),
        (
            "proof-step property",
            Duration::from_secs(30),
            proof_step_property,
        ),
    ];
    let mut failures = 0;
    for (number, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let timing = format!("{:.2}s of {}s", elapsed.as_secs_f64(), budget.as_secs());
        match result {
            Ok(detail) => println!("PASS {} {name} [{timing}] {detail}", number + 1),
            Err(reason) => {
                failures += 1;
                println!("FAIL {} {name} [{timing}] {reason}", number + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
