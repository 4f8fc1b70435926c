#[path = "../../../cli/tests/support/golden_cases.rs"]
mod golden_cases;

use std::fs;
use std::path::Path;
use std::time::Duration;

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use riskmeas_core::allocation::{self, LossPanel};
use riskmeas_core::backtest::{
    self, comonotone_pairs, enumerate_joint_laws, es_quantile_approximation, pit_independence_test,
    pit_series_from_sets, pit_uniformity_test, rejection_rate, unconditional_coverage_test, violation_process,
    ComonotoneGrid, JointGrid, VarSearchSpace, DEFAULT_PIT_POWERS,
};
use riskmeas_core::measures::{expected_shortfall, expected_shortfall_conditional, expectile, value_at_risk};
use riskmeas_core::{wasserstein1, DiscreteDistribution, ExpectileSolverConfig, Level, MeasureKind};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use riskmeas_cli::{run, RunConfig};
use riskmeas_validation::{random_law, random_sample, relative_gap, Checks, Outcome};

const SEED: u64 = 20_261_018;

fn q(a: f64) -> Level {
    Level::quantile(a).unwrap()
}

fn es(d: &DiscreteDistribution, a: f64) -> f64 {
    expected_shortfall(d, q(a)).unwrap()
}

fn var(d: &DiscreteDistribution, a: f64) -> f64 {
    value_at_risk(d, q(a)).unwrap()
}

fn ex(d: &DiscreteDistribution, tau: f64) -> f64 {
    expectile(d, Level::expectile(tau).unwrap(), &ExpectileSolverConfig::default()).unwrap()
}

/// `(τE[L 1{L>e}] + (1-τ)E[L 1{L<=e}]) / (τP[L>e] + (1-τ)P[L<=e])`.
fn expectile_ratio(d: &DiscreteDistribution, tau: f64, e: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (&a, &w) in d.atoms().iter().zip(d.weights()) {
        let phi = if a > e { tau } else { 1.0 - tau };
        num += phi * w * a;
        den += phi * w;
    }
    num / den
}

pub fn exact_measure_values() -> Outcome {
    let mut c = Checks::new();
    let d = DiscreteDistribution::from_sample(&(1..=100).map(f64::from).collect::<Vec<_>>()).unwrap();
    c.close("VaR_0.95 of 1..100", var(&d, 0.95), 95.0, 1e-12);
    c.close("ES_0.95 of 1..100", es(&d, 0.95), 98.0, 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let law = random_law(&mut rng);
        let a = rng.random_range(0.01..0.99);
        let integrated = es(&law, a);
        let conditional = expected_shortfall_conditional(&law, q(a)).unwrap();
        worst = worst.max((integrated - conditional).abs());
        c.check((integrated - conditional).abs() <= 1e-10, || {
            format!("ES forms differ at α={a}: {integrated} vs {conditional}")
        });
    }
    c.fact(format!("VaR={} ES={}", var(&d, 0.95), es(&d, 0.95)));
    c.fact(format!("max ES form gap {worst:.1e} over 1000 laws"));
    c.within(Duration::from_secs(1));
    c.finish()
}

pub fn expectile_correctness() -> Outcome {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut ratio_worst: f64 = 0.0;
    let mut ratio_check = |c: &mut Checks, d: &DiscreteDistribution, tau: f64, e: f64| {
        let r = expectile_ratio(d, tau, e);
        let gap = relative_gap(e, r);
        ratio_worst = ratio_worst.max(gap);
        c.check(gap <= 1e-10, || format!("ratio identity at τ={tau}: e={e}, ratio={r}"));
    };
    for _ in 0..1000 {
        let xs = random_sample(&mut rng);
        let d = DiscreteDistribution::from_sample(&xs).unwrap();
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        let e = ex(&d, 0.5);
        c.close("τ=0.5 expectile vs mean", e, m, 1e-9);
        ratio_check(&mut c, &d, 0.5, e);
        let tau = rng.random_range(0.01..0.99);
        let e = ex(&d, tau);
        ratio_check(&mut c, &d, tau, e);
    }
    let bernoulli = DiscreteDistribution::from_weighted(&[0.0, 1.0], &[0.5, 0.5]).unwrap();
    for k in 1..=9 {
        let tau = f64::from(k) / 10.0;
        let e = ex(&bernoulli, tau);
        c.close(&format!("Bernoulli(1/2) expectile at τ={tau}"), e, tau, 1e-10);
        ratio_check(&mut c, &bernoulli, tau, e);
    }
    c.fact(format!("max ratio-identity gap {ratio_worst:.1e}"));
    c.within(Duration::from_secs(5));
    c.finish()
}

pub fn coherence_enumeration() -> Outcome {
    let mut c = Checks::new();
    let grids = [JointGrid::default(), JointGrid::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0], 8).unwrap()];
    let es_levels = [0.5, 0.8, 0.95];
    let mut laws_checked = 0;
    for grid in &grids {
        for law in enumerate_joint_laws(grid) {
            laws_checked += 1;
            let (d1, d2, s) = (law.first(), law.second(), law.sum());
            for a in es_levels {
                let (lhs, rhs) = (es(&s, a), es(&d1, a) + es(&d2, a));
                c.check(lhs <= rhs + 1e-10, || format!("ES_{a} superadditive: {lhs} > {rhs} on {law:?}"));
            }
            for tau in [0.6, 0.8] {
                let (lhs, rhs) = (ex(&s, tau), ex(&d1, tau) + ex(&d2, tau));
                c.check(lhs <= rhs + 1e-10, || format!("e_{tau} superadditive: {lhs} > {rhs} on {law:?}"));
            }
            let m = law.mirrored();
            let (lhs, rhs) = (ex(&m.sum(), 0.2), ex(&m.first(), 0.2) + ex(&m.second(), 0.2));
            c.check(lhs >= rhs - 1e-10, || format!("e_0.2 subadditive on mirrored law: {lhs} < {rhs}"));
        }
    }
    let space = VarSearchSpace::default();
    let first = backtest::find_var_superadditivity_example(q(0.95), &space);
    c.check(first.is_ok(), || "no VaR superadditivity instance found".into());
    let instances = backtest::var_superadditivity_instances(q(0.95), &space).unwrap();
    let derived = instances.iter().find(|i| i.description == "iid two-point p=0.04 x=10");
    c.check(derived.is_some_and(|i| i.var_first == 0.0 && i.var_second == 0.0 && i.var_sum == 10.0), || {
        "derived iid two-point example (p=0.04, x=10) not reproduced with VaRs 0, 0, 10".into()
    });
    for i in &instances {
        c.check(i.es_sum <= i.es_first + i.es_second + 1e-10, || {
            format!("ES superadditive on VaR instance {}", i.description)
        });
    }
    c.fact(format!("{laws_checked} joint laws"));
    c.fact(format!("{} VaR superadditivity instances", instances.len()));
    if let Ok(f) = first {
        c.fact(format!("first: {} (VaR {} + {} < {})", f.description, f.var_first, f.var_second, f.var_sum));
    }
    c.within(Duration::from_secs(120));
    c.finish()
}

pub fn comonotone_additivity() -> Outcome {
    let mut c = Checks::new();
    let grid = ComonotoneGrid::default();
    match backtest::find_expectile_comonotone_counterexample(Level::expectile(0.8).unwrap(), &grid) {
        Ok((_, found)) => {
            c.check(found.gap.abs() > 1e-6, || format!("gap {} too small", found.gap));
            c.fact(format!(
                "e_0.8 gap {:.6} with weights {:?}, f1 {:?}, f2 {:?}",
                found.gap, found.factor_weights, found.f1, found.f2
            ));
        }
        Err(e) => c.check(false, || format!("no counterexample: {e}")),
    }
    let pairs = comonotone_pairs(&grid);
    for pair in &pairs {
        let laws = pair.laws();
        for a in [0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99] {
            let gv = var(&laws.sum, a) - var(&laws.first, a) - var(&laws.second, a);
            let ge = es(&laws.sum, a) - es(&laws.first, a) - es(&laws.second, a);
            c.check(gv.abs() <= 1e-10, || format!("VaR_{a} not additive: gap {gv}"));
            c.check(ge.abs() <= 1e-10, || format!("ES_{a} not additive: gap {ge}"));
        }
    }
    c.fact(format!("{} comonotone pairs", pairs.len()));
    c.finish()
}

pub fn full_allocation() -> Outcome {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let t = rng.random_range(1..=200);
        let m = rng.random_range(1..=5);
        let rounded = rng.random_bool(0.3);
        let rows: Vec<Vec<f64>> = (0..t)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        let x: f64 = rng.random_range(-10.0..10.0);
                        if rounded {
                            x.round()
                        } else {
                            x
                        }
                    })
                    .collect()
            })
            .collect();
        let panel = LossPanel::from_rows(rows).unwrap();
        let a = rng.random_range(0.01..0.99);
        let tau = rng.random_range(0.5..0.99);
        for kind in [MeasureKind::es(a).unwrap(), MeasureKind::expectile(tau).unwrap()] {
            let r = allocation::contributions(&panel, kind).unwrap();
            let sum: f64 = r.contributions.iter().sum();
            let gap = relative_gap(sum, r.total);
            worst = worst.max(gap);
            c.check(gap <= 1e-10, || format!("{kind:?}: Σ={sum} total={}", r.total));
        }
    }
    for k in 0..20 {
        let base: Vec<f64> = (0..100).map(|_| StandardNormal.sample(&mut rng)).collect();
        let coefs: Vec<f64> = (0..3).map(|_| rng.random_range(0.1..2.0)).collect();
        let rows = base.iter().map(|&l| coefs.iter().map(|c| c * l).collect()).collect();
        let panel = LossPanel::from_rows(rows).unwrap();
        let kind = if k % 2 == 0 { MeasureKind::es(0.9).unwrap() } else { MeasureKind::expectile(0.9).unwrap() };
        let r = allocation::contributions(&panel, kind).unwrap();
        let total_coef: f64 = coefs.iter().sum();
        for (ci, contribution) in coefs.iter().zip(&r.contributions) {
            let want = ci / total_coef * r.total;
            c.check(relative_gap(*contribution, want) <= 1e-12, || {
                format!("linear split {kind:?}: {contribution} vs {want}")
            });
        }
    }
    c.fact(format!("max relative residual {worst:.1e} over 500 panels"));
    c.finish()
}

pub fn diversification_identities() -> Outcome {
    let mut c = Checks::new();
    let es75 = MeasureKind::es(0.75).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let factor: Vec<f64> = (0..200).map(|_| StandardNormal.sample(&mut rng)).collect();
    let comonotone = LossPanel::from_rows(factor.iter().map(|&z: &f64| vec![z, z.powi(3) + 1.0]).collect()).unwrap();
    for a in [0.5, 0.75, 0.9, 0.99] {
        let kind = MeasureKind::es(a).unwrap();
        c.close(
            &format!("comonotone DI at ES_{a}"),
            allocation::diversification_index(&comonotone, kind).unwrap(),
            1.0,
            1e-12,
        );
        c.close(
            &format!("comonotone DB at ES_{a}"),
            allocation::diversification_benefit(&comonotone, kind).unwrap(),
            0.0,
            1e-12,
        );
    }

    let hedge = LossPanel::from_rows(factor.iter().map(|&z| vec![z, -z]).collect()).unwrap();
    c.close("full hedge DB", allocation::diversification_benefit(&hedge, es75).unwrap(), 1.0, 1e-12);

    let bernoulli = LossPanel::from_rows(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
    let di = allocation::diversification_index(&bernoulli, es75).unwrap();
    let db = allocation::diversification_benefit(&bernoulli, es75).unwrap();
    c.close("independent Bernoulli DI at ES_0.75", di, 0.75, 1e-12);
    c.close("independent Bernoulli DB at ES_0.75", db, 0.5, 1e-12);
    c.fact(format!("Bernoulli panel at ES_0.75: DI={di}, DB={db}"));
    if (di - 0.75).abs() > 1e-12 || (db - 0.5).abs() > 1e-12 {
        let half = MeasureKind::es(0.5).unwrap();
        let sum = bernoulli.portfolio_distribution();
        c.note(format!(
            "analysis: the sum takes 0, 1, 2 with weights 1/4, 1/2, 1/4, so F(1) = 0.75 exactly and \
             q_u = 2 on (0.75, 1]; ES_0.75(sum) = {} and ES_0.75(L_i) = 1, giving DI = 1 and DB = 0. \
             The expected 0.75 / 0.5 are the values at α = 0.5: DI = {}, DB = {}.",
            es(&sum, 0.75),
            allocation::diversification_index(&bernoulli, half).unwrap(),
            allocation::diversification_benefit(&bernoulli, half).unwrap(),
        ));
    }
    c.finish()
}

pub fn coverage_calibration() -> Outcome {
    let mut c = Checks::new();
    let alpha = 0.95;
    let t = 500;
    let n = Normal::standard();
    let z = n.inverse_cdf(alpha);
    let half_iqr = n.inverse_cdf(0.75);
    let run = |shift: f64| {
        rejection_rate(1000, SEED + 7, 0.05, |_, rng| {
            let x: Vec<f64> = (0..t).map(|_| StandardNormal.sample(rng)).collect();
            let v = violation_process(&vec![z - shift; t], &x, q(alpha))?;
            Ok(unconditional_coverage_test(&v))
        })
        .unwrap()
    };
    let size = run(0.0);
    let power = run(half_iqr);
    c.check((0.03..=0.07).contains(&size), || format!("size {size} outside 5% ± 2%"));
    c.check(power >= 0.9, || format!("power {power} below 90%"));
    c.fact(format!("α={alpha}, T={t}: size {:.1}%, power {:.1}% (shift {half_iqr:.4})", 100.0 * size, 100.0 * power));
    c.within(Duration::from_secs(120));
    c.finish()
}

pub fn es_approximation() -> Outcome {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let mut tested = 0;
    for _ in 0..1000 {
        let d = random_law(&mut rng);
        let a = rng.random_range(0.01..0.99);
        let points = rng.random_range(2..=16);
        let approx = es_quantile_approximation(|u| d.quantile(u), a, points).unwrap();
        let exact = es(&d, a);
        c.check(approx <= exact + 1e-10, || format!("approximation {approx} exceeds ES {exact}"));
        tested += 1;
    }
    let n = Normal::standard();
    for a in [0.9, 0.95, 0.975, 0.99] {
        let approx = es_quantile_approximation(|u| n.inverse_cdf(u), a, 4).unwrap();
        let exact = n.pdf(n.inverse_cdf(a)) / (1.0 - a);
        c.check(approx <= exact, || format!("normal at {a}: {approx} > {exact}"));
        let approx = es_quantile_approximation(|u| u, a, 4).unwrap();
        c.check(approx <= (1.0 + a) / 2.0, || format!("uniform at {a}: {approx}"));
        tested += 2;
    }

    let exp_quantile = |u: f64| -(1.0 - u).ln();
    let approx = es_quantile_approximation(exp_quantile, 0.99, 4).unwrap();
    let closed_form = 1.0 - (0.01f64).ln();
    // trapezoid rule for ∫_0^∞ (s - ln c) c e^{-s} ds, the tail integral
    // after substituting 1 - u = c e^{-s}
    let (cc, steps, upper) = (0.01f64, 200_000, 60.0);
    let h = upper / f64::from(steps);
    let f = |s: f64| (s - cc.ln()) * cc * (-s).exp();
    let integral = h * ((1..steps).map(|k| f(f64::from(k) * h)).sum::<f64>() + 0.5 * (f(0.0) + f(upper)));
    let quadrature = integral / (1.0 - 0.99);
    c.close("exponential ES closed form", closed_form, 5.605_170_185_988_091, 1e-6);
    c.close("exponential ES quadrature", quadrature, closed_form, 1e-6);
    c.close("exponential four-quantile approximation", approx, 5.196_951_089_520_998, 1e-6);
    c.check(approx <= closed_form, || "approximation exceeds exponential ES".into());
    c.fact(format!(
        "{tested} laws; exponential(1) at 0.99: ES {closed_form:.4}, approximation {approx:.4}, gap {:.1}%",
        100.0 * (closed_form - approx) / closed_form
    ));
    c.finish()
}

pub fn pit_correctness() -> Outcome {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    // scenario sets with ties
    let sets: Vec<Vec<f64>> =
        (0..5).map(|_| (0..25).map(|_| f64::from(rng.random_range(-6i32..=6))).collect()).collect();

    let draws = 100_000;
    let chosen: Vec<&Vec<f64>> = (0..draws).map(|t| &sets[t % sets.len()]).collect();
    let x: Vec<f64> = chosen.iter().map(|s| s[rng.random_range(0..s.len())]).collect();
    let pit = pit_series_from_sets(&chosen, &x, SEED).unwrap();
    let mut z = pit.z.clone();
    z.sort_by(f64::total_cmp);
    let nf = draws as f64;
    let ks = z.iter().enumerate().map(|(i, &v)| ((i + 1) as f64 / nf - v).max(v - i as f64 / nf)).fold(0.0, f64::max);
    c.check(ks < 0.01, || format!("Kolmogorov distance {ks}"));

    let t = 2000;
    let null_series = |rng: &mut ChaCha8Rng, i: u64| {
        let chosen: Vec<&Vec<f64>> = (0..t).map(|k| &sets[k % sets.len()]).collect();
        let x: Vec<f64> = chosen.iter().map(|s| s[rng.random_range(0..s.len())]).collect();
        pit_series_from_sets(&chosen, &x, i)
    };
    let chi2 = rejection_rate(1000, SEED + 10, 0.05, |i, rng| pit_uniformity_test(&null_series(rng, i)?, 10)).unwrap();
    let portmanteau = rejection_rate(1000, SEED + 11, 0.05, |i, rng| {
        pit_independence_test(&null_series(rng, i)?, 10, &DEFAULT_PIT_POWERS).map(|r| r.result)
    })
    .unwrap();
    c.check((0.03..=0.07).contains(&chi2), || format!("χ² uniformity size {chi2}"));
    c.check((0.03..=0.07).contains(&portmanteau), || format!("portmanteau size {portmanteau}"));
    c.fact(format!(
        "KS {ks:.4} at {draws} draws; null rejection χ² {:.1}%, portmanteau {:.1}%",
        100.0 * chi2,
        100.0 * portmanteau
    ));
    c.finish()
}

pub fn wasserstein_lipschitz() -> Outcome {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 12);
    let mut tightest_es: f64 = 0.0;
    for _ in 0..1000 {
        let (x, y) = (random_law(&mut rng), random_law(&mut rng));
        let w = wasserstein1(&x, &y);
        let tau: f64 = rng.random_range(0.01..0.99);
        let a: f64 = rng.random_range(0.01..0.99);
        let k = (tau / (1.0 - tau)).max((1.0 - tau) / tau);
        let de = (ex(&x, tau) - ex(&y, tau)).abs();
        c.check(de <= k * w + 1e-10, || format!("expectile τ={tau}: {de} > {k}·{w}"));
        let ds = (es(&x, a) - es(&y, a)).abs();
        c.check(ds <= w / (1.0 - a) + 1e-10, || format!("ES α={a}: {ds} > {w}/(1-α)"));
        if w > 0.0 {
            tightest_es = tightest_es.max(ds * (1.0 - a) / w);
        }
    }
    c.fact(format!("largest ES ratio to bound {tightest_es:.3}"));
    c.finish()
}

/// One CLI run in-process, exactly as the binary would produce its stdout.
fn cli_report(args: &[&str]) -> Result<String, String> {
    let argv = std::iter::once("riskmeas").chain(args.iter().copied());
    let config = RunConfig::try_parse_from(argv).map_err(|e| e.to_string())?;
    run(&config).map(|r| r.to_json()).map_err(|e| e.to_string())
}

pub fn cli_determinism() -> Outcome {
    let mut c = Checks::new();
    let cli_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../cli/tests");
    // reports echo the relative input paths, so run from the fixture directory
    let previous = std::env::current_dir().unwrap();
    std::env::remove_var("RISKMEAS_SEED");
    std::env::set_current_dir(cli_dir.join("fixtures")).unwrap();
    for (name, args) in golden_cases::GOLDEN_CASES {
        let (first, second) = (cli_report(args), cli_report(args));
        let golden = fs::read_to_string(cli_dir.join("golden").join(format!("{name}.json")));
        match (first, second, golden) {
            (Ok(a), Ok(b), Ok(g)) => {
                c.check(a == b, || format!("{name}: two runs differ"));
                c.check(a == g, || format!("{name}: differs from golden file"));
            }
            (a, b, g) => c.check(false, || format!("{name}: {:?} {:?} {:?}", a.err(), b.err(), g.err())),
        }
    }
    std::env::set_current_dir(previous).unwrap();
    c.fact(format!("{} fixture runs", golden_cases::GOLDEN_CASES.len()));
    c.finish()
}
