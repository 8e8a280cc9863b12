//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Tolerances are fixed here, not configurable.

use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use tcm_core::dataio::{load_pings, NetworkSequence};
use tcm_core::epidemics::{analytic_r_star, h1_tilde_derivative, transmission_probability, Pgf, SirConfig};
use tcm_core::estimate::beta_from_moments;
use tcm_core::experiment::{
    drift_report, initial_graph, replicate, run_estimator_study, run_r_star_study, DriftStudy, EstimatorStudy,
    EstimatorTable, RStarStudy, WeeklyPipeline,
};
use tcm_core::netcore::DegreeLaw;
use tcm_core::stats::{mean, sample_sd, sample_variance};
use tcm_core::tcm::evolve;
use tcm_core::{child_seed, rng_from_seed, BetaParams, DegreeDistribution, ModelKind, PersistenceModel, Window};

const SEED: u64 = 7;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn cell(table: EstimatorTable, n: usize, steps: usize, seed: u64) -> tcm_core::experiment::StudyResult {
    let study = EstimatorStudy {
        model: table.model(),
        n,
        steps,
        window: table.window(),
        degree: DegreeLaw::Poisson(6.0),
        replications: 100,
    };
    run_estimator_study(&study, seed).expect("estimator study")
}

fn table1() -> Outcome {
    const ZBAR_MAX: f64 = 0.001;
    const Z1_MAX: f64 = 0.003;
    const SECONDS_MAX: f64 = 120.0;
    let start = Instant::now();
    let r = cell(EstimatorTable::Table1, 1000, 100, SEED);
    let secs = start.elapsed().as_secs_f64();
    let (zb, z1) = (r.averaged.abs_mean, r.first_step.abs_mean);
    (
        zb <= ZBAR_MAX && z1 <= Z1_MAX && secs < SECONDS_MAX,
        format!("N=1000 T=100: zbar bias {zb:.5} <= {ZBAR_MAX}, z1 bias {z1:.5} <= {Z1_MAX}, {secs:.1}s < {SECONDS_MAX}s"),
    )
}

fn table2() -> Outcome {
    const JOINT_MAX: f64 = 0.004;
    let big = cell(EstimatorTable::Table2, 1000, 100, SEED);
    let small = cell(EstimatorTable::Table2, 10, 30, SEED + 1);
    let b = big.averaged.abs_mean;
    let (s_avg, s_first) = (small.averaged.abs_mean, small.first_step.abs_mean);
    (
        b <= JOINT_MAX && s_first > s_avg,
        format!(
            "N=1000 T=100: (zbar, vbar) bias {b:.5} <= {JOINT_MAX}; N=10 T=30: (z1, v1) bias {s_first:.4} > (zbar, vbar) bias {s_avg:.4}"
        ),
    )
}

fn table3() -> Outcome {
    const JOINT_MAX: f64 = 0.006;
    let b = cell(EstimatorTable::Table3, 1000, 100, SEED).averaged.abs_mean;
    (b <= JOINT_MAX, format!("N=1000 T=100: (zbar, vbar) bias {b:.5} <= {JOINT_MAX}"))
}

fn r_star_simulation() -> Outcome {
    const REL_MAX: f64 = 0.10;
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, p) in [0.0, 0.5, 0.8, 1.0].into_iter().enumerate() {
        let study = RStarStudy {
            n: 5000,
            degree: DegreeLaw::Poisson(6.0),
            beta: 0.05,
            gamma: 0.2,
            p,
            runs: 200,
            config: SirConfig {
                stop_after_early_stage: true,
                ..SirConfig::default()
            },
        };
        let res = run_r_star_study(&study, child_seed(SEED, i as u64)).expect("R* study");
        let measured = res.measured_r_star().unwrap_or(f64::NAN);
        let rel = (measured / res.analytic_r_star - 1.0).abs();
        ok &= rel <= REL_MAX;
        parts.push(format!("p={p}: {measured:.3} vs {:.3} ({:.1}%)", res.analytic_r_star, 100.0 * rel));
    }
    (ok, format!("{} within {}%", parts.join(", "), 100.0 * REL_MAX))
}

fn tau_monte_carlo() -> Outcome {
    const ABS_MAX: f64 = 0.002;
    const SAMPLES: usize = 1_000_000;
    let mut grid = Vec::new();
    for beta in [0.05, 0.2, 0.5] {
        for gamma in [0.1, 0.3, 0.7] {
            for p in [0.0, 0.5, 0.9] {
                grid.push((beta, gamma, p));
            }
        }
    }
    let worst = grid
        .par_iter()
        .enumerate()
        .map(|(i, &(beta, gamma, p))| {
            let overlap = Geometric::new(1.0 - p * (1.0 - gamma)).unwrap();
            let mut rng = rng_from_seed(child_seed(SEED, i as u64));
            let hits = (0..SAMPLES)
                .filter(|_| {
                    let u = overlap.sample(&mut rng) + 1;
                    (0..u).any(|_| rng.random::<f64>() < beta)
                })
                .count();
            let tau = transmission_probability(beta, gamma, p).unwrap();
            (hits as f64 / SAMPLES as f64 - tau).abs()
        })
        .reduce(|| 0.0, f64::max);
    (worst <= ABS_MAX, format!("27 points, worst |mc - tau| {worst:.5} <= {ABS_MAX}"))
}

fn special_cases() -> Outcome {
    const TOL: f64 = 1e-12;
    let dists = [
        DegreeDistribution::new(vec![0.1f64, 0.2, 0.3, 0.25, 0.15]).unwrap(),
        DegreeDistribution::new(vec![0.0, 0.5, 0.0, 0.5]).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for (beta, gamma) in [(0.05f64, 0.2), (0.3, 0.6), (0.9, 0.1)] {
        for d in &dists {
            let pgf = Pgf::finite(d.clone());
            let dv = pgf.derivatives();
            let excess = dv.second / dv.first;
            let tau1 = transmission_probability(beta, gamma, 1.0).unwrap();
            worst = worst.max((analytic_r_star(&pgf, beta, gamma, 1.0).unwrap() - tau1 * excess).abs());
            let iid = beta * ((1.0 - gamma) / gamma + excess / gamma);
            worst = worst.max((analytic_r_star(&pgf, beta, gamma, 0.0).unwrap() - iid).abs());
        }
        for lambda in [1.5f64, 6.0] {
            let tau1 = transmission_probability(beta, gamma, 1.0).unwrap();
            let r = analytic_r_star(&Pgf::poisson(lambda).unwrap(), beta, gamma, 1.0).unwrap();
            worst = worst.max((r - tau1 * lambda).abs());
        }
        for m in [2usize, 5, 50] {
            let tau1 = transmission_probability(beta, gamma, 1.0).unwrap();
            let r = analytic_r_star(&Pgf::<f64>::regular(m), beta, gamma, 1.0).unwrap();
            worst = worst.max((r - tau1 * (m - 1) as f64).abs());
        }
    }
    let h = h1_tilde_derivative(&Pgf::poisson(6.0f64).unwrap(), 0.2, 0.8).unwrap();
    worst = worst.max((h - 11.6).abs());
    (worst <= TOL, format!("static, fully rewired, Poisson and regular cases; worst error {worst:.1e} <= {TOL:.0e}"))
}

fn estimator_properties() -> Outcome {
    const SE_MULT: f64 = 3.0;
    const STEPS: usize = 30;
    const REPS: usize = 500;
    let mut ok = true;
    let mut parts = Vec::new();
    let mut ratio = f64::NAN;
    for (i, p) in [0.2, 0.5, 0.8].into_iter().enumerate() {
        let study = EstimatorStudy {
            model: PersistenceModel::Model1 { p },
            n: 1000,
            steps: STEPS,
            window: 1,
            degree: DegreeLaw::Poisson(6.0),
            replications: REPS,
        };
        let r = run_estimator_study(&study, child_seed(SEED, 100 + i as u64)).expect("study");
        let z1: Vec<f64> = r.draws.iter().map(|d| d.z1).collect();
        let zb: Vec<f64> = r.draws.iter().map(|d| d.zbar).collect();
        let se = |x: &[f64]| sample_sd(x) / (x.len() as f64).sqrt();
        let t1 = (mean(&z1) - p).abs() / se(&z1);
        let tb = (mean(&zb) - p).abs() / se(&zb);
        ok &= t1 <= SE_MULT && tb <= SE_MULT;
        parts.push(format!("p={p}: z1 {t1:.2} SE, zbar {tb:.2} SE"));
        if p == 0.8 {
            ratio = sample_variance(&zb) / sample_variance(&z1) * STEPS as f64;
        }
    }
    ok &= (0.5..=2.0).contains(&ratio);
    (
        ok,
        format!("{} (<= {SE_MULT}); T·Var(zbar)/Var(z1) = {ratio:.2} in [0.5, 2]", parts.join(", ")),
    )
}

fn beta_round_trip() -> Outcome {
    const REL_MAX: f64 = 1e-9;
    let grid: Vec<f64> = (0..15).map(|i| (0.1f64.ln() + i as f64 / 14.0 * (500.0f64).ln()).exp()).collect();
    let mut worst: f64 = 0.0;
    for &a in &grid {
        for &b in &grid {
            let w = BetaParams::new(a, b).unwrap();
            let (m1, m2) = (w.mean(), w.second_moment());
            let back = beta_from_moments(m1, m2).unwrap();
            worst = worst
                .max(((back.mean() - m1) / m1).abs())
                .max(((back.second_moment() - m2) / m2).abs())
                .max(((back.alpha - a) / a).abs())
                .max(((back.beta - b) / b).abs());
        }
    }
    (worst <= REL_MAX, format!("15x15 log grid on [0.1, 50], worst relative error {worst:.1e} <= {REL_MAX:.0e}"))
}

fn model_comparison() -> Outcome {
    let kinds = [ModelKind::Model0, ModelKind::Model1, ModelKind::Model2, ModelKind::Model3];
    if let Ok(path) = std::env::var("COPENHAGEN_BT_CSV") {
        let pipeline = WeeklyPipeline::default();
        let load = load_pings(&path, pipeline.rssi_threshold).expect("reading pings");
        let seq = pipeline.weekly(&load.records).expect("weekly graphs");
        let res = tcm_core::experiment::compare_models(&seq, &kinds, 100, SEED).expect("comparison");
        let tv: Vec<f64> = res.iter().map(|r| r.as_ref().map(|m| m.tv_mean).unwrap_or(f64::NAN)).collect();
        let in_band = tv.iter().all(|t| (0.20..=0.28).contains(t));
        let ordered = tv.windows(2).all(|w| w[0] >= w[1]);
        return (
            in_band && ordered,
            format!("real data, mean TV {tv:.4?} in [0.20, 0.28] and non-increasing from Model 0 to Model 3"),
        );
    }
    let mut rng = rng_from_seed(SEED);
    let g = initial_graph(500, DegreeLaw::Poisson(6.0), &mut rng).unwrap();
    let truth = PersistenceModel::Model2 {
        dist: BetaParams::new(8.0, 2.0).unwrap(),
        window: Window::Forever,
    };
    let tn = evolve(g, truth, 3, &mut rng).unwrap();
    let seq = NetworkSequence::from_graphs(tn.snapshots().to_vec()).unwrap();
    let res = tcm_core::experiment::compare_models(&seq, &kinds, 100, SEED).expect("comparison");
    let tv = |k: usize| res[k].as_ref().map(|m| m.tv_mean).unwrap_or(f64::NAN);
    let fitted = res.iter().filter(|r| r.is_ok()).count();
    (
        fitted == 4 && tv(2) <= tv(0),
        format!(
            "synthetic Model 2 source (set COPENHAGEN_BT_CSV for real data): {fitted}/4 fitted, Model 2 TV {:.4} <= Model 0 TV {:.4}",
            tv(2),
            tv(0)
        ),
    )
}

fn drift() -> Outcome {
    const MIN_RUNS: usize = 95;
    let study = DriftStudy::default();
    let up = replicate(SEED, 100, |_, rng| {
        let r = drift_report(&study, rng).expect("drift");
        let first = r.row(1).map(|x| x.median).unwrap_or(f64::NAN);
        let last = r.row(100).map(|x| x.median).unwrap_or(f64::NAN);
        last > first
    });
    let count = up.iter().filter(|&&b| b).count();
    (count >= MIN_RUNS, format!("median persistence higher at t=100 than t=1 in {count}/100 runs (>= {MIN_RUNS})"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Model 1 estimator table", table1),
        ("Model 2 estimator table", table2),
        ("Model 3 estimator table", table3),
        ("early-stage R* simulation vs analytic", r_star_simulation),
        ("transmission probability Monte Carlo", tau_monte_carlo),
        ("R* special-case identities", special_cases),
        ("estimator unbiasedness and variance rate", estimator_properties),
        ("Beta moment round trip", beta_round_trip),
        ("model comparison by degree distance", model_comparison),
        ("persistence drift of surviving edges", drift),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = check();
        failed += usize::from(!ok);
        println!(
            "{} {:>2} {name}: {detail} [{:.1}s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
