//! Hot-loop benchmarks: the ODE solve, one posterior evaluation, predictive
//! mixture construction, and a full day of scoring.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use seiprd::forecast::{NbComponent, PredictiveDistribution};
use seiprd::integrator::{integrate_daily, IntegratorConfig};
use seiprd::mcmc::Target;
use seiprd::observation::{latent_means, CountSeries, ObservedData};
use seiprd::params::to_unconstrained;
use seiprd::posterior::Posterior;
use seiprd::prior::PriorConfig;
use seiprd::scenario::desk_scale;
use seiprd::scoring::{score_all, ScoringRule};

fn synthetic_observed() -> ObservedData {
    // Deterministic pseudo-data near the latent means; the benchmark only
    // needs realistic magnitudes, not statistical fidelity.
    let sc = desk_scale();
    let cfg = IntegratorConfig::new(4, sc.calibration_end as u32).unwrap();
    let traj = integrate_daily(&sc.transmission, &cfg).unwrap();
    let means = latent_means(&traj, &sc.transmission, &sc.observation);
    let series = |s: seiprd::Stream, first: i64| {
        let (days, counts): (Vec<i64>, Vec<u64>) = (first..=sc.calibration_end)
            .map(|d| (d, means.stream(s).get(d).unwrap().round() as u64))
            .unzip();
        CountSeries::new(days, counts).unwrap()
    };
    ObservedData {
        deaths: series(seiprd::Stream::Deaths, 1),
        admissions: series(seiprd::Stream::Admissions, 0),
        calls: series(seiprd::Stream::Calls, 0),
    }
}

fn bench_integrate(c: &mut Criterion) {
    let sc = desk_scale();
    let cfg = IntegratorConfig::new(4, 300).unwrap();
    c.bench_function("integrate_daily_300d_4sub", |b| {
        b.iter(|| integrate_daily(black_box(&sc.transmission), black_box(&cfg)).unwrap())
    });
}

fn bench_posterior_eval(c: &mut Criterion) {
    let sc = desk_scale();
    let post = Posterior::new(
        sc.layout.clone(),
        PriorConfig::with_sigma_beta(sc.walk_scale),
        synthetic_observed(),
        IntegratorConfig::new(4, sc.calibration_end as u32).unwrap(),
        sc.transmission.n_population,
    )
    .unwrap();
    let u = to_unconstrained(&sc.truth_vector(), &sc.layout);
    c.bench_function("log_posterior_eval", |b| {
        b.iter(|| post.log_density(black_box(&u)))
    });
}

fn bench_predictive_table(c: &mut Criterion) {
    let components: Vec<NbComponent> = (0..1536)
        .map(|i| NbComponent {
            mu: 20.0 + (i % 17) as f64,
            phi: 4.0 + (i % 5) as f64,
        })
        .collect();
    c.bench_function("predictive_mixture_1536_components", |b| {
        b.iter(|| {
            let dist = PredictiveDistribution::new(black_box(components.clone())).unwrap();
            black_box(dist.cdf(10));
        })
    });
}

fn bench_score_day(c: &mut Criterion) {
    let components: Vec<NbComponent> = (0..1536)
        .map(|i| NbComponent {
            mu: 20.0 + (i % 17) as f64,
            phi: 4.0 + (i % 5) as f64,
        })
        .collect();
    let dist = PredictiveDistribution::new(components).unwrap();
    dist.cdf(0); // force the table build outside the timing loop
    c.bench_function("score_all_rules_one_day", |b| {
        b.iter(|| score_all(black_box(&dist), black_box(24)).unwrap())
    });
    c.bench_function("score_rps_one_day", |b| {
        b.iter(|| {
            seiprd::scoring::score(ScoringRule::RankedProbability, black_box(&dist), 24).unwrap()
        })
    });
}

criterion_group!(
    benches,
    bench_integrate,
    bench_posterior_eval,
    bench_predictive_table,
    bench_score_day
);
criterion_main!(benches);
