//! Scratch stage timing (not shipped).
use seiprd::dates;
use seiprd::scenario::desk_scale;
use seiprd_cli::config::{Overrides, RunConfig};
use seiprd_cli::pipeline::{build_forecasts, calibrate, forecast_window, load_data, score_forecast};
use seiprd_cli::synthetic::{simulate_synthetic, write_series_csv};

fn main() {
    let sc = desk_scale();
    let dir = std::env::temp_dir().join("seiprd-stagetime");
    std::fs::create_dir_all(&dir).unwrap();
    let data = simulate_synthetic(&sc.transmission, &sc.observation, 1, sc.data_end(), 4, 5).unwrap();
    write_series_csv(&dir.join("deaths.csv"), &data.deaths).unwrap();
    write_series_csv(&dir.join("admissions.csv"), &data.admissions).unwrap();
    write_series_csv(&dir.join("calls.csv"), &data.calls).unwrap();
    let mut cfg = RunConfig::resolve(None, &Overrides::default()).unwrap();
    cfg.deaths = Some(dir.join("deaths.csv"));
    cfg.admissions = Some(dir.join("admissions.csv"));
    cfg.calls = Some(dir.join("calls.csv"));
    cfg.population = sc.transmission.n_population;
    cfg.window_start = dates::date_of(sc.calibration_start);
    cfg.window_end = dates::date_of(sc.calibration_end);
    cfg.horizon = sc.horizon;
    cfg.beta_knots = Some(sc.transmission.beta.knot_times().iter().map(|&t| dates::date_of(t as i64)).collect());
    cfg.rho_admissions_knots = Some(sc.observation.rho_admissions.knot_times().iter().map(|&t| dates::date_of(t as i64)).collect());
    cfg.rho_calls_knots = Some(sc.observation.rho_calls.knot_times().iter().map(|&t| dates::date_of(t as i64)).collect());
    cfg.seed = 42;
    cfg.out_dir = dir.join("out");

    let loaded = load_data(&cfg).unwrap();
    let t0 = std::time::Instant::now();
    let cal = calibrate(&cfg, &loaded, 0.01, 42).unwrap();
    println!("calibrate: {:?}", t0.elapsed());
    let t0 = std::time::Instant::now();
    let forecasts = build_forecasts(&cfg, &cal.layout, &cal.constrained).unwrap();
    println!("build_forecasts (construction only): {:?}", t0.elapsed());
    let t0 = std::time::Instant::now();
    let mut total = 0.0f64;
    for (_, set) in &forecasts {
        for d in &set.days {
            total += d.cdf(5);
        }
    }
    println!("force tables: {:?} ({total})", t0.elapsed());
    let t0 = std::time::Instant::now();
    for (_, set) in &forecasts {
        for d in &set.days {
            for q in [0.025, 0.25, 0.5, 0.75, 0.975] {
                total += d.quantile(q).unwrap() as f64;
            }
        }
    }
    println!("quantiles: {:?} ({total})", t0.elapsed());
    let t0 = std::time::Instant::now();
    for (_, set) in &forecasts {
        let window = forecast_window(&cfg, set);
        let (_, report) = score_forecast(&window, &loaded.full.deaths).unwrap();
        total += report.means.rps;
    }
    println!("score: {:?} ({total})", t0.elapsed());
}
