//! Scratch exploration for acceptance-criteria tuning (not shipped).

use seiprd::dates;
use seiprd::scenario::desk_scale;
use seiprd_cli::config::{Overrides, RunConfig};
use seiprd_cli::pipeline::{calibrate, load_data};
use seiprd_cli::sweep::{run_sweep, CellOutcome};
use seiprd_cli::synthetic::{simulate_synthetic, write_series_csv};

fn desk_config(dir: &std::path::Path, data_seed: u64, run_seed: u64) -> RunConfig {
    let sc = desk_scale();
    let data = simulate_synthetic(&sc.transmission, &sc.observation, 1, sc.data_end(), 4, data_seed).unwrap();
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
    cfg.seed = run_seed;
    cfg.out_dir = dir.join("out");
    cfg
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mode = args.get(1).map(String::as_str).unwrap_or("sweep");
    let data_seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5);
    let run_seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(42);

    let dir = tempfile_dir();
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = desk_config(&dir, data_seed, run_seed);

    if mode == "sweep" {
        let t0 = std::time::Instant::now();
        let outputs = run_sweep(&cfg).unwrap();
        println!("sweep took {:?}", t0.elapsed());
        let mut both_ok = 0;
        for (sigma, outcome) in &outputs.cells {
            match outcome {
                CellOutcome::Done(c) => {
                    let rps_ok = c.samples.means.rps <= c.point.means.rps;
                    let dss_ok = c.samples.means.dss <= c.point.means.dss;
                    if rps_ok && dss_ok { both_ok += 1; }
                    let nses_gt1_point = c.point.per_day.iter().filter(|d| d.nses > 1.0).count();
                    let nses_gt1_samples = c.samples.per_day.iter().filter(|d| d.nses > 1.0).count();
                    println!(
                        "sigma {sigma:>7}: RPS point {:>10.3} samples {:>10.3} ({}) | DSS point {:>9.3} samples {:>9.3} ({}) | NSES mean point {:>8.3} samples {:>8.3} | days>1 point {nses_gt1_point:2} samples {nses_gt1_samples:2}",
                        c.point.means.rps, c.samples.means.rps, if rps_ok {"ok"} else {"XX"},
                        c.point.means.dss, c.samples.means.dss, if dss_ok {"ok"} else {"XX"},
                        c.point.means.nses, c.samples.means.nses,
                    );
                }
                CellOutcome::Aborted { reason } => println!("sigma {sigma}: ABORTED {reason}"),
            }
        }
        println!("cells with both RPS+DSS ok: {both_ok}/7");
        for (block, sigma) in &outputs.best.overall {
            println!("best ({block}): {sigma}");
        }
    } else {
        // recovery
        let mut cfg = cfg;
        let n_samples: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(6000);
        cfg.n_samples = n_samples;
        cfg.n_warmup = n_samples / 2;
        let sc = desk_scale();
        let data = load_data(&cfg).unwrap();
        let t0 = std::time::Instant::now();
        let cal = calibrate(&cfg, &data, sc.walk_scale, cfg.seed).unwrap();
        println!("calibration took {:?} ({} divergent)", t0.elapsed(), cal.diverged);
        let truth = sc.truth_vector();
        let names = sc.layout.names();
        let n = cal.constrained.len();
        let mut inside = 0;
        for (p, name) in names.iter().enumerate() {
            let mut vals: Vec<f64> = cal.constrained.iter().map(|d| d.get(p)).collect();
            vals.sort_by(|a, b| a.total_cmp(b));
            let lo = vals[(0.05 * n as f64) as usize];
            let hi = vals[((0.95 * n as f64) as usize).min(n - 1)];
            let t = truth.get(p);
            let ok = t >= lo && t <= hi;
            if ok { inside += 1; }
            println!(
                "{:>20}: truth {:>9.5} CI [{:>9.5}, {:>9.5}] {} (rhat {:.3} ess {:.0})",
                name, t, lo, hi, if ok {"in "} else {"OUT"}, cal.draws.rhat[p], cal.draws.ess[p]
            );
        }
        println!("coverage: {inside}/{} = {:.2}", names.len(), inside as f64 / names.len() as f64);
    }
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("seiprd-explore-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}
