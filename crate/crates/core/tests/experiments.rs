use std::path::PathBuf;

use waveguide_imaging::estimate::coupling_matrix;
use waveguide_imaging::experiment::{
    rank_scan, run_image, run_mc_rate, run_spectrum, ArrayKind, EpsilonPolicy, ExperimentConfig, RatePoint,
};
use waveguide_imaging::geometry::{ArrayGeometry, Interval};
use waveguide_imaging::image::{localization_success, locate_peak, migrate};
use waveguide_imaging::io::read_csv;
use waveguide_imaging::modes::{solve_modes, WaveguideSpec};
use waveguide_imaging::synth::ModeAmplitudes;

fn config(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    ExperimentConfig::load(&path).unwrap()
}

/// Adjacent error rates may decrease by at most two binomial standard errors.
fn assert_monotone_within_noise(curve: &[RatePoint]) {
    for w in curve.windows(2) {
        let se = |p: f64, n: usize| p * (1.0 - p) / n as f64;
        let tol = 2.0 * (se(w[0].error_rate, w[0].trials) + se(w[1].error_rate, w[1].trials)).sqrt();
        assert!(
            w[1].error_rate >= w[0].error_rate - tol,
            "rate drops from {} at {:e} to {} at {:e}",
            w[0].error_rate,
            w[0].sigma,
            w[1].error_rate,
            w[1].sigma
        );
    }
}

#[test]
fn full_aperture_spectrum_is_flat() {
    let mut cfg = config("vertical.toml");
    cfg.array.kind = ArrayKind::DenseVertical;
    cfg.array.depth = 10.0;
    cfg.array.size = 20.0;
    cfg.rank.threshold = None;
    let dir = tempfile::tempdir().unwrap();
    let report = run_spectrum(&cfg, dir.path()).unwrap();
    assert_eq!(report.spectrum.len(), 6);
    assert!(report.spectrum.iter().all(|&d| (d - 0.05).abs() < 1e-12));
    assert_eq!(report.effective_rank, 6);
    let table = read_csv(&dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(table.column("value").unwrap(), report.spectrum);
}

#[test]
fn planar_top_singular_value_is_stable_across_designs() {
    let dir = tempfile::tempdir().unwrap();
    let tops: Vec<f64> = (0..10)
        .map(|seed| {
            let mut cfg = config("planar.toml");
            cfg.array.seed = seed;
            run_spectrum(&cfg, dir.path()).unwrap().spectrum[0]
        })
        .collect();
    let max = tops.iter().cloned().fold(f64::MIN, f64::max);
    let min = tops.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max <= 1.15 * min, "{tops:?}");
}

#[test]
fn noiseless_vertical_image_localizes() {
    let dir = tempfile::tempdir().unwrap();
    let loc = run_image(&config("vertical.toml"), 0.0, dir.path(), true).unwrap();
    assert!(loc.success);
    let peak = read_csv(&dir.path().join("peak.csv")).unwrap();
    assert_eq!(peak.rows[0][5], "true");
    let image = read_csv(&dir.path().join("image.csv")).unwrap();
    let values = image.column("value").unwrap();
    assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
    assert!(values.contains(&1.0));
    assert!(dir.path().join("image.png").exists());
}

#[test]
fn low_frequency_planar_localizes_at_one_percent_noise() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config("planar_low_frequency.toml");
    let successes = (0..50)
        .filter(|&seed| {
            cfg.noise.seed = seed;
            run_image(&cfg, 1e-2, dir.path(), false).unwrap().success
        })
        .count();
    assert!(successes >= 40, "{successes}/50 localized");
}

#[test]
fn zero_data_peaks_at_first_node_and_fails() {
    let cfg = config("vertical.toml");
    let ms = cfg.mode_set().unwrap();
    let grid = cfg.grid(&ms).unwrap();
    let image = migrate(&ModeAmplitudes::zeros(ms.mode_count()), &ms, &grid).unwrap();
    let peak = locate_peak(&image).unwrap();
    assert_eq!((peak.x, peak.z), (grid.x_min, grid.z_min));
    assert!(!localization_success(peak.position(), &cfg.source, ms.wavelength()));
}

#[test]
fn noiseless_error_rate_is_zero() {
    let mut cfg = config("planar.toml");
    cfg.noise.sigmas = vec![0.0];
    cfg.noise.trials = 20;
    let curve = run_mc_rate(&cfg, None).unwrap();
    assert_eq!(curve[0].error_rate, 0.0);
}

#[test]
fn error_rate_grows_with_noise() {
    assert_monotone_within_noise(&run_mc_rate(&config("planar.toml"), None).unwrap());
    let mut vertical = config("vertical.toml");
    vertical.estimate.epsilon_policy = EpsilonPolicy::Scan;
    vertical.noise.sigmas = vec![1e-10, 1e-9, 1e-8, 3e-8, 1e-7, 3e-7, 1e-6, 1e-5];
    assert_monotone_within_noise(&run_mc_rate(&vertical, None).unwrap());
}

#[test]
fn mc_rate_csv_records_each_level() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config("vertical.toml");
    cfg.noise.trials = 10;
    let curve = run_mc_rate(&cfg, Some(dir.path())).unwrap();
    let table = read_csv(&dir.path().join("mc_rate.csv")).unwrap();
    assert_eq!(table.columns, ["sigma", "error_rate", "trials", "seed"]);
    assert_eq!(table.column("sigma").unwrap(), cfg.noise.sigmas);
    let rates: Vec<f64> = curve.iter().map(|p| p.error_rate).collect();
    assert_eq!(table.column("error_rate").unwrap(), rates);
}

#[test]
fn full_vertical_aperture_has_full_rank() {
    let cfg = config("dense_rank.toml");
    let (vertical, horizontal) = rank_scan(&cfg).unwrap();
    let full = vertical.iter().find(|p| p.ratio == 0.5).unwrap();
    assert_eq!(full.measured, 318);
    assert_eq!(full.predicted, 318.0);
    assert_eq!(horizontal.len(), vertical.len());
}

#[test]
fn multi_interval_spectrum_has_two_point_limit() {
    let depth = 1000.0;
    let ms = solve_modes(&WaveguideSpec::homogeneous_dd(depth, 1.0).unwrap(), 1.0).unwrap();
    assert!(ms.mode_count() >= 300);
    let intervals = vec![Interval::new(125.0, 25.0), Interval::new(675.0, 75.0)];
    let total: f64 = intervals.iter().map(|i| 2.0 * i.half_length).sum();
    let cm = coupling_matrix(&ms, &ArrayGeometry::DenseVertical { intervals }).unwrap();
    let n = cm.dim() as f64;
    let plateau = 1.0 / total;
    let near_plateau = cm
        .eigenvalues()
        .iter()
        .filter(|&&d| (d - plateau).abs() <= 0.1 * plateau)
        .count() as f64;
    let negligible = cm.eigenvalues().iter().filter(|&&d| d < 0.05 * plateau).count() as f64;
    let fraction = total / depth;
    assert!((near_plateau / n - fraction).abs() <= 0.05, "{near_plateau}");
    assert!((negligible / n - (1.0 - fraction)).abs() <= 0.05, "{negligible}");
}
