mod common;

use std::collections::BTreeMap;
use std::fs;

use std::f64::consts::PI;

use num_complex::Complex64;
use polariton_ll::analysis::{spectral_function, SpectralComponent, SpectralOptions};
use polariton_ll::dynamics::{
    evolve, init_state, read_binary, read_csv, Couplings, Diagnostics, FieldState, Grid,
    RampSchedule, Sample, Trajectory,
};
use polariton_ll::runner::{
    emit_plot_data, hash_file, load_config, parse_axis, read_manifest, read_spectrum_csv,
    run_experiment, sweep, FileEntry, Format, PlotTarget, RunError, RunStatus, SweepOptions,
    MANIFEST_FILE,
};
use serde_json::json;
use tempfile::tempdir;

use common::*;

#[test]
fn zero_time_run_writes_only_the_initial_state() {
    let tmp = tempdir().unwrap();
    let m = run_experiment(&minimal(tmp.path())).unwrap();
    assert!(m.is_complete());
    let kinds: Vec<&str> = m.files.iter().map(|f| f.kind.as_str()).collect();
    assert_eq!(kinds, ["model", "fields_metadata", "initial_state"]);
    assert!(tmp.path().join(MANIFEST_FILE).exists());
    assert!(tmp.path().join("initial_state.csv").exists());
    for f in &m.files {
        let (bytes, sha) = hash_file(&tmp.path().join(&f.name)).unwrap();
        assert_eq!((bytes, sha.as_str()), (f.bytes, f.sha256.as_str()));
    }
    assert_eq!(read_manifest(tmp.path()).unwrap(), m);
}

#[test]
fn identical_configs_give_identical_artifacts() {
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    let ma = run_experiment(&small_run(a.path())).unwrap();
    let mb = run_experiment(&small_run(b.path())).unwrap();
    assert!(ma.files.len() >= 8, "{:?}", ma.files);
    assert_eq!(ma.files, mb.files);
    assert_eq!(ma.summary, mb.summary);
}

#[test]
fn small_run_reports_both_sound_speeds() {
    let tmp = tempdir().unwrap();
    let m = run_experiment(&small_run(tmp.path())).unwrap();
    assert!((m.summary.velocity_ratio_analytic.unwrap() - 2.0).abs() < 1e-12);
    let f = m.summary.fronts.unwrap();
    assert!((f.ratio - 2.0).abs() < 0.2, "{f:?}");
    assert!(m.summary.norm_drift.unwrap() < 1e-10);
    let cut = &m.summary.peaks[0];
    assert!((cut.q - 2.0 * PI / 16.0).abs() < 1e-12);
    for kind in ["spectrum", "spectrum_metadata", "fronts", "peaks", "final_state"] {
        assert!(m.file(kind).is_some(), "missing {kind}");
    }
}

#[test]
fn exported_fields_reparse_exactly() {
    let tmp = tempdir().unwrap();
    let mut cfg = small_run(tmp.path());
    cfg.analysis = Default::default();
    cfg.output.trajectory = true;
    cfg.integration.t_final = 0.5;
    run_experiment(&cfg).unwrap();
    let grid = cfg.grid;
    let state = init_state(&grid, &cfg.initial).unwrap();
    let sched = RampSchedule::constant([1.0, 1.0], Couplings::new(1.0, 1.0, 0.6));
    let traj = evolve(state, &sched, 0.5, cfg.integration.dt, cfg.integration.sample_every).unwrap();
    let from_csv = read_csv(&grid, fs::File::open(tmp.path().join("trajectory.csv")).unwrap()).unwrap();
    assert_eq!(from_csv.len(), traj.len());
    for (x, s) in from_csv.iter().zip(&traj.samples) {
        assert_eq!(x, &s.state);
    }

    cfg.output.format = Format::Binary;
    let tmp2 = tempdir().unwrap();
    cfg.output.dir = tmp2.path().to_path_buf();
    run_experiment(&cfg).unwrap();
    let from_bin = read_binary(&grid, fs::File::open(tmp2.path().join("trajectory.bin")).unwrap()).unwrap();
    assert_eq!(from_bin, from_csv);
}

#[test]
fn validity_failure_stops_the_run_unless_allowed() {
    let tmp = tempdir().unwrap();
    let mut cfg = optics_config(tmp.path(), 100.0);
    let err = run_experiment(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");
    let m = read_manifest(tmp.path()).unwrap();
    assert!(matches!(m.status, RunStatus::Failed { ref stage, .. } if stage == "validity"));
    assert!(m.derived.is_some());

    cfg.allow_invalid = true;
    assert!(run_experiment(&cfg).unwrap().is_complete());

    let ok = optics_config(tmp.path(), 1e4);
    assert!(run_experiment(&ok).unwrap().is_complete());
}

#[test]
fn numerical_failure_is_marked() {
    let tmp = tempdir().unwrap();
    let mut cfg = small_run(tmp.path());
    cfg.integration.dt = 0.2;
    let err = run_experiment(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 3, "{err}");
    let m = read_manifest(tmp.path()).unwrap();
    assert!(matches!(m.status, RunStatus::Failed { ref stage, .. } if stage == "evolve"));
    // artifacts written before the failure are still listed
    assert!(m.file("initial_state").is_some());
}

#[test]
fn plot_data_targets() {
    let tmp = tempdir().unwrap();
    let mut cfg = small_run(tmp.path());
    cfg.output.densities = true;
    let m = run_experiment(&cfg).unwrap();
    let out = tmp.path().join("plots");

    let dens = emit_plot_data(tmp.path(), PlotTarget::Densities, None, &out.join("d.csv")).unwrap();
    assert_eq!(hash_file(&dens).unwrap().1, m.file("densities").unwrap().sha256);

    let q = 2.0 * PI / 16.0;
    let cut = emit_plot_data(&tmp.path().join(MANIFEST_FILE), PlotTarget::Cut, Some(q + 0.001), &out.join("c.csv")).unwrap();
    let text = fs::read_to_string(&cut).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("omega,S"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 321);
    // the cut equals the in-memory map at that q
    let spec = read_spectrum_csv(&tmp.path().join("spectrum.csv")).unwrap();
    let q_bin = m.summary.peaks[0].q;
    let expected: Vec<(f64, f64)> = spec.iter().filter(|r| r.0 == q_bin).map(|r| (r.1, r.2)).collect();
    assert_eq!(rows, expected);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("c.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["q"], json!(q_bin));

    assert!(matches!(
        emit_plot_data(tmp.path(), PlotTarget::Cut, Some(1e3), &out.join("x.csv")),
        Err(RunError::NotFound(_))
    ));
    let bare = tempdir().unwrap();
    run_experiment(&minimal(bare.path())).unwrap();
    assert!(matches!(
        emit_plot_data(bare.path(), PlotTarget::Spectrum, None, &out.join("s.csv")),
        Err(RunError::NotFound(_))
    ));
}

#[test]
fn cut_of_a_single_peak_map_has_one_maximum() {
    let tmp = tempdir().unwrap();
    run_experiment(&minimal(tmp.path())).unwrap();
    // splice a synthetic plane-wave spectrum into the finished run
    let grid = Grid::new(32, 16.0).unwrap();
    let (k, w0) = (2.0 * PI * 2.0 / 16.0, 2.0 * PI * 5.0 / 12.8);
    let samples: Vec<Sample> = (0..128)
        .map(|m| {
            let t = m as f64 * 0.1;
            let wave = grid.positions().iter().map(|z| Complex64::from_polar(1.0, k * z - w0 * t)).collect();
            let state = FieldState::new(grid, wave, vec![Complex64::new(0.0, 0.0); 32], t).unwrap();
            Sample { diagnostics: Diagnostics { t, norm: state.norms(), energy: 0.0 }, state }
        })
        .collect();
    let last = samples[127].clone();
    let traj = Trajectory {
        final_state: last.state,
        final_diagnostics: last.diagnostics,
        ramp_energy: None,
        sample_interval: 0.1,
        samples,
    };
    let map = spectral_function(&traj, SpectralComponent::First, SpectralOptions::raw()).unwrap();
    let path = tmp.path().join("spectrum.csv");
    map.write_csv(fs::File::create(&path).unwrap(), None).unwrap();
    let mut m = read_manifest(tmp.path()).unwrap();
    let (bytes, sha256) = hash_file(&path).unwrap();
    m.files.push(FileEntry { name: "spectrum.csv".into(), kind: "spectrum".into(), bytes, sha256 });
    fs::write(tmp.path().join(MANIFEST_FILE), serde_json::to_string(&m).unwrap()).unwrap();

    let out = emit_plot_data(tmp.path(), PlotTarget::Cut, Some(k), &tmp.path().join("cut.csv")).unwrap();
    let s: Vec<f64> = fs::read_to_string(out)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split_once(',').unwrap().1.parse().unwrap())
        .collect();
    let peak = s.iter().cloned().fold(0.0, f64::max);
    let maxima = (1..s.len() - 1).filter(|&i| s[i] > s[i - 1] && s[i] > s[i + 1] && s[i] > 1e-6 * peak);
    assert_eq!(maxima.count(), 1);
}

#[test]
fn sweep_rows_match_single_runs() {
    let tmp = tempdir().unwrap();
    let template = optics_config(&tmp.path().join("unused"), 1e4);
    let axis = parse_axis("quantum_optics.delta2=-3").unwrap();
    let table = sweep(&template, &[axis], &SweepOptions::new(tmp.path())).unwrap();
    assert_eq!(table.rows.len(), 1);
    let mut single = template.clone();
    single.output.dir = tmp.path().join("single");
    let m = run_experiment(&single).unwrap();
    let row = &table.rows[0];
    assert_eq!(row.status, "ok");
    assert_eq!(row.gamma_max, m.derived.as_ref().unwrap().gamma_max);
    assert_eq!(row.velocity_ratio_analytic, m.summary.velocity_ratio_analytic);
    let csv = fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn sweep_keeps_failed_points() {
    let tmp = tempdir().unwrap();
    let template = optics_config(&tmp.path().join("unused"), 1e4);
    let axes = [
        parse_axis("quantum_optics.atom_density=100,10000").unwrap(),
        parse_axis("quantum_optics.delta4=20,-20").unwrap(),
    ];
    let mut opts = SweepOptions::new(tmp.path());
    opts.workers = 3;
    let table = sweep(&template, &axes, &opts).unwrap();
    assert_eq!(table.rows.len(), 4);
    let status: BTreeMap<usize, &str> = table.rows.iter().map(|r| (r.index, r.status.as_str())).collect();
    assert_eq!(status[&0], "validity_fail");
    assert_eq!(status[&1], "error");
    assert_eq!(status[&2], "ok");
    assert_eq!(status[&3], "error");
    assert!(table.rows[1].error.is_some());
    let csv = fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn sweep_rejects_unknown_keys_and_oversized_products() {
    let tmp = tempdir().unwrap();
    let template = optics_config(tmp.path(), 1e4);
    let bad = parse_axis("quantum_optics.delta9=1").unwrap();
    assert!(matches!(sweep(&template, &[bad], &SweepOptions::new(tmp.path())), Err(RunError::Sweep(_))));
    let big = parse_axis("quantum_optics.delta2=-1,-2,-3").unwrap();
    let mut opts = SweepOptions::new(tmp.path());
    opts.limit = 8;
    assert!(matches!(sweep(&template, &[big.clone(), big], &opts), Err(RunError::Sweep(_))));
}

#[test]
fn example_configs_load() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let text = fs::read_to_string(&path).unwrap();
            let cfg = load_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(load_config(&cfg.to_document()).unwrap(), cfg);
            n += 1;
        }
    }
    assert!(n >= 3);
}
