use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use crate::analysis::{
    density_waves, peak_positions, spectral_function, spectral_velocity_document, track_fronts,
    velocities_from_spectrum, velocity_document, AnalysisError, AxisRescale, Branch, PeakOptions,
    SpectrumMetadata,
};
use crate::dynamics::{
    init_state, write_binary, write_csv, Couplings, FieldState, RampSchedule, SplitStep,
};
use crate::effective_model::{
    build_effective_model, tagged_document, DerivedModel, EffectiveModel, Status,
};

use super::config::{ExperimentConfig, Format};
use super::manifest::{
    hash_file, FileEntry, FrontSummary, RunManifest, RunStatus, RunSummary, StageTiming,
    MANIFEST_FILE,
};
use super::{RunError, VERSION};

/// Effective model and validity report for a config, without dynamics.
pub fn derive_model(cfg: &ExperimentConfig) -> Result<DerivedModel, RunError> {
    if let Some(qo) = &cfg.quantum_optics {
        return Ok(build_effective_model(qo, cfg.policy)?);
    }
    let d = cfg
        .effective_model
        .as_ref()
        .ok_or_else(|| RunError::Schema("no model source".into()))?;
    let model = EffectiveModel::direct(d.mass, d.intra, d.v1, d.v2, d.rho0, cfg.policy)?;
    Ok(DerivedModel::from_direct(model)?)
}

pub fn build_schedule(cfg: &ExperimentConfig, model: &EffectiveModel) -> Result<RampSchedule, RunError> {
    let strong = Couplings::new(model.intra[0], model.intra[1], model.inter.v12);
    let s = &cfg.schedule;
    if s.trap == 0.0 && s.ramp == 0.0 {
        return Ok(RampSchedule::constant(model.mass, strong));
    }
    let hold = (cfg.integration.t_final - s.trap - s.ramp).max(0.0);
    Ok(RampSchedule::staged(
        model.mass,
        strong.scaled(s.initial_scale),
        strong,
        s.trap,
        s.ramp,
        hold,
    )?)
}

struct Run<'a> {
    cfg: &'a ExperimentConfig,
    dir: &'a Path,
    derived: Option<DerivedModel>,
    summary: RunSummary,
    files: Vec<FileEntry>,
    timings: Vec<StageTiming>,
    clock: Instant,
}

impl<'a> Run<'a> {
    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.timings.push(StageTiming {
            stage: stage.to_string(),
            seconds: (now - self.clock).as_secs_f64(),
        });
        self.clock = now;
    }

    fn artifact<F>(&mut self, name: &str, kind: &str, write: F) -> Result<(), RunError>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<(), RunError>,
    {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| RunError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        write(&mut w)?;
        w.flush().map_err(|e| RunError::io(&path, e))?;
        drop(w);
        let (bytes, sha256) = hash_file(&path)?;
        self.files.push(FileEntry {
            name: name.to_string(),
            kind: kind.to_string(),
            bytes,
            sha256,
        });
        Ok(())
    }

    fn json<T: serde::Serialize>(&mut self, name: &str, kind: &str, value: &T) -> Result<(), RunError> {
        let path = self.dir.join(name);
        self.artifact(name, kind, |w| {
            serde_json::to_writer_pretty(&mut *w, value)
                .map_err(|e| RunError::io(&path, e.into()))?;
            writeln!(w).map_err(|e| RunError::io(&path, e))
        })
    }

    fn state(&mut self, stem: &str, kind: &str, states: &[&FieldState]) -> Result<(), RunError> {
        let format = self.cfg.output.format;
        let name = format!("{stem}.{}", format.extension());
        self.artifact(&name, kind, |w| {
            match format {
                Format::Csv => write_csv(states, w)?,
                Format::Binary => write_binary(states, w)?,
            }
            Ok(())
        })
    }

    fn execute(&mut self) -> Result<(), RunError> {
        let cfg = self.cfg;
        let derived = derive_model(cfg).map_err(RunError::at("derive"))?;
        self.summary.velocity_ratio_analytic = derived.luttinger.velocity_ratio();
        self.json("model.json", "model", &tagged_document(&derived))
            .map_err(RunError::at("derive"))?;
        let model = derived.model;
        let validity = derived.validity.clone();
        self.derived = Some(derived);
        self.lap("derive");

        if validity.overall() == Status::Fail && !cfg.allow_invalid {
            let worst = validity.worst_ratio().unwrap_or(f64::NAN);
            return Err(RunError::at("validity")(RunError::Validity { worst }));
        }

        let schedule = build_schedule(cfg, &model).map_err(RunError::at("initial"))?;
        let meta = serde_json::json!({
            "grid": cfg.grid,
            "schedule": schedule,
            "format": cfg.output.format,
            "columns": crate::dynamics::CSV_HEADER,
            "units": {"t": "time", "z": "length", "psi": "length^-1/2"},
            "version": VERSION,
        });
        self.json("fields.meta.json", "fields_metadata", &meta)
            .map_err(RunError::at("initial"))?;
        let initial = init_state(&cfg.grid, &cfg.initial)
            .map_err(|e| RunError::at("initial")(e.into()))?;
        self.state("initial_state", "initial_state", &[&initial])
            .map_err(RunError::at("initial"))?;
        self.lap("initial");

        if cfg.integration.t_final == 0.0 {
            return Ok(());
        }

        let mut solver = SplitStep::new(cfg.grid).map_err(|e| RunError::at("evolve")(e.into()))?;
        let traj = solver
            .evolve(
                initial,
                &schedule,
                cfg.integration.t_final,
                cfg.integration.dt,
                cfg.integration.sample_every,
            )
            .map_err(|e| RunError::at("evolve")(e.into()))?;
        self.summary.norm_drift = Some(traj.max_norm_drift());
        self.summary.energy_drift = Some(traj.max_energy_drift());
        self.summary.ramp_energy = traj.ramp_energy;
        self.state("final_state", "final_state", &[&traj.final_state])
            .map_err(RunError::at("evolve"))?;
        if cfg.output.trajectory {
            let states: Vec<&FieldState> = traj.samples.iter().map(|s| &s.state).collect();
            self.state("trajectory", "trajectory", &states)
                .map_err(RunError::at("evolve"))?;
        }
        self.lap("evolve");

        self.analyze(&traj, &model).map_err(RunError::at("analysis"))?;
        self.lap("analysis");
        Ok(())
    }

    fn analyze(&mut self, traj: &crate::dynamics::Trajectory, model: &EffectiveModel) -> Result<(), RunError> {
        let request = &self.cfg.analysis;
        if self.cfg.output.densities || request.fronts.is_some() {
            let waves = density_waves(traj)?;
            if self.cfg.output.densities {
                self.artifact("densities.csv", "densities", |w| Ok(waves.write_csv(w)?))?;
            }
            if let Some(fronts) = &request.fronts {
                let charge = track_fronts(&waves, Branch::Charge, fronts.window)?;
                let spin = track_fronts(&waves, Branch::Spin, fronts.window)?;
                let summary = FrontSummary {
                    charge: charge.velocity,
                    spin: spin.velocity,
                    ratio: charge.velocity / spin.velocity,
                    charge_residual: charge.residual,
                    spin_residual: spin.residual,
                };
                let doc = serde_json::json!({
                    "charge": velocity_document(&charge),
                    "spin": velocity_document(&spin),
                    "velocity_ratio": {"value": summary.ratio, "unit": "dimensionless"},
                });
                self.json("fronts.json", "fronts", &doc)?;
                self.summary.fronts = Some(summary);
            }
        }

        let Some(sp) = &request.spectrum else {
            return Ok(());
        };
        let map = spectral_function(traj, sp.component, sp.options())?;
        let xi = model.healing_length().into_iter().fold(0.0, f64::max);
        let fit_q_max = sp.fit_q_max.unwrap_or(1.0 / (4.0 * xi));
        let export_q_max = sp.export_q_max.unwrap_or(4.0 * fit_q_max);
        let rescale = match (sp.rescale_axes, sp.detection_length) {
            (true, Some(z0)) => Some(AxisRescale::new(z0, model.luttinger()?.components[0].sound_velocity)),
            _ => None,
        };
        self.artifact("spectrum.csv", "spectrum", |w| Ok(map.write_csv(w, Some(export_q_max))?))?;
        let meta = SpectrumMetadata::new(&map, Some(export_q_max), rescale);
        self.json("spectrum.meta.json", "spectrum_metadata", &meta)?;

        let options = PeakOptions {
            prominence: sp.prominence,
            ..PeakOptions::positive_frequencies()
        };
        let mut qs: Vec<f64> = sp.detection_length.map(|z0| 2.0 * PI / z0).into_iter().collect();
        qs.extend(&sp.peaks_q);
        let mut cuts = Vec::new();
        for q in qs {
            match peak_positions(&map, q, options) {
                Ok(cut) => cuts.push(cut),
                Err(AnalysisError::NoSignal(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        if !cuts.is_empty() {
            self.json("peaks.json", "peaks", &cuts)?;
        }
        self.summary.peaks = cuts;

        match velocities_from_spectrum(&map, 0.0, fit_q_max, options) {
            Ok(v) => {
                self.json("spectral_velocities.json", "spectral_velocities", &spectral_velocity_document(&v))?;
                self.summary.spectral = Some(v);
            }
            // merged or unresolved branches are a result, not a failure
            Err(AnalysisError::Ambiguous(_) | AnalysisError::InsufficientData(_)) => {}
            Err(e) => return Err(e.into()),
        }
        Ok(())
    }
}

/// Runs the full pipeline and writes every artifact plus `manifest.json`
/// into `cfg.output.dir`. On failure the manifest is still written, marked
/// failed, and the error is returned.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunManifest, RunError> {
    cfg.validate()?;
    let dir = cfg.output.dir.as_path();
    fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    let mut run = Run {
        cfg,
        dir,
        derived: None,
        summary: RunSummary::default(),
        files: Vec::new(),
        timings: Vec::new(),
        clock: Instant::now(),
    };
    let result = run.execute();
    let status = match &result {
        Ok(()) => RunStatus::Complete,
        Err(e) => RunStatus::Failed {
            stage: match e {
                RunError::Stage { stage, .. } => stage.to_string(),
                _ => "setup".to_string(),
            },
            message: e.root().to_string(),
        },
    };
    let manifest = RunManifest {
        version: VERSION.to_string(),
        config: cfg.clone(),
        derived: run.derived,
        summary: run.summary,
        files: run.files,
        timings: run.timings,
        status,
    };
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|e| RunError::io(&path, e))?;
    result.map(|()| manifest)
}
