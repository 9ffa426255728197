use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::manifest::{read_manifest, MANIFEST_FILE};
use super::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PlotTarget {
    Densities,
    Spectrum,
    Cut,
}

/// Rows `(q, ω, S)` of a spectrum export.
pub fn read_spectrum_csv(path: &Path) -> Result<Vec<(f64, f64, f64)>, RunError> {
    let file = File::open(path).map_err(|e| RunError::io(path, e))?;
    let bad = |n: usize, what: &str| RunError::Parse {
        line: n + 1,
        column: 1,
        message: format!("{}: {what}", path.display()),
    };
    let mut rows = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| RunError::io(path, e))?;
        if n == 0 {
            if line.trim() != "q,omega,S" {
                return Err(bad(n, "expected header q,omega,S"));
            }
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad(n, "non-numeric field"))?;
        if v.len() != 3 {
            return Err(bad(n, "expected three columns"));
        }
        rows.push((v[0], v[1], v[2]));
    }
    Ok(rows)
}

#[derive(Debug, Serialize)]
struct CutMetadata {
    q_requested: f64,
    q: f64,
    q_offset: f64,
    omega_unit: &'static str,
    intensity_unit: &'static str,
}

/// Writes plotting data for one artifact of a finished run to `out`.
///
/// `densities` and `spectrum` copy the run's exports byte for byte; `cut`
/// writes `omega,S` at the exported `q` nearest the request, with a
/// `.meta.json` sidecar holding the snapped `q` and unit tags.
pub fn emit_plot_data(
    manifest: &Path,
    target: PlotTarget,
    q: Option<f64>,
    out: &Path,
) -> Result<PathBuf, RunError> {
    let run_dir = if manifest.is_dir() {
        manifest.to_path_buf()
    } else {
        manifest.parent().map(Path::to_path_buf).unwrap_or_default()
    };
    let m = read_manifest(&run_dir.join(MANIFEST_FILE))?;
    let kind = match target {
        PlotTarget::Densities => "densities",
        PlotTarget::Spectrum | PlotTarget::Cut => "spectrum",
    };
    let entry = m
        .file(kind)
        .ok_or_else(|| RunError::NotFound(format!("run has no {kind} artifact")))?;
    let source = run_dir.join(&entry.name);
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| RunError::io(parent, e))?;
    }
    if target != PlotTarget::Cut {
        fs::copy(&source, out).map_err(|e| RunError::io(out, e))?;
        return Ok(out.to_path_buf());
    }

    let q_req = q.ok_or_else(|| RunError::Schema("a cut needs a q value".into()))?;
    let rows = read_spectrum_csv(&source)?;
    let q_bin = rows
        .iter()
        .map(|r| r.0)
        .min_by(|a, b| (a - q_req).abs().total_cmp(&(b - q_req).abs()))
        .ok_or_else(|| RunError::NotFound("spectrum export is empty".into()))?;
    let dq = {
        let mut qs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        qs.dedup();
        if qs.len() > 1 { qs[1] - qs[0] } else { f64::INFINITY }
    };
    if (q_bin - q_req).abs() > dq {
        return Err(RunError::NotFound(format!(
            "q = {q_req} lies outside the exported range"
        )));
    }
    let file = File::create(out).map_err(|e| RunError::io(out, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| RunError::io(out, e);
    writeln!(w, "omega,S").map_err(io)?;
    for r in rows.iter().filter(|r| r.0 == q_bin) {
        writeln!(w, "{},{}", r.1, r.2).map_err(|e| RunError::io(out, e))?;
    }
    w.flush().map_err(|e| RunError::io(out, e))?;
    let meta = CutMetadata {
        q_requested: q_req,
        q: q_bin,
        q_offset: q_bin - q_req,
        omega_unit: "1/time",
        intensity_unit: "|field|^2",
    };
    let mut meta_path = out.as_os_str().to_owned();
    meta_path.push(".meta.json");
    let meta_path = PathBuf::from(meta_path);
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    fs::write(&meta_path, text + "\n").map_err(|e| RunError::io(&meta_path, e))?;
    Ok(out.to_path_buf())
}
