use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::ExperimentConfig;
use super::manifest::{read_manifest, RunManifest};
use super::run::run_experiment;
use super::RunError;

pub const DEFAULT_SWEEP_LIMIT: usize = 1024;
pub const SWEEP_FILE: &str = "sweep.csv";

/// A config key in dotted form (`quantum_optics.delta2`, `grid.n_points`)
/// and the values it takes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub key: String,
    pub values: Vec<Value>,
}

/// Parses `key=v1,v2,...`. Each value is read as JSON when possible and as
/// a string otherwise.
pub fn parse_axis(spec: &str) -> Result<Axis, RunError> {
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| RunError::Sweep(format!("axis `{spec}` is not of the form key=v1,v2")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(RunError::Sweep(format!("axis `{spec}` has an empty key")));
    }
    let values: Vec<Value> = values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string())))
        .collect();
    if values.is_empty() {
        return Err(RunError::Sweep(format!("axis `{key}` has no values")));
    }
    Ok(Axis {
        key: key.to_string(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub workers: usize,
    pub limit: usize,
    pub out_dir: PathBuf,
}

impl SweepOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            workers: 1,
            limit: DEFAULT_SWEEP_LIMIT,
            out_dir: out_dir.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub values: Vec<Value>,
    /// `ok`, `validity_fail` or `error`.
    pub status: String,
    pub gamma_max: Option<[f64; 2]>,
    pub velocity_ratio_analytic: Option<f64>,
    pub fronts_ratio: Option<f64>,
    pub spectral_ratio: Option<f64>,
    pub worst_validity_ratio: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub keys: Vec<String>,
    pub rows: Vec<SweepRow>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl SweepTable {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = vec!["index".to_string()];
        header.extend(self.keys.iter().map(|k| csv_field(k)));
        header.extend(
            [
                "status",
                "gamma_max_1",
                "gamma_max_2",
                "velocity_ratio_analytic",
                "fronts_ratio",
                "spectral_ratio",
                "worst_validity_ratio",
                "error",
            ]
            .map(String::from),
        );
        writeln!(w, "{}", header.join(","))?;
        for r in &self.rows {
            let mut f = vec![r.index.to_string()];
            f.extend(r.values.iter().map(|v| csv_field(&value_text(v))));
            f.push(r.status.clone());
            f.push(opt(r.gamma_max.map(|g| g[0])));
            f.push(opt(r.gamma_max.map(|g| g[1])));
            f.push(opt(r.velocity_ratio_analytic));
            f.push(opt(r.fronts_ratio));
            f.push(opt(r.spectral_ratio));
            f.push(opt(r.worst_validity_ratio));
            f.push(csv_field(r.error.as_deref().unwrap_or("")));
            writeln!(w, "{}", f.join(","))?;
        }
        Ok(())
    }
}

fn broadcast(target: &mut Value, value: &Value) {
    match target {
        Value::Array(items) if !value.is_array() => {
            for item in items {
                broadcast(item, value);
            }
        }
        _ => *target = value.clone(),
    }
}

/// Sets a dotted key in a config tree. Arrays are indexed by number; a
/// scalar assigned to an array fills every element.
fn set_key(doc: &mut Value, key: &str, value: &Value) -> Result<(), RunError> {
    let mut node = doc;
    for part in key.split('.') {
        node = match node {
            Value::Object(map) => map.get_mut(part),
            Value::Array(items) => part.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| RunError::Sweep(format!("key `{key}` not found in the config")))?;
    }
    broadcast(node, value);
    Ok(())
}

fn point_config(
    base: &Value,
    axes: &[Axis],
    values: &[Value],
    dir: PathBuf,
) -> Result<ExperimentConfig, RunError> {
    let mut doc = base.clone();
    for (axis, v) in axes.iter().zip(values) {
        set_key(&mut doc, &axis.key, v)?;
    }
    let mut cfg: ExperimentConfig =
        serde_json::from_value(doc).map_err(|e| RunError::Schema(e.to_string()))?;
    cfg.output.dir = dir;
    cfg.validate()?;
    Ok(cfg)
}

fn row_from(index: usize, values: Vec<Value>, result: Result<RunManifest, RunError>, dir: &Path) -> SweepRow {
    let (manifest, error) = match result {
        Ok(m) => (Some(m), None),
        // the failed run still left a manifest with whatever it derived
        Err(e) => (read_manifest(dir).ok(), Some(e)),
    };
    let status = match &error {
        None => "ok",
        Some(e) if e.exit_code() == 2 => "validity_fail",
        Some(_) => "error",
    };
    let derived = manifest.as_ref().and_then(|m| m.derived.as_ref());
    SweepRow {
        index,
        values,
        status: status.to_string(),
        gamma_max: derived.and_then(|d| d.gamma_max),
        velocity_ratio_analytic: derived.and_then(|d| d.luttinger.velocity_ratio()),
        fronts_ratio: manifest.as_ref().and_then(|m| m.summary.fronts.map(|f| f.ratio)),
        spectral_ratio: manifest
            .as_ref()
            .and_then(|m| m.summary.spectral.as_ref().map(|s| s.charge / s.spin)),
        worst_validity_ratio: derived.and_then(|d| d.validity.worst_ratio()),
        error: error.map(|e| e.to_string()),
    }
}

/// Runs the Cartesian product of `axes` over `template`, each point in its
/// own `point_NNNN` directory, and writes `sweep.csv` with one row per point.
pub fn sweep(
    template: &ExperimentConfig,
    axes: &[Axis],
    options: &SweepOptions,
) -> Result<SweepTable, RunError> {
    if axes.is_empty() {
        return Err(RunError::Sweep("no axes given".into()));
    }
    let size = axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.values.len()))
        .unwrap_or(usize::MAX);
    if size > options.limit {
        return Err(RunError::Sweep(format!(
            "{size} points exceed the limit of {}",
            options.limit
        )));
    }
    let base = serde_json::to_value(template).expect("config serializes");
    // keys are checked up front so a typo fails before any work is done
    for axis in axes {
        set_key(&mut base.clone(), &axis.key, &axis.values[0])?;
    }

    let mut points: Vec<Vec<Value>> = vec![Vec::new()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v.clone());
                    q
                })
            })
            .collect();
    }

    fs::create_dir_all(&options.out_dir).map_err(|e| RunError::io(&options.out_dir, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers.max(1))
        .build()
        .map_err(|e| RunError::Sweep(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .into_par_iter()
            .enumerate()
            .map(|(i, values)| {
                let dir = options.out_dir.join(format!("point_{i:04}"));
                let result = point_config(&base, axes, &values, dir.clone())
                    .and_then(|cfg| run_experiment(&cfg));
                row_from(i, values, result, &dir)
            })
            .collect()
    });

    let table = SweepTable {
        keys: axes.iter().map(|a| a.key.clone()).collect(),
        rows,
    };
    let path = options.out_dir.join(SWEEP_FILE);
    let mut buf = Vec::new();
    table.write_csv(&mut buf).expect("writing to memory");
    fs::write(&path, buf).map_err(|e| RunError::io(&path, e))?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn axis_parsing() {
        let a = parse_axis("quantum_optics.delta2=-1,-2.5").unwrap();
        assert_eq!(a.key, "quantum_optics.delta2");
        assert_eq!(a.values, vec![json!(-1), json!(-2.5)]);
        let b = parse_axis("output.format=csv,binary").unwrap();
        assert_eq!(b.values, vec![json!("csv"), json!("binary")]);
        assert!(parse_axis("novalue").is_err());
        assert!(parse_axis("k=").is_err());
    }

    #[test]
    fn dotted_keys_and_broadcast() {
        let mut doc = json!({"a": {"b": [1, 2], "c": [[1, 2], [3, 4]]}, "d": 5});
        set_key(&mut doc, "a.b", &json!(7)).unwrap();
        set_key(&mut doc, "a.c", &json!(0)).unwrap();
        set_key(&mut doc, "a.c.1.0", &json!(9)).unwrap();
        set_key(&mut doc, "d", &json!([1, 2])).unwrap();
        assert_eq!(doc, json!({"a": {"b": [7, 7], "c": [[0, 0], [9, 0]]}, "d": [1, 2]}));
        assert!(set_key(&mut doc, "a.x", &json!(1)).is_err());
        assert!(set_key(&mut doc, "a.b.5", &json!(1)).is_err());
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"x\""), "\"say \"\"x\"\"\"");
        assert_eq!(csv_field("plain"), "plain");
    }
}
