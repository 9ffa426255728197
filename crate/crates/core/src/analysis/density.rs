use std::io::{BufWriter, Write};

use serde::{Deserialize, Serialize};

use crate::dynamics::{Grid, Trajectory};

use super::AnalysisError;

/// Component, charge and spin densities per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityWaves {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub n1: Vec<Vec<f64>>,
    pub n2: Vec<Vec<f64>>,
    /// `n₁ + n₂`
    pub charge: Vec<Vec<f64>>,
    /// `n₁ − n₂`
    pub spin: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Charge,
    Spin,
}

impl DensityWaves {
    pub fn branch(&self, branch: Branch) -> &[Vec<f64>] {
        match branch {
            Branch::Charge => &self.charge,
            Branch::Spin => &self.spin,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), AnalysisError> {
        let mut w = BufWriter::new(out);
        writeln!(w, "t,z,n1,n2,nc,ns")?;
        for (s, t) in self.times.iter().enumerate() {
            for j in 0..self.grid.n_points {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    t,
                    self.grid.position(j),
                    self.n1[s][j],
                    self.n2[s][j],
                    self.charge[s][j],
                    self.spin[s][j]
                )?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

pub fn density_waves(trajectory: &Trajectory) -> Result<DensityWaves, AnalysisError> {
    if trajectory.is_empty() {
        return Err(AnalysisError::Domain("empty trajectory".into()));
    }
    let grid = trajectory.samples[0].state.grid;
    let mut waves = DensityWaves {
        grid,
        times: Vec::with_capacity(trajectory.len()),
        n1: Vec::with_capacity(trajectory.len()),
        n2: Vec::with_capacity(trajectory.len()),
        charge: Vec::with_capacity(trajectory.len()),
        spin: Vec::with_capacity(trajectory.len()),
    };
    for sample in &trajectory.samples {
        let n1 = sample.state.density(0);
        let n2 = sample.state.density(1);
        waves.charge.push(n1.iter().zip(&n2).map(|(a, b)| a + b).collect());
        waves.spin.push(n1.iter().zip(&n2).map(|(a, b)| a - b).collect());
        waves.times.push(sample.state.t);
        waves.n1.push(n1);
        waves.n2.push(n2);
    }
    Ok(waves)
}
