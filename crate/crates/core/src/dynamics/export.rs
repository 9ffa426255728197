//! Trajectory files: CSV `(t, z, re_psi1, im_psi1, re_psi2, im_psi2)` and a
//! flat little-endian binary form.
//!
//! Binary layout: 8-byte magic `PLLTRAJ\0`, `u32` version, `u64` n_points,
//! `u64` n_samples, then per sample `t` followed by `n_points` records of
//! four `f64` (re ψ₁, im ψ₁, re ψ₂, im ψ₂).

use std::io::{BufRead, BufReader, BufWriter, Read, Write};

use num_complex::Complex64;

use super::grid::Grid;
use super::state::FieldState;
use super::DynamicsError;

pub const CSV_HEADER: &str = "t,z,re_psi1,im_psi1,re_psi2,im_psi2";
pub const BINARY_MAGIC: &[u8; 8] = b"PLLTRAJ\0";
pub const BINARY_VERSION: u32 = 1;

pub fn write_csv<W: Write>(states: &[&FieldState], out: W) -> Result<(), DynamicsError> {
    let mut w = BufWriter::new(out);
    writeln!(w, "{CSV_HEADER}")?;
    for s in states {
        for (j, (a, b)) in s.psi[0].iter().zip(&s.psi[1]).enumerate() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                s.t,
                s.grid.position(j),
                a.re,
                a.im,
                b.re,
                b.im
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Parses a trajectory CSV back into states on `grid`.
pub fn read_csv<R: Read>(grid: &Grid, input: R) -> Result<Vec<FieldState>, DynamicsError> {
    let reader = BufReader::new(input);
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != CSV_HEADER {
        return Err(DynamicsError::Format(format!("unexpected header {header:?}")));
    }
    let n = grid.n_points;
    let mut states = Vec::new();
    let mut current: Option<(f64, Vec<Complex64>, Vec<Complex64>)> = None;
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| DynamicsError::Format(format!("line {}: {e}", lineno + 2)))?;
        if cols.len() != 6 {
            return Err(DynamicsError::Format(format!(
                "line {}: expected 6 columns, got {}",
                lineno + 2,
                cols.len()
            )));
        }
        let entry = current.get_or_insert_with(|| (cols[0], Vec::with_capacity(n), Vec::with_capacity(n)));
        entry.1.push(Complex64::new(cols[2], cols[3]));
        entry.2.push(Complex64::new(cols[4], cols[5]));
        if entry.1.len() == n {
            let (t, a, b) = current.take().expect("present");
            states.push(FieldState::new(*grid, a, b, t)?);
        }
    }
    if current.is_some() {
        return Err(DynamicsError::Format("truncated final sample".into()));
    }
    Ok(states)
}

pub fn write_binary<W: Write>(states: &[&FieldState], out: W) -> Result<(), DynamicsError> {
    let mut w = BufWriter::new(out);
    let n_points = states.first().map_or(0, |s| s.grid.n_points);
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&BINARY_VERSION.to_le_bytes())?;
    w.write_all(&(n_points as u64).to_le_bytes())?;
    w.write_all(&(states.len() as u64).to_le_bytes())?;
    for s in states {
        w.write_all(&s.t.to_le_bytes())?;
        for (a, b) in s.psi[0].iter().zip(&s.psi[1]) {
            for v in [a.re, a.im, b.re, b.im] {
                w.write_all(&v.to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(grid: &Grid, input: R) -> Result<Vec<FieldState>, DynamicsError> {
    let mut r = BufReader::new(input);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(DynamicsError::Format("bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != BINARY_VERSION {
        return Err(DynamicsError::Format(format!("unsupported version {version}")));
    }
    r.read_exact(&mut b8)?;
    let n_points = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8)?;
    let n_samples = u64::from_le_bytes(b8) as usize;
    if n_samples > 0 && n_points != grid.n_points {
        return Err(DynamicsError::Format(format!(
            "file has {n_points} points, grid has {}",
            grid.n_points
        )));
    }
    let mut next = |r: &mut BufReader<R>| -> Result<f64, DynamicsError> {
        r.read_exact(&mut b8)?;
        Ok(f64::from_le_bytes(b8))
    };
    let mut states = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let t = next(&mut r)?;
        let mut a = Vec::with_capacity(n_points);
        let mut b = Vec::with_capacity(n_points);
        for _ in 0..n_points {
            let (ar, ai, br, bi) = (next(&mut r)?, next(&mut r)?, next(&mut r)?, next(&mut r)?);
            a.push(Complex64::new(ar, ai));
            b.push(Complex64::new(br, bi));
        }
        states.push(FieldState::new(*grid, a, b, t)?);
    }
    Ok(states)
}
