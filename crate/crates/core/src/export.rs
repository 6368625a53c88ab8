//! Result files: frequency CSV, legacy VTK mode shapes and a metadata record.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analysis::{ModeGrid, ResultBundle};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Vtk,
}

impl Format {
    /// Parses a comma-separated list such as `csv,vtk`.
    pub fn parse_list(s: &str) -> Result<Vec<Format>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let f = match part.to_ascii_lowercase().as_str() {
                "csv" => Format::Csv,
                "vtk" => Format::Vtk,
                other => return Err(Error::Config(format!("unknown output format `{other}`"))),
            };
            if !out.contains(&f) {
                out.push(f);
            }
        }
        if out.is_empty() {
            return Err(Error::Config("no output format given".into()));
        }
        Ok(out)
    }
}

/// `v` with 9 significant digits in scientific notation.
fn sig9(v: f64) -> String {
    format!("{v:.8e}")
}

pub const CSV_HEADER: &str = "mode,omega_rad_s,omega_tilde";

pub fn frequencies_csv(omega: &[f64], omega_tilde: &[f64]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for (i, (w, wt)) in omega.iter().zip(omega_tilde).enumerate() {
        let _ = writeln!(s, "{},{},{}", i + 1, sig9(*w), sig9(*wt));
    }
    s
}

/// Reads a frequency table written by [`frequencies_csv`].
pub fn parse_frequencies_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err(Error::Config("frequency table header is missing".into()));
    }
    let (mut omega, mut tilde) = (Vec::new(), Vec::new());
    for (k, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split(',').collect();
        let bad = || Error::Config(format!("frequency table line {}: `{line}`", k + 2));
        if cols.len() != 3 || cols[0].trim().parse::<usize>().ok() != Some(omega.len() + 1) {
            return Err(bad());
        }
        omega.push(cols[1].trim().parse().map_err(|_| bad())?);
        tilde.push(cols[2].trim().parse().map_err(|_| bad())?);
    }
    Ok((omega, tilde))
}

/// Legacy ASCII unstructured grid of quads with one point scalar per mode.
pub fn mode_shapes_vtk(grid: &ModeGrid, title: &str) -> String {
    let n = grid.n;
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    let title: String = title.chars().filter(|c| *c != '\n').take(200).collect();
    let _ = writeln!(
        s,
        "{}",
        if title.is_empty() {
            "mode shapes"
        } else {
            &title
        }
    );
    s.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {} double", grid.points.len());
    for p in &grid.points {
        let _ = writeln!(s, "{} {} {}", sig9(p[0]), sig9(p[1]), sig9(p[2]));
    }
    let cells = if n < 2 { 0 } else { (n - 1) * (n - 1) };
    let _ = writeln!(s, "CELLS {} {}", cells, 5 * cells);
    for j in 0..n.saturating_sub(1) {
        for i in 0..n - 1 {
            let a = j * n + i;
            let _ = writeln!(s, "4 {} {} {} {}", a, a + 1, a + n + 1, a + n);
        }
    }
    let _ = writeln!(s, "CELL_TYPES {cells}");
    for _ in 0..cells {
        s.push_str("9\n");
    }
    if !grid.w.is_empty() {
        let _ = writeln!(s, "POINT_DATA {}", grid.points.len());
        for (m, w) in grid.w.iter().enumerate() {
            let _ = writeln!(s, "SCALARS mode_{} double 1\nLOOKUP_TABLE default", m + 1);
            for v in w {
                let _ = writeln!(s, "{}", sig9(*v));
            }
        }
    }
    s
}

pub fn metadata_json(b: &ResultBundle) -> String {
    serde_json::to_string_pretty(&b.metadata).expect("metadata serializes")
}

/// Writes the requested files into `dir`, creating it if needed.
pub fn write_results(b: &ResultBundle, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: String| -> Result<()> {
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        written.push(p);
        Ok(())
    };
    for f in formats {
        match f {
            Format::Csv => put("frequencies.csv", frequencies_csv(&b.omega, &b.omega_tilde))?,
            Format::Vtk => put("modes.vtk", mode_shapes_vtk(&b.grid, &b.metadata.name))?,
        }
    }
    put("metadata.json", metadata_json(b))?;
    Ok(written)
}
