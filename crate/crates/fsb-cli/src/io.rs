//! CSV formats: curve series, sd curves, selection reports, and the VAR
//! model dump used for debugging and cross-language comparison.
//!
//! Curve series format: header `tau,<τ₁>,…,<τ_T>`, then one row
//! `t,<x_t(τ₁)>,…,<x_t(τ_T)>` per curve. Values are written with Rust's
//! shortest round-trip float formatting, so reading them back is exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;

use fsb::curve::{FunctionalSeries, Grid};
use fsb::select::SelectionReport;
use fsb::var::VarModel;

use crate::{Error, Result};

/// Trapezoidal quadrature weights for explicit grid points.
fn trapezoid_weights(points: &[f64]) -> Vec<f64> {
    let t = points.len();
    let mut w = vec![0.0; t];
    for i in 0..t - 1 {
        let h = points[i + 1] - points[i];
        w[i] += h / 2.0;
        w[i + 1] += h / 2.0;
    }
    w
}

/// Grid from explicit points with trapezoidal weights.
pub fn grid_from_points(points: Vec<f64>) -> Result<Arc<Grid>> {
    let weights = trapezoid_weights(&points);
    Ok(Grid::new(points, weights)?)
}

pub fn write_series(path: &Path, series: &FunctionalSeries) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "tau")?;
    for p in series.grid().points() {
        write!(out, ",{p}")?;
    }
    writeln!(out)?;
    for t in 0..series.len() {
        write!(out, "{}", t + 1)?;
        for j in 0..series.grid().len() {
            write!(out, ",{}", series.matrix()[(t, j)])?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_series(path: &Path) -> Result<FunctionalSeries> {
    let file = BufReader::new(File::open(path)?);
    let mut lines = file.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::format(path, 1, "empty file"))?;
    let header = header?;
    let mut fields = header.split(',');
    if fields.next() != Some("tau") {
        return Err(Error::format(path, 1, "header must start with 'tau'"));
    }
    let points: Vec<f64> = fields
        .map(|f| {
            f.parse::<f64>()
                .map_err(|e| Error::format(path, 1, format!("bad grid point {f:?}: {e}")))
        })
        .collect::<Result<_>>()?;
    let grid = grid_from_points(points)?;
    let t_len = grid.len();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let t_field = fields
            .next()
            .ok_or_else(|| Error::format(path, idx + 1, "missing time index"))?;
        let t: usize = t_field
            .parse()
            .map_err(|e| Error::format(path, idx + 1, format!("bad time index {t_field:?}: {e}")))?;
        if t != rows.len() + 1 {
            return Err(Error::format(
                path,
                idx + 1,
                format!("time index {t} out of order (expected {})", rows.len() + 1),
            ));
        }
        let values: Vec<f64> = fields
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| Error::format(path, idx + 1, format!("bad value {f:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        if values.len() != t_len {
            return Err(Error::format(
                path,
                idx + 1,
                format!("expected {t_len} values, got {}", values.len()),
            ));
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(Error::format(path, 2, "no curves in file"));
    }
    let matrix = DMatrix::from_fn(rows.len(), t_len, |i, j| rows[i][j]);
    Ok(FunctionalSeries::from_matrix(grid, matrix)?)
}

/// Writes a `tau,<name>` two-column table, e.g. a per-τ sd curve.
pub fn write_tau_columns(
    path: &Path,
    comment: Option<&str>,
    grid: &Grid,
    columns: &[(&str, &[f64])],
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    if let Some(c) = comment {
        writeln!(out, "# {c}")?;
    }
    write!(out, "tau")?;
    for (name, _) in columns {
        write!(out, ",{name}")?;
    }
    writeln!(out)?;
    for (i, p) in grid.points().iter().enumerate() {
        write!(out, "{p}")?;
        for (_, col) in columns {
            write!(out, ",{}", col[i])?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes a generic result table with an optional `#` comment line.
pub fn write_table(
    path: &Path,
    comment: Option<&str>,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    if let Some(c) = comment {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Writes a selection report as `candidate,value,chosen`.
pub fn write_selection_report(path: &Path, report: &SelectionReport) -> Result<()> {
    let rows: Vec<Vec<String>> = report
        .candidates
        .iter()
        .map(|&(cand, value)| {
            vec![
                cand.to_string(),
                value.to_string(),
                (cand == report.chosen).to_string(),
            ]
        })
        .collect();
    write_table(
        path,
        Some(&format!("criterion {}", report.criterion)),
        &["candidate", "value", "chosen"],
        &rows,
    )
}

/// Dumps a fitted VAR model as CSV blocks: `A j` headers for each
/// coefficient matrix, `Sigma` for the innovation covariance, and
/// `residual t` lines for the centered residual pool.
pub fn write_var_model(path: &Path, model: &VarModel) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let m = model.dim();
    for (j, a) in model.coefficients().iter().enumerate() {
        writeln!(out, "A {}", j + 1)?;
        for r in 0..m {
            let row: Vec<String> = (0..m).map(|c| a[(r, c)].to_string()).collect();
            writeln!(out, "{}", row.join(","))?;
        }
    }
    writeln!(out, "Sigma")?;
    for r in 0..m {
        let row: Vec<String> = (0..m).map(|c| model.sigma_e()[(r, c)].to_string()).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    let pool = model.residual_pool();
    for t in 0..pool.nrows() {
        writeln!(out, "residual {}", t + 1)?;
        let row: Vec<String> = (0..m).map(|c| pool[(t, c)].to_string()).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a model dump back; the stored `Sigma` must agree with the pool's
/// covariance to within rounding.
pub fn read_var_model(path: &Path) -> Result<VarModel> {
    let file = BufReader::new(File::open(path)?);
    let mut a_blocks: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut sigma_rows: Vec<Vec<f64>> = Vec::new();
    let mut residual_rows: Vec<Vec<f64>> = Vec::new();
    #[derive(PartialEq)]
    enum Section {
        None,
        A,
        Sigma,
        Residual,
    }
    let mut section = Section::None;
    for (idx, line) in file.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("A ") {
            let j: usize = rest
                .parse()
                .map_err(|e| Error::format(path, idx + 1, format!("bad block index: {e}")))?;
            if j != a_blocks.len() + 1 {
                return Err(Error::format(path, idx + 1, "coefficient blocks out of order"));
            }
            a_blocks.push(Vec::new());
            section = Section::A;
        } else if trimmed == "Sigma" {
            section = Section::Sigma;
        } else if trimmed.starts_with("residual ") {
            section = Section::Residual;
        } else {
            let row: Vec<f64> = trimmed
                .split(',')
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| Error::format(path, idx + 1, format!("bad number {f:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            match section {
                Section::A => a_blocks.last_mut().unwrap().push(row),
                Section::Sigma => sigma_rows.push(row),
                Section::Residual => residual_rows.push(row),
                Section::None => {
                    return Err(Error::format(path, idx + 1, "data before any block header"))
                }
            }
        }
    }
    let m = sigma_rows.len();
    if m == 0 || a_blocks.is_empty() {
        return Err(Error::format(path, 1, "model dump lacks A or Sigma blocks"));
    }
    let a: Vec<DMatrix<f64>> = a_blocks
        .iter()
        .map(|rows| DMatrix::from_fn(m, m, |r, c| rows[r][c]))
        .collect();
    let pool = DMatrix::from_fn(residual_rows.len(), m, |r, c| residual_rows[r][c]);
    let model = VarModel::from_parts(a, pool)?;
    let stored = DMatrix::from_fn(m, m, |r, c| sigma_rows[r][c]);
    if (model.sigma_e() - &stored).amax() > 1e-8 {
        return Err(Error::format(
            path,
            1,
            "stored Sigma disagrees with the residual pool covariance",
        ));
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fsb::curve::Curve;
    use fsb::fpca::ScoreSeries;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use tempfile::tempdir;

    #[test]
    fn series_round_trips_exactly() {
        let grid = Grid::uniform(7);
        let curves: Vec<Curve> = (0..4)
            .map(|k| Curve::from_fn(grid.clone(), move |t| (k as f64 * 1.37 + t * 0.923).sin() / 3.0))
            .collect();
        let series = FunctionalSeries::new(grid, curves).unwrap();
        let dir = tempdir().unwrap();
        let path = dir.path().join("series.csv");
        write_series(&path, &series).unwrap();
        let back = read_series(&path).unwrap();
        assert_eq!(series.matrix(), back.matrix());
        assert_eq!(series.grid().points(), back.grid().points());
        for (a, b) in series.grid().weights().iter().zip(back.grid().weights()) {
            assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn malformed_series_files_are_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");

        std::fs::write(&path, "time,0,1\n1,1,2\n").unwrap();
        assert!(read_series(&path).is_err(), "bad header token");

        std::fs::write(&path, "tau,0,0.5,1\n2,1,2,3\n").unwrap();
        assert!(read_series(&path).is_err(), "time index out of order");

        std::fs::write(&path, "tau,0,0.5,1\n1,1,2\n").unwrap();
        assert!(read_series(&path).is_err(), "short row");

        std::fs::write(&path, "tau,0,0.5,1\n").unwrap();
        assert!(read_series(&path).is_err(), "no curves");
    }

    #[test]
    fn var_model_dump_round_trips() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let scores = ScoreSeries::from_matrix(DMatrix::from_fn(40, 2, |_, _| {
            rng.random::<f64>() - 0.5
        }));
        let model = VarModel::fit(&scores, 2).unwrap();
        let dir = tempdir().unwrap();
        let path = dir.path().join("model.csv");
        write_var_model(&path, &model).unwrap();
        let back = read_var_model(&path).unwrap();
        assert_eq!(model.order(), back.order());
        for (a, b) in model.coefficients().iter().zip(back.coefficients()) {
            assert_eq!(a, b);
        }
        assert_eq!(model.residual_pool(), back.residual_pool());
        assert!((model.sigma_e() - back.sigma_e()).amax() <= 1e-12);
    }
}
