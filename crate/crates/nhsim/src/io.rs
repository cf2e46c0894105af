//! File formats: observable series as CSV, wave-field snapshots in the
//! `NHSIM1` binary layout.
//!
//! Snapshot layout (little-endian): magic `NHSIM1\0`, `u32` dim, `u32` n,
//! `f64` half-width, `f64` time, then `n^dim` pairs of `f64` (real,
//! imaginary) in row-major order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::{Grid, GridError, WaveField};
use crate::observables::{ObservableRecord, ObservableSeries};

const SNAPSHOT_MAGIC: &[u8; 7] = b"NHSIM1\0";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: not an NHSIM1 snapshot")]
    BadMagic { path: String },
    #[error("{path}: malformed {what}")]
    Malformed { path: String, what: String },
    #[error(transparent)]
    Grid(#[from] GridError),
}

fn file_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::File {
        path: path.display().to_string(),
        source,
    }
}

/// CSV with header `t,mass,energy,momentum_x[,momentum_y],com_x[,com_y],
/// grad_norm,weighted_norm`, 17 significant digits, LF line endings.
pub fn emit_series(series: &ObservableSeries, dim: usize, path: &Path) -> Result<(), IoError> {
    let mut out = String::new();
    out.push_str(&series_header(dim));
    out.push('\n');
    for (t, r) in series.iter() {
        out.push_str(&format!("{:.16e},{:.16e},{:.16e}", t, r.mass, r.energy));
        out.push_str(&format!(",{:.16e}", r.momentum[0]));
        if dim == 2 {
            out.push_str(&format!(",{:.16e}", r.momentum[1]));
        }
        out.push_str(&format!(",{:.16e}", r.center_of_mass[0]));
        if dim == 2 {
            out.push_str(&format!(",{:.16e}", r.center_of_mass[1]));
        }
        out.push_str(&format!(",{:.16e},{:.16e}\n", r.grad_norm, r.weighted_norm));
    }
    let mut f = BufWriter::new(File::create(path).map_err(file_err(path))?);
    f.write_all(out.as_bytes()).map_err(file_err(path))?;
    Ok(())
}

fn series_header(dim: usize) -> String {
    if dim == 2 {
        "t,mass,energy,momentum_x,momentum_y,com_x,com_y,grad_norm,weighted_norm".into()
    } else {
        "t,mass,energy,momentum_x,com_x,grad_norm,weighted_norm".into()
    }
}

/// Parses a series CSV back; the dimension is inferred from the header.
pub fn parse_series(path: &Path) -> Result<(ObservableSeries, usize), IoError> {
    let text = std::fs::read_to_string(path).map_err(file_err(path))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| IoError::Malformed {
        path: path.display().to_string(),
        what: "empty file".into(),
    })?;
    let dim = if header == series_header(2) {
        2
    } else if header == series_header(1) {
        1
    } else {
        return Err(IoError::Malformed {
            path: path.display().to_string(),
            what: format!("header `{header}`"),
        });
    };
    let mut series = ObservableSeries::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
        let fields = fields.map_err(|_| IoError::Malformed {
            path: path.display().to_string(),
            what: format!("line {}", lineno + 2),
        })?;
        let expect = if dim == 2 { 9 } else { 7 };
        if fields.len() != expect {
            return Err(IoError::Malformed {
                path: path.display().to_string(),
                what: format!(
                    "line {}: {} fields, expected {expect}",
                    lineno + 2,
                    fields.len()
                ),
            });
        }
        let (momentum, com, tail) = if dim == 2 {
            (
                [fields[3], fields[4]],
                [fields[5], fields[6]],
                (fields[7], fields[8]),
            )
        } else {
            ([fields[3], 0.0], [fields[4], 0.0], (fields[5], fields[6]))
        };
        series.push(
            fields[0],
            ObservableRecord {
                mass: fields[1],
                energy: fields[2],
                momentum,
                center_of_mass: com,
                grad_norm: tail.0,
                weighted_norm: tail.1,
            },
        );
    }
    Ok((series, dim))
}

/// Writes a wave field in the `NHSIM1` binary snapshot layout.
pub fn write_snapshot(field: &WaveField, path: &Path) -> Result<(), IoError> {
    let grid = field.grid();
    let mut f = BufWriter::new(File::create(path).map_err(file_err(path))?);
    f.write_all(SNAPSHOT_MAGIC).map_err(file_err(path))?;
    f.write_all(&(grid.dim() as u32).to_le_bytes())
        .map_err(file_err(path))?;
    f.write_all(&(grid.n() as u32).to_le_bytes())
        .map_err(file_err(path))?;
    f.write_all(&grid.half_width().to_le_bytes())
        .map_err(file_err(path))?;
    f.write_all(&field.time.to_le_bytes())
        .map_err(file_err(path))?;
    for v in field.values() {
        f.write_all(&v.re.to_le_bytes()).map_err(file_err(path))?;
        f.write_all(&v.im.to_le_bytes()).map_err(file_err(path))?;
    }
    f.flush().map_err(file_err(path))?;
    Ok(())
}

/// Reads a field written by [`write_snapshot`].
pub fn read_snapshot(path: &Path) -> Result<WaveField, IoError> {
    let mut f = BufReader::new(File::open(path).map_err(file_err(path))?);
    let mut magic = [0u8; 7];
    f.read_exact(&mut magic).map_err(file_err(path))?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(IoError::BadMagic {
            path: path.display().to_string(),
        });
    }
    let mut u32buf = [0u8; 4];
    let mut f64buf = [0u8; 8];
    f.read_exact(&mut u32buf).map_err(file_err(path))?;
    let dim = u32::from_le_bytes(u32buf) as usize;
    f.read_exact(&mut u32buf).map_err(file_err(path))?;
    let n = u32::from_le_bytes(u32buf) as usize;
    f.read_exact(&mut f64buf).map_err(file_err(path))?;
    let half_width = f64::from_le_bytes(f64buf);
    f.read_exact(&mut f64buf).map_err(file_err(path))?;
    let time = f64::from_le_bytes(f64buf);

    let grid = Grid::new(dim, n, half_width)?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        f.read_exact(&mut f64buf).map_err(file_err(path))?;
        let re = f64::from_le_bytes(f64buf);
        f.read_exact(&mut f64buf).map_err(file_err(path))?;
        let im = f64::from_le_bytes(f64buf);
        values.push(Complex64::new(re, im));
    }
    Ok(WaveField::new(grid, values, time)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::ObservableRecord;

    fn record(seed: f64) -> ObservableRecord {
        ObservableRecord {
            mass: 1.2533141373155003 + seed,
            energy: -0.123456789012345e-3,
            momentum: [0.5 * seed, 0.0],
            center_of_mass: [1.0 + seed, 0.0],
            grad_norm: 2.0_f64.sqrt(),
            weighted_norm: 3.0_f64.sqrt(),
        }
    }

    #[test]
    fn empty_series_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        emit_series(&ObservableSeries::new(), 1, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "t,mass,energy,momentum_x,com_x,grad_norm,weighted_norm\n"
        );
    }

    #[test]
    fn series_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let mut series = ObservableSeries::new();
        series.push(0.0, record(0.0));
        series.push(0.12345678901234567, record(0.25));
        emit_series(&series, 1, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(!text.contains('\r'));
        let (back, dim) = parse_series(&path).unwrap();
        assert_eq!(dim, 1);
        assert_eq!(back.times(), series.times());
        assert_eq!(back.records(), series.records());
    }

    #[test]
    fn snapshot_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.snap");
        let grid = Grid::new(1, 64, 5.0).unwrap();
        let field = WaveField::from_fn(grid, |x| {
            Complex64::new((-x[0] * x[0]).exp(), (x[0] * 0.3).sin())
        });
        let mut field = field;
        field.time = 0.625;
        write_snapshot(&field, &path).unwrap();
        let back = read_snapshot(&path).unwrap();
        assert_eq!(back, field);
        // layout check: header is 7 + 4 + 4 + 8 + 8 bytes, then 16 per point
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes.len(), 31 + 16 * grid.len());
        assert_eq!(&bytes[..7], b"NHSIM1\0");
    }

    #[test]
    fn snapshot_rejects_foreign_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.snap");
        std::fs::write(&path, b"NOTASNAPSHOT____________").unwrap();
        assert!(matches!(
            read_snapshot(&path),
            Err(IoError::BadMagic { .. })
        ));
    }
}
