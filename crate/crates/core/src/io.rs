//! File formats.
//!
//! # Snapshot
//!
//! All integers and floats little-endian:
//!
//! | field      | type                       |
//! |------------|----------------------------|
//! | magic      | `b"B3DSNAP\0"`             |
//! | version    | `u32` (currently 1)        |
//! | n          | `u32`                      |
//! | points     | `u32` (collocation points) |
//! | name_len   | `u32`                      |
//! | name       | `name_len` UTF-8 bytes     |
//! | time       | `f64`                      |
//! | coeffs     | `3(2n+1)³` pairs `(re, im)` of `f64` |
//!
//! Coefficients are component-major; within a component the index of `k₁`
//! varies slowest and `k₃` fastest, with `k_a + n` as the index along axis `a`.
//!
//! # CSV
//!
//! Diagnostics and convergence tables are plain CSV with a header row, floats
//! printed in the shortest form that reads back to the same bits.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use ndarray::Array4;
use num_complex::Complex64;
use serde::{de::DeserializeOwned, Serialize};

use crate::analysis::DiagnosticsRecord;
use crate::colehopf::ErrorRow;
use crate::dynamics::{RunConfig, Snapshot, TrajectoryHandle};
use crate::spectral::{SpectralVectorField, WavenumberGrid};
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"B3DSNAP\0";
pub const SNAPSHOT_VERSION: u32 = 1;

/// Contents of a snapshot file.
#[derive(Debug, Clone)]
pub struct SnapshotFile {
    pub name: String,
    pub time: f64,
    pub field: SpectralVectorField,
}

pub fn write_snapshot(path: &Path, name: &str, time: f64, field: &SpectralVectorField) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    encode_snapshot(&mut out, name, time, field)?;
    out.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<SnapshotFile> {
    decode_snapshot(&mut BufReader::new(File::open(path)?))
}

pub fn encode_snapshot(out: &mut impl Write, name: &str, time: f64, field: &SpectralVectorField) -> Result<()> {
    let grid = field.grid();
    let u32_of = |v: usize| u32::try_from(v).map_err(|_| Error::Format(format!("{v} does not fit the header")));
    out.write_all(MAGIC)?;
    out.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    out.write_all(&u32_of(grid.n())?.to_le_bytes())?;
    out.write_all(&u32_of(grid.physical_points())?.to_le_bytes())?;
    out.write_all(&u32_of(name.len())?.to_le_bytes())?;
    out.write_all(name.as_bytes())?;
    out.write_all(&time.to_le_bytes())?;
    for z in field.coeffs().iter() {
        out.write_all(&z.re.to_le_bytes())?;
        out.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn decode_snapshot(input: &mut impl Read) -> Result<SnapshotFile> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a snapshot file".into()));
    }
    let mut word = || -> Result<u32> {
        let mut b = [0u8; 4];
        input.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    };
    let version = word()?;
    if version != SNAPSHOT_VERSION {
        return Err(Error::Format(format!("unsupported snapshot version {version}")));
    }
    let (n, points, name_len) = (word()? as usize, word()? as usize, word()? as usize);
    let mut name = vec![0u8; name_len];
    input.read_exact(&mut name)?;
    let name = String::from_utf8(name).map_err(|e| Error::Format(format!("snapshot name: {e}")))?;
    let mut b = [0u8; 8];
    input.read_exact(&mut b)?;
    let time = f64::from_le_bytes(b);

    let grid = WavenumberGrid::with_points(n, points)?;
    let side = grid.side();
    let count = 3 * side * side * side;
    let mut raw = vec![0u8; 16 * count];
    input.read_exact(&mut raw).map_err(|_| Error::Format("truncated coefficient block".into()))?;
    if input.read(&mut [0u8; 1])? != 0 {
        return Err(Error::Format("trailing bytes after coefficient block".into()));
    }
    let coeffs: Vec<Complex64> = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    let coeffs = Array4::from_shape_vec((3, side, side, side), coeffs).expect("length checked");
    Ok(SnapshotFile { name, time, field: SpectralVectorField::from_coeffs(&grid, coeffs)? })
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

pub fn write_csv<T: Serialize>(out: impl Write, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of a CSV whose header must equal `columns`.
pub fn read_csv<T: DeserializeOwned>(input: impl Read, columns: &[&str]) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_error)?.iter().map(str::to_owned).collect();
    if header != columns {
        return Err(Error::Format(format!("expected columns {columns:?}, found {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

pub fn write_diagnostics(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    write_csv(BufWriter::new(File::create(path)?), records)
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    read_csv(BufReader::new(File::open(path)?), &DiagnosticsRecord::COLUMNS)
}

pub fn write_convergence(path: &Path, rows: &[ErrorRow]) -> Result<()> {
    write_csv(BufWriter::new(File::create(path)?), rows)
}

pub fn read_convergence(path: &Path) -> Result<Vec<ErrorRow>> {
    read_csv(BufReader::new(File::open(path)?), &ErrorRow::COLUMNS)
}

/// Trajectory directory: `diagnostics.csv` and `snapshots/NNNNNN.snap`, with
/// snapshots numbered in time order. The configuration is stored by the
/// caller (see the runner's manifest).
pub fn write_trajectory(dir: &Path, name: &str, traj: &TrajectoryHandle) -> Result<()> {
    let snaps = dir.join("snapshots");
    fs::create_dir_all(&snaps)?;
    write_diagnostics(&dir.join("diagnostics.csv"), &traj.diagnostics)?;
    for (i, s) in traj.snapshots.iter().enumerate() {
        write_snapshot(&snapshot_path(&snaps, i), name, s.t, &s.field)?;
    }
    Ok(())
}

fn snapshot_path(dir: &Path, i: usize) -> PathBuf {
    dir.join(format!("{i:06}.snap"))
}

pub fn read_trajectory(dir: &Path, config: RunConfig) -> Result<TrajectoryHandle> {
    let diagnostics = read_diagnostics(&dir.join("diagnostics.csv"))?;
    let snaps = dir.join("snapshots");
    let mut snapshots: Vec<Snapshot> = Vec::new();
    for i in 0.. {
        let path = snapshot_path(&snaps, i);
        if !path.exists() {
            break;
        }
        let file = read_snapshot(&path)?;
        if let Some(prev) = snapshots.last() {
            if !(file.time > prev.t) {
                return Err(Error::Format(format!("snapshot times not increasing at {}", path.display())));
            }
            if file.field.n() != prev.field.n() {
                return Err(Error::Format("snapshot grid changes along the run".into()));
            }
        }
        snapshots.push(Snapshot { t: file.time, field: file.field });
    }
    if snapshots.is_empty() {
        return Err(Error::Format(format!("no snapshots under {}", snaps.display())));
    }
    Ok(TrajectoryHandle { config, snapshots, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::WavenumberGrid;

    #[test]
    fn header_layout() {
        let g = WavenumberGrid::new(1).unwrap();
        let f = SpectralVectorField::constant(&g, [1.0, 0.0, 0.0]);
        let mut buf = Vec::new();
        encode_snapshot(&mut buf, "u", 0.5, &f).unwrap();
        assert_eq!(&buf[..8], MAGIC);
        assert_eq!(u32::from_le_bytes(buf[12..16].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(buf[16..20].try_into().unwrap()), 5);
        assert_eq!(buf.len(), 8 + 16 + 1 + 8 + 16 * 3 * 27);
        // The constant sits at the centre of component 0.
        let centre = 8 + 16 + 1 + 8 + 16 * 13;
        assert_eq!(f64::from_le_bytes(buf[centre..centre + 8].try_into().unwrap()), 1.0);
    }

    #[test]
    fn rejects_truncated_input() {
        let g = WavenumberGrid::new(1).unwrap();
        let mut buf = Vec::new();
        encode_snapshot(&mut buf, "u", 0.0, &SpectralVectorField::zeros(&g)).unwrap();
        buf.pop();
        assert!(matches!(decode_snapshot(&mut buf.as_slice()), Err(Error::Format(_))));
    }

    #[test]
    fn csv_header_is_checked() {
        let text = "t,l2\n0,1\n";
        let r: Result<Vec<DiagnosticsRecord>> = read_csv(text.as_bytes(), &DiagnosticsRecord::COLUMNS);
        assert!(matches!(r, Err(Error::Format(_))));
    }
}
