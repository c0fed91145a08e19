//! Point CSV and landmark JSON ingestion.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{LandmarkSet, Point, PointSet};

/// Reads one point per row. A first row that does not parse as numbers is
/// treated as a header.
pub fn read_points<R: Read>(reader: R) -> Result<PointSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut points = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(coords) => points.push(Point::new(coords)?),
            Err(_) if row == 0 => continue,
            Err(e) => {
                return Err(Error::InvalidInput(format!(
                    "row {}: {e}",
                    row + 1
                )))
            }
        }
    }
    PointSet::new(points)
}

pub fn read_points_file(path: impl AsRef<Path>) -> Result<PointSet> {
    read_points(File::open(path)?)
}

pub fn write_points<W: Write>(points: &PointSet, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(writer);
    for p in points.iter() {
        w.write_record(p.iter().map(|c| format!("{c:?}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_landmarks<R: Read>(reader: R) -> Result<LandmarkSet> {
    Ok(serde_json::from_reader(reader)?)
}

pub fn read_landmarks_file(path: impl AsRef<Path>) -> Result<LandmarkSet> {
    read_landmarks(File::open(path)?)
}
