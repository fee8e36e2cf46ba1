//! Pose CSV files.
//!
//! UTF-8, comma-separated, LF line endings, with one of the headers in
//! [`ReprTag::header`]. Values are written in shortest round-trip form, so a
//! save/load cycle reproduces every `f64` bit for bit.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::pose::{Pose, PoseSet, ReprTag, LOAD_TOLERANCE};

pub fn load_pose_csv(path: impl AsRef<Path>) -> Result<PoseSet> {
    let path = path.as_ref();
    let mut set = read_pose_csv(File::open(path)?, LOAD_TOLERANCE)?;
    set.set_source(path);
    Ok(set)
}

/// Like [`load_pose_csv`] with a custom orthogonality tolerance for matrix
/// rows.
pub fn load_pose_csv_with_tolerance(path: impl AsRef<Path>, tolerance: f64) -> Result<PoseSet> {
    let path = path.as_ref();
    let mut set = read_pose_csv(File::open(path)?, tolerance)?;
    set.set_source(path);
    Ok(set)
}

pub fn read_pose_csv<R: Read>(reader: R, tolerance: f64) -> Result<PoseSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header = rdr.headers().map_err(|e| parse_error(1, e))?.clone();
    let columns: Vec<&str> = header.iter().collect();
    let tag = ReprTag::from_header(&columns).ok_or_else(|| Error::Parse {
        line: 1,
        message: format!("unrecognized header {:?}", columns.join(",")),
    })?;

    let mut set = PoseSet::new(tag);
    let mut record = csv::StringRecord::new();
    loop {
        let more = rdr.read_record(&mut record).map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, e)
        })?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != tag.width() + 1 {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", tag.width() + 1, record.len()),
            });
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty id".into(),
            });
        }
        let values = record
            .iter()
            .skip(1)
            .map(|field| {
                field.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("{field:?} is not a number"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        let pose = Pose::from_values(tag, &values).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if !pose.passes_matrix_check(tolerance) {
            return Err(Error::InvalidMatrix(id));
        }
        set.insert(id, pose)?;
    }
    Ok(set)
}

fn parse_error(line: u64, e: csv::Error) -> Error {
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

pub fn save_pose_csv(set: &PoseSet, path: impl AsRef<Path>) -> Result<()> {
    write_pose_csv(set, File::create(path)?)
}

pub fn write_pose_csv<W: Write>(set: &PoseSet, writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    wtr.write_record(set.tag().header())?;
    for (id, pose) in set.iter() {
        let mut row = Vec::with_capacity(pose.values().len() + 1);
        row.push(id.to_string());
        row.extend(pose.values().iter().map(|v| format!("{v:?}")));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}
