//! Trajectory store: newline-delimited JSON.
//!
//! The first line is a header object `{"format":"aisdw-trajectories","version":1}`.
//! Every following line is one trajectory object with the fields `id`, `mmsi`,
//! `infer_stopped`, `duration`, `length`, optional `destination` and `points`
//! (an array of `{t, x, y[, sog, cog, heading, draught]}`). Floats are written
//! in shortest round-trip form, so reading back is lossless.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::model::Trajectory;

const FORMAT: &str = "aisdw-trajectories";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
}

pub fn write_trajectories(path: &Path, trajectories: &[Trajectory]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let header = Header {
        format: FORMAT.into(),
        version: VERSION,
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    for t in trajectories {
        serde_json::to_writer(&mut w, t)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_trajectories(path: &Path) -> Result<Vec<Trajectory>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let header: Header = match lines.next() {
        Some(line) => serde_json::from_str(&line.map_err(|e| Error::io(path, e))?)?,
        None => return Err(Error::format("trajectory store", "empty file")),
    };
    if header.format != FORMAT || header.version != VERSION {
        return Err(Error::format(
            "trajectory store",
            format!("unsupported header {} v{}", header.format, header.version),
        ));
    }
    let mut out = Vec::new();
    for line in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}
