//! Cell-fact store: one CSV file per granularity.
//!
//! ```text
//! # aisdw cell-facts v1 granularity=<meters>
//! col,row,trajectory_id,mmsi,t_enter,t_exit,duration,avg_sog,delta_cog,delta_heading,min_draught,date_id,infer_stopped
//! ```
//!
//! `min_draught` is empty when absent; `infer_stopped` is `0` or `1`.
//! Floats use shortest round-trip formatting.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::ingest::Mmsi;

use super::cell::{CellKey, Granularity};
use super::rollup::CellEvent;

const VERSION: u32 = 1;

const COLUMNS: [&str; 13] = [
    "col",
    "row",
    "trajectory_id",
    "mmsi",
    "t_enter",
    "t_exit",
    "duration",
    "avg_sog",
    "delta_cog",
    "delta_heading",
    "min_draught",
    "date_id",
    "infer_stopped",
];

pub fn cell_fact_path(dir: &Path, g: Granularity) -> PathBuf {
    dir.join(format!("cell_facts_{}.csv", g.meters()))
}

pub fn write_cell_facts(path: &Path, g: Granularity, events: &[CellEvent]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    writeln!(
        file,
        "# aisdw cell-facts v{VERSION} granularity={}",
        g.meters()
    )
    .map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    w.write_record(COLUMNS)?;
    for e in events {
        debug_assert_eq!(e.cell.granularity, g);
        w.write_record([
            e.cell.col.to_string(),
            e.cell.row.to_string(),
            e.trajectory_id.to_string(),
            e.mmsi.0.to_string(),
            e.t_enter.to_string(),
            e.t_exit.to_string(),
            e.duration.to_string(),
            e.avg_sog.to_string(),
            e.delta_cog.to_string(),
            e.delta_heading.to_string(),
            e.min_draught.map(|v| v.to_string()).unwrap_or_default(),
            e.date_id.to_string(),
            (e.infer_stopped as u8).to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_cell_facts(path: &Path) -> Result<(Granularity, Vec<CellEvent>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let first = text.lines().next().unwrap_or_default();
    let prefix = format!("# aisdw cell-facts v{VERSION} granularity=");
    let g = first
        .strip_prefix(&prefix)
        .and_then(|m| m.trim().parse::<u32>().ok())
        .ok_or_else(|| Error::format("cell facts", format!("bad header line `{first}`")))?;
    let g = Granularity::from_meters(g)?;

    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let bad = || Error::format("cell facts", format!("bad row {row:?}"));
        let num = |i: usize| row[i].parse::<f64>().map_err(|_| bad());
        let int = |i: usize| row[i].parse::<u64>().map_err(|_| bad());
        out.push(CellEvent {
            cell: CellKey::new(g, int(0)? as u32, int(1)? as u32),
            trajectory_id: int(2)?,
            mmsi: Mmsi(int(3)? as u32),
            t_enter: num(4)?,
            t_exit: num(5)?,
            duration: num(6)?,
            avg_sog: num(7)?,
            delta_cog: num(8)?,
            delta_heading: num(9)?,
            min_draught: if row[10].is_empty() {
                None
            } else {
                Some(num(10)?)
            },
            date_id: int(11)? as u32,
            infer_stopped: &row[12] == "1",
        });
    }
    Ok((g, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let e = CellEvent {
            cell: CellKey::new(Granularity::M200, 17, 3),
            trajectory_id: 42,
            mmsi: Mmsi(219_000_001),
            t_enter: 1_614_470_400.123_456_7,
            t_exit: 1_614_470_460.5,
            duration: 60.376543211,
            avg_sog: 1.0 / 3.0,
            delta_cog: 0.0,
            delta_heading: 12.5,
            min_draught: None,
            date_id: 20210228,
            infer_stopped: true,
        };
        let mut f = e.clone();
        f.min_draught = Some(6.25);
        f.infer_stopped = false;
        let dir = tempfile::tempdir().unwrap();
        let path = cell_fact_path(dir.path(), Granularity::M200);
        write_cell_facts(&path, Granularity::M200, &[e.clone(), f.clone()]).unwrap();
        let (g, back) = read_cell_facts(&path).unwrap();
        assert_eq!(g, Granularity::M200);
        assert_eq!(back, vec![e, f]);
    }
}
