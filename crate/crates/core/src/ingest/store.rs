//! On-disk formats for ingest output.
//!
//! Record store (`records.bin`), version 1, little-endian:
//!
//! ```text
//! magic "AISDWREC" | u32 version | u64 row count n
//! column line:  n x u64
//! column t:     n x i64
//! column mmsi:  n x u32
//! column lng, lat, x, y: n x f64 each
//! optional numeric columns sog, cog, heading, draught, dim_bow, dim_stern,
//!   dim_port, dim_starboard: n x u8 presence, then n x f64 (0 when absent)
//! optional text columns nav_status, ship_type, destination:
//!   per row u8 presence [+ u32 len + UTF-8 bytes]
//! ```
//!
//! Rejections are written as CSV with header `line,rule,raw`.

use std::path::Path;

use crate::codec;
use crate::error::{Error, Result};

use super::record::{AisRecord, Mmsi, RejectionRecord, RuleId};

const MAGIC: &[u8; 8] = b"AISDWREC";
const VERSION: u32 = 1;

type NumField = fn(&AisRecord) -> Option<f64>;
type NumFieldMut = fn(&mut AisRecord) -> &mut Option<f64>;

const NUMERIC: [(NumField, NumFieldMut); 8] = [
    (|r| r.sog, |r| &mut r.sog),
    (|r| r.cog, |r| &mut r.cog),
    (|r| r.heading, |r| &mut r.heading),
    (|r| r.draught, |r| &mut r.draught),
    (|r| r.dim_bow, |r| &mut r.dim_bow),
    (|r| r.dim_stern, |r| &mut r.dim_stern),
    (|r| r.dim_port, |r| &mut r.dim_port),
    (|r| r.dim_starboard, |r| &mut r.dim_starboard),
];

pub fn write_records(path: &Path, records: &[AisRecord]) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut enc = codec::create(path)?;
    enc.header(MAGIC, VERSION).map_err(io)?;
    enc.u64(records.len() as u64).map_err(io)?;
    for r in records {
        enc.u64(r.line).map_err(io)?;
    }
    for r in records {
        enc.i64(r.t).map_err(io)?;
    }
    for r in records {
        enc.u32(r.mmsi.0).map_err(io)?;
    }
    let coords: [fn(&AisRecord) -> f64; 4] = [|r| r.lng, |r| r.lat, |r| r.x, |r| r.y];
    for get in coords {
        for r in records {
            enc.f64(get(r)).map_err(io)?;
        }
    }
    for (get, _) in NUMERIC {
        for r in records {
            enc.u8(get(r).is_some() as u8).map_err(io)?;
        }
        for r in records {
            enc.f64(get(r).unwrap_or(0.0)).map_err(io)?;
        }
    }
    type TextField = fn(&AisRecord) -> Option<&str>;
    let text_fields: [TextField; 3] = [
        |r| r.nav_status.as_deref(),
        |r| r.ship_type.as_deref(),
        |r| r.destination.as_deref(),
    ];
    for get in text_fields {
        for r in records {
            enc.opt_str(get(r)).map_err(io)?;
        }
    }
    enc.finish().map_err(io)?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<AisRecord>> {
    let mut dec = codec::open(path, "record store")?;
    dec.header(MAGIC, VERSION)?;
    let n = dec.u64()? as usize;
    let mut rows: Vec<AisRecord> = (0..n)
        .map(|_| AisRecord::new(0, Mmsi(0), 0.0, 0.0))
        .collect();
    for r in rows.iter_mut() {
        r.line = dec.u64()?;
    }
    for r in rows.iter_mut() {
        r.t = dec.i64()?;
    }
    for r in rows.iter_mut() {
        r.mmsi = Mmsi(dec.u32()?);
    }
    let coords: [fn(&mut AisRecord, f64); 4] = [
        |r, v| r.lng = v,
        |r, v| r.lat = v,
        |r, v| r.x = v,
        |r, v| r.y = v,
    ];
    for set in coords {
        for r in rows.iter_mut() {
            set(r, dec.f64()?);
        }
    }
    for (_, field) in NUMERIC {
        let present: Vec<bool> = (0..n)
            .map(|_| dec.u8().map(|b| b != 0))
            .collect::<Result<_>>()?;
        for (r, p) in rows.iter_mut().zip(present) {
            let v = dec.f64()?;
            *field(r) = p.then_some(v);
        }
    }
    type TextFieldMut = fn(&mut AisRecord) -> &mut Option<String>;
    let text_fields: [TextFieldMut; 3] = [
        |r| &mut r.nav_status,
        |r| &mut r.ship_type,
        |r| &mut r.destination,
    ];
    for field in text_fields {
        for r in rows.iter_mut() {
            *field(r) = dec.opt_str()?;
        }
    }
    Ok(rows)
}

pub fn write_rejections(path: &Path, rejected: &[RejectionRecord]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["line", "rule", "raw"])?;
    for r in rejected {
        w.write_record([r.line.to_string().as_str(), r.rule.as_str(), r.raw.as_str()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_rejections(path: &Path) -> Result<Vec<RejectionRecord>> {
    let mut rd = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let bad = || Error::format("rejections", format!("bad row {row:?}"));
        let rule = match &row[1] {
            "PARSE" => RuleId::Parse,
            "RANGE" => RuleId::Range,
            "MMSI" => RuleId::Mmsi,
            "DIMENSIONS" => RuleId::Dimensions,
            "DOMAIN" => RuleId::Domain,
            "ON_LAND" => RuleId::OnLand,
            _ => return Err(bad()),
        };
        out.push(RejectionRecord {
            line: row[0].parse().map_err(|_| bad())?,
            rule,
            raw: row[2].to_string(),
        });
    }
    Ok(out)
}
