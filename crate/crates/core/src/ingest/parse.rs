//! CSV decoding of raw AIS exports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::time::parse_timestamp;

use super::record::{AisRecord, Mmsi, RejectionRecord, RuleId};

/// Maps AIS fields to CSV column names. Defaults follow the Danish Maritime
/// Authority export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Schema {
    pub timestamp: String,
    pub mmsi: String,
    pub lat: String,
    pub lng: String,
    pub sog: String,
    pub cog: String,
    pub heading: String,
    pub draught: String,
    pub nav_status: String,
    pub ship_type: String,
    pub destination: String,
    pub dim_bow: String,
    pub dim_stern: String,
    pub dim_port: String,
    pub dim_starboard: String,
}

impl Default for Schema {
    fn default() -> Self {
        Schema {
            timestamp: "# Timestamp".into(),
            mmsi: "MMSI".into(),
            lat: "Latitude".into(),
            lng: "Longitude".into(),
            sog: "SOG".into(),
            cog: "COG".into(),
            heading: "Heading".into(),
            draught: "Draught".into(),
            nav_status: "Navigational status".into(),
            ship_type: "Ship type".into(),
            destination: "Destination".into(),
            dim_bow: "A".into(),
            dim_stern: "B".into(),
            dim_port: "C".into(),
            dim_starboard: "D".into(),
        }
    }
}

/// Header column positions resolved from a [`Schema`].
#[derive(Debug, Clone)]
pub(crate) struct Columns {
    width: usize,
    timestamp: usize,
    mmsi: usize,
    lat: usize,
    lng: usize,
    sog: Option<usize>,
    cog: Option<usize>,
    heading: Option<usize>,
    draught: Option<usize>,
    nav_status: Option<usize>,
    ship_type: Option<usize>,
    destination: Option<usize>,
    dims: [Option<usize>; 4],
}

impl Columns {
    pub fn resolve(header: &csv::StringRecord, schema: &Schema) -> Result<Self> {
        let find = |name: &str| header.iter().position(|h| h.trim() == name.trim());
        let need = |name: &str| find(name).ok_or_else(|| Error::MissingColumn(name.to_string()));
        Ok(Columns {
            width: header.len(),
            timestamp: need(&schema.timestamp)?,
            mmsi: need(&schema.mmsi)?,
            lat: need(&schema.lat)?,
            lng: need(&schema.lng)?,
            sog: find(&schema.sog),
            cog: find(&schema.cog),
            heading: find(&schema.heading),
            draught: find(&schema.draught),
            nav_status: find(&schema.nav_status),
            ship_type: find(&schema.ship_type),
            destination: find(&schema.destination),
            dims: [
                find(&schema.dim_bow),
                find(&schema.dim_stern),
                find(&schema.dim_port),
                find(&schema.dim_starboard),
            ],
        })
    }

    /// Decodes one data row. `Err(())` means a PARSE rejection.
    pub fn decode(&self, line: u64, rec: &csv::ByteRecord) -> std::result::Result<AisRecord, ()> {
        if rec.len() != self.width {
            return Err(());
        }
        let text = |i: usize| std::str::from_utf8(&rec[i]).map(str::trim).map_err(|_| ());
        let opt_text = |i: Option<usize>| -> std::result::Result<Option<String>, ()> {
            match i {
                None => Ok(None),
                Some(i) => {
                    let s = text(i)?;
                    Ok((!s.is_empty()).then(|| s.to_string()))
                }
            }
        };
        let opt_num = |i: Option<usize>| -> std::result::Result<Option<f64>, ()> {
            match i {
                None => Ok(None),
                Some(i) => {
                    let s = text(i)?;
                    if s.is_empty() {
                        return Ok(None);
                    }
                    let v: f64 = s.parse().map_err(|_| ())?;
                    if v.is_finite() {
                        Ok(Some(v))
                    } else {
                        Err(())
                    }
                }
            }
        };
        let num = |i: usize| -> std::result::Result<f64, ()> { opt_num(Some(i))?.ok_or(()) };

        let t = parse_timestamp(text(self.timestamp)?).ok_or(())?;
        let mmsi = Mmsi(text(self.mmsi)?.parse::<u32>().map_err(|_| ())?);
        let mut r = AisRecord::new(t, mmsi, num(self.lng)?, num(self.lat)?);
        r.line = line;
        // Out-of-band AIS sentinels (SOG 102.3, COG 360, heading 511) mean "not available".
        r.sog = opt_num(self.sog)?.filter(|v| (0.0..102.3).contains(v));
        r.cog = opt_num(self.cog)?.filter(|v| (0.0..360.0).contains(v));
        r.heading = opt_num(self.heading)?.filter(|v| (0.0..360.0).contains(v));
        r.draught = opt_num(self.draught)?;
        r.nav_status = opt_text(self.nav_status)?;
        r.ship_type = opt_text(self.ship_type)?;
        r.destination = opt_text(self.destination)?;
        r.dim_bow = opt_num(self.dims[0])?;
        r.dim_stern = opt_num(self.dims[1])?;
        r.dim_port = opt_num(self.dims[2])?;
        r.dim_starboard = opt_num(self.dims[3])?;
        Ok(r)
    }
}

/// One data row as it appeared in the input.
#[derive(Debug, Clone)]
pub struct RawRow {
    pub line: u64,
    pub raw: String,
    record: csv::ByteRecord,
}

/// Splits `bytes` into header columns and raw data rows.
pub(crate) fn split_rows(bytes: &[u8], schema: &Schema) -> Result<(Columns, Vec<RawRow>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes);
    let header = reader.headers()?.clone();
    let columns = Columns::resolve(&header, schema)?;

    let mut rows = Vec::new();
    let mut rec = csv::ByteRecord::new();
    loop {
        let start = reader.position().byte() as usize;
        // Unterminated quotes and similar become row-level rejections.
        let more = reader.read_byte_record(&mut rec).unwrap_or(true);
        if !more {
            break;
        }
        let end = (reader.position().byte() as usize).min(bytes.len());
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let raw = String::from_utf8_lossy(&bytes[start..end])
            .trim_end_matches(['\r', '\n'])
            .to_string();
        // Leading blank lines are swallowed by the reader; skip the offset.
        let raw = raw.trim_start_matches(['\r', '\n']).to_string();
        rows.push(RawRow {
            line,
            raw,
            record: rec.clone(),
        });
        if end >= bytes.len() {
            break;
        }
    }
    Ok((columns, rows))
}

/// Parses a whole CSV byte buffer. Output order matches input order.
pub fn parse_ais_csv(
    bytes: &[u8],
    schema: &Schema,
    exec: Execution,
) -> Result<Vec<std::result::Result<AisRecord, RejectionRecord>>> {
    let (columns, rows) = split_rows(bytes, schema)?;
    Ok(exec::map(exec, &rows, |row| decode_row(&columns, row)))
}

pub(crate) fn decode_row(
    columns: &Columns,
    row: &RawRow,
) -> std::result::Result<AisRecord, RejectionRecord> {
    columns
        .decode(row.line, &row.record)
        .map_err(|()| RejectionRecord {
            line: row.line,
            rule: RuleId::Parse,
            raw: row.raw.clone(),
        })
}
