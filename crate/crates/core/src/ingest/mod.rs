//! Parsing, projection and cleaning of raw AIS reports.

mod clean;
mod land;
mod parse;
mod projection;
mod record;
pub mod store;

pub use clean::{clean, describe, CleaningConfig, Rules};
pub use land::{LandMask, Polygon};
pub use parse::{parse_ais_csv, Schema};
pub use projection::{Projection, EARTH_RADIUS_M};
pub use record::{AisRecord, Mmsi, RejectionRecord, RuleId};

use crate::error::Result;
use crate::exec::{self, Execution};

#[derive(Debug, Clone, Default)]
pub struct IngestOutput {
    pub accepted: Vec<AisRecord>,
    pub rejected: Vec<RejectionRecord>,
}

impl IngestOutput {
    pub fn rows(&self) -> usize {
        self.accepted.len() + self.rejected.len()
    }
}

/// Parse, project and clean a CSV buffer in one pass. Rows are processed
/// independently; output keeps input order and rejections carry the original
/// line text.
pub fn ingest_bytes(
    bytes: &[u8],
    schema: &Schema,
    rules: &Rules,
    exec: Execution,
) -> Result<IngestOutput> {
    let (columns, rows) = parse::split_rows(bytes, schema)?;
    let verdicts = exec::map(exec, &rows, |row| {
        let record = parse::decode_row(&columns, row)?;
        rules.admit(record).map_err(|rule| RejectionRecord {
            line: row.line,
            rule,
            raw: row.raw.clone(),
        })
    });
    let mut out = IngestOutput::default();
    for v in verdicts {
        match v {
            Ok(r) => out.accepted.push(r),
            Err(r) => out.rejected.push(r),
        }
    }
    Ok(out)
}
