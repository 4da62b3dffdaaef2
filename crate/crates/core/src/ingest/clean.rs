//! Per-record cleaning rules.

use serde::{Deserialize, Serialize};

use crate::exec::{self, Execution};
use crate::geom::Domain;

use super::land::LandMask;
use super::projection::Projection;
use super::record::{AisRecord, RejectionRecord, RuleId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleaningConfig {
    pub check_mmsi: bool,
    pub check_dimensions: bool,
    /// Upper bound on bow + stern, meters.
    pub max_length_m: f64,
    /// Upper bound on port + starboard, meters.
    pub max_beam_m: f64,
}

impl Default for CleaningConfig {
    fn default() -> Self {
        CleaningConfig {
            check_mmsi: true,
            check_dimensions: true,
            max_length_m: 500.0,
            max_beam_m: 80.0,
        }
    }
}

/// The full rule set: thresholds plus the spatial context.
#[derive(Debug, Clone)]
pub struct Rules {
    pub config: CleaningConfig,
    pub projection: Projection,
    pub domain: Domain,
    pub land: Option<LandMask>,
}

fn total(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (None, None) => None,
        (a, b) => Some(a.unwrap_or(0.0) + b.unwrap_or(0.0)),
    }
}

impl Rules {
    pub fn new(config: CleaningConfig, projection: Projection, domain: Domain) -> Self {
        Rules {
            config,
            projection,
            domain,
            land: None,
        }
    }

    pub fn with_land(mut self, land: LandMask) -> Self {
        self.land = Some(land);
        self
    }

    /// Fills `x`/`y`; a RANGE failure leaves the record untouched.
    pub fn project(&self, record: &mut AisRecord) -> Result<(), RuleId> {
        let (x, y) = self
            .projection
            .forward(record.lat, record.lng)
            .ok_or(RuleId::Range)?;
        record.x = x;
        record.y = y;
        Ok(())
    }

    /// First failing rule for an already projected record.
    pub fn check(&self, r: &AisRecord) -> Option<RuleId> {
        if !Projection::in_range(r.lat, r.lng) {
            return Some(RuleId::Range);
        }
        if self.config.check_mmsi && !r.mmsi.is_valid() {
            return Some(RuleId::Mmsi);
        }
        if self.config.check_dimensions {
            let bad = |v: Option<f64>, max: f64| v.is_some_and(|v| !(v > 0.0 && v <= max));
            if bad(total(r.dim_bow, r.dim_stern), self.config.max_length_m)
                || bad(total(r.dim_port, r.dim_starboard), self.config.max_beam_m)
            {
                return Some(RuleId::Dimensions);
            }
        }
        if !self.domain.contains(r.x, r.y) {
            return Some(RuleId::Domain);
        }
        if self.land.as_ref().is_some_and(|l| l.contains(r.x, r.y)) {
            return Some(RuleId::OnLand);
        }
        None
    }

    /// Project and check in one step.
    pub fn admit(&self, mut r: AisRecord) -> Result<AisRecord, RuleId> {
        self.project(&mut r)?;
        match self.check(&r) {
            Some(rule) => Err(rule),
            None => Ok(r),
        }
    }
}

/// Renders a record as a compact line for the rejection audit when the
/// original text is no longer at hand.
pub fn describe(r: &AisRecord) -> String {
    format!(
        "{},{},{},{}",
        crate::time::format_dma(r.t),
        r.mmsi,
        r.lat,
        r.lng
    )
}

/// Splits already projected records into accepted and rejected.
pub fn clean(
    records: Vec<AisRecord>,
    rules: &Rules,
    exec: Execution,
) -> (Vec<AisRecord>, Vec<RejectionRecord>) {
    let verdicts = exec::map(exec, &records, |r| rules.check(r));
    let mut accepted = Vec::with_capacity(records.len());
    let mut rejected = Vec::new();
    for (r, verdict) in records.into_iter().zip(verdicts) {
        match verdict {
            None => accepted.push(r),
            Some(rule) => rejected.push(RejectionRecord {
                line: r.line,
                rule,
                raw: describe(&r),
            }),
        }
    }
    (accepted, rejected)
}
