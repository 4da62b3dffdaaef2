use std::fmt;

use serde::{Deserialize, Serialize};

/// Maritime Mobile Service Identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mmsi(pub u32);

impl Mmsi {
    /// Exactly nine decimal digits, excluding repeated-digit sentinels
    /// such as 111111111.
    pub fn is_valid(self) -> bool {
        let v = self.0;
        if !(100_000_000..=999_999_999).contains(&v) {
            return false;
        }
        !v.is_multiple_of(111_111_111)
    }
}

impl fmt::Display for Mmsi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One decoded AIS position report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AisRecord {
    /// 1-based source line in the input file (the header is line 1).
    pub line: u64,
    /// Seconds since the Unix epoch, UTC.
    pub t: i64,
    pub lng: f64,
    pub lat: f64,
    /// Planar meters, filled by projection.
    pub x: f64,
    pub y: f64,
    pub mmsi: Mmsi,
    pub sog: Option<f64>,
    pub cog: Option<f64>,
    pub heading: Option<f64>,
    pub draught: Option<f64>,
    pub nav_status: Option<String>,
    pub ship_type: Option<String>,
    pub destination: Option<String>,
    pub dim_bow: Option<f64>,
    pub dim_stern: Option<f64>,
    pub dim_port: Option<f64>,
    pub dim_starboard: Option<f64>,
}

impl AisRecord {
    pub fn new(t: i64, mmsi: Mmsi, lng: f64, lat: f64) -> Self {
        AisRecord {
            line: 0,
            t,
            lng,
            lat,
            x: 0.0,
            y: 0.0,
            mmsi,
            sog: None,
            cog: None,
            heading: None,
            draught: None,
            nav_status: None,
            ship_type: None,
            destination: None,
            dim_bow: None,
            dim_stern: None,
            dim_port: None,
            dim_starboard: None,
        }
    }
}

/// Cleaning and parsing rule identifiers, in evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RuleId {
    Parse,
    Range,
    Mmsi,
    Dimensions,
    Domain,
    OnLand,
}

impl RuleId {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::Parse => "PARSE",
            RuleId::Range => "RANGE",
            RuleId::Mmsi => "MMSI",
            RuleId::Dimensions => "DIMENSIONS",
            RuleId::Domain => "DOMAIN",
            RuleId::OnLand => "ON_LAND",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionRecord {
    pub line: u64,
    pub rule: RuleId,
    pub raw: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mmsi_validity() {
        assert!(Mmsi(219_000_123).is_valid());
        assert!(!Mmsi(12_345).is_valid());
        assert!(!Mmsi(0).is_valid());
        assert!(!Mmsi(1_000_000_000).is_valid());
        for d in 1..=9 {
            assert!(!Mmsi(111_111_111 * d).is_valid());
        }
        assert!(Mmsi(111_111_112).is_valid());
    }
}
