//! Timestamp helpers. Timestamps are whole or fractional seconds since the
//! Unix epoch, UTC.

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime};

pub const SECONDS_PER_DAY: i64 = 86_400;

/// Parses `DD/MM/YYYY HH:MM:SS`, falling back to ISO-8601.
pub fn parse_timestamp(s: &str) -> Option<i64> {
    let s = s.trim();
    if let Ok(dt) = NaiveDateTime::parse_from_str(s, "%d/%m/%Y %H:%M:%S") {
        return Some(dt.and_utc().timestamp());
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp());
    }
    for fmt in [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M:%SZ",
    ] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt.and_utc().timestamp());
        }
    }
    None
}

pub fn format_dma(t: i64) -> String {
    DateTime::from_timestamp(t, 0)
        .map(|dt| dt.format("%d/%m/%Y %H:%M:%S").to_string())
        .unwrap_or_default()
}

/// Start of the UTC day containing `t`.
pub fn day_start(t: f64) -> f64 {
    (t / SECONDS_PER_DAY as f64).floor() * SECONDS_PER_DAY as f64
}

/// `YYYYMMDD` of the UTC day containing `t`.
pub fn date_id(t: f64) -> u32 {
    let day = (t / SECONDS_PER_DAY as f64).floor() as i64;
    let date = DateTime::from_timestamp(day * SECONDS_PER_DAY, 0)
        .expect("timestamp in chrono range")
        .date_naive();
    date.year() as u32 * 10_000 + date.month() * 100 + date.day()
}

pub fn parse_date_id(id: u32) -> Option<NaiveDate> {
    NaiveDate::from_ymd_opt((id / 10_000) as i32, (id / 100) % 100, id % 100)
}

/// Seconds since the epoch at midnight of `id`.
pub fn date_id_start(id: u32) -> Option<i64> {
    parse_date_id(id).map(|d| d.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp())
}
