use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::division::DivisionSet;
use super::grid::CountGrid;

/// Shard balance: population standard deviation and coefficient of
/// variation (percent) of per-division counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub sd: f64,
    pub cv: f64,
    pub counts: Vec<u64>,
}

impl BalanceReport {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let n = counts.len().max(1) as f64;
        let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
        let var = counts
            .iter()
            .map(|&c| (c as f64 - mean).powi(2))
            .sum::<f64>()
            / n;
        let sd = var.sqrt();
        let cv = if mean > 0.0 { sd / mean * 100.0 } else { 0.0 };
        BalanceReport { sd, cv, counts }
    }
}

/// Validates that `divisions` partition the grid's domain, then measures
/// balance over counts recomputed from `grid`.
pub fn balance(divisions: &DivisionSet, grid: &CountGrid) -> Result<BalanceReport> {
    divisions.validate()?;
    if divisions.domain != grid.domain {
        return Err(crate::Error::Validation(
            "division set and count grid cover different domains".into(),
        ));
    }
    Ok(BalanceReport::from_counts(divisions.recount(grid)))
}
