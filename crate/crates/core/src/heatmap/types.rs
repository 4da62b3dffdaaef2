use serde::{Deserialize, Serialize};

use crate::grid::CellEvent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggKind {
    Sum,
    Min,
    /// Stored as a sum band and a count band.
    Avg,
}

/// Per-event value fed into a heatmap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// 1 per event.
    Count,
    /// Seconds spent in the cell.
    Time,
    DeltaHeading,
    DeltaCog,
    Draught,
    Sog,
}

impl Measure {
    pub fn value(self, e: &CellEvent) -> Option<f64> {
        match self {
            Measure::Count => Some(1.0),
            Measure::Time => Some(e.duration),
            Measure::DeltaHeading => Some(e.delta_heading),
            Measure::DeltaCog => Some(e.delta_cog),
            Measure::Draught => e.min_draught,
            Measure::Sog => Some(e.avg_sog),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapType {
    pub id: u32,
    pub name: String,
    pub kind: AggKind,
    pub measure: Measure,
    #[serde(default)]
    pub description: String,
}

impl HeatmapType {
    pub fn new(id: u32, name: &str, kind: AggKind, measure: Measure, description: &str) -> Self {
        HeatmapType {
            id,
            name: name.to_string(),
            kind,
            measure,
            description: description.to_string(),
        }
    }

    pub fn bands(&self) -> usize {
        match self.kind {
            AggKind::Avg => 2,
            AggKind::Sum | AggKind::Min => 1,
        }
    }

    /// The five standard types.
    pub fn builtins() -> Vec<HeatmapType> {
        vec![
            HeatmapType::new(
                1,
                "count",
                AggKind::Sum,
                Measure::Count,
                "ships crossing a cell",
            ),
            HeatmapType::new(
                2,
                "time",
                AggKind::Sum,
                Measure::Time,
                "accumulated seconds spent in a cell",
            ),
            HeatmapType::new(
                3,
                "delta_heading",
                AggKind::Avg,
                Measure::DeltaHeading,
                "average change in heading in a cell, degrees",
            ),
            HeatmapType::new(
                4,
                "delta_cog",
                AggKind::Avg,
                Measure::DeltaCog,
                "average change in course over ground in a cell, degrees",
            ),
            HeatmapType::new(
                5,
                "min_draught",
                AggKind::Min,
                Measure::Draught,
                "minimum draught in a cell, meters",
            ),
        ]
    }

    /// Problems with a set of declared types.
    pub fn violations(types: &[HeatmapType]) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for t in types {
            if t.id == 0 {
                out.push(format!("heatmap type '{}': id 0 is reserved", t.name));
            }
            if !seen.insert(t.id) {
                out.push(format!("heatmap type id {} declared twice", t.id));
            }
            if t.name.is_empty() {
                out.push(format!("heatmap type {}: empty name", t.id));
            }
        }
        out
    }
}

/// SUM values are rounded to a multiple of 2^-10 so that sums of them are
/// exact in f64 and therefore independent of grouping and order.
pub(crate) fn quantize(v: f64) -> f64 {
    (v * 1024.0).round() / 1024.0
}
