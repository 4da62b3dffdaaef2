//! Pipeline configuration, read from TOML with defaults for every field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cluster::{AssignPolicy, CostModel};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geom::{Domain, Rect};
use crate::grid::Granularity;
use crate::heatmap::{HeatmapType, Scale};
use crate::ingest::{CleaningConfig, Projection, Schema};
use crate::partition::DivisionMethod;
use crate::synth::FleetConfig;
use crate::trajectory::TrajectoryParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InputConfig {
    /// AIS CSV files, read in order.
    pub paths: Vec<PathBuf>,
    /// Optional land polygons; points on land are rejected.
    pub land: Option<PathBuf>,
}

impl Default for InputConfig {
    fn default() -> Self {
        InputConfig {
            paths: vec![PathBuf::from("data/fleet.csv")],
            land: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PartitionConfig {
    pub budget: usize,
    pub method: DivisionMethod,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            budget: 400,
            method: DivisionMethod::Kd,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeatmapConfig {
    pub types: Vec<HeatmapType>,
    /// Tile resolutions in meters; empty means every rolled-up granularity.
    pub resolutions: Vec<u32>,
    pub scale: Scale,
    /// Resolution of the full-domain overview images rendered after rollup.
    pub overview_resolution: u32,
}

impl Default for HeatmapConfig {
    fn default() -> Self {
        HeatmapConfig {
            types: HeatmapType::builtins(),
            resolutions: Vec::new(),
            scale: Scale::Linear,
            overview_resolution: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedArea {
    pub name: String,
    /// `x_min,y_min,x_max,y_max` in meters.
    pub rect: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    /// Worker counts to simulate; scale-up is relative to the first.
    pub workers: Vec<u32>,
    pub policy: AssignPolicy,
    pub cost: CostModel,
    /// Query areas; empty means small, medium and full areas around the
    /// domain center.
    pub areas: Vec<NamedArea>,
    /// Temporal spans in days, starting at the first day with data.
    pub spans_days: Vec<u32>,
    /// Query resolutions; empty means the heatmap resolutions.
    pub resolutions: Vec<u32>,
    pub type_id: u32,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            workers: vec![1, 5],
            policy: AssignPolicy::RoundRobin,
            cost: CostModel::default(),
            areas: Vec::new(),
            spans_days: vec![1, 3, 7],
            resolutions: Vec::new(),
            type_id: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub output_dir: PathBuf,
    pub execution: Execution,
    pub input: InputConfig,
    pub schema: Schema,
    pub projection: Projection,
    pub cleaning: CleaningConfig,
    pub trajectory: TrajectoryParams,
    pub domain: Rect,
    pub granularities: Vec<u32>,
    pub partition: PartitionConfig,
    pub heatmap: HeatmapConfig,
    pub bench: BenchConfig,
    pub fleet: FleetConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            output_dir: PathBuf::from("out"),
            execution: Execution::Parallel,
            input: InputConfig::default(),
            schema: Schema::default(),
            projection: Projection::default(),
            cleaning: CleaningConfig::default(),
            trajectory: TrajectoryParams::default(),
            domain: Domain::default().rect(),
            granularities: Granularity::ALL.iter().map(|g| g.meters()).collect(),
            partition: PartitionConfig::default(),
            heatmap: HeatmapConfig::default(),
            bench: BenchConfig::default(),
            fleet: FleetConfig::default(),
        }
    }
}

fn granularity_list(name: &str, ms: &[u32], out: &mut Vec<String>) {
    for &m in ms {
        if Granularity::from_meters(m).is_err() {
            out.push(format!("{name}: {m} is not one of 50, 200, 1000, 5000"));
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a config file. Relative paths inside it are
    /// resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        if let Some(base) = path.parent() {
            cfg.rebase(base);
        }
        Ok(cfg)
    }

    /// Makes relative paths relative to `base`.
    pub fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output_dir);
        self.input.paths.iter_mut().for_each(fix);
        if let Some(l) = self.input.land.as_mut() {
            fix(l);
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }

    /// Every problem with the configuration.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        out.extend(Domain::violations(&self.domain));
        granularity_list("granularities", &self.granularities, &mut out);
        if self.granularities.is_empty() {
            out.push("granularities must not be empty".into());
        }
        if !self.granularities.contains(&5000) {
            out.push("granularities must include 5000 (divisions are built on it)".into());
        }
        granularity_list("heatmap.resolutions", &self.heatmap.resolutions, &mut out);
        for &m in &self.heatmap.resolutions {
            if !self.granularities.contains(&m) {
                out.push(format!("heatmap.resolutions: {m} is not in granularities"));
            }
        }
        granularity_list(
            "heatmap.overview_resolution",
            &[self.heatmap.overview_resolution],
            &mut out,
        );
        granularity_list("bench.resolutions", &self.bench.resolutions, &mut out);
        out.extend(HeatmapType::violations(&self.heatmap.types));
        out.extend(self.trajectory.violations());
        out.extend(self.bench.cost.violations());
        out.extend(self.fleet.violations());
        if self.partition.budget < 1 {
            out.push("partition.budget must be at least 1".into());
        }
        if self.bench.workers.is_empty() || self.bench.workers.contains(&0) {
            out.push("bench.workers must list worker counts of at least 1".into());
        }
        if self.bench.spans_days.contains(&0) {
            out.push("bench.spans_days must be at least 1".into());
        }
        if !self
            .heatmap
            .types
            .iter()
            .any(|t| t.id == self.bench.type_id)
        {
            out.push(format!(
                "bench.type_id {} is not a declared heatmap type",
                self.bench.type_id
            ));
        }
        for a in &self.bench.areas {
            if let Err(e) = Rect::parse(&a.rect) {
                out.push(format!("bench area '{}': {e}", a.name));
            }
        }
        if self.projection.lat_ref.is_nan()
            || self.projection.lat_ref.abs() >= 90.0
            || !Projection::in_range(self.projection.lat_ref, self.projection.lng_ref)
        {
            out.push("projection reference point is out of range".into());
        }
        if self.input.paths.is_empty() {
            out.push("input.paths must list at least one CSV file".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    pub fn domain(&self) -> Result<Domain> {
        Domain::new(self.domain)
    }

    pub fn granularities(&self) -> Result<Vec<Granularity>> {
        let mut gs = self
            .granularities
            .iter()
            .map(|&m| Granularity::from_meters(m))
            .collect::<Result<Vec<_>>>()?;
        gs.sort();
        gs.dedup();
        Ok(gs)
    }

    pub fn heatmap_resolutions(&self) -> Result<Vec<Granularity>> {
        if self.heatmap.resolutions.is_empty() {
            return self.granularities();
        }
        let mut gs = self
            .heatmap
            .resolutions
            .iter()
            .map(|&m| Granularity::from_meters(m))
            .collect::<Result<Vec<_>>>()?;
        gs.sort();
        gs.dedup();
        Ok(gs)
    }

    pub fn bench_resolutions(&self) -> Result<Vec<Granularity>> {
        if self.bench.resolutions.is_empty() {
            return self.heatmap_resolutions();
        }
        self.bench
            .resolutions
            .iter()
            .map(|&m| Granularity::from_meters(m))
            .collect()
    }

    /// Bench areas, defaulting to 10 km and 50 km squares at the domain
    /// center (clipped) and the whole domain.
    pub fn bench_areas(&self) -> Result<Vec<(String, Rect)>> {
        if !self.bench.areas.is_empty() {
            return self
                .bench
                .areas
                .iter()
                .map(|a| Ok((a.name.clone(), Rect::parse(&a.rect)?)))
                .collect();
        }
        let d = self.domain;
        let (cx, cy) = ((d.x_min + d.x_max) / 2.0, (d.y_min + d.y_max) / 2.0);
        let square = |half: f64| {
            Rect::new(cx - half, cy - half, cx + half, cy + half)
                .intersection(&d)
                .unwrap_or(d)
        };
        Ok(vec![
            ("small".into(), square(5000.0)),
            ("medium".into(), square(25_000.0)),
            ("full".into(), d),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = PipelineConfig::default();
        let text = cfg.to_toml().unwrap();
        assert_eq!(PipelineConfig::from_toml(&text).unwrap(), cfg);
        assert_eq!(PipelineConfig::from_toml("").unwrap(), cfg);
    }

    #[test]
    fn partial_files_keep_other_defaults() {
        let cfg = PipelineConfig::from_toml(
            "granularities = [1000, 5000]\n[partition]\nbudget = 16\n[domain]\nx_min = 0.0\ny_min = 0.0\nx_max = 50000.0\ny_max = 25000.0\n",
        )
        .unwrap();
        assert_eq!(cfg.partition.budget, 16);
        assert_eq!(cfg.partition.method, DivisionMethod::Kd);
        assert_eq!(
            cfg.granularities().unwrap(),
            vec![Granularity::M1000, Granularity::M5000]
        );
        assert_eq!(cfg.domain().unwrap().lattice_dims(), (10, 5));
    }

    #[test]
    fn every_violation_is_reported() {
        let text = "granularities = [100, 1000]\n[domain]\nx_min = 0.0\ny_min = 0.0\nx_max = 12000.0\ny_max = 10000.0\n[partition]\nbudget = 0\n[bench]\nworkers = [0]\n";
        match PipelineConfig::from_toml(text) {
            Err(Error::Config(v)) => {
                assert!(v.iter().any(|m| m.contains("width 12000")), "{v:?}");
                assert!(v.iter().any(|m| m.contains("100 is not one of")), "{v:?}");
                assert!(v.iter().any(|m| m.contains("include 5000")), "{v:?}");
                assert!(v.iter().any(|m| m.contains("budget")), "{v:?}");
                assert!(v.iter().any(|m| m.contains("bench.workers")), "{v:?}");
                assert_eq!(v.len(), 5, "{v:?}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_types_are_parse_errors() {
        assert!(PipelineConfig::from_toml("[partition]\nbudget = \"many\"\n").is_err());
    }
}
