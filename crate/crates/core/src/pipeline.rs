//! The ETL stages as functions over on-disk artifacts under the configured
//! output directory. Each stage reads only what earlier stages wrote and
//! overwrites its own outputs deterministically.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cluster::{assign_shards, simulate_query, write_sweep_csv, BenchmarkReport, SweepRow};
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::geom::Rect;
use crate::grid::{self, rollup_all, CellFacts, Granularity};
use crate::heatmap::{self, rollup_tiles, HeatmapQuery, Raster, TileStore};
use crate::ingest::{self, ingest_bytes, LandMask, RejectionRecord, Rules};
use crate::partition::{
    self, balance, build_divisions, BalanceReport, CountGrid, DivisionMethod, DivisionSet,
};
use crate::synth;
use crate::time::{self, SECONDS_PER_DAY};
use crate::trajectory::{self, build_trajectories, simplify_all};

/// Artifact locations under the output directory.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub root: PathBuf,
}

impl Artifacts {
    pub fn new(cfg: &PipelineConfig) -> Self {
        Artifacts {
            root: cfg.output_dir.clone(),
        }
    }

    pub fn effective_config(&self) -> PathBuf {
        self.root.join("effective-config.toml")
    }
    pub fn records(&self) -> PathBuf {
        self.root.join("ingest/records.bin")
    }
    pub fn rejections(&self) -> PathBuf {
        self.root.join("ingest/rejections.csv")
    }
    pub fn trajectories(&self) -> PathBuf {
        self.root.join("trajectories/trajectories.jsonl")
    }
    pub fn simplified(&self) -> PathBuf {
        self.root.join("trajectories/simplified.jsonl")
    }
    pub fn cells_dir(&self) -> PathBuf {
        self.root.join("cells")
    }
    pub fn cell_facts(&self, g: Granularity) -> PathBuf {
        grid::store::cell_fact_path(&self.cells_dir(), g)
    }
    pub fn divisions(&self) -> PathBuf {
        self.root.join("partition/divisions.csv")
    }
    pub fn balance(&self) -> PathBuf {
        self.root.join("partition/balance.json")
    }
    pub fn tiles(&self, type_id: u32, g: Granularity) -> PathBuf {
        self.root
            .join(format!("heatmaps/tiles_t{type_id}_r{}.bin", g.meters()))
    }
    pub fn heatmap_manifest(&self) -> PathBuf {
        self.root.join("heatmaps/manifest.json")
    }
    pub fn overview(&self, type_id: u32, g: Granularity) -> PathBuf {
        self.root
            .join(format!("heatmaps/overview_t{type_id}_r{}.png", g.meters()))
    }
    pub fn query_dir(&self) -> PathBuf {
        self.root.join("query")
    }
    pub fn bench_dir(&self) -> PathBuf {
        self.root.join("bench")
    }
    pub fn sweep(&self) -> PathBuf {
        self.bench_dir().join("sweep.csv")
    }
}

fn require(path: &Path, command: &'static str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::MissingArtifact {
            path: path.to_path_buf(),
            command,
        })
    }
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, serde_json::to_string_pretty(value)? + "\n").map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes the config with defaults applied next to the outputs.
pub fn write_effective_config(cfg: &PipelineConfig) -> Result<PathBuf> {
    let path = Artifacts::new(cfg).effective_config();
    ensure_parent(&path)?;
    fs::write(&path, cfg.to_toml()?).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateSummary {
    pub path: PathBuf,
    pub rows: usize,
    pub dirty_rows: usize,
}

/// Writes a synthetic fleet to `out`, or to the first input path.
pub fn generate(cfg: &PipelineConfig, seed: u64, out: Option<&Path>) -> Result<GenerateSummary> {
    cfg.validate()?;
    let path = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.input.paths.first().cloned())
        .ok_or_else(|| Error::Config(vec!["no output path for the generated fleet".into()]))?;
    let fleet = synth::generate(&cfg.fleet, &cfg.domain()?, &cfg.projection, seed)?;
    ensure_parent(&path)?;
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    fleet.write_csv(std::io::BufWriter::new(file))?;
    Ok(GenerateSummary {
        path,
        rows: fleet.records.len(),
        dirty_rows: fleet.dirty.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub rows: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub by_rule: BTreeMap<String, usize>,
}

pub fn ingest(cfg: &PipelineConfig) -> Result<IngestSummary> {
    cfg.validate()?;
    let art = Artifacts::new(cfg);
    let mut rules = Rules::new(cfg.cleaning.clone(), cfg.projection, cfg.domain()?);
    if let Some(land) = &cfg.input.land {
        rules = rules.with_land(LandMask::load(land, &cfg.projection)?);
    }
    let mut accepted = Vec::new();
    let mut rejected: Vec<RejectionRecord> = Vec::new();
    for path in &cfg.input.paths {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let out = ingest_bytes(&bytes, &cfg.schema, &rules, cfg.execution)?;
        log::info!(
            "{}: {} accepted, {} rejected",
            path.display(),
            out.accepted.len(),
            out.rejected.len()
        );
        accepted.extend(out.accepted);
        rejected.extend(out.rejected);
    }
    ensure_parent(&art.records())?;
    ingest::store::write_records(&art.records(), &accepted)?;
    ingest::store::write_rejections(&art.rejections(), &rejected)?;
    write_effective_config(cfg)?;
    let mut by_rule = BTreeMap::new();
    for r in &rejected {
        *by_rule.entry(r.rule.as_str().to_string()).or_insert(0) += 1;
    }
    Ok(IngestSummary {
        rows: accepted.len() + rejected.len(),
        accepted: accepted.len(),
        rejected: rejected.len(),
        by_rule,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub trajectories: usize,
    pub stopped: usize,
    pub points: usize,
    pub simplified_points: usize,
}

pub fn trajectories(cfg: &PipelineConfig) -> Result<TrajectorySummary> {
    cfg.validate()?;
    let art = Artifacts::new(cfg);
    require(&art.records(), "ingest")?;
    let records = ingest::store::read_records(&art.records())?;
    let trajs = build_trajectories(&records, &cfg.trajectory, cfg.execution);
    let simplified = simplify_all(&trajs, cfg.trajectory.simplify_epsilon, cfg.execution);
    ensure_parent(&art.trajectories())?;
    trajectory::store::write_trajectories(&art.trajectories(), &trajs)?;
    trajectory::store::write_trajectories(&art.simplified(), &simplified)?;
    write_effective_config(cfg)?;
    Ok(TrajectorySummary {
        trajectories: trajs.len(),
        stopped: trajs.iter().filter(|t| t.infer_stopped).count(),
        points: trajs.iter().map(|t| t.points.len()).sum(),
        simplified_points: simplified.iter().map(|t| t.points.len()).sum(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollupSummary {
    /// Cell events per granularity in meters.
    pub events: BTreeMap<u32, usize>,
}

/// Rolls the full-resolution trajectories up into cell facts.
pub fn rollup(cfg: &PipelineConfig) -> Result<RollupSummary> {
    cfg.validate()?;
    let art = Artifacts::new(cfg);
    require(&art.trajectories(), "trajectories")?;
    let trajs = trajectory::store::read_trajectories(&art.trajectories())?;
    let facts = rollup_all(&trajs, &cfg.domain()?, &cfg.granularities()?, cfg.execution);
    fs::create_dir_all(art.cells_dir()).map_err(|e| Error::io(art.cells_dir(), e))?;
    for (g, events) in &facts {
        grid::store::write_cell_facts(&art.cell_facts(*g), *g, events)?;
    }
    write_effective_config(cfg)?;
    Ok(RollupSummary {
        events: facts.iter().map(|(g, e)| (g.meters(), e.len())).collect(),
    })
}

fn read_facts(art: &Artifacts, gs: &[Granularity]) -> Result<CellFacts> {
    let mut facts = CellFacts::new();
    for &g in gs {
        let path = art.cell_facts(g);
        require(&path, "rollup")?;
        let (_, events) = grid::store::read_cell_facts(&path)?;
        facts.insert(g, events);
    }
    Ok(facts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSummary {
    pub method: DivisionMethod,
    pub budget: usize,
    pub divisions: usize,
    pub balance: BalanceReport,
    /// The other method at the same budget, for comparison.
    pub alternative: (DivisionMethod, BalanceReport),
}

/// Builds divisions over the 5000 m cell-fact histogram. `budget`
/// overrides the configured one.
pub fn partition(cfg: &PipelineConfig, budget: Option<usize>) -> Result<PartitionSummary> {
    cfg.validate()?;
    let art = Artifacts::new(cfg);
    let facts = read_facts(&art, &[Granularity::M5000])?;
    let domain = cfg.domain()?;
    let grid = CountGrid::from_events(domain, &facts[&Granularity::M5000]);
    let budget = budget.unwrap_or(cfg.partition.budget).max(1);
    let method = cfg.partition.method;
    let set = build_divisions(&grid, budget, method);
    if set.len() < budget {
        log::info!(
            "{method:?} stopped at {} of {budget} divisions: the heaviest division cannot be split further",
            set.len()
        );
    }
    let report = balance(&set, &grid)?;
    let other = match method {
        DivisionMethod::Kd => DivisionMethod::Quad,
        DivisionMethod::Quad => DivisionMethod::Kd,
    };
    let alt = balance(&build_divisions(&grid, budget, other), &grid)?;
    ensure_parent(&art.divisions())?;
    set.write(&art.divisions())?;
    let summary = PartitionSummary {
        method,
        budget,
        divisions: set.len(),
        balance: report,
        alternative: (other, alt),
    };
    write_json(&art.balance(), &summary)?;
    write_effective_config(cfg)?;
    Ok(summary)
}

fn read_divisions(art: &Artifacts, cfg: &PipelineConfig) -> Result<DivisionSet> {
    require(&art.divisions(), "partition")?;
    let set = DivisionSet::read(&art.divisions())?;
    if set.domain != cfg.domain()? {
        return Err(Error::Validation(format!(
            "{} was built for another domain; re-run `aisdw partition`",
            art.divisions().display()
        )));
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TileFile {
    pub type_id: u32,
    pub resolution: u32,
    pub tiles: usize,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapManifest {
    /// First and last day with any tile, `YYYYMMDD`.
    pub dates: Option<(u32, u32)>,
    pub files: Vec<TileFile>,
    pub overviews: Vec<PathBuf>,
}

/// Builds tile files for every type and resolution and renders full-span
/// overview images at the overview resolution.
pub fn heatmaps(cfg: &PipelineConfig) -> Result<HeatmapManifest> {
    cfg.validate()?;
    let art = Artifacts::new(cfg);
    let divisions = read_divisions(&art, cfg)?;
    let index = divisions.index()?;
    let resolutions = cfg.heatmap_resolutions()?;
    let facts = read_facts(&art, &resolutions)?;
    let domain = cfg.domain()?;
    let overview_res = Granularity::from_meters(cfg.heatmap.overview_resolution)?;
    let overview_res = if resolutions.contains(&overview_res) {
        overview_res
    } else {
        *resolutions.last().expect("validated non-empty")
    };

    let mut files = Vec::new();
    let mut dates: Option<(u32, u32)> = None;
    let mut overview_stores = Vec::new();
    for &res in &resolutions {
        for ty in &cfg.heatmap.types {
            let tiles = rollup_tiles(&facts[&res], ty, res, cfg.execution);
            for t in &tiles {
                dates = Some(match dates {
                    None => (t.date_id, t.date_id),
                    Some((a, b)) => (a.min(t.date_id), b.max(t.date_id)),
                });
            }
            let store = TileStore::from_tiles(domain, tiles, &index)?;
            let path = art.tiles(ty.id, res);
            ensure_parent(&path)?;
            store.write(&path)?;
            files.push(TileFile {
                type_id: ty.id,
                resolution: res.meters(),
                tiles: store.len(),
                path,
            });
            if res == overview_res {
                overview_stores.push((ty.id, store));
            }
        }
    }
    let mut overviews = Vec::new();
    if let Some((from, to)) = dates {
        for (type_id, store) in overview_stores {
            let q = HeatmapQuery {
                area: domain.rect(),
                date_from: from,
                date_to: to,
                type_id,
                resolution: overview_res,
            };
            let raster =
                heatmap::query_heatmap(&store, &divisions, &cfg.heatmap.types, &q, cfg.execution)?;
            let path = art.overview(type_id, overview_res);
            heatmap::render(&raster, cfg.heatmap.scale, &path)?;
            overviews.push(path);
        }
    }
    let manifest = HeatmapManifest {
        dates,
        files,
        overviews,
    };
    write_json(&art.heatmap_manifest(), &manifest)?;
    write_effective_config(cfg)?;
    Ok(manifest)
}

fn read_manifest(art: &Artifacts) -> Result<HeatmapManifest> {
    require(&art.heatmap_manifest(), "heatmap")?;
    read_json(&art.heatmap_manifest())
}

fn load_tiles(art: &Artifacts, type_id: u32, res: Granularity) -> Result<TileStore> {
    let path = art.tiles(type_id, res);
    require(&path, "heatmap")?;
    TileStore::read(&path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryArgs {
    pub area: Option<Rect>,
    pub dates: Option<(u32, u32)>,
    pub type_id: u32,
    pub resolution: u32,
    /// Output PNG path; defaults to a name derived from the query.
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuerySummary {
    pub query: HeatmapQuery,
    pub png: PathBuf,
    pub ascii_grid: PathBuf,
    pub width: u32,
    pub height: u32,
    pub data_pixels: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub sum: f64,
}

/// Answers one heatmap query and renders the result.
pub fn query(cfg: &PipelineConfig, args: &QueryArgs) -> Result<(QuerySummary, Raster)> {
    cfg.validate()?;
    let art = Artifacts::new(cfg);
    let domain = cfg.domain()?;
    let area = args.area.unwrap_or(domain.rect());
    if !area.intersects(&domain.rect()) {
        return Err(Error::OutsideDomain {
            x: area.x_min,
            y: area.y_min,
        });
    }
    let res = Granularity::from_meters(args.resolution)?;
    if !cfg.heatmap.types.iter().any(|t| t.id == args.type_id) {
        return Err(Error::UnknownHeatmapType(args.type_id));
    }
    let divisions = read_divisions(&art, cfg)?;
    let manifest = read_manifest(&art)?;
    // With no tiles at all any valid range gives the all-nodata raster.
    let (date_from, date_to) = args
        .dates
        .or(manifest.dates)
        .unwrap_or((19700101, 19700101));
    let q = HeatmapQuery {
        area,
        date_from,
        date_to,
        type_id: args.type_id,
        resolution: res,
    };
    let store = load_tiles(&art, args.type_id, res)?;
    let raster = heatmap::query_heatmap(&store, &divisions, &cfg.heatmap.types, &q, cfg.execution)?;
    let png = args.out.clone().unwrap_or_else(|| {
        art.query_dir().join(format!(
            "heatmap_t{}_r{}_{}_{}.png",
            q.type_id,
            res.meters(),
            q.date_from,
            q.date_to
        ))
    });
    heatmap::render(&raster, cfg.heatmap.scale, &png)?;
    let (min, max) = match raster.min_max() {
        Some((a, b)) => (Some(a), Some(b)),
        None => (None, None),
    };
    let summary = QuerySummary {
        ascii_grid: png.with_extension("asc"),
        png,
        width: raster.width,
        height: raster.height,
        data_pixels: raster.data_count(),
        min,
        max,
        sum: raster.sum(),
        query: q,
    };
    write_json(&summary.png.with_extension("json"), &summary)?;
    Ok((summary, raster))
}

fn add_days(date_id: u32, days: u32) -> u32 {
    let start = time::date_id_start(date_id).expect("valid date id");
    time::date_id((start + days as i64 * SECONDS_PER_DAY) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub rows: Vec<SweepRow>,
    pub sweep: PathBuf,
    pub reports: usize,
}

/// Simulates the query sweep (areas x spans x resolutions) for every
/// configured worker count. Writes one JSON report per query and worker
/// count and a CSV with one row per query, comparing the last worker
/// count against the first.
pub fn bench(cfg: &PipelineConfig, workers: Option<u32>) -> Result<BenchSummary> {
    cfg.validate()?;
    let art = Artifacts::new(cfg);
    let divisions = read_divisions(&art, cfg)?;
    let manifest = read_manifest(&art)?;
    let first = manifest
        .dates
        .ok_or_else(|| Error::Validation("the tile store is empty; nothing to benchmark".into()))?
        .0;
    let mut counts = cfg.bench.workers.clone();
    if let Some(w) = workers {
        if w < 1 {
            return Err(Error::Config(vec!["--workers must be at least 1".into()]));
        }
        counts = vec![counts[0], w];
    }
    let maps = counts
        .iter()
        .map(|&w| assign_shards(&divisions, w, cfg.bench.policy))
        .collect::<Result<Vec<_>>>()?;
    let reports_dir = art.bench_dir().join("reports");
    fs::create_dir_all(&reports_dir).map_err(|e| Error::io(&reports_dir, e))?;
    let mut rows = Vec::new();
    let mut written = 0;
    for res in cfg.bench_resolutions()? {
        let store = load_tiles(&art, cfg.bench.type_id, res)?;
        for (name, area) in cfg.bench_areas()? {
            for &span in &cfg.bench.spans_days {
                let q = HeatmapQuery {
                    area,
                    date_from: first,
                    date_to: add_days(first, span - 1),
                    type_id: cfg.bench.type_id,
                    resolution: res,
                };
                let reports: Vec<BenchmarkReport> = maps
                    .iter()
                    .map(|m| {
                        simulate_query(
                            &q,
                            m,
                            &store,
                            &divisions,
                            &cfg.heatmap.types,
                            &cfg.bench.cost,
                            cfg.execution,
                        )
                    })
                    .collect::<Result<_>>()?;
                for r in &reports {
                    let path = reports_dir.join(format!(
                        "{name}_{span}d_{}m_w{}.json",
                        res.meters(),
                        r.workers
                    ));
                    r.write_json(&path)?;
                    written += 1;
                }
                let span_label = format!("{span}d");
                rows.push(SweepRow::new(
                    &name,
                    &span_label,
                    &reports[0],
                    reports.last().unwrap(),
                )?);
            }
        }
    }
    write_sweep_csv(&rows, &art.sweep())?;
    write_effective_config(cfg)?;
    Ok(BenchSummary {
        rows,
        sweep: art.sweep(),
        reports: written,
    })
}

/// Division balance of an existing division file against the current
/// 5000 m cell facts.
pub fn current_balance(cfg: &PipelineConfig) -> Result<BalanceReport> {
    let art = Artifacts::new(cfg);
    let divisions = read_divisions(&art, cfg)?;
    let facts = read_facts(&art, &[Granularity::M5000])?;
    partition::balance(
        &divisions,
        &CountGrid::from_events(cfg.domain()?, &facts[&Granularity::M5000]),
    )
}
