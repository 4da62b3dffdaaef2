use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aisdw::config::PipelineConfig;
use aisdw::geom::Rect;
use aisdw::heatmap::HeatmapQuery;
use aisdw::pipeline::{self, QueryArgs};
use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use log::info;

#[derive(Parser)]
#[command(name = "aisdw", version, about = "AIS trajectory warehouse pipeline")]
struct Cli {
    /// Pipeline config (TOML). Defaults apply to anything left out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Run kernels sequentially.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded synthetic fleet as AIS CSV.
    Generate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Clean rows to generate.
        #[arg(long)]
        points: Option<usize>,
        /// Corrupted rows to mix in.
        #[arg(long)]
        dirty: Option<usize>,
        /// Destination; defaults to the first input path.
        #[arg(long)]
        to: Option<PathBuf>,
    },
    /// Parse, project and clean the input CSV files.
    Ingest,
    /// Build and simplify trajectories.
    Trajectories,
    /// Roll trajectories up into cell facts.
    Rollup,
    /// Build spatial divisions.
    Partition {
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Build heatmap tiles and overview images.
    Heatmap,
    /// Answer one heatmap query and render it.
    Query {
        /// `x_min,y_min,x_max,y_max` in meters; defaults to the domain.
        #[arg(long, allow_hyphen_values = true)]
        area: Option<String>,
        /// `YYYYMMDD:YYYYMMDD`; defaults to every day with data.
        #[arg(long)]
        dates: Option<String>,
        #[arg(long = "type", default_value_t = 1)]
        type_id: u32,
        #[arg(long, default_value_t = 1000)]
        resolution: u32,
        /// Output PNG.
        #[arg(long)]
        png: Option<PathBuf>,
    },
    /// Simulate the query sweep on the shard cluster.
    Bench {
        /// Worker count to compare against the first configured one.
        #[arg(long)]
        workers: Option<u32>,
    },
    /// Run every stage from ingest to bench.
    Run {
        #[arg(long)]
        workers: Option<u32>,
    },
    /// Print the effective configuration.
    Config,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            PipelineConfig::load(path).with_context(|| format!("loading {}", path.display()))?
        }
        None => PipelineConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if cli.sequential {
        cfg.execution = aisdw::Execution::Sequential;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn show(path: &Path) -> String {
    path.display().to_string()
}

fn run_stage(cfg: &PipelineConfig, command: &Command) -> Result<()> {
    match command {
        Command::Generate {
            seed,
            points,
            dirty,
            to,
        } => {
            let mut cfg = cfg.clone();
            if let Some(p) = points {
                cfg.fleet.points = *p;
            }
            if let Some(d) = dirty {
                cfg.fleet.dirty_rows = *d;
            }
            let s = pipeline::generate(&cfg, *seed, to.as_deref())?;
            println!(
                "wrote {} rows ({} corrupted) to {}",
                s.rows,
                s.dirty_rows,
                show(&s.path)
            );
        }
        Command::Ingest => {
            let s = pipeline::ingest(cfg)?;
            println!(
                "ingested {} rows: {} accepted, {} rejected",
                s.rows, s.accepted, s.rejected
            );
            for (rule, n) in &s.by_rule {
                println!("  {rule}: {n}");
            }
        }
        Command::Trajectories => {
            let s = pipeline::trajectories(cfg)?;
            println!(
                "built {} trajectories ({} stopped), {} points, {} after simplification",
                s.trajectories, s.stopped, s.points, s.simplified_points
            );
        }
        Command::Rollup => {
            let s = pipeline::rollup(cfg)?;
            for (m, n) in &s.events {
                println!("{m} m: {n} cell events");
            }
        }
        Command::Partition { budget } => {
            let s = pipeline::partition(cfg, *budget)?;
            println!(
                "{} divisions ({:?}, budget {}): SD {:.1}, CV {:.1}% ({:?} would give CV {:.1}%)",
                s.divisions,
                s.method,
                s.budget,
                s.balance.sd,
                s.balance.cv,
                s.alternative.0,
                s.alternative.1.cv
            );
        }
        Command::Heatmap => {
            let m = pipeline::heatmaps(cfg)?;
            let tiles: usize = m.files.iter().map(|f| f.tiles).sum();
            println!("{tiles} tiles in {} files", m.files.len());
            for p in &m.overviews {
                println!("rendered {}", show(p));
            }
        }
        Command::Query {
            area,
            dates,
            type_id,
            resolution,
            png,
        } => {
            let args = QueryArgs {
                area: area.as_deref().map(Rect::parse).transpose()?,
                dates: dates
                    .as_deref()
                    .map(HeatmapQuery::parse_dates)
                    .transpose()?,
                type_id: *type_id,
                resolution: *resolution,
                out: png.clone(),
            };
            let (s, _) = pipeline::query(cfg, &args)?;
            println!("{}", show(&s.png));
            println!("ascii grid: {}", show(&s.ascii_grid));
            println!(
                "size: {} x {} pixels, {} with data",
                s.width, s.height, s.data_pixels
            );
            match (s.min, s.max) {
                (Some(lo), Some(hi)) => println!("min {lo}, max {hi}, sum {}", s.sum),
                _ => println!("no data in the requested area and dates"),
            }
        }
        Command::Bench { workers } => {
            let s = pipeline::bench(cfg, *workers)?;
            println!(
                "{:<8} {:>5} {:>6} {:>12} {:>8} {:>9}",
                "area", "span", "res", "time", "wif", "scale-up"
            );
            for r in &s.rows {
                println!(
                    "{:<8} {:>5} {:>6} {:>12.6} {:>7.1}% {:>8.1}%",
                    r.area, r.span, r.resolution, r.time, r.wif, r.scale_up
                );
            }
            println!("{} reports, sweep in {}", s.reports, show(&s.sweep));
        }
        Command::Run { workers } => {
            for stage in [
                Command::Ingest,
                Command::Trajectories,
                Command::Rollup,
                Command::Partition { budget: None },
                Command::Heatmap,
                Command::Bench { workers: *workers },
            ] {
                run_stage(cfg, &stage)?;
            }
        }
        Command::Config => print!("{}", cfg.to_toml()?),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = load_config(&cli).and_then(|cfg| {
        info!("output directory {}", cfg.output_dir.display());
        run_stage(&cfg, &cli.command)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
