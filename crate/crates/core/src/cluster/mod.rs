//! Coordinator-plus-workers query simulation over division shards.

mod metrics;
mod shard;
mod simulate;

pub use metrics::{scale_up, wif, worker_time, worker_time_slotted, CostModel, Wif};
pub use shard::{assign_shards, AssignPolicy, CellStore, ShardMap, TrajectoryShardMap};
pub use simulate::{simulate_query, write_sweep_csv, BenchmarkReport, ShardTiming, SweepRow};
