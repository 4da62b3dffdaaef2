use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::DivisionSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssignPolicy {
    /// The k-th division in id order goes to worker `k mod W + 1`.
    #[default]
    RoundRobin,
}

/// Relations distributed by spatial division. All of them share the
/// division's shard so cell and heatmap joins stay worker-local.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStore {
    CellFacts,
    CellDimension,
    HeatmapTiles,
}

/// One shard per division, shards placed on workers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShardMap {
    pub workers: u32,
    shard_of_division: BTreeMap<u32, u32>,
    worker_of_shard: BTreeMap<u32, u32>,
}

impl ShardMap {
    pub fn shard_of(&self, division: u32) -> Option<u32> {
        self.shard_of_division.get(&division).copied()
    }

    pub fn worker_of(&self, shard: u32) -> Option<u32> {
        self.worker_of_shard.get(&shard).copied()
    }

    /// Where a cell-distributed relation keeps the rows of `division`.
    pub fn placement(&self, _store: CellStore, division: u32) -> Option<(u32, u32)> {
        let shard = self.shard_of(division)?;
        Some((shard, self.worker_of(shard)?))
    }

    pub fn shard_count(&self) -> usize {
        self.worker_of_shard.len()
    }

    /// Shard ids held by `worker`, ascending.
    pub fn shards_on(&self, worker: u32) -> Vec<u32> {
        self.worker_of_shard
            .iter()
            .filter(|(_, &w)| w == worker)
            .map(|(&s, _)| s)
            .collect()
    }
}

pub fn assign_shards(
    divisions: &DivisionSet,
    workers: u32,
    policy: AssignPolicy,
) -> Result<ShardMap> {
    if workers < 1 {
        return Err(Error::Config(
            vec!["at least one worker is required".into()],
        ));
    }
    let mut ids: Vec<u32> = divisions.divisions.iter().map(|d| d.id).collect();
    ids.sort_unstable();
    let mut shard_of_division = BTreeMap::new();
    let mut worker_of_shard = BTreeMap::new();
    match policy {
        AssignPolicy::RoundRobin => {
            for (k, id) in ids.into_iter().enumerate() {
                shard_of_division.insert(id, id);
                worker_of_shard.insert(id, k as u32 % workers + 1);
            }
        }
    }
    Ok(ShardMap {
        workers,
        shard_of_division,
        worker_of_shard,
    })
}

/// Trajectories are hash-distributed on their id, independently of where
/// their cells live.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryShardMap {
    pub shards: u32,
    pub workers: u32,
}

impl TrajectoryShardMap {
    pub fn new(shards: u32, workers: u32) -> Result<Self> {
        if shards < 1 || workers < 1 {
            return Err(Error::Config(vec![
                "trajectory shards and workers must be at least 1".into(),
            ]));
        }
        Ok(TrajectoryShardMap { shards, workers })
    }

    pub fn shard_of(&self, trajectory_id: u64) -> u32 {
        (splitmix64(trajectory_id) % self.shards as u64) as u32 + 1
    }

    pub fn worker_of(&self, trajectory_id: u64) -> u32 {
        (self.shard_of(trajectory_id) - 1) % self.workers + 1
    }
}

/// Stable 64-bit mix, so placements do not change between builds.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
