use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear shard cost: `alpha` seconds per pixel plus `beta` per engaged
/// shard. A worker runs at most `slots` shards at once; `None` means
/// unbounded, which makes worker time the max shard time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostModel {
    pub alpha: f64,
    pub beta: f64,
    pub slots: Option<u32>,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            alpha: 1e-8,
            beta: 1e-3,
            slots: Some(1),
        }
    }
}

impl CostModel {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            out.push(format!(
                "cost alpha must be a finite value >= 0, got {}",
                self.alpha
            ));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            out.push(format!(
                "cost beta must be a finite value >= 0, got {}",
                self.beta
            ));
        }
        if self.slots == Some(0) {
            out.push("cost slots must be at least 1".into());
        }
        out
    }

    pub fn shard_time(&self, pixels: u64) -> f64 {
        self.alpha * pixels as f64 + self.beta
    }
}

/// Time for a worker to finish all its shards when they all run at once.
pub fn worker_time(shard_times: &[f64]) -> f64 {
    shard_times.iter().copied().fold(0.0, f64::max)
}

/// Makespan of running `shard_times`, in order, on `slots` concurrent
/// slots: each shard starts on the slot that frees up first (lowest slot
/// on ties). With at least as many slots as shards this is
/// [`worker_time`].
pub fn worker_time_slotted(shard_times: &[f64], slots: Option<u32>) -> f64 {
    let slots = match slots {
        Some(s) if (s as usize) < shard_times.len() => s as usize,
        _ => return worker_time(shard_times),
    };
    let mut free = vec![0.0f64; slots];
    for &t in shard_times {
        let (k, _) = free
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("slots > 0");
        free[k] += t;
    }
    worker_time(&free)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wif {
    pub per_worker: Vec<f64>,
    /// Normalized average, percent.
    pub average_pct: f64,
    /// Set when every worker time is 0 and idling is undefined.
    pub degenerate: bool,
}

/// Per-worker idle fraction `(max - t) / max` and the average normalized to
/// 0..100 %. One worker reports 0 %.
pub fn wif(worker_times: &[f64]) -> Result<Wif> {
    if worker_times.is_empty() {
        return Err(Error::Undefined(
            "idle fraction needs at least one worker".into(),
        ));
    }
    let max = worker_time(worker_times);
    if max <= 0.0 {
        return Ok(Wif {
            per_worker: vec![0.0; worker_times.len()],
            average_pct: 0.0,
            degenerate: true,
        });
    }
    let per_worker: Vec<f64> = worker_times.iter().map(|&t| (max - t) / max).collect();
    let w = worker_times.len() as f64;
    let average_pct = if worker_times.len() == 1 {
        0.0
    } else {
        per_worker.iter().sum::<f64>() / w / (1.0 - 1.0 / w) * 100.0
    };
    Ok(Wif {
        per_worker,
        average_pct,
        degenerate: false,
    })
}

/// `runtime_1 / runtime_n` in percent.
pub fn scale_up(runtime_one: f64, runtime_n: f64) -> Result<f64> {
    if runtime_one <= 0.0 || runtime_n <= 0.0 {
        return Err(Error::Undefined(format!(
            "scale-up of runtimes {runtime_one} s and {runtime_n} s"
        )));
    }
    Ok(runtime_one / runtime_n * 100.0)
}
