//! Per-ship trajectory construction with stop/move classification.

use std::collections::BTreeMap;

use crate::exec::{self, Execution};
use crate::ingest::{AisRecord, Mmsi};

use super::model::{TrajPoint, Trajectory, TrajectoryParams};
use super::outlier::remove_outliers;

/// A trajectory candidate before ids are assigned.
#[derive(Debug, Clone)]
struct Piece {
    points: Vec<TrajPoint>,
    stopped: bool,
    destination: Option<String>,
}

/// Groups records by MMSI, orders them in time, removes outliers and cuts
/// each ship's timeline into stopped and moving trajectories.
///
/// Ships are processed independently. Ids are assigned afterwards in
/// (mmsi, start time) order starting at 1, so the result does not depend on
/// the execution mode.
pub fn build_trajectories(
    records: &[AisRecord],
    params: &TrajectoryParams,
    exec: Execution,
) -> Vec<Trajectory> {
    let mut ships: BTreeMap<Mmsi, Vec<&AisRecord>> = BTreeMap::new();
    for r in records {
        ships.entry(r.mmsi).or_default().push(r);
    }
    let ships: Vec<(Mmsi, Vec<&AisRecord>)> = ships.into_iter().collect();
    let per_ship = exec::map(exec, &ships, |(mmsi, recs)| {
        (*mmsi, ship_pieces(recs, params))
    });

    let mut out = Vec::new();
    let mut id = 1;
    for (mmsi, pieces) in per_ship {
        for p in pieces {
            out.push(Trajectory::new(
                id,
                mmsi,
                p.points,
                p.stopped,
                p.destination,
            ));
            id += 1;
        }
    }
    out
}

fn ship_pieces(records: &[&AisRecord], params: &TrajectoryParams) -> Vec<Piece> {
    let mut recs: Vec<&AisRecord> = records.to_vec();
    // Stable, so the first report of a duplicated timestamp wins.
    recs.sort_by_key(|r| r.t);
    recs.dedup_by_key(|r| r.t);

    let points: Vec<TrajPoint> = recs.iter().map(|r| TrajPoint::from_record(r)).collect();
    let destinations: BTreeMap<i64, &str> = recs
        .iter()
        .filter_map(|r| r.destination.as_deref().map(|d| (r.t, d)))
        .filter(|(_, d)| !d.is_empty())
        .collect();
    let points = remove_outliers(&points, params.outlier_speed);

    let mut pieces = Vec::new();
    let mut start = 0;
    for i in 1..=points.len() {
        let split = i == points.len() || (points[i].t - points[i - 1].t) as f64 > params.gap_split;
        if split {
            classify_run(&points[start..i], params, &mut pieces);
            start = i;
        }
    }
    for p in &mut pieces {
        let (t0, t1) = (p.points[0].t, p.points[p.points.len() - 1].t);
        p.destination = destinations
            .range(t0..=t1)
            .next_back()
            .map(|(_, d)| d.to_string());
    }
    pieces
}

/// Whether each sample of a gap-free run is slow enough to count as stopped.
pub(crate) fn slow_flags(run: &[TrajPoint], stop_sog: f64) -> Vec<bool> {
    (0..run.len())
        .map(|i| match run[i].sog {
            Some(sog) => sog < stop_sog,
            None if run.len() < 2 => false,
            None if i == 0 => run[0].speed_to(&run[1]) < stop_sog,
            None => run[i - 1].speed_to(&run[i]) < stop_sog,
        })
        .collect()
}

/// Splits a gap-free run into alternating moving/stopped pieces. A maximal
/// run of slow samples lasting at least `stop_min_duration` becomes a
/// stopped piece; shorter lulls stay in the surrounding moving piece.
fn classify_run(run: &[TrajPoint], params: &TrajectoryParams, out: &mut Vec<Piece>) {
    if run.len() < 2 {
        return;
    }
    let slow = slow_flags(run, params.stop_sog);

    // [start, end) index ranges of qualifying stops
    let mut stops = Vec::new();
    let mut i = 0;
    while i < run.len() {
        if !slow[i] {
            i += 1;
            continue;
        }
        let j = (i..run.len()).find(|&k| !slow[k]).unwrap_or(run.len());
        if (run[j - 1].t - run[i].t) as f64 >= params.stop_min_duration {
            stops.push((i, j));
        }
        i = j;
    }

    let mut push = |range: &[TrajPoint], stopped: bool| {
        if range.len() >= 2 {
            out.push(Piece {
                points: range.to_vec(),
                stopped,
                destination: None,
            });
        }
    };
    let mut cursor = 0;
    for (s, e) in stops {
        push(&run[cursor..s], false);
        push(&run[s..e], true);
        cursor = e;
    }
    push(&run[cursor..], false);
}
