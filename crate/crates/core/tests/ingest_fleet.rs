use std::collections::BTreeSet;

use aisdw::geom::Domain;
use aisdw::ingest::store::{read_records, read_rejections, write_records, write_rejections};
use aisdw::ingest::{ingest_bytes, CleaningConfig, Projection, Rules, Schema};
use aisdw::synth::{self, FleetConfig};
use aisdw::trajectory::{build_trajectories, TrajectoryParams};
use aisdw::Execution;

fn fleet_csv(points: usize, dirty: usize, seed: u64) -> (Vec<u8>, BTreeSet<usize>) {
    let cfg = FleetConfig {
        points,
        dirty_rows: dirty,
        ..FleetConfig::default()
    };
    let fleet = synth::generate(&cfg, &Domain::default(), &Projection::default(), seed).unwrap();
    (fleet.to_csv().unwrap(), fleet.dirty)
}

fn rules() -> Rules {
    Rules::new(
        CleaningConfig::default(),
        Projection::default(),
        Domain::default(),
    )
}

#[test]
fn corrupted_rows_are_rejected_and_nothing_else() {
    let (csv, dirty) = fleet_csv(10_000, 37, 21);
    // header plus one line per row
    let lines = csv.iter().filter(|&&b| b == b'\n').count();
    assert_eq!(lines, 10_038);
    assert_eq!(dirty.len(), 37);

    let out = ingest_bytes(&csv, &Schema::default(), &rules(), Execution::Parallel).unwrap();
    assert_eq!(out.rows(), lines - 1);
    assert_eq!(out.accepted.len(), 10_000);
    assert_eq!(out.rejected.len(), 37);
    // Line numbers are 1-based and the header is line 1.
    let rejected: BTreeSet<u64> = out.rejected.iter().map(|r| r.line).collect();
    let expected: BTreeSet<u64> = dirty.iter().map(|&i| i as u64 + 2).collect();
    assert_eq!(rejected, expected);
    let text = String::from_utf8(csv).unwrap();
    let source: Vec<&str> = text.lines().collect();
    for r in &out.rejected {
        assert_eq!(r.raw, source[r.line as usize - 1]);
    }
}

#[test]
fn stores_round_trip_and_modes_agree() {
    let (csv, _) = fleet_csv(3_000, 12, 5);
    let par = ingest_bytes(&csv, &Schema::default(), &rules(), Execution::Parallel).unwrap();
    let seq = ingest_bytes(&csv, &Schema::default(), &rules(), Execution::Sequential).unwrap();
    assert_eq!(par.accepted, seq.accepted);
    assert_eq!(par.rejected, seq.rejected);

    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.bin");
    let rejections = dir.path().join("rejections.csv");
    write_records(&records, &par.accepted).unwrap();
    write_rejections(&rejections, &par.rejected).unwrap();
    assert_eq!(read_records(&records).unwrap(), par.accepted);
    assert_eq!(read_rejections(&rejections).unwrap(), par.rejected);

    let params = TrajectoryParams::default();
    let a = build_trajectories(&par.accepted, &params, Execution::Parallel);
    let b = build_trajectories(&par.accepted, &params, Execution::Sequential);
    assert_eq!(a, b);
    assert!(!a.is_empty());
    let domain = Domain::default();
    for t in &a {
        assert!(t.points.windows(2).all(|w| w[0].t < w[1].t));
        assert!(t.points.iter().all(|p| domain.contains(p.x, p.y)));
    }
    assert!(a.iter().map(|t| t.points.len()).sum::<usize>() <= par.accepted.len());
}
