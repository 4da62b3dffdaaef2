use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geom::{Domain, Rect};
use crate::grid::{CellEvent, CellKey, Granularity};
use crate::ingest::Mmsi;
use crate::partition::{build_kdtree, CountGrid, DivisionSet};
use crate::Execution;

const DAY1: u32 = 20240301;
const DAY2: u32 = 20240302;

fn domain() -> Domain {
    Domain::new(Rect::new(0.0, 0.0, 20_000.0, 15_000.0)).unwrap()
}

fn event(cell: CellKey, date_id: u32) -> CellEvent {
    CellEvent {
        cell,
        trajectory_id: 1,
        mmsi: Mmsi(219_000_001),
        t_enter: 0.0,
        t_exit: 10.0,
        duration: 10.0,
        avg_sog: 5.0,
        delta_cog: 0.0,
        delta_heading: 0.0,
        min_draught: Some(6.0),
        date_id,
        infer_stopped: false,
    }
}

fn random_events(rng: &mut ChaCha8Rng, n: usize, g: Granularity, d: &Domain) -> Vec<CellEvent> {
    let (w, h) = d.lattice_dims();
    let per = g.per_lattice_cell();
    (0..n)
        .map(|_| {
            // Concentrate on a few anchors so pixels collect several events.
            let col = rng.gen_range(0..(w * per).min(per + 3));
            let row = rng.gen_range(0..h * per);
            let mut e = event(
                CellKey::new(g, col, row),
                if rng.gen_bool(0.5) { DAY1 } else { DAY2 },
            );
            e.duration = rng.gen_range(0.0..900.0);
            e.delta_heading = rng.gen_range(0.0..180.0);
            e.delta_cog = rng.gen_range(0.0..180.0);
            e.min_draught = rng.gen_bool(0.8).then(|| rng.gen_range(2.0..15.0));
            e
        })
        .collect()
}

fn divisions(d: &Domain, budget: usize) -> DivisionSet {
    let mut grid = CountGrid::new(*d);
    for (k, c) in grid.counts.iter_mut().enumerate() {
        *c = (k as u64 * 7) % 5 + 1;
    }
    build_kdtree(&grid, budget)
}

fn store(d: &Domain, divs: &DivisionSet, tiles: Vec<HeatmapTile>) -> TileStore {
    TileStore::from_tiles(*d, tiles, &divs.index().unwrap()).unwrap()
}

/// Centralized per-pixel evaluation straight from the tiles, folding in a
/// shuffled order.
fn oracle(
    tiles: &[HeatmapTile],
    d: &Domain,
    ty: &HeatmapType,
    q: &HeatmapQuery,
    seed: u64,
) -> Raster {
    let (_, mut out) = query_grid(&TileStore::new(*d), std::slice::from_ref(ty), q).unwrap();
    let mut order: Vec<&HeatmapTile> = tiles
        .iter()
        .filter(|t| {
            t.type_id == ty.id
                && t.resolution == q.resolution
                && (q.date_from..=q.date_to).contains(&t.date_id)
        })
        .collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let res = q.resolution.size();
    for j in 0..out.height {
        for i in 0..out.width {
            let (x, y) = out.center(i, j);
            if !q.area.contains(x, y) {
                continue;
            }
            let k = out.index(i, j);
            let mut acc: Option<Vec<f64>> = None;
            for t in &order {
                let r = t.anchor.rect(d);
                if !r.contains(x, y) {
                    continue;
                }
                let n = t.side();
                let ti = ((x - r.x_min) / res).floor() as u32;
                let tj = ((y - r.y_min) / res).floor() as u32;
                let p = (tj * n + ti) as usize;
                if t.nodata[p] {
                    continue;
                }
                let v: Vec<f64> = t.bands.iter().map(|b| b[p]).collect();
                acc = Some(match acc {
                    None => v,
                    Some(a) => match ty.kind {
                        AggKind::Min => vec![a[0].min(v[0])],
                        AggKind::Sum | AggKind::Avg => {
                            a.iter().zip(&v).map(|(x, y)| x + y).collect()
                        }
                    },
                });
            }
            if let Some(a) = acc {
                out.nodata[k] = false;
                for (b, v) in out.bands.iter_mut().zip(a) {
                    b[k] = v;
                }
            }
        }
    }
    out
}

fn query(area: Rect, dates: (u32, u32), type_id: u32, res: Granularity) -> HeatmapQuery {
    HeatmapQuery {
        area,
        date_from: dates.0,
        date_to: dates.1,
        type_id,
        resolution: res,
    }
}

#[test]
fn single_crossing_makes_one_pixel() {
    let cell = CellKey::new(Granularity::M50, 123, 45);
    let ty = &HeatmapType::builtins()[0];
    let tiles = rollup_tiles(
        &[event(cell, DAY1)],
        ty,
        Granularity::M50,
        Execution::Sequential,
    );
    assert_eq!(tiles.len(), 1);
    let t = &tiles[0];
    assert_eq!(t.anchor, CellKey::new(Granularity::M5000, 1, 0));
    assert_eq!(t.pixel_count(), 10_000);
    assert_eq!(t.temporal_s, 86_400);
    assert_eq!(t.nodata.iter().filter(|&&n| !n).count(), 1);
    let k = (45 * 100 + 23) as usize;
    assert!(!t.nodata[k]);
    assert_eq!(t.bands[0][k], 1.0);
}

#[test]
fn average_keeps_sum_and_count() {
    let cell = CellKey::new(Granularity::M200, 3, 3);
    let mut a = event(cell, DAY1);
    a.delta_heading = 10.0;
    let mut b = event(cell, DAY1);
    b.delta_heading = 20.0;
    let ty = &HeatmapType::builtins()[2];
    let tiles = rollup_tiles(&[a, b], ty, Granularity::M200, Execution::Sequential);
    let k = 3 * 25 + 3;
    assert_eq!((tiles[0].bands[0][k], tiles[0].bands[1][k]), (30.0, 2.0));
    let fin = tiles[0].to_raster(&domain()).finalize();
    assert_eq!(fin.bands.len(), 1);
    assert_eq!(fin.value(3, 3), Some(15.0));
}

#[test]
fn finalize_divides_elementwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut r = Raster::empty((0.0, 0.0), 50.0, 30, 20, 2);
    for k in 0..r.len() {
        if rng.gen_bool(0.7) {
            r.nodata[k] = false;
            r.bands[0][k] = rng.gen_range(0.0..1000.0);
            r.bands[1][k] = rng.gen_range(0..5) as f64;
        }
    }
    let f = r.finalize();
    for k in 0..r.len() {
        let expect = (!r.nodata[k] && r.bands[1][k] > 0.0).then(|| r.bands[0][k] / r.bands[1][k]);
        let got = (!f.nodata[k]).then(|| f.bands[0][k]);
        assert_eq!(got, expect);
    }
}

#[test]
fn min_draught_skips_missing_values() {
    let cell = CellKey::new(Granularity::M1000, 0, 0);
    let mut a = event(cell, DAY1);
    a.min_draught = Some(7.5);
    let mut b = event(cell, DAY1);
    b.min_draught = None;
    let mut c = event(CellKey::new(Granularity::M1000, 1, 0), DAY1);
    c.min_draught = None;
    let ty = &HeatmapType::builtins()[4];
    let tiles = rollup_tiles(
        &[a.clone(), b, c.clone()],
        ty,
        Granularity::M1000,
        Execution::Sequential,
    );
    assert_eq!(tiles[0].bands[0][0], 7.5);
    assert!(tiles[0].nodata[1]);
    // No contributing event at all: no tile.
    assert!(rollup_tiles(&[c], ty, Granularity::M1000, Execution::Sequential).is_empty());
    let mut lower = a;
    lower.min_draught = Some(4.0);
    let tiles = rollup_tiles(
        &[lower, event(cell, DAY1)],
        ty,
        Granularity::M1000,
        Execution::Sequential,
    );
    assert_eq!(tiles[0].bands[0][0], 4.0);
}

#[test]
fn two_days_add_up() {
    let d = domain();
    let divs = divisions(&d, 3);
    let cell = CellKey::new(Granularity::M5000, 2, 1);
    let mut events = vec![event(cell, DAY1); 3];
    events.extend(vec![event(cell, DAY2); 4]);
    let types = HeatmapType::builtins();
    let tiles = rollup_tiles(
        &events,
        &types[0],
        Granularity::M5000,
        Execution::Sequential,
    );
    let s = store(&d, &divs, tiles);
    let q = query(d.rect(), (DAY1, DAY2), 1, Granularity::M5000);
    let r = query_heatmap(&s, &divs, &types, &q, Execution::Parallel).unwrap();
    assert_eq!((r.width, r.height), (4, 3));
    assert_eq!(r.value(2, 1), Some(7.0));
    assert_eq!(r.data_count(), 1);
    let q1 = query(d.rect(), (DAY2, DAY2), 1, Granularity::M5000);
    assert_eq!(
        query_heatmap(&s, &divs, &types, &q1, Execution::Parallel)
            .unwrap()
            .value(2, 1),
        Some(4.0)
    );
}

#[test]
fn single_tile_query_is_identity() {
    let d = domain();
    let divs = divisions(&d, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let events: Vec<_> = random_events(&mut rng, 300, Granularity::M200, &d)
        .into_iter()
        .filter(|e| {
            e.cell.ancestor(Granularity::M5000) == CellKey::new(Granularity::M5000, 1, 1)
                && e.date_id == DAY1
        })
        .collect();
    let types = HeatmapType::builtins();
    let tiles = rollup_tiles(&events, &types[1], Granularity::M200, Execution::Sequential);
    assert_eq!(tiles.len(), 1);
    let s = store(&d, &divs, tiles.clone());
    let area = Rect::new(5000.0, 5000.0, 10_000.0, 10_000.0);
    let r = query_heatmap(
        &s,
        &divs,
        &types,
        &query(area, (DAY1, DAY1), 2, Granularity::M200),
        Execution::Sequential,
    )
    .unwrap();
    assert_eq!(r, tiles[0].to_raster(&d));
}

#[test]
fn two_phase_matches_centralized_oracle() {
    let d = domain();
    let types = HeatmapType::builtins();
    for (seed, res) in [
        (1, Granularity::M50),
        (2, Granularity::M200),
        (3, Granularity::M1000),
        (4, Granularity::M5000),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let events = random_events(&mut rng, 2000, res, &d);
        let divs = divisions(&d, 6);
        let mut tiles = Vec::new();
        for ty in &types {
            tiles.extend(rollup_tiles(&events, ty, res, Execution::Parallel));
        }
        let s = store(&d, &divs, tiles.clone());
        let areas = [
            d.rect(),
            Rect::new(3210.0, 1234.0, 12_345.0, 9876.0),
            Rect::new(-5000.0, 4000.0, 6000.0, 30_000.0),
        ];
        for area in areas {
            for dates in [(DAY1, DAY1), (DAY1, DAY2), (DAY2, DAY2 + 5)] {
                for ty in &types {
                    let q = query(area, dates, ty.id, res);
                    let got = query_bands(&s, &divs, &types, &q, Execution::Parallel).unwrap();
                    let want = oracle(&tiles, &d, ty, &q, seed);
                    if ty.kind == AggKind::Avg {
                        let (g, w) = (got.finalize(), want.finalize());
                        assert_eq!(g.nodata, w.nodata);
                        for (a, b) in g.bands[0].iter().zip(&w.bands[0]) {
                            assert!((a - b).abs() <= 1e-9 * b.abs().max(1e-300), "{a} vs {b}");
                        }
                    } else {
                        assert_eq!(got, want, "type {} res {res} area {area}", ty.id);
                    }
                }
            }
        }
    }
}

#[test]
fn sums_are_exact_under_regrouping() {
    let d = domain();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut events = random_events(&mut rng, 3000, Granularity::M5000, &d);
    let ty = &HeatmapType::builtins()[1];
    let a = rollup_tiles(&events, ty, Granularity::M5000, Execution::Sequential);
    events.shuffle(&mut rng);
    let b = rollup_tiles(&events, ty, Granularity::M5000, Execution::Parallel);
    assert_eq!(a, b);
}

#[test]
fn coarse_counts_are_block_sums_of_fine_counts() {
    let d = domain();
    let divs = divisions(&d, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let fine = random_events(&mut rng, 5000, Granularity::M50, &d);
    let coarse: Vec<CellEvent> = fine
        .iter()
        .map(|e| CellEvent {
            cell: e.cell.ancestor(Granularity::M5000),
            ..e.clone()
        })
        .collect();
    let types = HeatmapType::builtins();
    let mut tiles = rollup_tiles(&fine, &types[0], Granularity::M50, Execution::Parallel);
    tiles.extend(rollup_tiles(
        &coarse,
        &types[0],
        Granularity::M5000,
        Execution::Parallel,
    ));
    let s = store(&d, &divs, tiles);
    let area = d.rect();
    let f = query_heatmap(
        &s,
        &divs,
        &types,
        &query(area, (DAY1, DAY2), 1, Granularity::M50),
        Execution::Parallel,
    )
    .unwrap();
    let c = query_heatmap(
        &s,
        &divs,
        &types,
        &query(area, (DAY1, DAY2), 1, Granularity::M5000),
        Execution::Parallel,
    )
    .unwrap();
    for j in 0..c.height {
        for i in 0..c.width {
            let mut sum = 0.0;
            for jj in j * 100..(j + 1) * 100 {
                for ii in i * 100..(i + 1) * 100 {
                    sum += f.value(ii, jj).unwrap_or(0.0);
                }
            }
            assert_eq!(c.value(i, j).unwrap_or(0.0), sum);
        }
    }
}

#[test]
fn pixels_outside_area_are_nodata() {
    let d = domain();
    let divs = divisions(&d, 2);
    let all: Vec<CellEvent> = (0..20)
        .flat_map(|c| (0..15).map(move |r| event(CellKey::new(Granularity::M1000, c, r), DAY1)))
        .collect();
    let types = HeatmapType::builtins();
    let s = store(
        &d,
        &divs,
        rollup_tiles(&all, &types[0], Granularity::M1000, Execution::Sequential),
    );
    let area = Rect::new(1500.0, 2600.0, 4400.0, 5000.0);
    let r = query_heatmap(
        &s,
        &divs,
        &types,
        &query(area, (DAY1, DAY1), 1, Granularity::M1000),
        Execution::Sequential,
    )
    .unwrap();
    assert_eq!(
        (r.origin_x, r.origin_y, r.width, r.height),
        (1000.0, 2000.0, 4, 3)
    );
    for j in 0..r.height {
        for i in 0..r.width {
            let (x, y) = r.center(i, j);
            assert_eq!(r.value(i, j).is_some(), area.contains(x, y));
        }
    }
}

#[test]
fn query_errors() {
    let d = domain();
    let divs = divisions(&d, 2);
    let s = TileStore::new(d);
    let types = HeatmapType::builtins();
    let outside = query(
        Rect::new(50_000.0, 0.0, 60_000.0, 10.0),
        (DAY1, DAY1),
        1,
        Granularity::M50,
    );
    assert!(matches!(
        query_heatmap(&s, &divs, &types, &outside, Execution::Sequential),
        Err(crate::Error::OutsideDomain { .. })
    ));
    let unknown = query(d.rect(), (DAY1, DAY1), 99, Granularity::M50);
    assert!(matches!(
        query_heatmap(&s, &divs, &types, &unknown, Execution::Sequential),
        Err(crate::Error::UnknownHeatmapType(99))
    ));
    let empty = query(d.rect(), (DAY1, DAY1), 1, Granularity::M5000);
    let r = query_heatmap(&s, &divs, &types, &empty, Execution::Sequential).unwrap();
    assert_eq!((r.width, r.height, r.data_count()), (4, 3, 0));
    assert_eq!(
        HeatmapQuery::parse_dates("20240301:20240302").unwrap(),
        (DAY1, DAY2)
    );
    assert!(HeatmapQuery::parse_dates("20240302:20240301").is_err());
    assert!(HeatmapQuery::parse_dates("20240230:20240301").is_err());
}

#[test]
fn rollup_heatmaps_needs_facts_per_resolution() {
    let mut facts = crate::grid::CellFacts::new();
    facts.insert(
        Granularity::M5000,
        vec![event(CellKey::new(Granularity::M5000, 0, 0), DAY1)],
    );
    let types = HeatmapType::builtins();
    let tiles =
        rollup_heatmaps(&facts, &types, &[Granularity::M5000], Execution::Sequential).unwrap();
    assert_eq!(tiles.len(), 5);
    assert!(rollup_heatmaps(&facts, &types, &[Granularity::M50], Execution::Sequential).is_err());
    let mut dup = types.clone();
    dup[1].id = 1;
    assert!(rollup_heatmaps(&facts, &dup, &[Granularity::M5000], Execution::Sequential).is_err());
}

#[test]
fn store_round_trip_and_locality() {
    let d = domain();
    let divs = divisions(&d, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let events = random_events(&mut rng, 1500, Granularity::M200, &d);
    let mut tiles = Vec::new();
    for ty in HeatmapType::builtins() {
        tiles.extend(rollup_tiles(
            &events,
            &ty,
            Granularity::M200,
            Execution::Parallel,
        ));
    }
    let s = store(&d, &divs, tiles);
    let index = divs.index().unwrap();
    let mut seen = 0;
    for div in &divs.divisions {
        for (k, t) in s.division_tiles(div.id) {
            assert_eq!(k.division, div.id);
            assert_eq!(index.division_of_cell(&t.anchor).unwrap(), div.id);
            seen += 1;
        }
    }
    assert_eq!(seen, s.len());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tiles.bin");
    s.write(&path).unwrap();
    assert_eq!(TileStore::read(&path).unwrap(), s);
}

#[test]
fn render_single_zero_pixel() {
    let mut r = Raster::empty((0.0, 0.0), 50.0, 1, 1, 1);
    r.nodata[0] = false;
    let img = to_image(&r, Scale::Linear);
    let [cr, cg, cb] = colormap(0.0);
    assert_eq!(img.get_pixel(0, 0).0, [cr, cg, cb, 255]);
}

#[test]
fn render_all_nodata_is_transparent() {
    let r = Raster::empty((0.0, 0.0), 50.0, 7, 3, 1);
    let img = to_image(&r, Scale::Log);
    assert!(img.pixels().all(|p| p.0[3] == 0));
}

#[test]
fn render_ramp_is_monotone_after_decoding() {
    let mut r = Raster::empty((0.0, 0.0), 50.0, 100, 100, 1);
    for j in 0..100 {
        for i in 0..100 {
            let k = r.index(i, j);
            r.nodata[k] = false;
            r.bands[0][k] = (j * 100 + i) as f64;
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ramp.png");
    for scale in [Scale::Linear, Scale::Log] {
        render(&r, scale, &path).unwrap();
        let img = image::open(&path).unwrap().to_rgba8();
        assert_eq!(img.dimensions(), (100, 100));
        // Raster row j sits at image row 99 - j.
        let px = |i: u32, j: u32| img.get_pixel(i, 99 - j).0;
        let luma = |i: u32, j: u32| {
            let p = px(i, j);
            0.2126 * p[0] as f64 + 0.7152 * p[1] as f64 + 0.0722 * p[2] as f64
        };
        // Red and green rise monotonically along the colormap.
        let mut prev = [0u8; 2];
        for j in 0..100 {
            for i in 0..100 {
                let p = px(i, j);
                assert!(
                    p[0] >= prev[0] && p[1] >= prev[1],
                    "color drops at ({i},{j})"
                );
                prev = [p[0], p[1]];
            }
        }
        assert!(luma(0, 0) < luma(99, 99));
    }
    let asc = std::fs::read_to_string(path.with_extension("asc")).unwrap();
    let lines: Vec<&str> = asc.lines().collect();
    assert_eq!(lines[0], "ncols 100");
    assert_eq!(lines[1], "nrows 100");
    assert_eq!(lines[5], "NODATA_value -9999");
    assert!(lines[6].starts_with("9900 9901 "));
    assert!(lines[105].starts_with("0 1 2 "));
}
