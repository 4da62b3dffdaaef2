use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geom::LATTICE_M;
use crate::grid::{CellKey, Granularity};

fn grid(w: u32, h: u32, counts: Vec<u64>) -> CountGrid {
    CountGrid::from_counts((0.0, 0.0), w, h, counts)
}

fn uniform(w: u32, h: u32, n: u64) -> CountGrid {
    grid(w, h, vec![n; (w * h) as usize])
}

fn cells(d: &SpatialDivision) -> (f64, f64) {
    (d.rect.width() / LATTICE_M, d.rect.height() / LATTICE_M)
}

fn skewed(w: u32, h: u32, seed: u64) -> CountGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = uniform(w, h, 0);
    for _ in 0..20_000 {
        // Two dense lanes plus sparse background.
        let (c, r) = if rng.gen_bool(0.85) {
            let c = rng.gen_range(0..w);
            if rng.gen_bool(0.5) {
                (c, (h / 4).min(h - 1))
            } else {
                (c, (c * h / w).min(h - 1))
            }
        } else {
            (rng.gen_range(0..w), rng.gen_range(0..h))
        };
        g.add(c, r, 1);
    }
    g
}

#[test]
fn uniform_quadtree_splits_into_quadrants() {
    let g = uniform(4, 4, 1);
    let set = build_quadtree(&g, 4);
    set.validate().unwrap();
    assert_eq!(set.len(), 4);
    for d in &set.divisions {
        assert_eq!(cells(d), (2.0, 2.0));
        assert_eq!(d.count, 4);
    }
}

#[test]
fn quadtree_chases_corner_mass() {
    let mut g = uniform(16, 16, 0);
    g.add(0, 0, 100);
    // 1 -> 4 -> 7 -> 10 leaves; a fourth split would reach 13.
    let set = build_quadtree(&g, 10);
    set.validate().unwrap();
    assert_eq!(set.len(), 10);
    let idx = set.index().unwrap();
    let hot = set.get(idx.division_of_point(1.0, 1.0).unwrap()).unwrap();
    assert_eq!(cells(hot), (2.0, 2.0));
    assert_eq!(hot.count, 100);
    let sizes: Vec<f64> = set.divisions.iter().map(|d| cells(d).0).collect();
    assert_eq!(sizes.iter().filter(|&&s| s == 8.0).count(), 3);
    assert_eq!(sizes.iter().filter(|&&s| s == 4.0).count(), 3);
    assert_eq!(sizes.iter().filter(|&&s| s == 2.0).count(), 4);
}

#[test]
fn quadtree_stops_at_single_cells() {
    let mut g = uniform(2, 2, 0);
    g.add(1, 1, 5);
    let set = build_quadtree(&g, 100);
    assert_eq!(set.len(), 4);
}

#[test]
fn quadtree_clips_to_rectangular_domain() {
    let g = uniform(3, 2, 1);
    let set = build_quadtree(&g, 16);
    set.validate().unwrap();
    assert_eq!(set.divisions.iter().map(|d| d.count).sum::<u64>(), 6);
    assert!(set.divisions.iter().all(|d| cells(d) == (1.0, 1.0)));
}

#[test]
fn budget_of_one_is_the_whole_domain() {
    let g = skewed(8, 8, 1);
    for set in [build_quadtree(&g, 1), build_kdtree(&g, 1)] {
        assert_eq!(set.len(), 1);
        assert_eq!(set.divisions[0].rect, g.domain.rect());
        assert_eq!(set.divisions[0].count, g.total());
    }
}

#[test]
fn kdtree_splits_even_pair() {
    let g = grid(2, 1, vec![10, 10]);
    let set = build_kdtree(&g, 2);
    assert_eq!(set.len(), 2);
    assert_eq!(
        set.divisions.iter().map(|d| d.count).collect::<Vec<_>>(),
        vec![10, 10]
    );
}

#[test]
fn kdtree_prefers_lower_split_on_ties() {
    // Splits after column 1 and after column 2 are equally unbalanced.
    let g = grid(3, 1, vec![5, 0, 5]);
    let set = build_kdtree(&g, 2);
    assert_eq!(set.divisions[0].rect.x_max, LATTICE_M);
}

#[test]
fn kdtree_never_creates_empty_divisions() {
    let mut g = uniform(4, 4, 0);
    g.add(2, 3, 7);
    assert_eq!(build_kdtree(&g, 1000).len(), 1);
    g.add(0, 0, 1);
    g.add(3, 0, 2);
    let set = build_kdtree(&g, 1000);
    set.validate().unwrap();
    assert_eq!(set.len(), 3);
    assert!(set.divisions.iter().all(|d| d.count > 0));
}

#[test]
fn kdtree_stops_when_the_heaviest_leaf_is_a_single_cell() {
    // 1x4 strip: the first split isolates the 9 and leaves (1, 1, 1),
    // which could still be split but is lighter.
    let g = grid(4, 1, vec![9, 1, 1, 1]);
    let set = build_kdtree(&g, 10);
    assert_eq!(set.len(), 2);
    let counts: Vec<u64> = set.divisions.iter().map(|d| d.count).collect();
    assert_eq!(counts, vec![9, 3]);
}

#[test]
fn kdtree_falls_back_to_the_short_axis() {
    // Wide leaf whose data sits in one column: only a y split separates it.
    let mut g = uniform(4, 2, 0);
    g.add(1, 0, 3);
    g.add(1, 1, 3);
    let set = build_kdtree(&g, 2);
    assert_eq!(set.len(), 2);
    assert_eq!(set.divisions[0].rect.y_max, LATTICE_M);
    assert_eq!(set.divisions[0].rect.width(), 4.0 * LATTICE_M);
}

#[test]
fn uniform_kdtree_is_perfectly_balanced() {
    let g = uniform(16, 16, 3);
    let set = build_kdtree(&g, 16);
    let report = balance(&set, &g).unwrap();
    assert_eq!(set.len(), 16);
    assert_eq!(report.sd, 0.0);
    assert_eq!(report.cv, 0.0);
}

#[test]
fn kdtree_beats_quadtree_on_skewed_data() {
    let g = skewed(40, 40, 7);
    let kd = balance(&build_kdtree(&g, 64), &g).unwrap();
    let quad = balance(&build_quadtree(&g, 64), &g).unwrap();
    assert!(kd.cv < quad.cv, "kd {} quad {}", kd.cv, quad.cv);
}

#[test]
fn balance_statistics_by_hand() {
    let r = BalanceReport::from_counts(vec![10, 20, 30, 40]);
    approx::assert_abs_diff_eq!(r.sd, 125f64.sqrt(), epsilon = 1e-12);
    approx::assert_abs_diff_eq!(r.cv, 125f64.sqrt() / 25.0 * 100.0, epsilon = 1e-12);
    assert_eq!(BalanceReport::from_counts(vec![0, 0]).cv, 0.0);
}

#[test]
fn drift_degrades_stale_divisions() {
    let before = skewed(32, 32, 3);
    let set = build_kdtree(&before, 32);
    let fresh = balance(&set, &before).unwrap();
    // Shift all traffic by a quarter of the domain.
    let mut after = uniform(32, 32, 0);
    for r in 0..32 {
        for c in 0..32 {
            after.add((c + 8) % 32, (r + 8) % 32, before.get(c, r));
        }
    }
    let stale = balance(&set, &after).unwrap();
    assert!(stale.cv > fresh.cv);
}

#[test]
fn balance_rejects_mismatched_domain() {
    let set = build_kdtree(&uniform(2, 2, 1), 2);
    assert!(balance(&set, &uniform(4, 4, 1)).is_err());
}

#[test]
fn index_lookup_is_exhaustive() {
    let g = skewed(12, 9, 5);
    for set in [build_kdtree(&g, 20), build_quadtree(&g, 20)] {
        let idx = set.index().unwrap();
        for r in 0..9 {
            for c in 0..12 {
                let x = c as f64 * LATTICE_M + 1.0;
                let y = r as f64 * LATTICE_M + 1.0;
                let id = idx.division_of_point(x, y).unwrap();
                let owners: Vec<u32> = set
                    .divisions
                    .iter()
                    .filter(|d| d.rect.contains(x, y))
                    .map(|d| d.id)
                    .collect();
                assert_eq!(owners, vec![id]);
                let fine = CellKey::new(Granularity::M50, c * 100 + 3, r * 100 + 99);
                assert_eq!(idx.division_of_cell(&fine).unwrap(), id);
            }
        }
        assert!(idx.division_of_point(-1.0, 0.0).is_err());
        assert!(idx.division_of_point(12.0 * LATTICE_M, 0.0).is_err());
    }
}

#[test]
fn validation_catches_gaps_and_overlaps() {
    let g = uniform(4, 4, 1);
    let mut set = build_kdtree(&g, 4);
    let mut gap = set.clone();
    gap.divisions.pop();
    assert!(gap.validate().is_err());
    set.divisions[0].rect.x_max += LATTICE_M;
    assert!(set.validate().is_err());
}

#[test]
fn division_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("divisions.csv");
    let g = skewed(10, 10, 9);
    let set = build_kdtree(&g, 17);
    set.write(&path).unwrap();
    assert_eq!(DivisionSet::read(&path).unwrap(), set);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn divisions_always_partition(
        w in 1u32..12, h in 1u32..12, budget in 1usize..40, seed in any::<u64>(), quad in any::<bool>()
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let counts = (0..w * h).map(|_| if rng.gen_bool(0.3) { rng.gen_range(0..50) } else { 0 }).collect();
        let g = grid(w, h, counts);
        let set = if quad { build_quadtree(&g, budget) } else { build_kdtree(&g, budget) };
        prop_assert!(set.len() <= budget);
        set.validate().unwrap();
        let ids: Vec<u32> = set.divisions.iter().map(|d| d.id).collect();
        prop_assert_eq!(ids, (1..=set.len() as u32).collect::<Vec<_>>());
        let recount = set.recount(&g);
        prop_assert_eq!(recount, set.divisions.iter().map(|d| d.count).collect::<Vec<_>>());
        prop_assert_eq!(set.divisions.iter().map(|d| d.count).sum::<u64>(), g.total());
        if !quad && g.total() > 0 {
            prop_assert!(set.divisions.iter().all(|d| d.count > 0));
        }
    }
}
