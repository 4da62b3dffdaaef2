//! Count-balanced kd-tree divisions.

use super::division::{DivisionSet, SpatialDivision};
use super::grid::{CellRect, CountGrid, PrefixSums};

struct Leaf {
    rect: CellRect,
    count: u64,
    created: u32,
}

fn halves(rect: &CellRect, along_x: bool, k: u32) -> (CellRect, CellRect) {
    if along_x {
        (
            CellRect {
                c1: rect.c0 + k,
                ..*rect
            },
            CellRect {
                c0: rect.c0 + k,
                ..*rect
            },
        )
    } else {
        (
            CellRect {
                r1: rect.r0 + k,
                ..*rect
            },
            CellRect {
                r0: rect.r0 + k,
                ..*rect
            },
        )
    }
}

/// Best lattice-aligned split of `rect` that leaves data on both sides:
/// along the longer axis (ties to x), falling back to the other axis, at
/// the position minimizing the count difference (ties to the lower
/// coordinate).
fn best_split(rect: &CellRect, prefix: &PrefixSums, total: u64) -> Option<(CellRect, CellRect)> {
    let longer_x = rect.width() >= rect.height();
    for along_x in [longer_x, !longer_x] {
        let len = if along_x { rect.width() } else { rect.height() };
        let best = (1..len)
            .map(|k| (k, prefix.sum(&halves(rect, along_x, k).0)))
            .filter(|&(_, left)| left > 0 && left < total)
            .min_by_key(|&(_, left)| left.abs_diff(total - left));
        if let Some((k, _)) = best {
            return Some(halves(rect, along_x, k));
        }
    }
    None
}

/// Greedy kd-tree: repeatedly split the leaf with the largest count (ties to
/// the earliest created) while the budget allows, stopping early when that
/// leaf cannot be split. Splits never create an empty division, so every
/// division holds data unless the grid is empty.
pub fn build_kdtree(grid: &CountGrid, max_divisions: usize) -> DivisionSet {
    let max_divisions = max_divisions.max(1);
    let prefix = grid.prefix();
    let whole = CellRect {
        c0: 0,
        r0: 0,
        c1: grid.width,
        r1: grid.height,
    };
    let mut created = 1;
    let mut leaves = vec![Leaf {
        rect: whole,
        count: prefix.sum(&whole),
        created,
    }];

    while leaves.len() < max_divisions {
        let best = leaves
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.count.cmp(&b.count).then(b.created.cmp(&a.created)))
            .map(|(i, _)| i)
            .expect("at least one leaf");
        let Some((a, b)) = best_split(&leaves[best].rect, &prefix, leaves[best].count) else {
            break;
        };
        leaves.swap_remove(best);
        for rect in [a, b] {
            created += 1;
            leaves.push(Leaf {
                rect,
                count: prefix.sum(&rect),
                created,
            });
        }
    }

    leaves.sort_by_key(|l| l.created);
    DivisionSet {
        domain: grid.domain,
        divisions: leaves
            .into_iter()
            .enumerate()
            .map(|(i, l)| SpatialDivision {
                id: i as u32 + 1,
                rect: l.rect.to_rect(&grid.domain),
                count: l.count,
            })
            .collect(),
    }
}
