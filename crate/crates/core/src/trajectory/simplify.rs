//! Douglas-Peucker simplification under the Synchronized Euclidean Distance.
//!
//! The SED of a sample is its distance to the position the simplified
//! trajectory reports at the same instant, i.e. the point linearly
//! interpolated in time along the retained segment that spans it.

use super::model::{TrajPoint, Trajectory};

/// Distance between `p` and the time-synchronized position on `a -> b`.
pub fn sed(p: &TrajPoint, a: &TrajPoint, b: &TrajPoint) -> f64 {
    let span = (b.t - a.t) as f64;
    let f = if span > 0.0 {
        (p.t - a.t) as f64 / span
    } else {
        0.0
    };
    let x = a.x + f * (b.x - a.x);
    let y = a.y + f * (b.y - a.y);
    (p.x - x).hypot(p.y - y)
}

/// Indices of the samples retained at tolerance `epsilon`, ascending.
///
/// The range is split at the sample with the largest SED while that exceeds
/// `epsilon`; on ties the lowest index wins.
pub fn simplify_indices(points: &[TrajPoint], epsilon: f64) -> Vec<usize> {
    let n = points.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut keep = vec![false; n];
    keep[0] = true;
    keep[n - 1] = true;
    let mut stack = vec![(0usize, n - 1)];
    while let Some((s, e)) = stack.pop() {
        if e <= s + 1 {
            continue;
        }
        let (a, b) = (&points[s], &points[e]);
        let mut best = (s, 0.0f64);
        for (i, p) in points.iter().enumerate().take(e).skip(s + 1) {
            let d = sed(p, a, b);
            if d > best.1 {
                best = (i, d);
            }
        }
        if best.1 > epsilon {
            keep[best.0] = true;
            stack.push((best.0, e));
            stack.push((s, best.0));
        }
    }
    (0..n).filter(|&i| keep[i]).collect()
}

/// Simplifies `traj` keeping its identity; duration is unchanged and the
/// length is recomputed on the retained samples.
pub fn simplify(traj: &Trajectory, epsilon: f64) -> Trajectory {
    let idx = simplify_indices(&traj.points, epsilon);
    let points = idx.into_iter().map(|i| traj.points[i]).collect();
    Trajectory::new(
        traj.id,
        traj.mmsi,
        points,
        traj.infer_stopped,
        traj.destination.clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Mmsi;
    use proptest::prelude::*;

    fn traj(points: Vec<TrajPoint>) -> Trajectory {
        Trajectory::new(7, Mmsi(219_000_001), points, false, None)
    }

    /// Independent brute-force check: for every sample missing from the
    /// simplified trajectory, interpolate the simplified path at its time.
    fn max_removed_sed(orig: &Trajectory, simp: &Trajectory) -> f64 {
        let mut worst = 0.0f64;
        for p in &orig.points {
            if simp.points.iter().any(|q| q.t == p.t) {
                continue;
            }
            let (x, y) = simp.position_at(p.t as f64);
            worst = worst.max(((p.x - x).powi(2) + (p.y - y).powi(2)).sqrt());
        }
        worst
    }

    #[test]
    fn collinear_constant_speed_keeps_endpoints() {
        let pts: Vec<_> = (0..50)
            .map(|i| TrajPoint::new(i * 10, i as f64 * 7.0, i as f64 * 3.0))
            .collect();
        let s = simplify(&traj(pts), 10.0);
        assert_eq!(s.points.len(), 2);
        assert_eq!(s.duration, 490);
    }

    #[test]
    fn collinear_but_varying_speed_is_not_collapsed() {
        // Same path, but the ship lingers: SED catches what perpendicular distance cannot.
        let pts = vec![
            TrajPoint::new(0, 0.0, 0.0),
            TrajPoint::new(100, 10.0, 0.0),
            TrajPoint::new(110, 1_000.0, 0.0),
        ];
        assert_eq!(simplify(&traj(pts), 10.0).points.len(), 3);
    }

    #[test]
    fn right_angle_turn() {
        let mut pts: Vec<_> = (0..=10)
            .map(|i| TrajPoint::new(i * 10, i as f64 * 100.0, 0.0))
            .collect();
        pts.extend((1..=10).map(|i| TrajPoint::new(100 + i * 10, 1_000.0, i as f64 * 100.0)));
        let s = simplify(&traj(pts), 10.0);
        let kept: Vec<(f64, f64)> = s.points.iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(kept, vec![(0.0, 0.0), (1_000.0, 0.0), (1_000.0, 1_000.0)]);
        assert_eq!(s.length, 2_000.0);
    }

    #[test]
    fn tie_breaks_on_lowest_index() {
        let pts = vec![
            TrajPoint::new(0, 0.0, 0.0),
            TrajPoint::new(10, 10.0, 50.0),
            TrajPoint::new(20, 20.0, 50.0),
            TrajPoint::new(30, 30.0, 0.0),
        ];
        let idx = simplify_indices(&pts, 45.0);
        assert_eq!(idx, vec![0, 1, 3]);
    }

    #[test]
    fn noisy_track_sed_bound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut pts = Vec::new();
        let (mut x, mut y, mut h) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..1_000 {
            h += rng.gen_range(-0.1..0.1);
            x += 50.0 * h.cos();
            y += 50.0 * h.sin();
            pts.push(TrajPoint::new(
                i * 10,
                x + rng.gen_range(-5.0..5.0),
                y + rng.gen_range(-5.0..5.0),
            ));
        }
        let t = traj(pts);
        let s = simplify(&t, 10.0);
        assert!(s.points.len() < t.points.len());
        assert!(max_removed_sed(&t, &s) <= 10.0);
    }

    fn arb_points() -> impl Strategy<Value = Vec<TrajPoint>> {
        prop::collection::vec((1i64..60, -80.0f64..80.0, -80.0f64..80.0), 2..120).prop_map(
            |steps| {
                let (mut t, mut x, mut y) = (0i64, 0.0, 0.0);
                steps
                    .into_iter()
                    .map(|(dt, dx, dy)| {
                        t += dt;
                        x += dx;
                        y += dy;
                        TrajPoint::new(t, x, y)
                    })
                    .collect()
            },
        )
    }

    proptest! {
        #[test]
        fn sed_bound_idempotence_and_monotonicity(pts in arb_points(), e1 in 0.5f64..50.0, e2 in 0.5f64..50.0) {
            let t = traj(pts);
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let a = simplify(&t, lo);
            let b = simplify(&t, hi);
            prop_assert!(max_removed_sed(&t, &a) <= lo);
            prop_assert!(max_removed_sed(&t, &b) <= hi);
            prop_assert_eq!(&simplify(&a, lo), &a);
            prop_assert!(b.points.len() <= a.points.len());
            prop_assert_eq!(a.points[0], t.points[0]);
            prop_assert_eq!(a.points.last(), t.points.last());
            prop_assert_eq!(a.duration, t.duration);
        }
    }
}
