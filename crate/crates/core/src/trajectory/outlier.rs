use super::model::TrajPoint;

/// Greedy forward filter: a point is dropped when the implied speed from the
/// last retained point exceeds `outlier_speed` knots.
pub fn remove_outliers(points: &[TrajPoint], outlier_speed: f64) -> Vec<TrajPoint> {
    let mut kept: Vec<TrajPoint> = Vec::with_capacity(points.len());
    for p in points {
        match kept.last() {
            Some(last) if last.speed_to(p) > outlier_speed => {}
            _ => kept.push(*p),
        }
    }
    kept
}
