//! Spatial divisions over the 5000 m count histogram and their balance.

mod balance;
mod division;
mod grid;
mod kdtree;
mod quadtree;

pub use balance::{balance, BalanceReport};
pub use division::{DivisionIndex, DivisionSet, SpatialDivision};
pub use grid::CountGrid;
pub use kdtree::build_kdtree;
pub use quadtree::build_quadtree;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivisionMethod {
    #[default]
    Kd,
    Quad,
}

pub fn build_divisions(
    grid: &CountGrid,
    max_divisions: usize,
    method: DivisionMethod,
) -> DivisionSet {
    match method {
        DivisionMethod::Kd => build_kdtree(grid, max_divisions),
        DivisionMethod::Quad => build_quadtree(grid, max_divisions),
    }
}

#[cfg(test)]
mod tests;
