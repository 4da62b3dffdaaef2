//! Four-level cell hierarchy and trajectory-to-cell rollup.

mod cell;
mod rollup;
pub mod store;

pub use cell::{cell_of, CellKey, Granularity};
pub use rollup::{angle_change, rollup_cells, CellEvent};

use std::collections::BTreeMap;

use crate::exec::{self, Execution};
use crate::geom::Domain;
use crate::trajectory::Trajectory;

/// Cell events per granularity, each ordered by trajectory id then time.
pub type CellFacts = BTreeMap<Granularity, Vec<CellEvent>>;

/// Rolls every trajectory up at every requested granularity.
pub fn rollup_all(
    trajectories: &[Trajectory],
    domain: &Domain,
    granularities: &[Granularity],
    exec: Execution,
) -> CellFacts {
    granularities
        .iter()
        .map(|&g| {
            (
                g,
                exec::flat_map(exec, trajectories, |t| rollup_cells(t, domain, g)),
            )
        })
        .collect()
}
