//! Observation payloads exchanged between the world (or the belief-space
//! sampler) and the belief updater.

use serde::{Deserialize, Serialize};

/// One rock seen by the remote sensor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservedRock {
    /// Stable identity for rocks that have one (ground-truth rocks, or rocks
    /// already tracked by the belief). `None` marks a rock imagined while
    /// sampling from the belief; the belief assigns it an id on update.
    pub id: Option<u64>,
    /// Rock-grid cell holding the rock.
    pub cell: (usize, usize),
    /// One reading per feature channel.
    pub readings: Vec<usize>,
}

/// Result of firing the remote sensor: the rock cells the footprint covered
/// and the rocks detected inside it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemoteObservation {
    /// Rock-grid cells covered by the footprint, in ascending `(x, y)` order.
    pub covered: Vec<(usize, usize)>,
    pub rocks: Vec<ObservedRock>,
}

/// Result of firing the local sensor at the robot's map cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalObservation {
    /// Map cell (location-grid coordinates).
    pub cell: (usize, usize),
    /// Material class reading.
    pub reading: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observation {
    Remote(RemoteObservation),
    Local(LocalObservation),
}

impl Observation {
    /// An observation carrying no evidence (for suppressed sensor firings).
    pub fn empty_remote() -> Self {
        Observation::Remote(RemoteObservation {
            covered: Vec::new(),
            rocks: Vec::new(),
        })
    }
}
