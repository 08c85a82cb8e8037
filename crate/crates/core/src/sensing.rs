//! The action space shared by every planner: pose kinematics on the map
//! grid, the 10 movement+sensor actions, and the cost/budget model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Eight compass headings in 45-degree increments. Positive rotation is
/// clockwise; `y` grows southward, so `North` points toward decreasing `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Heading {
    North,
    NorthEast,
    East,
    SouthEast,
    South,
    SouthWest,
    West,
    NorthWest,
}

impl Heading {
    pub const ALL: [Heading; 8] = [
        Heading::North,
        Heading::NorthEast,
        Heading::East,
        Heading::SouthEast,
        Heading::South,
        Heading::SouthWest,
        Heading::West,
        Heading::NorthWest,
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&h| h == self).unwrap()
    }

    /// One grid step along this heading (diagonals step both axes).
    pub fn step(self) -> (i64, i64) {
        match self {
            Heading::North => (0, -1),
            Heading::NorthEast => (1, -1),
            Heading::East => (1, 0),
            Heading::SouthEast => (1, 1),
            Heading::South => (0, 1),
            Heading::SouthWest => (-1, 1),
            Heading::West => (-1, 0),
            Heading::NorthWest => (-1, -1),
        }
    }

    /// Unit direction vector (diagonals normalized).
    pub fn unit(self) -> (f64, f64) {
        let (dx, dy) = self.step();
        let n = ((dx * dx + dy * dy) as f64).sqrt();
        (dx as f64 / n, dy as f64 / n)
    }

    /// Rotated by `steps_cw * 45` degrees, positive clockwise.
    pub fn rotated(self, steps_cw: i32) -> Heading {
        let i = (self.index() as i32 + steps_cw).rem_euclid(8) as usize;
        Self::ALL[i]
    }
}

/// Robot pose: map-cell position plus compass heading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pose {
    pub x: usize,
    pub y: usize,
    pub heading: Heading,
}

impl Pose {
    pub fn new(x: usize, y: usize, heading: Heading) -> Self {
        Self { x, y, heading }
    }
}

/// The movement component of an action: step forward or rotate in place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    Forward,
    /// Rotate 90 degrees counterclockwise.
    TurnLeft90,
    /// Rotate 45 degrees counterclockwise.
    TurnLeft45,
    /// Rotate 45 degrees clockwise.
    TurnRight45,
    /// Rotate 90 degrees clockwise.
    TurnRight90,
}

impl MoveKind {
    pub const ALL: [MoveKind; 5] = [
        MoveKind::Forward,
        MoveKind::TurnLeft90,
        MoveKind::TurnLeft45,
        MoveKind::TurnRight45,
        MoveKind::TurnRight90,
    ];

    pub fn rotation_steps(self) -> i32 {
        match self {
            MoveKind::Forward => 0,
            MoveKind::TurnLeft90 => -2,
            MoveKind::TurnLeft45 => -1,
            MoveKind::TurnRight45 => 1,
            MoveKind::TurnRight90 => 2,
        }
    }
}

/// Which sensor fires after the movement completes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorKind {
    /// Wide-footprint low-cost sensor reading rock feature channels.
    Remote,
    /// Narrow high-cost sensor reading the material at the robot's cell.
    Local,
}

/// One of the ten movement+sensor combinations. The movement executes first,
/// then the chosen sensor fires from the resulting pose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SensingAction {
    pub move_kind: MoveKind,
    pub sensor: SensorKind,
}

impl SensingAction {
    pub const COUNT: usize = 10;

    /// The fixed enumeration order used for deterministic tie-breaking:
    /// move-major, remote before local.
    pub fn all() -> [SensingAction; Self::COUNT] {
        let mut out = [SensingAction {
            move_kind: MoveKind::Forward,
            sensor: SensorKind::Remote,
        }; Self::COUNT];
        let mut i = 0;
        for move_kind in MoveKind::ALL {
            for sensor in [SensorKind::Remote, SensorKind::Local] {
                out[i] = SensingAction { move_kind, sensor };
                i += 1;
            }
        }
        out
    }

    /// Position in the fixed enumeration order.
    pub fn index(self) -> usize {
        Self::all().iter().position(|&a| a == self).unwrap()
    }
}

/// Budget units consumed per sensor use. Movement itself is free; the cost
/// of an action is the cost of the sensor it fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostModel {
    pub remote_cost: u32,
    pub local_cost: u32,
}

impl CostModel {
    /// Simulation preset: remote 1, local 8.
    pub fn sim() -> Self {
        Self {
            remote_cost: 1,
            local_cost: 8,
        }
    }

    /// Hardware preset: remote 1, local 5.
    pub fn hardware() -> Self {
        Self {
            remote_cost: 1,
            local_cost: 5,
        }
    }

    pub fn from_preset(name: &str) -> Result<Self> {
        match name {
            "sim" => Ok(Self::sim()),
            "hardware" => Ok(Self::hardware()),
            other => Err(Error::InvalidConfig(format!(
                "unknown cost preset '{other}' (expected 'sim' or 'hardware')"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.remote_cost == 0 || self.local_cost == 0 {
            return Err(Error::InvalidConfig(
                "sensor costs must be positive".into(),
            ));
        }
        Ok(())
    }
}

impl Default for CostModel {
    fn default() -> Self {
        Self::sim()
    }
}

/// Behavioral switches that are deliberately kept out of the action space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensingRules {
    /// When false, rotation actions suppress their sensor reading (the
    /// budget cost is unchanged). Default: the sensor always fires.
    pub sense_on_rotate: bool,
}

impl Default for SensingRules {
    fn default() -> Self {
        Self {
            sense_on_rotate: true,
        }
    }
}

impl SensingRules {
    pub fn fires(&self, move_kind: MoveKind) -> bool {
        self.sense_on_rotate || move_kind == MoveKind::Forward
    }
}

/// Budget cost of an action under a cost model.
pub fn action_cost(action: SensingAction, cost: &CostModel) -> u32 {
    match action.sensor {
        SensorKind::Remote => cost.remote_cost,
        SensorKind::Local => cost.local_cost,
    }
}

/// Whether the movement component is executable from `pose`.
pub fn move_is_legal(
    pose: &Pose,
    move_kind: MoveKind,
    width: usize,
    height: usize,
    obstacles: Option<&Grid<bool>>,
) -> bool {
    match move_kind {
        MoveKind::Forward => {
            let (dx, dy) = pose.heading.step();
            let (nx, ny) = (pose.x as i64 + dx, pose.y as i64 + dy);
            if nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                return false;
            }
            !obstacles.is_some_and(|g| *g.at(nx as usize, ny as usize))
        }
        _ => true,
    }
}

/// Executes the movement component, erroring on an illegal move.
pub fn apply_move(
    pose: &Pose,
    move_kind: MoveKind,
    width: usize,
    height: usize,
    obstacles: Option<&Grid<bool>>,
) -> Result<Pose> {
    if !move_is_legal(pose, move_kind, width, height, obstacles) {
        return Err(Error::IllegalAction(format!(
            "{move_kind:?} from ({}, {}) heading {:?}",
            pose.x, pose.y, pose.heading
        )));
    }
    Ok(match move_kind {
        MoveKind::Forward => {
            let (dx, dy) = pose.heading.step();
            Pose {
                x: (pose.x as i64 + dx) as usize,
                y: (pose.y as i64 + dy) as usize,
                heading: pose.heading,
            }
        }
        rot => Pose {
            x: pose.x,
            y: pose.y,
            heading: pose.heading.rotated(rot.rotation_steps()),
        },
    })
}

/// All actions whose movement is feasible and whose cost fits the remaining
/// budget, in the fixed enumeration order.
pub fn legal_actions(
    pose: &Pose,
    remaining: u32,
    cost: &CostModel,
    width: usize,
    height: usize,
    obstacles: Option<&Grid<bool>>,
) -> Vec<SensingAction> {
    SensingAction::all()
        .into_iter()
        .filter(|&a| {
            action_cost(a, cost) <= remaining
                && move_is_legal(pose, a.move_kind, width, height, obstacles)
        })
        .collect()
}
