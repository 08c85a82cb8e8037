//! Fixed five-stage sweep baseline.
//!
//! The intended pattern per cycle — remote sense ahead, to the left, to the
//! right, local sense in place, then step forward — is expressed inside the
//! ten-action space as rotate+sense pairs:
//!
//! | stage | action               | sensed direction      | sim cost |
//! |-------|----------------------|-----------------------|----------|
//! | 0     | turn left 90, remote | left of base heading  | 1        |
//! | 1     | turn right 90, remote| base heading          | 1        |
//! | 2     | turn right 90, remote| right of base heading | 1        |
//! | 3     | turn left 90, local  | own cell (faces base) | 8        |
//! | 4     | forward, remote      | ahead from new cell   | 1        |
//!
//! A full cycle costs 12 units at sim costs and leaves the heading where it
//! started. Stages whose action is illegal (blocked forward move, cost over
//! the remaining budget) are skipped by advancing the counter.

use crate::error::{Error, Result};
use crate::sensing::{
    action_cost, legal_actions, move_is_legal, MoveKind, SensingAction, SensorKind,
};

use super::{PlanContext, Policy};

const STAGES: [(MoveKind, SensorKind); 5] = [
    (MoveKind::TurnLeft90, SensorKind::Remote),
    (MoveKind::TurnRight90, SensorKind::Remote),
    (MoveKind::TurnRight90, SensorKind::Remote),
    (MoveKind::TurnLeft90, SensorKind::Local),
    (MoveKind::Forward, SensorKind::Remote),
];

pub struct FixedPlanner {
    stage: usize,
}

impl FixedPlanner {
    pub fn new() -> Self {
        Self { stage: 0 }
    }

    pub fn stage(&self) -> usize {
        self.stage
    }
}

impl Default for FixedPlanner {
    fn default() -> Self {
        Self::new()
    }
}

impl Policy for FixedPlanner {
    fn name(&self) -> &str {
        "fixed"
    }

    fn plan(&mut self, ctx: &PlanContext) -> Result<SensingAction> {
        let geom = ctx.belief.geometry();
        for _ in 0..STAGES.len() {
            let (move_kind, sensor) = STAGES[self.stage];
            self.stage = (self.stage + 1) % STAGES.len();
            let action = SensingAction { move_kind, sensor };
            if action_cost(action, &ctx.cost) <= ctx.remaining
                && move_is_legal(
                    &ctx.pose,
                    move_kind,
                    geom.l_width,
                    geom.l_height,
                    ctx.obstacles,
                )
            {
                return Ok(action);
            }
        }
        // No stage fits; fall back to any legal action so the mission only
        // terminates when the budget really is exhausted.
        legal_actions(
            &ctx.pose,
            ctx.remaining,
            &ctx.cost,
            geom.l_width,
            geom.l_height,
            ctx.obstacles,
        )
        .first()
        .copied()
        .ok_or(Error::NoLegalActions)
    }
}
