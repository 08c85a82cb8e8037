//! Sampled-greedy baseline: pick the action with the highest immediate
//! expected information gain per unit cost, estimating the expectation by
//! sampling observations from the belief and simulating the update.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sensing::{action_cost, apply_move, legal_actions, SensingAction};

use super::{PlanContext, PlannerConfig, Policy};

pub struct GreedyPlanner {
    config: PlannerConfig,
    rng: ChaCha8Rng,
}

impl GreedyPlanner {
    pub fn new(config: PlannerConfig) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Self { config, rng }
    }
}

impl Policy for GreedyPlanner {
    fn name(&self) -> &str {
        "greedy"
    }

    fn plan(&mut self, ctx: &PlanContext) -> Result<SensingAction> {
        let geom = ctx.belief.geometry();
        let legal = legal_actions(
            &ctx.pose,
            ctx.remaining,
            &ctx.cost,
            geom.l_width,
            geom.l_height,
            ctx.obstacles,
        );
        if legal.is_empty() {
            return Err(Error::NoLegalActions);
        }
        let h0 = ctx.belief.joint_l_entropy();
        let mut best: Option<SensingAction> = None;
        let mut best_score = f64::NEG_INFINITY;
        // Strict comparison keeps the earliest action on ties, matching the
        // fixed enumeration order of `legal_actions`.
        for action in legal {
            let cost = action_cost(action, &ctx.cost) as f64;
            let pose = apply_move(
                &ctx.pose,
                action.move_kind,
                geom.l_width,
                geom.l_height,
                ctx.obstacles,
            )?;
            let mut total_gain = 0.0;
            if ctx.rules.fires(action.move_kind) {
                for _ in 0..self.config.greedy_samples {
                    let obs = ctx.belief.sample_observation(
                        &pose,
                        action.sensor,
                        ctx.net,
                        &ctx.density,
                        &mut self.rng,
                    )?;
                    let updated = ctx.belief.updated(&obs, ctx.net)?;
                    total_gain += h0 - updated.joint_l_entropy();
                }
            }
            let mean_gain = total_gain / self.config.greedy_samples as f64;
            let score = mean_gain / cost;
            if score > best_score {
                best_score = score;
                best = Some(action);
            }
        }
        best.ok_or(Error::NoLegalActions)
    }
}
