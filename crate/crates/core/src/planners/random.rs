//! Uniform-random baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sensing::{legal_actions, SensingAction};

use super::{PlanContext, Policy};

pub struct RandomPlanner {
    rng: ChaCha8Rng,
}

impl RandomPlanner {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Policy for RandomPlanner {
    fn name(&self) -> &str {
        "random"
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
        Ok(legal[self.rng.random_range(0..legal.len())])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::{BeliefState, RockDensityPrior};
    use crate::knowledge::KnowledgeNet;
    use crate::sensing::{CostModel, Heading, Pose};
    use crate::world::WorldConfig;

    fn ctx_parts() -> (KnowledgeNet, BeliefState) {
        let net = KnowledgeNet::default();
        let belief =
            BeliefState::uniform(WorldConfig::desk_scale(0).geometry(), &net).unwrap();
        (net, belief)
    }

    #[test]
    fn random_policy_is_seed_deterministic() {
        let (net, belief) = ctx_parts();
        let ctx = super::super::PlanContext {
            belief: &belief,
            pose: Pose::new(5, 5, Heading::East),
            remaining: 50,
            net: &net,
            cost: CostModel::sim(),
            rules: Default::default(),
            density: RockDensityPrior::default(),
            obstacles: None,
        };
        let seq_a: Vec<_> = {
            let mut p = RandomPlanner::new(7);
            (0..20).map(|_| p.plan(&ctx).unwrap()).collect()
        };
        let seq_b: Vec<_> = {
            let mut p = RandomPlanner::new(7);
            (0..20).map(|_| p.plan(&ctx).unwrap()).collect()
        };
        assert_eq!(seq_a, seq_b);
    }

    #[test]
    fn choices_are_uniform_over_the_ten_actions() {
        // Chi-squared goodness of fit: df 9, threshold 27.88 (p = 0.001).
        let (net, belief) = ctx_parts();
        let ctx = super::super::PlanContext {
            belief: &belief,
            pose: Pose::new(5, 5, Heading::East),
            remaining: 50,
            net: &net,
            cost: CostModel::sim(),
            rules: Default::default(),
            density: RockDensityPrior::default(),
            obstacles: None,
        };
        let mut planner = RandomPlanner::new(13);
        let n = 10_000;
        let mut counts = [0usize; 10];
        for _ in 0..n {
            counts[planner.plan(&ctx).unwrap().index()] += 1;
        }
        let expected = n as f64 / 10.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 27.88, "chi-squared {chi2:.2}");
    }

    #[test]
    fn empty_legal_set_errors() {
        let (net, belief) = ctx_parts();
        let ctx = super::super::PlanContext {
            belief: &belief,
            pose: Pose::new(5, 5, Heading::East),
            remaining: 0,
            net: &net,
            cost: CostModel::sim(),
            rules: Default::default(),
            density: RockDensityPrior::default(),
            obstacles: None,
        };
        let mut planner = RandomPlanner::new(0);
        assert!(matches!(planner.plan(&ctx), Err(Error::NoLegalActions)));
    }
}
