//! UCT Monte Carlo tree search over (pose, sensor, remaining-budget) nodes.
//!
//! Each iteration selects a path by UCB, expands one random untried child,
//! finishes the budget with a random rollout, and back-propagates the
//! normalized information-gain reward. The whole root-to-terminal action
//! sequence is simulated against a belief snapshot — observations are
//! sampled from the belief and folded back in — so a node's value reflects
//! the evidence the path would plausibly collect.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::belief::BeliefState;
use crate::error::{Error, Result};
use crate::sensing::{action_cost, apply_move, legal_actions, Pose, SensingAction};

use super::{PlanContext, PlannerConfig, Policy, SearchStats};

/// Upper confidence bound of a child node (Eq.-style UCT):
/// `mean + cp * sqrt(2 log(parent_visits) / visits)`.
///
/// Unvisited children rank as positive infinity so they are tried first.
/// A child visited more often than its parent indicates a broken tree.
pub fn ucb(
    mean_reward: f64,
    visits: u64,
    parent_visits: u64,
    cp: f64,
    log2_exploration: bool,
) -> Result<f64> {
    if visits == 0 {
        return Ok(f64::INFINITY);
    }
    if parent_visits < visits {
        return Err(Error::TreeInconsistency(format!(
            "child visited {visits} times but parent only {parent_visits}"
        )));
    }
    let log_n = if log2_exploration {
        (parent_visits as f64).log2()
    } else {
        (parent_visits as f64).ln()
    };
    Ok(mean_reward + cp * (2.0 * log_n / visits as f64).sqrt())
}

struct Node {
    pose: Pose,
    remaining: u32,
    /// Action that led here from the parent (`None` at the root).
    action: Option<SensingAction>,
    parent: Option<usize>,
    children: Vec<usize>,
    untried: Vec<SensingAction>,
    visits: u64,
    mean_reward: f64,
}

/// Applies one action to a simulation state: move, pay, sense from the
/// belief, fold the observation back in, and accumulate the entropy drop.
fn simulate_step(
    action: SensingAction,
    snapshot: &mut BeliefState,
    pose: &mut Pose,
    remaining: &mut u32,
    h_prev: &mut f64,
    gain: &mut f64,
    ctx: &PlanContext,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let geom = snapshot.geometry();
    *pose = apply_move(pose, action.move_kind, geom.l_width, geom.l_height, ctx.obstacles)?;
    *remaining -= action_cost(action, &ctx.cost);
    if ctx.rules.fires(action.move_kind) {
        let obs = snapshot.sample_observation(pose, action.sensor, ctx.net, &ctx.density, rng)?;
        snapshot.apply(&obs, ctx.net)?;
        let h_new = snapshot.joint_l_entropy();
        *gain += *h_prev - h_new;
        *h_prev = h_new;
    }
    Ok(())
}

/// Random walk to budget exhaustion on a belief snapshot, returning the
/// normalized reward `(h_init - h_terminal) / h_init` clamped to `[0, 1]`.
///
/// `h_init` is the joint location entropy of the planner's real belief at
/// the start of the search; a mission with nothing left to learn yields 0.
pub fn rollout(
    snapshot: &mut BeliefState,
    mut pose: Pose,
    mut remaining: u32,
    h_init: f64,
    ctx: &PlanContext,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let geom = snapshot.geometry();
    let mut h_prev = snapshot.joint_l_entropy();
    let mut gain = h_init - h_prev;
    loop {
        let legal = legal_actions(
            &pose,
            remaining,
            &ctx.cost,
            geom.l_width,
            geom.l_height,
            ctx.obstacles,
        );
        if legal.is_empty() {
            break;
        }
        let action = legal[rng.random_range(0..legal.len())];
        simulate_step(
            action,
            snapshot,
            &mut pose,
            &mut remaining,
            &mut h_prev,
            &mut gain,
            ctx,
            rng,
        )?;
    }
    if h_init > 0.0 {
        Ok((gain / h_init).clamp(0.0, 1.0))
    } else {
        Ok(0.0)
    }
}

/// The UCT planner.
pub struct MctsPlanner {
    config: PlannerConfig,
    rng: ChaCha8Rng,
    stats: SearchStats,
}

impl MctsPlanner {
    pub fn new(config: PlannerConfig) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Self {
            config,
            rng,
            stats: SearchStats::default(),
        }
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }
}

impl Policy for MctsPlanner {
    fn name(&self) -> &str {
        "mcts"
    }

    fn search_stats(&self) -> Option<&SearchStats> {
        Some(&self.stats)
    }

    fn plan(&mut self, ctx: &PlanContext) -> Result<SensingAction> {
        let started = Instant::now();
        let geom = ctx.belief.geometry();
        let root_untried = legal_actions(
            &ctx.pose,
            ctx.remaining,
            &ctx.cost,
            geom.l_width,
            geom.l_height,
            ctx.obstacles,
        );
        if root_untried.is_empty() {
            return Err(Error::NoLegalActions);
        }
        let h_init = ctx.belief.joint_l_entropy();

        let mut nodes = vec![Node {
            pose: ctx.pose,
            remaining: ctx.remaining,
            action: None,
            parent: None,
            children: Vec::new(),
            untried: root_untried,
            visits: 0,
            mean_reward: 0.0,
        }];

        for _ in 0..self.config.iterations {
            let mut snapshot = ctx.belief.clone();
            let mut pose = ctx.pose;
            let mut remaining = ctx.remaining;
            let mut h_prev = h_init;
            let mut gain = 0.0;

            // Selection: descend through fully expanded nodes by UCB,
            // simulating each traversed action on the snapshot.
            let mut idx = 0;
            loop {
                if !nodes[idx].untried.is_empty() || nodes[idx].children.is_empty() {
                    break;
                }
                let parent_visits = nodes[idx].visits;
                let mut best = usize::MAX;
                let mut best_score = f64::NEG_INFINITY;
                for &child in &nodes[idx].children {
                    let score = ucb(
                        nodes[child].mean_reward,
                        nodes[child].visits,
                        parent_visits,
                        self.config.cp,
                        self.config.log2_exploration,
                    )?;
                    if score > best_score {
                        best_score = score;
                        best = child;
                    }
                }
                idx = best;
                let action = nodes[idx].action.expect("non-root node has an action");
                simulate_step(
                    action,
                    &mut snapshot,
                    &mut pose,
                    &mut remaining,
                    &mut h_prev,
                    &mut gain,
                    ctx,
                    &mut self.rng,
                )?;
                // The pose/budget path is deterministic given the actions,
                // so the re-simulated state must match the stored node.
                debug_assert_eq!(pose, nodes[idx].pose);
                debug_assert_eq!(remaining, nodes[idx].remaining);
            }

            // Expansion: add one random untried child.
            if !nodes[idx].untried.is_empty() {
                let pick = self.rng.random_range(0..nodes[idx].untried.len());
                let action = nodes[idx].untried.swap_remove(pick);
                simulate_step(
                    action,
                    &mut snapshot,
                    &mut pose,
                    &mut remaining,
                    &mut h_prev,
                    &mut gain,
                    ctx,
                    &mut self.rng,
                )?;
                let untried = legal_actions(
                    &pose,
                    remaining,
                    &ctx.cost,
                    geom.l_width,
                    geom.l_height,
                    ctx.obstacles,
                );
                let child = Node {
                    pose,
                    remaining,
                    action: Some(action),
                    parent: Some(idx),
                    children: Vec::new(),
                    untried,
                    visits: 0,
                    mean_reward: 0.0,
                };
                nodes.push(child);
                let child_idx = nodes.len() - 1;
                nodes[idx].children.push(child_idx);
                idx = child_idx;
            }

            // Rollout: random actions to budget exhaustion.
            loop {
                let legal = legal_actions(
                    &pose,
                    remaining,
                    &ctx.cost,
                    geom.l_width,
                    geom.l_height,
                    ctx.obstacles,
                );
                if legal.is_empty() {
                    break;
                }
                let action = legal[self.rng.random_range(0..legal.len())];
                simulate_step(
                    action,
                    &mut snapshot,
                    &mut pose,
                    &mut remaining,
                    &mut h_prev,
                    &mut gain,
                    ctx,
                    &mut self.rng,
                )?;
            }

            let reward = if h_init > 0.0 {
                (gain / h_init).clamp(0.0, 1.0)
            } else {
                0.0
            };
            self.stats.record_reward(reward);

            // Back-propagation.
            let mut cursor = Some(idx);
            while let Some(i) = cursor {
                let node = &mut nodes[i];
                node.visits += 1;
                node.mean_reward += (reward - node.mean_reward) / node.visits as f64;
                cursor = node.parent;
            }
        }

        self.stats.iterations += self.config.iterations as u64;
        self.stats.search_seconds += started.elapsed().as_secs_f64();

        // Best child of the root: highest mean reward, then most visits,
        // then earliest in the fixed action enumeration.
        let best = nodes[0]
            .children
            .iter()
            .copied()
            .max_by(|&a, &b| {
                let (na, nb) = (&nodes[a], &nodes[b]);
                na.mean_reward
                    .partial_cmp(&nb.mean_reward)
                    .expect("rewards are finite")
                    .then(na.visits.cmp(&nb.visits))
                    .then_with(|| {
                        let (ia, ib) = (
                            na.action.expect("child").index(),
                            nb.action.expect("child").index(),
                        );
                        ib.cmp(&ia)
                    })
            })
            .ok_or(Error::NoLegalActions)?;
        Ok(nodes[best].action.expect("child node has an action"))
    }
}
