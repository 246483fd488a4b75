//! Agents, plans and the three cost functions.
//!
//! An agent owns a set of possible plans, each a fixed-length vector of
//! resource values plus a subjective discomfort score. One plan per agent is
//! selected; the element-wise sum of the selected plans is the global plan.
//! Three costs are evaluated on a selection:
//!
//! * inefficiency: a collective cost of the global plan (population variance
//!   of its elements, or RMSE against a target vector),
//! * mean discomfort: the arithmetic mean of the selected discomfort scores,
//! * unfairness: the population variance of the selected discomfort scores.
//!
//! A weighted objective combines the three with weights
//! `(1 - alpha - beta, alpha, beta)`. Everything in this module is pure value
//! computation, safe to call from concurrent workers on shared data.

use crate::error::{Error, Result};

/// One possible plan of an agent: `m` resource values plus a discomfort score.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    values: Vec<f64>,
    discomfort: f64,
}

impl Plan {
    /// Builds a plan, rejecting non-finite values and negative or non-finite
    /// discomfort scores.
    pub fn new(values: Vec<f64>, discomfort: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("plan must have at least one element".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("plan values must be finite".into()));
        }
        if !discomfort.is_finite() || discomfort < 0.0 {
            return Err(Error::Config(format!(
                "discomfort score must be finite and non-negative, got {discomfort}"
            )));
        }
        Ok(Plan { values, discomfort })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn discomfort(&self) -> f64 {
        self.discomfort
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }
}

/// The possible plans of one agent. Non-empty, all plans share one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanSet {
    agent_id: usize,
    plans: Vec<Plan>,
}

impl PlanSet {
    pub fn new(agent_id: usize, plans: Vec<Plan>) -> Result<Self> {
        if plans.is_empty() {
            return Err(Error::Config(format!(
                "agent {agent_id} must have at least one plan"
            )));
        }
        let m = plans[0].dimension();
        if plans.iter().any(|p| p.dimension() != m) {
            return Err(Error::Config(format!(
                "agent {agent_id} has plans of differing dimension"
            )));
        }
        Ok(PlanSet { agent_id, plans })
    }

    pub fn agent_id(&self) -> usize {
        self.agent_id
    }

    pub fn plans(&self) -> &[Plan] {
        &self.plans
    }

    pub fn plan(&self, index: usize) -> &Plan {
        &self.plans[index]
    }

    pub fn len(&self) -> usize {
        self.plans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plans.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.plans[0].dimension()
    }
}

/// Checks a population of plan sets for consistency and returns the shared
/// plan dimension. Agent ids must equal their position.
pub fn validate_plan_sets(plan_sets: &[PlanSet]) -> Result<usize> {
    if plan_sets.is_empty() {
        return Err(Error::Config("no agents".into()));
    }
    let m = plan_sets[0].dimension();
    for (i, ps) in plan_sets.iter().enumerate() {
        if ps.agent_id() != i {
            return Err(Error::Config(format!(
                "agent id {} at position {i}; ids must be dense and ordered",
                ps.agent_id()
            )));
        }
        if ps.dimension() != m {
            return Err(Error::Config(format!(
                "agent {i} has plan dimension {} but agent 0 has {m}",
                ps.dimension()
            )));
        }
    }
    Ok(m)
}

/// The element-wise sum of the selected plans of all agents.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalPlan {
    pub values: Vec<f64>,
}

impl GlobalPlan {
    pub fn new(values: Vec<f64>) -> Self {
        GlobalPlan { values }
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }
}

/// The three system costs of one selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostTriple {
    pub inefficiency: f64,
    pub mean_discomfort: f64,
    pub unfairness: f64,
}

/// Behavior weights of an agent: `alpha` scales unfairness, `beta` scales
/// discomfort, the remainder `1 - alpha - beta` scales inefficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BehaviorWeights {
    alpha: f64,
    beta: f64,
}

impl BehaviorWeights {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let ok = (0.0..=1.0).contains(&alpha) && (0.0..=1.0).contains(&beta);
        if !ok || alpha + beta > 1.0 {
            return Err(Error::Config(format!(
                "weights must satisfy alpha, beta in [0,1] and alpha + beta <= 1, got alpha={alpha} beta={beta}"
            )));
        }
        Ok(BehaviorWeights { alpha, beta })
    }

    /// Fully collective weights: only inefficiency counts.
    pub fn altruistic() -> Self {
        BehaviorWeights {
            alpha: 0.0,
            beta: 0.0,
        }
    }

    /// Clamps into the valid region. Used where rounding of otherwise valid
    /// aggregates could tip `alpha + beta` just past 1.
    pub(crate) fn clamped(alpha: f64, beta: f64) -> Self {
        let alpha = alpha.clamp(0.0, 1.0);
        let beta = beta.clamp(0.0, 1.0 - alpha);
        BehaviorWeights { alpha, beta }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl Default for BehaviorWeights {
    fn default() -> Self {
        BehaviorWeights::altruistic()
    }
}

/// Which inefficiency cost is applied to the global plan.
#[derive(Debug, Clone, PartialEq)]
pub enum CostFunctionSpec {
    /// Population variance of the global plan's elements (balancing).
    Variance,
    /// Root mean squared error against a target vector (matching).
    Rmse { target: Vec<f64> },
}

impl CostFunctionSpec {
    pub fn rmse(target: Vec<f64>) -> Self {
        CostFunctionSpec::Rmse { target }
    }
}

/// Population variance (divide by count, not count - 1). Empty input is 0.
pub fn population_variance(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Inefficiency cost of a global plan under the configured cost function.
pub fn inefficiency_cost(global: &GlobalPlan, spec: &CostFunctionSpec) -> Result<f64> {
    inefficiency_of_values(&global.values, spec)
}

pub(crate) fn inefficiency_of_values(values: &[f64], spec: &CostFunctionSpec) -> Result<f64> {
    match spec {
        CostFunctionSpec::Variance => Ok(population_variance(values)),
        CostFunctionSpec::Rmse { target } => {
            if target.len() != values.len() {
                return Err(Error::Config(format!(
                    "RMSE target has dimension {} but plan has {}",
                    target.len(),
                    values.len()
                )));
            }
            let n = values.len() as f64;
            let sq = values
                .iter()
                .zip(target)
                .map(|(v, t)| (v - t) * (v - t))
                .sum::<f64>();
            Ok((sq / n).sqrt())
        }
    }
}

/// Resolves `(agent, plan)` pairs into one discomfort score per agent.
/// Rejects missing, duplicate and out-of-range entries.
fn selected_scores(selections: &[(usize, usize)], plan_sets: &[PlanSet]) -> Result<Vec<f64>> {
    let n = plan_sets.len();
    let mut scores = vec![f64::NAN; n];
    let mut seen = vec![false; n];
    for &(agent, plan) in selections {
        if agent >= n {
            return Err(Error::InvalidSelection(format!(
                "agent {agent} out of range (population size {n})"
            )));
        }
        if seen[agent] {
            return Err(Error::InvalidSelection(format!(
                "duplicate selection for agent {agent}"
            )));
        }
        if plan >= plan_sets[agent].len() {
            return Err(Error::InvalidSelection(format!(
                "agent {agent} has {} plans, selection {plan} out of range",
                plan_sets[agent].len()
            )));
        }
        seen[agent] = true;
        scores[agent] = plan_sets[agent].plan(plan).discomfort();
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidSelection(format!(
            "no selection for agent {missing}"
        )));
    }
    Ok(scores)
}

/// Mean discomfort of the selected plans.
pub fn mean_discomfort(selections: &[(usize, usize)], plan_sets: &[PlanSet]) -> Result<f64> {
    let scores = selected_scores(selections, plan_sets)?;
    Ok(mean_of(&scores))
}

/// Unfairness: population variance of the selected discomfort scores.
pub fn unfairness_cost(selections: &[(usize, usize)], plan_sets: &[PlanSet]) -> Result<f64> {
    let scores = selected_scores(selections, plan_sets)?;
    Ok(population_variance(&scores))
}

pub(crate) fn mean_of(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Combines a cost triple under behavior weights:
/// `(1 - alpha - beta) * I + alpha * U + beta * D`.
pub fn combine_costs(costs: &CostTriple, weights: &BehaviorWeights) -> f64 {
    (1.0 - weights.alpha() - weights.beta()) * costs.inefficiency
        + weights.alpha() * costs.unfairness
        + weights.beta() * costs.mean_discomfort
}

/// The weighted objective of a selection given its global plan.
///
/// The caller guarantees `global` is the sum of the selected plans; this
/// function does not re-derive it.
pub fn weighted_objective(
    global: &GlobalPlan,
    selections: &[(usize, usize)],
    plan_sets: &[PlanSet],
    weights: &BehaviorWeights,
    spec: &CostFunctionSpec,
) -> Result<f64> {
    let scores = selected_scores(selections, plan_sets)?;
    let costs = CostTriple {
        inefficiency: inefficiency_cost(global, spec)?,
        mean_discomfort: mean_of(&scores),
        unfairness: population_variance(&scores),
    };
    Ok(combine_costs(&costs, weights))
}

/// Canonical evaluation of a dense selection vector (one plan index per
/// agent, ordered by agent id): the global plan is summed in agent order,
/// then the cost triple is derived from it and the selected scores.
///
/// Every component that needs a state's costs routes through here so that
/// identical selections always produce bit-identical numbers.
pub fn selection_costs(
    plan_sets: &[PlanSet],
    selections: &[usize],
    spec: &CostFunctionSpec,
) -> Result<(GlobalPlan, CostTriple)> {
    let m = validate_plan_sets(plan_sets)?;
    if selections.len() != plan_sets.len() {
        return Err(Error::InvalidSelection(format!(
            "{} selections for {} agents",
            selections.len(),
            plan_sets.len()
        )));
    }
    let mut sum = vec![0.0; m];
    let mut scores = Vec::with_capacity(plan_sets.len());
    for (ps, &sel) in plan_sets.iter().zip(selections) {
        if sel >= ps.len() {
            return Err(Error::InvalidSelection(format!(
                "agent {} has {} plans, selection {sel} out of range",
                ps.agent_id(),
                ps.len()
            )));
        }
        let plan = ps.plan(sel);
        for (acc, v) in sum.iter_mut().zip(plan.values()) {
            *acc += v;
        }
        scores.push(plan.discomfort());
    }
    let global = GlobalPlan::new(sum);
    let costs = CostTriple {
        inefficiency: inefficiency_cost(&global, spec)?,
        mean_discomfort: mean_of(&scores),
        unfairness: population_variance(&scores),
    };
    Ok((global, costs))
}

/// [`selection_costs`] plus the weighted objective.
pub fn evaluate_selection(
    plan_sets: &[PlanSet],
    selections: &[usize],
    weights: &BehaviorWeights,
    spec: &CostFunctionSpec,
) -> Result<(GlobalPlan, CostTriple, f64)> {
    let (global, costs) = selection_costs(plan_sets, selections, spec)?;
    let objective = combine_costs(&costs, weights);
    Ok((global, costs, objective))
}
