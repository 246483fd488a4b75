//! Iterative coordinated plan selection over a tree overlay.
//!
//! Each iteration has two phases.
//!
//! **Bottom-up**: agents choose in leaf-to-root order. An agent evaluates each
//! of its plans against a candidate global plan assembled from three parts:
//! the fresh choices of its descendants, the plan itself, and (from the second
//! iteration on) the previous iteration's global plan minus the previous
//! contribution of its own subtree. Plans whose candidate violates an active
//! envelope are filtered out; the agent picks the feasible plan minimizing the
//! weighted objective. If nothing is feasible it falls back to the plan with
//! the highest expected satisfaction and is flagged. In the first iteration
//! under active envelopes every agent uses expected satisfaction directly,
//! since no aggregate information exists yet.
//!
//! **Top-down**: starting from the previous iteration's selections, branches
//! of fresh selections are accepted root-first only where they strictly
//! reduce the objective; a rejected node reverts its own choice and its child
//! branches are considered independently. Once a state satisfies the
//! envelopes, acceptance additionally requires candidates to keep satisfying
//! them, so satisfaction is never lost. Objectives therefore never increase
//! after the first iteration.
//!
//! Every returned [`RunState`] is evaluated canonically: the global plan is
//! recomputed as the element-wise sum of the selected plans in agent order,
//! and costs and objective are derived from that recomputation.

use std::collections::VecDeque;

use crate::constraints::{
    satisfies_cost_envelope, satisfies_plan_envelope_values, select_by_expected_satisfaction,
    ConstraintEnvelope, CostEnvelope,
};
use crate::error::{Error, Result};
use crate::plan::{
    combine_costs, inefficiency_of_values, selection_costs, validate_plan_sets, BehaviorWeights,
    CostFunctionSpec, CostTriple, GlobalPlan, PlanSet,
};
use crate::tree::TreeOverlay;

/// Parameters of one run of the protocol.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Number of learning iterations (at least 1).
    pub iterations: usize,
    /// Population-wide behavior weights.
    pub weights: BehaviorWeights,
    /// Optional per-agent weights overriding `weights` during selection.
    /// System-level decisions use the population mean.
    pub per_agent_weights: Option<Vec<BehaviorWeights>>,
    pub cost_spec: CostFunctionSpec,
    pub plan_env: Option<ConstraintEnvelope>,
    pub cost_env: Option<CostEnvelope>,
    /// Seed governing tree positioning when a harness builds the overlay.
    pub seed: u64,
}

impl RunConfig {
    pub fn new(cost_spec: CostFunctionSpec) -> Self {
        RunConfig {
            iterations: 40,
            weights: BehaviorWeights::altruistic(),
            per_agent_weights: None,
            cost_spec,
            plan_env: None,
            cost_env: None,
            seed: 0,
        }
    }

    /// Weights the given agent applies during its own selection.
    pub fn weights_for(&self, agent: usize) -> BehaviorWeights {
        match &self.per_agent_weights {
            Some(ws) => ws[agent],
            None => self.weights,
        }
    }

    /// Weights applied to system-level decisions and reported objectives:
    /// the population mean when per-agent weights are set.
    pub fn system_weights(&self) -> BehaviorWeights {
        match &self.per_agent_weights {
            Some(ws) if !ws.is_empty() => {
                let n = ws.len() as f64;
                let alpha = ws.iter().map(|w| w.alpha()).sum::<f64>() / n;
                let beta = ws.iter().map(|w| w.beta()).sum::<f64>() / n;
                BehaviorWeights::clamped(alpha, beta)
            }
            _ => self.weights,
        }
    }

    /// Envelopes count as active only when they carry at least one bound.
    pub fn envelopes_active(&self) -> bool {
        self.plan_env.as_ref().is_some_and(|e| !e.is_vacuous())
            || self.cost_env.as_ref().is_some_and(|e| !e.is_vacuous())
    }

    pub fn validate(&self, n_agents: usize, dimension: usize) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if let Some(env) = &self.plan_env {
            if env.dimension() != dimension {
                return Err(Error::Config(format!(
                    "plan envelope has dimension {}, plans have {dimension}",
                    env.dimension()
                )));
            }
        }
        if let CostFunctionSpec::Rmse { target } = &self.cost_spec {
            if target.len() != dimension {
                return Err(Error::Config(format!(
                    "RMSE target has dimension {}, plans have {dimension}",
                    target.len()
                )));
            }
        }
        if let Some(ws) = &self.per_agent_weights {
            if ws.len() != n_agents {
                return Err(Error::Config(format!(
                    "{} per-agent weights for {n_agents} agents",
                    ws.len()
                )));
            }
        }
        Ok(())
    }
}

/// State of the system after one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunState {
    /// 1-based iteration index.
    pub iteration: usize,
    /// Selected plan index per agent, ordered by agent id.
    pub selections: Vec<usize>,
    /// Element-wise sum of the selected plans.
    pub global: GlobalPlan,
    pub costs: CostTriple,
    /// Whether both envelopes hold for this state (vacuously true without
    /// active envelopes).
    pub satisfied: bool,
    /// Weighted objective under the system weights.
    pub objective: f64,
    /// Number of agents that fell back to expected satisfaction because
    /// their feasible set was empty.
    pub fallback_count: usize,
}

/// Candidate global plan seen by an agent weighing one of its plans:
/// descendant aggregate plus the plan, plus the previous iteration's global
/// minus the previous contribution of the agent's own subtree when available.
pub fn candidate_global(
    subtree_aggregate: &[f64],
    plan_values: &[f64],
    previous: Option<(&[f64], &[f64])>,
) -> Vec<f64> {
    debug_assert_eq!(subtree_aggregate.len(), plan_values.len());
    let mut out: Vec<f64> = subtree_aggregate
        .iter()
        .zip(plan_values)
        .map(|(s, p)| s + p)
        .collect();
    if let Some((prev_global, prev_own_subtree)) = previous {
        debug_assert_eq!(prev_global.len(), out.len());
        debug_assert_eq!(prev_own_subtree.len(), out.len());
        for (u, o) in out.iter_mut().enumerate() {
            *o += prev_global[u] - prev_own_subtree[u];
        }
    }
    out
}

/// Everything an agent knows when choosing a plan.
#[derive(Debug)]
pub struct SelectionContext<'a> {
    /// 1-based iteration index.
    pub iteration: usize,
    /// Known aggregate excluding this agent's own plan; a candidate global
    /// is `base_global + plan`.
    pub base_global: &'a [f64],
    /// Number of agents represented in the estimates, this agent included.
    pub known_agents: usize,
    /// Sum of known discomfort scores, this agent excluded.
    pub base_discomfort_sum: f64,
    /// Sum of squared known discomfort scores, this agent excluded.
    pub base_discomfort_sq_sum: f64,
    pub weights: BehaviorWeights,
    pub cost_spec: &'a CostFunctionSpec,
    pub plan_env: Option<&'a ConstraintEnvelope>,
    pub cost_env: Option<&'a CostEnvelope>,
}

/// Outcome of one agent's choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub plan_index: usize,
    /// True when the feasible set was empty and the agent fell back to
    /// expected satisfaction.
    pub fallback: bool,
}

fn screening_triple(
    values: &[f64],
    d_sum: f64,
    d_sq_sum: f64,
    count: f64,
    spec: &CostFunctionSpec,
) -> Result<CostTriple> {
    let mean = d_sum / count;
    Ok(CostTriple {
        inefficiency: inefficiency_of_values(values, spec)?,
        mean_discomfort: mean,
        unfairness: (d_sq_sum / count - mean * mean).max(0.0),
    })
}

/// One agent's plan choice under the given context.
///
/// In the first iteration with active envelopes the choice maximizes
/// expected satisfaction. Otherwise it minimizes the weighted objective over
/// plans whose candidate state satisfies the envelopes, falling back to
/// expected satisfaction when no plan is feasible. Ties break toward the
/// lowest plan index.
pub fn select_plan(plan_set: &PlanSet, ctx: &SelectionContext) -> Result<Selection> {
    let envelopes_active = ctx.plan_env.is_some_and(|e| !e.is_vacuous())
        || ctx.cost_env.is_some_and(|e| !e.is_vacuous());

    if ctx.iteration == 1 && envelopes_active {
        let plan_index =
            select_by_expected_satisfaction(plan_set, ctx.plan_env, ctx.cost_env, ctx.cost_spec)?;
        return Ok(Selection {
            plan_index,
            fallback: false,
        });
    }

    let count = ctx.known_agents as f64;
    let mut candidate = vec![0.0; ctx.base_global.len()];
    let mut best: Option<(usize, f64)> = None;
    for (j, plan) in plan_set.plans().iter().enumerate() {
        for (u, c) in candidate.iter_mut().enumerate() {
            *c = ctx.base_global[u] + plan.values()[u];
        }
        let d = plan.discomfort();
        let triple = screening_triple(
            &candidate,
            ctx.base_discomfort_sum + d,
            ctx.base_discomfort_sq_sum + d * d,
            count,
            ctx.cost_spec,
        )?;
        let feasible = ctx
            .plan_env
            .is_none_or(|e| satisfies_plan_envelope_values(&candidate, e))
            && ctx
                .cost_env
                .is_none_or(|e| satisfies_cost_envelope(&triple, e));
        if !feasible {
            continue;
        }
        let objective = combine_costs(&triple, &ctx.weights);
        if best.is_none_or(|(_, b)| objective < b) {
            best = Some((j, objective));
        }
    }

    match best {
        Some((plan_index, _)) => Ok(Selection {
            plan_index,
            fallback: false,
        }),
        None => {
            let plan_index = select_by_expected_satisfaction(
                plan_set,
                ctx.plan_env,
                ctx.cost_env,
                ctx.cost_spec,
            )?;
            Ok(Selection {
                plan_index,
                fallback: true,
            })
        }
    }
}

/// Reusable per-repetition buffers, indexed by heap node.
struct Workspace {
    m: usize,
    /// Subtree plan sums (node included) under the previous selections.
    sub_prev: Vec<Vec<f64>>,
    /// Subtree plan sums (node included) under the fresh selections.
    sub_new: Vec<Vec<f64>>,
    sub_prev_d1: Vec<f64>,
    sub_prev_d2: Vec<f64>,
    sub_new_d1: Vec<f64>,
    sub_new_d2: Vec<f64>,
    sizes: Vec<usize>,
    base: Vec<f64>,
    scratch: Vec<f64>,
    new_selections: Vec<usize>,
}

impl Workspace {
    fn new(n: usize, m: usize) -> Self {
        Workspace {
            m,
            sub_prev: vec![vec![0.0; m]; n],
            sub_new: vec![vec![0.0; m]; n],
            sub_prev_d1: vec![0.0; n],
            sub_prev_d2: vec![0.0; n],
            sub_new_d1: vec![0.0; n],
            sub_new_d2: vec![0.0; n],
            sizes: vec![0; n],
            base: vec![0.0; m],
            scratch: vec![0.0; m],
            new_selections: vec![0; n],
        }
    }
}

/// Sums child subtree vectors of `node` into that node's own slot.
/// Children always live at higher heap indices, so the slice splits cleanly.
fn sum_children_into(vectors: &mut [Vec<f64>], overlay: &TreeOverlay, node: usize) {
    let (head, tail) = vectors.split_at_mut(node + 1);
    let dst = &mut head[node];
    dst.fill(0.0);
    for child in overlay.children(node) {
        for (u, v) in tail[child - node - 1].iter().enumerate() {
            dst[u] += v;
        }
    }
}

fn validate_inputs(
    plan_sets: &[PlanSet],
    overlay: &TreeOverlay,
    config: &RunConfig,
) -> Result<usize> {
    let m = validate_plan_sets(plan_sets)?;
    if overlay.len() != plan_sets.len() {
        return Err(Error::Config(format!(
            "overlay holds {} agents, population has {}",
            overlay.len(),
            plan_sets.len()
        )));
    }
    config.validate(plan_sets.len(), m)?;
    Ok(m)
}

fn state_satisfied(
    global: &GlobalPlan,
    costs: &CostTriple,
    plan_env: Option<&ConstraintEnvelope>,
    cost_env: Option<&CostEnvelope>,
) -> bool {
    plan_env.is_none_or(|e| satisfies_plan_envelope_values(&global.values, e))
        && cost_env.is_none_or(|e| satisfies_cost_envelope(costs, e))
}

fn run_iteration_inner(
    plan_sets: &[PlanSet],
    overlay: &TreeOverlay,
    config: &RunConfig,
    prev: Option<&RunState>,
    ws: &mut Workspace,
) -> Result<RunState> {
    let n = overlay.len();
    let m = ws.m;
    let t = prev.map_or(1, |s| s.iteration + 1);
    let plan_env = config.plan_env.as_ref().filter(|e| !e.is_vacuous());
    let cost_env = config.cost_env.as_ref().filter(|e| !e.is_vacuous());
    let system_weights = config.system_weights();

    // Previous-selection subtree sums and discomfort totals.
    let mut prev_d1_total = 0.0;
    let mut prev_d2_total = 0.0;
    let mut prev_scores = vec![0.0; n];
    if let Some(prev) = prev {
        for (agent, ps) in plan_sets.iter().enumerate() {
            let d = ps.plan(prev.selections[agent]).discomfort();
            prev_scores[agent] = d;
            prev_d1_total += d;
            prev_d2_total += d * d;
        }
        for v in (0..n).rev() {
            sum_children_into(&mut ws.sub_prev, overlay, v);
            let agent = overlay.agent_at(v);
            let plan = plan_sets[agent].plan(prev.selections[agent]);
            for (u, p) in plan.values().iter().enumerate() {
                ws.sub_prev[v][u] += p;
            }
            let mut d1 = prev_scores[agent];
            let mut d2 = prev_scores[agent] * prev_scores[agent];
            for c in overlay.children(v) {
                d1 += ws.sub_prev_d1[c];
                d2 += ws.sub_prev_d2[c];
            }
            ws.sub_prev_d1[v] = d1;
            ws.sub_prev_d2[v] = d2;
        }
    }

    // Bottom-up phase: leaves choose first.
    let mut fallback_count = 0;
    for v in (0..n).rev() {
        let agent = overlay.agent_at(v);

        sum_children_into(&mut ws.sub_new, overlay, v);
        let mut size = 1;
        let mut desc_d1 = 0.0;
        let mut desc_d2 = 0.0;
        for c in overlay.children(v) {
            size += ws.sizes[c];
            desc_d1 += ws.sub_new_d1[c];
            desc_d2 += ws.sub_new_d2[c];
        }
        ws.sizes[v] = size;

        let (known, excl_d1, excl_d2) = match prev {
            Some(prev) => {
                for u in 0..m {
                    ws.base[u] = ws.sub_new[v][u] + prev.global.values[u] - ws.sub_prev[v][u];
                }
                let mut delta1 = 0.0;
                let mut delta2 = 0.0;
                for c in overlay.children(v) {
                    delta1 += ws.sub_new_d1[c] - ws.sub_prev_d1[c];
                    delta2 += ws.sub_new_d2[c] - ws.sub_prev_d2[c];
                }
                (
                    n,
                    prev_d1_total - prev_scores[agent] + delta1,
                    prev_d2_total - prev_scores[agent] * prev_scores[agent] + delta2,
                )
            }
            None => {
                ws.base.copy_from_slice(&ws.sub_new[v]);
                (size, desc_d1, desc_d2)
            }
        };

        let ctx = SelectionContext {
            iteration: t,
            base_global: &ws.base,
            known_agents: known,
            base_discomfort_sum: excl_d1,
            base_discomfort_sq_sum: excl_d2,
            weights: config.weights_for(agent),
            cost_spec: &config.cost_spec,
            plan_env,
            cost_env,
        };
        let selection = select_plan(&plan_sets[agent], &ctx)?;
        if selection.fallback {
            fallback_count += 1;
        }
        ws.new_selections[agent] = selection.plan_index;

        let chosen = plan_sets[agent].plan(selection.plan_index);
        for (u, p) in chosen.values().iter().enumerate() {
            ws.sub_new[v][u] += p;
        }
        ws.sub_new_d1[v] = desc_d1 + chosen.discomfort();
        ws.sub_new_d2[v] = desc_d2 + chosen.discomfort() * chosen.discomfort();
    }

    // Top-down phase: accept fresh branches only on strict improvement.
    let final_selections = match prev {
        None => ws.new_selections.clone(),
        Some(prev) => {
            let protect = prev.satisfied;
            let mut cur_sel = prev.selections.clone();
            let mut cur_g = prev.global.values.clone();
            let mut cur_d1 = prev_d1_total;
            let mut cur_d2 = prev_d2_total;
            let mut cur_obj = prev.objective;
            let count = n as f64;

            let mut queue = VecDeque::new();
            queue.push_back(0usize);
            while let Some(v) = queue.pop_front() {
                for (u, s) in ws.scratch.iter_mut().enumerate() {
                    *s = cur_g[u] + ws.sub_new[v][u] - ws.sub_prev[v][u];
                }
                let d1 = cur_d1 + ws.sub_new_d1[v] - ws.sub_prev_d1[v];
                let d2 = cur_d2 + ws.sub_new_d2[v] - ws.sub_prev_d2[v];
                let triple = screening_triple(&ws.scratch, d1, d2, count, &config.cost_spec)?;
                let objective = combine_costs(&triple, &system_weights);
                let keeps_satisfaction = !protect
                    || (plan_env.is_none_or(|e| satisfies_plan_envelope_values(&ws.scratch, e))
                        && cost_env.is_none_or(|e| satisfies_cost_envelope(&triple, e)));

                if objective < cur_obj && keeps_satisfaction {
                    let mut stack = vec![v];
                    while let Some(w) = stack.pop() {
                        let a = overlay.agent_at(w);
                        cur_sel[a] = ws.new_selections[a];
                        stack.extend(overlay.children(w));
                    }
                    cur_g.copy_from_slice(&ws.scratch);
                    cur_d1 = d1;
                    cur_d2 = d2;
                    cur_obj = objective;
                } else {
                    queue.extend(overlay.children(v));
                }
            }
            cur_sel
        }
    };

    // Canonical evaluation of the committed state.
    let (global, costs) = selection_costs(plan_sets, &final_selections, &config.cost_spec)?;
    let objective = combine_costs(&costs, &system_weights);
    let satisfied = state_satisfied(&global, &costs, plan_env, cost_env);

    if let Some(prev) = prev {
        // Screening uses incrementally maintained sums; the canonical
        // recomputation decides. Revert fully if it disagrees.
        if objective > prev.objective || (prev.satisfied && !satisfied) {
            return Ok(RunState {
                iteration: t,
                selections: prev.selections.clone(),
                global: prev.global.clone(),
                costs: prev.costs,
                satisfied: prev.satisfied,
                objective: prev.objective,
                fallback_count,
            });
        }
    }

    Ok(RunState {
        iteration: t,
        selections: final_selections,
        global,
        costs,
        satisfied,
        objective,
        fallback_count,
    })
}

/// Runs a single iteration. `prev` is `None` for the cold-start iteration.
pub fn run_iteration(
    plan_sets: &[PlanSet],
    overlay: &TreeOverlay,
    config: &RunConfig,
    prev: Option<&RunState>,
) -> Result<RunState> {
    let m = validate_inputs(plan_sets, overlay, config)?;
    let mut ws = Workspace::new(overlay.len(), m);
    run_iteration_inner(plan_sets, overlay, config, prev, &mut ws)
}

/// Runs `config.iterations` iterations and returns the full trajectory.
pub fn run_repetition(
    plan_sets: &[PlanSet],
    overlay: &TreeOverlay,
    config: &RunConfig,
) -> Result<Vec<RunState>> {
    let m = validate_inputs(plan_sets, overlay, config)?;
    let mut ws = Workspace::new(overlay.len(), m);
    let mut states: Vec<RunState> = Vec::with_capacity(config.iterations);
    for _ in 0..config.iterations {
        let next = run_iteration_inner(plan_sets, overlay, config, states.last(), &mut ws)?;
        states.push(next);
    }
    Ok(states)
}
