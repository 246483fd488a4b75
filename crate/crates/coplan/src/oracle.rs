//! Exhaustive enumeration of small instances.
//!
//! Walks every combination of plan selections, evaluating each one with the
//! same canonical routine the engine uses for committed states, so optima are
//! directly comparable with engine objectives. Refuses instances whose
//! combination count exceeds a cap.

use crate::constraints::{
    satisfies_cost_envelope, satisfies_plan_envelope, ConstraintEnvelope, CostEnvelope,
};
use crate::error::{Error, Result};
use crate::plan::{
    combine_costs, selection_costs, validate_plan_sets, BehaviorWeights, CostFunctionSpec, PlanSet,
};

/// Default cap on the number of enumerated combinations.
pub const DEFAULT_COMBINATION_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    /// Minimum weighted objective over all combinations.
    pub objective: f64,
    /// A selection attaining the minimum (first found in enumeration order).
    pub selections: Vec<usize>,
    /// Number of combinations satisfying both envelopes.
    pub feasible_count: u128,
    /// Total number of combinations enumerated.
    pub combinations: u128,
}

/// Number of selection combinations, or an error when it exceeds `cap`.
pub fn combination_count(plan_sets: &[PlanSet], cap: u128) -> Result<u128> {
    let mut total: u128 = 1;
    for ps in plan_sets {
        total = total
            .checked_mul(ps.len() as u128)
            .filter(|&t| t <= cap)
            .ok_or(Error::CombinationCapExceeded {
                combinations: u128::MAX,
                cap,
            })?;
    }
    if total > cap {
        return Err(Error::CombinationCapExceeded {
            combinations: total,
            cap,
        });
    }
    Ok(total)
}

/// Whether one selection combination satisfies both envelopes, judged on the
/// canonical evaluation of that combination.
pub fn combination_feasible(
    plan_sets: &[PlanSet],
    selections: &[usize],
    plan_env: Option<&ConstraintEnvelope>,
    cost_env: Option<&CostEnvelope>,
    cost_spec: &CostFunctionSpec,
) -> Result<bool> {
    let (global, costs) = selection_costs(plan_sets, selections, cost_spec)?;
    let plan_ok = match plan_env {
        Some(env) => satisfies_plan_envelope(&global, env)?,
        None => true,
    };
    Ok(plan_ok && cost_env.is_none_or(|env| satisfies_cost_envelope(&costs, env)))
}

/// Enumerates every combination of plan selections and returns the global
/// optimum of the weighted objective together with the count of
/// envelope-feasible combinations. The optimum is taken over all
/// combinations, feasible or not.
pub fn brute_force_oracle(
    plan_sets: &[PlanSet],
    weights: &BehaviorWeights,
    cost_spec: &CostFunctionSpec,
    plan_env: Option<&ConstraintEnvelope>,
    cost_env: Option<&CostEnvelope>,
    cap: u128,
) -> Result<OracleOutcome> {
    validate_plan_sets(plan_sets)?;
    let combinations = combination_count(plan_sets, cap)?;
    if let Some(env) = plan_env {
        if env.dimension() != plan_sets[0].dimension() {
            return Err(Error::Config(format!(
                "plan envelope has dimension {}, plans have {}",
                env.dimension(),
                plan_sets[0].dimension()
            )));
        }
    }

    let n = plan_sets.len();
    let mut current = vec![0usize; n];
    let mut best_obj = f64::INFINITY;
    let mut best_sel = current.clone();
    let mut feasible_count: u128 = 0;

    loop {
        let (global, costs) = selection_costs(plan_sets, &current, cost_spec)?;
        let objective = combine_costs(&costs, weights);
        if objective < best_obj {
            best_obj = objective;
            best_sel.copy_from_slice(&current);
        }
        let feasible = plan_env
            .is_none_or(|env| satisfies_plan_envelope(&global, env).unwrap_or(false))
            && cost_env.is_none_or(|env| satisfies_cost_envelope(&costs, env));
        if feasible {
            feasible_count += 1;
        }

        // Odometer increment: agent 0 varies fastest.
        let mut digit = 0;
        loop {
            if digit == n {
                return Ok(OracleOutcome {
                    objective: best_obj,
                    selections: best_sel,
                    feasible_count,
                    combinations,
                });
            }
            current[digit] += 1;
            if current[digit] < plan_sets[digit].len() {
                break;
            }
            current[digit] = 0;
            digit += 1;
        }
    }
}
