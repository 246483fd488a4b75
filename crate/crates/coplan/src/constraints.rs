//! Hard constraint envelopes, violation checks and the expected-satisfaction
//! heuristic used during cold start.
//!
//! A plan envelope carries optional inclusive per-element bounds on the
//! global plan. A cost envelope carries optional scalar bounds on the three
//! aggregate costs. Bounds set to `+inf` (upper) or `-inf` (lower) are
//! normalized to absent, so a slack bound is indistinguishable from no bound.
//!
//! Before any aggregate information exists, an agent scores each of its own
//! plans by the total slack it would leave against the present bounds:
//!
//! ```text
//! E(p) = sum_u (upper_u - p_u) + sum_u (p_u - lower_u)
//! ```
//!
//! summing only over elements with the respective bound present. Cost bounds
//! contribute analogous terms using the plan's own cost contribution: the
//! plan's discomfort score for the discomfort bound, the plan's own
//! inefficiency for the inefficiency bound, and zero for unfairness (an agent
//! has no local estimate of the population spread).

use crate::error::{Error, Result};
use crate::plan::{
    inefficiency_of_values, CostFunctionSpec, CostTriple, GlobalPlan, Plan, PlanSet,
};

fn normalize_upper(bound: Option<f64>) -> Result<Option<f64>> {
    match bound {
        Some(v) if v.is_nan() => Err(Error::Config("bound must not be NaN".into())),
        Some(v) if v == f64::INFINITY => Ok(None),
        other => Ok(other),
    }
}

fn normalize_lower(bound: Option<f64>) -> Result<Option<f64>> {
    match bound {
        Some(v) if v.is_nan() => Err(Error::Config("bound must not be NaN".into())),
        Some(v) if v == f64::NEG_INFINITY => Ok(None),
        other => Ok(other),
    }
}

/// Inclusive per-element bounds on the global plan. `None` means the element
/// is unconstrained on that side.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintEnvelope {
    upper: Vec<Option<f64>>,
    lower: Vec<Option<f64>>,
}

impl ConstraintEnvelope {
    pub fn new(upper: Vec<Option<f64>>, lower: Vec<Option<f64>>) -> Result<Self> {
        if upper.len() != lower.len() {
            return Err(Error::Config(format!(
                "upper bounds have dimension {}, lower {}",
                upper.len(),
                lower.len()
            )));
        }
        let upper = upper
            .into_iter()
            .map(normalize_upper)
            .collect::<Result<Vec<_>>>()?;
        let lower = lower
            .into_iter()
            .map(normalize_lower)
            .collect::<Result<Vec<_>>>()?;
        for (u, (up, lo)) in upper.iter().zip(&lower).enumerate() {
            if let (Some(up), Some(lo)) = (up, lo) {
                if lo > up {
                    return Err(Error::Config(format!(
                        "element {u}: lower bound {lo} exceeds upper bound {up}"
                    )));
                }
            }
        }
        Ok(ConstraintEnvelope { upper, lower })
    }

    /// Envelope with every element unconstrained.
    pub fn unconstrained(dimension: usize) -> Self {
        ConstraintEnvelope {
            upper: vec![None; dimension],
            lower: vec![None; dimension],
        }
    }

    /// Upper bounds only; `lower` left unconstrained.
    pub fn with_upper(upper: Vec<Option<f64>>) -> Result<Self> {
        let m = upper.len();
        ConstraintEnvelope::new(upper, vec![None; m])
    }

    pub fn dimension(&self) -> usize {
        self.upper.len()
    }

    pub fn upper(&self, element: usize) -> Option<f64> {
        self.upper[element]
    }

    pub fn lower(&self, element: usize) -> Option<f64> {
        self.lower[element]
    }

    /// True when no element carries any bound.
    pub fn is_vacuous(&self) -> bool {
        self.upper.iter().all(Option::is_none) && self.lower.iter().all(Option::is_none)
    }
}

/// Optional inclusive bounds on one scalar cost.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScalarBound {
    lower: Option<f64>,
    upper: Option<f64>,
}

impl ScalarBound {
    pub fn new(lower: Option<f64>, upper: Option<f64>) -> Result<Self> {
        let upper = normalize_upper(upper)?;
        let lower = normalize_lower(lower)?;
        if let (Some(lo), Some(up)) = (lower, upper) {
            if lo > up {
                return Err(Error::Config(format!(
                    "lower bound {lo} exceeds upper bound {up}"
                )));
            }
        }
        Ok(ScalarBound { lower, upper })
    }

    pub fn upper_only(upper: f64) -> Result<Self> {
        ScalarBound::new(None, Some(upper))
    }

    pub fn none() -> Self {
        ScalarBound::default()
    }

    pub fn lower(&self) -> Option<f64> {
        self.lower
    }

    pub fn upper(&self) -> Option<f64> {
        self.upper
    }

    pub fn is_vacuous(&self) -> bool {
        self.lower.is_none() && self.upper.is_none()
    }

    fn holds(&self, value: f64) -> bool {
        self.upper.is_none_or(|u| value <= u) && self.lower.is_none_or(|l| value >= l)
    }

    /// Slack terms contributed to the expected satisfaction by `value`.
    fn expectation(&self, value: f64) -> f64 {
        let mut e = 0.0;
        if let Some(u) = self.upper {
            e += u - value;
        }
        if let Some(l) = self.lower {
            e += value - l;
        }
        e
    }
}

/// Scalar bounds on the aggregate cost triple, each side optional.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostEnvelope {
    pub inefficiency: ScalarBound,
    pub mean_discomfort: ScalarBound,
    pub unfairness: ScalarBound,
}

impl CostEnvelope {
    pub fn unconstrained() -> Self {
        CostEnvelope::default()
    }

    pub fn is_vacuous(&self) -> bool {
        self.inefficiency.is_vacuous()
            && self.mean_discomfort.is_vacuous()
            && self.unfairness.is_vacuous()
    }
}

/// Counts satisfactions over trials; the quotient is the satisfaction rate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SatisfactionTally {
    satisfied: usize,
    trials: usize,
}

impl SatisfactionTally {
    pub fn new() -> Self {
        SatisfactionTally::default()
    }

    pub fn record(&mut self, satisfied: bool) {
        self.trials += 1;
        if satisfied {
            self.satisfied += 1;
        }
    }

    pub fn satisfied(&self) -> usize {
        self.satisfied
    }

    pub fn trials(&self) -> usize {
        self.trials
    }
}

/// Satisfaction rate `satisfied / trials`. Zero trials is an error.
pub fn satisfaction_rate(tally: &SatisfactionTally) -> Result<f64> {
    if tally.trials == 0 {
        return Err(Error::UndefinedRate);
    }
    Ok(tally.satisfied as f64 / tally.trials as f64)
}

/// True iff every present bound holds inclusively for the global plan.
pub fn satisfies_plan_envelope(global: &GlobalPlan, env: &ConstraintEnvelope) -> Result<bool> {
    if global.dimension() != env.dimension() {
        return Err(Error::Config(format!(
            "global plan has dimension {}, envelope {}",
            global.dimension(),
            env.dimension()
        )));
    }
    Ok(satisfies_plan_envelope_values(&global.values, env))
}

pub(crate) fn satisfies_plan_envelope_values(values: &[f64], env: &ConstraintEnvelope) -> bool {
    debug_assert_eq!(values.len(), env.dimension());
    values.iter().enumerate().all(|(u, &g)| {
        env.upper[u].is_none_or(|up| g <= up) && env.lower[u].is_none_or(|lo| g >= lo)
    })
}

/// True iff each present scalar bound holds inclusively for the cost triple.
pub fn satisfies_cost_envelope(costs: &CostTriple, env: &CostEnvelope) -> bool {
    env.inefficiency.holds(costs.inefficiency)
        && env.mean_discomfort.holds(costs.mean_discomfort)
        && env.unfairness.holds(costs.unfairness)
}

/// Expected satisfaction of a single plan against a plan envelope: the summed
/// slack against all present bounds. May be negative.
pub fn expected_satisfaction(plan: &Plan, env: &ConstraintEnvelope) -> Result<f64> {
    if plan.dimension() != env.dimension() {
        return Err(Error::Config(format!(
            "plan has dimension {}, envelope {}",
            plan.dimension(),
            env.dimension()
        )));
    }
    Ok(expected_satisfaction_values(plan.values(), env))
}

pub(crate) fn expected_satisfaction_values(values: &[f64], env: &ConstraintEnvelope) -> f64 {
    debug_assert_eq!(values.len(), env.dimension());
    let mut e = 0.0;
    for (u, &p) in values.iter().enumerate() {
        if let Some(up) = env.upper[u] {
            e += up - p;
        }
        if let Some(lo) = env.lower[u] {
            e += p - lo;
        }
    }
    e
}

/// Expected satisfaction including cost-envelope terms. The plan contributes
/// its own discomfort score to the discomfort bound, its own inefficiency to
/// the inefficiency bound, and zero to the unfairness bound.
pub(crate) fn expected_satisfaction_full(
    plan: &Plan,
    env: Option<&ConstraintEnvelope>,
    cost_env: Option<&CostEnvelope>,
    cost_spec: &CostFunctionSpec,
) -> Result<f64> {
    let mut e = 0.0;
    if let Some(env) = env {
        e += expected_satisfaction(plan, env)?;
    }
    if let Some(cenv) = cost_env {
        if !cenv.inefficiency.is_vacuous() {
            let own = inefficiency_of_values(plan.values(), cost_spec)?;
            e += cenv.inefficiency.expectation(own);
        }
        e += cenv.mean_discomfort.expectation(plan.discomfort());
        e += cenv.unfairness.expectation(0.0);
    }
    Ok(e)
}

/// Index of the plan maximizing expected satisfaction. Ties break toward the
/// lowest index.
pub fn select_by_expected_satisfaction(
    plan_set: &PlanSet,
    env: Option<&ConstraintEnvelope>,
    cost_env: Option<&CostEnvelope>,
    cost_spec: &CostFunctionSpec,
) -> Result<usize> {
    let mut best = 0;
    let mut best_e = f64::NEG_INFINITY;
    for (j, plan) in plan_set.plans().iter().enumerate() {
        let e = expected_satisfaction_full(plan, env, cost_env, cost_spec)?;
        if e > best_e {
            best = j;
            best_e = e;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(values: &[f64]) -> Plan {
        Plan::new(values.to_vec(), 0.0).unwrap()
    }

    fn upper_env(bounds: &[Option<f64>]) -> ConstraintEnvelope {
        ConstraintEnvelope::with_upper(bounds.to_vec()).unwrap()
    }

    #[test]
    fn plan_envelope_boundary_is_inclusive() {
        let env = upper_env(&[None, Some(9.0)]);
        let g = GlobalPlan::new(vec![14.0, 9.0]);
        assert!(satisfies_plan_envelope(&g, &env).unwrap());
    }

    #[test]
    fn plan_envelope_violation() {
        let env = upper_env(&[Some(9.0), Some(9.0)]);
        let g = GlobalPlan::new(vec![7.0, 13.0]);
        assert!(!satisfies_plan_envelope(&g, &env).unwrap());
    }

    #[test]
    fn vacuous_envelope_accepts_everything() {
        let env = ConstraintEnvelope::unconstrained(2);
        let g = GlobalPlan::new(vec![1e9, -1e9]);
        assert!(satisfies_plan_envelope(&g, &env).unwrap());
        assert!(env.is_vacuous());
    }

    #[test]
    fn dimension_mismatch_is_config_error() {
        let env = ConstraintEnvelope::unconstrained(3);
        let g = GlobalPlan::new(vec![1.0, 2.0]);
        assert!(matches!(
            satisfies_plan_envelope(&g, &env),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn infinite_bounds_normalize_to_absent() {
        let env = ConstraintEnvelope::new(
            vec![Some(f64::INFINITY), Some(2.0)],
            vec![Some(f64::NEG_INFINITY), None],
        )
        .unwrap();
        assert_eq!(env.upper(0), None);
        assert_eq!(env.lower(0), None);
        assert_eq!(env.upper(1), Some(2.0));

        let b = ScalarBound::new(Some(f64::NEG_INFINITY), Some(f64::INFINITY)).unwrap();
        assert!(b.is_vacuous());
    }

    #[test]
    fn crossed_bounds_rejected() {
        assert!(ConstraintEnvelope::new(vec![Some(1.0)], vec![Some(2.0)]).is_err());
        assert!(ScalarBound::new(Some(2.0), Some(1.0)).is_err());
    }

    #[test]
    fn expectation_upper_bound_slack() {
        // (9 - 2) + 0 = 7
        let env = upper_env(&[Some(9.0), None]);
        assert_eq!(
            expected_satisfaction(&plan(&[2.0, 7.0]), &env).unwrap(),
            7.0
        );
    }

    #[test]
    fn expectation_two_sided_upper() {
        // (10 - 1) + (13 - 3) = 19
        let env = upper_env(&[Some(10.0), Some(13.0)]);
        assert_eq!(
            expected_satisfaction(&plan(&[1.0, 3.0]), &env).unwrap(),
            19.0
        );
    }

    #[test]
    fn expectation_empty_envelope_is_zero() {
        let env = ConstraintEnvelope::unconstrained(2);
        assert_eq!(
            expected_satisfaction(&plan(&[4.0, 4.0]), &env).unwrap(),
            0.0
        );
    }

    #[test]
    fn expectation_may_be_negative() {
        let env = upper_env(&[Some(1.0), None]);
        assert_eq!(
            expected_satisfaction(&plan(&[5.0, 0.0]), &env).unwrap(),
            -4.0
        );
    }

    #[test]
    fn select_prefers_highest_expectation() {
        // plans [1,3] and [5,2] under upper [-, 9]: slacks 6 vs 7
        let ps = PlanSet::new(0, vec![plan(&[1.0, 3.0]), plan(&[5.0, 2.0])]).unwrap();
        let env = upper_env(&[None, Some(9.0)]);
        let idx =
            select_by_expected_satisfaction(&ps, Some(&env), None, &CostFunctionSpec::Variance)
                .unwrap();
        assert_eq!(idx, 1);
    }

    #[test]
    fn select_upper_first_element() {
        // plans [3,5] and [2,7] under upper [9, -]: slacks 6 vs 7
        let ps = PlanSet::new(0, vec![plan(&[3.0, 5.0]), plan(&[2.0, 7.0])]).unwrap();
        let env = upper_env(&[Some(9.0), None]);
        let idx =
            select_by_expected_satisfaction(&ps, Some(&env), None, &CostFunctionSpec::Variance)
                .unwrap();
        assert_eq!(idx, 1);
    }

    #[test]
    fn single_plan_agent_selects_index_zero() {
        let ps = PlanSet::new(0, vec![plan(&[1.0, 1.0])]).unwrap();
        let env = upper_env(&[Some(0.0), Some(0.0)]);
        assert_eq!(
            select_by_expected_satisfaction(&ps, Some(&env), None, &CostFunctionSpec::Variance)
                .unwrap(),
            0
        );
    }

    #[test]
    fn cost_bound_discriminates_by_discomfort() {
        let ps = PlanSet::new(
            0,
            vec![
                Plan::new(vec![1.0], 0.9).unwrap(),
                Plan::new(vec![1.0], 0.1).unwrap(),
            ],
        )
        .unwrap();
        let cenv = CostEnvelope {
            mean_discomfort: ScalarBound::upper_only(0.5).unwrap(),
            ..CostEnvelope::unconstrained()
        };
        let idx =
            select_by_expected_satisfaction(&ps, None, Some(&cenv), &CostFunctionSpec::Variance)
                .unwrap();
        assert_eq!(idx, 1);
    }

    #[test]
    fn cost_envelope_checks() {
        let costs = CostTriple {
            inefficiency: 0.10,
            mean_discomfort: 0.5,
            unfairness: 2.0,
        };
        let env = CostEnvelope {
            inefficiency: ScalarBound::upper_only(0.11).unwrap(),
            ..CostEnvelope::unconstrained()
        };
        assert!(satisfies_cost_envelope(&costs, &env));

        let env = CostEnvelope {
            mean_discomfort: ScalarBound::upper_only(0.5).unwrap(),
            ..CostEnvelope::unconstrained()
        };
        assert!(satisfies_cost_envelope(&costs, &env));

        let env = CostEnvelope {
            unfairness: ScalarBound::upper_only(1.0).unwrap(),
            ..CostEnvelope::unconstrained()
        };
        assert!(!satisfies_cost_envelope(&costs, &env));
    }

    #[test]
    fn rate_examples() {
        let mut tally = SatisfactionTally::new();
        for i in 0..200 {
            tally.record(i < 131);
        }
        assert_eq!(satisfaction_rate(&tally).unwrap(), 0.655);

        let mut zero = SatisfactionTally::new();
        for _ in 0..200 {
            zero.record(false);
        }
        assert_eq!(satisfaction_rate(&zero).unwrap(), 0.0);

        let mut full = SatisfactionTally::new();
        for _ in 0..200 {
            full.record(true);
        }
        assert_eq!(satisfaction_rate(&full).unwrap(), 1.0);

        assert!(matches!(
            satisfaction_rate(&SatisfactionTally::new()),
            Err(Error::UndefinedRate)
        ));
    }
}
