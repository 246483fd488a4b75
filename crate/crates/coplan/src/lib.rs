//! Decentralized discrete-choice plan coordination with hard constraint
//! envelopes.
//!
//! A population of agents, each holding a small set of alternative plans
//! (fixed-length real vectors with a subjective discomfort score), selects
//! one plan apiece so that the element-wise sum of the selections minimizes
//! a weighted mix of inefficiency, unfairness and discomfort costs. Agents
//! coordinate over a balanced tree overlay in iterations of bottom-up choice
//! and top-down acceptance; no agent ever sees more than aggregates.
//!
//! On top of the soft objective, hard constraints can be imposed as
//! inclusive upper/lower envelopes on the elements of the global plan and on
//! the aggregate costs. Plans whose candidate aggregates violate the
//! envelopes are filtered during selection; in the very first iteration,
//! when no aggregate information exists, agents instead pick the plan with
//! the highest expected satisfaction (the total slack left against all
//! bounds). Once a state satisfies the envelopes, rollback keeps every later
//! state satisfying them.
//!
//! The crate is organized as a library plus a thin `coplan` binary. Each
//! major capability has a runnable example:
//!
//! ```text
//! cargo run -p coplan --example worked_three_agents   # envelope walkthrough
//! cargo run -p coplan --example energy_run            # full experiment + CSVs
//! cargo run -p coplan --example envelope_levels       # nested-level rate sweep
//! cargo run -p coplan --example beta_sweep            # altruism-shift analysis
//! cargo run -p coplan --example oracle_check          # exhaustive validation
//! cargo run -p coplan --example generate_datasets     # scenario generators
//! ```
//!
//! A minimal library session:
//!
//! ```
//! use coplan::{
//!     generate_scenario, run_experiment, CostFunctionSpec, ExperimentSpec, RunConfig,
//!     ScenarioSpec,
//! };
//!
//! let scenario = generate_scenario(&ScenarioSpec::energy_like(7).with_agents(20)).unwrap();
//! let mut config = RunConfig::new(CostFunctionSpec::Variance);
//! config.iterations = 10;
//! let mut spec = ExperimentSpec::new(config);
//! spec.repetitions = 5;
//! let report = run_experiment(&scenario.plan_sets, &spec).unwrap();
//! assert_eq!(report.finals.len(), 5);
//! ```

pub mod constraints;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod io;
pub mod oracle;
pub mod plan;
pub mod scenario;
pub mod tree;

pub use constraints::{
    expected_satisfaction, satisfaction_rate, satisfies_cost_envelope, satisfies_plan_envelope,
    select_by_expected_satisfaction, ConstraintEnvelope, CostEnvelope, SatisfactionTally,
    ScalarBound,
};
pub use engine::{
    candidate_global, run_iteration, run_repetition, select_plan, RunConfig, RunState, Selection,
    SelectionContext,
};
pub use error::{Error, Result};
pub use experiment::{
    absolute_range_envelope, behavioral_shift, behavioral_shift_with_bound, derive_envelope_levels,
    envelope_level_sweep, run_experiment, BetaSweep, ExperimentReport, ExperimentSpec,
    LevelOutcome, ShiftPoint, ShiftReport, TrajectoryRow, DEFAULT_LEVEL_FRACTIONS,
};
pub use oracle::{
    brute_force_oracle, combination_feasible, OracleOutcome, DEFAULT_COMBINATION_CAP,
};
pub use plan::{
    evaluate_selection, inefficiency_cost, mean_discomfort, selection_costs, unfairness_cost,
    validate_plan_sets, weighted_objective, BehaviorWeights, CostFunctionSpec, CostTriple,
    GlobalPlan, Plan, PlanSet,
};
pub use scenario::{generate_scenario, PlanCount, Scenario, ScenarioKind, ScenarioSpec};
pub use tree::TreeOverlay;
