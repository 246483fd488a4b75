//! Repetition orchestration, satisfaction-rate bookkeeping, envelope level
//! sweeps and the altruism-shift analysis.
//!
//! A repetition is one full run of the protocol under a fresh random tree
//! positioning. Repetition `j` builds its overlay from `base_seed + j`, so a
//! spec pins the entire experiment. Repetitions run in parallel; reports are
//! reduced in repetition order and are therefore deterministic.

use rayon::prelude::*;

use crate::constraints::{
    satisfaction_rate, ConstraintEnvelope, CostEnvelope, SatisfactionTally, ScalarBound,
};
use crate::engine::{run_repetition, RunConfig, RunState};
use crate::error::{Error, Result};
use crate::plan::{validate_plan_sets, BehaviorWeights, CostTriple, GlobalPlan, PlanSet};
use crate::tree::TreeOverlay;

/// Grid of behavior weights for sweep analyses. Point `i` of `steps + 1` is
/// `start + (end - start) * i / steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSweep {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl BetaSweep {
    /// 0 to 1 in steps of 0.025.
    pub fn default_grid() -> Self {
        BetaSweep {
            start: 0.0,
            end: 1.0,
            steps: 40,
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|i| self.start + (self.end - self.start) * i as f64 / self.steps as f64)
            .collect()
    }
}

/// Parameters of one experiment: a run template repeated under fresh random
/// tree positionings.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub repetitions: usize,
    pub config: RunConfig,
    /// Children per tree node.
    pub arity: usize,
    /// Explicit envelope levels for [`envelope_level_sweep`]; derived from a
    /// soft run when absent.
    pub levels: Option<Vec<ConstraintEnvelope>>,
    pub beta_sweep: Option<BetaSweep>,
    /// Repetition `j` positions agents with seed `base_seed + j`.
    pub base_seed: u64,
}

impl ExperimentSpec {
    pub fn new(config: RunConfig) -> Self {
        let base_seed = config.seed;
        ExperimentSpec {
            repetitions: 200,
            config,
            arity: 2,
            levels: None,
            beta_sweep: None,
            base_seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.arity == 0 {
            return Err(Error::Config("arity must be at least 1".into()));
        }
        if let Some(sweep) = &self.beta_sweep {
            if sweep.steps == 0 {
                return Err(Error::Config("beta sweep needs at least one step".into()));
            }
        }
        Ok(())
    }
}

/// One line of a trajectory: the cost profile of one iteration of one
/// repetition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub repetition: usize,
    pub iteration: usize,
    pub costs: CostTriple,
    pub satisfied: bool,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub repetitions: usize,
    /// One row per (repetition, iteration).
    pub rows: Vec<TrajectoryRow>,
    /// Final state of each repetition, ordered by repetition.
    pub finals: Vec<RunState>,
    /// Counts repetitions whose final state satisfied the envelopes.
    pub tally: SatisfactionTally,
    pub best_objective: f64,
    pub best_repetition: usize,
    /// Final global plan of the best repetition.
    pub best_global: GlobalPlan,
    /// Mean of the final cost triples.
    pub mean_final_costs: CostTriple,
}

impl ExperimentReport {
    pub fn satisfaction_rate(&self) -> Result<f64> {
        satisfaction_rate(&self.tally)
    }
}

/// Runs `spec.repetitions` repetitions, each under a fresh seeded overlay.
pub fn run_experiment(plan_sets: &[PlanSet], spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    validate_plan_sets(plan_sets)?;
    let n = plan_sets.len();

    let trajectories: Vec<Vec<RunState>> = (0..spec.repetitions)
        .into_par_iter()
        .map(|j| {
            let overlay = TreeOverlay::build(n, spec.arity, spec.base_seed + j as u64)?;
            let mut config = spec.config.clone();
            config.seed = spec.base_seed + j as u64;
            run_repetition(plan_sets, &overlay, &config)
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(spec.repetitions * spec.config.iterations);
    let mut finals = Vec::with_capacity(spec.repetitions);
    let mut tally = SatisfactionTally::new();
    let mut best_objective = f64::INFINITY;
    let mut best_repetition = 0;
    let mut cost_sum = (0.0, 0.0, 0.0);

    for (j, trajectory) in trajectories.into_iter().enumerate() {
        for state in &trajectory {
            rows.push(TrajectoryRow {
                repetition: j,
                iteration: state.iteration,
                costs: state.costs,
                satisfied: state.satisfied,
                objective: state.objective,
            });
        }
        let last = trajectory.into_iter().last().expect("iterations >= 1");
        tally.record(last.satisfied);
        if last.objective < best_objective {
            best_objective = last.objective;
            best_repetition = j;
        }
        cost_sum.0 += last.costs.inefficiency;
        cost_sum.1 += last.costs.mean_discomfort;
        cost_sum.2 += last.costs.unfairness;
        finals.push(last);
    }

    let r = spec.repetitions as f64;
    let best_global = finals[best_repetition].global.clone();
    Ok(ExperimentReport {
        repetitions: spec.repetitions,
        rows,
        finals,
        tally,
        best_objective,
        best_repetition,
        best_global,
        mean_final_costs: CostTriple {
            inefficiency: cost_sum.0 / r,
            mean_discomfort: cost_sum.1 / r,
            unfairness: cost_sum.2 / r,
        },
    })
}

/// Outcome of one envelope level in a level sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelOutcome {
    pub level: usize,
    pub envelope: ConstraintEnvelope,
    pub rate: f64,
    pub mean_costs: CostTriple,
}

/// Envelope containing every global plan any selection could produce:
/// per element, the sum of plan minima and maxima, padded outward by
/// `pad_fraction` of the width.
pub fn absolute_range_envelope(
    plan_sets: &[PlanSet],
    pad_fraction: f64,
) -> Result<ConstraintEnvelope> {
    let m = validate_plan_sets(plan_sets)?;
    let mut lo = vec![0.0; m];
    let mut hi = vec![0.0; m];
    for ps in plan_sets {
        for u in 0..m {
            let mut pmin = f64::INFINITY;
            let mut pmax = f64::NEG_INFINITY;
            for plan in ps.plans() {
                pmin = pmin.min(plan.values()[u]);
                pmax = pmax.max(plan.values()[u]);
            }
            lo[u] += pmin;
            hi[u] += pmax;
        }
    }
    let upper = (0..m)
        .map(|u| Some(hi[u] + (hi[u] - lo[u]).abs() * pad_fraction + f64::MIN_POSITIVE))
        .collect();
    let lower = (0..m)
        .map(|u| Some(lo[u] - (hi[u] - lo[u]).abs() * pad_fraction - f64::MIN_POSITIVE))
        .collect();
    ConstraintEnvelope::new(upper, lower)
}

fn median(sorted: &mut [f64]) -> f64 {
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Derives nested envelope levels from observed soft-run final global plans.
///
/// The band center is the element-wise median of the finals; the half-width
/// is the largest observed deviation from it, scaled per level by a tightness
/// fraction. A fraction of `inf` produces an unconstrained envelope.
pub fn derive_envelope_levels(
    soft_finals: &[GlobalPlan],
    fractions: &[f64],
) -> Result<Vec<ConstraintEnvelope>> {
    if soft_finals.is_empty() {
        return Err(Error::Config(
            "no soft-run finals to derive levels from".into(),
        ));
    }
    let m = soft_finals[0].dimension();
    if soft_finals.iter().any(|g| g.dimension() != m) {
        return Err(Error::Config(
            "soft-run finals disagree on dimension".into(),
        ));
    }

    let mut center = vec![0.0; m];
    let mut half = vec![0.0; m];
    let mut column = vec![0.0; soft_finals.len()];
    for u in 0..m {
        for (j, g) in soft_finals.iter().enumerate() {
            column[j] = g.values[u];
        }
        center[u] = median(&mut column);
        half[u] = column
            .iter()
            .map(|v| (v - center[u]).abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
    }

    fractions
        .iter()
        .map(|&f| {
            if f.is_infinite() {
                return Ok(ConstraintEnvelope::unconstrained(m));
            }
            let upper = (0..m).map(|u| Some(center[u] + f * half[u])).collect();
            let lower = (0..m).map(|u| Some(center[u] - f * half[u])).collect();
            ConstraintEnvelope::new(upper, lower)
        })
        .collect()
}

/// Default tightness fractions for auto-derived levels, widest first.
pub const DEFAULT_LEVEL_FRACTIONS: [f64; 3] = [2.0, 1.0, 0.5];

/// Runs the experiment once per envelope level with paired seeds and reports
/// the satisfaction rate and mean final costs per level.
///
/// Levels come from `spec.levels` when set; otherwise a soft experiment is
/// run first and levels are derived from its final global plans at
/// [`DEFAULT_LEVEL_FRACTIONS`].
pub fn envelope_level_sweep(
    plan_sets: &[PlanSet],
    spec: &ExperimentSpec,
) -> Result<Vec<LevelOutcome>> {
    let levels = match &spec.levels {
        Some(levels) => levels.clone(),
        None => {
            let mut soft = spec.clone();
            soft.config.plan_env = None;
            let report = run_experiment(plan_sets, &soft)?;
            let finals: Vec<GlobalPlan> = report.finals.iter().map(|s| s.global.clone()).collect();
            derive_envelope_levels(&finals, &DEFAULT_LEVEL_FRACTIONS)?
        }
    };

    let mut outcomes = Vec::with_capacity(levels.len());
    for (level, envelope) in levels.into_iter().enumerate() {
        let mut constrained = spec.clone();
        constrained.config.plan_env = Some(envelope.clone());
        let report = run_experiment(plan_sets, &constrained)?;
        outcomes.push(LevelOutcome {
            level,
            envelope,
            rate: report.satisfaction_rate()?,
            mean_costs: report.mean_final_costs,
        });
    }
    Ok(outcomes)
}

/// One grid point of the altruism-shift analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftPoint {
    pub beta: f64,
    pub soft_inefficiency: f64,
    pub soft_discomfort: f64,
    /// Mean final inefficiency under the discomfort bound.
    pub hard_inefficiency: f64,
    /// Satisfaction rate of the bounded run.
    pub hard_rate: f64,
    /// Grid weight whose soft inefficiency is closest to the bounded one.
    pub matched_beta: f64,
    /// `beta - matched_beta`: the extra altruism the bounded run demands.
    pub delta_beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftReport {
    pub points: Vec<ShiftPoint>,
    /// Mean of `delta_beta` over the grid.
    pub mean_delta_beta: f64,
}

/// Altruism-shift analysis over the configured weight grid.
///
/// For each grid weight: run soft, bound the mean discomfort from above by
/// the soft run's discomfort, rerun, and look up the grid weight whose soft
/// inefficiency is closest to the bounded inefficiency. The difference of the
/// two weights is the shift the bound demands.
pub fn behavioral_shift(plan_sets: &[PlanSet], spec: &ExperimentSpec) -> Result<ShiftReport> {
    behavioral_shift_with_bound(plan_sets, spec, |soft_discomfort| soft_discomfort)
}

/// [`behavioral_shift`] with a custom mapping from the soft run's discomfort
/// to the bound applied in the constrained run. An infinite bound makes the
/// constrained run identical to the soft run.
pub fn behavioral_shift_with_bound(
    plan_sets: &[PlanSet],
    spec: &ExperimentSpec,
    bound: impl Fn(f64) -> f64,
) -> Result<ShiftReport> {
    spec.validate()?;
    let sweep = spec.beta_sweep.unwrap_or_else(BetaSweep::default_grid);
    let grid = sweep.grid();
    let alpha = spec.config.weights.alpha();

    let mut soft_costs: Vec<(f64, f64)> = Vec::with_capacity(grid.len());
    for &beta in &grid {
        let mut soft = spec.clone();
        soft.config.weights = BehaviorWeights::new(alpha, beta)?;
        soft.config.per_agent_weights = None;
        soft.config.plan_env = None;
        soft.config.cost_env = None;
        let report = run_experiment(plan_sets, &soft)?;
        soft_costs.push((
            report.mean_final_costs.inefficiency,
            report.mean_final_costs.mean_discomfort,
        ));
    }

    let mut points = Vec::with_capacity(grid.len());
    for (i, &beta) in grid.iter().enumerate() {
        let (soft_inefficiency, soft_discomfort) = soft_costs[i];

        let mut hard = spec.clone();
        hard.config.weights = BehaviorWeights::new(alpha, beta)?;
        hard.config.per_agent_weights = None;
        hard.config.plan_env = None;
        hard.config.cost_env = Some(CostEnvelope {
            mean_discomfort: ScalarBound::new(None, Some(bound(soft_discomfort)))?,
            ..CostEnvelope::unconstrained()
        });
        let report = run_experiment(plan_sets, &hard)?;
        let hard_inefficiency = report.mean_final_costs.inefficiency;
        let hard_rate = report.satisfaction_rate()?;

        // Nearest soft inefficiency on the grid. The point's own weight wins
        // when it attains the minimum distance; other ties go to the smaller
        // weight.
        let mut matched = 0usize;
        let mut best = f64::INFINITY;
        for (j, &(i_soft, _)) in soft_costs.iter().enumerate() {
            let d = (i_soft - hard_inefficiency).abs();
            if d < best {
                best = d;
                matched = j;
            }
        }
        if (soft_inefficiency - hard_inefficiency).abs() == best {
            matched = i;
        }

        points.push(ShiftPoint {
            beta,
            soft_inefficiency,
            soft_discomfort,
            hard_inefficiency,
            hard_rate,
            matched_beta: grid[matched],
            delta_beta: beta - grid[matched],
        });
    }

    let mean_delta_beta = points.iter().map(|p| p.delta_beta).sum::<f64>() / points.len() as f64;
    Ok(ShiftReport {
        points,
        mean_delta_beta,
    })
}
