//! Altruism-shift analysis: sweep the discomfort weight, bound each run's
//! mean discomfort by its soft value, and measure how much extra altruism
//! the bound demands to restore the soft inefficiency.
//!
//! ```bash
//! cargo run --release -p coplan --example beta_sweep
//! ```

use coplan::{
    behavioral_shift, generate_scenario, BetaSweep, CostFunctionSpec, ExperimentSpec, RunConfig,
    ScenarioSpec,
};

fn main() {
    let scenario = generate_scenario(&ScenarioSpec::energy_like(11).with_agents(40)).unwrap();

    let mut config = RunConfig::new(CostFunctionSpec::Variance);
    config.iterations = 15;
    let mut spec = ExperimentSpec::new(config);
    spec.repetitions = 5;
    spec.base_seed = 11;
    spec.beta_sweep = Some(BetaSweep::default_grid());

    let report = behavioral_shift(&scenario.plan_sets, &spec).unwrap();

    println!("beta   soft I      bounded I   matched  delta");
    for p in report.points.iter().step_by(4) {
        println!(
            "{:<5.3}  {:<10.4}  {:<10.4}  {:<7.3}  {:+.3}",
            p.beta, p.soft_inefficiency, p.hard_inefficiency, p.matched_beta, p.delta_beta
        );
    }
    println!("mean shift over the grid: {:+.4}", report.mean_delta_beta);
}
