//! Nested envelope levels around the soft optimum: the tighter the band, the
//! lower the satisfaction rate and the higher the residual inefficiency.
//!
//! ```bash
//! cargo run --release -p coplan --example envelope_levels
//! ```

use coplan::{
    derive_envelope_levels, envelope_level_sweep, generate_scenario, run_experiment,
    CostFunctionSpec, ExperimentSpec, GlobalPlan, RunConfig, ScenarioSpec,
};

fn main() {
    let scenario = generate_scenario(&ScenarioSpec::energy_like(7).with_agents(60)).unwrap();

    let mut config = RunConfig::new(CostFunctionSpec::Variance);
    config.iterations = 20;
    let mut spec = ExperimentSpec::new(config);
    spec.repetitions = 20;
    spec.base_seed = 7;

    // Soft baseline to anchor the bands.
    let soft = run_experiment(&scenario.plan_sets, &spec).unwrap();
    let finals: Vec<GlobalPlan> = soft.finals.iter().map(|s| s.global.clone()).collect();
    println!(
        "soft baseline: mean final inefficiency {}",
        soft.mean_final_costs.inefficiency
    );

    spec.levels = Some(derive_envelope_levels(&finals, &[f64::INFINITY, 1.0, 0.25]).unwrap());
    let outcomes = envelope_level_sweep(&scenario.plan_sets, &spec).unwrap();

    println!("level  rate    mean inefficiency");
    for o in &outcomes {
        println!(
            "{:>5}  {:.4}  {}",
            o.level, o.rate, o.mean_costs.inefficiency
        );
    }
}
