//! Validates the engine against exhaustive enumeration on instances small
//! enough to enumerate: the engine's final objective can never beat the
//! enumerated optimum, and the gap shows how close coordination gets.
//!
//! ```bash
//! cargo run -p coplan --example oracle_check
//! ```

use coplan::{
    brute_force_oracle, generate_scenario, run_repetition, BehaviorWeights, CostFunctionSpec,
    PlanCount, RunConfig, ScenarioSpec, TreeOverlay, DEFAULT_COMBINATION_CAP,
};

fn main() {
    println!("agents  combinations  oracle optimum  engine final  gap");
    let mut worst_gap = 0.0f64;
    for seed in 0..10 {
        let spec = ScenarioSpec::energy_like(seed)
            .with_agents(7)
            .with_dimension(8)
            .with_plans(PlanCount::Fixed(3));
        let scenario = generate_scenario(&spec).unwrap();

        let weights = BehaviorWeights::new(0.1, 0.2).unwrap();
        let mut config = RunConfig::new(CostFunctionSpec::Variance);
        config.iterations = 20;
        config.weights = weights;

        let overlay = TreeOverlay::build(scenario.plan_sets.len(), 2, seed).unwrap();
        let states = run_repetition(&scenario.plan_sets, &overlay, &config).unwrap();
        let engine = states.last().unwrap().objective;

        let oracle = brute_force_oracle(
            &scenario.plan_sets,
            &weights,
            &config.cost_spec,
            None,
            None,
            DEFAULT_COMBINATION_CAP,
        )
        .unwrap();

        assert!(engine >= oracle.objective);
        let gap = engine - oracle.objective;
        worst_gap = worst_gap.max(gap);
        println!(
            "{:>6}  {:>12}  {:<14.6}  {:<12.6}  {:.6}",
            scenario.plan_sets.len(),
            oracle.combinations,
            oracle.objective,
            engine,
            gap
        );
    }
    println!("worst gap over 10 instances: {worst_gap:.6}");
}
