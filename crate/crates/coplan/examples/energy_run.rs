//! Full experiment on a synthetic energy-like scenario: repeated runs under
//! fresh random tree positionings, result CSVs written to `output/energy`.
//!
//! ```bash
//! cargo run --release -p coplan --example energy_run
//! ```

use coplan::io::write_results;
use coplan::{
    generate_scenario, run_experiment, CostFunctionSpec, ExperimentSpec, RunConfig, ScenarioSpec,
};

fn main() {
    let scenario = generate_scenario(&ScenarioSpec::energy_like(42).with_agents(200)).unwrap();

    let mut config = RunConfig::new(CostFunctionSpec::Variance);
    config.iterations = 40;
    config.seed = 42;
    let mut spec = ExperimentSpec::new(config);
    spec.repetitions = 20;

    let report = run_experiment(&scenario.plan_sets, &spec).unwrap();
    println!(
        "{} repetitions x {} iterations over {} agents",
        report.repetitions,
        spec.config.iterations,
        scenario.plan_sets.len()
    );
    println!("best final objective  {}", report.best_objective);
    println!(
        "mean final inefficiency {}",
        report.mean_final_costs.inefficiency
    );
    println!(
        "mean final discomfort   {}",
        report.mean_final_costs.mean_discomfort
    );

    let first = report
        .rows
        .iter()
        .find(|r| r.repetition == report.best_repetition)
        .unwrap();
    println!(
        "best repetition improved the objective from {} to {}",
        first.objective, report.best_objective
    );

    let out = std::path::Path::new("output/energy");
    write_results(&report, out).unwrap();
    println!(
        "wrote trajectory.csv, summary.csv, global_plan.csv to {}",
        out.display()
    );
}
