//! Walkthrough of a three-agent population under five envelope settings,
//! from unconstrained balancing to an envelope no combination can satisfy.
//!
//! ```bash
//! cargo run -p coplan --example worked_three_agents
//! ```

use coplan::{
    run_repetition, ConstraintEnvelope, CostFunctionSpec, PlanSet, RunConfig, TreeOverlay,
};

fn population() -> Vec<PlanSet> {
    let agent = |id: usize, plans: &[(&[f64], f64)]| {
        PlanSet::new(
            id,
            plans
                .iter()
                .map(|(v, d)| coplan::Plan::new(v.to_vec(), *d).unwrap())
                .collect(),
        )
        .unwrap()
    };
    vec![
        agent(0, &[(&[3.0, 5.0], 0.0), (&[2.0, 7.0], 0.0)]),
        agent(1, &[(&[1.0, 3.0], 0.0), (&[5.0, 2.0], 0.0)]),
        agent(2, &[(&[3.0, 5.0], 0.0), (&[6.0, 2.0], 0.0)]),
    ]
}

fn describe(name: &str, env: Option<ConstraintEnvelope>, iterations: usize) {
    let plan_sets = population();
    // Agent 2 coordinates at the root; agents 0 and 1 are leaves.
    let overlay = TreeOverlay::from_positions(vec![2, 0, 1], 2).unwrap();
    let mut config = RunConfig::new(CostFunctionSpec::Variance);
    config.iterations = iterations;
    config.plan_env = env;

    let states = run_repetition(&plan_sets, &overlay, &config).unwrap();
    let last = states.last().unwrap();
    let picks: Vec<String> = last
        .selections
        .iter()
        .enumerate()
        .map(|(agent, &j)| format!("agent {agent} -> {:?}", plan_sets[agent].plan(j).values()))
        .collect();
    println!("{name}");
    println!("  global plan {:?}", last.global.values);
    println!("  objective   {}", last.objective);
    println!("  satisfied   {}", last.satisfied);
    println!("  selections  {}", picks.join(", "));
    println!();
}

fn main() {
    let upper = |bounds: Vec<Option<f64>>| Some(ConstraintEnvelope::with_upper(bounds).unwrap());

    describe("soft balancing, no envelope", None, 2);
    describe("upper envelope [9, -]", upper(vec![Some(9.0), None]), 1);
    describe("upper envelope [-, 9]", upper(vec![None, Some(9.0)]), 1);
    describe(
        "upper envelope [10, 13]",
        upper(vec![Some(10.0), Some(13.0)]),
        1,
    );
    describe(
        "upper envelope [9, 9] (no combination satisfies it)",
        upper(vec![Some(9.0), Some(9.0)]),
        40,
    );
}
