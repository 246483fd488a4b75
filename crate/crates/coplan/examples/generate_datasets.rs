//! Generates the three synthetic scenario families, writes them to disk and
//! loads them back, confirming the round trip is exact.
//!
//! ```bash
//! cargo run -p coplan --example generate_datasets
//! ```

use coplan::io::{load_plan_sets, load_rmse_target, write_scenario};
use coplan::{generate_scenario, ScenarioSpec};

fn main() {
    let specs = [
        ("energy", ScenarioSpec::energy_like(1).with_agents(25)),
        ("bike", ScenarioSpec::bike_like(2).with_agents(25)),
        ("uav", ScenarioSpec::uav_like(3).with_agents(25)),
    ];

    for (name, spec) in specs {
        let scenario = generate_scenario(&spec).unwrap();
        let dir = std::path::PathBuf::from(format!("output/datasets/{name}"));
        write_scenario(&dir, &scenario).unwrap();

        let loaded = load_plan_sets(&dir).unwrap();
        assert_eq!(loaded, scenario.plan_sets, "round trip must be exact");
        let target = load_rmse_target(&dir).unwrap();
        assert_eq!(target, scenario.rmse_target);

        let plans: usize = loaded.iter().map(|ps| ps.len()).sum();
        println!(
            "{name:<7} {} agents, {} plans total, dimension {}, target: {}",
            loaded.len(),
            plans,
            loaded[0].dimension(),
            if target.is_some() { "yes" } else { "no" },
        );
    }
    println!("datasets written under output/datasets/");
}
