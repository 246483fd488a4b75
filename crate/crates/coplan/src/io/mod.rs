//! File formats and parsers: plan directories, properties-style run
//! configuration, constraint CSVs and result CSVs.

pub mod config;
pub mod constraints_csv;
pub mod plans;
pub mod results;

pub use config::{parse_config, Config, CostFunctionKind, ScenarioChoice};
pub use constraints_csv::{
    parse_constraint_files, parse_cost_constraints, parse_global_constraints,
};
pub use plans::{
    load_plan_sets, load_rmse_target, write_plan_sets, write_rmse_target, write_scenario,
    RMSE_TARGET_FILE,
};
pub use results::{
    read_global_plan, read_run_summary, read_trajectory, write_level_summary, write_results,
    write_shift_summary,
};
