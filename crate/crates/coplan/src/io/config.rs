//! Properties-style run configuration: `key=value` lines, `#` or `!`
//! comments. Unknown keys are rejected; missing keys take documented
//! defaults (40 iterations, 200 repetitions, alpha = beta = 0).

use std::fs;
use std::path::{Path, PathBuf};

use crate::engine::RunConfig;
use crate::error::{Error, Result};
use crate::experiment::ExperimentSpec;
use crate::io::constraints_csv::{parse_cost_constraints, parse_global_constraints};
use crate::io::plans::{load_plan_sets, load_rmse_target};
use crate::plan::{validate_plan_sets, BehaviorWeights, CostFunctionSpec, PlanSet};
use crate::scenario::{generate_scenario, ScenarioSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostFunctionKind {
    #[default]
    Variance,
    Rmse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioChoice {
    Energy,
    Bike,
    Uav,
    File,
}

/// Parsed configuration. Fields that may be overridden from the command line
/// stay optional until [`Config::resolve`] applies defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub num_agents: Option<usize>,
    pub num_iterations: Option<usize>,
    pub num_repetitions: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub cost_function: Option<CostFunctionKind>,
    pub scenario: Option<ScenarioChoice>,
    pub plan_dir: Option<PathBuf>,
    pub global_constraint_file: Option<PathBuf>,
    pub cost_constraint_file: Option<PathBuf>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for key `{key}`")))
}

impl Config {
    /// Merges another configuration on top; the overlay wins where set.
    pub fn merged_with(mut self, overlay: &Config) -> Config {
        macro_rules! take {
            ($field:ident) => {
                if overlay.$field.is_some() {
                    self.$field = overlay.$field.clone();
                }
            };
        }
        take!(num_agents);
        take!(num_iterations);
        take!(num_repetitions);
        take!(alpha);
        take!(beta);
        take!(cost_function);
        take!(scenario);
        take!(plan_dir);
        take!(global_constraint_file);
        take!(cost_constraint_file);
        take!(seed);
        take!(output_dir);
        self
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| "output".into())
    }

    /// Materializes the configuration: generates or loads the population,
    /// wires the RMSE target and constraint files, and assembles the
    /// experiment spec.
    pub fn resolve(&self) -> Result<ResolvedExperiment> {
        let seed = self.seed.unwrap_or(0);
        let scenario_choice = match (self.scenario, &self.plan_dir) {
            (Some(ScenarioChoice::File), Some(_)) | (None, Some(_)) => ScenarioChoice::File,
            (Some(ScenarioChoice::File), None) => {
                return Err(Error::Config("scenario `file` requires planDir".into()))
            }
            (Some(choice), None) => choice,
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "set either a generator scenario or planDir, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config(
                    "either scenario or planDir must be set".into(),
                ))
            }
        };

        let (plan_sets, generated_target) = match scenario_choice {
            ScenarioChoice::File => {
                let dir = self.plan_dir.as_ref().expect("checked above");
                (load_plan_sets(dir)?, load_rmse_target(dir)?)
            }
            choice => {
                let mut spec = match choice {
                    ScenarioChoice::Energy => ScenarioSpec::energy_like(seed),
                    ScenarioChoice::Bike => ScenarioSpec::bike_like(seed),
                    ScenarioChoice::Uav => ScenarioSpec::uav_like(seed),
                    ScenarioChoice::File => unreachable!(),
                };
                if let Some(n) = self.num_agents {
                    spec = spec.with_agents(n);
                }
                let scenario = generate_scenario(&spec)?;
                (scenario.plan_sets, scenario.rmse_target)
            }
        };
        let dimension = validate_plan_sets(&plan_sets)?;
        if let Some(n) = self.num_agents {
            if scenario_choice == ScenarioChoice::File && n != plan_sets.len() {
                return Err(Error::Config(format!(
                    "numAgents={n} but planDir holds {} agents",
                    plan_sets.len()
                )));
            }
        }

        // The uav family is a matching problem; it defaults to RMSE.
        let cost_kind = self.cost_function.unwrap_or(match scenario_choice {
            ScenarioChoice::Uav => CostFunctionKind::Rmse,
            _ => CostFunctionKind::Variance,
        });
        let cost_spec = match cost_kind {
            CostFunctionKind::Variance => CostFunctionSpec::Variance,
            CostFunctionKind::Rmse => {
                let target = generated_target.ok_or_else(|| {
                    Error::Config(
                        "costFunction=RMSE needs a target: use the uav scenario or put \
                         rmse_target.csv in planDir"
                            .into(),
                    )
                })?;
                if target.len() != dimension {
                    return Err(Error::Config(format!(
                        "RMSE target has {} values, plans have dimension {dimension}",
                        target.len()
                    )));
                }
                CostFunctionSpec::Rmse { target }
            }
        };

        let plan_env = self
            .global_constraint_file
            .as_deref()
            .map(|p| parse_global_constraints(p, dimension))
            .transpose()?;
        let cost_env = self
            .cost_constraint_file
            .as_deref()
            .map(parse_cost_constraints)
            .transpose()?;

        let mut run_config = RunConfig::new(cost_spec);
        run_config.iterations = self.num_iterations.unwrap_or(40);
        run_config.weights =
            BehaviorWeights::new(self.alpha.unwrap_or(0.0), self.beta.unwrap_or(0.0))?;
        run_config.plan_env = plan_env;
        run_config.cost_env = cost_env;
        run_config.seed = seed;

        let mut spec = ExperimentSpec::new(run_config);
        spec.repetitions = self.num_repetitions.unwrap_or(200);
        spec.base_seed = seed;

        Ok(ResolvedExperiment {
            plan_sets,
            spec,
            output_dir: self.output_dir(),
        })
    }
}

/// A configuration turned into runnable inputs.
#[derive(Debug, Clone)]
pub struct ResolvedExperiment {
    pub plan_sets: Vec<PlanSet>,
    pub spec: ExperimentSpec,
    pub output_dir: PathBuf,
}

/// Parses a properties-style configuration file.
pub fn parse_config(path: &Path) -> Result<Config> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}

/// Parses configuration text. Later occurrences of a key win.
pub fn parse_config_str(text: &str) -> Result<Config> {
    let mut config = Config::default();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('!') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected `key=value`, got `{line}`")))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "numAgents" => config.num_agents = Some(parse_value(key, value)?),
            "numIterations" => config.num_iterations = Some(parse_value(key, value)?),
            "numRepetitions" => config.num_repetitions = Some(parse_value(key, value)?),
            "alpha" => config.alpha = Some(parse_value(key, value)?),
            "beta" => config.beta = Some(parse_value(key, value)?),
            "costFunction" => config.cost_function = Some(parse_cost_function(value)?),
            "scenario" => config.scenario = Some(parse_scenario(value)?),
            "planDir" => config.plan_dir = Some(value.into()),
            "globalConstraintFile" => config.global_constraint_file = Some(value.into()),
            "costConstraintFile" => config.cost_constraint_file = Some(value.into()),
            "seed" => config.seed = Some(parse_value(key, value)?),
            "outputDir" => config.output_dir = Some(value.into()),
            unknown => {
                return Err(Error::Config(format!(
                    "unknown configuration key `{unknown}`"
                )))
            }
        }
    }
    Ok(config)
}

pub fn parse_cost_function(value: &str) -> Result<CostFunctionKind> {
    match value.to_ascii_uppercase().as_str() {
        "VARIANCE" => Ok(CostFunctionKind::Variance),
        "RMSE" => Ok(CostFunctionKind::Rmse),
        other => Err(Error::Config(format!(
            "invalid value `{other}` for key `costFunction` (VARIANCE or RMSE)"
        ))),
    }
}

pub fn parse_scenario(value: &str) -> Result<ScenarioChoice> {
    match value.to_ascii_lowercase().as_str() {
        "energy" => Ok(ScenarioChoice::Energy),
        "bike" => Ok(ScenarioChoice::Bike),
        "uav" => Ok(ScenarioChoice::Uav),
        "file" => Ok(ScenarioChoice::File),
        other => Err(Error::Config(format!(
            "invalid value `{other}` for key `scenario` (energy, bike, uav or file)"
        ))),
    }
}
