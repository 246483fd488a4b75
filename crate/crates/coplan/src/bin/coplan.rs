//! Command-line front end: wires configuration files and flags into the
//! library and writes result CSVs.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coplan::io::config::{
    parse_config, parse_cost_function, parse_scenario, Config, CostFunctionKind, ScenarioChoice,
};
use coplan::io::{write_level_summary, write_results, write_scenario, write_shift_summary};
use coplan::{
    behavioral_shift, brute_force_oracle, envelope_level_sweep, generate_scenario, run_experiment,
    Error, Result, ScenarioSpec, DEFAULT_COMBINATION_CAP,
};

#[derive(Parser)]
#[command(
    name = "coplan",
    version,
    about = "Coordinated plan selection under hard constraint envelopes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write trajectory, summary and global plan CSVs.
    Run(CommonOpts),
    /// Sweep the discomfort weight grid and report the required altruism shift.
    SweepBeta(CommonOpts),
    /// Run nested envelope levels and report satisfaction rate per level.
    SweepLevels(CommonOpts),
    /// Exhaustively enumerate a small instance and print the optimum.
    Oracle {
        #[command(flatten)]
        common: CommonOpts,
        /// Refuse instances with more combinations than this.
        #[arg(long, default_value_t = DEFAULT_COMBINATION_CAP)]
        cap: u128,
    },
    /// Generate a synthetic dataset on disk.
    Generate {
        /// Scenario family: energy, bike or uav.
        #[arg(long, value_parser = parse_generator_kind)]
        kind: ScenarioChoice,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "numAgents")]
        num_agents: Option<usize>,
        #[arg(long = "outputDir", default_value = "output")]
        output_dir: PathBuf,
    },
}

/// Flags mirroring the configuration keys; a flag overrides the file value.
#[derive(Args, Default)]
struct CommonOpts {
    /// Properties-style configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "numAgents")]
    num_agents: Option<usize>,
    #[arg(long = "numIterations")]
    num_iterations: Option<usize>,
    #[arg(long = "numRepetitions")]
    num_repetitions: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long = "costFunction", value_parser = parse_cost_function_arg)]
    cost_function: Option<CostFunctionKind>,
    #[arg(long, value_parser = parse_scenario_arg)]
    scenario: Option<ScenarioChoice>,
    #[arg(long = "planDir")]
    plan_dir: Option<PathBuf>,
    #[arg(long = "globalConstraintFile")]
    global_constraint_file: Option<PathBuf>,
    #[arg(long = "costConstraintFile")]
    cost_constraint_file: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "outputDir")]
    output_dir: Option<PathBuf>,
    /// Reproducibility guard: fail unless a seed is set explicitly.
    #[arg(long)]
    ci: bool,
}

fn parse_cost_function_arg(value: &str) -> std::result::Result<CostFunctionKind, String> {
    parse_cost_function(value).map_err(|e| e.to_string())
}

fn parse_scenario_arg(value: &str) -> std::result::Result<ScenarioChoice, String> {
    parse_scenario(value).map_err(|e| e.to_string())
}

fn parse_generator_kind(value: &str) -> std::result::Result<ScenarioChoice, String> {
    match parse_scenario(value).map_err(|e| e.to_string())? {
        ScenarioChoice::File => Err("generate needs a generator kind: energy, bike or uav".into()),
        kind => Ok(kind),
    }
}

impl CommonOpts {
    fn merged_config(&self) -> Result<Config> {
        let base = match &self.config {
            Some(path) => parse_config(path)?,
            None => Config::default(),
        };
        let overlay = Config {
            num_agents: self.num_agents,
            num_iterations: self.num_iterations,
            num_repetitions: self.num_repetitions,
            alpha: self.alpha,
            beta: self.beta,
            cost_function: self.cost_function,
            scenario: self.scenario,
            plan_dir: self.plan_dir.clone(),
            global_constraint_file: self.global_constraint_file.clone(),
            cost_constraint_file: self.cost_constraint_file.clone(),
            seed: self.seed,
            output_dir: self.output_dir.clone(),
        };
        let merged = base.merged_with(&overlay);
        if self.ci && merged.seed.is_none() {
            return Err(Error::Config(
                "--ci requires an explicit seed (flag or config file)".into(),
            ));
        }
        Ok(merged)
    }
}

fn cmd_run(common: &CommonOpts) -> Result<()> {
    let resolved = common.merged_config()?.resolve()?;
    let report = run_experiment(&resolved.plan_sets, &resolved.spec)?;
    write_results(&report, &resolved.output_dir)?;
    println!(
        "repetitions={} r={:.6} bestObjective={} outputDir={}",
        report.repetitions,
        report.satisfaction_rate()?,
        report.best_objective,
        resolved.output_dir.display()
    );
    Ok(())
}

fn cmd_sweep_beta(common: &CommonOpts) -> Result<()> {
    let resolved = common.merged_config()?.resolve()?;
    let shift = behavioral_shift(&resolved.plan_sets, &resolved.spec)?;
    write_shift_summary(&shift, &resolved.output_dir)?;
    println!(
        "gridPoints={} meanDeltaBeta={} outputDir={}",
        shift.points.len(),
        shift.mean_delta_beta,
        resolved.output_dir.display()
    );
    Ok(())
}

fn cmd_sweep_levels(common: &CommonOpts) -> Result<()> {
    let resolved = common.merged_config()?.resolve()?;
    let mut spec = resolved.spec;
    // An explicit global constraint file becomes the single swept level.
    if let Some(env) = spec.config.plan_env.take() {
        spec.levels = Some(vec![env]);
    }
    let outcomes = envelope_level_sweep(&resolved.plan_sets, &spec)?;
    write_level_summary(&outcomes, &resolved.output_dir)?;
    for o in &outcomes {
        println!(
            "level={} r={:.6} meanInefficiency={}",
            o.level, o.rate, o.mean_costs.inefficiency
        );
    }
    Ok(())
}

fn cmd_oracle(common: &CommonOpts, cap: u128) -> Result<()> {
    let resolved = common.merged_config()?.resolve()?;
    let config = &resolved.spec.config;
    let outcome = brute_force_oracle(
        &resolved.plan_sets,
        &config.weights,
        &config.cost_spec,
        config.plan_env.as_ref(),
        config.cost_env.as_ref(),
        cap,
    )?;
    let selections: Vec<String> = outcome.selections.iter().map(|s| s.to_string()).collect();
    println!("combinations={}", outcome.combinations);
    println!("optimum={}", outcome.objective);
    println!("selections={}", selections.join(","));
    println!(
        "feasible={}/{}",
        outcome.feasible_count, outcome.combinations
    );
    Ok(())
}

fn cmd_generate(
    kind: ScenarioChoice,
    seed: u64,
    num_agents: Option<usize>,
    output_dir: &Path,
) -> Result<()> {
    let mut spec = match kind {
        ScenarioChoice::Energy => ScenarioSpec::energy_like(seed),
        ScenarioChoice::Bike => ScenarioSpec::bike_like(seed),
        ScenarioChoice::Uav => ScenarioSpec::uav_like(seed),
        ScenarioChoice::File => unreachable!("rejected by the parser"),
    };
    if let Some(n) = num_agents {
        spec = spec.with_agents(n);
    }
    let scenario = generate_scenario(&spec)?;
    write_scenario(output_dir, &scenario)?;
    println!(
        "agents={} dimension={} outputDir={}",
        scenario.plan_sets.len(),
        scenario.plan_sets[0].dimension(),
        output_dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(common) => cmd_run(common),
        Command::SweepBeta(common) => cmd_sweep_beta(common),
        Command::SweepLevels(common) => cmd_sweep_levels(common),
        Command::Oracle { common, cap } => cmd_oracle(common, *cap),
        Command::Generate {
            kind,
            seed,
            num_agents,
            output_dir,
        } => cmd_generate(*kind, *seed, *num_agents, output_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
