//! Plan directories: one text file per agent, named `<prefix><index>.plans`,
//! one plan per line in the form `score:v1,v2,...,vm`. Agents are ordered by
//! the numeric index embedded in the file name. A directory may also carry an
//! optional `rmse_target.csv` with one target value per line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::plan::{Plan, PlanSet};
use crate::scenario::Scenario;

/// Optional per-directory target vector for RMSE matching.
pub const RMSE_TARGET_FILE: &str = "rmse_target.csv";

fn file_index(path: &Path) -> Option<u64> {
    let stem = path.file_stem()?.to_str()?;
    let digits: String = stem
        .chars()
        .rev()
        .take_while(|c| c.is_ascii_digit())
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    digits.parse().ok()
}

fn parse_plan_line(path: &Path, line_no: usize, line: &str) -> Result<Plan> {
    let err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        line: line_no,
        message,
    };
    let (score, values) = line
        .split_once(':')
        .ok_or_else(|| err("expected `score:v1,v2,...`".into()))?;
    let score: f64 = score
        .trim()
        .parse()
        .map_err(|_| err(format!("invalid discomfort score `{}`", score.trim())))?;
    let values = values
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| err(format!("invalid plan value `{}`", v.trim())))
        })
        .collect::<Result<Vec<f64>>>()?;
    Plan::new(values, score).map_err(|e| err(e.to_string()))
}

/// Loads every `*.plans` file of a directory into a population, ordered by
/// the numeric file index. All plans must share one dimension.
pub fn load_plan_sets(dir: &Path) -> Result<Vec<PlanSet>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files: Vec<(u64, PathBuf)> = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) != Some("plans") {
            continue;
        }
        let index = file_index(&path).ok_or_else(|| {
            Error::Config(format!(
                "plan file name must end in a numeric index: {}",
                path.display()
            ))
        })?;
        files.push((index, path));
    }
    if files.is_empty() {
        return Err(Error::Config(format!(
            "no plan files (*.plans) in {}",
            dir.display()
        )));
    }
    files.sort();
    for pair in files.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::Config(format!(
                "duplicate plan file index {} in {}",
                pair[0].0,
                dir.display()
            )));
        }
    }

    let mut plan_sets = Vec::with_capacity(files.len());
    let mut dimension: Option<usize> = None;
    for (agent, (_, path)) in files.into_iter().enumerate() {
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let mut plans = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let plan = parse_plan_line(&path, i + 1, line)?;
            if let Some(m) = dimension {
                if plan.dimension() != m {
                    return Err(Error::Config(format!(
                        "{} line {} has dimension {}, expected {m}",
                        path.display(),
                        i + 1,
                        plan.dimension()
                    )));
                }
            } else {
                dimension = Some(plan.dimension());
            }
            plans.push(plan);
        }
        if plans.is_empty() {
            return Err(Error::Config(format!(
                "{} contains no plans",
                path.display()
            )));
        }
        plan_sets.push(PlanSet::new(agent, plans)?);
    }
    Ok(plan_sets)
}

/// Writes a population as `agent_<id>.plans` files.
pub fn write_plan_sets(dir: &Path, plan_sets: &[PlanSet]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for ps in plan_sets {
        let path = dir.join(format!("agent_{}.plans", ps.agent_id()));
        let mut out = String::new();
        for plan in ps.plans() {
            out.push_str(&format!("{}", plan.discomfort()));
            out.push(':');
            let values: Vec<String> = plan.values().iter().map(|v| format!("{v}")).collect();
            out.push_str(&values.join(","));
            out.push('\n');
        }
        fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Reads the optional RMSE target of a plan directory.
pub fn load_rmse_target(dir: &Path) -> Result<Option<Vec<f64>>> {
    let path = dir.join(RMSE_TARGET_FILE);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut target = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        target.push(line.parse::<f64>().map_err(|_| Error::Parse {
            path: path.clone(),
            line: i + 1,
            message: format!("invalid target value `{line}`"),
        })?);
    }
    Ok(Some(target))
}

pub fn write_rmse_target(dir: &Path, target: &[f64]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(RMSE_TARGET_FILE);
    let mut file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    for v in target {
        writeln!(file, "{v}").map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Writes a generated scenario: plan files plus the target when present.
pub fn write_scenario(dir: &Path, scenario: &Scenario) -> Result<()> {
    write_plan_sets(dir, &scenario.plan_sets)?;
    if let Some(target) = &scenario.rmse_target {
        write_rmse_target(dir, target)?;
    }
    Ok(())
}
