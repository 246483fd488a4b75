//! Result CSV writers and readers.
//!
//! `trajectory.csv` holds one row per (repetition, iteration), `summary.csv`
//! the aggregate outcome, `global_plan.csv` the best final global plan, one
//! value per line. Floats are written with Rust's shortest round-trip
//! formatting, except satisfaction rates which are fixed to 6 decimals, so
//! identical reports always serialize to identical bytes.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::{ExperimentReport, LevelOutcome, ShiftReport, TrajectoryRow};
use crate::plan::{CostTriple, GlobalPlan};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const GLOBAL_PLAN_FILE: &str = "global_plan.csv";

fn create(path: &Path) -> Result<fs::File> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

/// Writes the three files of a run report into `dir`.
pub fn write_results(report: &ExperimentReport, dir: &Path) -> Result<()> {
    let path = dir.join(TRAJECTORY_FILE);
    let mut out = String::from(
        "repetition,iteration,inefficiency,meanDiscomfort,unfairness,satisfied,objective\n",
    );
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.repetition,
            row.iteration,
            row.costs.inefficiency,
            row.costs.mean_discomfort,
            row.costs.unfairness,
            u8::from(row.satisfied),
            row.objective,
        ));
    }
    create(&path)?
        .write_all(out.as_bytes())
        .map_err(|e| Error::io(&path, e))?;

    let path = dir.join(SUMMARY_FILE);
    let rate = report.satisfaction_rate()?;
    let summary = format!(
        "r,bestObjective,meanInefficiency,meanDiscomfort,meanUnfairness\n{:.6},{},{},{},{}\n",
        rate,
        report.best_objective,
        report.mean_final_costs.inefficiency,
        report.mean_final_costs.mean_discomfort,
        report.mean_final_costs.unfairness,
    );
    create(&path)?
        .write_all(summary.as_bytes())
        .map_err(|e| Error::io(&path, e))?;

    let path = dir.join(GLOBAL_PLAN_FILE);
    let mut plan = String::new();
    for v in &report.best_global.values {
        plan.push_str(&format!("{v}\n"));
    }
    create(&path)?
        .write_all(plan.as_bytes())
        .map_err(|e| Error::io(&path, e))?;
    Ok(())
}

/// Writes one summary row per envelope level.
pub fn write_level_summary(outcomes: &[LevelOutcome], dir: &Path) -> Result<()> {
    let path = dir.join(SUMMARY_FILE);
    let mut out = String::from("level,r,meanInefficiency,meanDiscomfort,meanUnfairness\n");
    for o in outcomes {
        out.push_str(&format!(
            "{},{:.6},{},{},{}\n",
            o.level,
            o.rate,
            o.mean_costs.inefficiency,
            o.mean_costs.mean_discomfort,
            o.mean_costs.unfairness,
        ));
    }
    create(&path)?
        .write_all(out.as_bytes())
        .map_err(|e| Error::io(&path, e))
}

/// Writes one summary row per sweep grid point.
pub fn write_shift_summary(report: &ShiftReport, dir: &Path) -> Result<()> {
    let path = dir.join(SUMMARY_FILE);
    let mut out = String::from(
        "beta,softInefficiency,softDiscomfort,hardInefficiency,hardRate,matchedBeta,deltaBeta\n",
    );
    for p in &report.points {
        out.push_str(&format!(
            "{},{},{},{},{:.6},{},{}\n",
            p.beta,
            p.soft_inefficiency,
            p.soft_discomfort,
            p.hard_inefficiency,
            p.hard_rate,
            p.matched_beta,
            p.delta_beta,
        ));
    }
    create(&path)?
        .write_all(out.as_bytes())
        .map_err(|e| Error::io(&path, e))
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    Ok(fs::read_to_string(path)
        .map_err(|e| Error::io(path, e))?
        .lines()
        .map(|l| l.to_string())
        .collect())
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: usize, field: &str) -> Result<T> {
    field.trim().parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("invalid field `{field}`"),
    })
}

/// Reads a trajectory file back into rows.
pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryRow>> {
    let lines = read_lines(path)?;
    let mut rows = Vec::new();
    for (i, line) in lines.iter().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("expected 7 fields, got {}", fields.len()),
            });
        }
        let satisfied: u8 = parse_field(path, i + 1, fields[5])?;
        rows.push(TrajectoryRow {
            repetition: parse_field(path, i + 1, fields[0])?,
            iteration: parse_field(path, i + 1, fields[1])?,
            costs: CostTriple {
                inefficiency: parse_field(path, i + 1, fields[2])?,
                mean_discomfort: parse_field(path, i + 1, fields[3])?,
                unfairness: parse_field(path, i + 1, fields[4])?,
            },
            satisfied: satisfied != 0,
            objective: parse_field(path, i + 1, fields[6])?,
        });
    }
    Ok(rows)
}

/// The single summary row of a run report: `(r, best objective, mean costs)`.
pub fn read_run_summary(path: &Path) -> Result<(f64, f64, CostTriple)> {
    let lines = read_lines(path)?;
    let row = lines.get(1).ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line: 2,
        message: "missing summary row".into(),
    })?;
    let fields: Vec<&str> = row.split(',').collect();
    if fields.len() != 5 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 2,
            message: format!("expected 5 fields, got {}", fields.len()),
        });
    }
    Ok((
        parse_field(path, 2, fields[0])?,
        parse_field(path, 2, fields[1])?,
        CostTriple {
            inefficiency: parse_field(path, 2, fields[2])?,
            mean_discomfort: parse_field(path, 2, fields[3])?,
            unfairness: parse_field(path, 2, fields[4])?,
        },
    ))
}

/// Reads a global plan file back into a plan.
pub fn read_global_plan(path: &Path) -> Result<GlobalPlan> {
    let lines = read_lines(path)?;
    let mut values = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        values.push(parse_field(path, i + 1, line)?);
    }
    Ok(GlobalPlan::new(values))
}
