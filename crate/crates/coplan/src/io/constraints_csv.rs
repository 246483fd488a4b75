//! Constraint CSV files.
//!
//! Global (plan) constraints: rows `elementIndex,operator,value` where the
//! operator is `LEQ` for an upper bound or `GEQ` for a lower bound; unlisted
//! elements stay unconstrained. Cost constraints: rows
//! `costName,operator,value` with cost names `INEFFICIENCY`, `DISCOMFORT`
//! and `UNFAIRNESS`. Lines starting with `#` are comments.

use std::fs;
use std::path::Path;

use crate::constraints::{ConstraintEnvelope, CostEnvelope, ScalarBound};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Operator {
    Leq,
    Geq,
}

fn parse_operator(path: &Path, line: usize, token: &str) -> Result<Operator> {
    match token.trim() {
        "LEQ" => Ok(Operator::Leq),
        "GEQ" => Ok(Operator::Geq),
        other => Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("unknown operator `{other}` (LEQ or GEQ)"),
        }),
    }
}

fn rows(path: &Path) -> Result<Vec<(usize, Vec<String>)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("expected 3 comma-separated fields, got {}", fields.len()),
            });
        }
        out.push((i + 1, fields));
    }
    Ok(out)
}

/// Parses per-element bounds on the global plan. `dimension` is the plan
/// dimension the envelope must match.
pub fn parse_global_constraints(path: &Path, dimension: usize) -> Result<ConstraintEnvelope> {
    let mut upper = vec![None; dimension];
    let mut lower = vec![None; dimension];
    for (line, fields) in rows(path)? {
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let element: usize = fields[0]
            .parse()
            .map_err(|_| err(format!("invalid element index `{}`", fields[0])))?;
        if element >= dimension {
            return Err(err(format!(
                "element index {element} out of range (plan dimension {dimension})"
            )));
        }
        let op = parse_operator(path, line, &fields[1])?;
        let value: f64 = fields[2]
            .parse()
            .map_err(|_| err(format!("invalid bound value `{}`", fields[2])))?;
        let slot = match op {
            Operator::Leq => &mut upper[element],
            Operator::Geq => &mut lower[element],
        };
        if slot.is_some() {
            return Err(err(format!(
                "duplicate bound for element {element} and operator {}",
                fields[1]
            )));
        }
        *slot = Some(value);
    }
    ConstraintEnvelope::new(upper, lower)
}

/// Parses scalar bounds on the aggregate costs.
pub fn parse_cost_constraints(path: &Path) -> Result<CostEnvelope> {
    let mut bounds = [[None; 2]; 3]; // [cost][lower, upper]
    for (line, fields) in rows(path)? {
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let cost = match fields[0].as_str() {
            "INEFFICIENCY" => 0,
            "DISCOMFORT" => 1,
            "UNFAIRNESS" => 2,
            other => {
                return Err(err(format!(
                    "unknown cost name `{other}` (INEFFICIENCY, DISCOMFORT or UNFAIRNESS)"
                )))
            }
        };
        let op = parse_operator(path, line, &fields[1])?;
        let value: f64 = fields[2]
            .parse()
            .map_err(|_| err(format!("invalid bound value `{}`", fields[2])))?;
        let side = match op {
            Operator::Geq => 0,
            Operator::Leq => 1,
        };
        if bounds[cost][side].is_some() {
            return Err(err(format!(
                "duplicate bound for {} and operator {}",
                fields[0], fields[1]
            )));
        }
        bounds[cost][side] = Some(value);
    }
    Ok(CostEnvelope {
        inefficiency: ScalarBound::new(bounds[0][0], bounds[0][1])?,
        mean_discomfort: ScalarBound::new(bounds[1][0], bounds[1][1])?,
        unfairness: ScalarBound::new(bounds[2][0], bounds[2][1])?,
    })
}

/// Parses both constraint files; absent paths yield unconstrained envelopes.
pub fn parse_constraint_files(
    global: Option<&Path>,
    cost: Option<&Path>,
    dimension: usize,
) -> Result<(ConstraintEnvelope, CostEnvelope)> {
    let plan_env = match global {
        Some(path) => parse_global_constraints(path, dimension)?,
        None => ConstraintEnvelope::unconstrained(dimension),
    };
    let cost_env = match cost {
        Some(path) => parse_cost_constraints(path)?,
        None => CostEnvelope::unconstrained(),
    };
    Ok((plan_env, cost_env))
}
