//! Synthetic scenario generators.
//!
//! Three generators produce populations whose statistical shape matches the
//! simulated application domains:
//!
//! * energy-like: non-negative daily load curves; alternatives are circular
//!   time shifts of a per-agent base profile, with discomfort growing with
//!   the shift distance,
//! * bike-like: sparse signed station in/out counts with a per-agent plan
//!   count drawn from a range,
//! * uav-like: cell coverage vectors over a square sensing grid plus a smooth
//!   density target for RMSE matching.
//!
//! All output is a pure function of the scenario spec, including the seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::plan::{Plan, PlanSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    EnergyLike,
    BikeLike,
    UavLike,
}

/// Number of plans per agent: fixed, or drawn uniformly from a range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanCount {
    Fixed(usize),
    Range(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub agents: usize,
    pub plans: PlanCount,
    pub dimension: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    /// Load curves: 1000 agents, 10 plans, 144 slots, variance objective.
    pub fn energy_like(seed: u64) -> Self {
        ScenarioSpec {
            kind: ScenarioKind::EnergyLike,
            agents: 1000,
            plans: PlanCount::Fixed(10),
            dimension: 144,
            seed,
        }
    }

    /// Station flows: 1000 agents, 1 to 24 plans, 98 stations.
    pub fn bike_like(seed: u64) -> Self {
        ScenarioSpec {
            kind: ScenarioKind::BikeLike,
            agents: 1000,
            plans: PlanCount::Range(1, 24),
            dimension: 98,
            seed,
        }
    }

    /// Sensing coverage: 1000 agents, 64 plans, 64 cells, RMSE objective.
    pub fn uav_like(seed: u64) -> Self {
        ScenarioSpec {
            kind: ScenarioKind::UavLike,
            agents: 1000,
            plans: PlanCount::Fixed(64),
            dimension: 64,
            seed,
        }
    }

    pub fn with_agents(mut self, agents: usize) -> Self {
        self.agents = agents;
        self
    }

    pub fn with_dimension(mut self, dimension: usize) -> Self {
        self.dimension = dimension;
        self
    }

    pub fn with_plans(mut self, plans: PlanCount) -> Self {
        self.plans = plans;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.agents == 0 {
            return Err(Error::Config("scenario needs at least one agent".into()));
        }
        if self.dimension == 0 {
            return Err(Error::Config(
                "scenario dimension must be at least 1".into(),
            ));
        }
        match self.plans {
            PlanCount::Fixed(0) => Err(Error::Config("plan count must be at least 1".into())),
            PlanCount::Range(lo, hi) if lo == 0 || hi < lo => Err(Error::Config(format!(
                "invalid plan count range [{lo}, {hi}]"
            ))),
            _ => Ok(()),
        }
    }
}

/// A generated population plus the RMSE target, when the scenario has one.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub plan_sets: Vec<PlanSet>,
    pub rmse_target: Option<Vec<f64>>,
}

fn agent_rng(seed: u64, agent: usize, stream: u64) -> ChaCha8Rng {
    // SplitMix64-style mixing keeps per-agent streams decorrelated.
    let mut z = seed
        .wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(agent as u64 + 1))
        .wrapping_add(stream.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

fn plan_count(spec: &ScenarioSpec, rng: &mut ChaCha8Rng) -> usize {
    match spec.plans {
        PlanCount::Fixed(k) => k,
        PlanCount::Range(lo, hi) => rng.gen_range(lo..=hi),
    }
}

fn energy_like(spec: &ScenarioSpec) -> Result<Vec<PlanSet>> {
    let m = spec.dimension;
    let mut sets = Vec::with_capacity(spec.agents);
    for agent in 0..spec.agents {
        let mut rng = agent_rng(spec.seed, agent, 1);
        let k = plan_count(spec, &mut rng);
        let scale: f64 = rng.gen_range(0.4..1.6);
        let morning: f64 = rng.gen_range(0.25..0.35);
        let evening: f64 = rng.gen_range(0.72..0.85);
        let width: f64 = rng.gen_range(0.05..0.10);
        let amp_morning: f64 = rng.gen_range(0.4..1.0);
        let amp_evening: f64 = rng.gen_range(0.6..1.4);

        let base: Vec<f64> = (0..m)
            .map(|u| {
                let x = u as f64 / m as f64;
                let bump = |c: f64, a: f64| {
                    let d = (x - c).abs().min(1.0 - (x - c).abs());
                    a * (-(d * d) / (width * width)).exp()
                };
                scale * (0.25 + bump(morning, amp_morning) + bump(evening, amp_evening))
            })
            .collect();

        let max_shift = (m / 6).max(1) as i64;
        let mut plans = Vec::with_capacity(k);
        for j in 0..k {
            // Plan 0 keeps the preferred profile; later plans shift further.
            let magnitude = j.div_ceil(2) as i64 * max_shift / ((k as i64 / 2).max(1));
            let shift = if j % 2 == 0 { magnitude } else { -magnitude };
            let mut values = Vec::with_capacity(m);
            for u in 0..m {
                let src = (u as i64 - shift).rem_euclid(m as i64) as usize;
                let noise = 1.0 + rng.gen_range(-0.05..0.05);
                values.push((base[src] * noise).max(0.0));
            }
            let discomfort =
                shift.unsigned_abs() as f64 / max_shift as f64 + rng.gen_range(0.0..0.02);
            plans.push(Plan::new(values, discomfort)?);
        }
        sets.push(PlanSet::new(agent, plans)?);
    }
    Ok(sets)
}

fn bike_like(spec: &ScenarioSpec) -> Result<Vec<PlanSet>> {
    let m = spec.dimension;
    let mut sets = Vec::with_capacity(spec.agents);
    for agent in 0..spec.agents {
        let mut rng = agent_rng(spec.seed, agent, 2);
        let k = plan_count(spec, &mut rng);
        let mut plans = Vec::with_capacity(k);
        for _ in 0..k {
            let mut values = vec![0.0; m];
            let trips = rng.gen_range(1..=3);
            for _ in 0..trips {
                let pickup = rng.gen_range(0..m);
                let mut ret = rng.gen_range(0..m);
                if ret == pickup {
                    ret = (ret + 1) % m;
                }
                let count = rng.gen_range(1..=2) as f64;
                values[pickup] += count;
                values[ret] -= count;
            }
            let discomfort: f64 = rng.gen_range(0.0..1.0);
            plans.push(Plan::new(values, discomfort)?);
        }
        sets.push(PlanSet::new(agent, plans)?);
    }
    Ok(sets)
}

fn uav_like(spec: &ScenarioSpec) -> Result<Scenario> {
    let m = spec.dimension;
    let side = (m as f64).sqrt().ceil() as usize;
    let cell_xy = |cell: usize| ((cell % side) as f64, (cell / side) as f64);

    // Smooth density over the grid, shared by the whole scenario.
    let mut density_rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5eed_d0e5_u64);
    let kernels: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                density_rng.gen_range(0.0..side as f64),
                density_rng.gen_range(0.0..side as f64),
                density_rng.gen_range(1.0..(side as f64 / 2.0).max(1.5)),
                density_rng.gen_range(0.5..1.5),
            )
        })
        .collect();
    let mut density: Vec<f64> = (0..m)
        .map(|cell| {
            let (x, y) = cell_xy(cell);
            kernels
                .iter()
                .map(|(cx, cy, w, a)| {
                    let d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                    a * (-d2 / (2.0 * w * w)).exp()
                })
                .sum::<f64>()
                + 0.05
        })
        .collect();
    let total: f64 = density.iter().sum();
    for d in &mut density {
        *d /= total;
    }

    let max_dist = (2.0 * ((side - 1) as f64).powi(2)).sqrt().max(1.0);
    let mut sets = Vec::with_capacity(spec.agents);
    let mut mass_sum = 0.0;
    for agent in 0..spec.agents {
        let mut rng = agent_rng(spec.seed, agent, 3);
        let k = plan_count(spec, &mut rng);
        let home = rng.gen_range(0..m);
        let capacity: f64 = rng.gen_range(0.5..1.5);
        let (hx, hy) = cell_xy(home);

        let mut plans = Vec::with_capacity(k);
        for j in 0..k {
            let focus = (j * m) / k.max(1) % m;
            let (fx, fy) = cell_xy(focus);
            let mut values = vec![0.0; m];
            values[focus] += capacity;
            // 4-neighborhood spill.
            let fx_i = focus % side;
            let fy_i = focus / side;
            let mut spill = |cx: usize, cy: usize| {
                let cell = cy * side + cx;
                if cell < m {
                    values[cell] += capacity / 2.0;
                }
            };
            if fx_i > 0 {
                spill(fx_i - 1, fy_i);
            }
            if fx_i + 1 < side {
                spill(fx_i + 1, fy_i);
            }
            if fy_i > 0 {
                spill(fx_i, fy_i - 1);
            }
            if (fy_i + 1) * side < m {
                spill(fx_i, fy_i + 1);
            }
            mass_sum += values.iter().sum::<f64>();
            let dist = ((fx - hx) * (fx - hx) + (fy - hy) * (fy - hy)).sqrt();
            plans.push(Plan::new(values, dist / max_dist)?);
        }
        sets.push(PlanSet::new(agent, plans)?);
    }

    // Target carries the mean per-agent plan mass, shaped by the density.
    let total_plans: usize = sets.iter().map(|s| s.len()).sum();
    let mean_mass = mass_sum / total_plans as f64;
    let target: Vec<f64> = density
        .iter()
        .map(|d| d * mean_mass * spec.agents as f64)
        .collect();

    Ok(Scenario {
        plan_sets: sets,
        rmse_target: Some(target),
    })
}

/// Generates a population from a scenario spec. Deterministic per spec.
pub fn generate_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    spec.validate()?;
    match spec.kind {
        ScenarioKind::EnergyLike => Ok(Scenario {
            plan_sets: energy_like(spec)?,
            rmse_target: None,
        }),
        ScenarioKind::BikeLike => Ok(Scenario {
            plan_sets: bike_like(spec)?,
            rmse_target: None,
        }),
        ScenarioKind::UavLike => uav_like(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let spec = ScenarioSpec::energy_like(7).with_agents(12);
        let a = generate_scenario(&spec).unwrap();
        let b = generate_scenario(&spec).unwrap();
        assert_eq!(a, b);

        let other = generate_scenario(&ScenarioSpec::energy_like(8).with_agents(12)).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn energy_plans_are_non_negative() {
        let spec = ScenarioSpec::energy_like(3).with_agents(10);
        let scenario = generate_scenario(&spec).unwrap();
        for ps in &scenario.plan_sets {
            assert_eq!(ps.len(), 10);
            for plan in ps.plans() {
                assert_eq!(plan.dimension(), 144);
                assert!(plan.values().iter().all(|&v| v >= 0.0));
                assert!(plan.discomfort() >= 0.0);
            }
        }
    }

    #[test]
    fn bike_plan_counts_stay_in_range() {
        let spec = ScenarioSpec::bike_like(11).with_agents(200);
        let scenario = generate_scenario(&spec).unwrap();
        let mut seen_low = usize::MAX;
        let mut seen_high = 0;
        for ps in &scenario.plan_sets {
            assert!((1..=24).contains(&ps.len()));
            seen_low = seen_low.min(ps.len());
            seen_high = seen_high.max(ps.len());
            assert_eq!(ps.dimension(), 98);
        }
        // With 200 agents the draw should cover a spread of counts.
        assert!(seen_low < 5);
        assert!(seen_high > 20);
    }

    #[test]
    fn uav_scenario_has_target_and_square_dimension() {
        let spec = ScenarioSpec::uav_like(5).with_agents(8);
        let scenario = generate_scenario(&spec).unwrap();
        let target = scenario.rmse_target.as_ref().unwrap();
        assert_eq!(target.len(), 64);
        assert!(target.iter().all(|&t| t > 0.0));
        for ps in &scenario.plan_sets {
            assert_eq!(ps.len(), 64);
            for plan in ps.plans() {
                assert_eq!(plan.dimension(), 64);
            }
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(generate_scenario(&ScenarioSpec::energy_like(0).with_agents(0)).is_err());
        assert!(
            generate_scenario(&ScenarioSpec::bike_like(0).with_plans(PlanCount::Range(3, 2)))
                .is_err()
        );
    }
}
