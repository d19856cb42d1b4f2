use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::design::SystemDesign;
use super::inputs::{kg_to_twh, max_h2_potential, RegionSystemInputs};
use super::lp::optimize_system;
use crate::error::{Error, Result};

/// Fractions of the maximum potential at which the curve is evaluated.
pub const DEFAULT_STEPS: [f64; 7] = [0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub step: f64,
    pub h2_kg: f64,
    /// Cumulative quantity up to this step.
    pub h2_twh: f64,
    pub lcoh_eur_per_kg: f64,
    pub electrolyzer_mw: f64,
    pub curtailed_share: f64,
    pub water_cost_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostPotentialCurve {
    pub region_id: String,
    pub max_potential_twh: f64,
    pub points: Vec<CurvePoint>,
    #[serde(skip)]
    pub designs: Vec<SystemDesign>,
}

impl CostPotentialCurve {
    /// Quantity added by each step (TWh).
    pub fn step_quantities(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.points
            .iter()
            .map(|p| {
                let q = p.h2_twh - prev;
                prev = p.h2_twh;
                q
            })
            .collect()
    }
}

pub fn validate_steps(steps: &[f64]) -> Result<()> {
    if steps.is_empty() {
        return Err(Error::Input("at least one curve step is required".into()));
    }
    let mut prev = 0.0;
    for &s in steps {
        if !(s > prev && s <= 1.0) {
            return Err(Error::Input(format!("curve steps must increase within (0,1], got {s} after {prev}")));
        }
        prev = s;
    }
    Ok(())
}

/// Optimizes one system per step and collects the cost-potential curve.
pub fn cost_potential_curve(inputs: &RegionSystemInputs, steps: &[f64]) -> Result<CostPotentialCurve> {
    validate_steps(steps)?;
    inputs.validate()?;
    let max_kg = inputs.max_h2_kg();
    if !(max_kg > 0.0) {
        return Err(Error::UndefinedCost(format!("region '{}' has no generation potential", inputs.region_id)));
    }
    let designs: Vec<SystemDesign> = steps
        .par_iter()
        .map(|&s| optimize_system(inputs, s * max_kg))
        .collect::<Result<_>>()?;
    let points = steps
        .iter()
        .zip(&designs)
        .map(|(&step, d)| CurvePoint {
            step,
            h2_kg: d.h2_kg,
            h2_twh: kg_to_twh(d.h2_kg),
            lcoh_eur_per_kg: d.lcoh_eur_per_kg,
            electrolyzer_mw: d.electrolyzer_mw,
            curtailed_share: d.curtailed_share,
            water_cost_share: d.water_cost_share,
        })
        .collect();
    Ok(CostPotentialCurve {
        region_id: inputs.region_id.clone(),
        max_potential_twh: max_h2_potential(inputs),
        points,
        designs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepWater {
    pub step: f64,
    pub demand_m3: f64,
    pub groundwater_m3: f64,
    pub desalination_m3: f64,
    pub water_cost_eur: f64,
    pub water_cost_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaterShareReport {
    pub region_id: String,
    pub groundwater_cap_m3: f64,
    /// Largest curve step whose water demand groundwater alone can cover; 0 if none.
    pub feasible_share: f64,
    pub steps: Vec<StepWater>,
}

/// Water sourcing along a curve whose designs were kept.
pub fn groundwater_feasible_share(curve: &CostPotentialCurve, inputs: &RegionSystemInputs) -> Result<WaterShareReport> {
    if curve.designs.len() != curve.points.len() {
        return Err(Error::Contract("curve carries no designs for water accounting".into()));
    }
    let cap = inputs.groundwater_cap_m3();
    let mut feasible = 0.0;
    let steps = curve
        .points
        .iter()
        .zip(&curve.designs)
        .map(|(p, d)| {
            let demand = inputs.water_volume_m3(d.h2_kg);
            if demand <= cap * (1.0 + 1e-12) {
                feasible = p.step;
            }
            StepWater {
                step: p.step,
                demand_m3: demand,
                groundwater_m3: d.water.groundwater_m3,
                desalination_m3: d.water.desalination_m3,
                water_cost_eur: d.water.cost_eur,
                water_cost_share: d.water_cost_share,
            }
        })
        .collect();
    Ok(WaterShareReport {
        region_id: curve.region_id.clone(),
        groundwater_cap_m3: cap,
        feasible_share: feasible,
        steps,
    })
}
