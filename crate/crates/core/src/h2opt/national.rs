use serde::{Deserialize, Serialize};

use super::curve::CostPotentialCurve;
use super::inputs::energy_ratio;
use crate::error::{Error, Result};
use crate::numeric::{sum, CompensatedSum};

/// One step of one regional curve: `quantity_twh` offered at `lcoh_eur_per_kg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSegment {
    pub region_id: String,
    pub step: f64,
    pub quantity_twh: f64,
    pub lcoh_eur_per_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepMean {
    pub step: f64,
    pub quantity_twh: f64,
    pub weighted_lcoh_eur_per_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NationalCurve {
    pub country: String,
    /// Sorted by cost, then region id, then step.
    pub segments: Vec<CurveSegment>,
    pub step_means: Vec<StepMean>,
}

impl NationalCurve {
    pub fn total_twh(&self) -> f64 {
        sum(self.segments.iter().map(|s| s.quantity_twh))
    }

    /// Cumulative quantity after each segment.
    pub fn cumulative_twh(&self) -> Vec<f64> {
        let mut acc = CompensatedSum::new();
        self.segments
            .iter()
            .map(|s| {
                acc.add(s.quantity_twh);
                acc.value()
            })
            .collect()
    }
}

pub fn region_segments(curve: &CostPotentialCurve) -> Vec<CurveSegment> {
    curve
        .points
        .iter()
        .zip(curve.step_quantities())
        .map(|(p, q)| CurveSegment {
            region_id: curve.region_id.clone(),
            step: p.step,
            quantity_twh: q,
            lcoh_eur_per_kg: p.lcoh_eur_per_kg,
        })
        .collect()
}

fn sort_segments(v: &mut [CurveSegment]) {
    v.sort_by(|a, b| {
        a.lcoh_eur_per_kg
            .total_cmp(&b.lcoh_eur_per_kg)
            .then_with(|| a.region_id.cmp(&b.region_id))
            .then_with(|| a.step.total_cmp(&b.step))
    });
}

/// Merges regional curves into one merit-order curve.
/// All curves must share the same steps.
pub fn aggregate_national(country: &str, curves: &[CostPotentialCurve]) -> Result<NationalCurve> {
    let first = curves
        .first()
        .ok_or_else(|| Error::Input(format!("country '{country}' has no regional curves")))?;
    let steps: Vec<f64> = first.points.iter().map(|p| p.step).collect();
    for c in curves {
        let s: Vec<f64> = c.points.iter().map(|p| p.step).collect();
        if s != steps {
            return Err(Error::Input(format!("region '{}' uses different curve steps", c.region_id)));
        }
    }
    let mut segments: Vec<CurveSegment> = curves.iter().flat_map(region_segments).collect();
    let step_means = steps
        .iter()
        .enumerate()
        .map(|(k, &step)| {
            let mut q = CompensatedSum::new();
            let mut qc = CompensatedSum::new();
            for c in curves {
                let qk = c.step_quantities()[k];
                q.add(qk);
                qc.add(qk * c.points[k].lcoh_eur_per_kg);
            }
            let qv = q.value();
            StepMean {
                step,
                quantity_twh: qv,
                weighted_lcoh_eur_per_kg: if qv > 0.0 { qc.value() / qv } else { f64::NAN },
            }
        })
        .collect();
    sort_segments(&mut segments);
    Ok(NationalCurve {
        country: country.to_string(),
        segments,
        step_means,
    })
}

/// Domestic demand to be served before export.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DemandInput {
    /// Electricity demand in TWh, converted to the H₂ it would have yielded.
    pub electricity_twh: f64,
    pub hydrogen_twh: f64,
}

impl DemandInput {
    pub fn reserved_h2_twh(&self, efficiency_kwh_per_kg: f64) -> f64 {
        self.electricity_twh * energy_ratio(efficiency_kwh_per_kg) + self.hydrogen_twh
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetAside {
    pub potential_twh: f64,
    pub reserved_twh: f64,
    /// Reserved quantity as percent of the potential.
    pub reserved_percent: f64,
    /// Demand exceeds the whole potential; nothing is exportable.
    pub exceeds_potential: bool,
    pub reserved: Vec<CurveSegment>,
    pub exportable: Vec<CurveSegment>,
}

impl SetAside {
    pub fn exportable_twh(&self) -> f64 {
        sum(self.exportable.iter().map(|s| s.quantity_twh))
    }
}

/// Reserves the cheapest part of the curve for domestic demand.
pub fn demand_set_aside(curve: &NationalCurve, demand: &DemandInput, efficiency_kwh_per_kg: f64) -> Result<SetAside> {
    if !(demand.electricity_twh >= 0.0 && demand.hydrogen_twh >= 0.0) {
        return Err(Error::Input(format!("country '{}': demand must be >= 0", curve.country)));
    }
    let reserved_twh = demand.reserved_h2_twh(efficiency_kwh_per_kg);
    let potential = curve.total_twh();
    let reserved_percent = if potential > 0.0 { reserved_twh / potential * 100.0 } else { f64::INFINITY };
    if reserved_twh > potential {
        return Ok(SetAside {
            potential_twh: potential,
            reserved_twh,
            reserved_percent,
            exceeds_potential: true,
            reserved: curve.segments.clone(),
            exportable: Vec::new(),
        });
    }
    let mut left = reserved_twh;
    let mut reserved = Vec::new();
    let mut exportable = Vec::new();
    for s in &curve.segments {
        let take = left.min(s.quantity_twh).max(0.0);
        left -= take;
        if take > 0.0 {
            reserved.push(CurveSegment { quantity_twh: take, ..s.clone() });
        }
        let rest = s.quantity_twh - take;
        if rest > 0.0 {
            exportable.push(CurveSegment { quantity_twh: rest, ..s.clone() });
        }
    }
    Ok(SetAside {
        potential_twh: potential,
        reserved_twh,
        reserved_percent,
        exceeds_potential: false,
        reserved,
        exportable,
    })
}
