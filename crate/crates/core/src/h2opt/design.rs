use serde::{Deserialize, Serialize};

use super::dispatch::{generation_series, min_electrolyzer_mw};
use super::inputs::RegionSystemInputs;
use crate::numeric::{sum, CompensatedSum};
use crate::tech::Technology;
use crate::water::{draw_water, WaterDraw};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorCapacity {
    pub name: String,
    pub technology: Technology,
    pub capacity_mw: f64,
    pub ceiling_mw: f64,
    /// Electricity produced (dispatched for geothermal), MWh/a.
    pub output_mwh: f64,
}

/// Hourly operation over the whole profile horizon.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dispatch {
    pub generation_mw: Vec<f64>,
    pub electrolyzer_mw: Vec<f64>,
    pub charge_mw: Vec<f64>,
    pub discharge_mw: Vec<f64>,
    pub state_of_charge_mwh: Vec<f64>,
}

impl Dispatch {
    /// Surplus that is neither converted nor stored.
    pub fn curtailed_mw(&self) -> Vec<f64> {
        (0..self.generation_mw.len())
            .map(|t| {
                let c = self.charge_mw.get(t).copied().unwrap_or(0.0);
                let d = self.discharge_mw.get(t).copied().unwrap_or(0.0);
                (self.generation_mw[t] + d - c - self.electrolyzer_mw[t]).max(0.0)
            })
            .collect()
    }

    /// Largest hourly shortfall of supply against use, relative to mean generation.
    pub fn balance_residual(&self) -> f64 {
        let mean_gen = sum(self.generation_mw.iter().copied()) / self.generation_mw.len().max(1) as f64;
        let worst = (0..self.generation_mw.len())
            .map(|t| {
                let c = self.charge_mw.get(t).copied().unwrap_or(0.0);
                let d = self.discharge_mw.get(t).copied().unwrap_or(0.0);
                (self.electrolyzer_mw[t] + c - self.generation_mw[t] - d).max(0.0)
            })
            .fold(0.0, f64::max);
        if mean_gen > 0.0 { worst / mean_gen } else { worst }
    }
}

/// Cost-optimal system for one hydrogen target. Energies are per year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDesign {
    pub region_id: String,
    pub h2_kg: f64,
    pub generators: Vec<GeneratorCapacity>,
    pub electrolyzer_mw: f64,
    pub battery_mwh: f64,
    pub battery_mw: f64,
    pub generation_mwh: f64,
    pub electrolyzer_input_mwh: f64,
    pub curtailed_mwh: f64,
    pub battery_loss_mwh: f64,
    pub electrolyzer_full_load_hours: f64,
    pub curtailed_share: f64,
    pub generation_cost_eur: f64,
    pub electrolyzer_cost_eur: f64,
    pub battery_cost_eur: f64,
    pub water: WaterDraw,
    pub annual_cost_eur: f64,
    pub water_cost_share: f64,
    pub lcoh_eur_per_kg: f64,
    pub binding_ceilings: Vec<String>,
    #[serde(skip)]
    pub dispatch: Dispatch,
}

impl SystemDesign {
    pub fn capacity_of(&self, tech: Technology) -> f64 {
        self.generators.iter().filter(|g| g.technology == tech).map(|g| g.capacity_mw).sum()
    }

    /// Share of generated electricity coming from `tech`.
    pub fn generation_share(&self, tech: Technology) -> f64 {
        let part: f64 = self.generators.iter().filter(|g| g.technology == tech).map(|g| g.output_mwh).sum();
        if self.generation_mwh > 0.0 { part / self.generation_mwh } else { 0.0 }
    }

    /// Built capacity share of `tech` in all generator capacity.
    pub fn capacity_share(&self, tech: Technology) -> f64 {
        let total: f64 = self.generators.iter().map(|g| g.capacity_mw).sum();
        if total > 0.0 { self.capacity_of(tech) / total } else { 0.0 }
    }
}

/// Assembles a design from capacities and hourly operation.
/// `unit_output` holds each generator's hourly output per MW actually used.
pub(crate) fn assemble(
    inputs: &RegionSystemInputs,
    h2_kg: f64,
    capacities_mw: Vec<f64>,
    unit_output_mw: Vec<Vec<f64>>,
    electrolyzer_mw: f64,
    battery: (f64, f64),
    dispatch: Dispatch,
) -> SystemDesign {
    let years = inputs.years();
    let per_year = |v: &[f64]| sum(v.iter().copied()) / years;
    let mut generators = Vec::with_capacity(inputs.generators.len());
    let mut gen_cost = CompensatedSum::new();
    let mut binding = Vec::new();
    for ((g, &cap), out) in inputs.generators.iter().zip(&capacities_mw).zip(&unit_output_mw) {
        gen_cost.add(cap * g.costs.annual_cost_eur_per_mw());
        if g.ceiling_mw > 0.0 && cap >= g.ceiling_mw * (1.0 - 1e-6) {
            binding.push(g.name.clone());
        }
        generators.push(GeneratorCapacity {
            name: g.name.clone(),
            technology: g.technology,
            capacity_mw: cap,
            ceiling_mw: g.ceiling_mw,
            output_mwh: per_year(out),
        });
    }
    let generation_mwh = per_year(&dispatch.generation_mw);
    let electrolyzer_input_mwh = per_year(&dispatch.electrolyzer_mw);
    let curtailed_mwh = per_year(&dispatch.curtailed_mw());
    let battery_loss_mwh = (per_year(&dispatch.charge_mw) - per_year(&dispatch.discharge_mw)).max(0.0);
    let (battery_mwh, battery_mw) = battery;
    let battery_cost = inputs
        .battery
        .as_ref()
        .map(|b| battery_mwh * b.energy.annual_cost_eur_per_mw() + battery_mw * b.power.annual_cost_eur_per_mw())
        .unwrap_or(0.0);
    let electrolyzer_cost = electrolyzer_mw * inputs.electrolyzer.annual_cost_eur_per_mw();
    let water = draw_water(&inputs.water, inputs.water_volume_m3(h2_kg));
    let generation_cost = gen_cost.value();
    let annual_cost = sum([generation_cost, electrolyzer_cost, battery_cost, water.cost_eur]);
    SystemDesign {
        region_id: inputs.region_id.clone(),
        h2_kg,
        generators,
        electrolyzer_mw,
        battery_mwh,
        battery_mw,
        generation_mwh,
        electrolyzer_input_mwh,
        curtailed_mwh,
        battery_loss_mwh,
        electrolyzer_full_load_hours: if electrolyzer_mw > 0.0 { electrolyzer_input_mwh / electrolyzer_mw } else { 0.0 },
        curtailed_share: if generation_mwh > 0.0 { curtailed_mwh / generation_mwh } else { 0.0 },
        generation_cost_eur: generation_cost,
        electrolyzer_cost_eur: electrolyzer_cost,
        battery_cost_eur: battery_cost,
        water,
        annual_cost_eur: annual_cost,
        water_cost_share: if annual_cost > 0.0 { water.cost_eur / annual_cost } else { 0.0 },
        lcoh_eur_per_kg: annual_cost / h2_kg,
        binding_ceilings: binding,
        dispatch,
    }
}

/// Storage-free design for fixed capacities: the electrolyzer is sized by clipping.
/// Returns `None` when the capacities cannot reach the target.
pub fn fixed_mix_design(inputs: &RegionSystemInputs, capacities_mw: &[f64], h2_kg: f64) -> Option<SystemDesign> {
    let target_total = h2_kg * inputs.efficiency_kwh_per_kg / 1000.0 * inputs.years();
    let profiles: Vec<&[f64]> = inputs.generators.iter().map(|g| g.profile.capacity_factor.as_slice()).collect();
    let gen = generation_series(capacities_mw, &profiles);
    let e = min_electrolyzer_mw(&gen, target_total)?;
    let p: Vec<f64> = gen.iter().map(|g| g.min(e)).collect();
    let unit_output = inputs
        .generators
        .iter()
        .zip(capacities_mw)
        .map(|(g, &c)| g.profile.capacity_factor.iter().map(|cf| cf * c).collect())
        .collect();
    Some(assemble(
        inputs,
        h2_kg,
        capacities_mw.to_vec(),
        unit_output,
        e,
        (0.0, 0.0),
        Dispatch {
            generation_mw: gen,
            electrolyzer_mw: p,
            ..Default::default()
        },
    ))
}
