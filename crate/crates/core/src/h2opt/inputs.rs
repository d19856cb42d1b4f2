use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::res_sim::{GenerationProfile, TechnoEconomics, HOURS_PER_YEAR};
use crate::tech::Technology;
use crate::water::{SupplyKind, WaterSupplyOption};

/// Lower heating value of hydrogen.
pub const H2_LHV_KWH_PER_KG: f64 = 33.33;

/// Electrolyzer consumption per kg; calibrated so that LHV / consumption ≈ 0.69 in 2030.
pub fn default_efficiency_kwh_per_kg(year: u32) -> Result<f64> {
    match year {
        2020 => Ok(50.0),
        2030 => Ok(48.3),
        2040 => Ok(46.0),
        2050 => Ok(44.0),
        y => Err(Error::Input(format!("no default electrolyzer efficiency for {y}"))),
    }
}

/// H₂ (LHV) obtained per unit of electricity.
pub fn energy_ratio(efficiency_kwh_per_kg: f64) -> f64 {
    H2_LHV_KWH_PER_KG / efficiency_kwh_per_kg
}

pub fn kg_to_twh(kg: f64) -> f64 {
    kg * H2_LHV_KWH_PER_KG * 1e-9
}

pub fn twh_to_kg(twh: f64) -> f64 {
    twh * 1e9 / H2_LHV_KWH_PER_KG
}

/// One generation option of a region, e.g. one site-quality class of one technology.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub name: String,
    pub technology: Technology,
    pub ceiling_mw: f64,
    pub profile: GenerationProfile,
    pub costs: TechnoEconomics,
}

impl Generator {
    /// Geothermal output can be dispatched anywhere below its availability.
    pub fn dispatchable(&self) -> bool {
        self.technology == Technology::Geothermal
    }

    pub fn annual_energy_mwh_at_ceiling(&self) -> f64 {
        self.ceiling_mw * self.profile.mean_cf * HOURS_PER_YEAR as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Battery {
    /// Capex per kWh of storage.
    pub energy: TechnoEconomics,
    /// Capex per kW of charge/discharge power.
    pub power: TechnoEconomics,
    pub round_trip_efficiency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionSystemInputs {
    pub region_id: String,
    pub generators: Vec<Generator>,
    pub electrolyzer: TechnoEconomics,
    pub efficiency_kwh_per_kg: f64,
    pub battery: Option<Battery>,
    /// Cheapest first.
    pub water: Vec<WaterSupplyOption>,
    pub water_use_l_per_kg: f64,
}

impl RegionSystemInputs {
    pub fn validate(&self) -> Result<()> {
        if self.generators.is_empty() {
            return Err(Error::Input(format!("region '{}' has no generators", self.region_id)));
        }
        let hours = self.hours();
        if hours == 0 || hours % HOURS_PER_YEAR != 0 {
            return Err(Error::Input(format!("profiles must cover whole years, got {hours} h")));
        }
        for g in &self.generators {
            if g.profile.hours() != hours {
                return Err(Error::Input(format!("generator '{}' profile length differs", g.name)));
            }
            if !(g.ceiling_mw >= 0.0 && g.ceiling_mw.is_finite()) {
                return Err(Error::Input(format!("generator '{}' ceiling must be finite and >= 0", g.name)));
            }
            g.costs.validate()?;
        }
        if !(self.efficiency_kwh_per_kg >= H2_LHV_KWH_PER_KG && self.efficiency_kwh_per_kg.is_finite()) {
            return Err(Error::Input(format!(
                "electrolyzer consumption {} kWh/kg is below the {H2_LHV_KWH_PER_KG} kWh/kg LHV floor",
                self.efficiency_kwh_per_kg
            )));
        }
        self.electrolyzer.validate()?;
        if let Some(b) = &self.battery {
            b.energy.validate()?;
            b.power.validate()?;
            if !(b.round_trip_efficiency > 0.0 && b.round_trip_efficiency <= 1.0) {
                return Err(Error::Input("battery round-trip efficiency must lie in (0,1]".into()));
            }
        }
        if !(self.water_use_l_per_kg >= 0.0) {
            return Err(Error::Input("water use must be >= 0".into()));
        }
        Ok(())
    }

    pub fn hours(&self) -> usize {
        self.generators.first().map(|g| g.profile.hours()).unwrap_or(0)
    }

    pub fn years(&self) -> f64 {
        self.hours() as f64 / HOURS_PER_YEAR as f64
    }

    /// Annual electricity available with every generator at its ceiling, MWh.
    pub fn max_generation_mwh(&self) -> f64 {
        crate::numeric::sum(self.generators.iter().map(Generator::annual_energy_mwh_at_ceiling))
    }

    /// Largest annual hydrogen output, kg.
    pub fn max_h2_kg(&self) -> f64 {
        self.max_generation_mwh() * 1000.0 / self.efficiency_kwh_per_kg
    }

    pub fn groundwater_cap_m3(&self) -> f64 {
        self.water
            .iter()
            .filter(|o| o.kind == SupplyKind::Groundwater)
            .map(|o| o.annual_volume_m3)
            .sum()
    }

    pub fn water_volume_m3(&self, h2_kg: f64) -> f64 {
        h2_kg * self.water_use_l_per_kg / 1000.0
    }
}

/// Maximum hydrogen potential in TWh/a (LHV): all generable electricity converted.
pub fn max_h2_potential(inputs: &RegionSystemInputs) -> f64 {
    inputs.max_generation_mwh() * energy_ratio(inputs.efficiency_kwh_per_kg) * 1e-6
}

/// Same conversion for an electricity total given directly in TWh.
pub fn h2_potential_from_generation_twh(generation_twh: f64, efficiency_kwh_per_kg: f64) -> f64 {
    generation_twh * energy_ratio(efficiency_kwh_per_kg)
}
