//! Groundwater sustainable yield, desalination plus transport cost, and water supply curves.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodata::{RasterGrid, Region};
use crate::numeric::CompensatedSum;
use crate::res_sim::annuity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    Conservative,
    Medium,
    Extreme,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 3] = [ScenarioName::Conservative, ScenarioName::Medium, ScenarioName::Extreme];

    /// Share of recharge left for supplementary use after environmental flow.
    pub fn supplementary_share(self) -> f64 {
        match self {
            ScenarioName::Conservative => 0.10,
            ScenarioName::Medium => 0.40,
            ScenarioName::Extreme => 0.70,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::Conservative => "conservative",
            ScenarioName::Medium => "medium",
            ScenarioName::Extreme => "extreme",
        }
    }
}

impl FromStr for ScenarioName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conservative" => Ok(ScenarioName::Conservative),
            "medium" => Ok(ScenarioName::Medium),
            "extreme" => Ok(ScenarioName::Extreme),
            o => Err(Error::Input(format!("unknown water scenario '{o}'"))),
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Climate {
    Rcp26,
    Rcp85,
}

impl Climate {
    pub fn as_str(self) -> &'static str {
        match self {
            Climate::Rcp26 => "rcp26",
            Climate::Rcp85 => "rcp85",
        }
    }
}

impl FromStr for Climate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rcp26" => Ok(Climate::Rcp26),
            "rcp85" => Ok(Climate::Rcp85),
            o => Err(Error::Input(format!("unknown climate scenario '{o}'"))),
        }
    }
}

impl fmt::Display for Climate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Horizon {
    #[serde(rename = "2020")]
    Y2020,
    #[serde(rename = "2030")]
    Y2030,
    #[serde(rename = "2050")]
    Y2050,
}

impl Horizon {
    pub fn year(self) -> u32 {
        match self {
            Horizon::Y2020 => 2020,
            Horizon::Y2030 => 2030,
            Horizon::Y2050 => 2050,
        }
    }

    /// Years averaged into the horizon's recharge.
    pub fn window(self) -> (u32, u32) {
        match self {
            Horizon::Y2020 => (2015, 2035),
            Horizon::Y2030 => (2015, 2045),
            Horizon::Y2050 => (2036, 2065),
        }
    }

    pub fn from_year(year: u32) -> Result<Self> {
        match year {
            2020 => Ok(Horizon::Y2020),
            2030 => Ok(Horizon::Y2030),
            2050 => Ok(Horizon::Y2050),
            y => Err(Error::Input(format!("no groundwater horizon for {y}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YieldScenario {
    pub name: ScenarioName,
    pub climate: Climate,
    pub horizon: Horizon,
}

impl YieldScenario {
    pub fn supplementary_share(&self) -> f64 {
        self.name.supplementary_share()
    }
}

/// `max(0, share × recharge − consumption)`; consumption is netted after the environmental split.
pub fn sustainable_yield_value(share: f64, recharge_mm: f64, consumption_mm: f64) -> f64 {
    (share * recharge_mm - consumption_mm).max(0.0)
}

pub fn sustainable_yield(recharge_mm: &RasterGrid, consumption_mm: &RasterGrid, scenario: &YieldScenario) -> Result<RasterGrid> {
    recharge_mm.spec.check_aligned(&consumption_mm.spec, "sectoral consumption")?;
    for (name, g) in [("recharge", recharge_mm), ("consumption", consumption_mm)] {
        if let Some(i) = (0..g.cells.len()).find(|&i| g.value(i).is_some_and(|v| v < 0.0)) {
            return Err(Error::Input(format!("{name} is negative at cell {i}")));
        }
    }
    let share = scenario.supplementary_share();
    recharge_mm.zip_with(consumption_mm, "sectoral consumption", |r, c| sustainable_yield_value(share, r, c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaterBudget {
    pub volume_m3_per_year: f64,
    /// Area-weighted mean over cells with data.
    pub mean_mm_per_year: f64,
    /// Region cells without data; they contribute no volume.
    pub nodata_cells: usize,
}

pub fn region_water_budget(sy_mm: &RasterGrid, region: &Region) -> WaterBudget {
    let spec = &sy_mm.spec;
    let mut volume = CompensatedSum::new();
    let mut area = CompensatedSum::new();
    let mut nodata = 0;
    for &i in &region.mask {
        match sy_mm.value(i) {
            Some(v) => {
                let a_m2 = spec.area_km2_at(i) * 1e6;
                volume.add(v * 1e-3 * a_m2);
                area.add(a_m2);
            }
            None => nodata += 1,
        }
    }
    let a = area.value();
    WaterBudget {
        volume_m3_per_year: volume.value(),
        mean_mm_per_year: if a > 0.0 { volume.value() / a * 1e3 } else { 0.0 },
        nodata_cells: nodata,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DesalParams {
    pub desal_base_eur_per_m3: f64,
    /// Pipeline investment per (m³/a of capacity) per km.
    pub pipeline_capex_eur_per_m3a_km: f64,
    pub pipeline_lifetime_years: u32,
    pub pipeline_wacc: f64,
    pub friction_kwh_per_m3_km: f64,
    pub pump_efficiency: f64,
}

impl Default for DesalParams {
    fn default() -> Self {
        DesalParams {
            desal_base_eur_per_m3: 0.70,
            pipeline_capex_eur_per_m3a_km: 0.0135,
            pipeline_lifetime_years: 40,
            pipeline_wacc: 0.08,
            friction_kwh_per_m3_km: 0.0003,
            pump_efficiency: 0.75,
        }
    }
}

const RHO_WATER: f64 = 1000.0;
const GRAVITY: f64 = 9.81;

/// Pumping energy for lifting one m³ by `elevation_gain_m` (no credit for descent).
pub fn lift_energy_kwh_per_m3(elevation_gain_m: f64, pump_efficiency: f64) -> f64 {
    RHO_WATER * GRAVITY * elevation_gain_m.max(0.0) / (3.6e6 * pump_efficiency)
}

pub fn desal_transport_cost(distance_to_coast_km: f64, elevation_gain_m: f64, electricity_price_eur_per_kwh: f64, p: &DesalParams) -> Result<f64> {
    if !(distance_to_coast_km >= 0.0 && distance_to_coast_km.is_finite()) {
        return Err(Error::Input(format!("distance to coast must be >= 0, got {distance_to_coast_km}")));
    }
    if !elevation_gain_m.is_finite() || !(electricity_price_eur_per_kwh >= 0.0) {
        return Err(Error::Input("elevation gain and electricity price must be finite, price >= 0".into()));
    }
    if !(p.pump_efficiency > 0.0 && p.pump_efficiency <= 1.0) {
        return Err(Error::Input("pump efficiency must lie in (0,1]".into()));
    }
    let pipeline = p.pipeline_capex_eur_per_m3a_km * distance_to_coast_km * annuity(p.pipeline_wacc, p.pipeline_lifetime_years);
    let energy = lift_energy_kwh_per_m3(elevation_gain_m, p.pump_efficiency) + p.friction_kwh_per_m3_km * distance_to_coast_km;
    Ok(p.desal_base_eur_per_m3 + pipeline + electricity_price_eur_per_kwh * energy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupplyKind {
    Groundwater,
    Desalination,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaterSupplyOption {
    pub kind: SupplyKind,
    /// Annual cap; infinite for desalination.
    pub annual_volume_m3: f64,
    pub cost_eur_per_m3: f64,
}

/// Options sorted by ascending cost; groundwater first on equal cost.
pub fn supply_curve(groundwater_cost_eur_per_m3: f64, groundwater_cap_m3: f64, desal_cost_eur_per_m3: f64) -> Result<Vec<WaterSupplyOption>> {
    if !(desal_cost_eur_per_m3 > 0.0) || !(groundwater_cost_eur_per_m3 > 0.0) {
        return Err(Error::Input("water costs must be positive".into()));
    }
    if !(groundwater_cap_m3 >= 0.0) {
        return Err(Error::Input("groundwater cap must be >= 0".into()));
    }
    let mut v = vec![
        WaterSupplyOption {
            kind: SupplyKind::Groundwater,
            annual_volume_m3: groundwater_cap_m3,
            cost_eur_per_m3: groundwater_cost_eur_per_m3,
        },
        WaterSupplyOption {
            kind: SupplyKind::Desalination,
            annual_volume_m3: f64::INFINITY,
            cost_eur_per_m3: desal_cost_eur_per_m3,
        },
    ];
    v.sort_by(|a, b| a.cost_eur_per_m3.total_cmp(&b.cost_eur_per_m3));
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WaterDraw {
    pub groundwater_m3: f64,
    pub desalination_m3: f64,
    pub cost_eur: f64,
}

impl WaterDraw {
    pub fn blended_cost_eur_per_m3(&self) -> f64 {
        let v = self.groundwater_m3 + self.desalination_m3;
        if v > 0.0 { self.cost_eur / v } else { 0.0 }
    }
}

/// Fills `volume_m3` from the cheapest options first.
pub fn draw_water(options: &[WaterSupplyOption], volume_m3: f64) -> WaterDraw {
    let mut left = volume_m3.max(0.0);
    let mut d = WaterDraw::default();
    for o in options {
        if left <= 0.0 {
            break;
        }
        let take = left.min(o.annual_volume_m3);
        d.cost_eur += take * o.cost_eur_per_m3;
        match o.kind {
            SupplyKind::Groundwater => d.groundwater_m3 += take,
            SupplyKind::Desalination => d.desalination_m3 += take,
        }
        left -= take;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodata::GridSpec;

    #[test]
    fn angola_like_cell() {
        let v: Vec<f64> = ScenarioName::ALL
            .iter()
            .map(|s| sustainable_yield_value(s.supplementary_share(), 303.3, 0.53))
            .collect();
        assert!((v[0] - 29.8).abs() < 0.05);
        assert!((v[1] - 120.8).abs() < 0.05);
        assert!((v[2] - 211.8).abs() < 0.05);
    }

    #[test]
    fn clamps_at_zero() {
        assert_eq!(sustainable_yield_value(0.7, 0.0, 0.0), 0.0);
        assert_eq!(sustainable_yield_value(0.7, 10.0, 7.5), 0.0);
    }

    #[test]
    fn unit_budget() {
        let spec = GridSpec::new(1, 1, 0.0, -0.0045, 0.009).unwrap();
        let area_m2 = spec.cell_area_m2(0);
        let sy = RasterGrid::filled(spec, 34.9);
        let r = Region::from_mask("r", "AAA", vec![0], &spec).unwrap();
        let b = region_water_budget(&sy, &r);
        assert!((b.volume_m3_per_year - 34.9e-3 * area_m2).abs() < 1e-6);
        assert!((b.mean_mm_per_year - 34.9).abs() < 1e-9);
    }

    #[test]
    fn coastal_plant_is_base_cost() {
        let p = DesalParams::default();
        assert_eq!(desal_transport_cost(0.0, 0.0, 0.05, &p).unwrap(), p.desal_base_eur_per_m3);
        assert!(desal_transport_cost(-1.0, 0.0, 0.05, &p).is_err());
    }

    #[test]
    fn lift_term() {
        let e = lift_energy_kwh_per_m3(300.0, 0.75) * 0.05;
        assert!((e - 0.0545).abs() < 1e-4);
        assert_eq!(lift_energy_kwh_per_m3(-50.0, 0.75), 0.0);
    }

    #[test]
    fn two_segment_draw() {
        let c = supply_curve(0.30, 1e6, 1.10).unwrap();
        let d = draw_water(&c, 1.5e6);
        assert!((d.cost_eur - (1e6 * 0.30 + 0.5e6 * 1.10)).abs() < 1e-6);
        let c = supply_curve(0.30, 0.0, 1.10).unwrap();
        assert_eq!(draw_water(&c, 10.0).desalination_m3, 10.0);
        let c = supply_curve(2.0, 1e6, 1.10).unwrap();
        assert_eq!(c[0].kind, SupplyKind::Desalination);
        assert_eq!(draw_water(&c, 10.0).groundwater_m3, 0.0);
    }
}
