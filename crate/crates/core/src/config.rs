//! Run configuration: a single TOML file with paths relative to its directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::eligibility::{validate_buffer, CapacityDensities};
use crate::error::{Error, Result};
use crate::h2opt::{default_efficiency_kwh_per_kg, validate_steps, DEFAULT_STEPS, H2_LHV_KWH_PER_KG};
use crate::res_sim::{CostTable, PvParams, TechnoEconomics};
use crate::socio::SocioWeights;
use crate::tech::Technology;
use crate::water::{Climate, DesalParams, Horizon, ScenarioName};

pub const SUPPORTED_RUN_YEARS: [u32; 2] = [2030, 2050];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputPaths {
    pub boundaries: PathBuf,
    /// Directory with one `<region_id>.csv` hourly weather file per region.
    pub weather_dir: PathBuf,
    /// CSV: region_id, hydro_capacity_mw, geothermal_capacity_mw, geothermal_availability.
    pub region_resources: PathBuf,
    /// Directory with `<region_id>.csv` hydro series (time_h, capacity_factor).
    pub hydro_dir: PathBuf,
    pub ghi_factor: PathBuf,
    pub wind_factor: PathBuf,
    pub elevation: PathBuf,
    pub coast_distance_km: PathBuf,
    /// `{climate}` and `{horizon}` are substituted.
    pub recharge: String,
    pub consumption: String,
    pub electricity_access: PathBuf,
    pub clean_fuel_access: PathBuf,
    pub population_density: PathBuf,
    pub labor_force_density: PathBuf,
    pub biomass_dependence: PathBuf,
    pub poverty_headcount: PathBuf,
    pub country_scalars: PathBuf,
    /// CSV: iso3, electricity_twh, hydrogen_twh.
    pub demand: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionConfig {
    pub name: String,
    pub raster: PathBuf,
    pub buffer_m: f64,
    #[serde(default = "land_technologies")]
    pub technologies: Vec<Technology>,
}

fn land_technologies() -> Vec<Technology> {
    vec![Technology::Pv, Technology::Wind, Technology::Geothermal]
}

/// Overrides of single cost-table entries.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostOverride {
    pub capex_eur_per_kw: Option<f64>,
    pub opex_share_per_year: Option<f64>,
    pub lifetime_years: Option<u32>,
    pub wacc: Option<f64>,
}

impl CostOverride {
    fn apply(&self, te: &mut TechnoEconomics) {
        if let Some(v) = self.capex_eur_per_kw {
            te.capex_eur_per_kw = v;
        }
        if let Some(v) = self.opex_share_per_year {
            te.opex_share_per_year = v;
        }
        if let Some(v) = self.lifetime_years {
            te.lifetime_years = v;
        }
        if let Some(v) = self.wacc {
            te.wacc = v;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TechnologyConfig {
    /// kWh per kg; the year's default when absent.
    pub efficiency_kwh_per_kg: Option<f64>,
    pub battery: bool,
    pub battery_round_trip_efficiency: f64,
    /// Quality classes per land technology and region.
    pub site_classes: usize,
    pub densities: CapacityDensities,
    pub weather_ref_height_m: f64,
    pub hub_height_m: f64,
    pub shear_alpha: f64,
    /// CSV power curve (speed_ms, power_kw); default cubic 4.2 MW curve when absent.
    pub power_curve: Option<PathBuf>,
    pub pv: PvParams,
    /// Keys: pv, wind, hydro, geothermal, electrolyzer, battery_energy, battery_power.
    pub costs: BTreeMap<String, CostOverride>,
}

impl Default for TechnologyConfig {
    fn default() -> Self {
        TechnologyConfig {
            efficiency_kwh_per_kg: None,
            battery: true,
            battery_round_trip_efficiency: 0.92,
            site_classes: 3,
            densities: CapacityDensities::default(),
            weather_ref_height_m: 10.0,
            hub_height_m: 120.0,
            shear_alpha: 0.14,
            power_curve: None,
            pv: PvParams::default(),
            costs: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaterConfig {
    pub scenario: ScenarioName,
    pub climate: Climate,
    pub groundwater_cost_eur_per_m3: f64,
    pub water_use_l_per_kg: f64,
    pub desal: DesalParams,
}

impl Default for WaterConfig {
    fn default() -> Self {
        WaterConfig {
            scenario: ScenarioName::Medium,
            climate: Climate::Rcp26,
            groundwater_cost_eur_per_m3: 0.10,
            water_use_l_per_kg: 10.0,
            desal: DesalParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub year: u32,
    pub output_dir: PathBuf,
    pub steps: Vec<f64>,
    /// Worker threads; 0 uses all cores.
    pub threads: usize,
    /// Curve step shown on the LCOH map.
    pub map_step: f64,
    /// Restrict the run to these region ids.
    pub regions: Option<Vec<String>>,
    pub inputs: InputPaths,
    pub criteria: Vec<CriterionConfig>,
    pub technology: TechnologyConfig,
    pub water: WaterConfig,
    pub socio: SocioWeights,
    /// Directory the relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Command-line overrides applied after parsing.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub year: Option<u32>,
    pub scenario: Option<ScenarioName>,
    pub climate: Option<Climate>,
    pub threads: Option<usize>,
}

impl Overrides {
    /// Stable text form, part of the run fingerprint.
    pub fn fingerprint(&self) -> String {
        format!(
            "year={:?};scenario={:?};climate={:?}",
            self.year, self.scenario, self.climate
        )
    }
}

fn take<T: DeserializeOwned>(table: &mut toml::Table, key: &str, failures: &mut Vec<String>) -> Option<T> {
    let v = table.remove(key)?;
    match v.try_into::<T>() {
        Ok(t) => Some(t),
        Err(e) => {
            failures.push(format!("{key}: {}", e.message().trim()));
            None
        }
    }
}

impl RunConfig {
    /// Parses and checks types; returns every failure found.
    pub fn parse(text: &str, base_dir: &Path) -> std::result::Result<RunConfig, Vec<String>> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| vec![format!("syntax: {}", e.message())])?;
        let mut f = Vec::new();
        let year = take(&mut table, "year", &mut f).unwrap_or(2030);
        let output_dir = take(&mut table, "output_dir", &mut f).unwrap_or_else(|| PathBuf::from("out"));
        let steps = take(&mut table, "steps", &mut f).unwrap_or_else(|| DEFAULT_STEPS.to_vec());
        let threads = take(&mut table, "threads", &mut f).unwrap_or(0);
        let map_step = take(&mut table, "map_step", &mut f).unwrap_or(0.5);
        let regions = take(&mut table, "regions", &mut f);
        let inputs = if table.contains_key("inputs") {
            take::<InputPaths>(&mut table, "inputs", &mut f)
        } else {
            f.push("inputs: missing section".into());
            None
        };
        let criteria = take(&mut table, "criteria", &mut f).unwrap_or_default();
        let technology = take(&mut table, "technology", &mut f).unwrap_or_default();
        let water = take(&mut table, "water", &mut f).unwrap_or_default();
        let socio = take(&mut table, "socio", &mut f).unwrap_or_default();
        for k in table.keys() {
            f.push(format!("{k}: unknown key"));
        }
        match (inputs, f.is_empty()) {
            (Some(inputs), true) => Ok(RunConfig {
                year,
                output_dir,
                steps,
                threads,
                map_step,
                regions,
                inputs,
                criteria,
                technology,
                water,
                socio,
                base_dir: base_dir.to_path_buf(),
            }),
            _ => Err(f),
        }
    }

    pub fn load(path: &Path) -> Result<std::result::Result<RunConfig, Vec<String>>> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self::parse(&text, &base))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.output_dir {
            self.output_dir = v.clone();
        }
        if let Some(v) = o.year {
            self.year = v;
        }
        if let Some(v) = o.scenario {
            self.water.scenario = v;
        }
        if let Some(v) = o.climate {
            self.water.climate = v;
        }
        if let Some(v) = o.threads {
            self.threads = v;
        }
    }

    pub fn resolve(&self, p: impl AsRef<Path>) -> PathBuf {
        let p = p.as_ref();
        if p.is_absolute() { p.to_path_buf() } else { self.base_dir.join(p) }
    }

    pub fn output_path(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }

    pub fn horizon(&self) -> Result<Horizon> {
        Horizon::from_year(self.year)
    }

    fn template(&self, t: &str) -> PathBuf {
        let horizon = self.year.to_string();
        self.resolve(t.replace("{climate}", self.water.climate.as_str()).replace("{horizon}", &horizon))
    }

    pub fn recharge_path(&self) -> PathBuf {
        self.template(&self.inputs.recharge)
    }

    pub fn consumption_path(&self) -> PathBuf {
        self.template(&self.inputs.consumption)
    }

    pub fn efficiency_kwh_per_kg(&self) -> Result<f64> {
        match self.technology.efficiency_kwh_per_kg {
            Some(v) => Ok(v),
            None => default_efficiency_kwh_per_kg(self.year),
        }
    }

    /// Default cost table of the run year with overrides applied.
    pub fn cost_table(&self) -> Result<CostTable> {
        let mut t = CostTable::defaults(self.year)?;
        for (k, o) in &self.technology.costs {
            let te = match k.as_str() {
                "pv" => &mut t.pv,
                "wind" => &mut t.wind,
                "hydro" => &mut t.hydro,
                "geothermal" => &mut t.geothermal,
                "electrolyzer" => &mut t.electrolyzer,
                "battery_energy" => &mut t.battery_energy,
                "battery_power" => &mut t.battery_power,
                other => return Err(Error::Config(vec![format!("technology.costs.{other}: unknown component")])),
            };
            o.apply(te);
        }
        t.validate()?;
        Ok(t)
    }

    /// Every input file the run reads, keyed by config key.
    pub fn input_files(&self) -> Vec<(String, PathBuf)> {
        let i = &self.inputs;
        let mut v: Vec<(String, PathBuf)> = [
            ("inputs.boundaries", &i.boundaries),
            ("inputs.region_resources", &i.region_resources),
            ("inputs.ghi_factor", &i.ghi_factor),
            ("inputs.wind_factor", &i.wind_factor),
            ("inputs.elevation", &i.elevation),
            ("inputs.coast_distance_km", &i.coast_distance_km),
            ("inputs.electricity_access", &i.electricity_access),
            ("inputs.clean_fuel_access", &i.clean_fuel_access),
            ("inputs.population_density", &i.population_density),
            ("inputs.labor_force_density", &i.labor_force_density),
            ("inputs.biomass_dependence", &i.biomass_dependence),
            ("inputs.poverty_headcount", &i.poverty_headcount),
            ("inputs.country_scalars", &i.country_scalars),
            ("inputs.demand", &i.demand),
        ]
        .into_iter()
        .map(|(k, p)| (k.to_string(), self.resolve(p)))
        .collect();
        v.push(("inputs.recharge".into(), self.recharge_path()));
        v.push(("inputs.consumption".into(), self.consumption_path()));
        for (k, c) in self.criteria.iter().enumerate() {
            v.push((format!("criteria[{k}].raster"), self.resolve(&c.raster)));
        }
        if let Some(p) = &self.technology.power_curve {
            v.push(("technology.power_curve".into(), self.resolve(p)));
        }
        v
    }

    /// Range and existence checks; lists all failures.
    pub fn validate(&self) -> Vec<String> {
        let mut f = Vec::new();
        if !SUPPORTED_RUN_YEARS.contains(&self.year) {
            f.push(format!("year: {} is not one of {:?}", self.year, SUPPORTED_RUN_YEARS));
        }
        if self.steps.iter().any(|s| !(*s > 0.0 && *s <= 1.0)) {
            f.push("steps: steps must lie in (0,1]".into());
        } else if let Err(e) = validate_steps(&self.steps) {
            f.push(format!("steps: {e}"));
        }
        if !self.steps.iter().any(|s| *s == self.map_step) {
            f.push(format!("map_step: {} is not one of the steps", self.map_step));
        }
        if let Some(r) = &self.regions {
            if r.is_empty() {
                f.push("regions: the region selection is empty".into());
            }
        }
        for (key, p) in self.input_files() {
            if !p.is_file() {
                f.push(format!("{key}: file not found: {}", p.display()));
            }
        }
        for (key, d) in [("inputs.weather_dir", &self.inputs.weather_dir), ("inputs.hydro_dir", &self.inputs.hydro_dir)] {
            if !self.resolve(d).is_dir() {
                f.push(format!("{key}: directory not found: {}", self.resolve(d).display()));
            }
        }
        let mut names = std::collections::BTreeSet::new();
        for (k, c) in self.criteria.iter().enumerate() {
            if let Err(e) = validate_buffer(&c.name, c.buffer_m) {
                f.push(format!("criteria[{k}].buffer_m: {e}"));
            }
            if !names.insert(&c.name) {
                f.push(format!("criteria[{k}].name: duplicate name '{}'", c.name));
            }
            if c.technologies.iter().any(|t| !t.is_land_placed()) {
                f.push(format!("criteria[{k}].technologies: hydro is not land-placed"));
            }
        }
        let t = &self.technology;
        if let Some(e) = t.efficiency_kwh_per_kg {
            if !(e >= H2_LHV_KWH_PER_KG) {
                f.push(format!("technology.efficiency_kwh_per_kg: must be >= {H2_LHV_KWH_PER_KG}"));
            }
        }
        if !(t.battery_round_trip_efficiency > 0.0 && t.battery_round_trip_efficiency <= 1.0) {
            f.push("technology.battery_round_trip_efficiency: must lie in (0,1]".into());
        }
        if t.site_classes == 0 {
            f.push("technology.site_classes: must be >= 1".into());
        }
        for (k, d) in [("pv", t.densities.pv), ("wind", t.densities.wind), ("geothermal", t.densities.geothermal)] {
            if !(d > 0.0 && d.is_finite()) {
                f.push(format!("technology.densities.{k}: must be positive"));
            }
        }
        if !(t.hub_height_m > 0.0 && t.weather_ref_height_m > 0.0) {
            f.push("technology: heights must be positive".into());
        }
        if !(t.shear_alpha >= 0.0 && t.shear_alpha < 1.0) {
            f.push("technology.shear_alpha: must lie in [0,1)".into());
        }
        if SUPPORTED_RUN_YEARS.contains(&self.year) {
            if let Err(e) = self.cost_table() {
                f.push(format!("technology.costs: {e}"));
            }
        }
        let w = &self.water;
        if !(w.groundwater_cost_eur_per_m3 > 0.0) {
            f.push("water.groundwater_cost_eur_per_m3: must be positive".into());
        }
        if !(w.water_use_l_per_kg >= 0.0) {
            f.push("water.water_use_l_per_kg: must be >= 0".into());
        }
        if !(w.desal.pump_efficiency > 0.0 && w.desal.pump_efficiency <= 1.0) {
            f.push("water.desal.pump_efficiency: must lie in (0,1]".into());
        }
        if let Err(e) = self.socio.validate() {
            f.push(format!("socio: {e}"));
        }
        f
    }
}
