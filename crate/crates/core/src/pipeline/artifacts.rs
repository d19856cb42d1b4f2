//! Row types of the stage CSV files and small file helpers.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tech::Technology;

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| Error::csv(path, e))).collect()
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_json(path: &Path, v: &serde_json::Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Structural(e.to_string()))?;
    s.push('\n');
    write_text(path, &s)
}

pub fn write_warnings(dir: &Path, warnings: &[String]) -> Result<()> {
    let mut s = warnings.join("\n");
    if !s.is_empty() {
        s.push('\n');
    }
    write_text(&dir.join("warnings.txt"), &s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub region_id: String,
    pub country: String,
    pub cells: usize,
    pub area_km2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EligibilityRow {
    pub region_id: String,
    pub technology: Technology,
    pub region_area_km2: f64,
    pub eligible_area_km2: f64,
    pub eligible_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionShareRow {
    pub region_id: String,
    pub technology: Technology,
    pub criterion: String,
    pub excluded_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementRow {
    pub region_id: String,
    pub technology: Technology,
    pub eligible_area_km2: f64,
    pub capacity_mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteClassRow {
    pub region_id: String,
    pub generator: String,
    pub technology: Technology,
    pub class: usize,
    pub cells: usize,
    pub capacity_mw: f64,
    /// Resource scaling (irradiance or wind-speed factor), or availability for geothermal.
    pub quality_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorRow {
    pub region_id: String,
    pub generator: String,
    pub technology: Technology,
    pub ceiling_mw: f64,
    pub mean_cf: f64,
    pub full_load_hours: f64,
    pub lcoe_eur_per_kwh: Option<f64>,
    pub representative_year: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRow {
    pub region_id: String,
    pub representative_year: usize,
    pub generation_twh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaterRow {
    pub region_id: String,
    pub sy_volume_m3: f64,
    pub sy_mean_mm: f64,
    pub sy_nodata_cells: usize,
    pub groundwater_cost_eur_per_m3: f64,
    pub coast_distance_km: f64,
    pub elevation_m: f64,
    pub electricity_price_eur_per_kwh: f64,
    pub desal_cost_eur_per_m3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub region_id: String,
    pub country: String,
    pub max_potential_twh: f64,
    pub step: f64,
    pub h2_kg: f64,
    pub h2_twh: f64,
    pub lcoh_eur_per_kg: f64,
    pub electrolyzer_mw: f64,
    pub curtailed_share: f64,
    pub water_cost_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRow {
    pub region_id: String,
    pub step: f64,
    pub component: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaterShareRow {
    pub region_id: String,
    pub step: f64,
    pub groundwater_cap_m3: f64,
    pub feasible_share: f64,
    pub demand_m3: f64,
    pub groundwater_m3: f64,
    pub desalination_m3: f64,
    pub water_cost_eur: f64,
    pub water_cost_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NationalRow {
    pub country: String,
    pub rank: usize,
    pub region_id: String,
    pub step: f64,
    pub quantity_twh: f64,
    pub cumulative_twh: f64,
    pub lcoh_eur_per_kg: f64,
    pub reserved_twh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepMeanRow {
    pub country: String,
    pub step: f64,
    pub quantity_twh: f64,
    pub weighted_lcoh_eur_per_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetAsideRow {
    pub country: String,
    pub potential_twh: f64,
    pub reserved_twh: f64,
    pub reserved_percent: f64,
    pub exceeds_potential: bool,
    pub exportable_twh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub indicator: String,
    pub country: String,
    pub cells: usize,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub iqr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandRow {
    pub iso3: String,
    pub electricity_twh: f64,
    pub hydrogen_twh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceRow {
    pub region_id: String,
    pub hydro_capacity_mw: f64,
    pub geothermal_capacity_mw: f64,
    pub geothermal_availability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HydroRow {
    pub time_h: f64,
    pub capacity_factor: f64,
}

/// Hourly profiles of one region: an `hour` column followed by one column per generator.
pub fn write_profiles(path: &Path, names: &[String], columns: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    let mut header = vec!["hour".to_string()];
    header.extend(names.iter().cloned());
    w.write_record(&header).map_err(|e| Error::csv(path, e))?;
    let hours = columns.first().map(Vec::len).unwrap_or(0);
    let mut rec = Vec::with_capacity(names.len() + 1);
    for t in 0..hours {
        rec.clear();
        rec.push(t.to_string());
        rec.extend(columns.iter().map(|c| c[t].to_string()));
        w.write_record(&rec).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_profiles(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let header = r.headers().map_err(|e| Error::csv(path, e))?.clone();
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut cols = vec![Vec::new(); names.len()];
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        for (j, c) in cols.iter_mut().enumerate() {
            let v: f64 = rec
                .get(j + 1)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::parse(path.display().to_string(), k + 2, format!("bad value in column {}", j + 1)))?;
            c.push(v);
        }
    }
    Ok((names, cols))
}
