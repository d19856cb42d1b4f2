//! Socio-economic sub-indicators, their composite, and per-country statistics.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodata::{GridSpec, RasterGrid, Region};
use crate::numeric::{quantile_sorted, sorted};

/// Per-country scalars keyed by ISO3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryScalars {
    pub iso3: String,
    pub unemployment_rate: f64,
    pub employment_factor_jobs_per_mwp: f64,
}

pub fn load_country_scalars(path: impl AsRef<Path>) -> Result<BTreeMap<String, CountryScalars>> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let mut out = BTreeMap::new();
    for (k, rec) in rdr.deserialize::<CountryScalars>().enumerate() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        if !(0.0..=1.0).contains(&rec.unemployment_rate) {
            return Err(Error::parse(path.display().to_string(), k + 2, "unemployment_rate outside [0,1]"));
        }
        if !(rec.employment_factor_jobs_per_mwp >= 0.0) {
            return Err(Error::parse(path.display().to_string(), k + 2, "employment factor must be >= 0"));
        }
        if out.insert(rec.iso3.clone(), rec).is_some() {
            return Err(Error::parse(path.display().to_string(), k + 2, "duplicate ISO3 code"));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SocioInputs {
    pub electricity_access: RasterGrid,
    pub clean_fuel_access: RasterGrid,
    pub population_density: RasterGrid,
    pub unemployment_rate: RasterGrid,
    pub labor_force_density: RasterGrid,
    pub employment_factor: RasterGrid,
    pub biomass_dependence: RasterGrid,
    pub poverty_headcount: RasterGrid,
}

impl SocioInputs {
    pub fn validate(&self) -> Result<()> {
        let spec = self.electricity_access.spec;
        let fractions = [
            ("electricity_access", &self.electricity_access),
            ("clean_fuel_access", &self.clean_fuel_access),
            ("unemployment_rate", &self.unemployment_rate),
            ("biomass_dependence", &self.biomass_dependence),
            ("poverty_headcount", &self.poverty_headcount),
        ];
        let non_negative = [
            ("population_density", &self.population_density),
            ("labor_force_density", &self.labor_force_density),
            ("employment_factor", &self.employment_factor),
        ];
        for (name, g) in fractions.iter().chain(non_negative.iter()) {
            spec.check_aligned(&g.spec, name)?;
        }
        for (name, g) in fractions {
            if let Some(v) = g.cells.iter().find(|&&v| !g.is_nodata(v) && !(0.0..=1.0).contains(&v)) {
                return Err(Error::Input(format!("{name} holds {v}, outside [0,1]")));
            }
        }
        for (name, g) in non_negative {
            if let Some(v) = g.cells.iter().find(|&&v| !g.is_nodata(v) && v < 0.0) {
                return Err(Error::Input(format!("{name} holds negative value {v}")));
            }
        }
        Ok(())
    }
}

/// Spreads a per-country scalar over the cells of each region; cells outside
/// every region or in countries without a value are nodata.
pub fn country_scalar_grid(spec: GridSpec, regions: &[Region], values: &BTreeMap<String, f64>) -> RasterGrid {
    let mut g = RasterGrid::filled(spec, f64::NAN);
    g.nodata = f64::NAN;
    for r in regions {
        if let Some(&v) = values.get(&r.country_code) {
            for &i in &r.mask {
                g.cells[i] = v;
            }
        }
    }
    g
}

/// Configurable weights (surrogate defaults).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SocioWeights {
    pub electricity_access: f64,
    pub clean_fuel_access: f64,
    pub composite: [f64; 3],
}

impl Default for SocioWeights {
    fn default() -> Self {
        SocioWeights {
            electricity_access: 0.5,
            clean_fuel_access: 0.5,
            composite: [1.0, 1.0, 1.0],
        }
    }
}

impl SocioWeights {
    pub fn validate(&self) -> Result<()> {
        let (we, wf) = (self.electricity_access, self.clean_fuel_access);
        if !(we >= 0.0 && wf >= 0.0 && ((we + wf) - 1.0).abs() < 1e-9) {
            return Err(Error::Input("access weights must be >= 0 and sum to 1".into()));
        }
        if self.composite.iter().any(|w| !(*w >= 0.0)) || self.composite.iter().sum::<f64>() <= 0.0 {
            return Err(Error::Input("composite weights must be >= 0 with a positive sum".into()));
        }
        Ok(())
    }
}

/// People lacking blended energy access per km².
pub fn energy_access_indicator(inputs: &SocioInputs, weights: &SocioWeights) -> Result<RasterGrid> {
    let blended = inputs
        .electricity_access
        .zip_with(&inputs.clean_fuel_access, "clean_fuel_access", |e, f| {
            weights.electricity_access * e + weights.clean_fuel_access * f
        })?;
    blended.zip_with(&inputs.population_density, "population_density", |b, d| (1.0 - b) * d)
}

/// Jobs potential: employment factor × unemployment × labor-force density, scaled by
/// installable density relative to its maximum over the extent.
pub fn macroeconomic_indicator(inputs: &SocioInputs, installable_density_mwp_per_km2: &RasterGrid) -> Result<RasterGrid> {
    let dens = installable_density_mwp_per_km2;
    let max = dens
        .cells
        .iter()
        .filter(|&&v| !dens.is_nodata(v))
        .copied()
        .fold(0.0, f64::max);
    let rel = dens.map(|v| if max > 0.0 { v / max } else { 0.0 });
    let labor = inputs
        .employment_factor
        .zip_with(&inputs.unemployment_rate, "unemployment_rate", |ef, ur| ef * ur)?
        .zip_with(&inputs.labor_force_density, "labor_force_density", |a, l| a * l)?;
    labor.zip_with(&rel, "installable_density", |a, r| a * r)
}

pub fn other_effects_indicator(inputs: &SocioInputs) -> Result<RasterGrid> {
    inputs
        .biomass_dependence
        .zip_with(&inputs.poverty_headcount, "poverty_headcount", |b, p| 0.5 * (b + p))
}

/// Min-max normalization to [0, 100]; a constant layer maps to 50.
pub fn normalize_0_100(grid: &RasterGrid) -> (RasterGrid, Option<String>) {
    let vals = grid.cells.iter().filter(|&&v| !grid.is_nodata(v));
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(hi > lo) {
        return (grid.map(|_| 50.0), Some("constant sub-indicator contributes its midpoint 50".into()));
    }
    (grid.map(|v| ((v - lo) / (hi - lo) * 100.0).clamp(0.0, 100.0)), None)
}

/// Weighted mean of the normalized sub-indicators, plus warnings for constant layers.
pub fn composite_indicator(
    ae: &RasterGrid,
    me: &RasterGrid,
    oe: &RasterGrid,
    weights: [f64; 3],
) -> Result<(RasterGrid, Vec<String>)> {
    let wsum: f64 = weights.iter().sum();
    if weights.iter().any(|w| !(*w >= 0.0)) || !(wsum > 0.0) {
        return Err(Error::Input("composite weights must be >= 0 with a positive sum".into()));
    }
    let mut warnings = Vec::new();
    let mut norm = Vec::with_capacity(3);
    for (name, g) in [("AE", ae), ("ME", me), ("OE", oe)] {
        let (n, w) = normalize_0_100(g);
        if let Some(w) = w {
            warnings.push(format!("{name}: {w}"));
        }
        norm.push(n);
    }
    let ab = norm[0].zip_with(&norm[1], "ME", |a, b| weights[0] * a + weights[1] * b)?;
    let c = ab.zip_with(&norm[2], "OE", |ab, c| ((ab + weights[2] * c) / wsum).clamp(0.0, 100.0))?;
    Ok((c, warnings))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorStats {
    pub country: String,
    pub cells: usize,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub iqr: f64,
}

impl IndicatorStats {
    pub fn from_values(country: &str, values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let s = sorted(values);
        let q25 = quantile_sorted(&s, 0.25);
        let q75 = quantile_sorted(&s, 0.75);
        Some(IndicatorStats {
            country: country.to_string(),
            cells: s.len(),
            median: quantile_sorted(&s, 0.5),
            q25,
            q75,
            iqr: q75 - q25,
        })
    }
}

/// Median and quartiles over the valid cells of each country's regions, sorted by ISO3.
/// Countries without any valid cell are skipped.
pub fn regional_stats(indicator: &RasterGrid, regions: &[Region]) -> Vec<IndicatorStats> {
    let mut by_country: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in regions {
        let e = by_country.entry(r.country_code.as_str()).or_default();
        e.extend(r.mask.iter().filter_map(|&i| indicator.value(i)));
    }
    by_country
        .into_iter()
        .filter_map(|(c, v)| IndicatorStats::from_values(c, &v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize) -> GridSpec {
        GridSpec::new(n, 1, 0.0, 0.0, 0.1).unwrap()
    }

    fn grid(v: &[f64]) -> RasterGrid {
        RasterGrid::new(spec(v.len()), f64::NAN, v.to_vec()).unwrap()
    }

    fn inputs(n: usize) -> SocioInputs {
        let g = |x: f64| grid(&vec![x; n]);
        SocioInputs {
            electricity_access: g(0.42),
            clean_fuel_access: g(0.42),
            population_density: g(110.0),
            unemployment_rate: g(0.1),
            labor_force_density: g(50.0),
            employment_factor: g(5.9),
            biomass_dependence: g(0.4),
            poverty_headcount: g(0.6),
        }
    }

    #[test]
    fn energy_access_arithmetic() {
        let mut i = inputs(3);
        i.electricity_access = grid(&[0.42, 1.0, 0.3]);
        i.clean_fuel_access = grid(&[0.42, 1.0, 0.3]);
        i.population_density = grid(&[110.0, 500.0, 0.0]);
        let ae = energy_access_indicator(&i, &SocioWeights::default()).unwrap();
        assert!((ae.cells[0] - 63.8).abs() < 1e-9);
        assert_eq!(ae.cells[1], 0.0);
        assert_eq!(ae.cells[2], 0.0);
    }

    #[test]
    fn other_effects_is_mean() {
        let oe = other_effects_indicator(&inputs(1)).unwrap();
        assert!((oe.cells[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn macro_indicator_is_linear_in_labor() {
        let i = inputs(2);
        let dens = grid(&[10.0, 5.0]);
        let me = macroeconomic_indicator(&i, &dens).unwrap();
        let mut j = i.clone();
        j.labor_force_density = grid(&[100.0, 100.0]);
        let me2 = macroeconomic_indicator(&j, &dens).unwrap();
        for k in 0..2 {
            assert!((me2.cells[k] - 2.0 * me.cells[k]).abs() < 1e-12);
        }
        assert!((me.cells[0] - 5.9 * 0.1 * 50.0).abs() < 1e-12);
        assert!((me.cells[1] - 0.5 * me.cells[0]).abs() < 1e-12);
    }

    #[test]
    fn composite_extremes_and_constant_layer() {
        let ae = grid(&[0.0, 10.0, 5.0]);
        let me = grid(&[3.0, 1.0, 2.0]);
        let oe = grid(&[0.2, 0.1, 0.3]);
        let (c, w) = composite_indicator(&ae, &me, &oe, [1.0; 3]).unwrap();
        assert!(w.is_empty());
        assert!((c.cells[1] - 100.0 / 3.0).abs() < 1e-9);
        let (c, w) = composite_indicator(&ae, &grid(&[1.0; 3]), &ae, [1.0; 3]).unwrap();
        assert_eq!(w.len(), 1);
        assert!((c.cells[0] - 50.0 / 3.0).abs() < 1e-9);
        assert!((c.cells[1] - 250.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn stats_per_country() {
        let s = spec(5);
        let g = grid(&[1.0, 2.0, 3.0, 4.0, f64::NAN]);
        let regions = vec![
            Region::from_mask("b", "BBB", vec![2, 3, 4], &s).unwrap(),
            Region::from_mask("a", "AAA", vec![0], &s).unwrap(),
            Region::from_mask("b2", "BBB", vec![1], &s).unwrap(),
        ];
        let st = regional_stats(&g, &regions);
        assert_eq!(st[0].country, "AAA");
        assert_eq!((st[0].median, st[0].iqr), (1.0, 0.0));
        assert_eq!(st[1].cells, 3);
        assert_eq!(st[1].median, 3.0);
        assert_eq!(st[1].q25, 2.5);
        assert_eq!(st[1].iqr, st[1].q75 - st[1].q25);
    }

    #[test]
    fn fractions_out_of_range_rejected() {
        let mut i = inputs(2);
        i.poverty_headcount = grid(&[0.5, 1.5]);
        assert!(i.validate().is_err());
        assert!(inputs(2).validate().is_ok());
    }
}
