//! Buffered exclusion criteria, eligible land and capacity placement.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodata::{distance_to_feature, GridSpec, Mask, RasterGrid, Region, DEFAULT_NODATA};
use crate::numeric::CompensatedSum;
use crate::tech::Technology;

/// Installable capacity per km² of eligible land.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CapacityDensities {
    pub pv: f64,
    pub wind: f64,
    pub geothermal: f64,
}

impl Default for CapacityDensities {
    fn default() -> Self {
        CapacityDensities {
            pv: 50.0,
            wind: 7.5,
            geothermal: 5.0,
        }
    }
}

impl CapacityDensities {
    pub fn get(&self, tech: Technology) -> Option<f64> {
        match tech {
            Technology::Pv => Some(self.pv),
            Technology::Wind => Some(self.wind),
            Technology::Geothermal => Some(self.geothermal),
            Technology::Hydro => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub name: String,
    pub technology: Technology,
    pub buffer_m: f64,
    pub feature: Mask,
    /// Cells whose feature state is unknown (nodata in the source raster). Never eligible.
    pub unknown: Mask,
}

pub fn validate_buffer(name: &str, buffer_m: f64) -> Result<()> {
    if !buffer_m.is_finite() || buffer_m < 0.0 {
        return Err(Error::Input(format!(
            "criterion '{name}': buffer_m must be finite and >= 0, got {buffer_m}"
        )));
    }
    Ok(())
}

impl Criterion {
    pub fn new(name: &str, technology: Technology, buffer_m: f64, feature: Mask) -> Result<Self> {
        let unknown = Mask::empty(feature.spec);
        Self::with_unknown(name, technology, buffer_m, feature, unknown)
    }

    pub fn with_unknown(
        name: &str,
        technology: Technology,
        buffer_m: f64,
        feature: Mask,
        unknown: Mask,
    ) -> Result<Self> {
        validate_buffer(name, buffer_m)?;
        if !technology.is_land_placed() {
            return Err(Error::Input(format!(
                "criterion '{name}': {technology} is not sited by land eligibility"
            )));
        }
        feature.spec.check_aligned(&unknown.spec, name)?;
        Ok(Criterion {
            name: name.to_string(),
            technology,
            buffer_m,
            feature,
            unknown,
        })
    }

    /// Feature cells are the non-zero cells of `raster`; nodata cells become unknown.
    pub fn from_raster(name: &str, technology: Technology, buffer_m: f64, raster: &RasterGrid) -> Result<Self> {
        Self::with_unknown(
            name,
            technology,
            buffer_m,
            Mask::from_raster(raster),
            Mask::nodata_of(raster),
        )
    }

    /// Excluded cells over the whole grid.
    pub fn exclusion(&self) -> Result<Mask> {
        apply_criterion(self, &distance_to_feature(&self.feature))
    }
}

/// Excluded where the cell is a feature cell, lies strictly closer than the buffer, or is unknown.
pub fn apply_criterion(criterion: &Criterion, distance_field: &RasterGrid) -> Result<Mask> {
    validate_buffer(&criterion.name, criterion.buffer_m)?;
    criterion
        .feature
        .spec
        .check_aligned(&distance_field.spec, &criterion.name)?;
    let cells = distance_field
        .cells
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            criterion.feature.cells[i]
                || criterion.unknown.cells[i]
                || distance_field.is_nodata(d)
                || d < criterion.buffer_m
        })
        .collect();
    Mask::new(criterion.feature.spec, cells)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EligibilityResult {
    pub eligible: Mask,
    /// Share of region land excluded by each criterion alone, sorted by name.
    pub per_criterion_excluded_share: Vec<(String, f64)>,
    pub eligible_share: f64,
    pub eligible_area_km2: f64,
    pub region_area_km2: f64,
}

/// Eligibility of one region given precomputed full-grid exclusion masks.
pub fn evaluate_region(region: &Region, spec: &GridSpec, exclusions: &[(String, Mask)]) -> Result<EligibilityResult> {
    if region.mask.is_empty() {
        return Err(Error::Contract(format!("region '{}' has an empty mask", region.id)));
    }
    let mut names = BTreeSet::new();
    for (name, m) in exclusions {
        spec.check_aligned(&m.spec, name)?;
        if !names.insert(name.as_str()) {
            return Err(Error::Input(format!("criterion name '{name}' is not unique")));
        }
    }
    let mut land = CompensatedSum::new();
    let mut eligible_area = CompensatedSum::new();
    let mut excluded: Vec<CompensatedSum> = vec![CompensatedSum::new(); exclusions.len()];
    let mut eligible = Mask::empty(*spec);
    for &i in &region.mask {
        let a = spec.area_km2_at(i);
        land.add(a);
        let mut any = false;
        for (k, (_, m)) in exclusions.iter().enumerate() {
            if m.cells[i] {
                excluded[k].add(a);
                any = true;
            }
        }
        if !any {
            eligible.cells[i] = true;
            eligible_area.add(a);
        }
    }
    let land = land.value();
    let mut shares: Vec<(String, f64)> = exclusions
        .iter()
        .zip(&excluded)
        .map(|((n, _), s)| (n.clone(), s.value() / land))
        .collect();
    shares.sort_by(|a, b| a.0.cmp(&b.0));
    let eligible_area_km2 = eligible_area.value();
    Ok(EligibilityResult {
        eligible,
        per_criterion_excluded_share: shares,
        eligible_share: (eligible_area_km2 / land).clamp(0.0, 1.0),
        eligible_area_km2,
        region_area_km2: land,
    })
}

/// Applies every criterion and combines the exclusions over the region's land.
pub fn combine_exclusions(criteria: &[Criterion], region: &Region, spec: &GridSpec) -> Result<EligibilityResult> {
    let exclusions = criteria
        .iter()
        .map(|c| {
            spec.check_aligned(&c.feature.spec, &c.name)?;
            Ok((c.name.clone(), c.exclusion()?))
        })
        .collect::<Result<Vec<_>>>()?;
    evaluate_region(region, spec, &exclusions)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementSet {
    pub technology: Technology,
    pub capacity_mw_per_cell: RasterGrid,
    pub total_capacity_mw: f64,
}

pub fn capacity_for_area_mw(area_km2: f64, density_mw_per_km2: f64) -> f64 {
    area_km2 * density_mw_per_km2
}

/// Puts `density × cell area` on every eligible cell.
pub fn place_capacity(result: &EligibilityResult, technology: Technology, density_mw_per_km2: f64) -> Result<PlacementSet> {
    if !(density_mw_per_km2 > 0.0 && density_mw_per_km2.is_finite()) {
        return Err(Error::Input(format!(
            "capacity density must be positive, got {density_mw_per_km2}"
        )));
    }
    let spec = result.eligible.spec;
    let mut total = CompensatedSum::new();
    let cells = result
        .eligible
        .cells
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            if e {
                let mw = capacity_for_area_mw(spec.area_km2_at(i), density_mw_per_km2);
                total.add(mw);
                mw
            } else {
                0.0
            }
        })
        .collect();
    Ok(PlacementSet {
        technology,
        capacity_mw_per_cell: RasterGrid::new(spec, DEFAULT_NODATA, cells)?,
        total_capacity_mw: total.value(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equator_spec(n: usize) -> GridSpec {
        let half = n as f64 * 0.01 / 2.0;
        GridSpec::new(n, n, 0.0, -half, 0.01).unwrap()
    }

    #[test]
    fn zero_buffer_excludes_feature_only() {
        let spec = equator_spec(5);
        let c = Criterion::new("Airports", Technology::Pv, 0.0, Mask::from_indices(spec, &[12])).unwrap();
        let ex = c.exclusion().unwrap();
        assert_eq!(ex.indices(), vec![12]);
    }

    #[test]
    fn disc_buffer_matches_brute_force() {
        let spec = equator_spec(21);
        let centre = spec.index(10, 10);
        let c = Criterion::new("Settlements", Technology::Wind, 1500.0, Mask::from_indices(spec, &[centre])).unwrap();
        let ex = c.exclusion().unwrap();
        for i in 0..spec.len() {
            let (r, col) = spec.row_col(i);
            let d = spec.center_distance_m(r, 10, col.abs_diff(10));
            assert_eq!(ex.cells[i], d < 1500.0, "cell {i}");
        }
        assert!(ex.count() > 1);
    }

    #[test]
    fn infinite_buffer_rejected() {
        let spec = equator_spec(2);
        assert!(Criterion::new("x", Technology::Pv, f64::INFINITY, Mask::empty(spec)).is_err());
        assert!(Criterion::new("x", Technology::Pv, -1.0, Mask::empty(spec)).is_err());
    }

    #[test]
    fn empty_and_full_stacks() {
        let spec = equator_spec(4);
        let region = Region::from_mask("r", "AAA", (0..16).collect(), &spec).unwrap();
        let r = combine_exclusions(&[], &region, &spec).unwrap();
        assert_eq!(r.eligible_share, 1.0);
        let all = Criterion::new("all", Technology::Pv, 0.0, Mask::from_indices(spec, &(0..16).collect::<Vec<_>>())).unwrap();
        let r = combine_exclusions(&[all], &region, &spec).unwrap();
        assert_eq!(r.eligible_share, 0.0);
        assert_eq!(r.per_criterion_excluded_share[0].1, 1.0);
    }

    #[test]
    fn nodata_feature_cells_are_not_eligible() {
        let spec = equator_spec(2);
        let raster = RasterGrid::new(spec, -9999.0, vec![0.0, -9999.0, 0.0, 0.0]).unwrap();
        let c = Criterion::from_raster("slope", Technology::Pv, 0.0, &raster).unwrap();
        let region = Region::from_mask("r", "AAA", vec![0, 1, 2, 3], &spec).unwrap();
        let r = combine_exclusions(&[c], &region, &spec).unwrap();
        assert_eq!(r.eligible.indices(), vec![0, 2, 3]);
    }

    #[test]
    fn placement_totals_and_empty_region() {
        let spec = equator_spec(3);
        let region = Region::from_mask("r", "AAA", (0..9).collect(), &spec).unwrap();
        let r = combine_exclusions(&[], &region, &spec).unwrap();
        let p = place_capacity(&r, Technology::Pv, 50.0).unwrap();
        let expect = 50.0 * r.eligible_area_km2;
        assert!((p.total_capacity_mw - expect).abs() / expect < 1e-12);

        let all = Criterion::new("all", Technology::Pv, 1e6, Mask::from_indices(spec, &[0])).unwrap();
        let r = combine_exclusions(&[all], &region, &spec).unwrap();
        let p = place_capacity(&r, Technology::Pv, 50.0).unwrap();
        assert_eq!(p.total_capacity_mw, 0.0);
        assert!(place_capacity(&r, Technology::Pv, 0.0).is_err());
    }
}
