use crate::error::{Error, Result};
use crate::numeric;

pub const HOURS_PER_YEAR: usize = 8760;

/// Hourly capacity factors in [0, 1] with cached mean and full-load hours.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationProfile {
    pub capacity_factor: Vec<f64>,
    pub mean_cf: f64,
    pub full_load_hours: f64,
}

impl GenerationProfile {
    pub fn new(capacity_factor: Vec<f64>) -> Result<Self> {
        if capacity_factor.is_empty() {
            return Err(Error::Input("generation profile is empty".into()));
        }
        if let Some((i, v)) = capacity_factor
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::Input(format!("capacity factor {v} at hour {i} outside [0,1]")));
        }
        let mean_cf = numeric::mean(&capacity_factor);
        Ok(GenerationProfile {
            capacity_factor,
            mean_cf,
            full_load_hours: mean_cf * HOURS_PER_YEAR as f64,
        })
    }

    /// Flat profile at `cf` for `hours` hours.
    pub fn flat(cf: f64, hours: usize) -> Result<Self> {
        Self::new(vec![cf; hours])
    }

    pub fn hours(&self) -> usize {
        self.capacity_factor.len()
    }

    /// Number of whole years covered.
    pub fn years(&self) -> usize {
        self.capacity_factor.len() / HOURS_PER_YEAR
    }

    pub fn year_means(&self) -> Vec<f64> {
        self.capacity_factor
            .chunks_exact(HOURS_PER_YEAR)
            .map(numeric::mean)
            .collect()
    }

    pub fn year(&self, k: usize) -> Result<GenerationProfile> {
        let lo = k * HOURS_PER_YEAR;
        let hi = lo + HOURS_PER_YEAR;
        if hi > self.capacity_factor.len() {
            return Err(Error::Input(format!("profile has no year {k}")));
        }
        GenerationProfile::new(self.capacity_factor[lo..hi].to_vec())
    }

    /// Concatenates several profiles in order.
    pub fn concat(parts: &[GenerationProfile]) -> Result<GenerationProfile> {
        GenerationProfile::new(parts.iter().flat_map(|p| p.capacity_factor.iter().copied()).collect())
    }
}

/// Index of the year whose mean is the (lower) median; ties go to the earliest year.
pub fn representative_year(year_means: &[f64]) -> usize {
    assert!(!year_means.is_empty(), "no years to choose from");
    let mut idx: Vec<usize> = (0..year_means.len()).collect();
    idx.sort_by(|&a, &b| year_means[a].total_cmp(&year_means[b]).then(a.cmp(&b)));
    idx[(idx.len() - 1) / 2]
}

/// Realized full-load hours per year of an hourly output series against a capacity.
pub fn realized_full_load_hours(output_mw: &[f64], capacity_mw: f64) -> f64 {
    if capacity_mw <= 0.0 || output_mw.is_empty() {
        return 0.0;
    }
    let years = output_mw.len() as f64 / HOURS_PER_YEAR as f64;
    numeric::sum(output_mw.iter().copied()) / capacity_mw / years
}
