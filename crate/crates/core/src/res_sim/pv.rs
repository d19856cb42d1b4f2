use serde::{Deserialize, Serialize};

use super::profile::GenerationProfile;
use super::weather::WeatherSeries;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PvParams {
    pub performance_ratio: f64,
    /// Power temperature coefficient per kelvin.
    pub gamma_per_k: f64,
    /// Cell heating above ambient at 800 W/m².
    pub k_noct: f64,
}

impl Default for PvParams {
    fn default() -> Self {
        PvParams {
            performance_ratio: 0.85,
            gamma_per_k: -0.0035,
            k_noct: 25.0,
        }
    }
}

pub fn cell_temperature(ghi: f64, air_temp_c: f64, p: &PvParams) -> f64 {
    air_temp_c + p.k_noct * ghi / 800.0
}

pub fn pv_capacity_factor(ghi: f64, air_temp_c: f64, p: &PvParams) -> f64 {
    let t_cell = cell_temperature(ghi, air_temp_c, p);
    ((ghi / 1000.0) * p.performance_ratio * (1.0 + p.gamma_per_k * (t_cell - 25.0))).clamp(0.0, 1.0)
}

pub fn simulate_pv(weather: &WeatherSeries, params: &PvParams) -> Result<GenerationProfile> {
    if let Some(i) = weather.ghi_w_per_m2.iter().position(|&g| g < 0.0) {
        return Err(Error::Input(format!("negative ghi at hour {i}")));
    }
    let cf = weather
        .ghi_w_per_m2
        .iter()
        .zip(&weather.air_temp_c)
        .map(|(&g, &t)| pv_capacity_factor(g, t, params))
        .collect();
    GenerationProfile::new(cf)
}
