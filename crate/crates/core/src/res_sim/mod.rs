//! Hourly capacity factors for PV, wind, hydro and geothermal, and levelized electricity cost.

mod economics;
mod geothermal;
mod hydro;
mod profile;
mod pv;
mod weather;
mod wind;

pub use economics::{annuity, lcoe, CostTable, TechnoEconomics, SUPPORTED_YEARS};
pub use geothermal::geothermal_profile;
pub use hydro::{resample_hydro, trapezoid_mean, MAX_GAP_HOURS};
pub use profile::{realized_full_load_hours, representative_year, GenerationProfile, HOURS_PER_YEAR};
pub use pv::{cell_temperature, pv_capacity_factor, simulate_pv, PvParams};
pub use weather::WeatherSeries;
pub use wind::{simulate_wind, PowerCurve, Turbine};

