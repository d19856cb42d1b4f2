#![allow(dead_code)]

use std::f64::consts::PI;

use h2potential::h2opt::{Battery, Generator, RegionSystemInputs};
use h2potential::res_sim::{CostTable, GenerationProfile};
use h2potential::water::supply_curve;
use h2potential::Technology;

pub const H: usize = 8760;

/// Clear-sky-like day curve with a slow day-to-day wobble.
pub fn pv_cf(peak: f64) -> Vec<f64> {
    (0..H)
        .map(|t| {
            let h = (t % 24) as f64 + 0.5;
            let day = 0.8 + 0.2 * ((t / 24) as f64 * 0.7).sin().abs();
            (peak * (PI * (h - 6.0) / 12.0).sin().max(0.0) * day).clamp(0.0, 1.0)
        })
        .collect()
}

/// Night-peaking wind, high when the sun is down.
pub fn wind_cf(mean: f64, swing: f64) -> Vec<f64> {
    (0..H)
        .map(|t| {
            let h = (t % 24) as f64 + 0.5;
            let v = mean + swing * (2.0 * PI * h / 24.0).cos() + 0.1 * (t as f64 * 0.37).sin();
            v.clamp(0.0, 1.0)
        })
        .collect()
}

pub fn generator(name: &str, tech: Technology, ceiling: f64, cf: Vec<f64>) -> Generator {
    generator_in(2030, name, tech, ceiling, cf)
}

pub fn generator_in(year: u32, name: &str, tech: Technology, ceiling: f64, cf: Vec<f64>) -> Generator {
    let costs = CostTable::defaults(year).unwrap();
    Generator {
        name: name.into(),
        technology: tech,
        ceiling_mw: ceiling,
        profile: GenerationProfile::new(cf).unwrap(),
        costs: costs.generator(tech).clone(),
    }
}

pub fn system(year: u32, generators: Vec<Generator>, battery: bool, water_eur_per_m3: f64) -> RegionSystemInputs {
    let costs = CostTable::defaults(year).unwrap();
    RegionSystemInputs {
        region_id: "T".into(),
        generators,
        electrolyzer: costs.electrolyzer.clone(),
        efficiency_kwh_per_kg: 48.3,
        battery: battery.then(|| Battery {
            energy: costs.battery_energy.clone(),
            power: costs.battery_power.clone(),
            round_trip_efficiency: 0.92,
        }),
        water: supply_curve(water_eur_per_m3, 0.0, water_eur_per_m3).unwrap(),
        water_use_l_per_kg: 10.0,
    }
}
