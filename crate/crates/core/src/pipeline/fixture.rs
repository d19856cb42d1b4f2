//! Synthetic, seeded study area: every input file a run needs plus a config.toml.
//!
//! 48 x 36 cells of 0.1 degree, 12 rectangular regions in three countries, three years
//! of hourly weather per region.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::json;

use super::artifacts::{write_csv, write_json, write_text, DemandRow, HydroRow, ResourceRow};
use crate::error::{Error, Result};
use crate::geodata::{save_raster_auto, GridSpec, RasterGrid, DEFAULT_NODATA};
use crate::res_sim::{WeatherSeries, HOURS_PER_YEAR};
use crate::socio::CountryScalars;

pub const FIXTURE_COLS: usize = 48;
pub const FIXTURE_ROWS: usize = 36;
const CELL: f64 = 0.1;
const ORIGIN: (f64, f64) = (0.0, 10.0);
const BLOCK: usize = 12;
const YEARS: usize = 3;
const COUNTRIES: [&str; 3] = ["XAA", "XBB", "XCC"];

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureSummary {
    pub config_path: PathBuf,
    pub regions: Vec<String>,
    pub countries: Vec<String>,
    pub hours: usize,
}

fn country_of(block_col: usize) -> &'static str {
    COUNTRIES[block_col.saturating_sub(1).min(2)]
}

fn region_id(block_row: usize, block_col: usize) -> String {
    format!("{}_{:02}", country_of(block_col), block_row * 4 + block_col + 1)
}

fn mkdir(p: &Path) -> Result<()> {
    fs::create_dir_all(p).map_err(|e| Error::io(p, e))
}

fn grid(spec: GridSpec, f: impl Fn(usize, usize) -> f64) -> RasterGrid {
    let mut g = RasterGrid::filled(spec, DEFAULT_NODATA);
    for r in 0..spec.n_rows {
        for c in 0..spec.n_cols {
            g.cells[spec.index(r, c)] = f(r, c);
        }
    }
    g
}

/// Hourly weather with a diurnal sun, daily cloud cover and a wind that peaks at night.
fn weather(rng: &mut ChaCha8Rng, wind_mean: f64, lat: f64) -> Result<WeatherSeries> {
    let n = YEARS * HOURS_PER_YEAR;
    let noise = Normal::new(0.0, 1.0).map_err(|e| Error::Contract(e.to_string()))?;
    let (mut ghi, mut temp, mut wind) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut cloud: f64 = 0.0;
    let mut gust: f64 = 0.0;
    let mut year_shift: f64 = 0.0;
    for h in 0..n {
        if h % HOURS_PER_YEAR == 0 {
            year_shift = 0.04 * noise.sample(rng);
        }
        let day = (h / 24) % 365;
        let t = (h % 24) as f64 + 0.5;
        if h % 24 == 0 {
            cloud = 0.6 * cloud + 0.4 * noise.sample(rng);
        }
        gust = 0.9 * gust + 0.3 * noise.sample(rng);
        let season = (2.0 * PI * (day as f64 - 172.0) / 365.0).cos();
        let sun = (PI * (t - 6.0) / 12.0).sin().max(0.0);
        let clear = 1000.0 * sun * (0.9 + 0.06 * season - 0.002 * (lat - 10.0));
        let clearness = (0.78 - 0.15 * cloud + year_shift).clamp(0.2, 1.0);
        ghi.push((clear * clearness).max(0.0));
        temp.push(24.0 + 4.0 * season + 6.0 * sun - 2.0 * cloud + 0.5 * noise.sample(rng));
        let diurnal = 1.0 + 0.25 * (2.0 * PI * (t - 3.0) / 24.0).cos();
        wind.push((wind_mean * (1.0 + year_shift) * diurnal * (1.0 + 0.35 * gust + 0.1 * cloud)).max(0.0));
    }
    WeatherSeries::new(0, ghi, temp, wind, 10.0)
}

/// Writes the study area below `out_dir` and returns where the config is.
pub fn write_fixture(seed: u64, out_dir: &Path) -> Result<FixtureSummary> {
    let spec = GridSpec::new(FIXTURE_COLS, FIXTURE_ROWS, ORIGIN.0, ORIGIN.1, CELL)?;
    for d in ["rasters", "weather", "hydro", "water"] {
        mkdir(&out_dir.join(d))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = |rng: &mut ChaCha8Rng, a: f64| rng.gen_range(-a..=a);

    // Boundaries: 3 x 4 blocks of 12 x 12 cells, block column 0-1 in XAA.
    let top = ORIGIN.1 + FIXTURE_ROWS as f64 * CELL;
    let mut features = Vec::new();
    let mut regions = Vec::new();
    for br in 0..3 {
        for bc in 0..4 {
            let id = region_id(br, bc);
            let x0 = ORIGIN.0 + (bc * BLOCK) as f64 * CELL;
            let x1 = x0 + BLOCK as f64 * CELL;
            let y1 = top - (br * BLOCK) as f64 * CELL;
            let y0 = y1 - BLOCK as f64 * CELL;
            features.push(json!({
                "type": "Feature",
                "properties": { "gid": id, "country": country_of(bc) },
                "geometry": { "type": "Polygon", "coordinates": [[[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]] },
            }));
            regions.push((id, br, bc));
        }
    }
    write_json(&out_dir.join("boundaries.geojson"), &json!({ "type": "FeatureCollection", "features": features }))?;

    // Exclusion features.
    let (pa_r, pa_c) = (rng.gen_range(6..14usize), rng.gen_range(6..14usize));
    let protected = grid(spec, |r, c| {
        let d2 = (r as f64 - pa_r as f64).powi(2) + (c as f64 - pa_c as f64).powi(2);
        f64::from(d2 <= 16.0)
    });
    let lake = grid(spec, |r, c| f64::from((20..24).contains(&r) && (30..36).contains(&c)));
    let road_row = rng.gen_range(14..22usize);
    let roads = grid(spec, |r, c| f64::from(r == road_row || c == 26));
    let towns: Vec<(usize, usize)> = (0..6).map(|_| (rng.gen_range(0..FIXTURE_ROWS), rng.gen_range(0..FIXTURE_COLS))).collect();
    let mut settlements = grid(spec, |r, c| f64::from(towns.contains(&(r, c))));
    // a strip of unknown land cover
    for r in 30..36 {
        settlements.cells[spec.index(r, 47)] = DEFAULT_NODATA;
    }
    let rasters = out_dir.join("rasters");
    for (name, g) in [("protected", &protected), ("lakes", &lake), ("roads", &roads), ("settlements", &settlements)] {
        save_raster_auto(g, rasters.join(format!("{name}.asc")))?;
    }

    // Resource factors: irradiance rises eastward, wind rises southward.
    let ghi_f = grid(spec, |_, c| 0.9 + 0.2 * c as f64 / FIXTURE_COLS as f64);
    let mut wf = Vec::with_capacity(spec.len());
    for r in 0..FIXTURE_ROWS {
        for _ in 0..FIXTURE_COLS {
            wf.push(0.8 + 0.4 * r as f64 / FIXTURE_ROWS as f64 + jitter(&mut rng, 0.05));
        }
    }
    let wind_f = RasterGrid::new(spec, DEFAULT_NODATA, wf)?;
    let elevation = grid(spec, |r, c| 20.0 + 15.0 * c as f64 + 5.0 * r as f64);
    let coast = grid(spec, |r, c| {
        let (lat, lon) = (spec.row_center_lat(r), spec.col_center_lon(c));
        lon * 111.32 * (lat.to_radians()).cos() + 5.0
    });
    for (name, g) in [("ghi_factor", &ghi_f), ("wind_factor", &wind_f), ("elevation", &elevation), ("coast_distance_km", &coast)] {
        save_raster_auto(g, rasters.join(format!("{name}.asc")))?;
    }

    // Groundwater: recharge falls eastward, consumption is concentrated near towns.
    let water = out_dir.join("water");
    for (climate, dry) in [("rcp26", 1.0), ("rcp85", 0.85)] {
        for (year, trend) in [(2030, 1.0), (2050, 0.93)] {
            let mut rech = grid(spec, |r, c| (120.0 - 1.8 * c as f64 + 0.5 * r as f64) * dry * trend);
            rech.cells[spec.index(0, 0)] = DEFAULT_NODATA;
            let cons = grid(spec, |r, c| {
                let near = towns.iter().any(|&(tr, tc)| tr.abs_diff(r) <= 2 && tc.abs_diff(c) <= 2);
                (if near { 25.0 } else { 3.0 }) * (1.0 + 0.1 * f64::from(year == 2050))
            });
            save_raster_auto(&rech, water.join(format!("recharge_{climate}_{year}.asc")))?;
            save_raster_auto(&cons, water.join(format!("consumption_{climate}_{year}.asc")))?;
        }
    }

    // Socio-economic layers.
    let mut layer = |f: &dyn Fn(usize, usize) -> f64, noise: f64, lo: f64, hi: f64| {
        let mut g = grid(spec, |r, c| f(r, c));
        for v in &mut g.cells {
            *v = (*v + jitter(&mut rng, noise)).clamp(lo, hi);
        }
        g
    };
    let pop = layer(&|r, c| 20.0 + 2.0 * c as f64 + if towns.contains(&(r, c)) { 800.0 } else { 0.0 }, 5.0, 0.0, 5000.0);
    let elec = layer(&|_, c| 0.2 + 0.6 * c as f64 / FIXTURE_COLS as f64, 0.05, 0.0, 1.0);
    let fuel = layer(&|r, _| 0.1 + 0.5 * r as f64 / FIXTURE_ROWS as f64, 0.05, 0.0, 1.0);
    let labor = layer(&|_, c| 8.0 + 0.9 * c as f64, 1.0, 0.0, 5000.0);
    let biomass = layer(&|r, c| 0.9 - 0.01 * (r + c) as f64, 0.05, 0.0, 1.0);
    let poverty = layer(&|r, _| 0.7 - 0.01 * r as f64, 0.05, 0.0, 1.0);
    for (name, g) in [
        ("population_density", &pop),
        ("electricity_access", &elec),
        ("clean_fuel_access", &fuel),
        ("labor_force_density", &labor),
        ("biomass_dependence", &biomass),
        ("poverty_headcount", &poverty),
    ] {
        save_raster_auto(g, rasters.join(format!("{name}.asc")))?;
    }
    let scalars: Vec<CountryScalars> = COUNTRIES
        .iter()
        .enumerate()
        .map(|(k, c)| CountryScalars {
            iso3: c.to_string(),
            unemployment_rate: 0.06 + 0.04 * k as f64,
            employment_factor_jobs_per_mwp: 1.0 + 0.5 * k as f64,
        })
        .collect();
    write_csv(&out_dir.join("country_scalars.csv"), &scalars)?;
    let demand: Vec<DemandRow> = COUNTRIES
        .iter()
        .enumerate()
        .map(|(k, c)| DemandRow {
            iso3: c.to_string(),
            electricity_twh: 400.0 + 250.0 * k as f64,
            hydrogen_twh: 50.0 * (k + 1) as f64,
        })
        .collect();
    write_csv(&out_dir.join("demand.csv"), &demand)?;

    // Hydro in the north-west, geothermal along the eastern block column.
    let mut resources = Vec::new();
    for (k, (id, br, bc)) in regions.iter().enumerate() {
        let hydro = if *bc <= 1 && *br == 0 { 40.0 + 20.0 * k as f64 } else { 0.0 };
        let geo = if *bc == 3 { 30.0 + 10.0 * *br as f64 } else { 0.0 };
        resources.push(ResourceRow {
            region_id: id.clone(),
            hydro_capacity_mw: hydro,
            geothermal_capacity_mw: geo,
            geothermal_availability: if geo > 0.0 { 0.9 } else { 0.0 },
        });
        if hydro > 0.0 {
            // monthly series, wet season mid-year
            let rows: Vec<HydroRow> = (0..=YEARS * 12)
                .map(|m| HydroRow {
                    time_h: m as f64 * HOURS_PER_YEAR as f64 / 12.0,
                    capacity_factor: (0.45 + 0.25 * (2.0 * PI * (m as f64 - 3.0) / 12.0).sin()).clamp(0.05, 1.0),
                })
                .collect();
            write_csv(&out_dir.join("hydro").join(format!("{id}.csv")), &rows)?;
        }
    }
    write_csv(&out_dir.join("region_resources.csv"), &resources)?;

    for (k, (id, br, bc)) in regions.iter().enumerate() {
        let mut wr = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1000).wrapping_add(k as u64));
        let lat = top - (br * BLOCK + BLOCK / 2) as f64 * CELL;
        let wind_mean = 4.5 + 0.6 * *br as f64 + 0.2 * *bc as f64;
        weather(&mut wr, wind_mean, lat)?.write_csv(out_dir.join("weather").join(format!("{id}.csv")))?;
    }

    write_text(&out_dir.join("config.toml"), CONFIG)?;
    Ok(FixtureSummary {
        config_path: out_dir.join("config.toml"),
        regions: regions.into_iter().map(|r| r.0).collect(),
        countries: COUNTRIES.iter().map(|c| c.to_string()).collect(),
        hours: YEARS * HOURS_PER_YEAR,
    })
}

const CONFIG: &str = r#"year = 2030
output_dir = "out"
steps = [0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 1.0]
map_step = 0.5

[inputs]
boundaries = "boundaries.geojson"
weather_dir = "weather"
region_resources = "region_resources.csv"
hydro_dir = "hydro"
ghi_factor = "rasters/ghi_factor.asc"
wind_factor = "rasters/wind_factor.asc"
elevation = "rasters/elevation.asc"
coast_distance_km = "rasters/coast_distance_km.asc"
recharge = "water/recharge_{climate}_{horizon}.asc"
consumption = "water/consumption_{climate}_{horizon}.asc"
electricity_access = "rasters/electricity_access.asc"
clean_fuel_access = "rasters/clean_fuel_access.asc"
population_density = "rasters/population_density.asc"
labor_force_density = "rasters/labor_force_density.asc"
biomass_dependence = "rasters/biomass_dependence.asc"
poverty_headcount = "rasters/poverty_headcount.asc"
country_scalars = "country_scalars.csv"
demand = "demand.csv"

[[criteria]]
name = "protected_areas"
raster = "rasters/protected.asc"
buffer_m = 0.0

[[criteria]]
name = "water_bodies"
raster = "rasters/lakes.asc"
buffer_m = 500.0  # surrogate default: illustrative buffer

[[criteria]]
name = "roads"
raster = "rasters/roads.asc"
buffer_m = 300.0  # surrogate default: illustrative buffer
technologies = ["wind"]

[[criteria]]
name = "settlements"
raster = "rasters/settlements.asc"
buffer_m = 2000.0  # surrogate default: illustrative buffer

[technology]
battery = true
battery_round_trip_efficiency = 0.92  # surrogate default
site_classes = 3  # surrogate default
weather_ref_height_m = 10.0
hub_height_m = 120.0  # surrogate default
shear_alpha = 0.14  # surrogate default

[technology.densities]
pv = 50.0  # MW/km2
wind = 7.5  # MW/km2, surrogate default: midpoint of the usual range
geothermal = 5.0  # MW/km2, surrogate default

[technology.pv]
performance_ratio = 0.85  # surrogate default
gamma_per_k = -0.0035  # surrogate default
k_noct = 25.0  # surrogate default

[water]
scenario = "medium"
climate = "rcp26"
groundwater_cost_eur_per_m3 = 0.10  # surrogate default
water_use_l_per_kg = 10.0

[water.desal]
desal_base_eur_per_m3 = 0.70
pipeline_capex_eur_per_m3a_km = 0.0135  # surrogate default
pipeline_lifetime_years = 40  # surrogate default
pipeline_wacc = 0.08  # surrogate default
friction_kwh_per_m3_km = 0.0003  # surrogate default
pump_efficiency = 0.75  # surrogate default

[socio]
electricity_access = 0.5  # surrogate default: equal weights
clean_fuel_access = 0.5  # surrogate default: equal weights
composite = [1.0, 1.0, 1.0]  # surrogate default: equal weights
"#;
