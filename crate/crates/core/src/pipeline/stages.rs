use std::collections::BTreeMap;
use std::fmt::Write;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde_json::Value;

use super::artifacts::*;
use super::svg::{choropleth, curve_chart, Series};
use super::Stage;
use crate::config::RunConfig;
use crate::eligibility::{evaluate_region, Criterion};
use crate::error::{Error, Result};
use crate::geodata::{
    boundaries_to_geojson, load_boundaries, load_raster_auto, rasterize_regions, save_raster_auto, GridSpec, Mask,
    RasterGrid, Region, RegionBoundary, DEFAULT_NODATA,
};
use crate::h2opt::{
    aggregate_national, cost_potential_curve, demand_set_aside, groundwater_feasible_share, Battery, CostPotentialCurve,
    CurvePoint, DemandInput, Generator, RegionSystemInputs,
};
use crate::numeric::{mean, sorted, CompensatedSum};
use crate::res_sim::{
    geothermal_profile, lcoe, representative_year, resample_hydro, simulate_pv, simulate_wind, GenerationProfile,
    PowerCurve, Turbine, WeatherSeries, HOURS_PER_YEAR,
};
use crate::socio::{
    composite_indicator, country_scalar_grid, energy_access_indicator, load_country_scalars, macroeconomic_indicator,
    other_effects_indicator, regional_stats, SocioInputs,
};
use crate::tech::Technology;
use crate::water::{desal_transport_cost, region_water_budget, supply_curve, sustainable_yield, YieldScenario};

const LAND: [Technology; 3] = [Technology::Pv, Technology::Wind, Technology::Geothermal];

/// Grid, boundaries and regions shared by all stages.
struct Context {
    spec: GridSpec,
    boundaries: Vec<RegionBoundary>,
    /// Sorted by id; regions without cells are dropped.
    regions: Vec<Region>,
    warnings: Vec<String>,
}

fn context(cfg: &RunConfig) -> Result<Context> {
    let spec = load_raster_auto(cfg.resolve(&cfg.inputs.ghi_factor))?.spec;
    let mut boundaries = load_boundaries(cfg.resolve(&cfg.inputs.boundaries))?;
    if let Some(sel) = &cfg.regions {
        for id in sel {
            if !boundaries.iter().any(|b| &b.id == id) {
                return Err(Error::Input(format!("selected region '{id}' is not in the boundaries")));
            }
        }
        boundaries.retain(|b| sel.contains(&b.id));
    }
    if boundaries.is_empty() {
        return Err(Error::Input("no regions to process".into()));
    }
    let assign = rasterize_regions(&boundaries, &spec);
    let mut warnings = assign.warnings;
    let mut regions: Vec<Region> = assign
        .regions
        .into_iter()
        .filter(|r| {
            if r.mask.is_empty() {
                warnings.push(format!("region '{}' skipped: no cells", r.id));
            }
            !r.mask.is_empty()
        })
        .collect();
    regions.sort_by(|a, b| a.id.cmp(&b.id));
    boundaries.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(Context {
        spec,
        boundaries,
        regions,
        warnings,
    })
}

fn raster(cfg: &RunConfig, path: impl AsRef<Path>, spec: &GridSpec, name: &str) -> Result<RasterGrid> {
    let g = load_raster_auto(cfg.resolve(path))?;
    spec.check_aligned(&g.spec, name)?;
    Ok(g)
}

fn stage_raster(out: &Path, s: Stage, file: &str, spec: &GridSpec) -> Result<RasterGrid> {
    let g = load_raster_auto(out.join(s.dir_name()).join(file))?;
    spec.check_aligned(&g.spec, file)?;
    Ok(g)
}

/// Raster with `value(i)` on region cells and nodata elsewhere.
fn region_raster(ctx: &Context, value: impl Fn(usize) -> f64) -> RasterGrid {
    let mut g = RasterGrid::filled(ctx.spec, DEFAULT_NODATA);
    for r in &ctx.regions {
        for &i in &r.mask {
            g.cells[i] = value(i);
        }
    }
    g
}

fn region_mean(grid: &RasterGrid, region: &Region) -> f64 {
    let v: Vec<f64> = region.mask.iter().filter_map(|&i| grid.value(i)).collect();
    mean(&v)
}

pub(super) fn run(stage: Stage, cfg: &RunConfig, dir: &Path, out: &Path) -> Result<Vec<String>> {
    let ctx = context(cfg)?;
    let mut w = ctx.warnings.clone();
    match stage {
        Stage::Eligibility => eligibility(cfg, &ctx, dir, &mut w)?,
        Stage::Placement => placement(cfg, &ctx, dir, out, &mut w)?,
        Stage::Simulation => simulation(cfg, &ctx, dir, out, &mut w)?,
        Stage::Water => water(cfg, &ctx, dir, out, &mut w)?,
        Stage::Optimization => optimization(cfg, &ctx, dir, out, &mut w)?,
        Stage::SetAside => set_aside(cfg, &ctx, dir, out, &mut w)?,
        Stage::Socio => socio(cfg, &ctx, dir, out, &mut w)?,
    }
    Ok(w)
}

fn eligibility(cfg: &RunConfig, ctx: &Context, dir: &Path, _w: &mut Vec<String>) -> Result<()> {
    let exclusions: Vec<(String, Vec<Technology>, Mask)> = cfg
        .criteria
        .iter()
        .filter(|c| !c.technologies.is_empty())
        .map(|c| {
            let g = raster(cfg, &c.raster, &ctx.spec, &c.name)?;
            let crit = Criterion::from_raster(&c.name, c.technologies[0], c.buffer_m, &g)?;
            Ok((c.name.clone(), c.technologies.clone(), crit.exclusion()?))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut shares = Vec::new();
    for tech in LAND {
        let ex: Vec<(String, Mask)> = exclusions
            .iter()
            .filter(|(_, t, _)| t.contains(&tech))
            .map(|(n, _, m)| (n.clone(), m.clone()))
            .collect();
        let results = ctx
            .regions
            .par_iter()
            .map(|r| evaluate_region(r, &ctx.spec, &ex))
            .collect::<Result<Vec<_>>>()?;
        let mut eligible = region_raster(ctx, |_| 0.0);
        for (r, res) in ctx.regions.iter().zip(&results) {
            for &i in &r.mask {
                if res.eligible.cells[i] {
                    eligible.cells[i] = 1.0;
                }
            }
            rows.push(EligibilityRow {
                region_id: r.id.clone(),
                technology: tech,
                region_area_km2: res.region_area_km2,
                eligible_area_km2: res.eligible_area_km2,
                eligible_share: res.eligible_share,
            });
            for (n, s) in &res.per_criterion_excluded_share {
                shares.push(CriterionShareRow {
                    region_id: r.id.clone(),
                    technology: tech,
                    criterion: n.clone(),
                    excluded_share: *s,
                });
            }
        }
        save_raster_auto(&eligible, dir.join(format!("eligible_{tech}.asc")))?;
    }
    let regions: Vec<RegionRow> = ctx
        .regions
        .iter()
        .map(|r| RegionRow {
            region_id: r.id.clone(),
            country: r.country_code.clone(),
            cells: r.mask.len(),
            area_km2: r.area_km2,
        })
        .collect();
    write_csv(&dir.join("regions.csv"), &regions)?;
    write_csv(&dir.join("eligibility.csv"), &rows)?;
    write_csv(&dir.join("criteria.csv"), &shares)?;
    let by_id: BTreeMap<&str, f64> = rows
        .iter()
        .filter(|r| r.technology == Technology::Pv)
        .map(|r| (r.region_id.as_str(), r.eligible_share))
        .collect();
    let gj = boundaries_to_geojson(&ctx.boundaries, |b| props([("pv_eligible_share", by_id.get(b.id.as_str()).copied())]));
    write_json(&dir.join("regions.geojson"), &gj)
}

fn props<const N: usize>(kv: [(&str, Option<f64>); N]) -> serde_json::Map<String, Value> {
    kv.into_iter()
        .map(|(k, v)| (k.to_string(), v.filter(|x| x.is_finite()).map(Value::from).unwrap_or(Value::Null)))
        .collect()
}

fn load_resources(cfg: &RunConfig) -> Result<BTreeMap<String, ResourceRow>> {
    let path = cfg.resolve(&cfg.inputs.region_resources);
    let mut out = BTreeMap::new();
    for r in read_csv::<ResourceRow>(&path)? {
        if !(r.hydro_capacity_mw >= 0.0 && r.geothermal_capacity_mw >= 0.0) {
            return Err(Error::Input(format!("{}: negative capacity for '{}'", path.display(), r.region_id)));
        }
        if !(0.0..=1.0).contains(&r.geothermal_availability) {
            return Err(Error::Input(format!("{}: availability outside [0,1] for '{}'", path.display(), r.region_id)));
        }
        out.insert(r.region_id.clone(), r);
    }
    Ok(out)
}

/// Splits cells into up to `k` classes of (nearly) equal cell count by ascending factor.
/// Returns (cells, capacity, capacity-weighted factor) best class first.
fn site_classes(cells: &[(usize, f64, f64)], k: usize) -> Vec<(usize, f64, f64)> {
    let mut v = cells.to_vec();
    v.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
    let n = v.len();
    let k = k.min(n);
    (0..k)
        .map(|c| {
            let part = &v[c * n / k..(c + 1) * n / k];
            let mut cap = CompensatedSum::new();
            let mut wf = CompensatedSum::new();
            for &(_, mw, f) in part {
                cap.add(mw);
                wf.add(mw * f);
            }
            let cap = cap.value();
            (part.len(), cap, if cap > 0.0 { wf.value() / cap } else { 0.0 })
        })
        .filter(|c| c.1 > 0.0)
        .collect()
}

fn placement(cfg: &RunConfig, ctx: &Context, dir: &Path, out: &Path, w: &mut Vec<String>) -> Result<()> {
    let dens = cfg.technology.densities;
    let ghi = raster(cfg, &cfg.inputs.ghi_factor, &ctx.spec, "ghi_factor")?;
    let wind = raster(cfg, &cfg.inputs.wind_factor, &ctx.spec, "wind_factor")?;
    let resources = load_resources(cfg)?;
    let mut caps: BTreeMap<Technology, RasterGrid> = BTreeMap::new();
    for tech in LAND {
        let el = stage_raster(out, Stage::Eligibility, &format!("eligible_{tech}.asc"), &ctx.spec)?;
        let d = dens.get(tech).unwrap_or(0.0);
        let cap = region_raster(ctx, |i| if el.value(i) == Some(1.0) { ctx.spec.area_km2_at(i) * d } else { 0.0 });
        save_raster_auto(&cap, dir.join(format!("capacity_{tech}_mw.asc")))?;
        caps.insert(tech, cap);
    }
    let pv_cap = &caps[&Technology::Pv];
    let density = region_raster(ctx, |i| pv_cap.cells[i] / ctx.spec.area_km2_at(i));
    save_raster_auto(&density, dir.join("installable_density.asc"))?;

    let mut place = Vec::new();
    let mut classes = Vec::new();
    for r in &ctx.regions {
        let res = resources.get(&r.id);
        for tech in Technology::ALL {
            let (cells, total) = match tech {
                Technology::Hydro => {
                    let mw = res.map(|x| x.hydro_capacity_mw).unwrap_or(0.0);
                    if mw > 0.0 {
                        classes.push(SiteClassRow {
                            region_id: r.id.clone(),
                            generator: "hydro".into(),
                            technology: tech,
                            class: 1,
                            cells: 0,
                            capacity_mw: mw,
                            quality_factor: 1.0,
                        });
                    }
                    (0, mw)
                }
                _ => {
                    let cap = &caps[&tech];
                    let eligible: Vec<usize> = r.mask.iter().copied().filter(|&i| cap.cells[i] > 0.0).collect();
                    let land_mw: f64 = crate::numeric::sum(eligible.iter().map(|&i| cap.cells[i]));
                    match tech {
                        Technology::Geothermal => {
                            let (mw, avail) = res
                                .map(|x| (x.geothermal_capacity_mw.min(land_mw), x.geothermal_availability))
                                .unwrap_or((0.0, 0.0));
                            if mw > 0.0 && avail > 0.0 {
                                classes.push(SiteClassRow {
                                    region_id: r.id.clone(),
                                    generator: "geothermal".into(),
                                    technology: tech,
                                    class: 1,
                                    cells: eligible.len(),
                                    capacity_mw: mw,
                                    quality_factor: avail,
                                });
                            }
                            (eligible.len(), mw)
                        }
                        _ => {
                            let factor = if tech == Technology::Pv { &ghi } else { &wind };
                            let mut missing = 0;
                            let cells: Vec<(usize, f64, f64)> = eligible
                                .iter()
                                .filter_map(|&i| {
                                    let f = factor.value(i);
                                    if f.is_none() {
                                        missing += 1;
                                    }
                                    f.map(|f| (i, cap.cells[i], f))
                                })
                                .collect();
                            if missing > 0 {
                                w.push(format!("region '{}': {missing} {tech} cells lack a resource factor", r.id));
                            }
                            for (k, (n, mw, q)) in site_classes(&cells, cfg.technology.site_classes).into_iter().enumerate() {
                                classes.push(SiteClassRow {
                                    region_id: r.id.clone(),
                                    generator: format!("{tech}_{}", k + 1),
                                    technology: tech,
                                    class: k + 1,
                                    cells: n,
                                    capacity_mw: mw,
                                    quality_factor: q,
                                });
                            }
                            (eligible.len(), land_mw)
                        }
                    }
                }
            };
            let area = if tech == Technology::Hydro {
                0.0
            } else {
                crate::numeric::sum(
                    r.mask.iter().filter(|&&i| caps[&tech].cells[i] > 0.0).map(|&i| ctx.spec.area_km2_at(i)),
                )
            };
            let _ = cells;
            place.push(PlacementRow {
                region_id: r.id.clone(),
                technology: tech,
                eligible_area_km2: area,
                capacity_mw: total,
            });
        }
    }
    write_csv(&dir.join("placement.csv"), &place)?;
    write_csv(&dir.join("site_classes.csv"), &classes)
}

fn turbine(cfg: &RunConfig) -> Result<Turbine> {
    let mut t = Turbine::default();
    if let Some(p) = &cfg.technology.power_curve {
        t.curve = PowerCurve::load_csv(cfg.resolve(p))?;
    }
    t.hub_height_m = cfg.technology.hub_height_m;
    t.shear_alpha = cfg.technology.shear_alpha;
    Ok(t)
}

fn group_by_region<T: Clone>(rows: &[T], id: impl Fn(&T) -> &str) -> BTreeMap<String, Vec<T>> {
    let mut m: BTreeMap<String, Vec<T>> = BTreeMap::new();
    for r in rows {
        m.entry(id(r).to_string()).or_default().push(r.clone());
    }
    m
}

fn simulation(cfg: &RunConfig, ctx: &Context, dir: &Path, out: &Path, w: &mut Vec<String>) -> Result<()> {
    let classes: Vec<SiteClassRow> = read_csv(&out.join(Stage::Placement.dir_name()).join("site_classes.csv"))?;
    let by_region = group_by_region(&classes, |r| r.region_id.as_str());
    let turbine = turbine(cfg)?;
    let costs = cfg.cost_table()?;
    let prof_dir = dir.join("profiles");
    fs::create_dir_all(&prof_dir).map_err(|e| Error::io(&prof_dir, e))?;
    let work: Vec<(usize, &Region, &Vec<SiteClassRow>)> = ctx
        .regions
        .iter()
        .enumerate()
        .filter_map(|(k, r)| by_region.get(&r.id).map(|c| (k, r, c)))
        .collect();
    for r in &ctx.regions {
        if !by_region.contains_key(&r.id) {
            w.push(format!("region '{}' has no installable capacity", r.id));
        }
    }
    let results = work
        .par_iter()
        .map(|&(k, r, cls)| -> Result<(Vec<GeneratorRow>, GenerationRow)> {
            let wpath = cfg.resolve(&cfg.inputs.weather_dir).join(format!("{}.csv", r.id));
            let weather = WeatherSeries::load_csv(&wpath, k, cfg.technology.weather_ref_height_m)?;
            let hours = weather.hours();
            let mut profiles = Vec::with_capacity(cls.len());
            for c in cls {
                let p = match c.technology {
                    Technology::Pv => simulate_pv(&weather.scaled(c.quality_factor, 1.0), &cfg.technology.pv)?,
                    Technology::Wind => simulate_wind(&weather.scaled(1.0, c.quality_factor), &turbine)?,
                    Technology::Geothermal => geothermal_profile(c.quality_factor, hours)?,
                    Technology::Hydro => {
                        let hp = cfg.resolve(&cfg.inputs.hydro_dir).join(format!("{}.csv", r.id));
                        let rows: Vec<HydroRow> = read_csv(&hp)?;
                        let t: Vec<f64> = rows.iter().map(|h| h.time_h).collect();
                        let v: Vec<f64> = rows.iter().map(|h| h.capacity_factor).collect();
                        resample_hydro(&t, &v, hours)?
                    }
                };
                profiles.push(p);
            }
            // Representative year of the capacity-weighted combined output.
            let cap_total: f64 = cls.iter().map(|c| c.capacity_mw).sum();
            let years = hours / HOURS_PER_YEAR;
            let year_means: Vec<f64> = (0..years)
                .map(|y| {
                    let mut s = CompensatedSum::new();
                    for (c, p) in cls.iter().zip(&profiles) {
                        s.add(c.capacity_mw * p.year_means()[y]);
                    }
                    s.value() / cap_total
                })
                .collect();
            let year = representative_year(&year_means);
            let chosen: Vec<GenerationProfile> = profiles.iter().map(|p| p.year(year)).collect::<Result<_>>()?;
            let names: Vec<String> = cls.iter().map(|c| c.generator.clone()).collect();
            let cols: Vec<Vec<f64>> = chosen.iter().map(|p| p.capacity_factor.clone()).collect();
            write_profiles(&prof_dir.join(format!("{}.csv", r.id)), &names, &cols)?;
            let mut gen_total = CompensatedSum::new();
            let rows = cls
                .iter()
                .zip(&chosen)
                .map(|(c, p)| {
                    gen_total.add(c.capacity_mw * p.mean_cf * HOURS_PER_YEAR as f64);
                    GeneratorRow {
                        region_id: r.id.clone(),
                        generator: c.generator.clone(),
                        technology: c.technology,
                        ceiling_mw: c.capacity_mw,
                        mean_cf: p.mean_cf,
                        full_load_hours: p.full_load_hours,
                        lcoe_eur_per_kwh: lcoe(costs.generator(c.technology), p.full_load_hours).ok(),
                        representative_year: year,
                    }
                })
                .collect();
            Ok((
                rows,
                GenerationRow {
                    region_id: r.id.clone(),
                    representative_year: year,
                    generation_twh: gen_total.value() * 1e-6,
                },
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut gens = Vec::new();
    let mut totals = Vec::new();
    for (g, t) in results {
        gens.extend(g);
        totals.push(t);
    }
    write_csv(&dir.join("generators.csv"), &gens)?;
    write_csv(&dir.join("generation.csv"), &totals)
}

fn water(cfg: &RunConfig, ctx: &Context, dir: &Path, out: &Path, w: &mut Vec<String>) -> Result<()> {
    let recharge = raster(cfg, cfg.recharge_path(), &ctx.spec, "recharge")?;
    let consumption = raster(cfg, cfg.consumption_path(), &ctx.spec, "consumption")?;
    let scenario = YieldScenario {
        name: cfg.water.scenario,
        climate: cfg.water.climate,
        horizon: cfg.horizon()?,
    };
    let sy = sustainable_yield(&recharge, &consumption, &scenario)?;
    save_raster_auto(&sy, dir.join("sustainable_yield_mm.asc"))?;
    let coast = raster(cfg, &cfg.inputs.coast_distance_km, &ctx.spec, "coast_distance_km")?;
    let elev = raster(cfg, &cfg.inputs.elevation, &ctx.spec, "elevation")?;
    let gens: Vec<GeneratorRow> = read_csv(&out.join(Stage::Simulation.dir_name()).join("generators.csv"))?;
    let mut cheapest: BTreeMap<String, f64> = BTreeMap::new();
    for g in &gens {
        if let Some(c) = g.lcoe_eur_per_kwh {
            let e = cheapest.entry(g.region_id.clone()).or_insert(f64::INFINITY);
            *e = e.min(c);
        }
    }
    let all: Vec<f64> = sorted(&cheapest.values().copied().collect::<Vec<_>>());
    let fallback = if all.is_empty() { 0.05 } else { all[(all.len() - 1) / 2] };
    let mut rows = Vec::new();
    for r in &ctx.regions {
        let b = region_water_budget(&sy, r);
        if b.nodata_cells > 0 {
            w.push(format!("region '{}': {} cells without groundwater data skipped", r.id, b.nodata_cells));
        }
        let price = match cheapest.get(&r.id) {
            Some(&p) => p,
            None => {
                w.push(format!("region '{}': no own generation cost; pumping priced at the median {fallback:.4} EUR/kWh", r.id));
                fallback
            }
        };
        let dist = region_mean(&coast, r);
        let lift = region_mean(&elev, r);
        if !dist.is_finite() || !lift.is_finite() {
            return Err(Error::DataQuality(format!("region '{}' has no coast distance or elevation data", r.id)));
        }
        rows.push(WaterRow {
            region_id: r.id.clone(),
            sy_volume_m3: b.volume_m3_per_year,
            sy_mean_mm: b.mean_mm_per_year,
            sy_nodata_cells: b.nodata_cells,
            groundwater_cost_eur_per_m3: cfg.water.groundwater_cost_eur_per_m3,
            coast_distance_km: dist,
            elevation_m: lift,
            electricity_price_eur_per_kwh: price,
            desal_cost_eur_per_m3: desal_transport_cost(dist, lift, price, &cfg.water.desal)?,
        });
    }
    write_csv(&dir.join("water.csv"), &rows)
}

fn optimization(cfg: &RunConfig, ctx: &Context, dir: &Path, out: &Path, w: &mut Vec<String>) -> Result<()> {
    let sim = out.join(Stage::Simulation.dir_name());
    let gens: Vec<GeneratorRow> = read_csv(&sim.join("generators.csv"))?;
    let by_region = group_by_region(&gens, |g| g.region_id.as_str());
    let water: BTreeMap<String, WaterRow> = read_csv::<WaterRow>(&out.join(Stage::Water.dir_name()).join("water.csv"))?
        .into_iter()
        .map(|r| (r.region_id.clone(), r))
        .collect();
    let costs = cfg.cost_table()?;
    let eff = cfg.efficiency_kwh_per_kg()?;
    let battery = cfg.technology.battery.then(|| Battery {
        energy: costs.battery_energy.clone(),
        power: costs.battery_power.clone(),
        round_trip_efficiency: cfg.technology.battery_round_trip_efficiency,
    });
    let work: Vec<&Region> = ctx.regions.iter().filter(|r| by_region.contains_key(&r.id)).collect();
    let results = work
        .par_iter()
        .map(|r| -> Result<Option<(CostPotentialCurve, RegionSystemInputs)>> {
            let (names, cols) = read_profiles(&sim.join("profiles").join(format!("{}.csv", r.id)))?;
            let rows = &by_region[&r.id];
            let mut generators = Vec::new();
            for g in rows {
                let k = names
                    .iter()
                    .position(|n| n == &g.generator)
                    .ok_or_else(|| Error::Structural(format!("profile of '{}' missing for '{}'", g.generator, r.id)))?;
                generators.push(Generator {
                    name: g.generator.clone(),
                    technology: g.technology,
                    ceiling_mw: g.ceiling_mw,
                    profile: GenerationProfile::new(cols[k].clone())?,
                    costs: costs.generator(g.technology).clone(),
                });
            }
            let wr = water
                .get(&r.id)
                .ok_or_else(|| Error::Structural(format!("no water row for '{}'", r.id)))?;
            let inputs = RegionSystemInputs {
                region_id: r.id.clone(),
                generators,
                electrolyzer: costs.electrolyzer.clone(),
                efficiency_kwh_per_kg: eff,
                battery: battery.clone(),
                water: supply_curve(wr.groundwater_cost_eur_per_m3, wr.sy_volume_m3, wr.desal_cost_eur_per_m3)?,
                water_use_l_per_kg: cfg.water.water_use_l_per_kg,
            };
            if !(inputs.max_h2_kg() > 0.0) {
                return Ok(None);
            }
            Ok(Some((cost_potential_curve(&inputs, &cfg.steps)?, inputs)))
        })
        .collect::<Result<Vec<_>>>()?;

    let country: BTreeMap<&str, &str> = ctx.regions.iter().map(|r| (r.id.as_str(), r.country_code.as_str())).collect();
    let mut curve_rows = Vec::new();
    let mut design_rows = Vec::new();
    let mut water_rows = Vec::new();
    let mut lcoh_map = BTreeMap::new();
    let mut per_area = BTreeMap::new();
    let mut gw_share = BTreeMap::new();
    let mut series = Vec::new();
    for (r, res) in work.iter().zip(results) {
        let Some((curve, inputs)) = res else {
            w.push(format!("region '{}' has no hydrogen potential", r.id));
            continue;
        };
        for (p, d) in curve.points.iter().zip(&curve.designs) {
            curve_rows.push(CurveRow {
                region_id: r.id.clone(),
                country: country[r.id.as_str()].to_string(),
                max_potential_twh: curve.max_potential_twh,
                step: p.step,
                h2_kg: p.h2_kg,
                h2_twh: p.h2_twh,
                lcoh_eur_per_kg: p.lcoh_eur_per_kg,
                electrolyzer_mw: p.electrolyzer_mw,
                curtailed_share: p.curtailed_share,
                water_cost_share: p.water_cost_share,
            });
            let mut comp = |name: &str, value: f64| {
                design_rows.push(DesignRow {
                    region_id: r.id.clone(),
                    step: p.step,
                    component: name.to_string(),
                    value,
                })
            };
            for g in &d.generators {
                comp(&format!("{}_mw", g.name), g.capacity_mw);
            }
            comp("electrolyzer_mw", d.electrolyzer_mw);
            comp("battery_mwh", d.battery_mwh);
            comp("battery_mw", d.battery_mw);
            comp("electrolyzer_full_load_hours", d.electrolyzer_full_load_hours);
            comp("annual_cost_eur", d.annual_cost_eur);
            comp("energy_balance_residual", d.dispatch.balance_residual());
            if p.step == cfg.map_step {
                lcoh_map.insert(r.id.clone(), p.lcoh_eur_per_kg);
            }
        }
        let wr = groundwater_feasible_share(&curve, &inputs)?;
        gw_share.insert(r.id.clone(), wr.feasible_share);
        for s in &wr.steps {
            water_rows.push(WaterShareRow {
                region_id: r.id.clone(),
                step: s.step,
                groundwater_cap_m3: wr.groundwater_cap_m3,
                feasible_share: wr.feasible_share,
                demand_m3: s.demand_m3,
                groundwater_m3: s.groundwater_m3,
                desalination_m3: s.desalination_m3,
                water_cost_eur: s.water_cost_eur,
                water_cost_share: s.water_cost_share,
            });
        }
        // kt of hydrogen per km² at full potential
        per_area.insert(r.id.clone(), inputs.max_h2_kg() * 1e-6 / r.area_km2);
        series.push(Series {
            label: r.id.clone(),
            points: curve.points.iter().map(|p: &CurvePoint| (p.h2_twh, p.lcoh_eur_per_kg)).collect(),
        });
    }
    write_csv(&dir.join("curves.csv"), &curve_rows)?;
    write_csv(&dir.join("designs.csv"), &design_rows)?;
    write_csv(&dir.join("water_share.csv"), &water_rows)?;
    let gj = boundaries_to_geojson(&ctx.boundaries, |b| {
        let id = b.id.as_str();
        props([
            ("lcoh_eur_per_kg", lcoh_map.get(id).copied()),
            ("h2_potential_kt_per_km2", per_area.get(id).copied()),
            ("groundwater_feasible_share", gw_share.get(id).copied()),
        ])
    });
    write_json(&dir.join("regions.geojson"), &gj)?;
    let step_pct = cfg.map_step * 100.0;
    write_text(
        &dir.join("map_lcoh.svg"),
        &choropleth(&ctx.boundaries, &lcoh_map, &format!("LCOH at {step_pct}% of potential"), "EUR/kg"),
    )?;
    write_text(
        &dir.join("map_h2_per_area.svg"),
        &choropleth(&ctx.boundaries, &per_area, "Hydrogen potential per area", "kt/km²"),
    )?;
    write_text(
        &dir.join("map_groundwater_share.svg"),
        &choropleth(&ctx.boundaries, &gw_share, "Potential share coverable by groundwater", "share"),
    )?;
    write_text(
        &dir.join("curves.svg"),
        &curve_chart(&series, "Regional cost-potential curves", "cumulative H₂ (TWh/a)", "LCOH (EUR/kg)", None),
    )
}

fn curves_from_rows(rows: &[CurveRow]) -> BTreeMap<String, Vec<CostPotentialCurve>> {
    let mut by_country: BTreeMap<String, Vec<CostPotentialCurve>> = BTreeMap::new();
    for (id, pts) in group_by_region(rows, |r| r.region_id.as_str()) {
        let c = CostPotentialCurve {
            region_id: id,
            max_potential_twh: pts[0].max_potential_twh,
            points: pts
                .iter()
                .map(|p| CurvePoint {
                    step: p.step,
                    h2_kg: p.h2_kg,
                    h2_twh: p.h2_twh,
                    lcoh_eur_per_kg: p.lcoh_eur_per_kg,
                    electrolyzer_mw: p.electrolyzer_mw,
                    curtailed_share: p.curtailed_share,
                    water_cost_share: p.water_cost_share,
                })
                .collect(),
            designs: Vec::new(),
        };
        by_country.entry(pts[0].country.clone()).or_default().push(c);
    }
    by_country
}

fn set_aside(cfg: &RunConfig, _ctx: &Context, dir: &Path, out: &Path, w: &mut Vec<String>) -> Result<()> {
    let rows: Vec<CurveRow> = read_csv(&out.join(Stage::Optimization.dir_name()).join("curves.csv"))?;
    let demand: BTreeMap<String, DemandRow> = read_csv::<DemandRow>(&cfg.resolve(&cfg.inputs.demand))?
        .into_iter()
        .map(|d| (d.iso3.clone(), d))
        .collect();
    let eff = cfg.efficiency_kwh_per_kg()?;
    let mut national = Vec::new();
    let mut means = Vec::new();
    let mut summary = Vec::new();
    for (country, curves) in curves_from_rows(&rows) {
        let n = aggregate_national(&country, &curves)?;
        let d = match demand.get(&country) {
            Some(d) => DemandInput {
                electricity_twh: d.electricity_twh,
                hydrogen_twh: d.hydrogen_twh,
            },
            None => {
                w.push(format!("country '{country}' has no demand row; nothing reserved"));
                DemandInput::default()
            }
        };
        let s = demand_set_aside(&n, &d, eff)?;
        if s.exceeds_potential {
            w.push(format!("country '{country}': demand exceeds the potential ({:.1}%)", s.reserved_percent));
        }
        let cum = n.cumulative_twh();
        let mut reserved_left = s.reserved_twh;
        for (k, (seg, c)) in n.segments.iter().zip(&cum).enumerate() {
            let res = reserved_left.min(seg.quantity_twh).max(0.0);
            reserved_left -= res;
            national.push(NationalRow {
                country: country.clone(),
                rank: k + 1,
                region_id: seg.region_id.clone(),
                step: seg.step,
                quantity_twh: seg.quantity_twh,
                cumulative_twh: *c,
                lcoh_eur_per_kg: seg.lcoh_eur_per_kg,
                reserved_twh: res,
            });
        }
        for m in &n.step_means {
            means.push(StepMeanRow {
                country: country.clone(),
                step: m.step,
                quantity_twh: m.quantity_twh,
                weighted_lcoh_eur_per_kg: m.weighted_lcoh_eur_per_kg,
            });
        }
        summary.push(SetAsideRow {
            country: country.clone(),
            potential_twh: s.potential_twh,
            reserved_twh: s.reserved_twh,
            reserved_percent: s.reserved_percent,
            exceeds_potential: s.exceeds_potential,
            exportable_twh: s.exportable_twh(),
        });
        let series = Series {
            label: country.clone(),
            points: n.segments.iter().zip(&cum).map(|(seg, c)| (*c, seg.lcoh_eur_per_kg)).collect(),
        };
        write_text(
            &dir.join(format!("curve_{country}.svg")),
            &curve_chart(
                &[series],
                &format!("{country}: national cost-potential curve"),
                "cumulative H₂ (TWh/a)",
                "LCOH (EUR/kg)",
                Some(s.reserved_twh.min(s.potential_twh)),
            ),
        )?;
    }
    write_csv(&dir.join("national_curves.csv"), &national)?;
    write_csv(&dir.join("step_means.csv"), &means)?;
    write_csv(&dir.join("setaside.csv"), &summary)
}

fn socio(cfg: &RunConfig, ctx: &Context, dir: &Path, out: &Path, w: &mut Vec<String>) -> Result<()> {
    let i = &cfg.inputs;
    let g = |p: &Path, n: &str| raster(cfg, p, &ctx.spec, n);
    let scalars = load_country_scalars(cfg.resolve(&i.country_scalars))?;
    for r in &ctx.regions {
        if !scalars.contains_key(&r.country_code) {
            w.push(format!("country '{}' has no socio-economic scalars", r.country_code));
        }
    }
    let ur: BTreeMap<String, f64> = scalars.iter().map(|(k, v)| (k.clone(), v.unemployment_rate)).collect();
    let ef: BTreeMap<String, f64> = scalars.iter().map(|(k, v)| (k.clone(), v.employment_factor_jobs_per_mwp)).collect();
    let inputs = SocioInputs {
        electricity_access: g(&i.electricity_access, "electricity_access")?,
        clean_fuel_access: g(&i.clean_fuel_access, "clean_fuel_access")?,
        population_density: g(&i.population_density, "population_density")?,
        unemployment_rate: country_scalar_grid(ctx.spec, &ctx.regions, &ur),
        labor_force_density: g(&i.labor_force_density, "labor_force_density")?,
        employment_factor: country_scalar_grid(ctx.spec, &ctx.regions, &ef),
        biomass_dependence: g(&i.biomass_dependence, "biomass_dependence")?,
        poverty_headcount: g(&i.poverty_headcount, "poverty_headcount")?,
    };
    inputs.validate()?;
    let density = stage_raster(out, Stage::Placement, "installable_density.asc", &ctx.spec)?;
    let ae = energy_access_indicator(&inputs, &cfg.socio)?;
    let me = macroeconomic_indicator(&inputs, &density)?;
    let oe = other_effects_indicator(&inputs)?;
    // Restrict to study regions so normalization covers the study extent only.
    let inside = |grid: &RasterGrid| {
        let mut g = region_raster(ctx, |k| grid.value(k).unwrap_or(f64::NAN));
        g.cells.iter_mut().for_each(|v| {
            if v.is_nan() {
                *v = DEFAULT_NODATA
            }
        });
        g
    };
    let (ae, me, oe) = (inside(&ae), inside(&me), inside(&oe));
    let (composite, warns) = composite_indicator(&ae, &me, &oe, cfg.socio.composite)?;
    w.extend(warns);
    let mut stats = Vec::new();
    let mut composite_median = BTreeMap::new();
    for (name, grid) in [("AE", &ae), ("ME", &me), ("OE", &oe), ("composite", &composite)] {
        save_raster_auto(grid, dir.join(format!("{}.asc", name.to_lowercase())))?;
        for s in regional_stats(grid, &ctx.regions) {
            stats.push(StatsRow {
                indicator: name.to_string(),
                country: s.country,
                cells: s.cells,
                median: s.median,
                q25: s.q25,
                q75: s.q75,
                iqr: s.iqr,
            });
        }
    }
    for r in &ctx.regions {
        if let Some(s) = regional_stats(&composite, std::slice::from_ref(r)).first() {
            composite_median.insert(r.id.clone(), s.median);
        }
    }
    write_csv(&dir.join("stats.csv"), &stats)?;
    let gj = boundaries_to_geojson(&ctx.boundaries, |b| props([("composite_median", composite_median.get(b.id.as_str()).copied())]));
    write_json(&dir.join("regions.geojson"), &gj)?;
    write_text(
        &dir.join("map_composite.svg"),
        &choropleth(&ctx.boundaries, &composite_median, "Composite socio-economic indicator (regional median)", "0–100"),
    )
}

/// Headline numbers of a finished run.
pub(super) fn report(cfg: &RunConfig, out: &Path) -> Result<String> {
    let set: Vec<SetAsideRow> = read_csv(&out.join(Stage::SetAside.dir_name()).join("setaside.csv"))?;
    let curves: Vec<CurveRow> = read_csv(&out.join(Stage::Optimization.dir_name()).join("curves.csv"))?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "year {} | water {} {} | steps {:?}",
        cfg.year, cfg.water.scenario, cfg.water.climate, cfg.steps
    );
    let _ = writeln!(s, "\ncountry  potential_TWh  reserved_TWh  reserved_%  exportable_TWh");
    for r in &set {
        let _ = writeln!(
            s,
            "{:<8} {:>13.3} {:>13.3} {:>11.1} {:>15.3}{}",
            r.country,
            r.potential_twh,
            r.reserved_twh,
            r.reserved_percent,
            r.exportable_twh,
            if r.exceeds_potential { "  (demand exceeds potential)" } else { "" }
        );
    }
    let _ = writeln!(s, "\nregion   step   LCOH_EUR/kg");
    for r in curves.iter().filter(|r| r.step == cfg.map_step) {
        let _ = writeln!(s, "{:<8} {:>5.2} {:>13.3}", r.region_id, r.step, r.lcoh_eur_per_kg);
    }
    Ok(s)
}
