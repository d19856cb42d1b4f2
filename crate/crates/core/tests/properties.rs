mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use common::*;
use h2potential::eligibility::{combine_exclusions, place_capacity, Criterion};
use h2potential::geodata::{distance_to_feature, rasterize_regions, GridSpec, Mask, Polygon, RasterGrid, Region, RegionBoundary, DEFAULT_NODATA};
use h2potential::h2opt::{cost_potential_curve, fixed_mix_design, optimize_system};
use h2potential::numeric::{quantile_sorted, sorted};
use h2potential::res_sim::{
    lcoe, pv_capacity_factor, simulate_pv, GenerationProfile, PvParams, TechnoEconomics, Turbine, WeatherSeries,
};
use h2potential::socio::{composite_indicator, energy_access_indicator, macroeconomic_indicator, regional_stats, SocioInputs, SocioWeights};
use h2potential::water::{desal_transport_cost, draw_water, supply_curve, sustainable_yield_value, DesalParams, ScenarioName};
use h2potential::Technology;

fn spec(cols: usize, rows: usize, lat0: f64) -> GridSpec {
    GridSpec::new(cols, rows, 10.0, lat0, 0.05).unwrap()
}

fn mask_strategy() -> impl Strategy<Value = (usize, usize, Vec<bool>)> {
    (2usize..14, 2usize..14).prop_flat_map(|(c, r)| (Just(c), Just(r), proptest::collection::vec(prop::bool::weighted(0.15), c * r)))
}

fn region_all(spec: &GridSpec) -> Region {
    Region::from_mask("R", "AAA", (0..spec.len()).collect(), spec).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_shrinks_as_features_grow((c, r, cells) in mask_strategy(), extra in proptest::collection::vec(prop::bool::weighted(0.2), 196)) {
        let s = spec(c, r, 5.0);
        let m1 = Mask::new(s, cells.clone()).unwrap();
        let m2 = Mask::new(s, cells.iter().zip(&extra).map(|(a, b)| *a || *b).collect()).unwrap();
        let d1 = distance_to_feature(&m1);
        let d2 = distance_to_feature(&m2);
        for i in 0..s.len() {
            prop_assert!(d2.cells[i] <= d1.cells[i]);
        }
    }

    #[test]
    fn distance_mirrors_with_the_grid((c, r, cells) in mask_strategy()) {
        // east-west mirror on any grid
        let s = spec(c, r, 20.0);
        let m = Mask::new(s, cells.clone()).unwrap();
        let flipped: Vec<bool> = (0..s.len()).map(|i| { let (rr, cc) = s.row_col(i); cells[s.index(rr, c - 1 - cc)] }).collect();
        let d = distance_to_feature(&m);
        let df = distance_to_feature(&Mask::new(s, flipped).unwrap());
        for i in 0..s.len() {
            let (rr, cc) = s.row_col(i);
            prop_assert_eq!(d.cells[i], df.cells[s.index(rr, c - 1 - cc)]);
        }
        // north-south mirror on a grid centered on the equator
        let e = GridSpec::new(c, r, 10.0, -(r as f64) * 0.05 / 2.0, 0.05).unwrap();
        let m = Mask::new(e, cells.clone()).unwrap();
        let flipped: Vec<bool> = (0..e.len()).map(|i| { let (rr, cc) = e.row_col(i); cells[e.index(r - 1 - rr, cc)] }).collect();
        let d = distance_to_feature(&m);
        let df = distance_to_feature(&Mask::new(e, flipped).unwrap());
        for i in 0..e.len() {
            let (rr, cc) = e.row_col(i);
            let (a, b) = (d.cells[i], df.cells[e.index(r - 1 - rr, cc)]);
            prop_assert!(a == b || (a - b).abs() <= 1e-9 * a.abs().max(1.0), "{} vs {}", a, b);
        }
    }

    #[test]
    fn region_masks_are_disjoint(cuts in proptest::collection::btree_set(1usize..19, 1..5)) {
        let s = spec(20, 10, 0.0);
        let mut xs: Vec<f64> = vec![10.0];
        xs.extend(cuts.iter().map(|&k| 10.0 + k as f64 * 0.05 + 0.01));
        xs.push(11.0);
        let bounds: Vec<RegionBoundary> = xs.windows(2).enumerate().map(|(k, w)| RegionBoundary {
            id: format!("R{k}"),
            country: "AAA".into(),
            polygons: vec![Polygon { rings: vec![vec![(w[0], 0.0), (w[1], 0.0), (w[1], 0.5), (w[0], 0.5), (w[0], 0.0)]] }],
        }).collect();
        let a = rasterize_regions(&bounds, &s);
        let mut seen = vec![false; s.len()];
        for r in &a.regions {
            for &i in &r.mask {
                prop_assert!(!seen[i]);
                seen[i] = true;
            }
        }
    }

    #[test]
    fn criteria_only_ever_shrink_eligibility(
        (c, r, f1) in mask_strategy(),
        f2 in proptest::collection::vec(prop::bool::weighted(0.1), 196),
        b1 in 0.0f64..12000.0,
        b2 in 0.0f64..12000.0,
    ) {
        let s = spec(c, r, 5.0);
        let region = region_all(&s);
        let a = Criterion::new("a", Technology::Pv, b1, Mask::new(s, f1.clone()).unwrap()).unwrap();
        let b = Criterion::new("b", Technology::Pv, b2, Mask::new(s, f2[..s.len()].to_vec()).unwrap()).unwrap();
        let one = combine_exclusions(std::slice::from_ref(&a), &region, &s).unwrap();
        let two = combine_exclusions(&[a.clone(), b.clone()], &region, &s).unwrap();
        let swapped = combine_exclusions(&[b, a.clone()], &region, &s).unwrap();
        prop_assert!(two.eligible_share <= one.eligible_share);
        prop_assert_eq!(&two, &swapped);

        let wider = Criterion::new("a", Technology::Pv, b1 + 3000.0, a.feature.clone()).unwrap();
        let w = combine_exclusions(&[wider], &region, &s).unwrap();
        prop_assert!(w.per_criterion_excluded_share[0].1 >= one.per_criterion_excluded_share[0].1);

        let p1 = place_capacity(&one, Technology::Pv, 25.0).unwrap();
        let p2 = place_capacity(&one, Technology::Pv, 50.0).unwrap();
        for i in 0..s.len() {
            prop_assert_eq!(p2.capacity_mw_per_cell.cells[i], 2.0 * p1.capacity_mw_per_cell.cells[i]);
        }
    }

    #[test]
    fn pv_cf_is_bounded_and_falls_with_heat(ghi in 0.0f64..1400.0, t in -20.0f64..50.0, dt in 0.1f64..20.0) {
        let p = PvParams::default();
        let a = pv_capacity_factor(ghi, t, &p);
        let b = pv_capacity_factor(ghi, t + dt, &p);
        prop_assert!((0.0..=1.0).contains(&a));
        if ghi > 0.0 && a < 1.0 && b > 0.0 {
            prop_assert!(b < a);
        }
    }

    #[test]
    fn taller_hubs_do_not_lose_output(v in 0.0f64..8.0, h1 in 40.0f64..150.0, dh in 0.0f64..60.0) {
        let mut lo = Turbine::default();
        lo.hub_height_m = h1;
        let mut hi = lo.clone();
        hi.hub_height_m = h1 + dh;
        if hi.hub_speed(v, 10.0) <= 12.0 {
            prop_assert!(hi.capacity_factor(v, 10.0) >= lo.capacity_factor(v, 10.0));
        }
        prop_assert!((0.0..=1.0).contains(&hi.capacity_factor(v, 10.0)));
    }

    #[test]
    fn lcoe_orders_as_expected(
        capex in 100.0f64..5000.0, opex in 0.0f64..0.05, n in 5u32..50, wacc in 0.01f64..0.15,
        aep in 200.0f64..8000.0, bump in 1.01f64..2.0,
    ) {
        let te = TechnoEconomics::new("x", 2030, capex, opex, n, wacc);
        let base = lcoe(&te, aep).unwrap();
        prop_assert!(lcoe(&te, aep * bump).unwrap() < base);
        let mut c = te.clone();
        c.capex_eur_per_kw *= bump;
        prop_assert!(lcoe(&c, aep).unwrap() > base);
        let mut w = te.clone();
        w.wacc *= bump;
        prop_assert!(lcoe(&w, aep).unwrap() > base);
    }

    #[test]
    fn equal_scenario_spacing_when_unclamped(r in 0.0f64..800.0, c in 0.0f64..50.0) {
        let sy = |s: ScenarioName| sustainable_yield_value(s.supplementary_share(), r, c);
        let (lo, mid, hi) = (sy(ScenarioName::Conservative), sy(ScenarioName::Medium), sy(ScenarioName::Extreme));
        if lo > 0.0 {
            prop_assert!(((hi - mid) - (mid - lo)).abs() <= 1e-9 * r.max(1.0));
        }
        prop_assert!(lo <= mid && mid <= hi);
    }

    #[test]
    fn water_costs_rise_with_volume_and_distance(
        gw in 0.05f64..1.0, cap in 0.0f64..1e6, desal in 0.5f64..5.0, v1 in 0.0f64..2e6, dv in 0.0f64..2e6,
        km in 0.0f64..1000.0, lift in -100.0f64..1500.0, price in 0.01f64..0.2, bump in 0.0f64..200.0,
    ) {
        let curve = supply_curve(gw, cap, desal).unwrap();
        let a = draw_water(&curve, v1).blended_cost_eur_per_m3();
        let b = draw_water(&curve, v1 + dv).blended_cost_eur_per_m3();
        if v1 > 0.0 {
            prop_assert!(b >= a * (1.0 - 1e-12));
        }
        let p = DesalParams::default();
        let base = desal_transport_cost(km, lift, price, &p).unwrap();
        prop_assert!(desal_transport_cost(km + bump, lift, price, &p).unwrap() >= base);
        prop_assert!(desal_transport_cost(km, lift + bump, price, &p).unwrap() >= base);
        prop_assert!(desal_transport_cost(km, lift, price + bump * 1e-3, &p).unwrap() >= base);
    }

    #[test]
    fn stats_quartiles_are_ordered(values in proptest::collection::vec(0.0f64..100.0, 1..60)) {
        let s = GridSpec::new(values.len(), 1, 0.0, 0.0, 0.1).unwrap();
        let g = RasterGrid::new(s, DEFAULT_NODATA, values.clone()).unwrap();
        let st = &regional_stats(&g, &[region_all(&s)])[0];
        prop_assert!(st.q25 <= st.median && st.median <= st.q75);
        prop_assert_eq!(st.iqr, st.q75 - st.q25);
        prop_assert_eq!(st.median, quantile_sorted(&sorted(&values), 0.5));
    }
}

fn socio_inputs(s: GridSpec, v: &[f64]) -> SocioInputs {
    let g = |k: usize, scale: f64| RasterGrid::new(s, DEFAULT_NODATA, (0..s.len()).map(|i| (v[(i * 7 + k) % v.len()] * scale).min(scale)).collect()).unwrap();
    SocioInputs {
        electricity_access: g(0, 1.0),
        clean_fuel_access: g(1, 1.0),
        population_density: g(2, 500.0),
        unemployment_rate: g(3, 0.3),
        labor_force_density: g(4, 200.0),
        employment_factor: g(5, 3.0),
        biomass_dependence: g(6, 1.0),
        poverty_headcount: g(7, 1.0),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn socio_indicator_properties(v in proptest::collection::vec(0.0f64..1.0, 16..40), k in 0.1f64..50.0, bump in 0.01f64..1.0) {
        let s = GridSpec::new(6, 5, 0.0, 0.0, 0.1).unwrap();
        let inp = socio_inputs(s, &v);
        let w = SocioWeights::default();
        let ae = energy_access_indicator(&inp, &w).unwrap();
        for i in 0..s.len() {
            let blended = 0.5 * inp.electricity_access.cells[i] + 0.5 * inp.clean_fuel_access.cells[i];
            if blended == 1.0 || inp.population_density.cells[i] == 0.0 {
                prop_assert_eq!(ae.cells[i], 0.0);
            }
        }
        let dens = RasterGrid::new(s, DEFAULT_NODATA, (0..s.len()).map(|i| 10.0 + v[i % v.len()] * 40.0).collect()).unwrap();
        let me = macroeconomic_indicator(&inp, &dens).unwrap();
        let oe = h2potential::socio::other_effects_indicator(&inp).unwrap();
        let (c1, _) = composite_indicator(&ae, &me, &oe, w.composite).unwrap();
        let (c2, _) = composite_indicator(&ae.map(|x| x * k), &me, &oe, w.composite).unwrap();
        for i in 0..s.len() {
            prop_assert!((0.0..=100.0).contains(&c1.cells[i]));
            prop_assert!((c1.cells[i] - c2.cells[i]).abs() <= 1e-9);
        }
        // jobs potential rises with each of its drivers
        for which in 0..3 {
            let mut more = inp.clone();
            let g = match which {
                0 => &mut more.employment_factor,
                1 => &mut more.unemployment_rate,
                _ => &mut more.labor_force_density,
            };
            g.cells.iter_mut().for_each(|x| *x += bump);
            let me2 = macroeconomic_indicator(&more, &dens).unwrap();
            for i in 0..s.len() {
                prop_assert!(me2.cells[i] >= me.cells[i]);
            }
        }
    }
}

#[test]
fn multi_year_mean_is_mean_of_year_means() {
    let years: Vec<GenerationProfile> = (0..20)
        .map(|y| GenerationProfile::new(pv_cf(0.6 + 0.015 * y as f64)).unwrap())
        .collect();
    let all = GenerationProfile::concat(&years).unwrap();
    let means = all.year_means();
    let m = means.iter().sum::<f64>() / means.len() as f64;
    assert!((all.mean_cf - m).abs() <= 1e-12);
}

#[test]
fn simulated_cf_stays_in_unit_interval() {
    let n = H;
    let w = WeatherSeries::new(
        0,
        (0..n).map(|t| 1300.0 * ((t % 24) as f64 / 24.0)).collect(),
        (0..n).map(|t| -10.0 + (t % 50) as f64).collect(),
        (0..n).map(|t| (t % 40) as f64).collect(),
        10.0,
    )
    .unwrap();
    for p in [simulate_pv(&w, &PvParams::default()).unwrap(), h2potential::res_sim::simulate_wind(&w, &Turbine::default()).unwrap()] {
        assert!(p.capacity_factor.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    // Random hand-built fleets never beat the optimizer.
    #[test]
    fn optimizer_dominates_hand_designs(share in 0.1f64..0.8, seeds in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 100)) {
        let inp = system(2030, vec![
            generator("pv", Technology::Pv, 3000.0, pv_cf(0.85)),
            generator("wind", Technology::Wind, 3000.0, wind_cf(0.4, 0.25)),
        ], false, 1.0);
        let kg = share * inp.max_h2_kg();
        let opt = optimize_system(&inp, kg).unwrap();
        prop_assert!(opt.dispatch.balance_residual() < 1e-6);
        for (a, b) in seeds {
            if let Some(d) = fixed_mix_design(&inp, &[3000.0 * a, 3000.0 * b], kg) {
                prop_assert!(opt.annual_cost_eur <= d.annual_cost_eur * (1.0 + 1e-6));
            }
        }
    }
}

#[test]
fn curves_rise_and_later_years_are_cheaper() {
    let fleet = |year| {
        system(year, vec![
            generator_in(year, "pv", Technology::Pv, 2000.0, pv_cf(0.85)),
            generator_in(year, "wind_1", Technology::Wind, 800.0, wind_cf(0.45, 0.2)),
            generator_in(year, "wind_2", Technology::Wind, 1500.0, wind_cf(0.3, 0.2)),
        ], true, 1.0)
    };
    let steps = [0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 1.0];
    let mut by_year = BTreeMap::new();
    for year in [2030, 2050] {
        let mut inp = fleet(year);
        inp.efficiency_kwh_per_kg = 48.3;
        let c = cost_potential_curve(&inp, &steps).unwrap();
        for w in c.points.windows(2) {
            assert!(w[1].lcoh_eur_per_kg >= w[0].lcoh_eur_per_kg * (1.0 - 1e-6), "{year}: {:?}", c.points);
        }
        for d in &c.designs {
            let gen: f64 = d.generation_mwh;
            let used = d.electrolyzer_input_mwh + d.curtailed_mwh + d.battery_loss_mwh;
            assert!((gen - used).abs() <= 1e-6 * gen, "{gen} vs {used}");
        }
        by_year.insert(year, c);
    }
    for (a, b) in by_year[&2030].points.iter().zip(&by_year[&2050].points) {
        assert!(b.lcoh_eur_per_kg <= a.lcoh_eur_per_kg * (1.0 + 1e-6));
    }
}
