use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};

use super::design::{assemble, Dispatch, SystemDesign};
use super::dispatch::generation_series;
use super::inputs::RegionSystemInputs;
use crate::error::{Error, Result};
use crate::numeric::sum;

/// Battery sizes below this fraction of the electrolyzer are treated as zero.
const TRIVIAL_BATTERY: f64 = 1e-5;
/// Targets within this fraction of the maximum use the full build-out.
const FULL_BUILD_TOL: f64 = 1e-9;

/// Least-cost generation mix, electrolyzer and optional battery delivering
/// `h2_kg` of hydrogen per year.
pub fn optimize_system(inputs: &RegionSystemInputs, h2_kg: f64) -> Result<SystemDesign> {
    inputs.validate()?;
    if !(h2_kg > 0.0 && h2_kg.is_finite()) {
        return Err(Error::Input(format!("hydrogen target must be positive, got {h2_kg}")));
    }
    let max_kg = inputs.max_h2_kg();
    if h2_kg > max_kg * (1.0 + FULL_BUILD_TOL) {
        return Err(Error::Infeasible {
            message: format!(
                "region '{}': target {h2_kg:.6e} kg exceeds the maximum {max_kg:.6e} kg",
                inputs.region_id
            ),
            binding: inputs.generators.iter().map(|g| g.name.clone()).collect(),
        });
    }
    if h2_kg >= max_kg * (1.0 - FULL_BUILD_TOL) {
        return Ok(full_build(inputs, h2_kg));
    }
    let with_battery = inputs.battery.is_some();
    let design = solve(inputs, h2_kg, with_battery)?;
    if with_battery
        && design.battery_mwh <= TRIVIAL_BATTERY * design.electrolyzer_mw
        && design.battery_mw <= TRIVIAL_BATTERY * design.electrolyzer_mw
    {
        return solve(inputs, h2_kg, false);
    }
    Ok(design)
}

/// Every generator at its ceiling, all output converted.
fn full_build(inputs: &RegionSystemInputs, h2_kg: f64) -> SystemDesign {
    let caps: Vec<f64> = inputs.generators.iter().map(|g| g.ceiling_mw).collect();
    let profiles: Vec<&[f64]> = inputs.generators.iter().map(|g| g.profile.capacity_factor.as_slice()).collect();
    let gen = generation_series(&caps, &profiles);
    let total = sum(gen.iter().copied());
    let target_total = target_total_mwh(inputs, h2_kg);
    let scale = if total > 0.0 { target_total / total } else { 0.0 };
    let p: Vec<f64> = gen.iter().map(|g| g * scale).collect();
    let e = p.iter().copied().fold(0.0, f64::max);
    let unit = inputs
        .generators
        .iter()
        .zip(&caps)
        .map(|(g, &c)| g.profile.capacity_factor.iter().map(|cf| cf * c).collect())
        .collect();
    assemble(
        inputs,
        h2_kg,
        caps,
        unit,
        e,
        (0.0, 0.0),
        Dispatch {
            generation_mw: gen,
            electrolyzer_mw: p,
            ..Default::default()
        },
    )
}

fn target_total_mwh(inputs: &RegionSystemInputs, h2_kg: f64) -> f64 {
    h2_kg * inputs.efficiency_kwh_per_kg / 1000.0 * inputs.years()
}

struct Layout {
    ng: usize,
    hours: usize,
    dispatchable: Vec<usize>,
    battery: bool,
}

impl Layout {
    fn e(&self) -> usize {
        self.ng
    }
    fn be(&self) -> usize {
        self.ng + 1
    }
    fn bp(&self) -> usize {
        self.ng + 2
    }
    fn p(&self, t: usize) -> usize {
        self.ng + 1 + if self.battery { 2 } else { 0 } + t
    }
    fn g(&self, k: usize, t: usize) -> usize {
        self.p(self.hours) + k * self.hours + t
    }
    fn c(&self, t: usize) -> usize {
        self.g(self.dispatchable.len(), 0) + t
    }
    fn d(&self, t: usize) -> usize {
        self.c(self.hours) + t
    }
    fn s(&self, t: usize) -> usize {
        self.d(self.hours) + t
    }
    fn n(&self) -> usize {
        if self.battery { self.s(self.hours) } else { self.c(0) }
    }
}

#[derive(Default)]
struct Rows {
    i: Vec<usize>,
    j: Vec<usize>,
    v: Vec<f64>,
    b: Vec<f64>,
}

impl Rows {
    fn row(&mut self, entries: &[(usize, f64)], rhs: f64) {
        let r = self.b.len();
        for &(j, v) in entries {
            if v != 0.0 {
                self.i.push(r);
                self.j.push(j);
                self.v.push(v);
            }
        }
        self.b.push(rhs);
    }
}

fn solve(inputs: &RegionSystemInputs, h2_kg: f64, with_battery: bool) -> Result<SystemDesign> {
    let hours = inputs.hours();
    let gens = &inputs.generators;
    let lay = Layout {
        ng: gens.len(),
        hours,
        dispatchable: (0..gens.len()).filter(|&i| gens[i].dispatchable()).collect(),
        battery: with_battery,
    };
    let n = lay.n();
    let target_total = target_total_mwh(inputs, h2_kg);
    // Work in units of the mean electrolyzer load so the LP is well scaled.
    let p0 = target_total / hours as f64;
    let c_e = inputs.electrolyzer.annual_cost_eur_per_mw();

    let mut q = vec![0.0; n];
    for (i, g) in gens.iter().enumerate() {
        q[i] = g.costs.annual_cost_eur_per_mw() / c_e;
    }
    q[lay.e()] = 1.0;
    let eps = 1e-8 / hours as f64;
    for k in 0..lay.dispatchable.len() {
        for t in 0..hours {
            q[lay.g(k, t)] = eps;
        }
    }
    let eta = if let (true, Some(b)) = (with_battery, &inputs.battery) {
        q[lay.be()] = b.energy.annual_cost_eur_per_mw() / c_e;
        q[lay.bp()] = b.power.annual_cost_eur_per_mw() / c_e;
        for t in 0..hours {
            q[lay.c(t)] = eps;
        }
        b.round_trip_efficiency.sqrt()
    } else {
        1.0
    };

    let mut rows = Rows::default();
    let inv_h = 1.0 / hours as f64;
    let sum_p: Vec<(usize, f64)> = (0..hours).map(|t| (lay.p(t), inv_h)).collect();
    rows.row(&sum_p, 1.0);
    if with_battery {
        for t in 0..hours {
            let prev = if t == 0 { hours - 1 } else { t - 1 };
            rows.row(
                &[(lay.s(t), 1.0), (lay.s(prev), -1.0), (lay.c(t), -eta), (lay.d(t), 1.0 / eta)],
                0.0,
            );
        }
    }
    let n_eq = rows.b.len();

    let mut entries = Vec::with_capacity(gens.len() + 4);
    for t in 0..hours {
        entries.clear();
        entries.push((lay.p(t), 1.0));
        for (i, g) in gens.iter().enumerate() {
            if !g.dispatchable() {
                entries.push((i, -g.profile.capacity_factor[t]));
            }
        }
        for k in 0..lay.dispatchable.len() {
            entries.push((lay.g(k, t), -1.0));
        }
        if with_battery {
            entries.push((lay.d(t), -1.0));
            entries.push((lay.c(t), 1.0));
        }
        rows.row(&entries, 0.0);
        rows.row(&[(lay.p(t), 1.0), (lay.e(), -1.0)], 0.0);
        for (k, &i) in lay.dispatchable.iter().enumerate() {
            rows.row(&[(lay.g(k, t), 1.0), (i, -gens[i].profile.capacity_factor[t])], 0.0);
        }
        if with_battery {
            rows.row(&[(lay.s(t), 1.0), (lay.be(), -1.0)], 0.0);
            rows.row(&[(lay.c(t), 1.0), (lay.bp(), -1.0)], 0.0);
            rows.row(&[(lay.d(t), 1.0), (lay.bp(), -1.0)], 0.0);
        }
    }
    for (i, g) in gens.iter().enumerate() {
        rows.row(&[(i, 1.0)], g.ceiling_mw / p0);
    }
    for j in 0..n {
        rows.row(&[(j, -1.0)], 0.0);
    }
    let m = rows.b.len();

    let a = CscMatrix::new_from_triplets(m, n, rows.i, rows.j, rows.v);
    let pmat = CscMatrix::<f64>::zeros((n, n));
    let cones = [SupportedConeT::ZeroConeT(n_eq), SupportedConeT::NonnegativeConeT(m - n_eq)];
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .max_iter(400)
        .build()
        .map_err(|e| Error::Solver(format!("{e:?}")))?;
    let mut solver = DefaultSolver::new(&pmat, &q, &a, &rows.b, &cones, settings)
        .map_err(|e| Error::Solver(format!("{e:?}")))?;
    solver.solve();
    match solver.solution.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => {}
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            return Err(Error::Infeasible {
                message: format!("region '{}': no design meets the target", inputs.region_id),
                binding: gens.iter().map(|g| g.name.clone()).collect(),
            })
        }
        s => {
            return Err(Error::Solver(format!(
                "region '{}': solver stopped with {s:?} after {} iterations",
                inputs.region_id, solver.info.iterations
            )))
        }
    }
    let x = &solver.solution.x;

    let caps: Vec<f64> = gens
        .iter()
        .enumerate()
        .map(|(i, g)| (x[i] * p0).clamp(0.0, g.ceiling_mw))
        .collect();
    let mut p: Vec<f64> = (0..hours).map(|t| (x[lay.p(t)] * p0).max(0.0)).collect();
    let got = sum(p.iter().copied());
    if got > 0.0 {
        let k = target_total / got;
        p.iter_mut().for_each(|v| *v *= k);
    }
    let e = (x[lay.e()] * p0).max(p.iter().copied().fold(0.0, f64::max));

    let mut unit: Vec<Vec<f64>> = Vec::with_capacity(gens.len());
    for (i, g) in gens.iter().enumerate() {
        if let Some(k) = lay.dispatchable.iter().position(|&d| d == i) {
            unit.push(
                (0..hours)
                    .map(|t| (x[lay.g(k, t)] * p0).clamp(0.0, caps[i] * g.profile.capacity_factor[t]))
                    .collect(),
            );
        } else {
            unit.push(g.profile.capacity_factor.iter().map(|cf| cf * caps[i]).collect());
        }
    }
    let generation: Vec<f64> = (0..hours).map(|t| sum(unit.iter().map(|u| u[t]))).collect();

    let (battery, charge, discharge, soc) = if with_battery {
        let pick = |f: &dyn Fn(usize) -> usize| -> Vec<f64> { (0..hours).map(|t| (x[f(t)] * p0).max(0.0)).collect() };
        (
            ((x[lay.be()] * p0).max(0.0), (x[lay.bp()] * p0).max(0.0)),
            pick(&|t| lay.c(t)),
            pick(&|t| lay.d(t)),
            pick(&|t| lay.s(t)),
        )
    } else {
        ((0.0, 0.0), Vec::new(), Vec::new(), Vec::new())
    };

    Ok(assemble(
        inputs,
        h2_kg,
        caps,
        unit,
        e,
        battery,
        Dispatch {
            generation_mw: generation,
            electrolyzer_mw: p,
            charge_mw: charge,
            discharge_mw: discharge,
            state_of_charge_mwh: soc,
        },
    ))
}
