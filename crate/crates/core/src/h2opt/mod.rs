//! Least-cost hydrogen system design and cost-potential curves.

mod curve;
mod design;
mod dispatch;
mod inputs;
mod lp;
mod national;

pub use curve::{
    cost_potential_curve, groundwater_feasible_share, validate_steps, CostPotentialCurve, CurvePoint, StepWater,
    WaterShareReport, DEFAULT_STEPS,
};
pub use design::{fixed_mix_design, Dispatch, GeneratorCapacity, SystemDesign};
pub use dispatch::{generation_series, min_electrolyzer_mw};
pub use inputs::{
    default_efficiency_kwh_per_kg, energy_ratio, h2_potential_from_generation_twh, kg_to_twh, max_h2_potential,
    twh_to_kg, Battery, Generator, RegionSystemInputs, H2_LHV_KWH_PER_KG,
};
pub use lp::optimize_system;
pub use national::{
    aggregate_national, demand_set_aside, region_segments, CurveSegment, DemandInput, NationalCurve, SetAside,
    StepMean,
};
