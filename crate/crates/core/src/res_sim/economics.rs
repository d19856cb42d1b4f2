use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cost parameters of one component. Battery energy capex is per kWh of storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechnoEconomics {
    pub name: String,
    pub year: u32,
    pub capex_eur_per_kw: f64,
    pub opex_share_per_year: f64,
    pub lifetime_years: u32,
    pub wacc: f64,
}

impl TechnoEconomics {
    pub fn new(name: &str, year: u32, capex_eur_per_kw: f64, opex_share_per_year: f64, lifetime_years: u32, wacc: f64) -> Self {
        TechnoEconomics {
            name: name.to_string(),
            year,
            capex_eur_per_kw,
            opex_share_per_year,
            lifetime_years,
            wacc,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Input(format!("{} {}: {m}", self.name, self.year)));
        if !(self.capex_eur_per_kw > 0.0 && self.capex_eur_per_kw.is_finite()) {
            return bad("capex must be positive");
        }
        if !(self.opex_share_per_year >= 0.0 && self.opex_share_per_year.is_finite()) {
            return bad("opex share must be >= 0");
        }
        if self.lifetime_years < 1 {
            return bad("lifetime must be at least one year");
        }
        if !(self.wacc > 0.0 && self.wacc < 1.0) {
            return bad("wacc must lie in (0,1)");
        }
        Ok(())
    }

    pub fn annuity(&self) -> f64 {
        annuity(self.wacc, self.lifetime_years)
    }

    /// Annualized capex plus opex per kW.
    pub fn annual_cost_eur_per_kw(&self) -> f64 {
        self.capex_eur_per_kw * self.annuity() + self.capex_eur_per_kw * self.opex_share_per_year
    }

    pub fn annual_cost_eur_per_mw(&self) -> f64 {
        1000.0 * self.annual_cost_eur_per_kw()
    }
}

/// Capital recovery factor `w(1+w)^n / ((1+w)^n - 1)`.
pub fn annuity(wacc: f64, lifetime_years: u32) -> f64 {
    let g = (1.0 + wacc).powi(lifetime_years as i32);
    wacc * g / (g - 1.0)
}

/// Levelized cost of electricity in EUR/kWh.
pub fn lcoe(te: &TechnoEconomics, aep_kwh_per_kw: f64) -> Result<f64> {
    te.validate()?;
    if !(aep_kwh_per_kw > 0.0 && aep_kwh_per_kw.is_finite()) {
        return Err(Error::UndefinedCost(format!(
            "{} produces {aep_kwh_per_kw} kWh/kW per year",
            te.name
        )));
    }
    Ok(te.annual_cost_eur_per_kw() / aep_kwh_per_kw)
}

/// Cost table of all components for one year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTable {
    pub pv: TechnoEconomics,
    pub wind: TechnoEconomics,
    pub hydro: TechnoEconomics,
    pub geothermal: TechnoEconomics,
    pub electrolyzer: TechnoEconomics,
    pub battery_energy: TechnoEconomics,
    pub battery_power: TechnoEconomics,
}

pub const SUPPORTED_YEARS: [u32; 4] = [2020, 2030, 2040, 2050];

impl CostTable {
    /// Surrogate defaults, not published values.
    pub fn defaults(year: u32) -> Result<CostTable> {
        let k = match year {
            2020 => 0,
            2030 => 1,
            2040 => 2,
            2050 => 3,
            _ => return Err(Error::Input(format!("no default cost table for year {year}"))),
        };
        let pick = |v: [f64; 4]| v[k];
        let wacc = 0.08;
        Ok(CostTable {
            pv: TechnoEconomics::new("pv", year, pick([500.0, 380.0, 320.0, 280.0]), 0.017, 25, wacc),
            wind: TechnoEconomics::new("wind", year, pick([1300.0, 1150.0, 1080.0, 1030.0]), 0.025, 25, wacc),
            hydro: TechnoEconomics::new("hydro", year, 2500.0, 0.02, 50, wacc),
            geothermal: TechnoEconomics::new("geothermal", year, 4700.0, 0.025, 30, wacc),
            electrolyzer: TechnoEconomics::new("electrolyzer", year, pick([1000.0, 700.0, 500.0, 400.0]), 0.03, 20, wacc),
            battery_energy: TechnoEconomics::new("battery_energy", year, pick([280.0, 200.0, 150.0, 120.0]), 0.015, 15, wacc),
            battery_power: TechnoEconomics::new("battery_power", year, pick([160.0, 120.0, 100.0, 80.0]), 0.015, 15, wacc),
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = &TechnoEconomics> {
        [
            &self.pv,
            &self.wind,
            &self.hydro,
            &self.geothermal,
            &self.electrolyzer,
            &self.battery_energy,
            &self.battery_power,
        ]
        .into_iter()
    }

    pub fn validate(&self) -> Result<()> {
        self.iter().try_for_each(TechnoEconomics::validate)
    }

    pub fn generator(&self, tech: crate::tech::Technology) -> &TechnoEconomics {
        use crate::tech::Technology::*;
        match tech {
            Pv => &self.pv,
            Wind => &self.wind,
            Hydro => &self.hydro,
            Geothermal => &self.geothermal,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annuity_closed_form() {
        let te = TechnoEconomics::new("x", 2030, 1000.0, 0.02, 20, 0.08);
        assert!((te.annuity() - 0.101852).abs() < 1e-6);
        let v = lcoe(&te, 2000.0).unwrap();
        assert!((v - 0.060926).abs() < 1e-6);
    }

    #[test]
    fn zero_energy_is_undefined() {
        let te = TechnoEconomics::new("x", 2030, 1000.0, 0.02, 20, 0.08);
        assert!(matches!(lcoe(&te, 0.0), Err(Error::UndefinedCost(_))));
    }

    #[test]
    fn geothermal_default_near_seven_cents() {
        let t = CostTable::defaults(2030).unwrap();
        let v = lcoe(&t.geothermal, 0.9 * 8760.0).unwrap();
        assert!((v - 0.068).abs() < 0.001, "{v}");
    }

    #[test]
    fn later_years_are_not_dearer() {
        let a = CostTable::defaults(2030).unwrap();
        let b = CostTable::defaults(2050).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert!(y.capex_eur_per_kw <= x.capex_eur_per_kw, "{}", x.name);
        }
    }
}
