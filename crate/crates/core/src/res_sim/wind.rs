use std::path::Path;

use serde::{Deserialize, Serialize};

use super::profile::GenerationProfile;
use super::weather::{csv_err, WeatherSeries};
use crate::error::{Error, Result};

/// Tabulated power curve, linearly interpolated between points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCurve {
    pub speeds_ms: Vec<f64>,
    pub power_kw: Vec<f64>,
    /// Output is zero above this speed.
    pub cut_out_ms: f64,
}

impl PowerCurve {
    pub fn new(speeds_ms: Vec<f64>, power_kw: Vec<f64>, cut_out_ms: f64) -> Result<Self> {
        let c = PowerCurve {
            speeds_ms,
            power_kw,
            cut_out_ms,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.speeds_ms.len();
        if n < 2 || self.power_kw.len() != n {
            return Err(Error::Input("power curve needs at least two (speed, power) pairs".into()));
        }
        if self.speeds_ms.iter().chain(&self.power_kw).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Input("power curve values must be finite and >= 0".into()));
        }
        if self.speeds_ms.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("power curve speeds must be strictly increasing".into()));
        }
        let rated = self.rated_kw();
        if rated <= 0.0 {
            return Err(Error::Input("power curve never produces power".into()));
        }
        let rated_at = self.power_kw.iter().position(|&p| p == rated).unwrap();
        if let Some(k) = self.power_kw[..=rated_at].windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::Input(format!(
                "power curve decreases between {} and {} m/s below rated speed",
                self.speeds_ms[k],
                self.speeds_ms[k + 1]
            )));
        }
        if !(self.cut_out_ms > self.speeds_ms[rated_at]) {
            return Err(Error::Input("cut-out speed must exceed rated speed".into()));
        }
        Ok(())
    }

    pub fn rated_kw(&self) -> f64 {
        self.power_kw.iter().copied().fold(0.0, f64::max)
    }

    /// Speed of the first point with positive output.
    pub fn cut_in_ms(&self) -> f64 {
        let k = self.power_kw.iter().position(|&p| p > 0.0).unwrap_or(0);
        if k == 0 { self.speeds_ms[0] } else { self.speeds_ms[k - 1] }
    }

    pub fn power_at(&self, v: f64) -> f64 {
        let s = &self.speeds_ms;
        if v > self.cut_out_ms || v < s[0] {
            return 0.0;
        }
        let n = s.len();
        if v >= s[n - 1] {
            return self.power_kw[n - 1];
        }
        let k = s.partition_point(|&x| x <= v) - 1;
        let t = (v - s[k]) / (s[k + 1] - s[k]);
        self.power_kw[k] + t * (self.power_kw[k + 1] - self.power_kw[k])
    }

    /// Cubic rise between cut-in and rated speed, tabulated every `step` m/s.
    pub fn cubic(rated_kw: f64, cut_in: f64, rated_speed: f64, cut_out: f64, step: f64) -> Result<Self> {
        let n = (cut_out / step).round() as usize;
        let mut speeds = Vec::with_capacity(n + 1);
        let mut power = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let v = k as f64 * step;
            let p = if v <= cut_in {
                0.0
            } else if v >= rated_speed {
                rated_kw
            } else {
                rated_kw * (v.powi(3) - cut_in.powi(3)) / (rated_speed.powi(3) - cut_in.powi(3))
            };
            speeds.push(v);
            power.push(p);
        }
        PowerCurve::new(speeds, power, cut_out)
    }

    /// Reads `speed_ms,power_kw` rows; the last speed is the cut-out speed.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            speed_ms: f64,
            power_kw: f64,
        }
        let path = path.as_ref();
        let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
        let (mut s, mut p) = (Vec::new(), Vec::new());
        for row in rdr.deserialize::<Row>() {
            let row = row.map_err(|e| csv_err(path, e))?;
            s.push(row.speed_ms);
            p.push(row.power_kw);
        }
        let cut_out = *s.last().ok_or_else(|| Error::Input(format!("{}: empty power curve", path.display())))?;
        // the table's last point is itself still producing; nudge the cut-out past it
        PowerCurve::new(s, p, cut_out + f64::EPSILON * cut_out.max(1.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turbine {
    pub curve: PowerCurve,
    pub hub_height_m: f64,
    pub shear_alpha: f64,
}

impl Default for Turbine {
    fn default() -> Self {
        Turbine {
            curve: PowerCurve::cubic(4200.0, 3.0, 12.0, 25.0, 0.5).expect("default curve is valid"),
            hub_height_m: 120.0,
            shear_alpha: 0.14,
        }
    }
}

impl Turbine {
    pub fn hub_speed(&self, v_ref: f64, ref_height_m: f64) -> f64 {
        v_ref * (self.hub_height_m / ref_height_m).powf(self.shear_alpha)
    }

    pub fn capacity_factor(&self, v_ref: f64, ref_height_m: f64) -> f64 {
        (self.curve.power_at(self.hub_speed(v_ref, ref_height_m)) / self.curve.rated_kw()).clamp(0.0, 1.0)
    }
}

pub fn simulate_wind(weather: &WeatherSeries, turbine: &Turbine) -> Result<GenerationProfile> {
    turbine.curve.validate()?;
    if !(turbine.hub_height_m > 0.0) {
        return Err(Error::Input("hub height must be positive".into()));
    }
    let cf = weather
        .wind_speed_ms_at_ref
        .iter()
        .map(|&v| turbine.capacity_factor(v, weather.ref_height_m))
        .collect();
    GenerationProfile::new(cf)
}
