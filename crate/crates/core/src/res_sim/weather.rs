use std::path::Path;

use serde::Deserialize;

use super::profile::HOURS_PER_YEAR;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSeries {
    pub location: usize,
    pub ghi_w_per_m2: Vec<f64>,
    pub air_temp_c: Vec<f64>,
    pub wind_speed_ms_at_ref: Vec<f64>,
    pub ref_height_m: f64,
}

#[derive(Debug, Deserialize)]
struct WeatherRow {
    hour_index: usize,
    ghi: f64,
    temp_c: f64,
    wind_ms: f64,
}

impl WeatherSeries {
    pub fn new(
        location: usize,
        ghi_w_per_m2: Vec<f64>,
        air_temp_c: Vec<f64>,
        wind_speed_ms_at_ref: Vec<f64>,
        ref_height_m: f64,
    ) -> Result<Self> {
        let w = WeatherSeries {
            location,
            ghi_w_per_m2,
            air_temp_c,
            wind_speed_ms_at_ref,
            ref_height_m,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.ghi_w_per_m2.len();
        if n == 0 || n % HOURS_PER_YEAR != 0 {
            return Err(Error::Input(format!(
                "weather series length {n} is not a positive multiple of {HOURS_PER_YEAR}"
            )));
        }
        if self.air_temp_c.len() != n || self.wind_speed_ms_at_ref.len() != n {
            return Err(Error::Input("weather series lengths differ".into()));
        }
        if let Some(i) = self.ghi_w_per_m2.iter().position(|&g| !(g >= 0.0 && g.is_finite())) {
            return Err(Error::Input(format!("negative or non-finite ghi at hour {i}")));
        }
        if let Some(i) = self.wind_speed_ms_at_ref.iter().position(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::Input(format!("negative or non-finite wind speed at hour {i}")));
        }
        if let Some(i) = self.air_temp_c.iter().position(|t| !t.is_finite()) {
            return Err(Error::Input(format!("non-finite temperature at hour {i}")));
        }
        if !(self.ref_height_m > 0.0) {
            return Err(Error::Input("reference height must be positive".into()));
        }
        Ok(())
    }

    pub fn hours(&self) -> usize {
        self.ghi_w_per_m2.len()
    }

    /// Reads `hour_index,ghi,temp_c,wind_ms` rows; hour_index must count up from 0.
    pub fn load_csv(path: impl AsRef<Path>, location: usize, ref_height_m: f64) -> Result<Self> {
        let path = path.as_ref();
        let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
        let (mut ghi, mut temp, mut wind) = (Vec::new(), Vec::new(), Vec::new());
        for (k, row) in rdr.deserialize::<WeatherRow>().enumerate() {
            let row = row.map_err(|e| csv_err(path, e))?;
            if row.hour_index != k {
                return Err(Error::parse(
                    path.display().to_string(),
                    k + 2,
                    format!("hour_index {} out of sequence, expected {k}", row.hour_index),
                ));
            }
            ghi.push(row.ghi);
            temp.push(row.temp_c);
            wind.push(row.wind_ms);
        }
        Self::new(location, ghi, temp, wind, ref_height_m)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
        w.write_record(["hour_index", "ghi", "temp_c", "wind_ms"]).map_err(|e| csv_err(path, e))?;
        for i in 0..self.hours() {
            w.write_record([
                i.to_string(),
                format!("{:?}", self.ghi_w_per_m2[i]),
                format!("{:?}", self.air_temp_c[i]),
                format!("{:?}", self.wind_speed_ms_at_ref[i]),
            ])
            .map_err(|e| csv_err(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Site variant with irradiance and wind speed scaled by the given factors.
    pub fn scaled(&self, ghi_factor: f64, wind_factor: f64) -> WeatherSeries {
        WeatherSeries {
            location: self.location,
            ghi_w_per_m2: self.ghi_w_per_m2.iter().map(|g| g * ghi_factor).collect(),
            air_temp_c: self.air_temp_c.clone(),
            wind_speed_ms_at_ref: self.wind_speed_ms_at_ref.iter().map(|v| v * wind_factor).collect(),
            ref_height_m: self.ref_height_m,
        }
    }
}

pub(crate) fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::csv(path, e)
}
