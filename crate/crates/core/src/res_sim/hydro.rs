use super::profile::GenerationProfile;
use crate::error::{Error, Result};

/// Longest tolerated stretch of missing data.
pub const MAX_GAP_HOURS: f64 = 720.0;

/// Median spacing of the source timestamps, its nominal cadence.
fn cadence(times_h: &[f64]) -> f64 {
    let mut d: Vec<f64> = times_h.windows(2).map(|w| w[1] - w[0]).collect();
    if d.is_empty() {
        return 0.0;
    }
    d.sort_by(f64::total_cmp);
    d[(d.len() - 1) / 2]
}

/// Linear interpolation of a (time in hours, cf) series onto hour midpoints `0.5, 1.5, ...`.
/// Outside the source span the nearest end value is held. A gap is an interval that
/// exceeds the series' nominal cadence by more than 30 days, so coarse series such
/// as monthly means or a two-point ramp are accepted.
pub fn resample_hydro(times_h: &[f64], values: &[f64], hours: usize) -> Result<GenerationProfile> {
    if times_h.is_empty() || times_h.len() != values.len() {
        return Err(Error::Input("hydro source needs equal, non-empty time and value series".into()));
    }
    if times_h.iter().chain(values).any(|v| !v.is_finite()) {
        return Err(Error::Input("hydro source holds non-finite samples".into()));
    }
    if let Some(k) = times_h.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::Input(format!("hydro timestamps not strictly increasing at sample {}", k + 1)));
    }
    let step = cadence(times_h);
    if let Some(k) = times_h.windows(2).position(|w| w[1] - w[0] - step > MAX_GAP_HOURS) {
        return Err(Error::DataQuality(format!(
            "hydro series gap of {} h after t = {} h exceeds 30 days",
            times_h[k + 1] - times_h[k],
            times_h[k]
        )));
    }
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Input(format!("hydro capacity factor {v} outside [0,1]")));
    }
    let n = times_h.len();
    let mut k = 0usize;
    let cf = (0..hours)
        .map(|h| {
            let t = h as f64 + 0.5;
            if t <= times_h[0] {
                return values[0];
            }
            if t >= times_h[n - 1] {
                return values[n - 1];
            }
            while times_h[k + 1] < t {
                k += 1;
            }
            let f = (t - times_h[k]) / (times_h[k + 1] - times_h[k]);
            values[k] + f * (values[k + 1] - values[k])
        })
        .collect();
    GenerationProfile::new(cf)
}

/// Mean of the piecewise-linear source over `[0, hours]`, ends held flat.
pub fn trapezoid_mean(times_h: &[f64], values: &[f64], hours: f64) -> f64 {
    let n = times_h.len();
    let at = |t: f64| -> f64 {
        if t <= times_h[0] {
            return values[0];
        }
        if t >= times_h[n - 1] {
            return values[n - 1];
        }
        let k = times_h.partition_point(|&x| x <= t) - 1;
        values[k] + (t - times_h[k]) / (times_h[k + 1] - times_h[k]) * (values[k + 1] - values[k])
    };
    let mut knots: Vec<f64> = vec![0.0];
    knots.extend(times_h.iter().copied().filter(|&t| t > 0.0 && t < hours));
    knots.push(hours);
    let mut area = 0.0;
    for w in knots.windows(2) {
        area += 0.5 * (at(w[0]) + at(w[1])) * (w[1] - w[0]);
    }
    area / hours
}
