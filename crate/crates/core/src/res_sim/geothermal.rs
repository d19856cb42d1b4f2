use super::profile::GenerationProfile;
use crate::error::{Error, Result};

/// Flat availability ceiling; the optimizer dispatches anywhere below it.
pub fn geothermal_profile(availability: f64, hours: usize) -> Result<GenerationProfile> {
    if !(availability > 0.0 && availability <= 1.0) {
        return Err(Error::Input(format!("geothermal availability {availability} outside (0,1]")));
    }
    GenerationProfile::flat(availability, hours)
}
