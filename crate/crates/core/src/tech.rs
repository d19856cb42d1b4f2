use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technology {
    Pv,
    Wind,
    Hydro,
    Geothermal,
}

impl Technology {
    pub const ALL: [Technology; 4] = [
        Technology::Pv,
        Technology::Wind,
        Technology::Hydro,
        Technology::Geothermal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Technology::Pv => "pv",
            Technology::Wind => "wind",
            Technology::Hydro => "hydro",
            Technology::Geothermal => "geothermal",
        }
    }

    /// Technologies sited through land eligibility.
    pub fn is_land_placed(self) -> bool {
        !matches!(self, Technology::Hydro)
    }
}

impl fmt::Display for Technology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Technology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pv" => Ok(Technology::Pv),
            "wind" => Ok(Technology::Wind),
            "hydro" => Ok(Technology::Hydro),
            "geothermal" => Ok(Technology::Geothermal),
            other => Err(Error::Input(format!("unknown technology '{other}'"))),
        }
    }
}
