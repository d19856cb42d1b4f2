pub mod config;
pub mod eligibility;
pub mod error;
pub mod geodata;
pub mod h2opt;
pub mod numeric;
pub mod pipeline;
pub mod res_sim;
pub mod socio;
pub mod tech;
pub mod water;

pub use error::{Error, Result};
pub use tech::Technology;
