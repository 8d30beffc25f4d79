//! Closed-loop spare-parts simulation: survival-driven demand generation,
//! intermittent-demand forecasting, inventory cost simulation and the
//! analysis linking forecast accuracy to operational cost.

pub mod analysis;
pub mod config;
pub mod demand_gen;
pub mod error;
pub mod forecasting;
pub mod inventory_sim;
pub mod io;
pub mod metrics;
pub mod num;
pub mod pipeline;
pub mod records;
pub mod seasonality;
pub mod survival;

pub use config::SimConfig;
pub use error::{Error, Result};
pub use num::Scalar;

pub type HazardModel = survival::HazardModel<f64>;
pub type MedianSpec = survival::MedianSpec<f64>;
pub type SeasonalProfile = seasonality::SeasonalProfile<f64>;
pub type SeasonalCatalog = seasonality::SeasonalCatalog<f64>;
pub type ForecastSeries = forecasting::ForecastSeries<f64>;
pub type RegressionResult = analysis::RegressionResult<f64>;
