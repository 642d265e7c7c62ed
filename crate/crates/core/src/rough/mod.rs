//! Rough path algebra: lifts, variation norms, sewing and rough integrals.

mod covariance;
mod integral;
pub mod io;
mod lift;
mod path;
mod sewing;
mod variation;

pub use covariance::{
    coutin_qian_check, covariance_grid_norm, CoutinQianReport, CovarianceNorm, CovarianceTable,
    EXACT_COVARIANCE_POINTS,
};
pub use integral::{integral_germ, rough_integral, RoughIntegral};
pub(crate) use integral::check_stride;
pub use lift::{first_level_holder_gap, lift_piecewise_linear, rough_distance, second_level_holder_gap, Level2Area};
pub use path::DiscretePath;
pub use sewing::{delta, sew_continuous, sewing, sewing_constant, zeta, RefinementOptions, SewingOutput};
pub use variation::{holder_norm, p_variation, p_variation_power, partition_variation, ControlFn, NormTag, TwoParamProcess};
