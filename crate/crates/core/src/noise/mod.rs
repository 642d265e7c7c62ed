//! Fractional Brownian motion, stationary fOU processes and the ε-coupling.

mod coupling;
mod fbm;
mod fou;
pub mod io;
mod spectrum;

pub use coupling::{CoupledNoise, CouplingConfig, EpsilonNoise};
pub use fbm::{fgn_autocovariance, sample_fbm, sample_fbm_with, FbmPath, FgnSampler, CHOLESKY_LIMIT};
pub use fou::{
    ch_constant, coupling_defect, fast_path_covariance, fou_covariance, fou_from_driving, fou_stationary_sample, integrate_fast,
    limit_path, rescale_and_integrate, FouEnsemble, StationaryFouSampler,
};
pub use spectrum::NoiseSpectrum;
