//! Truncated Fourier representation of divergence-free fields on the torus.

mod basis;
mod field;
mod grid;
pub mod io;
mod ops;

pub use basis::{normalized_test_fields, ModeBasis, ModeField};
pub use field::{FourierField, SobolevLevel};
pub use grid::TorusGrid;
pub(crate) use ops::heat_in_place;
pub use ops::{
    heat_propagate, laplacian, leray_project, nonlinearity_b, smoothing_apply, sobolev_norm,
    transport_apply, transport_pseudo_spectral, transport_sparse, SPARSE_TRANSPORT_LIMIT,
};
