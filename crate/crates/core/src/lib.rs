//! Steady state and thermometric precision of a quantum Brownian probe
//! strongly coupled to a thermal sample.
//!
//! Every solver is generic over [`scalar::Real`]; the aliases below fix
//! the scalar to `f64`, and [`single`] to `f32`.

// `!(x > 0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod figures;
pub mod metrology;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod spectral;
pub mod star;
pub mod steady_state;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub type SpectralModel = spectral::SpectralModel<f64>;
pub type ProbeSpec = steady_state::ProbeSpec<f64>;
pub type CovarianceMatrix = steady_state::CovarianceMatrix<f64>;
pub type SteadyState = steady_state::SteadyState<f64>;
pub type SensitivityReport = metrology::SensitivityReport<f64>;
pub type StarSystem = star::StarSystem<f64>;
pub type NormalModes = star::NormalModes<f64>;

/// `f32` instantiations.
pub mod single {
    pub type SpectralModel = crate::spectral::SpectralModel<f32>;
    pub type ProbeSpec = crate::steady_state::ProbeSpec<f32>;
    pub type CovarianceMatrix = crate::steady_state::CovarianceMatrix<f32>;
    pub type StarSystem = crate::star::StarSystem<f32>;
}
