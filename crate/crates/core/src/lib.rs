//! Spectral simulation of the modified Constantin–Lax–Majda family on the
//! circle, as an Eulerian PDE and as a geodesic flow on the group of
//! basepoint-fixing diffeomorphisms.

pub mod diffeo;
pub mod error;
pub mod flows;
pub mod multiplier;
pub mod spectral;

pub use diffeo::{compose, conjugate, conjugation_derivative, inner_product, invert, make_diffeo, Diffeo, TangentVector};
pub use error::{Error, Result};
pub use multiplier::{apply_multiplier, apply_p_n, MultilinearSymbol, MultiplierSymbol};
pub use spectral::{analyze, synthesize, SobolevIndex, SpectralFunction, Spectrum};
