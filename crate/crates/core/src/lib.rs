//! Numerical calculus of bilinear pseudodifferential operators in the
//! Hormander classes `BS^m_{rho, delta}` on periodic grids.

pub mod asym;
pub mod bounds;
pub mod error;
pub mod fit;
pub mod fourier;
pub mod kernel;
pub mod multiindex;
pub mod operator;
mod par;
pub mod symbol;
pub mod tolerances;
pub mod transpose;

pub use error::{Error, Result};
pub use fourier::{GridFunction, GridSpec, Spectrum, C64};
pub use multiindex::MultiIndex;
