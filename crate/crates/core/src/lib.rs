//! Numerical laboratory for the one-dimensional Schrödinger-Debye system
//!
//! ```text
//! i u_t + ½ u_xx = u v,    σ v_t + v = ε |u|²
//! ```
//!
//! Pseudospectral split-step integration, Bourgain-type space-time norms,
//! the I-operator and modified energy, and scaling audits of the explicit
//! counter-example families for the bilinear estimates.

pub mod audit;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod norms;
pub mod quadrature;
pub mod rational;
pub mod report;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{Field, Grid1D, SpaceTimeField, Spectrum, TimeLattice, C64};
