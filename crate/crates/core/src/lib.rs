//! Stationary matter waves emitted by quantum sources into a uniform force
//! field: Airy functions, the energy Green function, point and Gaussian
//! source currents, and the photodetachment and atom-laser scenarios built
//! on them.
//!
//! Internally everything is computed in the dimensionless variables of
//! [`scaling`]; SI values appear only at the public boundary.

pub mod airy;
pub mod error;
pub mod green;
pub mod output;
pub mod quad;
pub mod scaling;
pub mod scenarios;
pub mod sources;

pub use airy::{airy_all, ComplexAiryPair};
pub use error::{Error, Result};
pub use green::{green_closed, green_oracle, GreenArgs, GreenValue};
pub use output::{write_csv, write_pgm, RasterImage, ScanResult};
pub use scaling::{make_system, Energy, PhysicalSystem, ScaledEnergy, ScaledPoint, ScaledTime};
pub use scenarios::{AtomLaserPreset, DepletionCurve, PhotodetachmentPreset};
pub use sources::{GaussianScaled, GaussianSource, PointSource, SourceModel};
