//! Two-phase Moran measures: closed-form multifractal spectra and the
//! finite-scale estimators that cross-check them.

pub mod auxiliary;
pub mod config;
pub mod ext;
pub mod model;
pub mod numerics;
pub mod estimators;
pub mod spectra;
pub mod table;

pub use auxiliary::{AuxSpec, AuxTarget};
pub use ext::ExtReal;
pub use model::{LevelSchedule, ModelError, ModelParams, Word};
pub use spectra::{BetaFunction, Dim, DimKind, Spectra};
