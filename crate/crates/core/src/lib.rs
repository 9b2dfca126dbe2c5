//! Weight- and robustness-based quantifiers of coherence and asymmetry.
//!
//! The crate is layered: [`linalg`] provides Hermitian matrices and spectral tools,
//! [`states`] builds the state families and free operations, [`sdp`] is a small dense
//! interior-point solver with encoders for every weight and robustness program,
//! [`measures`] is the public quantifier API and [`harness`] drives the numerical
//! experiments.
//!
//! ```
//! use resource_weight::{measures, states};
//!
//! let rho = states::werner(2, 0.5).unwrap();
//! let report = measures::coherence_weight(&rho).unwrap();
//! assert!((report.value - 0.5).abs() < 1e-6);
//! ```

pub mod error;
pub mod harness;
pub mod linalg;
pub mod measures;
pub mod sdp;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{DensityMatrix, HermitianMatrix};
pub use measures::MeasureReport;
pub use states::{FreeSet, UnitaryRep};
