//! Simulation and verification laboratory for exponential last-passage
//! percolation (LPP) and the TASEP corner growth model.
//!
//! The crate is organized around a deterministic, counter-based random
//! environment shared by every coupled model:
//!
//! * [`environment`] — reproducible Exp(1) bulk weights keyed by lattice site.
//! * [`profiles`] — particle configurations, down-right curve profiles with
//!   their concave corners, and boundary-weight profiles (stationary,
//!   tilted, derived from a curve).
//! * [`lpp`] — dynamic-programming engines for point-to-point,
//!   boundary-profile and point-to-curve passage times, exit points,
//!   geodesics, and an exhaustive enumeration oracle.
//! * [`scaling`] — KPZ-rescaled observables (increment and height processes).
//! * [`coupling`] — basic coupling across models on one environment and the
//!   pathwise comparison/attraction/sandwich checks built on it.
//! * [`tasep`] — continuous-time TASEP simulation and the occupation-time
//!   correspondence with LPP.
//! * [`stats`] — calibrated statistical tests and tail-curve estimation.

pub mod coupling;
pub mod environment;
pub mod error;
pub mod lattice;
pub mod lpp;
pub mod numeric;
pub mod profiles;
pub mod scaling;
pub mod stats;
pub mod sweep;
pub mod tasep;

pub use environment::Environment;
pub use error::{Error, Result};
pub use lattice::LatticePoint;
