//! Global least-squares reconstruction of the state family from laser-on
//! coincidence maps at several powers, with Hessian-based error bars.

mod covariance;
mod fit;
mod forward;
mod params;
mod residuals;

pub use covariance::{covariance_from_objective, Covariance, FdSteps};
pub use fit::{errors, fit, FitMethod, FitOptions, FitResult};
pub use forward::{forward, log_likelihood, ForwardModel};
pub use params::{Dataset, FitParams, Observation};
pub use residuals::{residuals, Residuals};
