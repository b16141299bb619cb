//! Numerical laboratory: Hardy quotients, uncertainty products, weak
//! H-concavity sampling and the Lipschitz probe. Everything here is `f64`.

pub mod concavity;
pub mod lipschitz;
pub mod quadrature;
pub mod quotient;

pub use concavity::{
    concavity_sampling, cube_concavity_sampling, h_concavity_counterexample_search, h_concavity_sample,
    log_log_slope, ConcavitySample, ConcavitySummary, Counterexample, CounterexampleReport,
};
pub use lipschitz::{lipschitz_probe, lipschitz_ratio, LipschitzReport};
pub use quadrature::{Cutoff, Profile};
pub use quotient::{
    epsilon_sweep, hardy_quotient, torus_collar_mass, u_ceiling, uncertainty_check, QuadratureSpec,
    QuotientDomain, QuotientReport, SweepReport, TestFunctionSpec, UncertaintyReport,
};
