//! Numerical kernels shared by the estimators and the simulator.

mod quadrature;
mod root;
mod stirling;

pub use quadrature::{integrate, Quadrature, DEFAULT_TOLERANCE};
pub use root::{solve_truncated_rate, truncated_mean_ratio, RootConfig};
pub use stirling::{
    stirling2, stirling2_log, stirling_ratio_exact, stirling_ratio_log, Stirling2LogRows,
    Stirling2Rows,
};
