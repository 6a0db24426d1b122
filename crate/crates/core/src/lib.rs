//! Estimators for the unseen size of a population of randomly flaring subjects.
//!
//! Every estimator consumes a frequency-of-frequencies table: `n_k` is the number
//! of subjects observed exactly `k` times, and `n_0` (the subjects never observed)
//! is what we are after. The crate provides
//!
//! - [`counts`]: frequency tables, event logs and their CSV formats,
//! - [`numerics`]: the truncated-Poisson rate solver, Stirling numbers of the
//!   second kind and adaptive Gauss-Kronrod quadrature,
//! - [`estimators`]: point estimators, two-sided bounds, variances and the
//!   heterogeneity diagnostic,
//! - [`predictors`]: binomial-thinning projection and new-discovery predictors,
//! - [`simulator`]: a seeded mixed-Poisson population simulator and the
//!   closed-form mixture probabilities used as verification oracles,
//! - [`cli`]: the `flarecount` command-line front end.
//!
//! ```
//! use flarecount::counts::FrequencyTable;
//! use flarecount::estimators::ambartsumian_bounds;
//!
//! let table = FrequencyTable::from_pairs([(1, 10), (2, 5)]).unwrap();
//! let (lower, upper) = ambartsumian_bounds(&table).unwrap();
//! assert_eq!(lower.value, 10.0);
//! assert_eq!(upper.value, 20.0);
//! ```

#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod counts;
pub mod error;
pub mod estimators;
pub mod numerics;
pub mod predictors;
pub mod simulator;

pub use error::{Error, Result};
