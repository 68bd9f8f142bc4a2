//! Margin-regularized nearest-neighbor classification in metric spaces.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! * [`metric`]: points, metric oracles, unit-diameter normalization and a
//!   net-counting doubling-dimension estimator.
//! * [`ann`]: exact nearest-neighbor search and a hierarchical-net
//!   `(1+eta)`-approximate index, including per-label queries.
//! * [`classifier`]: scores, margins, the truncated Lipschitz-extension
//!   hypothesis and prediction.
//! * [`bounds`]: metric entropy, Rademacher, `Delta_Rad`, `Delta_fat`,
//!   their minimum, and the dimension-reduction bound.
//! * [`srm`]: conflict graphs, vertex covers and the search over the
//!   Lipschitz constant that produces a trained classifier.
//! * [`bayes`]: synthetic distributions with Lipschitz posteriors and a
//!   Monte-Carlo harness for nearest-neighbor risk against Bayes risk.
//!
//! File formats, ingestion and the command line live in the companion
//! `metric-margin` crate.
#![no_std]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// min/max chains send NaN to a bound; `clamp` would pass it through.
#![allow(clippy::manual_clamp)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod ann;
pub mod bayes;
pub mod bounds;
pub mod classifier;
mod error;
pub(crate) mod math;
pub mod metric;
pub mod srm;

pub use error::{Error, Result};
