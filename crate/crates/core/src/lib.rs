//! One-dimensional optimal transport through quantile couplings, together
//! with the functional-inequality criteria that decide whether a measure on
//! the line satisfies a transport-entropy inequality.
//!
//! The crate is organised bottom-up:
//!
//! * [`costfn`]: convex costs `α` with generalized inverses;
//! * [`dist1d`]: measures exposed through log-tail masses and quantiles;
//! * [`transport`]: monotone maps, the Hoeffding coupling, transport costs
//!   and an exact small-instance oracle;
//! * [`criteria`]: Muckenhoupt and Bobkov–Götze functionals, exponential
//!   moments of conditional tails, contraction constants;
//! * [`constants`]: explicit constant chains between the equivalent
//!   formulations;
//! * [`examples`]: the four explicit constructions with their checkable
//!   claims;
//! * [`verify`]: grid checkers for the dual inf-convolution inequalities
//!   and the Poincaré inequality.

pub mod constants;
pub mod costfn;
pub mod criteria;
pub mod dist1d;
pub mod error;
pub mod examples;
pub mod extended;
pub mod grid;
pub mod quad;
pub mod transport;
pub mod verify;

pub use costfn::CostFunction;
pub use criteria::CriterionReport;
pub use dist1d::{Distribution1D, Side};
pub use error::{Error, Result};
pub use grid::GridSpec;
pub use transport::{transport_cost, MonotoneMap, TransportCost};
