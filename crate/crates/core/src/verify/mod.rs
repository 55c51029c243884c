//! Numerical checks of dual inequalities on finite families of test
//! functions: inf-convolutions on grids, margins, and seeded suites.

mod checks;
mod function;
mod suite;

pub use checks::{
    bg_dual_check, dual_product_check, inf_convolution, maurey_check, poincare_check, InfConvolution,
};
pub use function::{Extension, GridFunction};
pub use suite::{
    random_lipschitz_functions, run_suite, suite_knots, suite_margin, Suite, SuiteConfig, SuiteReport, SuiteRow,
};
