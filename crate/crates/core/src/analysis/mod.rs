//! Fixed points of Local SGDA, robust-loss evaluation and numerical checks
//! of the monotonicity and contraction properties the convergence theory
//! relies on.

mod checks;
mod fixed_point;
mod robust;

pub use checks::{
    check_contraction, check_strong_monotonicity, optimality_gap, ContractionReport,
    MonotonicityReport,
};
pub use fixed_point::{
    fixed_point_report, local_sgda_fixed_point_closed_form, simulate_local_sgda_limit,
    FixedPointReport, SimulatedLimit,
};
pub use robust::{robust_loss, RobustLoss};
