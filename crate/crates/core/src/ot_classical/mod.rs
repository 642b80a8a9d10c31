//! Classical Monge and Kantorovich transport: exact discrete solvers,
//! closed-form maps on the line and between Gaussians, and an independent
//! vertex-enumeration oracle.

mod discrete;
mod gaussian;
mod network_simplex;
mod one_dim;
mod plan;
mod wasserstein;

pub use discrete::{
    brute_force_kantorovich, solve_kantorovich, solve_kantorovich_with, solve_monge_discrete,
    solve_monge_discrete_with_tolerance, KantorovichSolution, BRUTE_FORCE_MAX_CELLS,
    MONGE_MAX_SOURCE_ATOMS, PUSHFORWARD_TOLERANCE,
};
pub use gaussian::{
    gaussian_monge_map, gaussian_w2_squared, grid_gaussian_2d, matrix_inv_sqrt_spd,
    matrix_sqrt_spd, GaussianPair,
};
pub use network_simplex::PivotRule;
pub use one_dim::{monge_map_1d, Continuous1d};
pub use plan::{CostMatrix, TransportPlan, MARGINAL_TOLERANCE};
pub use wasserstein::{check_metric, wasserstein_p, METRIC_TOLERANCE};

pub(crate) use wasserstein::check_exponent;
