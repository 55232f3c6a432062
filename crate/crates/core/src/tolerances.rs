//! Numerical tolerances and solver budgets, collected in one place.
//!
//! Every threshold used by the projections, the optimizers and the test
//! suites is read from [`Tolerances`]; nothing else in the crate hard-codes
//! a convergence constant.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Largest |sum - 1| accepted (and silently renormalized) for inputs.
    pub normalization: f64,
    /// Max absolute marginal deviation at which IPF stops.
    pub ipf_marginal: f64,
    pub ipf_max_sweeps: usize,
    /// Width of the final golden-section bracket.
    pub golden_section: f64,
    /// Default upper end of the beta bracket for the decoding model.
    pub beta_max: f64,
    /// Multiplier applied once when the beta minimum hits the upper end.
    pub beta_widen: f64,
    /// Gradient infinity-norm at which quasi-Newton stops.
    pub qn_gradient: f64,
    pub qn_max_iters: usize,
    /// Constraint infinity-norm required from the augmented Lagrangian.
    pub al_residual: f64,
    /// Lagrangian gradient infinity-norm required from the augmented Lagrangian.
    pub al_lagrangian_gradient: f64,
    pub al_max_rounds: usize,
    pub al_penalty_growth: f64,
    pub al_initial_penalty: f64,
    /// Number of seeded restarts for the geometric projection.
    pub g_restarts: usize,
    /// Weight of the uniform table mixed into inputs with empty cells.
    pub smoothing: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        normalization: 1e-9,
        ipf_marginal: 1e-10,
        ipf_max_sweeps: 10_000,
        golden_section: 1e-8,
        beta_max: 10.0,
        beta_widen: 10.0,
        qn_gradient: 1e-9,
        qn_max_iters: 500,
        al_residual: 1e-8,
        al_lagrangian_gradient: 1e-7,
        al_max_rounds: 8,
        al_penalty_growth: 10.0,
        al_initial_penalty: 100.0,
        g_restarts: 5,
        smoothing: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
