//! Precision-aware numerical quadrature.
//!
//! Reproduces, detects and explains the failure of adaptive quadrature on
//! integrands whose double-precision evaluation is destroyed by cancellation,
//! and follows the damage into Fourier-series solutions of the heat equation.

pub mod diagnostics;
pub mod error;
pub mod heat;
pub mod integrands;
pub mod precision;
pub mod quadrature;
pub mod report;
pub mod sobol;
pub mod training;

pub use diagnostics::{noise_floor, recommend_regime, NoiseReport, Recommendation};
pub use error::*;
pub use heat::{bias_profile, fourier_coefficient, mode, solution_grid, FourierSeries, HeatConfig, SolutionGrid};
pub use integrands::{
    basis_g, basis_g_cosine, finance_f, phi_delta, phi_exact, sample_initial_condition, Finance,
    FinanceParams, IntegrandVariant, Quartic, QuarticParams,
};
pub use precision::{machine_epsilon, Complex, HpComplex, HpReal, PrecisionContext, Real, Regime};
pub use quadrature::{
    adaptive_lobatto, adaptive_simpson, gauss_kronrod_15, integrate, integrate_contour,
    integrate_with_limits, trapezoid, ContourResult, Integrand, Limits, QuadratureResult, RuleId,
    Tolerances, Warning, Warnings,
};
pub use report::{SweepReport, SweepRow, SweepSpec, SweepTarget};
