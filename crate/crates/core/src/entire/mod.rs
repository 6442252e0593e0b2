//! Genus-one canonical products over finite zero sets and their growth
//! functionals.

mod functionals;
mod harmonic;
mod product;
mod zeros;

pub use functionals::{
    alpha_p, analyze, direction_slope, exponential_type, gamma_sums, has_balanced_real_growth, p_key, proximity,
    AlphaValue, CartwrightReport, GammaSums, Side, TypeEstimate, CARTWRIGHT_TOL, DIVERGENCE_CAP,
};
pub use harmonic::{
    arc_kernel, carleman_formula_residual, half_disc_kernel_bounds, line_kernel, nevanlinna_green_reconstruct,
    CarlemanResidual, HarmonicTest,
};
pub use product::{counting_function, log_primary_modulus, primary_factor, signed_counting, CanonicalProduct};
pub use zeros::{Zero, ZeroSet, REAL_AXIS_TOL};
