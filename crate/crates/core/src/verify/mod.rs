mod checks;
mod ensemble;
mod generators;
mod radial;
mod result;
mod tail;

pub use checks::{
    check_spec, default_generator, generator_fits, pichorides_constant, plane_grid, run_check, uhp_grid, CheckParams,
    CheckSpec, PWindow, CHECKS,
};
pub use ensemble::{estimate_constant, run_ensemble, ConstantEstimate, EnsembleStats, InstanceRecord};
pub use generators::{instance_seed, Generator, GeneratorKind, Instance};
pub use radial::{
    borel_majorant, inverse_proximity_integral, log_max_modulus_integral, RadialIntegral, RadialSamples,
    POINTS_PER_OCTAVE,
};
pub use result::{exceeds_skip_budget, CheckKind, CheckResult};
pub use tail::{
    counting_from_singular, hermitian_singular_values, inverse_singular_counting, kernel_integral, tail_by_quadrature,
    tail_data, tail_from_singular, tail_moment, tail_moment_closed_form, tail_transform, TailData,
};
