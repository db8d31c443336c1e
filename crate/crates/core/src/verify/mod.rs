//! Numerical checks of the quadratic-form comparison, the sector
//! construction for even weights, and the full per-case verdicts.

mod identities;
mod quadform;
mod sector;
mod theorems;

pub use identities::{
    check_transform, jacobian_check, JacobianCheck, TransformCheckOptions, TransformCheckReport,
};
pub use quadform::{
    bilinear_q, compare_quadratic_forms, eval_q, quadratic_form,
    random_test_function, weighted_inner, FormComparisonOptions, QuadFormReport,
    TEST_FUNCTION_SEED,
};
pub use sector::{
    build_sector_directions, resample_power, NegativeDirection, NegativeDirectionSet,
    SectorOptions,
};
pub use theorems::{
    default_matrix, general_bound, run_suite, verify_theorems, Check, ModeCounts,
    ProfileSummary, Status, SuiteCase, SuiteReport, VerdictBundle, VerifyOptions,
};
