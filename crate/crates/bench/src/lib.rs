//! Shared fixtures for the criterion benches.

use regreal_core::corpus::{f_z_pwl, SupportPredicate, FZ_CUTOFF};
use regreal_core::digits::rat;
use regreal_core::pwl::tooth;
use regreal_core::PwlFunction;

/// The PWL functions carried through the full pipeline, by name.
pub fn pipeline_sources() -> Vec<(&'static str, PwlFunction)> {
    vec![
        ("constant", PwlFunction::constant(rat(0, 1))),
        ("identity", PwlFunction::identity()),
        (
            "tooth",
            tooth(&rat(1, 4), &rat(1, 2), &rat(1, 8)).expect("valid tooth"),
        ),
        (
            "fz3",
            f_z_pwl(&SupportPredicate::finite([3]), FZ_CUTOFF).expect("finite support"),
        ),
    ]
}
