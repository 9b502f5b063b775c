//! Sharpness audit of the bilinear estimates through explicit counter-example families.

pub mod evaluate;
pub mod families;
pub mod probe;
pub mod sweep;

pub use evaluate::{counterexample_norms, factor_norm, product_norm, AuditQuadrature};
pub use families::{
    build_counterexample, Counterexample, Family, IndicatorBox, ModeProfile, NormSpec, ProductKind,
    Profile,
};
pub use probe::{inequality_ratio_probe, Estimate, ProbeIndex};
pub use sweep::{
    audit_grid, dyadic_ns, predicted_exponent, scaling_sweep, PredictedExponent, ScalingReport,
    SweepOptions, Verdict,
};
