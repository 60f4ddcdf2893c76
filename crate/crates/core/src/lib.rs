//! Magnetostatic design toolkit for magneto-optical trap conductors.
//!
//! Conductors are modelled as bundles of straight current filaments
//! ([`geometry`]), their field is summed with the closed-form Biot-Savart
//! law ([`field`]), and the field is analysed for a zero with linear
//! gradients near the `1:1:-2` ratio ([`analysis`]). [`power`] estimates
//! Joule heating, [`scaling`] the miniaturization laws, and [`optimize`]
//! searches geometry parameters.
//!
//! Internal units are SI. Configs use millimetres, reports G/cm.

// `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod error;
pub mod field;
pub mod geometry;
pub mod io;
pub mod optimize;
pub mod power;
pub mod scaling;
pub mod units;
mod vec3;

pub use analysis::{
    find_field_zero, fit_gradients, jacobian_at, mot_suitability, GradientReport, Jacobian, Suitability,
    SuitabilityTargets,
};
pub use error::{Error, Result};
pub use field::{field_at, sample_line, sample_plane, segment_field, FieldSample, FieldSource, FnField, PlaneGrid};
pub use geometry::{
    clearance_check, path_length, ClearanceReport, GeometrySpec, Material, Segment, SegmentList, TrapModel, Variant,
};
pub use optimize::{objective_value, optimize_geometry, ObjectiveSpec, OptResult};
pub use power::{power_report, PowerReport};
pub use scaling::{scaling_report, verify_scaling_numerically, CurrentScaling, ScalingReport};
pub use vec3::Vec3;
