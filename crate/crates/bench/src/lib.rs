//! Shared fixtures for the criterion benchmarks.

use motfield::{GeometrySpec, TrapModel, Variant, Vec3};

/// Default-parameter model of `variant`.
pub fn model(variant: Variant) -> TrapModel {
    GeometrySpec::default_for(variant)
        .expect("parametric variant")
        .build()
        .expect("defaults build")
}

/// Points on a small cube around the origin, clear of every default geometry.
pub fn probe_points(n: usize) -> Vec<Vec3> {
    let h = 0.004;
    (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            Vec3::new(h * (2.0 * t - 1.0), h * (7.0 * t).sin(), h * (11.0 * t).cos())
        })
        .collect()
}
