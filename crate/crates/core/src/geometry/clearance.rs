//! Laser-beam clearance: three orthogonal beam cylinders through the trap centre.

use serde::{Deserialize, Serialize};

use super::SegmentList;
use crate::error::{Error, Result};
use crate::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClearanceReport {
    pub passed: bool,
    /// Smallest distance from any segment to a beam surface, clamped at 0
    /// when a segment enters a beam.
    pub min_clearance_m: f64,
    /// Axis index (0 = x, 1 = y, 2 = z) of the beam that came closest.
    pub worst_axis: usize,
}

/// Distance from the infinite line through `center` along unit `axis` to the
/// segment `a`–`b`.
pub(crate) fn segment_line_distance(a: Vec3, b: Vec3, center: Vec3, axis: Vec3) -> f64 {
    // project onto the plane normal to the axis; the answer is the 2D
    // point-to-segment distance from the origin
    let perp = |v: Vec3| v - axis * v.dot(axis);
    let pa = perp(a - center);
    let pb = perp(b - center);
    let d = pb - pa;
    let len_sq = d.norm_sq();
    let t = if len_sq > 0.0 {
        (-pa.dot(d) / len_sq).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (pa + d * t).norm()
}

pub fn clearance_check(segments: &SegmentList, center: Vec3, beam_diameter: f64) -> Result<ClearanceReport> {
    if !(beam_diameter > 0.0) || !beam_diameter.is_finite() {
        return Err(Error::invalid_input("beam diameter must be positive"));
    }
    let radius = beam_diameter / 2.0;
    let mut nearest = f64::INFINITY;
    let mut worst_axis = 0;
    for axis in 0..3 {
        let dir = Vec3::axis(axis);
        for s in segments.segments() {
            let d = segment_line_distance(s.a, s.b, center, dir);
            if d < nearest {
                nearest = d;
                worst_axis = axis;
            }
        }
    }
    Ok(ClearanceReport {
        passed: nearest >= radius,
        min_clearance_m: (nearest - radius).max(0.0),
        worst_axis,
    })
}
