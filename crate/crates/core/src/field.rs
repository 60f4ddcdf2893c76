//! Biot-Savart field of straight filaments, with line and plane sampling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Segment, SegmentList, TrapModel};
use crate::units::{tesla_to_gauss, MU0_OVER_4PI};
use crate::Vec3;

/// Points closer than this to a filament are singular (m).
pub const EPS_SING: f64 = 1e-7;

/// Anything that can report a flux density at a point.
pub trait FieldSource: Sync {
    fn field_at(&self, p: Vec3) -> Result<Vec3>;
}

impl FieldSource for SegmentList {
    fn field_at(&self, p: Vec3) -> Result<Vec3> {
        field_at(self, p)
    }
}

impl FieldSource for TrapModel {
    fn field_at(&self, p: Vec3) -> Result<Vec3> {
        field_at(&self.segments, p)
    }
}

impl<S: FieldSource + ?Sized> FieldSource for &S {
    fn field_at(&self, p: Vec3) -> Result<Vec3> {
        (**self).field_at(p)
    }
}

/// Wraps a closure as a field source, e.g. an analytic test field.
pub struct FnField<F>(pub F);

impl<F: Fn(Vec3) -> Vec3 + Sync> FieldSource for FnField<F> {
    fn field_at(&self, p: Vec3) -> Result<Vec3> {
        Ok((self.0)(p))
    }
}

/// Field of one segment, or `None` inside the singular radius.
fn filament_field(seg: &Segment, p: Vec3) -> Option<Vec3> {
    if seg.distance_to(p) < EPS_SING {
        return None;
    }
    let r1 = p - seg.a;
    let r2 = p - seg.b;
    let (n1, n2) = (r1.norm(), r2.norm());
    let c = r1.cross(r2);
    let dot = r1.dot(r2);
    let prod = n1 * n2;
    // (n1 + n2) / (n1 n2 (n1 n2 + r1·r2)); when r1·r2 < 0 the bracket
    // cancels, so use n1 n2 + r1·r2 = |r1×r2|² / (n1 n2 - r1·r2)
    let k = if dot >= 0.0 {
        (n1 + n2) / (prod * (prod + dot))
    } else {
        (n1 + n2) * (prod - dot) / (prod * c.norm_sq())
    };
    Some(c * (MU0_OVER_4PI * seg.current * k))
}

/// Exact field of a finite straight filament (T).
pub fn segment_field(seg: &Segment, p: Vec3) -> Result<Vec3> {
    filament_field(seg, p).ok_or(Error::SingularPoint { point: p, segment: 0 })
}

/// Superposition over all segments, summed in stored order.
pub fn field_at(segments: &SegmentList, p: Vec3) -> Result<Vec3> {
    let mut b = Vec3::ZERO;
    for (i, seg) in segments.segments().iter().enumerate() {
        b += filament_field(seg, p).ok_or(Error::SingularPoint { point: p, segment: i })?;
    }
    Ok(b)
}

/// One field evaluation. `b` is `None` where the point was singular.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub position: Vec3,
    pub b: Option<Vec3>,
}

impl FieldSample {
    pub fn magnitude(&self) -> Option<f64> {
        self.b.map(Vec3::norm)
    }
}

/// Evaluates every point, recording singular points as gaps. Results keep
/// input order and do not depend on the thread count.
pub fn sample_points<S: FieldSource + ?Sized>(src: &S, points: &[Vec3]) -> Result<Vec<FieldSample>> {
    let samples = points
        .par_iter()
        .map(|&p| match src.field_at(p) {
            Ok(b) => Ok(FieldSample {
                position: p,
                b: Some(b),
            }),
            Err(Error::SingularPoint { .. }) => Ok(FieldSample { position: p, b: None }),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    if !samples.is_empty() && samples.iter().all(|s| s.b.is_none()) {
        return Err(Error::EmptySample);
    }
    Ok(samples)
}

/// Offsets `-h..=h` in `n` equal steps; a single sample sits at 0.
fn offsets(half_range: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n)
        .map(|i| -half_range + 2.0 * half_range * i as f64 / (n - 1) as f64)
        .collect()
}

fn check_range(half_range: f64, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid_input("sample count must be at least 1"));
    }
    if !(half_range >= 0.0 && half_range.is_finite()) {
        return Err(Error::invalid_input("half range must be finite and non-negative"));
    }
    Ok(())
}

fn unit(direction: Vec3) -> Result<Vec3> {
    direction
        .normalized()
        .ok_or_else(|| Error::invalid_input("sampling direction is degenerate"))
}

/// `n` equally spaced samples on `origin ± half_range·direction`.
pub fn sample_line<S: FieldSource + ?Sized>(
    src: &S,
    origin: Vec3,
    direction: Vec3,
    half_range: f64,
    n: usize,
) -> Result<Vec<FieldSample>> {
    check_range(half_range, n)?;
    let d = unit(direction)?;
    let pts: Vec<Vec3> = offsets(half_range, n).into_iter().map(|t| origin + d * t).collect();
    sample_points(src, &pts)
}

/// Samples on a plane grid, row-major: entry `i * n2 + j` sits at
/// `center + u_i·axis1 + v_j·axis2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneGrid {
    pub n1: usize,
    pub n2: usize,
    pub samples: Vec<FieldSample>,
}

impl PlaneGrid {
    pub fn get(&self, i: usize, j: usize) -> &FieldSample {
        &self.samples[i * self.n2 + j]
    }
}

pub fn sample_plane<S: FieldSource + ?Sized>(
    src: &S,
    center: Vec3,
    axis1: Vec3,
    axis2: Vec3,
    half_ranges: (f64, f64),
    n1: usize,
    n2: usize,
) -> Result<PlaneGrid> {
    check_range(half_ranges.0, n1)?;
    check_range(half_ranges.1, n2)?;
    let (a1, a2) = (unit(axis1)?, unit(axis2)?);
    let (u, v) = (offsets(half_ranges.0, n1), offsets(half_ranges.1, n2));
    let pts: Vec<Vec3> = u
        .iter()
        .flat_map(|&s| v.iter().map(move |&t| center + a1 * s + a2 * t))
        .collect();
    Ok(PlaneGrid {
        n1,
        n2,
        samples: sample_points(src, &pts)?,
    })
}

pub const CSV_HEADER: &str = "x_m,y_m,z_m,Bx_T,By_T,Bz_T,Bmag_G";

/// Field samples as CSV in shortest round-trip scientific notation; gaps
/// are written as `nan`.
pub fn samples_to_csv(samples: &[FieldSample]) -> String {
    let mut out = String::with_capacity(64 * (samples.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in samples {
        let p = s.position;
        let row = match s.b {
            Some(b) => format!(
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
                p.x,
                p.y,
                p.z,
                b.x,
                b.y,
                b.z,
                tesla_to_gauss(b.norm())
            ),
            None => format!("{:e},{:e},{:e},nan,nan,nan,nan\n", p.x, p.y, p.z),
        };
        out.push_str(&row);
    }
    out
}
