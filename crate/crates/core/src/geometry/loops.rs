//! Circular coils: single loops, anti-Helmholtz pairs and the Ioffe-Pritchard layout.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};

use super::{close_with_far_return, Conductor, ConductorSection, SegmentList, TrapModel};
use crate::error::{Error, Result};
use crate::units::millimetres;
use crate::Vec3;

/// Smallest polygon accepted by the loop primitive. Geometry specs enforce
/// a stricter floor on their own discretization.
pub(crate) const MIN_SEGMENTS: usize = 3;

/// Regular `n_segments`-gon inscribed in the circle of `radius` about
/// `center`, lying in the plane normal to `normal`. Positive current
/// circulates right-handed about `normal`.
pub fn make_loop(center: Vec3, radius: f64, normal: Vec3, current: f64, n_segments: usize) -> Result<SegmentList> {
    let mut list = SegmentList::new();
    let g = list.add_group("loop", true);
    push_loop(&mut list, g, center, radius, normal, current, n_segments)?;
    Ok(list)
}

pub(crate) fn push_loop(
    list: &mut SegmentList,
    group: usize,
    center: Vec3,
    radius: f64,
    normal: Vec3,
    current: f64,
    n_segments: usize,
) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid_geometry("loop radius must be positive"));
    }
    if n_segments < MIN_SEGMENTS {
        return Err(Error::invalid_geometry(format!(
            "loop needs at least {MIN_SEGMENTS} segments, got {n_segments}"
        )));
    }
    let (u, v) = plane_basis(normal)?;
    let pts: Vec<Vec3> = (0..n_segments)
        .map(|k| {
            let t = TAU * k as f64 / n_segments as f64;
            center + (u * t.cos() + v * t.sin()) * radius
        })
        .collect();
    list.push_polyline(group, &pts, current, true)
}

/// Orthonormal `(u, v)` with `u × v = n̂`.
fn plane_basis(normal: Vec3) -> Result<(Vec3, Vec3)> {
    let n = normal
        .normalized()
        .ok_or_else(|| Error::invalid_geometry("loop normal is degenerate"))?;
    let a = [n.x.abs(), n.y.abs(), n.z.abs()];
    let mut helper = 0;
    for i in 1..3 {
        if a[i] < a[helper] {
            helper = i;
        }
    }
    let h = Vec3::axis(helper);
    let u = (h - n * h.dot(n)).normalized().expect("helper is not parallel");
    Ok((u, n.cross(u)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntiHelmholtzParams {
    #[serde(with = "millimetres")]
    pub radius: f64,
    #[serde(with = "millimetres")]
    pub separation: f64,
    pub current: f64,
    /// Wire diameter, used only for resistance.
    #[serde(with = "millimetres", default = "default_wire_diameter")]
    pub wire_diameter: f64,
}

fn default_wire_diameter() -> f64 {
    1e-3
}

impl Default for AntiHelmholtzParams {
    fn default() -> Self {
        Self {
            radius: 0.050,
            separation: 0.050,
            current: 100.0,
            wire_diameter: default_wire_diameter(),
        }
    }
}

/// Two coaxial single-turn loops on the `z` axis at `z = ∓separation/2`
/// carrying `+current` (lower) and `-current` (upper).
pub fn make_anti_helmholtz(p: &AntiHelmholtzParams, n_segments: usize) -> Result<TrapModel> {
    if !(p.separation > 0.0) {
        return Err(Error::invalid_geometry("separation must be positive"));
    }
    positive(p.wire_diameter, "wire_diameter")?;
    let mut list = SegmentList::new();
    let half = p.separation / 2.0;
    let lower = list.add_group("lower coil", true);
    push_loop(
        &mut list,
        lower,
        Vec3::new(0.0, 0.0, -half),
        p.radius,
        Vec3::Z,
        p.current,
        n_segments,
    )?;
    let upper = list.add_group("upper coil", true);
    push_loop(
        &mut list,
        upper,
        Vec3::new(0.0, 0.0, half),
        p.radius,
        Vec3::Z,
        -p.current,
        n_segments,
    )?;

    let area = PI * (p.wire_diameter / 2.0).powi(2);
    let coil = |name: &str| Conductor {
        name: name.into(),
        current: p.current,
        sections: vec![ConductorSection {
            name: "turn".into(),
            length_m: TAU * p.radius,
            area_m2: area,
        }],
    };
    Ok(TrapModel {
        segments: list,
        conductors: vec![coil("lower coil"), coil("upper coil")],
        center: Vec3::ZERO,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoffePritchardParams {
    /// Distance of each bar from the `y` axis.
    #[serde(with = "millimetres")]
    pub bar_radius: f64,
    #[serde(with = "millimetres")]
    pub bar_length: f64,
    #[serde(with = "millimetres")]
    pub coil_radius: f64,
    #[serde(with = "millimetres")]
    pub coil_separation: f64,
    pub bar_current: f64,
    pub coil_current: f64,
    #[serde(with = "millimetres", default = "default_ip_wire")]
    pub wire_diameter: f64,
}

fn default_ip_wire() -> f64 {
    2e-3
}

impl Default for IoffePritchardParams {
    fn default() -> Self {
        Self {
            bar_radius: 0.020,
            bar_length: 0.100,
            coil_radius: 0.020,
            coil_separation: 0.060,
            bar_current: 100.0,
            coil_current: 50.0,
            wire_diameter: default_ip_wire(),
        }
    }
}

/// Four straight bars parallel to `y` with alternating currents (a 2-D
/// quadrupole in the `xz` plane) plus two coaxial pinch coils on the `y`
/// axis carrying parallel currents.
pub fn make_ioffe_pritchard(p: &IoffePritchardParams, n_segments: usize) -> Result<TrapModel> {
    positive(p.bar_radius, "bar_radius")?;
    positive(p.bar_length, "bar_length")?;
    positive(p.coil_radius, "coil_radius")?;
    positive(p.coil_separation, "coil_separation")?;
    positive(p.wire_diameter, "wire_diameter")?;

    let mut list = SegmentList::new();
    let mut conductors = Vec::new();
    let area = PI * (p.wire_diameter / 2.0).powi(2);
    let outer = p.bar_radius.max(p.coil_radius);
    let half = p.bar_length / 2.0;
    for k in 0..4 {
        let az = FRAC_PI_4 + k as f64 * PI / 2.0;
        // bar at 45° carries current toward -y
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        let top = Vec3::cylindrical_y(p.bar_radius, az, half);
        let bottom = Vec3::cylindrical_y(p.bar_radius, az, -half);
        let mut path = if sign > 0.0 {
            vec![bottom, top]
        } else {
            vec![top, bottom]
        };
        close_with_far_return(&mut path, super::RETURN_RADIUS_FACTOR * outer);
        let name = format!("bar {}", k + 1);
        let g = list.add_group(name.clone(), true);
        list.push_polyline(g, &path, p.bar_current, false)?;
        conductors.push(Conductor {
            name,
            current: p.bar_current,
            sections: vec![ConductorSection {
                name: "bar".into(),
                length_m: p.bar_length,
                area_m2: area,
            }],
        });
    }
    for (name, y) in [
        ("lower pinch coil", -p.coil_separation / 2.0),
        ("upper pinch coil", p.coil_separation / 2.0),
    ] {
        let g = list.add_group(name, true);
        push_loop(
            &mut list,
            g,
            Vec3::new(0.0, y, 0.0),
            p.coil_radius,
            Vec3::Y,
            p.coil_current,
            n_segments,
        )?;
        conductors.push(Conductor {
            name: name.into(),
            current: p.coil_current,
            sections: vec![ConductorSection {
                name: "turn".into(),
                length_m: TAU * p.coil_radius,
                area_m2: area,
            }],
        });
    }
    Ok(TrapModel {
        segments: list,
        conductors,
        center: Vec3::ZERO,
    })
}

pub(crate) fn positive(v: f64, name: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid_geometry(format!("{name} must be positive, got {v}")))
    }
}
