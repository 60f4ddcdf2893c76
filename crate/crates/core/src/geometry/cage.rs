//! Four twisted bars in an Ioffe-style cage.
//!
//! Bar `k` sits at azimuth `45° + k·90°` about the `y` axis at constant
//! radius `outer_width/2 - bar_diameter/2`. Adjacent bars carry opposite
//! currents (the bar at 45° carries current toward `-y`). Each bar is bent
//! azimuthally by `twist_angle·|2t|` for `t ∈ [-1/2, 1/2]` along its height,
//! with the bending sense alternating between bars, so the azimuthal
//! current components at the two ends circulate in opposite senses and add
//! an axial gradient on top of the transverse quadrupole. A uniform twist
//! would cancel on the axis.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::loops::positive;
use super::{
    arc_segments, close_with_far_return, Conductor, ConductorSection, SegmentList, TrapModel, RETURN_RADIUS_FACTOR,
};
use crate::error::{Error, Result};
use crate::units::millimetres;
use crate::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistedCageParams {
    #[serde(with = "millimetres")]
    pub height: f64,
    #[serde(with = "millimetres")]
    pub outer_width: f64,
    #[serde(with = "millimetres")]
    pub bar_diameter: f64,
    /// Azimuthal excursion of each bar end relative to its mid-height (rad).
    pub twist_angle: f64,
    pub current: f64,
}

impl Default for TwistedCageParams {
    fn default() -> Self {
        Self {
            height: 0.110,
            outer_width: 0.055,
            bar_diameter: 0.010,
            twist_angle: 0.5,
            current: 100.0,
        }
    }
}

/// Filament offsets `(radial, tangential)` over a disc of `radius`: a centre
/// filament plus `rings` concentric rings of `6j` filaments, each ring at
/// the RMS radius of the annulus it represents.
pub(crate) fn disc_bundle(radius: f64, rings: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0)];
    let outer = rings as f64 + 0.5;
    for j in 1..=rings {
        let jf = j as f64;
        let rho = radius * (((jf + 0.5).powi(2) + (jf - 0.5).powi(2)) / 2.0).sqrt() / outer;
        let n = 6 * j;
        for i in 0..n {
            let a = 2.0 * PI * i as f64 / n as f64;
            out.push((rho * a.cos(), rho * a.sin()));
        }
    }
    out
}

pub fn make_twisted_cage(p: &TwistedCageParams, segments_per_turn: usize, bundle_rings: usize) -> Result<TrapModel> {
    positive(p.height, "height")?;
    positive(p.outer_width, "outer_width")?;
    positive(p.bar_diameter, "bar_diameter")?;
    if !p.twist_angle.is_finite() {
        return Err(Error::invalid_geometry("twist_angle must be finite"));
    }
    let bar_r = p.bar_diameter / 2.0;
    let radius = p.outer_width / 2.0 - bar_r;
    if radius <= bar_r {
        return Err(Error::invalid_geometry(
            "outer_width must exceed twice the bar diameter",
        ));
    }

    let mut n_path = arc_segments(2.0 * p.twist_angle, segments_per_turn).max(64);
    n_path += n_path % 2; // keep the mid-height kink on a node
    let ts: Vec<f64> = (0..=n_path).map(|i| i as f64 / n_path as f64 - 0.5).collect();
    let centerline = |k: usize| -> Vec<(f64, f64)> {
        let base = FRAC_PI_4 + k as f64 * FRAC_PI_2;
        let sense = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        ts.iter()
            .map(|&t| (base + sense * p.twist_angle * (2.0 * t).abs(), p.height * t))
            .collect()
    };
    let lines: Vec<Vec<(f64, f64)>> = (0..4).map(centerline).collect();

    for k in 0..4 {
        let (a, b) = (&lines[k], &lines[(k + 1) % 4]);
        let min_gap = a
            .iter()
            .zip(b)
            .map(|(&(az1, y1), &(az2, y2))| {
                (Vec3::cylindrical_y(radius, az1, y1) - Vec3::cylindrical_y(radius, az2, y2)).norm()
            })
            .fold(f64::INFINITY, f64::min);
        if min_gap <= p.bar_diameter {
            return Err(Error::invalid_geometry(format!(
                "bars {} and {} intersect (centre distance {:.3} mm, diameter {:.3} mm)",
                k + 1,
                (k + 1) % 4 + 1,
                min_gap * 1e3,
                p.bar_diameter * 1e3
            )));
        }
    }

    let bundle = disc_bundle(bar_r, bundle_rings);
    let share = p.current / bundle.len() as f64;
    let return_radius = RETURN_RADIUS_FACTOR * p.outer_width / 2.0;
    let mut list = SegmentList::new();
    let mut conductors = Vec::new();
    for (k, line) in lines.iter().enumerate() {
        let name = format!("bar {}", k + 1);
        let g = list.add_group(name.clone(), true);
        let downward = k % 2 == 0;
        for &(dr, dt) in &bundle {
            let mut path: Vec<Vec3> = line
                .iter()
                .map(|&(az, y)| {
                    let radial = Vec3::new(az.cos(), 0.0, az.sin());
                    let tangential = Vec3::new(-az.sin(), 0.0, az.cos());
                    Vec3::cylindrical_y(radius, az, y) + radial * dr + tangential * dt
                })
                .collect();
            if downward {
                path.reverse();
            }
            close_with_far_return(&mut path, return_radius);
            list.push_polyline(g, &path, share, false)?;
        }
        let length: f64 = line
            .windows(2)
            .map(|w| (Vec3::cylindrical_y(radius, w[1].0, w[1].1) - Vec3::cylindrical_y(radius, w[0].0, w[0].1)).norm())
            .sum();
        conductors.push(Conductor {
            name,
            current: p.current,
            sections: vec![ConductorSection {
                name: "bar".into(),
                length_m: length,
                area_m2: PI * bar_r * bar_r,
            }],
        });
    }
    Ok(TrapModel {
        segments: list,
        conductors,
        center: Vec3::ZERO,
    })
}
