//! Volume-filling printed conductors: the compact four-piece and the
//! two-piece designs.
//!
//! Both share one current topology. The solid is a block around three
//! orthogonal laser holes of radius `h`. The holes along `x` and `z` leave four
//! vertical arms (prongs) in the diagonal corners, and the bands `|y| > h`
//! above and below the holes form rings around the `y` bore. A conductor enters
//! at an end face and runs down one arm through the hole band. It then winds
//! around the far ring band and returns up the neighbouring arm. The arms
//! give the transverse quadrupole, the rings give the axial gradient.
//!
//! * Two-piece: conductor A uses the arms at 45° and 315° and a 270° ring
//!   in the lower band. Conductor B is its image under a half-turn about `z`.
//! * Compact four: the same two paths, each cut at the middle of its ring,
//!   so each of the four conductors is one prong plus a 135° ring arc with
//!   a contact pair (anti-parallel leads) at each cut.
//!
//! Every arm or ring cross-section carries an `n × n` filament bundle. Bundle
//! filament `f` keeps the same grid index through arm and ring, so each
//! filament path is continuous. Terminals are closed through radial leads
//! and a distant return.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

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
pub struct CompactFourParams {
    #[serde(with = "millimetres")]
    pub height: f64,
    /// Outer width of the square block.
    #[serde(with = "millimetres")]
    pub width: f64,
    #[serde(with = "millimetres")]
    pub hole_diameter: f64,
    #[serde(with = "millimetres")]
    pub gap: f64,
    pub current_per_conductor: f64,
}

impl Default for CompactFourParams {
    fn default() -> Self {
        Self {
            height: 0.045,
            width: 0.024,
            hole_diameter: 0.015,
            gap: 0.0005,
            current_per_conductor: 40.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoPieceParams {
    #[serde(with = "millimetres")]
    pub height: f64,
    #[serde(with = "millimetres")]
    pub outer_diameter: f64,
    /// Width of each arm at its narrowest point, between the `x` and `z` holes.
    #[serde(with = "millimetres")]
    pub arm_width: f64,
    #[serde(with = "millimetres")]
    pub hole_diameter: f64,
    #[serde(with = "millimetres")]
    pub gap: f64,
    pub current_per_conductor: f64,
}

impl Default for TwoPieceParams {
    fn default() -> Self {
        Self {
            height: 0.038,
            outer_diameter: 0.026,
            arm_width: 0.0031,
            hole_diameter: 0.015,
            gap: 0.0005,
            current_per_conductor: 25.0,
        }
    }
}

/// Cell centres of an `n × n` grid on the unit square, row-major in `(u, v)`.
fn unit_grid(n: usize) -> impl Iterator<Item = (f64, f64)> {
    (0..n).flat_map(move |i| (0..n).map(move |j| ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64)))
}

/// Area of `{p ≥ h, q ≥ h, p² + q² ≤ r²}`, the corner left between two
/// perpendicular holes of radius `h` inside a circle of radius `r`.
pub(crate) fn corner_area(h: f64, r: f64) -> f64 {
    let pmax = (r * r - h * h).sqrt();
    if pmax <= h {
        return 0.0;
    }
    let prim = |p: f64| 0.5 * (p * (r * r - p * p).max(0.0).sqrt() + r * r * (p / r).asin());
    prim(pmax) - prim(h) - h * (pmax - h)
}

fn check_hole_fit(hole_diameter: f64, gap: f64, outer: f64) -> Result<()> {
    positive(hole_diameter, "hole_diameter")?;
    positive(gap, "gap")?;
    if hole_diameter + 2.0 * gap >= outer {
        return Err(Error::Clearance(format!(
            "hole {:.3} mm plus two gaps of {:.3} mm does not fit in {:.3} mm",
            hole_diameter * 1e3,
            gap * 1e3,
            outer * 1e3
        )));
    }
    Ok(())
}

fn reflect_z(p: Vec3) -> Vec3 {
    Vec3::new(p.x, p.y, -p.z)
}

/// Half-turn about the `z` axis.
fn rotate_z_half(p: Vec3) -> Vec3 {
    Vec3::new(-p.x, -p.y, p.z)
}

/// Polygonal arc about the `y` axis, excluding the start point.
fn push_arc(path: &mut Vec<Vec3>, radius: f64, from: f64, sweep: f64, y: f64, per_turn: usize) {
    let n = arc_segments(sweep, per_turn);
    for k in 1..=n {
        path.push(Vec3::cylindrical_y(radius, from + sweep * k as f64 / n as f64, y));
    }
}

fn push_paths(list: &mut SegmentList, name: &str, paths: &[Vec<Vec3>], current: f64) -> Result<()> {
    let g = list.add_group(name, true);
    let share = current / paths.len() as f64;
    for path in paths {
        list.push_polyline(g, path, share, false)?;
    }
    Ok(())
}

pub fn make_two_piece(p: &TwoPieceParams, segments_per_turn: usize, filaments_per_side: usize) -> Result<TrapModel> {
    positive(p.height, "height")?;
    positive(p.outer_diameter, "outer_diameter")?;
    positive(p.arm_width, "arm_width")?;
    check_hole_fit(p.hole_diameter, p.gap, p.outer_diameter)?;
    if filaments_per_side == 0 {
        return Err(Error::invalid_geometry("filaments_per_side must be at least 1"));
    }
    let h = p.hole_diameter / 2.0;
    let outer = p.outer_diameter / 2.0;
    let half_height = p.height / 2.0;
    let arm_outer = (h + p.arm_width).hypot(h);
    if arm_outer > outer {
        return Err(Error::invalid_geometry(format!(
            "arm of width {:.3} mm reaches radius {:.3} mm, beyond the outer radius {:.3} mm",
            p.arm_width * 1e3,
            arm_outer * 1e3,
            outer * 1e3
        )));
    }
    if half_height <= h {
        return Err(Error::invalid_geometry("height leaves no ring band above the holes"));
    }

    // arm bundle: polar map of the unit square onto the corner region
    let a_min = (h / arm_outer).asin();
    let a_max = PI / 2.0 - a_min;
    let arm: Vec<(f64, f64)> = unit_grid(filaments_per_side)
        .map(|(u, v)| {
            let a = a_min + u * (a_max - a_min);
            let r_min = h / a.cos().min(a.sin());
            (r_min + v * (arm_outer - r_min), a - FRAC_PI_4)
        })
        .collect();
    let ring: Vec<(f64, f64)> = unit_grid(filaments_per_side)
        .map(|(u, v)| (h + u * (outer - h), h + v * (half_height - h)))
        .collect();

    // conductor A: down the 45° arm, 270° around the lower band, up the 315° arm
    let first = FRAC_PI_4;
    let second = -FRAC_PI_4;
    let return_radius = RETURN_RADIUS_FACTOR * outer;
    let paths_a: Vec<Vec<Vec3>> = arm
        .iter()
        .zip(&ring)
        .map(|(&(ra, offset), &(rr, yr))| {
            // offsets mirror between the two arms under z -> -z
            let a1 = first - offset;
            let a2 = second + offset;
            let mut path = vec![
                Vec3::cylindrical_y(ra, a1, half_height),
                Vec3::cylindrical_y(ra, a1, -yr),
                Vec3::cylindrical_y(rr, a1, -yr),
            ];
            let sweep = (a2 - a1).rem_euclid(TAU);
            push_arc(&mut path, rr, a1, sweep, -yr, segments_per_turn);
            path.push(Vec3::cylindrical_y(ra, a2, -yr));
            path.push(Vec3::cylindrical_y(ra, a2, half_height));
            close_with_far_return(&mut path, return_radius);
            path
        })
        .collect();
    let paths_b: Vec<Vec<Vec3>> = paths_a
        .iter()
        .map(|path| path.iter().copied().map(rotate_z_half).collect())
        .collect();

    let mut list = SegmentList::new();
    push_paths(&mut list, "conductor A", &paths_a, p.current_per_conductor)?;
    push_paths(&mut list, "conductor B", &paths_b, p.current_per_conductor)?;

    let ring_mid_y = 0.5 * (h + half_height);
    let arm_section = ConductorSection {
        name: "arm".into(),
        length_m: half_height + ring_mid_y,
        area_m2: corner_area(h, arm_outer),
    };
    let ring_section = ConductorSection {
        name: "ring".into(),
        length_m: 1.5 * PI * 0.5 * (h + outer),
        area_m2: (outer - h) * (half_height - h),
    };
    let conductor = |name: &str| Conductor {
        name: name.into(),
        current: p.current_per_conductor,
        sections: vec![arm_section.clone(), ring_section.clone(), arm_section.clone()],
    };
    Ok(TrapModel {
        segments: list,
        conductors: vec![conductor("conductor A"), conductor("conductor B")],
        center: Vec3::ZERO,
    })
}

pub fn make_compact_four(
    p: &CompactFourParams,
    segments_per_turn: usize,
    filaments_per_side: usize,
) -> Result<TrapModel> {
    positive(p.height, "height")?;
    positive(p.width, "width")?;
    check_hole_fit(p.hole_diameter, p.gap, p.width)?;
    if filaments_per_side == 0 {
        return Err(Error::invalid_geometry("filaments_per_side must be at least 1"));
    }
    let h = p.hole_diameter / 2.0;
    let half_width = p.width / 2.0;
    let half_height = p.height / 2.0;
    if half_height <= h {
        return Err(Error::invalid_geometry("height leaves no ring band above the holes"));
    }

    let prong: Vec<(f64, f64)> = unit_grid(filaments_per_side)
        .map(|(u, v)| (h + u * (half_width - h), h + v * (half_width - h)))
        .collect();
    let ring: Vec<(f64, f64)> = unit_grid(filaments_per_side)
        .map(|(u, v)| (h + u * (half_width - h), h + v * (half_height - h)))
        .collect();

    // conductor 1: down the 45° prong, then 135° around the lower band to
    // the contact pair at 180°
    let return_radius = RETURN_RADIUS_FACTOR * half_width * std::f64::consts::SQRT_2;
    let mut open_paths = Vec::with_capacity(prong.len());
    for (&(px, pz), &(rr, yr)) in prong.iter().zip(&ring) {
        let cut = PI - 0.5 * p.gap / rr;
        let mut path = vec![
            Vec3::new(px, half_height, pz),
            Vec3::new(px, -yr, pz),
            Vec3::cylindrical_y(rr, FRAC_PI_4, -yr),
        ];
        push_arc(&mut path, rr, FRAC_PI_4, cut - FRAC_PI_4, -yr, segments_per_turn);
        open_paths.push(path);
    }

    let close = |mut path: Vec<Vec3>| {
        close_with_far_return(&mut path, return_radius);
        path
    };
    let first: Vec<Vec<Vec3>> = open_paths.iter().cloned().map(close).collect();
    // conductor 2 is the z-mirror image traversed backwards: in at the
    // 180° contact, around to 315°, up the prong
    let second: Vec<Vec<Vec3>> = open_paths
        .iter()
        .map(|path| close(path.iter().rev().copied().map(reflect_z).collect()))
        .collect();
    let rotate = |paths: &[Vec<Vec3>]| -> Vec<Vec<Vec3>> {
        paths
            .iter()
            .map(|path| path.iter().copied().map(rotate_z_half).collect())
            .collect()
    };
    let third = rotate(&first);
    let fourth = rotate(&second);

    let mut list = SegmentList::new();
    for (k, paths) in [&first, &second, &third, &fourth].into_iter().enumerate() {
        push_paths(
            &mut list,
            &format!("conductor {}", k + 1),
            paths,
            p.current_per_conductor,
        )?;
    }

    let prong_section = ConductorSection {
        name: "prong".into(),
        length_m: half_height + 0.5 * (h + half_height),
        area_m2: (half_width - h).powi(2),
    };
    let ring_section = ConductorSection {
        name: "ring arc".into(),
        length_m: 0.75 * PI * 0.5 * (h + half_width),
        area_m2: (half_width - h) * (half_height - h),
    };
    let conductors = (1..=4)
        .map(|k| Conductor {
            name: format!("conductor {k}"),
            current: p.current_per_conductor,
            sections: vec![prong_section.clone(), ring_section.clone()],
        })
        .collect();
    Ok(TrapModel {
        segments: list,
        conductors,
        center: Vec3::ZERO,
    })
}
