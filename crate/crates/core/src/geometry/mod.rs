//! Conductor geometries discretized into straight current filaments.
//!
//! Every builder returns a [`TrapModel`]: the filament [`SegmentList`] used
//! by the field solver, plus the solid-conductor sections used for
//! resistance. Filament bundles stand in for volumetric conductors, each
//! filament carrying an equal share of the conductor current.
//!
//! Frame convention for the bar/arm designs: the long axis is `y`, arms sit
//! at the diagonal azimuths 45°, 135°, 225° and 315° (azimuth measured from
//! `+x` toward `+z`), and the laser beams run along `x`, `y` and `z`.

mod cage;
mod clearance;
mod loops;
mod material;
mod printed;
mod spec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec3;

pub use cage::{make_twisted_cage, TwistedCageParams};
pub use clearance::{clearance_check, ClearanceReport};
pub use loops::{make_anti_helmholtz, make_ioffe_pritchard, make_loop, AntiHelmholtzParams, IoffePritchardParams};
pub use material::Material;
pub use printed::{make_compact_four, make_two_piece, CompactFourParams, TwoPieceParams};
pub use spec::{
    Discretization, FreePath, FreePathParams, GeometryParams, GeometrySpec, ParamUnit, Variant, MIN_SEGMENTS_PER_TURN,
};

/// Endpoint tolerance for the head-to-tail chaining invariant (m).
pub const CHAIN_TOLERANCE: f64 = 1e-9;

/// Far-return radius as a multiple of the device's outer radius. Terminal
/// conductors are closed through leads that run out to this radius.
pub const RETURN_RADIUS_FACTOR: f64 = 10.0;

/// One straight current filament. Positive current flows from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Vec3,
    pub b: Vec3,
    pub current: f64,
}

impl Segment {
    pub fn new(a: Vec3, b: Vec3, current: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || !current.is_finite() {
            return Err(Error::invalid_geometry("segment has non-finite data"));
        }
        if (b - a).norm() <= 0.0 {
            return Err(Error::invalid_geometry("zero-length segment"));
        }
        Ok(Self { a, b, current })
    }

    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }

    /// Closest distance from `p` to the segment (not its infinite line).
    pub fn distance_to(&self, p: Vec3) -> f64 {
        let d = self.b - self.a;
        let t = ((p - self.a).dot(d) / d.norm_sq()).clamp(0.0, 1.0);
        (p - (self.a + d * t)).norm()
    }
}

/// Metadata for one physical conductor (or coil) in a [`SegmentList`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub name: String,
    /// Closed groups must chain head-to-tail into closed filament loops.
    pub closed: bool,
}

/// Ordered straight filaments, each tagged with the conductor group it belongs to.
///
/// A group may hold several filament paths (a bundle). Within a closed group
/// each path is a run of head-to-tail segments that returns to its own start.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SegmentList {
    segments: Vec<Segment>,
    group_of: Vec<usize>,
    groups: Vec<Group>,
}

impl SegmentList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_group(&mut self, name: impl Into<String>, closed: bool) -> usize {
        self.groups.push(Group {
            name: name.into(),
            closed,
        });
        self.groups.len() - 1
    }

    pub fn set_group_closed(&mut self, group: usize, closed: bool) {
        self.groups[group].closed = closed;
    }

    pub fn push(&mut self, group: usize, seg: Segment) {
        assert!(group < self.groups.len(), "unknown group {group}");
        self.segments.push(seg);
        self.group_of.push(group);
    }

    /// Appends consecutive points as segments, dropping zero-length steps.
    /// With `close`, a final segment returns to the first point.
    pub fn push_polyline(&mut self, group: usize, points: &[Vec3], current: f64, close: bool) -> Result<()> {
        if points.len() < 2 {
            return Err(Error::invalid_geometry("polyline needs at least two points"));
        }
        let mut pts: Vec<Vec3> = points.to_vec();
        if close && (pts[0] - pts[pts.len() - 1]).norm() > 0.0 {
            pts.push(pts[0]);
        }
        let before = self.segments.len();
        for w in pts.windows(2) {
            if (w[1] - w[0]).norm() > 0.0 {
                self.push(group, Segment::new(w[0], w[1], current)?);
            }
        }
        if self.segments.len() == before {
            return Err(Error::invalid_geometry("polyline has zero length"));
        }
        Ok(())
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn group_of(&self, segment: usize) -> usize {
        self.group_of[segment]
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn group_segments(&self, group: usize) -> impl Iterator<Item = &Segment> + '_ {
        self.segments
            .iter()
            .zip(&self.group_of)
            .filter(move |(_, &g)| g == group)
            .map(|(s, _)| s)
    }

    /// Appends all groups and segments of `other`.
    pub fn extend_from(&mut self, other: &SegmentList) {
        let offset = self.groups.len();
        self.groups.extend(other.groups.iter().cloned());
        self.segments.extend_from_slice(&other.segments);
        self.group_of.extend(other.group_of.iter().map(|g| g + offset));
    }

    pub fn translated(&self, offset: Vec3) -> Self {
        self.map_segments(|s| Segment {
            a: s.a + offset,
            b: s.b + offset,
            current: s.current,
        })
    }

    pub fn with_scaled_currents(&self, k: f64) -> Self {
        self.map_segments(|s| Segment {
            current: s.current * k,
            ..*s
        })
    }

    /// Reflects every segment through the plane normal to `axis`.
    pub fn mirrored(&self, axis: usize) -> Self {
        let flip = |p: Vec3| {
            let mut a = p.to_array();
            a[axis] = -a[axis];
            Vec3::from(a)
        };
        self.map_segments(|s| Segment {
            a: flip(s.a),
            b: flip(s.b),
            current: s.current,
        })
    }

    fn map_segments(&self, f: impl Fn(&Segment) -> Segment) -> Self {
        Self {
            segments: self.segments.iter().map(f).collect(),
            group_of: self.group_of.clone(),
            groups: self.groups.clone(),
        }
    }

    /// Largest endpoint mismatch along the filament paths of a closed group.
    pub fn max_chain_gap(&self, group: usize) -> f64 {
        let mut worst = 0.0_f64;
        let mut path_start: Option<Vec3> = None;
        let mut prev_end: Option<Vec3> = None;
        for seg in self.group_segments(group) {
            match (path_start, prev_end) {
                (Some(start), Some(end)) => {
                    let gap = (seg.a - end).norm();
                    if gap > CHAIN_TOLERANCE {
                        // previous path must have closed on itself
                        worst = worst.max((end - start).norm());
                        path_start = Some(seg.a);
                    } else {
                        worst = worst.max(gap);
                    }
                }
                _ => path_start = Some(seg.a),
            }
            prev_end = Some(seg.b);
        }
        if let (Some(start), Some(end)) = (path_start, prev_end) {
            worst = worst.max((end - start).norm());
        }
        worst
    }

    /// Checks non-emptiness and the chaining invariant of closed groups.
    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::invalid_geometry("segment list is empty"));
        }
        for (g, group) in self.groups.iter().enumerate() {
            if self.group_segments(g).next().is_none() {
                return Err(Error::invalid_geometry(format!(
                    "group '{}' has no segments",
                    group.name
                )));
            }
            if group.closed {
                let gap = self.max_chain_gap(g);
                if gap > CHAIN_TOLERANCE {
                    return Err(Error::invalid_geometry(format!(
                        "group '{}' does not chain head-to-tail (gap {gap:e} m)",
                        group.name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Total filament length of one group.
pub fn path_length(list: &SegmentList, group: usize) -> Result<f64> {
    if group >= list.groups().len() {
        return Err(Error::invalid_input(format!("no group {group}")));
    }
    let mut segs = list.group_segments(group).peekable();
    if segs.peek().is_none() {
        return Err(Error::invalid_input("group is empty"));
    }
    Ok(segs.map(Segment::length).sum())
}

/// A stretch of solid conductor with uniform cross-section, used for resistance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConductorSection {
    pub name: String,
    pub length_m: f64,
    pub area_m2: f64,
}

/// One electrically separate conductor: its total current and solid sections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conductor {
    pub name: String,
    pub current: f64,
    pub sections: Vec<ConductorSection>,
}

/// Output of every geometry builder.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapModel {
    pub segments: SegmentList,
    pub conductors: Vec<Conductor>,
    /// Geometric trap centre, where the field zero is expected.
    pub center: Vec3,
}

impl TrapModel {
    pub fn translated(&self, offset: Vec3) -> Self {
        Self {
            segments: self.segments.translated(offset),
            conductors: self.conductors.clone(),
            center: self.center + offset,
        }
    }
}

/// Closes an open conductor path through feed leads and a distant return.
///
/// From the path end the lead runs radially (about `y`) out to
/// `return_radius`, travels at that radius to the start's azimuth and height,
/// and runs radially back in to the start. The axial leg is placed at
/// whichever end azimuth lies farther from the `x` and `z` beam axes; the
/// azimuthal leg is split into steps of at most 45° so it never crosses the
/// `y` beam.
pub(crate) fn close_with_far_return(path: &mut Vec<Vec3>, return_radius: f64) {
    let start = path[0];
    let end = *path.last().expect("non-empty path");
    let (az_s, az_e) = (start.azimuth_y(), end.azimuth_y());
    let out_s = Vec3::cylindrical_y(return_radius, az_s, start.y);
    let out_e = Vec3::cylindrical_y(return_radius, az_e, end.y);

    let beam_distance = |az: f64| (2.0 * az).sin().abs();
    let axial_at_start = beam_distance(az_s) >= beam_distance(az_e);

    path.push(out_e);
    if axial_at_start {
        push_far_arc(path, return_radius, az_e, az_s, end.y);
        path.push(out_s);
    } else {
        path.push(Vec3::cylindrical_y(return_radius, az_e, start.y));
        push_far_arc(path, return_radius, az_e, az_s, start.y);
    }
    path.push(start);
}

fn push_far_arc(path: &mut Vec<Vec3>, radius: f64, from: f64, to: f64, y: f64) {
    use std::f64::consts::{FRAC_PI_4, PI, TAU};
    let mut sweep = (to - from).rem_euclid(TAU);
    if sweep > PI {
        sweep -= TAU;
    }
    let steps = (sweep.abs() / FRAC_PI_4).ceil() as usize;
    for k in 1..=steps {
        let az = from + sweep * k as f64 / steps as f64;
        path.push(Vec3::cylindrical_y(radius, az, y));
    }
}

/// Number of polygon segments for an arc of `sweep` radians.
pub(crate) fn arc_segments(sweep: f64, segments_per_turn: usize) -> usize {
    let n = (sweep.abs() / std::f64::consts::TAU * segments_per_turn as f64).ceil() as usize;
    n.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(side: f64, current: f64) -> SegmentList {
        let h = side / 2.0;
        let pts = [
            Vec3::new(-h, -h, 0.0),
            Vec3::new(h, -h, 0.0),
            Vec3::new(h, h, 0.0),
            Vec3::new(-h, h, 0.0),
        ];
        let mut list = SegmentList::new();
        let g = list.add_group("square", true);
        list.push_polyline(g, &pts, current, true).unwrap();
        list
    }

    #[test]
    fn square_loop_path_length() {
        let list = square(0.010, 1.0);
        assert_eq!(list.len(), 4);
        assert!((path_length(&list, 0).unwrap() - 0.040).abs() < 1e-15);
        list.validate().unwrap();
    }

    #[test]
    fn empty_group_length_is_an_error() {
        let mut list = SegmentList::new();
        list.add_group("nothing", false);
        assert!(matches!(path_length(&list, 0), Err(Error::InvalidInput(_))));
        assert!(path_length(&list, 7).is_err());
        assert!(list.validate().is_err());
    }

    #[test]
    fn zero_length_segment_rejected() {
        let p = Vec3::new(1.0, 2.0, 3.0);
        assert!(Segment::new(p, p, 1.0).is_err());
        assert!(Segment::new(p, Vec3::ZERO, f64::INFINITY).is_err());
    }

    #[test]
    fn broken_chain_detected() {
        let mut list = SegmentList::new();
        let g = list.add_group("open", true);
        list.push_polyline(g, &[Vec3::ZERO, Vec3::X, Vec3::Y], 1.0, false)
            .unwrap();
        assert!(list.validate().is_err());
        list.groups[0].closed = false;
        list.validate().unwrap();
    }

    #[test]
    fn multiple_closed_paths_in_one_group_chain() {
        let mut list = square(0.01, 1.0);
        let other = square(0.02, 1.0).translated(Vec3::new(0.0, 0.0, 0.01));
        for s in other.segments() {
            list.push(0, *s);
        }
        list.validate().unwrap();
        assert!(list.max_chain_gap(0) < 1e-15);
    }

    #[test]
    fn far_return_closes_path_and_avoids_beam_axes() {
        let mut path = vec![
            Vec3::cylindrical_y(0.011, 45f64.to_radians(), 0.019),
            Vec3::cylindrical_y(0.011, 45f64.to_radians(), -0.013),
            Vec3::cylindrical_y(0.011, 90f64.to_radians(), -0.013),
            Vec3::cylindrical_y(0.011, 135f64.to_radians(), -0.013),
            Vec3::cylindrical_y(0.011, 180f64.to_radians(), -0.013),
        ];
        close_with_far_return(&mut path, 0.13);
        assert_eq!(path.first(), path.last());
        let mut list = SegmentList::new();
        let g = list.add_group("lead", true);
        list.push_polyline(g, &path, 1.0, false).unwrap();
        list.validate().unwrap();
        let report = clearance_check(&list, Vec3::ZERO, 0.015).unwrap();
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn extend_reindexes_groups() {
        let mut a = square(0.01, 1.0);
        let b = square(0.02, 2.0);
        a.extend_from(&b);
        assert_eq!(a.groups().len(), 2);
        assert_eq!(a.group_of(5), 1);
        assert_eq!(a.group_segments(1).count(), 4);
    }
}
