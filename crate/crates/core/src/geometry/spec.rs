//! Serializable parametric description of a trap geometry.
//!
//! On the wire a spec is
//! `{"variant": "...", "parameters": {...}, "discretization": {...}}` with
//! lengths in millimetres and currents in amperes; unknown keys are
//! rejected at every level.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{
    make_anti_helmholtz, make_compact_four, make_ioffe_pritchard, make_twisted_cage, make_two_piece, path_length,
    AntiHelmholtzParams, CompactFourParams, Conductor, ConductorSection, IoffePritchardParams, SegmentList, TrapModel,
    TwistedCageParams, TwoPieceParams,
};
use crate::error::{Error, Result};
use crate::units::{millimetres_points, millimetres_vec3};
use crate::Vec3;

/// Smallest accepted `segments_per_turn`.
pub const MIN_SEGMENTS_PER_TURN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    AntiHelmholtz,
    IoffePritchard,
    TwistedCage,
    CompactFour,
    TwoPiece,
    FreePath,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Discretization {
    /// Polygon segments per full turn of any arc.
    pub segments_per_turn: usize,
    /// Filament grid size per side for rectangular or arm cross-sections.
    pub filaments_per_side: usize,
    /// Hexagonal rings around the centre filament for round bars.
    pub bundle_rings: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Self {
            segments_per_turn: 360,
            filaments_per_side: 3,
            bundle_rings: 1,
        }
    }
}

impl Discretization {
    pub fn validate(&self) -> Result<()> {
        if self.segments_per_turn < MIN_SEGMENTS_PER_TURN {
            return Err(Error::invalid_geometry(format!(
                "segments_per_turn must be at least {MIN_SEGMENTS_PER_TURN}"
            )));
        }
        if self.filaments_per_side == 0 {
            return Err(Error::invalid_geometry("filaments_per_side must be at least 1"));
        }
        Ok(())
    }
}

/// One user-defined filament path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreePath {
    pub name: String,
    #[serde(with = "millimetres_points")]
    pub points: Vec<Vec3>,
    pub current: f64,
    /// Closes the path back to its first point.
    #[serde(default)]
    pub closed: bool,
    /// Solid cross-section for resistance; paths without one are not
    /// included in power estimates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_section_mm2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreePathParams {
    pub paths: Vec<FreePath>,
    #[serde(with = "millimetres_vec3", default)]
    pub center: Vec3,
}

fn make_free_path(p: &FreePathParams) -> Result<TrapModel> {
    if p.paths.is_empty() {
        return Err(Error::invalid_geometry("free path geometry has no paths"));
    }
    let mut list = SegmentList::new();
    let mut conductors = Vec::new();
    for path in &p.paths {
        if !path.current.is_finite() {
            return Err(Error::invalid_geometry(format!(
                "path '{}' has non-finite current",
                path.name
            )));
        }
        let g = list.add_group(path.name.clone(), path.closed);
        list.push_polyline(g, &path.points, path.current, path.closed)?;
        if let Some(area) = path.cross_section_mm2 {
            if !(area > 0.0 && area.is_finite()) {
                return Err(Error::invalid_geometry(format!(
                    "path '{}' has a non-positive cross-section",
                    path.name
                )));
            }
            conductors.push(Conductor {
                name: path.name.clone(),
                current: path.current,
                sections: vec![ConductorSection {
                    name: "path".into(),
                    length_m: path_length(&list, g)?,
                    area_m2: area * 1e-6,
                }],
            });
        }
    }
    Ok(TrapModel {
        segments: list,
        conductors,
        center: p.center,
    })
}

/// Variant-specific parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum GeometryParams {
    AntiHelmholtz(AntiHelmholtzParams),
    IoffePritchard(IoffePritchardParams),
    TwistedCage(TwistedCageParams),
    CompactFour(CompactFourParams),
    TwoPiece(TwoPieceParams),
    FreePath(FreePathParams),
}

/// Physical kind of a named scalar parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamUnit {
    Length,
    Current,
    Angle,
}

impl ParamUnit {
    /// Factor from SI to the units used in configs and reports.
    pub fn display_factor(self) -> f64 {
        match self {
            ParamUnit::Length => 1e3,
            ParamUnit::Current | ParamUnit::Angle => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct GeometrySpec {
    pub params: GeometryParams,
    pub discretization: Discretization,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    variant: Variant,
    parameters: serde_json::Value,
    #[serde(default)]
    discretization: Discretization,
}

impl TryFrom<RawSpec> for GeometrySpec {
    type Error = String;

    fn try_from(raw: RawSpec) -> std::result::Result<Self, String> {
        fn parse<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> std::result::Result<T, String> {
            serde_json::from_value(v).map_err(|e| format!("parameters: {e}"))
        }
        let params = match raw.variant {
            Variant::AntiHelmholtz => GeometryParams::AntiHelmholtz(parse(raw.parameters)?),
            Variant::IoffePritchard => GeometryParams::IoffePritchard(parse(raw.parameters)?),
            Variant::TwistedCage => GeometryParams::TwistedCage(parse(raw.parameters)?),
            Variant::CompactFour => GeometryParams::CompactFour(parse(raw.parameters)?),
            Variant::TwoPiece => GeometryParams::TwoPiece(parse(raw.parameters)?),
            Variant::FreePath => GeometryParams::FreePath(parse(raw.parameters)?),
        };
        Ok(GeometrySpec {
            params,
            discretization: raw.discretization,
        })
    }
}

impl From<GeometrySpec> for RawSpec {
    fn from(s: GeometrySpec) -> Self {
        let variant = s.variant();
        let parameters = match &s.params {
            GeometryParams::AntiHelmholtz(p) => serde_json::to_value(p),
            GeometryParams::IoffePritchard(p) => serde_json::to_value(p),
            GeometryParams::TwistedCage(p) => serde_json::to_value(p),
            GeometryParams::CompactFour(p) => serde_json::to_value(p),
            GeometryParams::TwoPiece(p) => serde_json::to_value(p),
            GeometryParams::FreePath(p) => serde_json::to_value(p),
        }
        .expect("parameter structs serialize to JSON");
        RawSpec {
            variant,
            parameters,
            discretization: s.discretization,
        }
    }
}

impl GeometrySpec {
    pub fn new(params: GeometryParams) -> Self {
        Self {
            params,
            discretization: Discretization::default(),
        }
    }

    /// The variant at its default parameters. `FreePath` has no default.
    pub fn default_for(variant: Variant) -> Option<Self> {
        let params = match variant {
            Variant::AntiHelmholtz => GeometryParams::AntiHelmholtz(Default::default()),
            Variant::IoffePritchard => GeometryParams::IoffePritchard(Default::default()),
            Variant::TwistedCage => GeometryParams::TwistedCage(Default::default()),
            Variant::CompactFour => GeometryParams::CompactFour(Default::default()),
            Variant::TwoPiece => GeometryParams::TwoPiece(Default::default()),
            Variant::FreePath => return None,
        };
        Some(Self::new(params))
    }

    pub fn variant(&self) -> Variant {
        match self.params {
            GeometryParams::AntiHelmholtz(_) => Variant::AntiHelmholtz,
            GeometryParams::IoffePritchard(_) => Variant::IoffePritchard,
            GeometryParams::TwistedCage(_) => Variant::TwistedCage,
            GeometryParams::CompactFour(_) => Variant::CompactFour,
            GeometryParams::TwoPiece(_) => Variant::TwoPiece,
            GeometryParams::FreePath(_) => Variant::FreePath,
        }
    }

    pub fn build(&self) -> Result<TrapModel> {
        let d = &self.discretization;
        d.validate()?;
        let n = d.segments_per_turn;
        let model = match &self.params {
            GeometryParams::AntiHelmholtz(p) => make_anti_helmholtz(p, n)?,
            GeometryParams::IoffePritchard(p) => make_ioffe_pritchard(p, n)?,
            GeometryParams::TwistedCage(p) => make_twisted_cage(p, n, d.bundle_rings)?,
            GeometryParams::CompactFour(p) => make_compact_four(p, n, d.filaments_per_side)?,
            GeometryParams::TwoPiece(p) => make_two_piece(p, n, d.filaments_per_side)?,
            GeometryParams::FreePath(p) => make_free_path(p)?,
        };
        model.segments.validate()?;
        Ok(model)
    }

    fn fields_mut(&mut self) -> Vec<(&'static str, ParamUnit, &mut f64)> {
        use ParamUnit::{Angle, Current, Length};
        match &mut self.params {
            GeometryParams::AntiHelmholtz(p) => vec![
                ("radius", Length, &mut p.radius),
                ("separation", Length, &mut p.separation),
                ("current", Current, &mut p.current),
                ("wire_diameter", Length, &mut p.wire_diameter),
            ],
            GeometryParams::IoffePritchard(p) => vec![
                ("bar_radius", Length, &mut p.bar_radius),
                ("bar_length", Length, &mut p.bar_length),
                ("coil_radius", Length, &mut p.coil_radius),
                ("coil_separation", Length, &mut p.coil_separation),
                ("bar_current", Current, &mut p.bar_current),
                ("coil_current", Current, &mut p.coil_current),
                ("wire_diameter", Length, &mut p.wire_diameter),
            ],
            GeometryParams::TwistedCage(p) => vec![
                ("height", Length, &mut p.height),
                ("outer_width", Length, &mut p.outer_width),
                ("bar_diameter", Length, &mut p.bar_diameter),
                ("twist_angle", Angle, &mut p.twist_angle),
                ("current", Current, &mut p.current),
            ],
            GeometryParams::CompactFour(p) => vec![
                ("height", Length, &mut p.height),
                ("width", Length, &mut p.width),
                ("hole_diameter", Length, &mut p.hole_diameter),
                ("gap", Length, &mut p.gap),
                ("current_per_conductor", Current, &mut p.current_per_conductor),
            ],
            GeometryParams::TwoPiece(p) => vec![
                ("height", Length, &mut p.height),
                ("outer_diameter", Length, &mut p.outer_diameter),
                ("arm_width", Length, &mut p.arm_width),
                ("hole_diameter", Length, &mut p.hole_diameter),
                ("gap", Length, &mut p.gap),
                ("current_per_conductor", Current, &mut p.current_per_conductor),
            ],
            GeometryParams::FreePath(_) => Vec::new(),
        }
    }

    /// Named scalar parameters of this variant, in declaration order.
    pub fn parameters(&self) -> Vec<(&'static str, ParamUnit)> {
        self.clone()
            .fields_mut()
            .into_iter()
            .map(|(name, unit, _)| (name, unit))
            .collect()
    }

    /// Parameter value in SI units.
    pub fn get(&self, name: &str) -> Result<f64> {
        let mut copy = self.clone();
        let found = copy
            .fields_mut()
            .into_iter()
            .find(|(n, _, _)| *n == name)
            .map(|(_, _, v)| *v);
        found.ok_or_else(|| self.unknown(name))
    }

    pub fn unit_of(&self, name: &str) -> Result<ParamUnit> {
        self.parameters()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, u)| u)
            .ok_or_else(|| self.unknown(name))
    }

    /// Sets a parameter (SI units). Validity is checked by [`build`](Self::build).
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let variant = self.variant();
        match self.fields_mut().into_iter().find(|(n, _, _)| *n == name) {
            Some((_, _, slot)) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::invalid_input(format!("{variant} has no parameter '{name}'"))),
        }
    }

    fn unknown(&self, name: &str) -> Error {
        Error::invalid_input(format!("{} has no parameter '{name}'", self.variant()))
    }

    /// Copy with every length multiplied by `k` and every current by
    /// `current_factor`. Angles and discretization are unchanged.
    pub fn scaled(&self, k: f64, current_factor: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) || !current_factor.is_finite() {
            return Err(Error::invalid_input("scale factors must be finite and k > 0"));
        }
        let mut out = self.clone();
        if let GeometryParams::FreePath(p) = &mut out.params {
            p.center = p.center * k;
            for path in &mut p.paths {
                path.points.iter_mut().for_each(|q| *q = *q * k);
                path.current *= current_factor;
                if let Some(a) = &mut path.cross_section_mm2 {
                    *a *= k * k;
                }
            }
            return Ok(out);
        }
        for (_, unit, v) in out.fields_mut() {
            match unit {
                ParamUnit::Length => *v *= k,
                ParamUnit::Current => *v *= current_factor,
                ParamUnit::Angle => {}
            }
        }
        Ok(out)
    }
}
