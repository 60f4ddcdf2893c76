//! Resistance, Joule power, current density and cooling requirements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Material, TrapModel};

/// `ρL/A` in ohms.
pub fn conductor_resistance(length: f64, area: f64, material: &Material) -> Result<f64> {
    if !(length > 0.0 && length.is_finite()) || !(area > 0.0 && area.is_finite()) {
        return Err(Error::invalid_input("length and area must be positive"));
    }
    material.validate()?;
    Ok(material.resistivity * length / area)
}

/// `I²R` in watts.
pub fn joule_power(current: f64, resistance: f64) -> f64 {
    current * current * resistance
}

/// Current density in A/mm² for an area in m².
pub fn current_density(current: f64, area: f64) -> Result<f64> {
    if !(area > 0.0) {
        return Err(Error::invalid_input("area must be positive"));
    }
    Ok(current / (area * 1e6))
}

/// Heat-transfer coefficient (W/m²K) needed to carry `power` through
/// `contact_area` with a temperature rise of `delta_t`.
pub fn required_heat_transfer_coefficient(power: f64, contact_area: f64, delta_t: f64) -> Result<f64> {
    if !(contact_area > 0.0) || !(delta_t > 0.0) {
        return Err(Error::invalid_input(
            "contact area and temperature rise must be positive",
        ));
    }
    Ok(power / (contact_area * delta_t))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionPower {
    pub name: String,
    pub length_m: f64,
    pub cross_section_m2: f64,
    pub resistance_ohm: f64,
    pub current_density_a_per_mm2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConductorPower {
    pub name: String,
    pub length_m: f64,
    /// Narrowest declared cross-section.
    pub cross_section_m2: f64,
    pub resistance_ohm: f64,
    pub current_a: f64,
    pub power_w: f64,
    /// Peak density, in the narrowest section.
    pub current_density_a_per_mm2: f64,
    pub sections: Vec<SectionPower>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub material: Material,
    pub conductors: Vec<ConductorPower>,
    pub total_power_w: f64,
}

/// Power budget from the solid sections each conductor declares.
pub fn power_report(model: &TrapModel, material: &Material) -> Result<PowerReport> {
    material.validate()?;
    let mut conductors = Vec::with_capacity(model.conductors.len());
    for c in &model.conductors {
        if c.sections.is_empty() {
            return Err(Error::invalid_input(format!("conductor '{}' has no sections", c.name)));
        }
        let mut sections = Vec::with_capacity(c.sections.len());
        for s in &c.sections {
            sections.push(SectionPower {
                name: s.name.clone(),
                length_m: s.length_m,
                cross_section_m2: s.area_m2,
                resistance_ohm: conductor_resistance(s.length_m, s.area_m2, material)?,
                current_density_a_per_mm2: current_density(c.current, s.area_m2)?,
            });
        }
        let resistance: f64 = sections.iter().map(|s| s.resistance_ohm).sum();
        let narrowest = sections
            .iter()
            .map(|s| s.cross_section_m2)
            .fold(f64::INFINITY, f64::min);
        conductors.push(ConductorPower {
            name: c.name.clone(),
            length_m: sections.iter().map(|s| s.length_m).sum(),
            cross_section_m2: narrowest,
            resistance_ohm: resistance,
            current_a: c.current,
            power_w: joule_power(c.current, resistance),
            current_density_a_per_mm2: current_density(c.current, narrowest)?,
            sections,
        });
    }
    let total_power_w = conductors.iter().map(|c| c.power_w).sum();
    Ok(PowerReport {
        material: material.clone(),
        conductors,
        total_power_w,
    })
}
