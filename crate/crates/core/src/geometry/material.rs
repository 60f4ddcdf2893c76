use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Copper resistivity at 20 °C (Ω·m).
pub const COPPER_RESISTIVITY: f64 = 1.68e-8;

/// Resistivity ratio of printable titanium/nickel-class alloys to copper.
pub const TITANIUM_CLASS_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub name: String,
    #[serde(rename = "resistivity_ohm_m")]
    pub resistivity: f64,
}

impl Material {
    pub fn new(name: impl Into<String>, resistivity: f64) -> Result<Self> {
        if !(resistivity > 0.0 && resistivity.is_finite()) {
            return Err(Error::invalid_input("resistivity must be positive"));
        }
        Ok(Self {
            name: name.into(),
            resistivity,
        })
    }

    pub fn copper() -> Self {
        Self {
            name: "copper".into(),
            resistivity: COPPER_RESISTIVITY,
        }
    }

    /// Titanium/nickel-class printed metal, modelled as ten times copper.
    pub fn titanium_class() -> Self {
        Self {
            name: "titanium-class".into(),
            resistivity: COPPER_RESISTIVITY * TITANIUM_CLASS_FACTOR,
        }
    }

    /// Looks up a named preset.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "copper" => Some(Self::copper()),
            "titanium" | "nickel" | "titanium-class" => Some(Self::titanium_class()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.name.clone(), self.resistivity).map(|_| ())
    }
}

impl Default for Material {
    fn default() -> Self {
        Self::copper()
    }
}
