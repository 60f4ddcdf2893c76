//! Physical constants and unit conversions.
//!
//! Everything inside the crate is SI (metre, ampere, tesla). Configuration
//! files and reports use millimetres and G/cm.

/// Vacuum permeability, fixed at the pre-2019 exact value (T·m/A).
pub const MU0: f64 = 4.0 * std::f64::consts::PI * 1e-7;

/// μ₀/4π, the Biot-Savart prefactor (T·m/A).
pub const MU0_OVER_4PI: f64 = 1e-7;

pub const MM: f64 = 1e-3;

/// Tesla per metre in one G/cm.
pub const T_PER_M_PER_G_PER_CM: f64 = 0.01;

pub const GAUSS_PER_TESLA: f64 = 1e4;

pub fn tesla_per_m_to_gauss_per_cm(g: f64) -> f64 {
    g / T_PER_M_PER_G_PER_CM
}

pub fn gauss_per_cm_to_tesla_per_m(g: f64) -> f64 {
    g * T_PER_M_PER_G_PER_CM
}

pub fn tesla_to_gauss(b: f64) -> f64 {
    b * GAUSS_PER_TESLA
}

/// Serde adapter storing a metre value as millimetres on the wire.
pub mod millimetres {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(v * 1e3)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(f64::deserialize(d)? / 1e3)
    }
}

/// Same as [`millimetres`] for `Vec3` positions.
pub mod millimetres_vec3 {
    use crate::Vec3;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Vec3, s: S) -> Result<S::Ok, S::Error> {
        use serde::Serialize;
        (*v * 1e3).to_array().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec3, D::Error> {
        let a = <[f64; 3]>::deserialize(d)?;
        Ok(Vec3::from(a) / 1e3)
    }
}

/// Same as [`millimetres`] for lists of `Vec3` points.
pub mod millimetres_points {
    use crate::Vec3;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec3], s: S) -> Result<S::Ok, S::Error> {
        let mm: Vec<[f64; 3]> = v.iter().map(|p| (*p * 1e3).to_array()).collect();
        mm.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec3>, D::Error> {
        let a = Vec::<[f64; 3]>::deserialize(d)?;
        Ok(a.into_iter().map(|p| Vec3::from(p) / 1e3).collect())
    }
}
