//! Miniaturization scaling at constant conductor temperature.
//!
//! With every length scaled by `k`, the radiating area and hence the
//! tolerable heat rate go as `k²`. Resistance goes as `k⁻¹`, so the current
//! can grow as `k^{3/2}`. [`scaling_report`] then takes `B ∝ I/l²` and
//! `∇B ∝ l^{-3/2}`.
//!
//! [`verify_scaling_numerically`] measures the exponent by simulation
//! instead. For a shape-preserving scaling the integrated Biot-Savart field
//! goes as `I/l` and its gradient as `I/l²`, so the simulated gradient
//! exponent is `-1/2` with `I ∝ k^{3/2}` and `-2` at fixed current.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::fit_gradients;
use crate::error::{Error, Result};
use crate::geometry::GeometrySpec;

/// Ratios of scaled to original quantities for a linear scale factor `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub k: f64,
    pub volume: f64,
    pub resistance: f64,
    pub current: f64,
    pub field: f64,
    pub gradient: f64,
    pub power: f64,
    /// Tolerable heat dissipation rate.
    pub heat_rate: f64,
}

impl ScalingReport {
    /// `(name, value)` rows in display order.
    pub fn rows(&self) -> [(&'static str, f64); 7] {
        [
            ("volume", self.volume),
            ("resistance", self.resistance),
            ("current", self.current),
            ("field", self.field),
            ("gradient", self.gradient),
            ("power", self.power),
            ("heat_rate", self.heat_rate),
        ]
    }
}

pub fn scaling_report(k: f64) -> Result<ScalingReport> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid_input("scale factor must be positive"));
    }
    Ok(ScalingReport {
        k,
        volume: k.powi(3),
        resistance: k.powi(-1),
        current: k.powf(1.5),
        field: k.powf(-0.5),
        gradient: k.powf(-1.5),
        power: k.powi(2),
        heat_rate: k.powi(2),
    })
}

/// How the current follows the length scale in a numerical check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurrentScaling {
    /// `I ∝ k^{3/2}`, the constant-temperature rule.
    ConstantTemperature,
    /// Current held fixed.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    /// Log-log slope of `|g_z|` against `k`.
    pub exponent: f64,
    pub k_values: Vec<f64>,
    pub gz_gcm: Vec<f64>,
}

/// Simulates `base` scaled by each `k` and fits the exponent of `|g_z|`.
///
/// The fit window and the expected zero (the model centre) scale with the
/// geometry.
pub fn verify_scaling_numerically(
    base: &GeometrySpec,
    k_values: &[f64],
    current: CurrentScaling,
    window: f64,
    samples: usize,
) -> Result<ScalingFit> {
    let mut distinct: Vec<f64> = k_values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.iter().any(|&k| !(k > 0.0 && k.is_finite())) {
        return Err(Error::invalid_input("scale factors must be positive"));
    }
    if distinct.len() < 2 {
        return Err(Error::DegenerateFit("need at least two distinct scale factors".into()));
    }
    if distinct[distinct.len() - 1] / distinct[0] < 4.0 {
        return Err(Error::invalid_input("scale factors must span at least a factor of 4"));
    }
    let gz = k_values
        .par_iter()
        .map(|&k| {
            let factor = match current {
                CurrentScaling::ConstantTemperature => k.powf(1.5),
                CurrentScaling::Fixed => 1.0,
            };
            let model = base.scaled(k, factor)?.build()?;
            let r = fit_gradients(&model, model.center, window * k, samples)?;
            Ok(r.g[2].abs())
        })
        .collect::<Result<Vec<f64>>>()?;

    let xs: Vec<f64> = k_values.iter().map(|k| k.ln()).collect();
    let ys: Vec<f64> = gz.iter().map(|g| g.ln()).collect();
    let n = xs.len() as f64;
    let (xm, ym) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    Ok(ScalingFit {
        exponent: sxy / sxx,
        k_values: k_values.to_vec(),
        gz_gcm: gz,
    })
}
