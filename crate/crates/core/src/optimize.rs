//! Bounded Nelder-Mead search over named geometry parameters.
//!
//! The objective combines the distance of the weakest gradient from a
//! target, the deviation of the gradient ratio from `1:1:-2`, and Joule
//! power. Geometries that cannot be built, block a laser beam, or exceed the
//! power cap are infeasible and score `+∞`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::{find_field_zero, fit_gradients, GradientReport};
use crate::error::{Error, Result};
use crate::geometry::{clearance_check, GeometrySpec, Material};
use crate::power::{power_report, PowerReport};
use crate::units::millimetres;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    pub magnitude: f64,
    pub ratio: f64,
    pub power: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Self {
            magnitude: 1.0,
            ratio: 1.0,
            power: 0.0,
        }
    }
}

/// Search target and constraints. Bounds are keyed by parameter name and
/// given in config units (mm, A, rad).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObjectiveSpec {
    pub target_gradient_gcm: f64,
    pub target_ratio: [f64; 3],
    pub weights: Weights,
    #[serde(rename = "beam_diameter_mm", with = "millimetres")]
    pub beam_diameter: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_power_w: Option<f64>,
    pub power_ref_w: f64,
    pub bounds: BTreeMap<String, [f64; 2]>,
    pub material: Material,
    /// Half-width of the gradient fit.
    #[serde(rename = "window_mm", with = "millimetres")]
    pub window: f64,
    pub samples: usize,
    #[serde(rename = "zero_search_radius_mm", with = "millimetres")]
    pub zero_search_radius: f64,
}

impl Default for ObjectiveSpec {
    fn default() -> Self {
        Self {
            target_gradient_gcm: 15.0,
            target_ratio: [1.0, 1.0, -2.0],
            weights: Weights::default(),
            beam_diameter: 0.015,
            max_power_w: None,
            power_ref_w: 1.0,
            bounds: BTreeMap::new(),
            material: Material::copper(),
            window: 2e-3,
            samples: 41,
            zero_search_radius: 2e-3,
        }
    }
}

impl ObjectiveSpec {
    pub fn validate(&self) -> Result<()> {
        let w = [self.weights.magnitude, self.weights.ratio, self.weights.power];
        if w.iter().any(|v| !(*v >= 0.0 && v.is_finite())) || w.iter().all(|v| *v == 0.0) {
            return Err(Error::invalid_input(
                "weights must be non-negative with at least one positive",
            ));
        }
        if !(self.target_gradient_gcm > 0.0) || !(self.power_ref_w > 0.0) {
            return Err(Error::invalid_input("target gradient and power_ref_w must be positive"));
        }
        if self.target_ratio.iter().any(|r| !r.is_finite()) {
            return Err(Error::invalid_input("target ratio must be finite"));
        }
        if !(self.beam_diameter > 0.0) || !(self.window > 0.0) || !(self.zero_search_radius > 0.0) {
            return Err(Error::invalid_input(
                "beam diameter, window and zero search radius must be positive",
            ));
        }
        if self.samples < 5 {
            return Err(Error::invalid_input("samples must be at least 5"));
        }
        for (name, [lo, hi]) in &self.bounds {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::invalid_input(format!("bounds for '{name}' are not ordered")));
            }
        }
        self.material.validate()
    }
}

/// One objective evaluation with the reports behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    pub gradient: Option<GradientReport>,
    pub power: Option<PowerReport>,
}

impl Evaluation {
    fn infeasible() -> Self {
        Self {
            objective: f64::INFINITY,
            gradient: None,
            power: None,
        }
    }
}

/// Objective from an already fitted report and a total power.
pub fn objective_from_reports(report: &GradientReport, power_w: f64, obj: &ObjectiveSpec) -> f64 {
    let t = obj.target_gradient_gcm;
    let mag = ((report.min_abs_gradient() - t) / t).powi(2);
    let ratio: f64 = report
        .ratio
        .iter()
        .zip(&obj.target_ratio)
        .map(|(r, t)| (r - t).powi(2))
        .sum::<f64>()
        / 4.0;
    obj.weights.magnitude * mag + obj.weights.ratio * ratio + obj.weights.power * power_w / obj.power_ref_w
}

/// Builds, checks and scores one geometry. Infeasible geometries score
/// `+∞`; solver failures are returned as [`Error::ObjectiveEvaluation`].
pub fn evaluate(spec: &GeometrySpec, obj: &ObjectiveSpec) -> Result<Evaluation> {
    let model = match spec.build() {
        Ok(m) => m,
        Err(Error::InvalidGeometry(_) | Error::Clearance(_)) => return Ok(Evaluation::infeasible()),
        Err(e) => return Err(e),
    };
    if !clearance_check(&model.segments, model.center, obj.beam_diameter)?.passed {
        return Ok(Evaluation::infeasible());
    }
    let power = power_report(&model, &obj.material)?;
    if obj.max_power_w.is_some_and(|cap| power.total_power_w > cap) {
        return Ok(Evaluation::infeasible());
    }
    let wrap = |e: Error| Error::ObjectiveEvaluation(e.to_string());
    let zero = find_field_zero(&model, model.center, obj.zero_search_radius).map_err(wrap)?;
    let report = fit_gradients(&model, zero, obj.window, obj.samples).map_err(wrap)?;
    let objective = objective_from_reports(&report, power.total_power_w, obj);
    Ok(Evaluation {
        objective,
        gradient: Some(report),
        power: Some(power),
    })
}

pub fn objective_value(spec: &GeometrySpec, obj: &ObjectiveSpec) -> Result<f64> {
    evaluate(spec, obj).map(|e| e.objective)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub eval: usize,
    pub objective: f64,
    /// Parameter values in config units, in canonical (sorted) order.
    pub parameters: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    /// Best parameter values in config units (mm, A, rad).
    pub best_parameters: BTreeMap<String, f64>,
    pub best_objective: f64,
    pub best_geometry: GeometrySpec,
    pub gradient_report: Option<GradientReport>,
    pub power_report: Option<PowerReport>,
    pub evaluations: usize,
    pub converged: bool,
    #[serde(skip)]
    pub parameter_names: Vec<String>,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

impl OptResult {
    /// Trace as CSV with header `eval,objective,<parameter names>`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("eval,objective");
        for n in &self.parameter_names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for row in &self.trace {
            out.push_str(&format!("{},{}", row.eval, row.objective));
            for v in &row.parameters {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const INITIAL_STEP: f64 = 0.1;
const SPREAD_TOL: f64 = 1e-6;

struct Problem<'a> {
    base: &'a GeometrySpec,
    obj: &'a ObjectiveSpec,
    names: Vec<String>,
    /// `(lower, upper, SI per config unit)`.
    scales: Vec<(f64, f64, f64)>,
    budget: usize,
    trace: Vec<TraceRow>,
    best: Option<(f64, Vec<f64>, Evaluation)>,
}

impl Problem<'_> {
    fn config_values(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(&self.scales)
            .map(|(&u, &(lo, hi, _))| lo + u * (hi - lo))
            .collect()
    }

    fn spec_at(&self, u: &[f64]) -> Result<GeometrySpec> {
        let mut spec = self.base.clone();
        for ((name, v), &(_, _, si)) in self.names.iter().zip(self.config_values(u)).zip(&self.scales) {
            spec.set(name, v * si)?;
        }
        Ok(spec)
    }

    /// Scores `u`; `None` once the budget is spent.
    fn eval(&mut self, u: &[f64]) -> Option<f64> {
        if self.trace.len() >= self.budget {
            return None;
        }
        let e = self
            .spec_at(u)
            .and_then(|s| evaluate(&s, self.obj))
            .unwrap_or_else(|_| Evaluation::infeasible());
        let f = e.objective;
        self.trace.push(TraceRow {
            eval: self.trace.len() + 1,
            objective: f,
            parameters: self.config_values(u),
        });
        if self.best.as_ref().is_none_or(|(b, _, _)| f < *b) {
            self.best = Some((f, u.to_vec(), e));
        }
        Some(f)
    }
}

fn project(u: Vec<f64>) -> Vec<f64> {
    u.into_iter().map(|v| v.clamp(0.0, 1.0)).collect()
}

fn along(c: &[f64], toward: &[f64], t: f64) -> Vec<f64> {
    project(c.iter().zip(toward).map(|(c, x)| c + t * (x - c)).collect())
}

/// Minimizes the objective over the parameters named in `obj.bounds`.
///
/// Parameters are handled in sorted name order and normalized to their
/// bounds, so the result does not depend on declaration order. `budget`
/// caps the number of objective evaluations.
pub fn optimize_geometry(initial: &GeometrySpec, obj: &ObjectiveSpec, budget: usize) -> Result<OptResult> {
    obj.validate()?;
    if obj.bounds.is_empty() {
        return Err(Error::invalid_input("no free parameters: objective bounds are empty"));
    }
    if budget == 0 {
        return Err(Error::invalid_input("evaluation budget must be at least 1"));
    }
    let names: Vec<String> = obj.bounds.keys().cloned().collect();
    let mut scales = Vec::with_capacity(names.len());
    let mut u0 = Vec::with_capacity(names.len());
    for name in &names {
        let [lo, hi] = obj.bounds[name];
        let si = 1.0 / initial.unit_of(name)?.display_factor();
        let value = initial.get(name)? / si;
        scales.push((lo, hi, si));
        u0.push(((value - lo) / (hi - lo)).clamp(0.0, 1.0));
    }
    let mut pb = Problem {
        base: initial,
        obj,
        names: names.clone(),
        scales,
        budget,
        trace: Vec::new(),
        best: None,
    };

    let f0 = pb.eval(&u0).expect("budget is at least one");
    if !f0.is_finite() {
        let reason = match pb.spec_at(&u0).and_then(|s| evaluate(&s, obj)) {
            Err(e) => e.to_string(),
            Ok(_) => "geometry is invalid, blocks a beam, or exceeds the power cap".into(),
        };
        return Err(Error::InfeasibleStart(reason));
    }
    let converged = nelder_mead(&mut pb, u0, f0);

    let (best_objective, best_u, best_eval) = pb.best.take().expect("initial point evaluated");
    let best_geometry = pb.spec_at(&best_u)?;
    let best_parameters = names.iter().cloned().zip(pb.config_values(&best_u)).collect();
    Ok(OptResult {
        best_parameters,
        best_objective,
        best_geometry,
        gradient_report: best_eval.gradient,
        power_report: best_eval.power,
        evaluations: pb.trace.len(),
        converged,
        parameter_names: names,
        trace: pb.trace,
    })
}

/// Runs the simplex loop; returns whether the spread criterion was met.
fn nelder_mead(pb: &mut Problem, u0: Vec<f64>, f0: f64) -> bool {
    let d = u0.len();
    let mut simplex = vec![(u0.clone(), f0)];
    for i in 0..d {
        let mut u = u0.clone();
        u[i] += if u[i] + INITIAL_STEP > 1.0 {
            -INITIAL_STEP
        } else {
            INITIAL_STEP
        };
        let Some(f) = pb.eval(&u) else { return false };
        simplex.push((u, f));
    }
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[d].1;
        if worst.is_finite() && worst - best < SPREAD_TOL * (1.0 + best.abs()) {
            return true;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|k| simplex[..d].iter().map(|(u, _)| u[k]).sum::<f64>() / d as f64)
            .collect();
        let xw = simplex[d].0.clone();
        let xr = along(&centroid, &xw, -REFLECT);
        let Some(fr) = pb.eval(&xr) else { return false };
        if fr < best {
            let xe = along(&centroid, &xw, -EXPAND);
            let Some(fe) = pb.eval(&xe) else { return false };
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
            continue;
        }
        let (xc, limit) = if fr < worst {
            (along(&centroid, &xr, CONTRACT), fr)
        } else {
            (along(&centroid, &xw, CONTRACT), worst)
        };
        let Some(fc) = pb.eval(&xc) else { return false };
        if fc < limit {
            simplex[d] = (xc, fc);
            continue;
        }
        let x0 = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let u = along(&x0, &vertex.0, SHRINK);
            let Some(f) = pb.eval(&u) else { return false };
            *vertex = (u, f);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::DEFAULT_WINDOW;
    use crate::geometry::Variant;
    use crate::Vec3;

    fn separation_objective() -> ObjectiveSpec {
        ObjectiveSpec {
            weights: Weights {
                magnitude: 1.0,
                ratio: 0.0,
                power: 0.0,
            },
            bounds: [("separation".to_string(), [20.0, 120.0])].into(),
            samples: 11,
            ..Default::default()
        }
    }

    #[test]
    fn exact_target_scores_zero() {
        let r = GradientReport {
            zero_position: Vec3::ZERO,
            g: [15.0, 15.0, -30.0],
            sigma_g: [0.0; 3],
            ratio: [1.0, 1.0, -2.0],
            linear_window: DEFAULT_WINDOW,
            residual_rms: 0.0,
        };
        let obj = ObjectiveSpec::default();
        assert_eq!(objective_from_reports(&r, 1.0, &obj), 0.0);
    }

    #[test]
    fn beam_blocking_geometry_is_infinite() {
        let spec = GeometrySpec::default_for(Variant::AntiHelmholtz).unwrap();
        let obj = ObjectiveSpec {
            beam_diameter: 0.2,
            ..Default::default()
        };
        assert_eq!(objective_value(&spec, &obj).unwrap(), f64::INFINITY);
    }

    #[test]
    fn budget_of_one_returns_start() {
        let spec = GeometrySpec::default_for(Variant::AntiHelmholtz).unwrap();
        let r = optimize_geometry(&spec, &separation_objective(), 1).unwrap();
        assert_eq!(r.evaluations, 1);
        assert!(!r.converged);
        assert_eq!(r.best_parameters["separation"], 50.0);
        assert_eq!(r.best_geometry, spec);
    }

    #[test]
    fn infeasible_start_is_reported() {
        let spec = GeometrySpec::default_for(Variant::AntiHelmholtz).unwrap();
        let obj = ObjectiveSpec {
            beam_diameter: 0.2,
            ..separation_objective()
        };
        assert!(matches!(
            optimize_geometry(&spec, &obj, 10),
            Err(Error::InfeasibleStart(_))
        ));
    }

    #[test]
    fn separation_converges_near_radius() {
        let mut spec = GeometrySpec::default_for(Variant::AntiHelmholtz).unwrap();
        spec.set("separation", 0.08).unwrap();
        spec.discretization.segments_per_turn = 120;
        let r = optimize_geometry(&spec, &separation_objective(), 200).unwrap();
        assert!(r.converged);
        let sep = r.best_parameters["separation"];
        assert!((sep - 50.0).abs() < 1.0, "separation {sep}");
        let mut best = f64::INFINITY;
        for row in &r.trace {
            best = best.min(row.objective);
        }
        assert_eq!(best, r.best_objective);
        assert!(r.trace_csv().starts_with("eval,objective,separation\n"));
    }

    #[test]
    fn bad_objectives_rejected() {
        let zero = ObjectiveSpec {
            weights: Weights {
                magnitude: 0.0,
                ratio: 0.0,
                power: 0.0,
            },
            ..Default::default()
        };
        assert!(zero.validate().is_err());
        let inverted = ObjectiveSpec {
            bounds: [("radius".to_string(), [60.0, 40.0])].into(),
            ..Default::default()
        };
        assert!(inverted.validate().is_err());
    }
}
