//! Subcommand implementations. Each one computes every output in memory
//! before anything is written.

use std::path::Path;

use anyhow::{bail, Context, Result};
use motfield::analysis::{find_field_zero, fit_gradients, mot_suitability, GradientReport, Suitability};
use motfield::field::{sample_line, sample_plane, samples_to_csv};
use motfield::power::{power_report, required_heat_transfer_coefficient, PowerReport};
use motfield::{clearance_check, io, optimize_geometry, scaling_report, ClearanceReport, ScalingReport, Variant, Vec3};
use serde::Serialize;

use crate::config::{RunConfig, PLANES};
use crate::output::write_all;

#[derive(Debug, Serialize)]
pub struct ThermalReport {
    pub contact_area_mm2: f64,
    pub delta_t_k: f64,
    pub required_heat_transfer_w_per_m2k: f64,
}

#[derive(Debug, Serialize)]
pub struct SimulationReport {
    pub variant: Variant,
    pub gradient: GradientReport,
    pub suitability: Suitability,
    pub power: PowerReport,
    pub clearance: ClearanceReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thermal: Option<ThermalReport>,
}

fn json(value: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Field scans and reports for one configuration, as `(file, contents)`.
pub fn simulate_outputs(cfg: &RunConfig) -> Result<(SimulationReport, Vec<(String, String)>)> {
    let a = &cfg.analysis;
    let material = cfg.material.resolve()?;
    let model = cfg.geometry.build()?;
    let clearance = clearance_check(&model.segments, model.center, a.beam_diameter)?;
    let zero = find_field_zero(&model, model.center, a.zero_search_radius).context("locating the field zero")?;
    let gradient = fit_gradients(&model, zero, a.window, a.samples).context("fitting gradients")?;
    let suitability = mot_suitability(&gradient, &a.suitability);
    let power = power_report(&model, &material)?;
    let thermal = match &cfg.thermal {
        Some(t) => Some(ThermalReport {
            contact_area_mm2: t.contact_area_mm2,
            delta_t_k: t.delta_t_k,
            required_heat_transfer_w_per_m2k: required_heat_transfer_coefficient(
                power.total_power_w,
                t.contact_area_mm2 * 1e-6,
                t.delta_t_k,
            )?,
        }),
        None => None,
    };

    let mut files = Vec::new();
    for (axis, name) in ["x", "y", "z"].iter().enumerate() {
        let s = sample_line(&model, zero, Vec3::axis(axis), a.line_half_range, a.line_samples)?;
        files.push((format!("line_{name}.csv"), samples_to_csv(&s)));
    }
    for (name, i, j) in PLANES {
        if !a.planes.iter().any(|p| p == name) {
            continue;
        }
        let h = a.plane_half_range;
        let g = sample_plane(
            &model,
            zero,
            Vec3::axis(i),
            Vec3::axis(j),
            (h, h),
            a.plane_samples,
            a.plane_samples,
        )?;
        files.push((format!("plane_{name}.csv"), samples_to_csv(&g.samples)));
    }
    let report = SimulationReport {
        variant: cfg.geometry.variant(),
        gradient,
        suitability,
        power,
        clearance,
        thermal,
    };
    files.push(("report.json".into(), json(&report)?));
    Ok((report, files))
}

pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<()> {
    let (report, files) = simulate_outputs(cfg)?;
    write_all(out, &files)?;
    let g = &report.gradient;
    let z = g.zero_position * 1e3;
    println!("variant      {}", report.variant);
    println!("zero (mm)    {:.4} {:.4} {:.4}", z.x, z.y, z.z);
    println!(
        "g (G/cm)     {:.3} {:.3} {:.3}  (sigma {:.2e} {:.2e} {:.2e})",
        g.g[0], g.g[1], g.g[2], g.sigma_g[0], g.sigma_g[1], g.sigma_g[2]
    );
    println!("ratio        {:.3} : {:.3} : {:.3}", g.ratio[0], g.ratio[1], g.ratio[2]);
    println!(
        "power        {:.4} W ({})",
        report.power.total_power_w, report.power.material.name
    );
    println!(
        "clearance    {} (margin {:.3} mm)",
        if report.clearance.passed { "pass" } else { "FAIL" },
        report.clearance.min_clearance_m * 1e3
    );
    println!(
        "MOT criteria {}",
        if report.suitability.passed { "pass" } else { "fail" }
    );
    println!("wrote {} files to {}", files.len(), out.display());
    Ok(())
}

pub fn optimize_outputs(cfg: &RunConfig) -> Result<(motfield::OptResult, Vec<(String, String)>)> {
    let Some(obj) = &cfg.objective else {
        bail!("config is missing the `objective` key required by optimize");
    };
    let result = optimize_geometry(&cfg.geometry, obj, cfg.budget)?;
    let files = vec![
        ("opt_result.json".to_string(), json(&result)?),
        ("trace.csv".to_string(), result.trace_csv()),
    ];
    Ok((result, files))
}

pub fn optimize(cfg: &RunConfig, out: &Path) -> Result<()> {
    let (result, files) = optimize_outputs(cfg)?;
    write_all(out, &files)?;
    for (name, v) in &result.best_parameters {
        println!("{name:<24} {v}");
    }
    println!("objective                {}", result.best_objective);
    println!(
        "evaluations              {} ({})",
        result.evaluations,
        if result.converged { "converged" } else { "not converged" }
    );
    Ok(())
}

pub fn scale_table(r: &ScalingReport) -> String {
    let mut s = format!("k = {}\n", r.k);
    for (name, v) in r.rows() {
        s.push_str(&format!("{name:<12} {v:.6}\n"));
    }
    s
}

pub fn scale(k: f64, out: Option<&Path>) -> Result<()> {
    let report = scaling_report(k)?;
    let text = json(&report)?;
    if let Some(dir) = out {
        write_all(dir, &[("scaling.json".into(), text.clone())])?;
    }
    print!("{}", scale_table(&report));
    print!("{text}");
    Ok(())
}

pub fn export(cfg: &RunConfig, out: &Path) -> Result<()> {
    let model = cfg.geometry.build()?;
    let text = io::export_obj(&model.segments);
    write_all(out, &[("geometry.obj".into(), text)])?;
    println!(
        "wrote {} segments in {} groups to {}",
        model.segments.len(),
        model.segments.groups().len(),
        out.join("geometry.obj").display()
    );
    Ok(())
}
