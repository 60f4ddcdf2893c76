//! Published reference values, with the tolerances the filament model allows.

use motfield::analysis::{DEFAULT_FIT_SAMPLES, DEFAULT_WINDOW};
use motfield::power::required_heat_transfer_coefficient;
use motfield::{
    field_at, find_field_zero, fit_gradients, mot_suitability, power_report, GeometrySpec, GradientReport, Material,
    SuitabilityTargets, Variant, Vec3,
};

fn gradients(variant: Variant) -> GradientReport {
    let m = GeometrySpec::default_for(variant).unwrap().build().unwrap();
    let z = find_field_zero(&m, m.center, 2e-3).unwrap();
    fit_gradients(&m, z, DEFAULT_WINDOW, DEFAULT_FIT_SAMPLES).unwrap()
}

fn within_half(got: [f64; 3], want: [f64; 3]) {
    for i in 0..3 {
        let rel = (got[i] - want[i]).abs() / want[i].abs();
        assert!(rel <= 0.5, "axis {i}: {} vs {}", got[i], want[i]);
    }
}

fn report(g: [f64; 3]) -> GradientReport {
    GradientReport {
        zero_position: Vec3::ZERO,
        g,
        sigma_g: [0.0; 3],
        ratio: [1.0, g[1] / g[0], g[2] / g[0]],
        linear_window: 2e-3,
        residual_rms: 0.0,
    }
}

#[test]
fn two_piece_gradients() {
    let r = gradients(Variant::TwoPiece);
    within_half(r.g, [8.98, 9.20, -17.6]);
    assert!((r.ratio[2] - -1.9).abs() <= 0.3, "{:?}", r.ratio);
    assert!(r.zero_position.norm() < 0.5e-3);
}

#[test]
fn two_piece_centre_field_below_tenth_gauss() {
    let m = GeometrySpec::default_for(Variant::TwoPiece).unwrap().build().unwrap();
    let b = field_at(&m.segments, m.center).unwrap();
    assert!(b.norm() * 1e4 < 0.1);
}

#[test]
fn compact_four_gradients() {
    let r = gradients(Variant::CompactFour);
    within_half(r.g, [11.5, 11.9, -22.5]);
    assert!((-2.3..=-1.7).contains(&r.ratio[2]), "{:?}", r.ratio);
}

#[test]
fn suitability_of_published_gradients() {
    let t = SuitabilityTargets::default();
    assert!(mot_suitability(&report([8.98, 9.20, -17.6]), &t).passed);
    let early = mot_suitability(&report([15.1, 6.5, -22.1]), &t);
    assert!(!early.ratio_ok && !early.passed);
}

#[test]
fn heat_transfer_requirements() {
    assert_eq!(required_heat_transfer_coefficient(0.2, 4e-5, 200.0).unwrap(), 25.0);
    assert_eq!(required_heat_transfer_coefficient(2.0, 4e-5, 200.0).unwrap(), 250.0);
}

#[test]
fn two_piece_power_brackets_published_estimates() {
    let m = GeometrySpec::default_for(Variant::TwoPiece).unwrap().build().unwrap();
    let cu = power_report(&m, &Material::copper()).unwrap().total_power_w;
    let ti = power_report(&m, &Material::titanium_class()).unwrap().total_power_w;
    assert!((0.05..=1.0).contains(&cu), "{cu}");
    assert!((ti / cu - 10.0).abs() < 1e-12);
    assert!((0.5..=10.0).contains(&ti), "{ti}");
}

#[test]
fn twisted_cage_power_order_of_magnitude() {
    let m = GeometrySpec::default_for(Variant::TwistedCage)
        .unwrap()
        .build()
        .unwrap();
    let p = power_report(&m, &Material::copper()).unwrap().total_power_w;
    assert!((0.1..=100.0).contains(&p), "{p}");
}
