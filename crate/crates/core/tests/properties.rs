//! Property-based checks of the physical and algorithmic invariants.

use std::sync::OnceLock;

use motfield::analysis::{DEFAULT_FIT_SAMPLES, DEFAULT_STENCIL, DEFAULT_WINDOW};
use motfield::field::FnField;
use motfield::geometry::CHAIN_TOLERANCE;
use motfield::{
    field_at, find_field_zero, fit_gradients, jacobian_at, power_report, scaling_report, GeometrySpec, Material,
    Segment, SegmentList, TrapModel, Variant, Vec3,
};
use proptest::prelude::*;

const PRESETS: [Variant; 5] = [
    Variant::AntiHelmholtz,
    Variant::IoffePritchard,
    Variant::TwistedCage,
    Variant::CompactFour,
    Variant::TwoPiece,
];

fn models() -> &'static Vec<TrapModel> {
    static M: OnceLock<Vec<TrapModel>> = OnceLock::new();
    M.get_or_init(|| {
        PRESETS
            .iter()
            .map(|&v| GeometrySpec::default_for(v).unwrap().build().unwrap())
            .collect()
    })
}

fn nearest_conductor(list: &SegmentList, p: Vec3) -> f64 {
    list.segments()
        .iter()
        .map(|s| s.distance_to(p))
        .fold(f64::INFINITY, f64::min)
}

fn point(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn rel(a: Vec3, b: Vec3) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn current_linearity_is_exact(idx in 0usize..5, p in point(0.007), e in -4i32..5) {
        let m = &models()[idx];
        let k = 2f64.powi(e);
        let b = field_at(&m.segments, p).unwrap();
        let bk = field_at(&m.segments.with_scaled_currents(k), p).unwrap();
        prop_assert_eq!(bk, b * k);
    }

    #[test]
    fn segment_splitting_is_additive(
        a in point(0.05), b in point(0.05), p in point(0.05), t in 0.05f64..0.95, i in -10.0f64..10.0
    ) {
        prop_assume!((b - a).norm() > 1e-3);
        let whole = Segment::new(a, b, i).unwrap();
        prop_assume!(whole.distance_to(p) > 1e-3);
        let m = a + (b - a) * t;
        let mut split = SegmentList::new();
        let g = split.add_group("split", false);
        split.push(g, Segment::new(a, m, i).unwrap());
        split.push(g, Segment::new(m, b, i).unwrap());
        let mut one = SegmentList::new();
        let g = one.add_group("whole", false);
        one.push(g, whole);
        let (b1, b2) = (field_at(&one, p).unwrap(), field_at(&split, p).unwrap());
        prop_assert!(rel(b1, b2) < 1e-9, "{b1:?} {b2:?}");
    }

    #[test]
    fn translation_covariance(idx in 0usize..5, p in point(0.005), o in point(0.1)) {
        let m = &models()[idx];
        let t = m.segments.translated(o);
        let (b0, b1) = (field_at(&m.segments, p).unwrap(), field_at(&t, p + o).unwrap());
        prop_assert!(rel(b0, b1) < 1e-6, "{b0:?} {b1:?}");
    }

    /// Reflection plus current reversal maps B(p) to M·B(p) at the image point.
    #[test]
    fn mirror_with_reversed_currents(idx in 0usize..5, p in point(0.007), axis in 0usize..3) {
        let m = &models()[idx];
        let mirrored = m.segments.mirrored(axis).with_scaled_currents(-1.0);
        let mut q = p.to_array();
        q[axis] = -q[axis];
        let b = field_at(&m.segments, p).unwrap();
        let bm = field_at(&mirrored, Vec3::from(q)).unwrap().to_array();
        let mut want = b.to_array();
        want[axis] = -want[axis];
        prop_assert!(rel(Vec3::from(bm), Vec3::from(want)) < 1e-12);
    }

    /// The two-piece trap is itself symmetric under z reflection.
    #[test]
    fn two_piece_mirror_invariance(p in point(0.007)) {
        let m = &models()[4];
        let mirrored = m.segments.mirrored(2).with_scaled_currents(-1.0);
        let (a, b) = (field_at(&m.segments, p).unwrap().norm(), field_at(&mirrored, p).unwrap().norm());
        prop_assert!((a - b).abs() <= 1e-9 * a.max(b));
    }

    /// Divergence-free everywhere, with a stencil resolved against the
    /// distance to the nearest conductor.
    #[test]
    fn divergence_free_at_any_point(idx in 0usize..5, p in point(0.03)) {
        let m = &models()[idx];
        let d = nearest_conductor(&m.segments, p);
        prop_assume!(d > 1e-4);
        let j = jacobian_at(&m.segments, p, d * 1e-3).unwrap();
        prop_assert!(j.trace().abs() < 1e-4 * j.frobenius(), "trace {} frob {}", j.trace(), j.frobenius());
    }

    /// Curl-free at least 2 mm from every conductor.
    #[test]
    fn curl_free_away_from_currents(idx in 0usize..5, p in point(0.03)) {
        let m = &models()[idx];
        let d = nearest_conductor(&m.segments, p);
        prop_assume!(d >= 2e-3);
        let j = jacobian_at(&m.segments, p, d * 1e-3).unwrap();
        prop_assert!(j.max_asymmetry() < 1e-4 * j.frobenius());
    }

    /// Default 0.1 mm stencil inside the trapping region.
    #[test]
    fn maxwell_default_stencil_near_trap(idx in 0usize..5, p in point(0.0017)) {
        let m = &models()[idx];
        let j = jacobian_at(&m.segments, m.center + p, DEFAULT_STENCIL).unwrap();
        prop_assert!(j.trace().abs() < 1e-4 * j.frobenius());
        prop_assert!(j.max_asymmetry() < 1e-4 * j.frobenius());
    }

    #[test]
    fn scaling_group_property(a in -6.0f64..6.0, b in -6.0f64..6.0) {
        let (k1, k2) = (a.exp(), b.exp());
        let (r1, r2, r12) = (scaling_report(k1).unwrap(), scaling_report(k2).unwrap(), scaling_report(k1 * k2).unwrap());
        for ((name, x1), ((_, x2), (_, x12))) in r1.rows().iter().zip(r2.rows().iter().zip(r12.rows().iter())) {
            prop_assert!((x1 * x2 - x12).abs() <= 4.0 * f64::EPSILON * x12, "{name}");
        }
    }

    #[test]
    fn scaling_group_property_exact_for_powers_of_four(a in -8i32..8, b in -8i32..8) {
        let (k1, k2) = (4f64.powi(a), 4f64.powi(b));
        let (r1, r2, r12) = (scaling_report(k1).unwrap(), scaling_report(k2).unwrap(), scaling_report(k1 * k2).unwrap());
        for ((_, x1), ((_, x2), (_, x12))) in r1.rows().iter().zip(r2.rows().iter().zip(r12.rows().iter())) {
            prop_assert_eq!(x1 * x2, *x12);
        }
    }

    #[test]
    fn linear_field_fit_matches_jacobian(
        g in prop::array::uniform3(-1.0f64..1.0), off in point(0.01), b0 in point(1e-3)
    ) {
        prop_assume!(g[0].abs() > 1e-3);
        let field = FnField(move |p: Vec3| {
            let d = p - off;
            b0 + Vec3::new(g[0] * d.x + 0.3 * d.y, g[1] * d.y - 0.2 * d.z, g[2] * d.z + 0.1 * d.x)
        });
        let j = jacobian_at(&field, off, DEFAULT_STENCIL).unwrap();
        let r = fit_gradients(&field, off, DEFAULT_WINDOW, DEFAULT_FIT_SAMPLES).unwrap();
        for i in 0..3 {
            let fit = r.g[i] / 100.0;
            prop_assert!((fit - j.0[i][i]).abs() <= 1e-9 * j.0[i][i].abs().max(1e-3), "{i}: {fit} vs {}", j.0[i][i]);
        }
    }

    #[test]
    fn power_totals_and_material_factor(idx in 0usize..5, k in 0.1f64..10.0) {
        let m = &models()[idx];
        let mut scaled = m.clone();
        for c in &mut scaled.conductors { c.current *= k; }
        let cu = power_report(&scaled, &Material::copper()).unwrap();
        let ti = power_report(&scaled, &Material::titanium_class()).unwrap();
        let sum: f64 = cu.conductors.iter().map(|c| c.power_w).sum();
        prop_assert_eq!(sum, cu.total_power_w);
        for (a, b) in cu.conductors.iter().zip(&ti.conductors) {
            prop_assert!((b.power_w - 10.0 * a.power_w).abs() <= 1e-14 * b.power_w);
        }
    }
}

#[test]
fn closed_groups_chain() {
    for m in models() {
        for (i, g) in m.segments.groups().iter().enumerate() {
            if g.closed {
                assert!(m.segments.max_chain_gap(i) < CHAIN_TOLERANCE, "{}", g.name);
            }
        }
    }
}

#[test]
fn zero_at_centre_for_quadrupole_presets() {
    for (v, m) in PRESETS.iter().zip(models()) {
        if *v == Variant::IoffePritchard {
            continue;
        }
        let b = field_at(&m.segments, m.center).unwrap().norm();
        let r = fit_gradients(m, m.center, DEFAULT_WINDOW, DEFAULT_FIT_SAMPLES).unwrap();
        let gz = r.g[2].abs() * 100.0;
        assert!(b / (gz * 1e-3) < 0.05, "{v}");
    }
}

#[test]
fn zero_search_is_translation_covariant() {
    let o = Vec3::new(0.013, -0.021, 0.007);
    for (v, m) in PRESETS.iter().zip(models()) {
        if *v == Variant::IoffePritchard {
            continue;
        }
        let z0 = find_field_zero(m, m.center, 2e-3).unwrap();
        let t = m.translated(o);
        let z1 = find_field_zero(&t, t.center, 2e-3).unwrap();
        assert!((z1 - (z0 + o)).norm() < 1e-9, "{v}: {z0:?} {z1:?}");
    }
}

#[test]
fn discretization_convergence() {
    for v in PRESETS {
        let spec = GeometrySpec::default_for(v).unwrap();
        let mut fine = spec.clone();
        fine.discretization.segments_per_turn *= 2;
        let (a, b) = (spec.build().unwrap(), fine.build().unwrap());
        let mut checked = 0;
        for i in 0..200 {
            let t = i as f64;
            let p = Vec3::new((t * 0.37).sin(), (t * 0.71).cos(), (t * 1.13).sin()) * 0.02;
            if nearest_conductor(&a.segments, p) < 2e-3 || nearest_conductor(&b.segments, p) < 2e-3 {
                continue;
            }
            let (ba, bb) = (field_at(&a.segments, p).unwrap(), field_at(&b.segments, p).unwrap());
            assert!(rel(ba, bb) < 5e-3, "{v} at {p:?}: {}", rel(ba, bb));
            checked += 1;
        }
        assert!(checked > 20, "{v}");
    }
}

#[test]
fn halving_fit_window_keeps_slopes() {
    for (v, m) in PRESETS.iter().zip(models()) {
        let a = fit_gradients(m, m.center, DEFAULT_WINDOW, DEFAULT_FIT_SAMPLES).unwrap();
        let b = fit_gradients(m, m.center, DEFAULT_WINDOW / 2.0, DEFAULT_FIT_SAMPLES).unwrap();
        let scale = a.g.iter().fold(0.0f64, |s, g| s.max(g.abs()));
        for i in 0..3 {
            assert!(
                (a.g[i] - b.g[i]).abs() < 0.02 * scale.max(a.g[i].abs()),
                "{v} axis {i}: {:?} {:?}",
                a.g,
                b.g
            );
        }
    }
}

/// Line fits carry curvature bias, so the gradient sum is checked relative
/// to the largest gradient and must shrink with the window.
#[test]
fn gradient_sum_vanishes_with_window() {
    for (v, m) in PRESETS.iter().zip(models()) {
        let a = fit_gradients(m, m.center, DEFAULT_WINDOW, DEFAULT_FIT_SAMPLES).unwrap();
        let b = fit_gradients(m, m.center, DEFAULT_WINDOW / 4.0, DEFAULT_FIT_SAMPLES).unwrap();
        let scale = a.g.iter().fold(0.0f64, |s, g| s.max(g.abs()));
        let (sa, sb) = (a.g.iter().sum::<f64>().abs(), b.g.iter().sum::<f64>().abs());
        assert!(sa < 0.01 * scale, "{v}: {sa}");
        assert!(sb <= sa + 1e-9 * scale, "{v}: {sb} > {sa}");
    }
}
