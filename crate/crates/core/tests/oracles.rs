//! Independent analytic and brute-force oracles.

use std::f64::consts::PI;

use motfield::analysis::{find_field_zero, fit_gradients, DEFAULT_FIT_SAMPLES, DEFAULT_WINDOW};
use motfield::field::{field_at, sample_line, sample_plane, segment_field};
use motfield::geometry::{make_anti_helmholtz, make_loop, make_two_piece, AntiHelmholtzParams, TwoPieceParams};
use motfield::units::MU0;
use motfield::{objective_value, path_length, GeometrySpec, ObjectiveSpec, Segment, Variant, Vec3};

#[test]
fn circular_loop_centre_field() {
    let (r, i) = (0.025, 1.0);
    let l = make_loop(Vec3::ZERO, r, Vec3::Z, i, 1000).unwrap();
    let b = field_at(&l, Vec3::ZERO).unwrap();
    let exact = MU0 * i / (2.0 * r);
    assert!((b.z - exact).abs() / exact < 1e-3);
    assert!(b.x.abs() < 1e-18 && b.y.abs() < 1e-18);
}

#[test]
fn circular_loop_on_axis_field() {
    let (r, z) = (0.025, 0.013);
    let l = make_loop(Vec3::ZERO, r, Vec3::Z, 2.0, 2000).unwrap();
    let b = field_at(&l, Vec3::new(0.0, 0.0, z)).unwrap();
    let exact = MU0 * 2.0 * r * r / (2.0 * (r * r + z * z).powf(1.5));
    assert!((b.z - exact).abs() / exact < 1e-5);
}

#[test]
fn infinite_wire_limit() {
    let s = Segment::new(Vec3::new(0.0, 0.0, -1000.0), Vec3::new(0.0, 0.0, 1000.0), 1.0).unwrap();
    for d in [0.001, 0.01, 0.05] {
        let b = segment_field(&s, Vec3::new(0.0, d, 0.0)).unwrap();
        let exact = MU0 / (2.0 * PI * d);
        assert!((b.norm() - exact).abs() / exact < 1e-6);
    }
}

#[test]
fn finite_segment_matches_angle_formula() {
    // B = μ0 I / (4π d) (sin θ2 − sin θ1)
    let s = Segment::new(Vec3::new(0.0, 0.0, -0.02), Vec3::new(0.0, 0.0, 0.05), 3.0).unwrap();
    let d = 0.007;
    let p = Vec3::new(d, 0.0, 0.011);
    let (z1, z2) = (-0.02 - p.z, 0.05 - p.z);
    let sin = |z: f64| z / (z * z + d * d).sqrt();
    let exact = MU0 * 3.0 / (4.0 * PI * d) * (sin(z2) - sin(z1));
    let b = segment_field(&s, p).unwrap();
    assert!((b.y - exact).abs() / exact < 1e-13);
}

#[test]
fn polygon_perimeter() {
    let (r, n) = (0.025, 1000);
    let l = make_loop(Vec3::ZERO, r, Vec3::Z, 1.0, n).unwrap();
    let len = path_length(&l, 0).unwrap();
    let exact = 2.0 * n as f64 * r * (PI / n as f64).sin();
    assert!((len - exact).abs() / exact < 1e-12);
    assert!((len - 2.0 * PI * r).abs() / (2.0 * PI * r) < 1e-5);
}

#[test]
fn anti_helmholtz_axial_gradient() {
    let p = AntiHelmholtzParams::default();
    let m = make_anti_helmholtz(&p, 3600).unwrap();
    let (r, d) = (p.radius, p.separation / 2.0);
    // two loops of opposite current: dBz/dz = 2 · 3 μ0 I r² d / (2 (r²+d²)^{5/2}), negative here
    let exact = -2.0 * 3.0 * MU0 * p.current * r * r * d / (2.0 * (r * r + d * d).powf(2.5));
    let h = 1e-5;
    let bz = |z: f64| field_at(&m.segments, Vec3::new(0.0, 0.0, z)).unwrap().z;
    let numeric = (bz(h) - bz(-h)) / (2.0 * h);
    assert!((numeric - exact).abs() / exact.abs() < 1e-4, "{numeric} vs {exact}");
    let fit = fit_gradients(&m, Vec3::ZERO, DEFAULT_WINDOW, DEFAULT_FIT_SAMPLES).unwrap();
    assert!((fit.g[2] / 100.0 - exact).abs() / exact.abs() < 2e-3);
}

/// Dense-scan oracle for the zero search.
#[test]
fn two_piece_zero_matches_dense_scan() {
    let m = make_two_piece(&TwoPieceParams::default(), 360, 3).unwrap();
    let z = find_field_zero(&m, Vec3::ZERO, 0.002).unwrap();
    let n = 41;
    let half = 0.002;
    let mut best = (f64::INFINITY, Vec3::ZERO);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let c = |t: usize| -half + 2.0 * half * t as f64 / (n - 1) as f64;
                let p = Vec3::new(c(i), c(j), c(k));
                let b = field_at(&m.segments, p).unwrap().norm();
                if b < best.0 {
                    best = (b, p);
                }
            }
        }
    }
    assert!(z.norm() < 5e-4);
    assert!((z - best.1).norm() <= 0.1e-3 * 3f64.sqrt() / 2.0 + 1e-12);
    assert!(field_at(&m.segments, z).unwrap().norm() <= best.0);
}

#[test]
fn two_piece_line_scan_grows_away_from_centre() {
    let m = make_two_piece(&TwoPieceParams::default(), 360, 3).unwrap();
    let s = sample_line(&m, Vec3::ZERO, Vec3::X, 0.005, 101).unwrap();
    let mag: Vec<f64> = s.iter().map(|s| s.magnitude().unwrap()).collect();
    for i in 50..100 {
        assert!(mag[i + 1] > mag[i], "not increasing at {i}");
        assert!(mag[100 - i - 1] > mag[100 - i], "not increasing at -{i}");
    }
}

#[test]
fn two_piece_plane_minimum_at_centre() {
    let m = make_two_piece(&TwoPieceParams::default(), 360, 3).unwrap();
    let g = sample_plane(&m, Vec3::ZERO, Vec3::X, Vec3::Y, (0.005, 0.005), 21, 21).unwrap();
    let centre = g.get(10, 10).magnitude().unwrap();
    for s in &g.samples {
        assert!(s.magnitude().unwrap() >= centre);
    }
}

#[test]
fn objective_ordering_matches_grid() {
    let base = GeometrySpec::default_for(Variant::AntiHelmholtz).unwrap();
    let obj = ObjectiveSpec {
        weights: motfield::optimize::Weights {
            magnitude: 1.0,
            ratio: 0.0,
            power: 0.0,
        },
        samples: 11,
        ..Default::default()
    };
    let score = |sep_mm: f64| {
        let mut s = base.clone();
        s.set("separation", sep_mm * 1e-3).unwrap();
        objective_value(&s, &obj).unwrap()
    };
    let grid: Vec<(f64, f64)> = (0..50).map(|i| 20.0 + 2.0 * i as f64).map(|s| (s, score(s))).collect();
    let best = grid.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert!((best.0 - 50.0).abs() <= 2.0);
    for (a, b) in [(30.0, 44.0), (60.0, 90.0), (48.0, 70.0)] {
        let by_grid = grid.iter().find(|g| g.0 == a).unwrap().1 < grid.iter().find(|g| g.0 == b).unwrap().1;
        assert_eq!(score(a) < score(b), by_grid);
        // closer to the analytic optimum sep = r scores better
        assert_eq!(by_grid, (a - 50.0).abs() < (b - 50.0).abs());
    }
}
