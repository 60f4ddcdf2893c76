//! Field-zero location, gradient extraction and MOT suitability checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSource;
use crate::units::{millimetres, millimetres_vec3, tesla_per_m_to_gauss_per_cm, tesla_to_gauss};
use crate::Vec3;

/// Default central-difference step for Jacobians (m).
pub const DEFAULT_STENCIL: f64 = 1e-4;
/// Default half-width of the gradient fit window (m).
pub const DEFAULT_WINDOW: f64 = 2e-3;
pub const DEFAULT_FIT_SAMPLES: usize = 41;
/// Coarse grid points per axis in the zero search.
pub const ZERO_GRID: usize = 11;

/// `J[i][j] = ∂B_i/∂x_j` in T/m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jacobian(pub [[f64; 3]; 3]);

impl Jacobian {
    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest `|J_ij - J_ji|`, which vanishes where the field is curl-free.
    pub fn max_asymmetry(&self) -> f64 {
        let j = &self.0;
        (j[0][1] - j[1][0])
            .abs()
            .max((j[0][2] - j[2][0]).abs())
            .max((j[1][2] - j[2][1]).abs())
    }

    fn apply(&self, v: Vec3) -> Vec3 {
        let j = &self.0;
        Vec3::new(
            j[0][0] * v.x + j[0][1] * v.y + j[0][2] * v.z,
            j[1][0] * v.x + j[1][1] * v.y + j[1][2] * v.z,
            j[2][0] * v.x + j[2][1] * v.y + j[2][2] * v.z,
        )
    }

    fn transpose(&self) -> Self {
        let j = &self.0;
        Jacobian([
            [j[0][0], j[1][0], j[2][0]],
            [j[0][1], j[1][1], j[2][1]],
            [j[0][2], j[1][2], j[2][2]],
        ])
    }
}

/// Central-difference Jacobian with step `h`.
pub fn jacobian_at<S: FieldSource + ?Sized>(src: &S, p: Vec3, h: f64) -> Result<Jacobian> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid_input("stencil step must be positive"));
    }
    let mut j = [[0.0; 3]; 3];
    for col in 0..3 {
        let e = Vec3::axis(col) * h;
        let d = (src.field_at(p + e)? - src.field_at(p - e)?) / (2.0 * h);
        j[0][col] = d.x;
        j[1][col] = d.y;
        j[2][col] = d.z;
    }
    Ok(Jacobian(j))
}

/// Solves the symmetric positive semi-definite system `(A + λI) x = b`
/// by Gaussian elimination with partial pivoting.
fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for c in 0..3 {
        let piv = (c..3).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))?;
        if m[piv][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, piv);
        for r in 0..3 {
            if r != c {
                let f = m[r][c] / m[c][c];
                for k in c..4 {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    let x = [m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]];
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Locates the minimum of `|B|` in the cube `search_center ± search_radius`.
///
/// An `11³` grid scan picks the start (lowest `|B|`, ties to the smallest
/// position in `(x, y, z)` order); damped Gauss-Newton steps on `B = 0`
/// then refine it, accepting only steps that lower `|B|`.
pub fn find_field_zero<S: FieldSource + ?Sized>(src: &S, search_center: Vec3, search_radius: f64) -> Result<Vec3> {
    if !(search_radius > 0.0 && search_radius.is_finite()) {
        return Err(Error::invalid_input("search radius must be positive"));
    }
    let n = ZERO_GRID;
    let step = 2.0 * search_radius / (n - 1) as f64;
    let coord = |i: usize| -search_radius + step * i as f64;
    let idx: Vec<[usize; 3]> = (0..n)
        .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| [i, j, k])))
        .collect();
    let mags: Vec<f64> = idx
        .par_iter()
        .map(|&[i, j, k]| {
            let p = search_center + Vec3::new(coord(i), coord(j), coord(k));
            match src.field_at(p) {
                Ok(b) => Ok(b.norm_sq()),
                Err(Error::SingularPoint { .. }) => Ok(f64::INFINITY),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    // idx is in lexicographic position order, so the first strict minimum wins ties
    let mut best = 0;
    for (m, &v) in mags.iter().enumerate() {
        if v < mags[best] {
            best = m;
        }
    }
    if !mags[best].is_finite() {
        return Err(Error::EmptySample);
    }
    let [bi, bj, bk] = idx[best];
    let start = search_center + Vec3::new(coord(bi), coord(bj), coord(bk));
    if [bi, bj, bk].iter().any(|&c| c == 0 || c == n - 1) {
        return Err(Error::ZeroNotBracketed(start));
    }
    refine_zero(src, start, step)
}

fn refine_zero<S: FieldSource + ?Sized>(src: &S, start: Vec3, cell: f64) -> Result<Vec3> {
    let mut x = start;
    let mut b = src.field_at(x)?;
    let h = (cell * 1e-3).min(DEFAULT_STENCIL);
    let mut lambda = 0.0;
    for _ in 0..100 {
        if b.norm_sq() == 0.0 {
            break;
        }
        let j = jacobian_at(src, x, h)?;
        let jt = j.transpose();
        let g = jt.apply(b);
        let mut jtj = [[0.0; 3]; 3];
        for (r, row) in jtj.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| j.0[k][r] * j.0[k][c]).sum();
            }
        }
        let scale = (jtj[0][0] + jtj[1][1] + jtj[2][2]) / 3.0;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj;
            for (d, row) in a.iter_mut().enumerate() {
                row[d] += lambda * scale;
            }
            let Some(dx) = solve3(a, [-g.x, -g.y, -g.z]) else {
                lambda = if lambda == 0.0 { 1e-6 } else { lambda * 10.0 };
                continue;
            };
            let dx = Vec3::from(dx);
            if dx.norm() > cell {
                lambda = if lambda == 0.0 { 1e-6 } else { lambda * 10.0 };
                continue;
            }
            let trial = x + dx;
            let bt = match src.field_at(trial) {
                Ok(bt) => bt,
                Err(Error::SingularPoint { .. }) => {
                    lambda = if lambda == 0.0 { 1e-6 } else { lambda * 10.0 };
                    continue;
                }
                Err(e) => return Err(e),
            };
            if bt.norm_sq() < b.norm_sq() {
                let moved = dx.norm();
                x = trial;
                b = bt;
                lambda *= 0.1;
                improved = moved > 1e-15;
                break;
            }
            lambda = if lambda == 0.0 { 1e-6 } else { lambda * 10.0 };
        }
        if !improved {
            break;
        }
    }
    Ok(x)
}

/// Fitted linear gradients around a field zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientReport {
    #[serde(rename = "zero_mm", with = "millimetres_vec3")]
    pub zero_position: Vec3,
    /// `(g_x, g_y, g_z)` in G/cm: slope of `B_i` along axis `i`.
    #[serde(rename = "g_Gcm")]
    pub g: [f64; 3],
    #[serde(rename = "sigma_Gcm")]
    pub sigma_g: [f64; 3],
    /// `g / g_x`.
    pub ratio: [f64; 3],
    /// Half-width of the fit interval.
    #[serde(rename = "window_mm", with = "millimetres")]
    pub linear_window: f64,
    /// RMS fit residual over all three axes (G).
    #[serde(rename = "residual_G")]
    pub residual_rms: f64,
}

impl GradientReport {
    pub fn min_abs_gradient(&self) -> f64 {
        self.g.iter().map(|g| g.abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn divergence(&self) -> f64 {
        self.g.iter().sum()
    }
}

struct LineFit {
    slope: f64,
    sigma: f64,
    ssr: f64,
}

fn fit_line(t: &[f64], y: &[f64]) -> Result<LineFit> {
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::DegenerateFit("every sample has the same value".into()));
    }
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxx: f64 = t.iter().map(|v| (v - tm).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("sample positions coincide".into()));
    }
    let sxy: f64 = t.iter().zip(y).map(|(a, b)| (a - tm) * (b - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * tm;
    let ssr: f64 = t.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let sigma = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(LineFit { slope, sigma, ssr })
}

/// Least-squares slope of `B_i` against displacement along axis `i`,
/// over `zero ± window` with `n` samples per axis.
pub fn fit_gradients<S: FieldSource + ?Sized>(src: &S, zero: Vec3, window: f64, n: usize) -> Result<GradientReport> {
    if !(window > 0.0 && window.is_finite()) {
        return Err(Error::invalid_input("fit window must be positive"));
    }
    if n < 5 {
        return Err(Error::invalid_input("gradient fit needs at least 5 samples"));
    }
    let t: Vec<f64> = (0..n)
        .map(|k| -window + 2.0 * window * k as f64 / (n - 1) as f64)
        .collect();
    let mut g = [0.0; 3];
    let mut sigma = [0.0; 3];
    let mut ssr = 0.0;
    for axis in 0..3 {
        let e = Vec3::axis(axis);
        let y: Vec<f64> = t
            .par_iter()
            .map(|&d| src.field_at(zero + e * d).map(|b| b[axis]))
            .collect::<Result<_>>()?;
        let fit = fit_line(&t, &y)?;
        g[axis] = tesla_per_m_to_gauss_per_cm(fit.slope);
        sigma[axis] = tesla_per_m_to_gauss_per_cm(fit.sigma);
        ssr += fit.ssr;
    }
    if g[0] == 0.0 {
        return Err(Error::DegenerateFit("g_x is zero, ratio undefined".into()));
    }
    Ok(GradientReport {
        zero_position: zero,
        g,
        sigma_g: sigma,
        ratio: [1.0, g[1] / g[0], g[2] / g[0]],
        linear_window: window,
        residual_rms: tesla_to_gauss((ssr / (3 * n) as f64).sqrt()),
    })
}

/// Acceptance bands for [`mot_suitability`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuitabilityTargets {
    /// Allowed range for the weakest axis gradient (G/cm).
    pub gradient_range_gcm: [f64; 2],
    pub target_ratio: [f64; 3],
    /// Relative tolerance on each ratio entry.
    pub ratio_tolerance: f64,
    /// Upper bound on residual / (min |g| · window).
    pub max_nonlinearity: f64,
}

impl Default for SuitabilityTargets {
    fn default() -> Self {
        Self {
            gradient_range_gcm: [5.0, 25.0],
            target_ratio: [1.0, 1.0, -2.0],
            ratio_tolerance: 0.25,
            max_nonlinearity: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suitability {
    pub gradient_in_range: bool,
    pub ratio_ok: bool,
    pub linear: bool,
    pub passed: bool,
}

pub fn mot_suitability(report: &GradientReport, targets: &SuitabilityTargets) -> Suitability {
    let g_min = report.min_abs_gradient();
    let [lo, hi] = targets.gradient_range_gcm;
    let gradient_in_range = g_min >= lo && g_min <= hi;
    let ratio_ok = report
        .ratio
        .iter()
        .zip(&targets.target_ratio)
        .all(|(r, t)| (r - t).abs() <= targets.ratio_tolerance * t.abs());
    let window_cm = report.linear_window * 100.0;
    let linear = report.residual_rms / (g_min * window_cm) < targets.max_nonlinearity;
    Suitability {
        gradient_in_range,
        ratio_ok,
        linear,
        passed: gradient_in_range && ratio_ok && linear,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::geometry::{make_anti_helmholtz, AntiHelmholtzParams};

    fn report(g: [f64; 3]) -> GradientReport {
        GradientReport {
            zero_position: Vec3::ZERO,
            g,
            sigma_g: [0.0; 3],
            ratio: [1.0, g[1] / g[0], g[2] / g[0]],
            linear_window: DEFAULT_WINDOW,
            residual_rms: 0.0,
        }
    }

    #[test]
    fn suitability_examples() {
        let t = SuitabilityTargets::default();
        assert!(mot_suitability(&report([15.0, 15.0, -30.0]), &t).passed);
        let cage = mot_suitability(&report([15.1, 6.5, -22.1]), &t);
        assert!(!cage.ratio_ok && !cage.passed);
        assert!(mot_suitability(&report([8.98, 9.20, -17.6]), &t).passed);
        assert!(!mot_suitability(&report([2.0, 2.0, -4.0]), &t).gradient_in_range);
    }

    #[test]
    fn linear_field_fit_is_exact() {
        let (gx, gy) = (0.15, 0.12);
        let f = FnField(move |p: Vec3| Vec3::new(gx * p.x, gy * p.y, -(gx + gy) * p.z));
        let r = fit_gradients(&f, Vec3::ZERO, DEFAULT_WINDOW, DEFAULT_FIT_SAMPLES).unwrap();
        for (got, want) in r.g.iter().zip([15.0, 12.0, -27.0]) {
            assert!((got - want).abs() <= 1e-10 * want.abs());
        }
        assert!(r.residual_rms < 1e-12);
        assert!(r.sigma_g.iter().all(|s| *s >= 0.0 && *s < 1e-9));
    }

    #[test]
    fn constant_field_is_degenerate() {
        let f = FnField(|_| Vec3::new(1e-4, 0.0, 0.0));
        assert!(matches!(
            fit_gradients(&f, Vec3::ZERO, 1e-3, 11),
            Err(Error::DegenerateFit(_))
        ));
        assert!(fit_gradients(&f, Vec3::ZERO, 1e-3, 4).is_err());
    }

    #[test]
    fn jacobian_of_linear_field() {
        let f = FnField(|p: Vec3| Vec3::new(p.x + 2.0 * p.y, 2.0 * p.x - 3.0 * p.y, 2.0 * p.z));
        let j = jacobian_at(&f, Vec3::new(0.1, 0.2, 0.3), 1e-4).unwrap();
        assert!(j.trace().abs() < 1e-9);
        assert!(j.max_asymmetry() < 1e-9);
        assert!((j.0[0][1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn zero_of_shifted_quadrupole() {
        let c = Vec3::new(0.0004, -0.0011, 0.0007);
        let f = FnField(move |p: Vec3| {
            let d = p - c;
            Vec3::new(0.1 * d.x + 0.01 * d.y, 0.01 * d.x + 0.12 * d.y, -0.22 * d.z)
        });
        let z = find_field_zero(&f, Vec3::ZERO, 0.005).unwrap();
        assert!((z - c).norm() < 1e-9, "{z:?}");
    }

    #[test]
    fn boundary_minimum_is_not_bracketed() {
        let f = FnField(|p: Vec3| p - Vec3::new(0.02, 0.0, 0.0));
        assert!(matches!(
            find_field_zero(&f, Vec3::ZERO, 0.005),
            Err(Error::ZeroNotBracketed(_))
        ));
    }

    #[test]
    fn anti_helmholtz_zero_and_ratio() {
        let m = make_anti_helmholtz(&AntiHelmholtzParams::default(), 360).unwrap();
        let z = find_field_zero(&m, Vec3::new(0.0003, -0.0002, 0.0001), 0.004).unwrap();
        assert!(z.norm() < 1e-6);
        let r = fit_gradients(&m, z, DEFAULT_WINDOW, DEFAULT_FIT_SAMPLES).unwrap();
        assert!((r.ratio[1] - 1.0).abs() < 0.005);
        assert!((r.ratio[2] + 2.0).abs() < 0.01);
    }

    #[test]
    fn report_json_keys() {
        let v = serde_json::to_value(report([1.0, 1.0, -2.0])).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        for k in ["zero_mm", "g_Gcm", "sigma_Gcm", "ratio", "window_mm", "residual_G"] {
            assert!(keys.contains(&k), "{keys:?}");
        }
        assert_eq!(v["window_mm"], 2.0);
    }
}
