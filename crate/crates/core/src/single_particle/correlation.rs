use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::grid::{mollifier, MomentumGrid, SPVector};
use super::localization::Sign;
use crate::error::Result;
use crate::fit::{exponential_fit, power_law_fit, LinearFit};
use crate::quadrature::gauss_legendre;

pub const DECAY_FLOOR: f64 = 1e-13;

/// `⟨g|U(x⁰, x)g⟩ = Σ w |g(p)|² e^{i(ω x⁰ − p·x)}`.
pub fn correlation(g: &SPVector, x0: f64, x: &[f64]) -> Complex64 {
    let grid = &g.grid;
    let s: Complex64 = g
        .amps
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let px: f64 = grid.point(i).iter().zip(x).map(|(p, y)| p * y).sum();
            a.norm_sqr() * Complex64::from_polar(1.0, grid.omega(i) * x0 - px)
        })
        .sum();
    s * grid.cell_weight()
}

/// Correlations at distances `ds` along the first axis, at equal times.
pub fn correlation_along_axis(g: &SPVector, ds: &[f64]) -> Vec<f64> {
    let s = g.grid.dim();
    ds.iter()
        .map(|&d| {
            let mut x = vec![0.0; s];
            x[0] = d;
            correlation(g, 0.0, &x).norm()
        })
        .collect()
}

/// `ω^{−1/2} h̃_{r₀} e` with `e` the normalised `κ = 0` generator of `𝓛±_r`.
pub fn localized_probe(grid: &Arc<MomentumGrid>, r: f64, h_r0: &SPVector, sign: Sign) -> SPVector {
    let chi = SPVector::from_config(grid, 4, |x| Complex64::new(mollifier(x, r), 0.0));
    let e = chi.omega_pow(sign.omega_exponent());
    let e = e.scale_real(1.0 / e.norm());
    let amps = e.amps.iter().zip(&h_r0.amps).zip(grid.omegas()).map(|((a, h), w)| a * h.re / w.sqrt()).collect();
    SPVector { grid: grid.clone(), amps }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

/// Exponential fit of `|⟨g|U(x)g⟩|` over `x ∈ [lo, hi]`; slope is `−rate`.
pub fn exponential_decay_fit(g: &SPVector, lo: f64, hi: f64, samples: usize) -> Result<LinearFit> {
    let xs = linspace(lo, hi, samples);
    let ys = correlation_along_axis(g, &xs);
    exponential_fit(&xs, &ys, DECAY_FLOOR)
}

/// Three-dimensional radial transform `(2π)^{−3/2} ∫ e^{−ipx} f(|x|) d³x`
/// of a function supported in `[0, a]`.
pub fn radial_ft3<F: Fn(f64) -> f64>(f: F, a: f64, p: f64, order: usize) -> f64 {
    let (xs, ws) = gauss_legendre(order);
    let pref = 4.0 * PI * (2.0 * PI).powf(-1.5);
    let mut acc = 0.0;
    for (x, w) in xs.iter().zip(&ws) {
        let rho = 0.5 * a * (x + 1.0);
        let sinc = if p * rho < 1e-8 { 1.0 - (p * rho).powi(2) / 6.0 } else { (p * rho).sin() / (p * rho) };
        acc += w * rho * rho * f(rho) * sinc;
    }
    pref * 0.5 * a * acc
}

/// Equal-time correlation of the massless `κ = 0`, `+` probe in `s = 3`,
/// `g̃ = |p|^{−1} h̃_{r₀} FT(χ(O_r))`, by one-dimensional radial quadrature:
/// `C(x) = (4π/|x|) ∫₀^∞ h̃(p)² FT(χ)(p)² sin(p|x|)/p dp`.
pub fn radial_massless_correlation(r: f64, r0: f64, xs: &[f64]) -> Vec<f64> {
    let a1 = r0 / 2.0;
    let a2 = r0 / (1.0 + 5f64.sqrt());
    let bump = |rad: f64| move |rho: f64| mollifier(&[rho], rad);
    let g0a = radial_ft3(bump(a1), a1, 0.0, 64);
    let g0b = radial_ft3(bump(a2), a2, 0.0, 64);
    let p_max = 60.0 / r0.min(r).max(1e-3);
    let panels = 4000;
    let (gx, gw) = gauss_legendre(12);
    let h = p_max / panels as f64;
    let mut nodes = Vec::with_capacity(panels * gx.len());
    for k in 0..panels {
        let mid = (k as f64 + 0.5) * h;
        for (x, w) in gx.iter().zip(&gw) {
            let p = mid + 0.5 * h * x;
            let ha = (radial_ft3(bump(a1), a1, p, 64) / g0a).powi(2);
            let hb = (radial_ft3(bump(a2), a2, p, 64) / g0b).powi(2);
            let ht = 0.5 * (ha + hb);
            let chi = radial_ft3(bump(r), r, p, 64);
            nodes.push((p, 0.5 * h * w * ht * ht * chi * chi));
        }
    }
    xs.iter()
        .map(|&x| {
            let integral: f64 = nodes.iter().map(|(p, w)| w * (p * x).sin() / p).sum();
            4.0 * PI * integral / x
        })
        .collect()
}

/// Power-law fit of `|C(x)|` against `x`.
pub fn power_decay_fit(xs: &[f64], values: &[f64]) -> Result<LinearFit> {
    power_law_fit(xs, values, DECAY_FLOOR)
}

#[cfg(test)]
mod tests {
    use super::super::localization::default_h_r0;
    use super::*;

    #[test]
    fn correlation_at_origin_is_norm() {
        let g = MomentumGrid::new(2, 1.0, 3.0, 8).unwrap();
        let f = SPVector::from_fn(&g, |p, w| Complex64::new(p[0] / w, p[1]));
        let c = correlation(&f, 0.0, &[0.0, 0.0]);
        assert!((c.re - f.norm_sqr()).abs() < 1e-13 && c.im.abs() < 1e-13);
        let t = f.translate(0.4, &[1.0, -2.0]);
        assert!((f.inner(&t) - correlation(&f, 0.4, &[1.0, -2.0])).norm() < 1e-13);
    }

    #[test]
    fn radial_transform_of_gaussian_like_ball() {
        // indicator of the unit ball: FT = (2π)^{−3/2} 4π (sin p − p cos p)/p³
        let p = 1.7;
        let v = radial_ft3(|_| 1.0, 1.0, p, 40);
        let want = (2.0 * PI).powf(-1.5) * 4.0 * PI * (p.sin() - p * p.cos()) / p.powi(3);
        assert!((v - want).abs() < 1e-13);
    }

    #[test]
    fn massive_plus_probe_decays_exponentially() {
        let g = MomentumGrid::new(1, 1.0, 200.0, 4096).unwrap();
        let (h, _) = default_h_r0(&g, 1.0).unwrap();
        let probe = localized_probe(&g, 1.0, &h, Sign::Plus);
        let fit = exponential_decay_fit(&probe, 4.0, 20.0, 17).unwrap();
        assert!(-fit.slope >= 0.5, "rate {}", -fit.slope);
    }

    #[test]
    fn minus_probe_is_strictly_local() {
        let g = MomentumGrid::new(1, 1.0, 200.0, 4096).unwrap();
        let (h, _) = default_h_r0(&g, 1.0).unwrap();
        let probe = localized_probe(&g, 1.0, &h, Sign::Minus);
        let c0 = correlation(&probe, 0.0, &[0.0]).norm();
        for x in [4.5, 6.0, 10.0, 20.0] {
            assert!(correlation(&probe, 0.0, &[x]).norm() < 1e-9 * c0.max(1.0), "x={x}");
        }
    }
}
