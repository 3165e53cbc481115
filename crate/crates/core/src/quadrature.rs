//! One-dimensional quadrature rules: tanh-sinh, Gauss–Legendre, trapezoid.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct QuadResult<T> {
    pub value: T,
    /// |I_k − I_{k−1}| at the final level.
    pub error: f64,
    pub levels: usize,
    pub converged: bool,
}

/// Double-exponential rule on `[a, b]` with step halving until two successive
/// levels agree to `tol` (absolute, scaled by `max(1, |I|)`).
///
/// Nodes are placed through `u(t) = 1/(1+e^{−π sinh t})`, which keeps both
/// `x − a` and `b − x` accurate near the ends; nodes that round onto an endpoint
/// are skipped, so integrands may be singular there.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, tol: f64, max_level: usize) -> QuadResult<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let len = b - a;
    if len == 0.0 {
        return QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0, levels: 0, converged: true };
    }
    let t_max = 6.5;
    let node = |t: f64| -> Option<(f64, f64)> {
        let st = PI * t.sinh();
        let (u, v) = if st >= 0.0 {
            let e = (-st).exp();
            (1.0 / (1.0 + e), e / (1.0 + e))
        } else {
            let e = st.exp();
            (e / (1.0 + e), 1.0 / (1.0 + e))
        };
        let w = len * PI * t.cosh() * u * v;
        let x = if u <= 0.5 { a + len * u } else { b - len * v };
        if !(x > a && x < b) || w == 0.0 {
            return None;
        }
        Some((x, w))
    };
    let mut h = 1.0;
    let mut sum = Complex64::new(0.0, 0.0);
    let n0 = (t_max / h) as i64;
    for k in -n0..=n0 {
        if let Some((x, w)) = node(k as f64 * h) {
            sum += f(x) * w;
        }
    }
    let mut prev = sum * h;
    let mut err = f64::INFINITY;
    for level in 1..=max_level {
        h *= 0.5;
        let n = (t_max / h) as i64;
        let mut k = -n + if n % 2 == 0 { 1 } else { 0 };
        while k <= n {
            if let Some((x, w)) = node(k as f64 * h) {
                sum += f(x) * w;
            }
            k += 2;
        }
        let cur = sum * h;
        err = (cur - prev).norm();
        if level >= 3 && err <= tol * cur.norm().max(1.0) {
            return QuadResult { value: cur, error: err, levels: level, converged: true };
        }
        prev = cur;
    }
    QuadResult { value: prev, error: err, levels: max_level, converged: false }
}

/// Real-valued convenience wrapper around [`tanh_sinh`].
pub fn tanh_sinh_real<F>(f: F, a: f64, b: f64, tol: f64, max_level: usize) -> QuadResult<f64>
where
    F: Fn(f64) -> f64,
{
    let r = tanh_sinh(|x| Complex64::new(f(x), 0.0), a, b, tol, max_level);
    QuadResult { value: r.value.re, error: r.error, levels: r.levels, converged: r.converged }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        xs[i] = -z;
        xs[n - 1 - i] = z;
        ws[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        ws[n - 1 - i] = ws[i];
    }
    (xs, ws)
}

/// Composite Gauss–Legendre on `[a, b]` with `panels` panels of `order` nodes.
pub fn gauss_legendre_composite<F>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let (xs, ws) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (x, w) in xs.iter().zip(&ws) {
            total += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * total
}

/// Uniform midpoint nodes on `[a, b]`.
pub fn midpoints(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let h = (b - a) / n as f64;
    (0..n).map(move |i| a + (i as f64 + 0.5) * h)
}

pub fn require_converged<T: Copy>(r: QuadResult<T>, what: &str) -> Result<T> {
    if r.converged {
        Ok(r.value)
    } else {
        Err(Error::Numeric(format!("{what}: quadrature stalled at level {} (error {:.2e})", r.levels, r.error)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_sinh_polynomial_and_log_endpoint() {
        let r = tanh_sinh_real(|x| x * x, 0.0, 1.0, 1e-14, 12);
        assert!(r.converged);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-14);
        // ∫₀¹ ln x dx = −1
        let r = tanh_sinh_real(|x| x.ln(), 0.0, 1.0, 1e-13, 12);
        assert!((r.value + 1.0).abs() < 1e-12, "{}", r.value);
        // ∫₀¹ x^{−1/2} dx = 2
        let r = tanh_sinh_real(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-12, 12);
        assert!((r.value - 2.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn tanh_sinh_oscillating_log_phase() {
        // ∫₀¹ x^{ia} dx = 1/(1+ia)
        let a = 1.7;
        let r = tanh_sinh(|x| Complex64::new(0.0, a * x.ln()).exp(), 0.0, 1.0, 1e-13, 14);
        let want = Complex64::new(1.0, 0.0) / Complex64::new(1.0, a);
        assert!((r.value - want).norm() < 1e-11, "{:?}", r.value);
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let (xs, ws) = gauss_legendre(8);
        let s: f64 = ws.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m14: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(14)).sum();
        assert!((m14 - 2.0 / 15.0).abs() < 1e-14);
        let v = gauss_legendre_composite(|x| x.sin(), 0.0, PI, 4, 10);
        assert!((v - 2.0).abs() < 1e-13);
    }
}
