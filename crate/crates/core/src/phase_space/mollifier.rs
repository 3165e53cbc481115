use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{require_converged, tanh_sinh};

/// `γ = 2 arctan e^{−πδ/(2β)}`.
pub fn mollifier_gamma(beta: f64, delta: f64) -> f64 {
    2.0 * (-PI * delta / (2.0 * beta)).exp().atan()
}

/// `g(θ) = (β/π) ln|cot((θ+γ)/2) cot((θ−γ)/2)|`.
pub fn mollifier_g(theta: f64, beta: f64, gamma: f64) -> f64 {
    let c = |x: f64| 1.0 / (x / 2.0).tan();
    beta / PI * (c(theta + gamma) * c(theta - gamma)).abs().ln()
}

/// How the θ-integrals are evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThetaQuadrature {
    /// Tanh-sinh until two levels agree to the tolerance; failure is an error.
    Adaptive { tol: f64, max_level: usize },
    /// Tanh-sinh stopped at a fixed level.
    Level(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MollifierReport {
    pub gamma: f64,
    /// `φ(AB)`.
    pub lhs: Complex64,
    /// `φ([A,B̊_β]₊) + φ(Ae^{−βH}B_βe^{βH}) + φ(e^{βH}B_βe^{−βH}A)`.
    pub rhs: Complex64,
    pub discrepancy: f64,
}

/// A tensor-split instance: `A = A₁⊗1`, `B = 1⊗B₂`, `H = H₁⊗1 + 1⊗H₂`
/// (diagonal), `φ = Tr(e^{−βH}ρe^{−βH} ·)`.
#[derive(Clone, Debug)]
pub struct TensorInstance {
    pub a1: DMatrix<Complex64>,
    pub h1: Vec<f64>,
    pub b2: DMatrix<Complex64>,
    pub h2: Vec<f64>,
    pub rho: DMatrix<Complex64>,
}

impl TensorInstance {
    fn validate(&self) -> Result<(usize, usize)> {
        let (n1, n2) = (self.h1.len(), self.h2.len());
        if self.a1.shape() != (n1, n1) || self.b2.shape() != (n2, n2) || self.rho.shape() != (n1 * n2, n1 * n2) {
            return Err(Error::Param("tensor instance shapes do not match the energies".into()));
        }
        Ok((n1, n2))
    }
}

fn theta_integral<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, q: ThetaQuadrature) -> Result<Complex64> {
    match q {
        ThetaQuadrature::Adaptive { tol, max_level } => require_converged(tanh_sinh(f, a, b, tol, max_level), "θ-integral"),
        ThetaQuadrature::Level(l) => Ok(tanh_sinh(f, a, b, 0.0, l).value),
    }
}

/// Discrepancy of `φ(AB) = φ([A,B̊_β]₊) + φ(Ae^{−βH}B_βe^{βH}) + φ(e^{βH}B_βe^{−βH}A)`
/// with `B̊_β = (2π)^{−1}(∫_0^γ + ∫_{π−γ}^π) B(g(θ))dθ`,
/// `B_β = (2π)^{−1}∫_γ^{π−γ} B(g(θ))dθ`, `B(t) = e^{itH}Be^{−itH}`.
pub fn mollifier_identity_check(inst: &TensorInstance, beta: f64, delta: f64, q: ThetaQuadrature) -> Result<MollifierReport> {
    if !(beta > 0.0 && delta > 0.0) {
        return Err(Error::Param(format!("need β > 0 and δ > 0, got {beta}, {delta}")));
    }
    let (n1, n2) = inst.validate()?;
    let gamma = mollifier_gamma(beta, delta);
    let mut ring = DMatrix::<Complex64>::zeros(n2, n2);
    let mut strip = DMatrix::<Complex64>::zeros(n2, n2);
    let mut cache: Vec<(f64, Complex64, Complex64)> = Vec::new();
    for i in 0..n2 {
        for j in 0..n2 {
            let d = inst.h2[i] - inst.h2[j];
            let (r, s) = match cache.iter().find(|(x, _, _)| *x == d) {
                Some(&(_, r, s)) => (r, s),
                None => {
                    let f = |th: f64| Complex64::from_polar(1.0, mollifier_g(th, beta, gamma) * d);
                    let r = theta_integral(f, 0.0, gamma, q)? + theta_integral(f, PI - gamma, PI, q)?;
                    let s = theta_integral(f, gamma, PI - gamma, q)?;
                    let r = r / (2.0 * PI);
                    let s = s / (2.0 * PI);
                    cache.push((d, r, s));
                    (r, s)
                }
            };
            ring[(i, j)] = inst.b2[(i, j)] * r;
            strip[(i, j)] = inst.b2[(i, j)] * s;
        }
    }
    let id1 = DMatrix::<Complex64>::identity(n1, n1);
    let id2 = DMatrix::<Complex64>::identity(n2, n2);
    let a = inst.a1.kronecker(&id2);
    let b = id1.kronecker(&inst.b2);
    let ring = id1.kronecker(&ring);
    let strip = id1.kronecker(&strip);
    let n = n1 * n2;
    let energies: Vec<f64> = (0..n).map(|k| inst.h1[k / n2] + inst.h2[k % n2]).collect();
    let diag = |c: f64| DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, energies.iter().map(|e| Complex64::new((c * e).exp(), 0.0))));
    let (dm, dp) = (diag(-beta), diag(beta));
    let sigma = &dm * &inst.rho * &dm;
    let phi = |x: &DMatrix<Complex64>| (&sigma * x).trace();
    let lhs = phi(&(&a * &b));
    let rhs = phi(&(&a * &ring + &ring * &a)) + phi(&(&a * &dm * &strip * &dp)) + phi(&(&dp * &strip * &dm * &a));
    Ok(MollifierReport { gamma, lhs, rhs, discrepancy: (lhs - rhs).norm() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        DMatrix::from_fn(n, n, |_, _| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            Complex64::new(a, b)
        })
    }

    fn instance(n1: usize, n2: usize, b2: DMatrix<Complex64>) -> TensorInstance {
        TensorInstance {
            a1: mat(n1, 1),
            h1: (0..n1).map(|i| 0.3 * i as f64).collect(),
            b2,
            h2: (0..n2).map(|i| 0.45 * i as f64 + 0.1).collect(),
            rho: mat(n1 * n2, 3),
        }
    }

    #[test]
    fn gamma_decreases_to_zero() {
        let mut last = PI;
        for d in [0.1, 0.5, 1.0, 2.0, 8.0, 40.0] {
            let g = mollifier_gamma(1.0, d);
            assert!(g < last);
            last = g;
        }
        assert!(last < 1e-20);
    }

    #[test]
    fn g_reaches_delta_at_zero() {
        let (b, d) = (1.3, 0.7);
        let gm = mollifier_gamma(b, d);
        assert!((mollifier_g(0.0, b, gm) - d).abs() < 1e-12);
        assert!((mollifier_g(PI, b, gm) + d).abs() < 1e-12);
    }

    #[test]
    fn identity_for_unit_b() {
        let inst = instance(3, 2, DMatrix::identity(2, 2));
        let r = mollifier_identity_check(&inst, 1.0, 2.0, ThetaQuadrature::Adaptive { tol: 1e-13, max_level: 12 }).unwrap();
        assert!(r.discrepancy < 1e-9, "{}", r.discrepancy);
    }

    #[test]
    fn identity_for_random_instance() {
        let inst = instance(4, 4, mat(4, 2));
        let r = mollifier_identity_check(&inst, 1.0, 2.0, ThetaQuadrature::Adaptive { tol: 1e-13, max_level: 12 }).unwrap();
        assert!(r.discrepancy < 1e-8 * (1.0 + r.lhs.norm()), "{} vs lhs {}", r.discrepancy, r.lhs);
    }
}
