use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss–Hermite nodes and weights for `∫e^{−x²}f(x)dx` (Golub–Welsch).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 0 {
        return (vec![], vec![]);
    }
    let j = DMatrix::from_fn(n, n, |r, c| if r + 1 == c || c + 1 == r { (r.max(c) as f64 / 2.0).sqrt() } else { 0.0 });
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // symmetrize against rounding
    for i in 0..n / 2 {
        let (a, b) = (pairs[i], pairs[n - 1 - i]);
        let x = 0.5 * (b.0 - a.0);
        let w = 0.5 * (a.1 + b.1);
        pairs[i] = (-x, w);
        pairs[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    pairs.into_iter().unzip()
}

/// `h = Σ_k a_k e^{−cu²/2}u^k` (`k ≤ 2M_E`) with
/// `∫e^{−cu²/2}uⁿh(u)du = −iδ_{n,1}` for `n ≤ 2M_E`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentWitness {
    pub c: f64,
    pub m_e: usize,
    pub coefficients: Vec<Complex64>,
    /// Quadrature grid `u_i = x_i/√c` and `h(u_i)`.
    pub nodes: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Achieved moments, evaluated on the grid.
    pub moments: Vec<Complex64>,
}

impl MomentWitness {
    pub fn eval(&self, u: f64) -> Complex64 {
        let env = (-0.5 * self.c * u * u).exp();
        self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * u + a) * env
    }

    /// Largest deviation of the achieved moments from `−iδ_{n,1}`.
    pub fn moment_error(&self) -> f64 {
        self.moments
            .iter()
            .enumerate()
            .map(|(n, m)| if n == 1 { (m + Complex64::new(0.0, 1.0)).norm() } else { m.norm() })
            .fold(0.0, f64::max)
    }
}

/// Builds the witness with Gram–Schmidt on `{e^{−cu²/2}uⁿ}` using a
/// Gauss–Hermite rule with `nodes` points (at least `2M_E + 1`, which makes it
/// exact on the Gram entries).
pub fn moment_witness(c: f64, m_e: usize, nodes: usize) -> Result<MomentWitness> {
    if !(c > 0.0) || m_e == 0 {
        return Err(Error::Param(format!("need c > 0 and M_E ≥ 1, got c={c}, M_E={m_e}")));
    }
    let dim = 2 * m_e + 1;
    if nodes < dim {
        return Err(Error::Param(format!("{nodes} Gauss–Hermite nodes cannot integrate degree {}", 2 * (dim - 1))));
    }
    let (xs, ws) = gauss_hermite(nodes);
    let sc = c.sqrt();
    let us: Vec<f64> = xs.iter().map(|x| x / sc).collect();
    // ∫e^{−cu²} u^j du on the rule
    let q = |j: usize| us.iter().zip(&ws).map(|(u, w)| w * u.powi(j as i32)).sum::<f64>() / sc;
    let gram: Vec<f64> = (0..2 * dim - 1).map(q).collect();
    let ip = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                s += x * y * gram[i + j];
            }
        }
        s
    };
    // orthonormal e_k = Σ_j E[k][j] φ_j; φ_n = Σ_{k≤n} R[k][n] e_k
    let mut e: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut r = vec![vec![0.0; dim]; dim];
    for n in 0..dim {
        let mut v = vec![0.0; dim];
        v[n] = 1.0;
        let n0 = ip(&v, &v).sqrt();
        for (k, ek) in e.iter().enumerate() {
            let proj = ip(ek, &v);
            r[k][n] += proj;
            for (vi, ei) in v.iter_mut().zip(ek) {
                *vi -= proj * ei;
            }
        }
        let nv = ip(&v, &v).sqrt();
        if !(nv > 1e-12 * n0) {
            return Err(Error::Numeric(format!("Gram–Schmidt breakdown at degree {n} (relative norm {:.2e})", nv / n0)));
        }
        r[n][n] = nv;
        e.push(v.iter().map(|x| x / nv).collect());
    }
    // Rᵀy = b with b_n = −iδ_{n,1}
    let mut y = vec![Complex64::new(0.0, 0.0); dim];
    for n in 0..dim {
        let b = if n == 1 { Complex64::new(0.0, -1.0) } else { Complex64::new(0.0, 0.0) };
        let s: Complex64 = (0..n).map(|k| y[k] * r[k][n]).sum();
        y[n] = (b - s) / r[n][n];
    }
    let mut coefficients = vec![Complex64::new(0.0, 0.0); dim];
    for (yk, ek) in y.iter().zip(&e) {
        for (a, x) in coefficients.iter_mut().zip(ek) {
            *a += yk * x;
        }
    }
    let mut w = MomentWitness { c, m_e, coefficients, nodes: us, values: vec![], moments: vec![] };
    w.values = w.nodes.iter().map(|&u| w.eval(u)).collect();
    // ∫e^{−cu²/2}uⁿh(u)du = Σ_i (w_i/√c) e^{cu_i²} · e^{−cu_i²/2}u_iⁿ h(u_i)
    w.moments = (0..dim)
        .map(|n| {
            w.nodes
                .iter()
                .zip(&ws)
                .zip(&w.values)
                .map(|((u, wt), h)| h * (wt / sc * (0.5 * c * u * u).exp() * u.powi(n as i32)))
                .sum()
        })
        .collect();
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_rule_is_exact() {
        let (x, w) = gauss_hermite(10);
        let m = |k: i32| x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum::<f64>();
        let sp = std::f64::consts::PI.sqrt();
        assert!((m(0) - sp).abs() < 1e-13);
        assert!((m(2) - sp / 2.0).abs() < 1e-13);
        assert!((m(4) - 3.0 * sp / 4.0).abs() < 1e-12);
        assert!(m(7).abs() < 1e-12);
    }

    #[test]
    fn moments_hit_target() {
        for (c, me) in [(1.0, 1), (0.5, 2), (2.0, 3), (1.3, 4)] {
            let w = moment_witness(c, me, 2 * me + 12).unwrap();
            assert!(w.moment_error() < 1e-10, "c={c} M={me}: {}", w.moment_error());
        }
    }

    #[test]
    fn odd_for_single_level() {
        let w = moment_witness(0.8, 1, 16).unwrap();
        for u in [0.1, 0.7, 1.9, 3.0] {
            assert!((w.eval(u) + w.eval(-u)).norm() < 1e-12);
        }
    }

    #[test]
    fn refinement_is_stable() {
        for me in [1, 2, 3] {
            let a = moment_witness(1.1, me, 2 * me + 6).unwrap();
            let b = moment_witness(1.1, me, 4 * me + 12).unwrap();
            for (x, y) in a.moments.iter().zip(&b.moments) {
                assert!((x - y).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn bad_parameters() {
        assert!(moment_witness(0.0, 1, 8).is_err());
        assert!(moment_witness(1.0, 0, 8).is_err());
        assert!(moment_witness(1.0, 3, 4).is_err());
    }
}
