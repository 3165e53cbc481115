use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::grid::{mollifier, MomentumGrid, SPVector};
use super::taylor::{localized_monomials, s_indices};
use crate::error::{Error, Result};

pub const GS_DROP_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Exponent of ω applied to localized generators: `∓1/2`.
    pub fn omega_exponent(self) -> f64 {
        match self {
            Sign::Plus => -0.5,
            Sign::Minus => 0.5,
        }
    }
}

/// Real-coefficient modified Gram–Schmidt with one reorthogonalisation pass.
/// Returns the orthonormal vectors and the number of dropped inputs.
pub fn gram_schmidt_real(vectors: &[SPVector], tol: f64) -> (Vec<SPVector>, usize) {
    let mut basis: Vec<SPVector> = Vec::new();
    let mut dropped = 0;
    for v in vectors {
        let n0 = v.norm();
        if n0 == 0.0 {
            dropped += 1;
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = b.inner(&w).re;
                w.axpy(Complex64::new(-c, 0.0), b);
            }
        }
        let n = w.norm();
        if n <= tol * n0 {
            dropped += 1;
            continue;
        }
        basis.push(w.scale_real(1.0 / n));
    }
    (basis, dropped)
}

/// Approximation of `𝓛±_r = [ω^{∓1/2} D̃(O_r)]` spanned by `ω^{∓1/2}FT(x^κχ(O_r))`, `|κ| ≤ K`.
#[derive(Clone, Debug)]
pub struct LocalizationFamily {
    pub sign: Sign,
    pub radius: f64,
    pub max_kappa_order: usize,
    pub generators: Vec<SPVector>,
    pub basis: Vec<SPVector>,
    pub dropped: usize,
}

impl LocalizationFamily {
    pub fn new(grid: &Arc<MomentumGrid>, r: f64, k_max: usize, sign: Sign) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::Param(format!("radius must be positive, got {r}")));
        }
        if grid.omegas().contains(&0.0) {
            return Err(Error::Config("grid samples ω = 0".into()));
        }
        let kappas = s_indices(grid.dim(), k_max);
        let beta = sign.omega_exponent();
        let generators: Vec<SPVector> =
            localized_monomials(grid, r, &kappas)?.into_iter().map(|v| v.omega_pow(beta)).collect();
        Self::from_generators(sign, r, k_max, generators)
    }

    pub fn from_generators(sign: Sign, r: f64, k_max: usize, generators: Vec<SPVector>) -> Result<Self> {
        if generators.iter().any(|g| !g.norm().is_finite()) {
            return Err(Error::Config("non-finite localization generator".into()));
        }
        let (basis, dropped) = gram_schmidt_real(&generators, GS_DROP_TOL);
        Ok(Self { sign, radius: r, max_kappa_order: k_max, generators, basis, dropped })
    }

    pub fn empty(sign: Sign, r: f64) -> Self {
        Self { sign, radius: r, max_kappa_order: 0, generators: vec![], basis: vec![], dropped: 0 }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonal projection onto the span.
    pub fn project(&self, f: &SPVector) -> SPVector {
        let mut out = SPVector::zeros(&f.grid);
        for b in &self.basis {
            out.axpy(b.inner(f), b);
        }
        out
    }
}

fn autocorrelation_transform(grid: &Arc<MomentumGrid>, radius: f64) -> Vec<f64> {
    let lat = grid.config_lattice(4);
    let mut x = vec![0.0; grid.dim()];
    let samples: Vec<Complex64> = (0..lat.len())
        .map(|i| {
            lat.point(i, &mut x);
            Complex64::new(mollifier(&x, radius), 0.0)
        })
        .collect();
    let g0: f64 = samples.iter().map(|c| c.re).sum::<f64>()
        * lat.cell_volume()
        * (2.0 * std::f64::consts::PI).powf(-(grid.dim() as f64) / 2.0);
    let g = SPVector::from_config_samples(grid, &lat, samples);
    g.amps.iter().map(|a| a.norm_sqr() / (g0 * g0)).collect()
}

/// `h̃_{r₀} = (|ĝ_a|² + |ĝ_b|²)/2` for mollifiers `g_a`, `g_b` of radii `r₀/2`
/// and `r₀/(1+√5)`; the inverse transform is supported in `O_{r₀}` and the
/// zeros of the two terms never coincide on the grid. Normalised to 1 at
/// `p = 0`. Returns the vector and its minimum over the grid.
pub fn default_h_r0(grid: &Arc<MomentumGrid>, r0: f64) -> Result<(SPVector, f64)> {
    let a = autocorrelation_transform(grid, r0 / 2.0);
    let b = autocorrelation_transform(grid, r0 / (1.0 + 5f64.sqrt()));
    let amps = a.iter().zip(&b).map(|(x, y)| Complex64::new(0.5 * (x + y), 0.0)).collect();
    let h = SPVector { grid: grid.clone(), amps };
    let min = h.amps.iter().map(|a| a.re).fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(Error::Config(format!("h̃_r0 not strictly positive on the grid (min {min:e}); widen the grid")));
    }
    Ok((h, min))
}

/// Singular values (descending) of a single component `|T_c|² = 𝓛 D 𝓛`.
#[derive(Clone, Debug, Default)]
pub struct TComponents {
    pub e_plus: Vec<f64>,
    pub e_minus: Vec<f64>,
    pub h_plus: Vec<f64>,
    pub h_minus: Vec<f64>,
}

impl TComponents {
    pub fn all(&self) -> [&[f64]; 4] {
        [&self.e_plus, &self.e_minus, &self.h_plus, &self.h_minus]
    }
}

/// `T = (|T_{E,+}|² + |T_{E,−}|² + |T_{h,+}|² + |T_{h,−}|²)^{1/2}` restricted to
/// `span(𝓛⁺_r ∪ 𝓛⁻_r)`.
#[derive(Clone, Debug)]
pub struct TOperator {
    pub matrix: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<SPVector>,
    pub components: TComponents,
    pub energy: f64,
    pub gamma: f64,
}

fn gram(basis: &[SPVector], weight: &[f64]) -> DMatrix<f64> {
    let n = basis.len();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = basis[i]
                .amps
                .iter()
                .zip(&basis[j].amps)
                .zip(weight)
                .map(|((a, b), w)| (a.conj() * b).re * w)
                .sum::<f64>()
                * basis[i].grid.cell_weight();
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

fn sorted_sqrt_eigs(m: DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return vec![];
    }
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    e.sort_by(|a, b| b.total_cmp(a));
    e
}

impl TOperator {
    pub fn check_gamma(s: usize, m: f64, gamma: f64) -> Result<()> {
        if s >= 3 {
            if !(0.5..(s as f64 - 1.0) / 2.0).contains(&gamma) {
                return Err(Error::Param(format!("γ = {gamma} outside [1/2, {}) for s = {s}", (s as f64 - 1.0) / 2.0)));
            }
        } else {
            if m <= 0.0 {
                return Err(Error::Param(format!("s = {s} requires a massive grid")));
            }
            if gamma < 0.5 {
                return Err(Error::Param(format!("γ = {gamma} below 1/2")));
            }
        }
        Ok(())
    }

    pub fn from_families(
        plus: &LocalizationFamily,
        minus: &LocalizationFamily,
        grid: &Arc<MomentumGrid>,
        energy: f64,
        gamma: f64,
        h_r0: &SPVector,
    ) -> Result<Self> {
        Self::check_gamma(grid.dim(), grid.mass(), gamma)?;
        if h_r0.amps.iter().any(|a| !(a.re > 0.0)) {
            return Err(Error::Precondition("h̃_r0 must be strictly positive on the grid".into()));
        }
        let d_energy: Vec<f64> = grid.omegas().iter().map(|&w| if w <= energy { 1.0 / w } else { 0.0 }).collect();
        let d_h: Vec<f64> = grid.omegas().iter().zip(&h_r0.amps).map(|(&w, h)| h.re * w.powf(-2.0 * gamma)).collect();

        let mut all = plus.basis.clone();
        all.extend(minus.basis.iter().cloned());
        let (u, _) = gram_schmidt_real(&all, GS_DROP_TOL);
        let n = u.len();
        let mut matrix = DMatrix::zeros(n, n);
        let mut components = TComponents::default();
        for fam in [plus, minus] {
            let k = fam.basis.len();
            let mut c = DMatrix::zeros(k, n);
            for i in 0..k {
                for j in 0..n {
                    c[(i, j)] = fam.basis[i].inner(&u[j]).re;
                }
            }
            let ge = gram(&fam.basis, &d_energy);
            let gh = gram(&fam.basis, &d_h);
            matrix += c.transpose() * (&ge + &gh) * &c;
            let (se, sh) = (sorted_sqrt_eigs(ge), sorted_sqrt_eigs(gh));
            match fam.sign {
                Sign::Plus => {
                    components.e_plus = se;
                    components.h_plus = sh;
                }
                Sign::Minus => {
                    components.e_minus = se;
                    components.h_minus = sh;
                }
            }
        }
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        let (eigenvalues, eigenvectors) = if n == 0 {
            (vec![], vec![])
        } else {
            let eig = SymmetricEigen::new(matrix.clone());
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            let vals = order.iter().map(|&k| eig.eigenvalues[k].max(0.0).sqrt()).collect();
            let vecs = order
                .iter()
                .map(|&k| {
                    let mut v = SPVector::zeros(grid);
                    for (j, uj) in u.iter().enumerate().take(n) {
                        v.axpy(Complex64::new(eig.eigenvectors[(j, k)], 0.0), uj);
                    }
                    v
                })
                .collect();
            (vals, vecs)
        };
        Ok(Self { matrix, eigenvalues, eigenvectors, components, energy, gamma })
    }

    /// Builds both localization families with `K = k_max` and assembles T.
    pub fn build(grid: &Arc<MomentumGrid>, r: f64, energy: f64, gamma: f64, h_r0: &SPVector, k_max: usize) -> Result<Self> {
        Self::check_gamma(grid.dim(), grid.mass(), gamma)?;
        let plus = LocalizationFamily::new(grid, r, k_max, Sign::Plus)?;
        let minus = LocalizationFamily::new(grid, r, k_max, Sign::Minus)?;
        Self::from_families(&plus, &minus, grid, energy, gamma, h_r0)
    }

    pub fn schatten(&self, p: f64) -> Result<f64> {
        schatten_p_norm(&self.eigenvalues, p)
    }

    /// `Σ_j t_j^p`.
    pub fn trace_power(&self, p: f64) -> f64 {
        self.eigenvalues.iter().map(|t| t.powf(p)).sum()
    }
}

/// `(Σ t_j^p)^{1/p}` for `0 < p ≤ 1`.
pub fn schatten_p_norm(singular_values: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Param(format!("p = {p} outside (0, 1]")));
    }
    let s: f64 = singular_values.iter().map(|t| t.powf(p)).sum();
    Ok(s.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn massive_setup(n: usize) -> (Arc<MomentumGrid>, TOperator) {
        let g = MomentumGrid::new(1, 1.0, 8.0, n).unwrap();
        let (h, _) = default_h_r0(&g, 1.0).unwrap();
        let t = TOperator::build(&g, 1.0, 2.0, 0.5, &h, 4).unwrap();
        (g, t)
    }

    #[test]
    fn schatten_examples() {
        assert_eq!(schatten_p_norm(&[2.0], 1.0).unwrap(), 2.0);
        assert!((schatten_p_norm(&[1.0, 1.0], 0.5).unwrap() - 4.0).abs() < 1e-14);
        assert!(schatten_p_norm(&[1.0], 0.0).is_err());
        assert!(schatten_p_norm(&[1.0], 1.5).is_err());
    }

    #[test]
    fn gamma_range() {
        assert!(TOperator::check_gamma(3, 0.0, 0.5).is_ok());
        assert!(TOperator::check_gamma(3, 0.0, 1.0).is_err());
        assert!(TOperator::check_gamma(4, 0.0, 1.2).is_ok());
        assert!(TOperator::check_gamma(1, 0.0, 0.5).is_err());
        assert!(TOperator::check_gamma(1, 1.0, 0.5).is_ok());
    }

    #[test]
    fn families_are_orthonormal_and_j_invariant() {
        let g = MomentumGrid::new(1, 1.0, 8.0, 64).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let fam = LocalizationFamily::new(&g, 1.0, 4, sign).unwrap();
            assert!(fam.dim() >= 1);
            for (i, a) in fam.basis.iter().enumerate() {
                assert!(a.j_defect() < 1e-10);
                for (j, b) in fam.basis.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((a.inner(b) - Complex64::new(want, 0.0)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn zero_family_gives_zero_operator() {
        let g = MomentumGrid::new(1, 1.0, 8.0, 64).unwrap();
        let (h, _) = default_h_r0(&g, 1.0).unwrap();
        let e = LocalizationFamily::empty(Sign::Plus, 1.0);
        let f = LocalizationFamily::empty(Sign::Minus, 1.0);
        let t = TOperator::from_families(&e, &f, &g, 2.0, 0.5, &h).unwrap();
        assert!(t.eigenvalues.iter().all(|&v| v == 0.0));
        assert_eq!(t.schatten(1.0).unwrap(), 0.0);
    }

    #[test]
    fn t_spectrum_properties() {
        let (_, t) = massive_setup(64);
        assert!(!t.eigenvalues.is_empty());
        assert!(t.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        assert!(t.eigenvalues.iter().all(|&v| v >= 0.0));
        for v in &t.eigenvectors {
            assert!(v.j_defect() < 1e-9);
        }
        for (i, a) in t.eigenvectors.iter().enumerate() {
            for (j, b) in t.eigenvectors.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b).re - want).abs() < 1e-9);
            }
        }
        for p in [0.25, 0.5, 1.0] {
            let total: f64 = t.components.all().iter().map(|c| c.iter().map(|x| x.powf(p)).sum::<f64>()).sum();
            assert!(t.trace_power(p) <= total * (1.0 + 1e-10), "p={p}");
        }
    }

    #[test]
    fn h_r0_positive() {
        let g = MomentumGrid::new(1, 1.0, 8.0, 64).unwrap();
        let (h, min) = default_h_r0(&g, 1.0).unwrap();
        assert!(min > 0.0);
        assert!(h.amps.iter().all(|a| a.re <= 1.0 + 1e-12));
    }
}
