//! Truncated symmetric Fock space over a finite orthonormal mode set.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::single_particle::{MomentumGrid, SPVector};

pub const MAX_MODES: usize = 16;
pub const SPAN_TOL: f64 = 1e-8;
const NONE: u32 = u32::MAX;
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Orthonormal single-particle modes with sharp energies.
#[derive(Clone, Debug)]
pub struct ModeBasis {
    pub grid: Arc<MomentumGrid>,
    pub modes: Vec<SPVector>,
    pub energies: Vec<f64>,
}

impl ModeBasis {
    pub fn new(grid: &Arc<MomentumGrid>, modes: Vec<SPVector>, energies: Vec<f64>) -> Result<Self> {
        if modes.is_empty() || modes.len() > MAX_MODES {
            return Err(Error::Config(format!("mode count {} not in 1..={MAX_MODES}", modes.len())));
        }
        if modes.len() != energies.len() {
            return Err(Error::Config("one energy per mode required".into()));
        }
        for (i, a) in modes.iter().enumerate() {
            for (j, b) in modes.iter().enumerate().skip(i) {
                let want = if i == j { 1.0 } else { 0.0 };
                if (a.inner(b) - Complex64::new(want, 0.0)).norm() > 1e-10 {
                    return Err(Error::Config(format!("modes {i}, {j} are not orthonormal")));
                }
            }
        }
        let m = grid.mass();
        if let Some(e) = energies.iter().find(|&&e| !(e >= m - 1e-12) || !e.is_finite()) {
            return Err(Error::Config(format!("mode energy {e} below the mass {m}")));
        }
        Ok(Self { grid: grid.clone(), modes, energies })
    }

    /// Normalised cell indicators; `ω` is exactly the cell value.
    pub fn cell_indicators(grid: &Arc<MomentumGrid>, cells: &[usize]) -> Result<Self> {
        let modes = cells.iter().map(|&c| SPVector::cell_indicator(grid, c)).collect();
        let energies = cells.iter().map(|&c| grid.omega(c)).collect();
        Self::new(grid, modes, energies)
    }

    /// For each cell `c` (with `−c ≠ c`), the J-invariant pair
    /// `(e_c + e_{−c})/√2`, `i(e_c − e_{−c})/√2`.
    pub fn j_pairs(grid: &Arc<MomentumGrid>, cells: &[usize]) -> Result<Self> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut modes = Vec::new();
        let mut energies = Vec::new();
        for &c in cells {
            let a = SPVector::cell_indicator(grid, c);
            let b = SPVector::cell_indicator(grid, grid.neg_index(c));
            modes.push(a.add(&b).scale_real(r));
            modes.push(a.sub(&b).scale(Complex64::new(0.0, r)));
            energies.extend([grid.omega(c); 2]);
        }
        Self::new(grid, modes, energies)
    }

    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    /// `c_j = ⟨mode_j|f⟩`; fails if `f` leaves the span by more than `SPAN_TOL·‖f‖`.
    pub fn coefficients(&self, f: &SPVector) -> Result<Vec<Complex64>> {
        let c: Vec<Complex64> = self.modes.iter().map(|m| m.inner(f)).collect();
        let mut resid = f.clone();
        for (cj, m) in c.iter().zip(&self.modes) {
            resid.axpy(-cj, m);
        }
        let nf = f.norm();
        let r = resid.norm();
        if r > SPAN_TOL * nf {
            return Err(Error::Span { residual: r / nf });
        }
        Ok(c)
    }

    pub fn vector(&self, coeffs: &[Complex64]) -> SPVector {
        let mut v = SPVector::zeros(&self.grid);
        for (c, m) in coeffs.iter().zip(&self.modes) {
            v.axpy(*c, m);
        }
        v
    }
}

/// Occupation basis `{μ : |μ| ≤ n_max}` ordered by particle number and then
/// by descending lexicographic order of the dense tuple.
#[derive(Debug)]
pub struct FockSpace {
    pub basis: ModeBasis,
    pub n_max: usize,
    occupations: Vec<Vec<u8>>,
    lookup: HashMap<Vec<u8>, u32>,
    lower: Vec<Vec<u32>>,
    raise: Vec<Vec<u32>>,
    energy: Vec<f64>,
    number: Vec<u32>,
}

impl FockSpace {
    pub fn new(basis: ModeBasis, n_max: usize) -> Result<Arc<Self>> {
        if n_max > 64 {
            return Err(Error::Config(format!("n_max = {n_max} exceeds 64")));
        }
        let d = basis.dim();
        let mut occupations = Vec::new();
        for k in 0..=n_max {
            for mu in MultiIndex::enumerate_of_length(k, d) {
                occupations.push(mu.to_dense(d).into_iter().map(|c| c as u8).collect::<Vec<u8>>());
            }
            if occupations.len() > 5_000_000 {
                return Err(Error::Config("Fock space dimension exceeds 5e6".into()));
            }
        }
        let lookup: HashMap<Vec<u8>, u32> = occupations.iter().enumerate().map(|(i, o)| (o.clone(), i as u32)).collect();
        let mut lower = vec![vec![NONE; occupations.len()]; d];
        let mut raise = vec![vec![NONE; occupations.len()]; d];
        let mut key = vec![0u8; d];
        for (i, occ) in occupations.iter().enumerate() {
            key.copy_from_slice(occ);
            for j in 0..d {
                if occ[j] > 0 {
                    key[j] -= 1;
                    lower[j][i] = lookup[&key];
                    key[j] += 1;
                }
                key[j] += 1;
                if let Some(&t) = lookup.get(&key) {
                    raise[j][i] = t;
                }
                key[j] -= 1;
            }
        }
        let energy = occupations
            .iter()
            .map(|o| o.iter().zip(&basis.energies).map(|(&c, e)| c as f64 * e).sum())
            .collect();
        let number = occupations.iter().map(|o| o.iter().map(|&c| c as u32).sum()).collect();
        Ok(Arc::new(Self { basis, n_max, occupations, lookup, lower, raise, energy, number }))
    }

    pub fn dim(&self) -> usize {
        self.occupations.len()
    }
    pub fn modes(&self) -> usize {
        self.basis.dim()
    }
    pub fn occupation(&self, i: usize) -> &[u8] {
        &self.occupations[i]
    }
    pub fn multiindex(&self, i: usize) -> MultiIndex {
        MultiIndex::from_dense(&self.occupations[i].iter().map(|&c| c as u32).collect::<Vec<_>>())
    }
    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        self.lookup.get(occ).map(|&i| i as usize)
    }
    pub fn energy(&self, i: usize) -> f64 {
        self.energy[i]
    }
    pub fn number(&self, i: usize) -> u32 {
        self.number[i]
    }
    pub fn lower_index(&self, j: usize, i: usize) -> Option<usize> {
        let t = self.lower[j][i];
        (t != NONE).then_some(t as usize)
    }
    pub fn raise_index(&self, j: usize, i: usize) -> Option<usize> {
        let t = self.raise[j][i];
        (t != NONE).then_some(t as usize)
    }
}

/// Tolerance on total energy used by [`FockState::project_energy`].
pub fn within_energy(e: f64, cap: f64) -> bool {
    e <= cap + 1e-12 * cap.abs().max(1.0)
}

/// Dense amplitude vector over a [`FockSpace`].
#[derive(Clone, Debug)]
pub struct FockState {
    pub space: Arc<FockSpace>,
    pub amps: Vec<Complex64>,
}

impl FockState {
    pub fn zero(space: &Arc<FockSpace>) -> Self {
        Self { space: space.clone(), amps: vec![ZERO; space.dim()] }
    }

    pub fn vacuum(space: &Arc<FockSpace>) -> Self {
        let mut s = Self::zero(space);
        s.amps[0] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn basis_state(space: &Arc<FockSpace>, occ: &[u8]) -> Result<Self> {
        let i = space.index_of(occ).ok_or_else(|| Error::Param(format!("occupation {occ:?} not in the space")))?;
        let mut s = Self::zero(space);
        s.amps[i] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    fn check(&self, other: &FockState) {
        assert!(Arc::ptr_eq(&self.space, &other.space), "states live on different Fock spaces");
    }

    pub fn inner(&self, other: &FockState) -> Complex64 {
        self.check(other);
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> FockState {
        FockState { space: self.space.clone(), amps: self.amps.iter().map(|a| a * c).collect() }
    }

    pub fn axpy(&mut self, c: Complex64, other: &FockState) {
        self.check(other);
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += c * b;
        }
    }

    pub fn sub(&self, other: &FockState) -> FockState {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other);
        out
    }

    /// `Σ_j conj(c_j) a_j` with mode coordinates `c`.
    pub fn annihilate_coeffs(&self, c: &[Complex64]) -> FockState {
        let sp = &self.space;
        let mut out = vec![ZERO; sp.dim()];
        for (i, a) in self.amps.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            let occ = sp.occupation(i);
            for (j, cj) in c.iter().enumerate() {
                if occ[j] == 0 || *cj == ZERO {
                    continue;
                }
                let t = sp.lower[j][i] as usize;
                out[t] += cj.conj() * (occ[j] as f64).sqrt() * a;
            }
        }
        FockState { space: sp.clone(), amps: out }
    }

    /// `Σ_j c_j a*_j`; amplitude pushed above `n_max` is returned as its squared norm.
    pub fn create_coeffs(&self, c: &[Complex64]) -> (FockState, f64) {
        let sp = &self.space;
        let mut out = vec![ZERO; sp.dim()];
        let mut overflow: HashMap<Vec<u8>, Complex64> = HashMap::new();
        for (i, a) in self.amps.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            let occ = sp.occupation(i);
            for (j, cj) in c.iter().enumerate() {
                if *cj == ZERO {
                    continue;
                }
                let v = cj * ((occ[j] as f64) + 1.0).sqrt() * a;
                match sp.raise_index(j, i) {
                    Some(t) => out[t] += v,
                    None => {
                        let mut key = occ.to_vec();
                        key[j] += 1;
                        *overflow.entry(key).or_insert(ZERO) += v;
                    }
                }
            }
        }
        let leak = overflow.values().map(|v| v.norm_sqr()).sum();
        (FockState { space: sp.clone(), amps: out }, leak)
    }

    pub fn apply_annihilator(&self, f: &SPVector) -> Result<FockState> {
        let c = self.space.basis.coefficients(f)?;
        Ok(self.annihilate_coeffs(&c))
    }

    pub fn apply_creator(&self, f: &SPVector) -> Result<(FockState, f64)> {
        let c = self.space.basis.coefficients(f)?;
        Ok(self.create_coeffs(&c))
    }

    pub fn apply_hamiltonian(&self) -> FockState {
        let sp = &self.space;
        FockState { space: sp.clone(), amps: self.amps.iter().enumerate().map(|(i, a)| a * sp.energy(i)).collect() }
    }

    pub fn project_energy(&self, e: f64) -> FockState {
        let sp = &self.space;
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| if within_energy(sp.energy(i), e) { *a } else { ZERO })
            .collect();
        FockState { space: sp.clone(), amps }
    }

    /// `(HΨ, P_E Ψ)`.
    pub fn hamiltonian_and_projection(&self, e: f64) -> Result<(FockState, FockState)> {
        if !(e >= 0.0) {
            return Err(Error::Param(format!("energy cap must be ≥ 0, got {e}")));
        }
        Ok((self.apply_hamiltonian(), self.project_energy(e)))
    }

    /// Largest total energy carried by a nonzero amplitude.
    pub fn max_energy(&self) -> f64 {
        self.amps.iter().enumerate().filter(|(_, a)| **a != ZERO).map(|(i, _)| self.space.energy(i)).fold(0.0, f64::max)
    }

    pub fn max_number(&self) -> u32 {
        self.amps.iter().enumerate().filter(|(_, a)| **a != ZERO).map(|(i, _)| self.space.number(i)).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Letter {
    Ann(Vec<Complex64>),
    Cre(Vec<Complex64>),
}

/// Product of ladder operators, applied right to left.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OperatorWord {
    pub letters: Vec<Letter>,
}

impl OperatorWord {
    pub fn identity() -> Self {
        Self { letters: vec![] }
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    pub fn ann(basis: &ModeBasis, f: &SPVector) -> Result<Letter> {
        Ok(Letter::Ann(basis.coefficients(f)?))
    }

    pub fn cre(basis: &ModeBasis, f: &SPVector) -> Result<Letter> {
        Ok(Letter::Cre(basis.coefficients(f)?))
    }

    pub fn creators(&self) -> usize {
        self.letters.iter().filter(|l| matches!(l, Letter::Cre(_))).count()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn adjoint(&self) -> Self {
        let letters = self
            .letters
            .iter()
            .rev()
            .map(|l| match l {
                Letter::Ann(c) => Letter::Cre(c.clone()),
                Letter::Cre(c) => Letter::Ann(c.clone()),
            })
            .collect();
        Self { letters }
    }

    /// Returns the image and the accumulated leakage mass.
    pub fn apply(&self, psi: &FockState) -> (FockState, f64) {
        let mut cur = psi.clone();
        let mut leak = 0.0;
        for l in self.letters.iter().rev() {
            cur = match l {
                Letter::Ann(c) => cur.annihilate_coeffs(c),
                Letter::Cre(c) => {
                    let (s, lk) = cur.create_coeffs(c);
                    leak += lk;
                    s
                }
            };
        }
        (cur, leak)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub leakage: f64,
}

/// `‖P_E W P_E‖` by power iteration on `(P_E W P_E)*(P_E W P_E)`.
pub fn operator_norm_on_pe(space: &Arc<FockSpace>, word: &OperatorWord, e: f64, rel_tol: f64, max_iter: usize) -> NormEstimate {
    let adj = word.adjoint();
    operator_norm_with(space, e, rel_tol, max_iter, |v| {
        let (w, l1) = word.apply(v);
        let w = w.project_energy(e);
        let (back, l2) = adj.apply(&w);
        (w.norm(), back.project_energy(e), l1 + l2)
    })
}

/// Power iteration for the top singular value of an operator given through
/// `v ↦ (‖Av‖, A*Av, leakage)` on the range of `P_E`.
pub fn operator_norm_with<F>(space: &Arc<FockSpace>, e: f64, rel_tol: f64, max_iter: usize, step: F) -> NormEstimate
where
    F: Fn(&FockState) -> (f64, FockState, f64),
{
    let mut v = FockState::zero(space);
    for i in 0..space.dim() {
        if within_energy(space.energy(i), e) {
            let phase = (i as f64 * 0.618_033_988_749_895).fract();
            v.amps[i] = Complex64::new(1.0 + 0.5 * phase, 0.3 * (1.0 - phase));
        }
    }
    let n0 = v.norm();
    if n0 == 0.0 {
        return NormEstimate { value: 0.0, iterations: 0, converged: true, leakage: 0.0 };
    }
    v = v.scale(Complex64::new(1.0 / n0, 0.0));
    let mut prev = 0.0;
    let mut leakage: f64 = 0.0;
    for it in 1..=max_iter {
        let (av, ata, leak) = step(&v);
        leakage = leakage.max(leak);
        let n = ata.norm();
        if n == 0.0 {
            return NormEstimate { value: av, iterations: it, converged: true, leakage };
        }
        if it > 1 && (av - prev).abs() <= rel_tol * av {
            return NormEstimate { value: av, iterations: it, converged: true, leakage };
        }
        prev = av;
        v = ata.scale(Complex64::new(1.0 / n, 0.0));
    }
    NormEstimate { value: prev, iterations: max_iter, converged: false, leakage }
}

/// Matrix of `P_E A P_E` on the occupation states of energy ≤ E, together with
/// their indices. `apply` maps a basis state to `AΨ`.
pub fn restricted_matrix<F>(space: &Arc<FockSpace>, e: f64, apply: F) -> (Vec<usize>, DMatrix<Complex64>)
where
    F: Fn(&FockState) -> FockState,
{
    let idx: Vec<usize> = (0..space.dim()).filter(|&i| within_energy(space.energy(i), e)).collect();
    let mut m = DMatrix::zeros(idx.len(), idx.len());
    for (col, &i) in idx.iter().enumerate() {
        let mut v = FockState::zero(space);
        v.amps[i] = Complex64::new(1.0, 0.0);
        let out = apply(&v);
        for (row, &k) in idx.iter().enumerate() {
            m[(row, col)] = out.amps[k];
        }
    }
    (idx, m)
}

/// Largest singular value of a dense matrix (0 for an empty one).
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DampingReport {
    pub max_ratio: f64,
    pub samples: usize,
}

/// `⟨Ψ|(1+H)^l e^{−G_l}Ψ⟩ / ‖Ψ‖²` with `G_l = dΓ(l·log(2+ω))`, maximised over the samples.
pub fn gl_damping_check(l: f64, samples: &[FockState]) -> Result<DampingReport> {
    if !(l >= 0.0) {
        return Err(Error::Param(format!("l must be ≥ 0, got {l}")));
    }
    let mut max_ratio: f64 = 0.0;
    for psi in samples {
        let sp = &psi.space;
        let mut num = 0.0;
        for (i, a) in psi.amps.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            let damp: f64 = sp
                .occupation(i)
                .iter()
                .zip(&sp.basis.energies)
                .map(|(&c, w)| (2.0 + w).powf(-l * c as f64))
                .product();
            num += a.norm_sqr() * (1.0 + sp.energy(i)).powf(l) * damp;
        }
        let n = psi.norm_sqr();
        if n > 0.0 {
            max_ratio = max_ratio.max(num / n);
        }
    }
    Ok(DampingReport { max_ratio, samples: samples.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(d: usize, n_max: usize) -> Arc<FockSpace> {
        let g = MomentumGrid::new(1, 1.0, 4.0, 16).unwrap();
        let cells: Vec<usize> = (8..8 + d).collect();
        FockSpace::new(ModeBasis::cell_indicators(&g, &cells).unwrap(), n_max).unwrap()
    }

    #[test]
    fn dimension_and_order() {
        let sp = space(2, 2);
        assert_eq!(sp.dim(), 6);
        assert_eq!(sp.occupation(0), &[0, 0]);
        assert_eq!(sp.occupation(1), &[1, 0]);
        assert_eq!(sp.occupation(3), &[2, 0]);
        assert_eq!(sp.occupation(5), &[0, 2]);
    }

    #[test]
    fn ladder_examples() {
        let sp = space(2, 4);
        let om = FockState::vacuum(&sp);
        let e1 = sp.basis.modes[0].clone();
        assert_eq!(om.apply_annihilator(&e1).unwrap().norm(), 0.0);
        let (one, leak) = om.apply_creator(&e1).unwrap();
        assert_eq!(leak, 0.0);
        assert!((one.norm() - 1.0).abs() < 1e-14);
        let two = FockState::basis_state(&sp, &[2, 0]).unwrap();
        assert!((two.apply_annihilator(&e1).unwrap().norm() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn span_error() {
        let sp = space(2, 2);
        let other = SPVector::cell_indicator(&sp.basis.grid, 0);
        assert!(matches!(FockState::vacuum(&sp).apply_annihilator(&other), Err(Error::Span { .. })));
    }

    #[test]
    fn leakage_is_exact() {
        let sp = space(1, 2);
        let top = FockState::basis_state(&sp, &[2]).unwrap();
        let (out, leak) = top.create_coeffs(&[Complex64::new(1.0, 0.0)]);
        assert_eq!(out.norm(), 0.0);
        assert!((leak - 3.0).abs() < 1e-14);
    }

    #[test]
    fn hamiltonian_and_projection_examples() {
        let sp = space(2, 3);
        let om = FockState::vacuum(&sp);
        let (h, p) = om.hamiltonian_and_projection(0.0).unwrap();
        assert_eq!(h.norm(), 0.0);
        assert_eq!(p.sub(&om).norm(), 0.0);
        let n3 = FockState::basis_state(&sp, &[3, 0]).unwrap();
        let w0 = sp.basis.energies[0];
        assert!((n3.apply_hamiltonian().inner(&n3).re - 3.0 * w0).abs() < 1e-14);
        assert!(om.hamiltonian_and_projection(-1.0).is_err());
    }

    #[test]
    fn identity_norm_is_one() {
        let sp = space(2, 3);
        let est = operator_norm_on_pe(&sp, &OperatorWord::identity(), 3.0, 1e-10, 100);
        assert!(est.converged && (est.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gl_examples() {
        let sp = space(2, 3);
        let r = gl_damping_check(2.0, &[FockState::vacuum(&sp)]).unwrap();
        assert!((r.max_ratio - 1.0).abs() < 1e-15);
        let one = FockState::basis_state(&sp, &[1, 0]).unwrap();
        let w = sp.basis.energies[0];
        let r = gl_damping_check(3.0, &[one]).unwrap();
        assert!((r.max_ratio - ((1.0 + w) / (2.0 + w)).powi(3)).abs() < 1e-14);
    }
}
