//! Spectral densities `∫|p|^β |φ(Ã(p))|²`, infrared-order estimation for Wick
//! powers of `φ₊`, and the convolution threshold for Wick powers.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fit::power_law_fit;
use crate::fock::{FockSpace, FockState, ModeBasis};
use crate::quadrature::gauss_legendre_composite;
use crate::single_particle::{gamma_fn, mollifier, MomentumGrid, SPVector};
use crate::weyl_wick::{spectral_density_of, wick_field_density, FiniteRankFunctional};

/// Slope below which the density counts as bounded in the witness index.
pub const SLOPE_THRESHOLD: f64 = 0.05;

/// `Σ_cells w |p|^β |φ(:φ̃₊ⁿ:(p))|²`.
pub fn spectral_density(phi: &FiniteRankFunctional, n: usize, beta: f64) -> Result<f64> {
    if beta < 0.0 {
        return Err(Error::Param(format!("β = {beta} must be ≥ 0")));
    }
    let mut acc: Option<(crate::weyl_wick::DensityLattice, Vec<Complex64>)> = None;
    for (c, bra, ket) in &phi.terms {
        let (lat, vals) = wick_field_density(bra, ket, n)?;
        match &mut acc {
            None => acc = Some((lat, vals.iter().map(|v| c * v).collect())),
            Some((_, sum)) => sum.iter_mut().zip(&vals).for_each(|(s, v)| *s += c * v),
        }
    }
    Ok(acc.map_or(0.0, |(lat, vals)| spectral_density_of(&lat, &vals, beta)))
}

/// `⟨H_k^{⊗(k−drop)}| · H_k^{⊗k}⟩` with `H_k(p) = k^{s/2} h(kp)`, `h` the
/// radial mollifier of radius `E`, on a massless grid of half-width `E/k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Witness {
    pub s: usize,
    pub energy: f64,
    pub n_per_axis: usize,
    pub drop: usize,
}

impl Witness {
    pub fn phi1(s: usize, energy: f64, n_per_axis: usize) -> Self {
        Self { s, energy, n_per_axis, drop: 1 }
    }
    pub fn phi2(s: usize, energy: f64, n_per_axis: usize) -> Self {
        Self { s, energy, n_per_axis, drop: 2 }
    }

    pub fn label(&self) -> String {
        format!("phi{}", self.drop)
    }

    /// Grid-normalised `H_k` on its adapted grid.
    pub fn profile(&self, k: usize) -> Result<SPVector> {
        let r = self.energy / k as f64;
        let grid = MomentumGrid::new(self.s, 0.0, r, self.n_per_axis)?;
        let h = SPVector::from_fn(&grid, |p, _| Complex64::new(mollifier(p, r), 0.0));
        let n = h.norm();
        if n == 0.0 {
            return Err(Error::Config("witness profile vanishes on the grid".into()));
        }
        Ok(h.scale_real(1.0 / n))
    }

    pub fn functional(&self, k: usize) -> Result<FiniteRankFunctional> {
        if k < self.drop || k > u8::MAX as usize {
            return Err(Error::Param(format!("witness index {k} outside {}..=255", self.drop)));
        }
        let h = self.profile(k)?;
        let grid = h.grid.clone();
        let basis = ModeBasis::new(&grid, vec![h], vec![self.energy / k as f64])?;
        let space: Arc<FockSpace> = FockSpace::new(basis, k)?;
        let bra = FockState::basis_state(&space, &[(k - self.drop) as u8])?;
        let ket = FockState::basis_state(&space, &[k as u8])?;
        FiniteRankFunctional::rank_one(bra, ket, self.energy * (1.0 + 1e-12))
    }

    /// Density lattice and values of `φ_k(:φ̃₊ⁿ:(p))`.
    pub fn density(&self, k: usize, n: usize) -> Result<(crate::weyl_wick::DensityLattice, Vec<Complex64>)> {
        let phi = self.functional(k)?;
        let (_, bra, ket) = &phi.terms[0];
        wick_field_density(bra, ket, n)
    }
}

/// `(k^{2−β}/2) ∫|q|^{β−1}|h|² / ∫|h|²` for the `φ₊` witness, by radial quadrature.
pub fn phi1_closed_form(s: usize, energy: f64, k: usize, beta: f64) -> f64 {
    let h2 = |r: f64| {
        let x = [r];
        mollifier(&x, energy).powi(2)
    };
    let shell = |r: f64, a: f64| r.powf(a + s as f64 - 1.0) * h2(r);
    let num = gauss_legendre_composite(|r| shell(r, beta - 1.0), 0.0, energy, 400, 12);
    let den = gauss_legendre_composite(|r| shell(r, 0.0), 0.0, energy, 400, 12);
    (k as f64).powf(2.0 - beta) / 2.0 * num / den
}

/// Surface area of the unit sphere in `ℝ^s`.
pub fn sphere_area(s: usize) -> f64 {
    2.0 * PI.powf(s as f64 / 2.0) / gamma_fn(s as f64 / 2.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDensityScan {
    pub witness: String,
    pub field_power: usize,
    pub ks: Vec<usize>,
    pub betas: Vec<f64>,
    /// `values[i][j]`: density at `betas[i]` for witness `ks[j]`.
    pub values: Vec<Vec<f64>>,
    pub slopes: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderEstimate {
    pub scan: SpectralDensityScan,
    /// Largest scanned β whose slope exceeds the threshold, and the smallest
    /// larger β whose slope is below minus the threshold.
    pub bracket: (f64, f64),
    /// Interpolated zero of the fitted slope.
    pub estimate: f64,
    /// Smallest scanned β from which every larger scanned β is bounded.
    pub bounded_from: Option<f64>,
}

/// `k!/((k−d)! k^d)`, increasing to 1 in `k`.
pub fn occupation_factor(k: usize, d: usize) -> f64 {
    (0..d).map(|j| (k - j) as f64 / k as f64).product()
}

/// Densities per witness and β. Slopes are fitted after dividing out
/// `occupation_factor`, so they are the large-k growth exponents.
pub fn density_scan(witness: &Witness, n: usize, ks: &[usize], betas: &[f64]) -> Result<SpectralDensityScan> {
    if ks.len() < 3 {
        return Err(Error::Numeric(format!("witness range of {} indices is too short for a slope fit", ks.len())));
    }
    let dens: Vec<_> = ks.iter().map(|&k| witness.density(k, n)).collect::<Result<_>>()?;
    let kf: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let occupation: Vec<f64> = ks.iter().map(|&k| occupation_factor(k, witness.drop)).collect();
    let mut values = Vec::with_capacity(betas.len());
    let mut slopes = Vec::with_capacity(betas.len());
    for &b in betas {
        let row: Vec<f64> = dens.iter().map(|(lat, v)| spectral_density_of(lat, v, b)).collect();
        let scaled: Vec<f64> = row.iter().zip(&occupation).map(|(v, o)| v / o).collect();
        slopes.push(power_law_fit(&kf, &scaled, 1e-300)?.slope);
        values.push(row);
    }
    Ok(SpectralDensityScan {
        witness: witness.label(),
        field_power: n,
        ks: ks.to_vec(),
        betas: betas.to_vec(),
        values,
        slopes,
    })
}

/// Infrared order of `:φ₊ⁿ:` seen by a witness family, bracketed on the β scan.
pub fn estimate_order(witness: &Witness, n: usize, ks: &[usize], betas: &[f64]) -> Result<OrderEstimate> {
    let scan = density_scan(witness, n, ks, betas)?;
    let (b, sl) = (&scan.betas, &scan.slopes);
    let lo_idx = (0..b.len()).rev().find(|&i| sl[i] > SLOPE_THRESHOLD);
    let start = lo_idx.map_or(0, |i| i + 1);
    let hi_idx = (start..b.len())
        .find(|&i| sl[i] < -SLOPE_THRESHOLD)
        .ok_or_else(|| Error::Numeric("β scan never reaches a decaying slope".into()))?;
    let lo = lo_idx.map_or(b[0], |i| b[i]);
    let hi = b[hi_idx];
    let from = lo_idx.unwrap_or(0);
    let mut estimate = lo;
    for i in from..hi_idx {
        if sl[i] >= 0.0 && sl[i + 1] <= 0.0 {
            estimate = if sl[i] == sl[i + 1] { b[i] } else { b[i] + (b[i + 1] - b[i]) * sl[i] / (sl[i] - sl[i + 1]) };
            break;
        }
    }
    if lo_idx.is_none() && sl[0] <= 0.0 {
        estimate = b[0];
    }
    let bounded_from = (0..b.len()).find(|&i| sl[i..].iter().all(|&x| x <= SLOPE_THRESHOLD)).map(|i| b[i]);
    Ok(OrderEstimate { scan, bracket: (lo, hi), estimate, bounded_from })
}

/// `0, step, 2·step, …` up to `hi` inclusive.
pub fn beta_grid(hi: f64, step: f64) -> Vec<f64> {
    let n = (hi / step + 1e-9).floor() as usize;
    (0..=n).map(|i| i as f64 * step).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Wick2Check {
    pub threshold: f64,
    pub condition: bool,
    pub margin: f64,
    /// Fitted growth slope of the witness family `⟨H_k^{⊗(k−n)}|·H_k^{⊗k}⟩`, if computed.
    pub witness_slope: Option<f64>,
}

/// `β > 2 − (s−2)(n−1)`.
pub fn wick2_threshold(n: usize, s: usize, beta: f64) -> Result<Wick2Check> {
    if n < 2 || s < 3 {
        return Err(Error::Param(format!("need n ≥ 2 and s ≥ 3, got n = {n}, s = {s}")));
    }
    let threshold = 2.0 - (s as f64 - 2.0) * (n as f64 - 1.0);
    Ok(Wick2Check { threshold, condition: beta > threshold, margin: beta - threshold, witness_slope: None })
}

/// The threshold check plus the fitted density growth over witnesses that drop
/// `n` particles, which stays bounded (slope ≤ threshold) when the condition holds.
pub fn wick2_threshold_check(n: usize, s: usize, beta: f64, n_per_axis: usize, ks: &[usize]) -> Result<Wick2Check> {
    let mut out = wick2_threshold(n, s, beta)?;
    let w = Witness { s, energy: 1.0, n_per_axis, drop: n };
    let scan = density_scan(&w, n, ks, &[beta])?;
    out.witness_slope = Some(scan.slopes[0]);
    Ok(out)
}

/// `(∫|p|²|⟨Ψ₁|φ̃₊(p)Ψ₂⟩|², 2E)` for normalised `Ψ₁, Ψ₂` of energy ≤ E.
pub fn phi_plus_energy_bound(bra: &FockState, ket: &FockState, energy: f64) -> Result<(f64, f64)> {
    let phi = FiniteRankFunctional::rank_one(bra.clone(), ket.clone(), energy)?;
    Ok((spectral_density(&phi, 1, 2.0)?, 2.0 * energy))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_density_vanishes() {
        let g = MomentumGrid::new(3, 0.0, 1.0, 8).unwrap();
        let sp = FockSpace::new(ModeBasis::cell_indicators(&g, &[10, 100]).unwrap(), 2).unwrap();
        let phi = FiniteRankFunctional::vacuum(&sp);
        for n in 1..=2 {
            for b in [0.0, 1.0, 2.5] {
                assert_eq!(spectral_density(&phi, n, b).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn phi1_matches_closed_form() {
        let w = Witness::phi1(3, 1.0, 32);
        for eps in [0.2, 0.5] {
            for k in [8, 16] {
                let b = 2.0 - eps;
                let got = spectral_density(&w.functional(k).unwrap(), 1, b).unwrap();
                let want = phi1_closed_form(3, 1.0, k, b);
                assert!((got / want - 1.0).abs() < 0.02, "ε={eps} k={k}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn wick2_thresholds() {
        assert!(wick2_threshold(3, 3, 0.1).unwrap().condition);
        assert!(!wick2_threshold(2, 3, 0.9).unwrap().condition);
        assert!(wick2_threshold(2, 5, 0.0).unwrap().condition);
        assert!(wick2_threshold(1, 3, 0.0).is_err());
    }

    #[test]
    fn short_witness_range_is_rejected() {
        let w = Witness::phi1(1, 1.0, 16);
        assert!(matches!(estimate_order(&w, 1, &[4, 8], &[0.0, 1.0]), Err(Error::Numeric(_))));
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-12);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-12);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-12);
    }
}
