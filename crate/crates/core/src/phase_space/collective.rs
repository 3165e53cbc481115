use std::sync::Arc;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{restricted_matrix, within_energy, FockSpace, FockState};
use crate::single_particle::{correlation, SPVector};

/// Points `x_k = (x⁰, x⃗)` in `ℝ^{s+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NPointConfig {
    pub points: Vec<Vec<f64>>,
}

impl NPointConfig {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::Param("configuration needs at least one point".into()));
        };
        let d = first.len();
        if d < 2 || points.iter().any(|p| p.len() != d) {
            return Err(Error::Param("points must share a dimension s+1 ≥ 2".into()));
        }
        Ok(Self { points })
    }

    /// `N` equal-time points spaced `spacing` apart along the first axis.
    pub fn spatial_line(n: usize, s: usize, spacing: f64) -> Result<Self> {
        Self::new(
            (0..n)
                .map(|k| {
                    let mut p = vec![0.0; s + 1];
                    p[1] = k as f64 * spacing;
                    p
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    pub fn space_dim(&self) -> usize {
        self.points[0].len() - 1
    }

    /// `δ(x) = min_{i≠j} (|x⃗ᵢ−x⃗ⱼ| − |xᵢ⁰−xⱼ⁰|)`; `+∞` for a single point.
    pub fn delta(&self) -> f64 {
        let mut d = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                let dx = a[1..].iter().zip(&b[1..]).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
                d = d.min(dx - (a[0] - b[0]).abs());
            }
        }
        d
    }

    pub fn in_gamma(&self, delta: f64) -> bool {
        self.delta() > delta
    }
}

/// `sup_{i≠j} |⟨g|U(xᵢ−xⱼ)g⟩|` (0 for a single point).
pub fn pair_correlation_sup(g: &SPVector, config: &NPointConfig) -> f64 {
    let mut best: f64 = 0.0;
    for (i, a) in config.points.iter().enumerate() {
        for (j, b) in config.points.iter().enumerate() {
            if i != j {
                let dx: Vec<f64> = a[1..].iter().zip(&b[1..]).map(|(u, v)| u - v).collect();
                best = best.max(correlation(g, a[0] - b[0], &dx).norm());
            }
        }
    }
    best
}

/// `E · sup_{ω≤E}|h|² · {‖g‖² + (N−1) sup_{i≠j}|⟨g|U(xᵢ−xⱼ)g⟩|}`.
pub fn collective_majorant(g: &SPVector, h: &SPVector, energy: f64, config: &NPointConfig) -> f64 {
    let grid = &g.grid;
    let sup_h = (0..grid.len())
        .filter(|&i| grid.omega(i) <= energy)
        .map(|i| h.amps[i].norm_sqr())
        .fold(0.0, f64::max);
    energy * sup_h * (g.norm_sqr() + (config.len() as f64 - 1.0) * pair_correlation_sup(g, config))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollectiveReport {
    /// `max_ψ (Σ_k ⟨ψ|S_kψ⟩²)^{1/2}` over the normalised battery.
    pub functional_norm: f64,
    /// `‖P_E Σ_k S_k P_E‖`.
    pub operator_norm: f64,
    pub majorant: f64,
}

/// `S_k = (a*(f)a(f))(x_k)` with `f = h ω^{1/2} g`, compared with the majorant.
pub fn collective_norm(
    space: &Arc<FockSpace>,
    g: &SPVector,
    h: &SPVector,
    config: &NPointConfig,
    battery: &[FockState],
    energy: f64,
) -> Result<CollectiveReport> {
    if config.space_dim() != g.grid.dim() {
        return Err(Error::Param("configuration dimension differs from the grid".into()));
    }
    if config.delta() < 0.0 {
        return Err(Error::Precondition(format!("δ = {} < 0", config.delta())));
    }
    let f = SPVector {
        grid: g.grid.clone(),
        amps: g.amps.iter().zip(&h.amps).zip(g.grid.omegas()).map(|((a, b), w)| a * b * w.sqrt()).collect(),
    };
    let coeffs: Vec<Vec<Complex64>> = config
        .points
        .iter()
        .map(|x| space.basis.coefficients(&f.translate(x[0], &x[1..])))
        .collect::<Result<_>>()?;
    let apply_k = |k: usize, v: &FockState| -> FockState { v.annihilate_coeffs(&coeffs[k]).create_coeffs(&coeffs[k]).0 };

    let (_, q) = restricted_matrix(space, energy, |v| {
        let mut out = FockState::zero(space);
        for k in 0..coeffs.len() {
            out.axpy(Complex64::new(1.0, 0.0), &apply_k(k, v));
        }
        out
    });
    let operator_norm = if q.is_empty() {
        0.0
    } else {
        let herm = (&q + q.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(herm).eigenvalues.iter().cloned().fold(0.0, f64::max)
    };

    let mut functional_norm: f64 = 0.0;
    for psi in battery {
        if !within_energy(psi.max_energy(), energy) {
            return Err(Error::Precondition("battery state above the energy bound".into()));
        }
        let n2 = psi.norm_sqr();
        if n2 == 0.0 {
            continue;
        }
        let s: f64 = (0..coeffs.len()).map(|k| (psi.inner(&apply_k(k, psi)) / n2).norm_sqr()).sum();
        functional_norm = functional_norm.max(s.sqrt());
    }
    Ok(CollectiveReport { functional_norm, operator_norm, majorant: collective_majorant(g, h, energy, config) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ModeBasis;
    use crate::single_particle::MomentumGrid;

    const CELLS: [usize; 4] = [5, 7, 8, 10];

    fn setup() -> (Arc<FockSpace>, SPVector, SPVector, Vec<FockState>) {
        let grid = MomentumGrid::new(1, 1.0, 3.0, 16).unwrap();
        let sp = FockSpace::new(ModeBasis::cell_indicators(&grid, &CELLS).unwrap(), 3).unwrap();
        let mut g = SPVector::zeros(&grid);
        let mut h = SPVector::zeros(&grid);
        for (k, &c) in CELLS.iter().enumerate() {
            g.amps[c] = Complex64::new(0.4 + 0.1 * k as f64, 0.2 - 0.15 * k as f64);
            h.amps[c] = Complex64::new(1.0 - 0.1 * k as f64, 0.0);
        }
        let battery = (0..sp.dim())
            .filter(|&i| sp.energy(i) <= 3.0)
            .map(|i| {
                let mut v = FockState::zero(&sp);
                v.amps[i] = Complex64::new(1.0, 0.0);
                if i > 0 {
                    v.amps[0] = Complex64::new(0.3, 0.4);
                }
                v
            })
            .collect();
        (sp, g, h, battery)
    }

    #[test]
    fn delta_from_points() {
        let c = NPointConfig::new(vec![vec![0.0, 0.0], vec![1.0, 3.0], vec![0.0, -2.0]]).unwrap();
        assert!((c.delta() - 2.0).abs() < 1e-15);
        assert!(c.in_gamma(1.5) && !c.in_gamma(2.0));
        assert_eq!(NPointConfig::spatial_line(1, 1, 1.0).unwrap().delta(), f64::INFINITY);
    }

    #[test]
    fn one_point_and_coincident_points() {
        let (sp, g, h, bat) = setup();
        let one = collective_norm(&sp, &g, &h, &NPointConfig::spatial_line(1, 1, 0.0).unwrap(), &bat, 3.0).unwrap();
        let four = collective_norm(&sp, &g, &h, &NPointConfig::spatial_line(4, 1, 0.0).unwrap(), &bat, 3.0).unwrap();
        assert!((four.functional_norm.powi(2) - 4.0 * one.functional_norm.powi(2)).abs() < 1e-12);
        assert!((four.operator_norm - 4.0 * one.operator_norm).abs() < 1e-10);
    }

    #[test]
    fn majorant_dominates() {
        let (sp, g, h, bat) = setup();
        for n in [1, 2, 4, 8] {
            for spacing in [0.0, 1.0, 4.0, 16.0] {
                let c = NPointConfig::spatial_line(n, 1, spacing).unwrap();
                let r = collective_norm(&sp, &g, &h, &c, &bat, 3.0).unwrap();
                assert!(r.operator_norm <= r.majorant * (1.0 + 1e-12), "N={n} d={spacing}: {} > {}", r.operator_norm, r.majorant);
                assert!(r.functional_norm <= r.operator_norm * (n as f64).sqrt() + 1e-12);
            }
        }
    }
}
