use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::grid::{MomentumGrid, SPVector};
use crate::error::{Error, Result};
use crate::fit::power_law_fit;
use crate::quadrature::gauss_legendre_composite;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TranslationReport {
    /// `∫ d^sx |⟨Φ|U(x)Ψ⟩|²`.
    pub integral: f64,
    /// `|K| ‖Φ‖² ‖Ψ‖²`.
    pub bound: f64,
    pub ratio: f64,
}

/// Square-integrability of translates for `Ψ` supported in the box
/// `∏[−b_a, b_a]`. `psi` is sampled on the dual configuration lattice and
/// must vanish outside the box.
pub fn qm_translation_check<F>(phi: &SPVector, psi: F, box_half: &[f64]) -> Result<TranslationReport>
where
    F: Fn(&[f64]) -> Complex64,
{
    let grid = &phi.grid;
    if box_half.len() != grid.dim() {
        return Err(Error::Param("box dimension mismatch".into()));
    }
    let lat = grid.config_lattice(2);
    let mut x = vec![0.0; grid.dim()];
    let mut scale = 0.0f64;
    let mut outside = 0.0f64;
    let samples: Vec<Complex64> = (0..lat.len())
        .map(|i| {
            lat.point(i, &mut x);
            let v = psi(&x);
            scale = scale.max(v.norm());
            if x.iter().zip(box_half).any(|(c, b)| c.abs() > *b) {
                outside = outside.max(v.norm());
            }
            v
        })
        .collect();
    if outside > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Precondition(format!("Ψ has mass {outside:e} outside the declared box")));
    }
    let psi_t = SPVector::from_config_samples(grid, &lat, samples);
    let integral = (2.0 * PI).powi(grid.dim() as i32)
        * phi.amps.iter().zip(&psi_t.amps).map(|(a, b)| a.norm_sqr() * b.norm_sqr()).sum::<f64>()
        * grid.cell_weight();
    let volume: f64 = box_half.iter().map(|b| 2.0 * b).product();
    let bound = volume * phi.norm_sqr() * psi_t.norm_sqr();
    Ok(TranslationReport { integral, bound, ratio: if bound > 0.0 { integral / bound } else { 0.0 } })
}

/// `Γ(z)` via the Lanczos approximation (g = 7, n = 9).
pub fn gamma_fn(z: f64) -> f64 {
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z < 0.5 {
        return PI / ((PI * z).sin() * gamma_fn(1.0 - z));
    }
    let z = z - 1.0;
    let mut a = C[0];
    let t = z + 7.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
}

#[derive(Clone, Debug)]
pub struct WitnessGrowth {
    pub radii: Vec<f64>,
    pub truncated: Vec<f64>,
    pub exponent: f64,
}

/// Truncated `∫_{|x|≤R} |⟨Φ|U(x)Ψ⟩|^k d^sx` for the divergence witness
/// `Φ̃ = χ̃/|p|^{(s−δ)/2}`, `Ψ̃ = χ̃`, evaluated on the pointwise lower bound
/// `(2π)^{−s/2} c_δ (∫χ)² / (|x| + 2ρ)^{(s+δ)/2}` with `χ` supported in the
/// ball of radius `ρ`; `chi_mass = ∫χ`.
pub fn divergence_witness_growth(s: usize, delta: f64, k: f64, rho: f64, chi_mass: f64, radii: &[f64]) -> Result<WitnessGrowth> {
    if !(delta > 0.0 && delta < s as f64) || !(k > 0.0 && k < 2.0) {
        return Err(Error::Param(format!("need 0<δ<s and 0<k<2, got δ={delta}, k={k}")));
    }
    let sf = s as f64;
    let c_delta = 2f64.powf(delta / 2.0) * gamma_fn((sf + delta) / 4.0) / gamma_fn((sf - delta) / 4.0);
    let sphere = 2.0 * PI.powf(sf / 2.0) / gamma_fn(sf / 2.0);
    let amp = (2.0 * PI).powf(-sf / 2.0) * c_delta * chi_mass * chi_mass;
    let integrand = |r: f64| sphere * r.powf(sf - 1.0) * (amp / (r + 2.0 * rho).powf((sf + delta) / 2.0)).powf(k);
    let truncated: Vec<f64> = radii
        .iter()
        .map(|&big_r| gauss_legendre_composite(integrand, 0.0, big_r, 64.max((big_r as usize) / 4), 16))
        .collect();
    let fit = power_law_fit(radii, &truncated, 0.0)?;
    Ok(WitnessGrowth { radii: radii.to_vec(), truncated, exponent: fit.slope })
}

/// Helper for tests and experiments: Φ orthogonal to all translates of Ψ
/// when their momentum supports are disjoint.
pub fn disjoint_support_pair(grid: &Arc<MomentumGrid>, split: f64) -> (SPVector, SPVector) {
    let a = SPVector::from_fn(grid, |p, _| Complex64::new(if p[0].abs() < split { 1.0 } else { 0.0 }, 0.0));
    let b = SPVector::from_fn(grid, |p, _| Complex64::new(if p[0].abs() >= split { 1.0 } else { 0.0 }, 0.0));
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert!((gamma_fn(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma_fn(0.5) - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn box_indicator_obeys_bound() {
        let g = MomentumGrid::new(1, 1.0, 16.0, 128).unwrap();
        let box_half = [1.0];
        let psi = |x: &[f64]| Complex64::new(if x[0].abs() <= 1.0 { 1.0 } else { 0.0 }, 0.0);
        let lat = g.config_lattice(2);
        let mut x = [0.0];
        let samples: Vec<Complex64> = (0..lat.len())
            .map(|i| {
                lat.point(i, &mut x);
                psi(&x)
            })
            .collect();
        let phi = SPVector::from_config_samples(&g, &lat, samples);
        let phi = phi.scale_real(1.0 / phi.norm());
        let rep = qm_translation_check(&phi, psi, &box_half).unwrap();
        assert!(rep.ratio <= 1.0, "{rep:?}");
        assert!(rep.ratio > 0.1);
    }

    #[test]
    fn support_violation_is_reported() {
        let g = MomentumGrid::new(1, 1.0, 4.0, 32).unwrap();
        let phi = SPVector::from_fn(&g, |_, _| Complex64::new(1.0, 0.0));
        let psi = |x: &[f64]| Complex64::new((-x[0] * x[0]).exp(), 0.0);
        assert!(matches!(qm_translation_check(&phi, psi, &[0.5]), Err(Error::Precondition(_))));
    }

    #[test]
    fn disjoint_supports_give_zero() {
        let g = MomentumGrid::new(1, 1.0, 4.0, 32).unwrap();
        let (a, _) = disjoint_support_pair(&g, 1.0);
        let psi = |x: &[f64]| Complex64::new((1.0 - x[0] * x[0]).max(0.0).powi(3), 0.0);
        // Φ supported where |p| ≥ 1 only after masking out low momenta
        let phi = a.mul_fn(|p, _| if p[0].abs() >= 1.0 { 1.0 } else { 0.0 });
        let rep = qm_translation_check(&phi, psi, &[1.0]).unwrap();
        assert_eq!(rep.integral, 0.0);
    }

    #[test]
    fn witness_integral_grows() {
        let radii = [50.0, 100.0, 200.0, 400.0, 800.0];
        let w = divergence_witness_growth(3, 0.2, 1.0, 1.0, 1.0, &radii).unwrap();
        assert!(w.exponent > 0.0);
        assert!((w.exponent - 1.4).abs() < 0.1, "{}", w.exponent);
    }
}
