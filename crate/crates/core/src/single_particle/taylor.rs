use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::grid::{chi_energy, mollifier, MomentumGrid, SPVector};
use crate::error::{Error, Result};
use crate::multiindex::{factorial_f64, MultiIndex};

/// Dense s-indices with `|κ| ≤ k_max`, ordered by total order first.
pub fn s_indices(s: usize, k_max: usize) -> Vec<Vec<u32>> {
    (0..=k_max).flat_map(|k| MultiIndex::enumerate_of_length(k, s).into_iter().map(move |m| m.to_dense(s))).collect()
}

pub fn kappa_factorial(kappa: &[u32]) -> f64 {
    kappa.iter().map(|&k| factorial_f64(k as usize)).product()
}

/// `FT(x^κ χ(O_r))` on the grid, for every κ in `kappas`.
pub fn localized_monomials(grid: &Arc<MomentumGrid>, r: f64, kappas: &[Vec<u32>]) -> Result<Vec<SPVector>> {
    let lat = grid.config_lattice(4);
    if lat.coord(lat.points - 1) < r {
        return Err(Error::Config(format!(
            "configuration box half-width {:.3} does not contain the ball of radius {r}",
            lat.coord(lat.points - 1)
        )));
    }
    let mut x = vec![0.0; grid.dim()];
    let chi: Vec<f64> = (0..lat.len())
        .map(|i| {
            lat.point(i, &mut x);
            mollifier(&x, r)
        })
        .collect();
    Ok(kappas
        .iter()
        .map(|kappa| {
            let samples = (0..lat.len())
                .map(|i| {
                    if chi[i] == 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    lat.point(i, &mut x);
                    let mono: f64 = x.iter().zip(kappa).map(|(v, &k)| v.powi(k as i32)).product();
                    Complex64::new(mono * chi[i], 0.0)
                })
                .collect();
            SPVector::from_config_samples(grid, &lat, samples)
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct TaylorVectors {
    pub kappas: Vec<Vec<u32>>,
    pub b_plus: Vec<SPVector>,
    pub b_minus: Vec<SPVector>,
    pub h_plus: Vec<SPVector>,
    pub h_minus: Vec<SPVector>,
}

/// `b̃±_{κ,r} = (2π)^{−s/2} ω^{±1/2} FT(x^κχ(O_r))/κ!` and
/// `h̃±_{κ,E} = (−1)^{|κ|} ω^{∓1/2} (ip)^κ χ_E`.
pub fn taylor_vectors(grid: &Arc<MomentumGrid>, r: f64, energy: f64, k_max: usize) -> Result<TaylorVectors> {
    if !(r > 0.0) || !(energy > 0.0) {
        return Err(Error::Param(format!("need r > 0 and E > 0, got r={r}, E={energy}")));
    }
    if grid.omegas().contains(&0.0) {
        return Err(Error::Config("grid samples ω = 0".into()));
    }
    let s = grid.dim();
    let kappas = s_indices(s, k_max);
    let mono = localized_monomials(grid, r, &kappas)?;
    let pref = (2.0 * PI).powf(-(s as f64) / 2.0);
    let mut b_plus = Vec::new();
    let mut b_minus = Vec::new();
    let mut h_plus = Vec::new();
    let mut h_minus = Vec::new();
    let m = grid.mass();
    for (kappa, ft) in kappas.iter().zip(&mono) {
        let c = pref / kappa_factorial(kappa);
        b_plus.push(ft.mul_fn(|_, w| c * w.sqrt()));
        b_minus.push(ft.mul_fn(|_, w| c / w.sqrt()));
        let order: u32 = kappa.iter().sum();
        let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
        let base = SPVector::from_fn(grid, |p, w| {
            let mut v = Complex64::new(sign * chi_energy(w, energy, m), 0.0);
            for (pa, &k) in p.iter().zip(kappa) {
                v *= Complex64::new(0.0, *pa).powu(k);
            }
            v
        });
        h_plus.push(base.mul_fn(|_, w| 1.0 / w.sqrt()));
        h_minus.push(base.mul_fn(|_, w| w.sqrt()));
    }
    Ok(TaylorVectors { kappas, b_plus, b_minus, h_plus, h_minus })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_listing() {
        let k = s_indices(2, 2);
        assert_eq!(k, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(kappa_factorial(&[2, 3]), 12.0);
    }

    #[test]
    fn zeroth_vectors_are_real_even_and_j_invariant() {
        let g = MomentumGrid::new(1, 1.0, 8.0, 64).unwrap();
        let tv = taylor_vectors(&g, 1.0, 2.0, 4).unwrap();
        let b0 = &tv.b_minus[0];
        for i in 0..g.len() {
            assert!(b0.amps[i].im.abs() < 1e-12 * b0.amps[i].norm().max(1e-3));
            assert!((b0.amps[i] - b0.amps[g.neg_index(i)]).norm() < 1e-13);
        }
        for v in tv.b_plus.iter().chain(&tv.b_minus).chain(&tv.h_plus).chain(&tv.h_minus) {
            assert!(v.j_defect() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = MomentumGrid::new(1, 1.0, 8.0, 64).unwrap();
        assert!(taylor_vectors(&g, 0.0, 2.0, 1).is_err());
        assert!(taylor_vectors(&g, 100.0, 2.0, 1).is_err());
    }
}
