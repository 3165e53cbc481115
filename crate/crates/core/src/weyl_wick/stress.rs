use num_complex::Complex64;

use super::functional::FiniteRankFunctional;
use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::single_particle::SPVector;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StressEnergy {
    /// `Σ_x Δx^s φ(T⁰⁰(x))` over the configuration lattice dual to the grid.
    pub lhs: Complex64,
    /// `φ(H)`.
    pub rhs: Complex64,
}

/// Spatial integral of `φ(T⁰⁰(x))`, `T⁰⁰ = ½:φ₋²: + ½Σ_j:(∂_jφ₊)²: + ½m²:φ₊²:`.
///
/// Each field component is `Σ_j u_j(x) a*_j + v_j(x) a_j` with
/// `u_j = (2π)^{−s/2}Σ_p w e^{−ipx} conj(e_j(p)) c(p)` and
/// `v_j = (2π)^{−s/2}Σ_p w e^{ipx} e_j(p) d(p)`; on the dual lattice the
/// x-sum reproduces the momentum delta exactly.
pub fn stress_energy_integral(phi: &FiniteRankFunctional) -> Result<StressEnergy> {
    let Some((_, _, first)) = phi.terms.first() else {
        return Ok(StressEnergy { lhs: Complex64::new(0.0, 0.0), rhs: Complex64::new(0.0, 0.0) });
    };
    let sp = first.space.clone();
    let basis = &sp.basis;
    let grid = &basis.grid;
    let m = grid.mass();
    if m <= 0.0 {
        return Err(Error::Unsupported("stress-energy integral needs a massive grid".into()));
    }
    let s = grid.dim();
    let d = basis.dim();
    let i1 = Complex64::new(0.0, 1.0);

    type Coef = Box<dyn Fn(&[f64], f64) -> (Complex64, Complex64)>;
    let mut comps: Vec<Coef> = Vec::new();
    comps.push(Box::new(move |_, w| {
        let a = (w / 2.0).sqrt();
        (i1 * a, -i1 * a)
    }));
    for axis in 0..s {
        comps.push(Box::new(move |p: &[f64], w| {
            let a = p[axis] / (2.0 * w).sqrt();
            (-i1 * a, i1 * a)
        }));
    }
    comps.push(Box::new(move |_, w| {
        let a = m / (2.0 * w).sqrt();
        (Complex64::new(a, 0.0), Complex64::new(a, 0.0))
    }));

    let unit = |j: usize| -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[j] = Complex64::new(1.0, 0.0);
        v
    };
    let mut cre_cre = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    let mut cre_ann = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    let mut ann_ann = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for (c, bra, ket) in &phi.terms {
        let a_bra: Vec<FockState> = (0..d).map(|j| bra.annihilate_coeffs(&unit(j))).collect();
        let a_ket: Vec<FockState> = (0..d).map(|j| ket.annihilate_coeffs(&unit(j))).collect();
        for j in 0..d {
            for k in 0..d {
                cre_cre[j][k] += c * a_bra[k].annihilate_coeffs(&unit(j)).inner(ket);
                cre_ann[j][k] += c * a_bra[j].inner(&a_ket[k]);
                ann_ann[j][k] += c * bra.inner(&a_ket[k].annihilate_coeffs(&unit(j)));
            }
        }
    }

    let lat = grid.config_lattice(1);
    let dv = lat.cell_volume();
    let mut lhs = Complex64::new(0.0, 0.0);
    for coef in &comps {
        let mut u = Vec::with_capacity(d);
        let mut v = Vec::with_capacity(d);
        for e in &basis.modes {
            let cu = SPVector::from_fn(grid, |p, w| coef(p, w).0.conj());
            let dv_ = SPVector::from_fn(grid, |p, w| coef(p, w).1);
            let prod_u = SPVector { grid: grid.clone(), amps: e.amps.iter().zip(&cu.amps).map(|(a, b)| a * b).collect() };
            let prod_v = SPVector { grid: grid.clone(), amps: e.amps.iter().zip(&dv_.amps).map(|(a, b)| a * b).collect() };
            let (_, xu) = prod_u.to_config(1);
            let (_, xv) = prod_v.to_config(1);
            u.push(xu.into_iter().map(|z| z.conj()).collect::<Vec<_>>());
            v.push(xv);
        }
        let mut part = Complex64::new(0.0, 0.0);
        for j in 0..d {
            for k in 0..d {
                let uu: Complex64 = u[j].iter().zip(&u[k]).map(|(a, b)| a * b).sum();
                let uv: Complex64 = u[j].iter().zip(&v[k]).map(|(a, b)| a * b).sum();
                let vv: Complex64 = v[j].iter().zip(&v[k]).map(|(a, b)| a * b).sum();
                part += uu * cre_cre[j][k] + 2.0 * uv * cre_ann[j][k] + vv * ann_ann[j][k];
            }
        }
        lhs += 0.5 * part * dv;
    }
    let rhs = phi.eval(|k| k.apply_hamiltonian());
    Ok(StressEnergy { lhs, rhs })
}
