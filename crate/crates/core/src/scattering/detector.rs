use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::single_particle::SPVector;
use crate::weyl_wick::FiniteRankFunctional;

#[derive(Clone, Debug, PartialEq)]
pub struct DetectorReport {
    pub times: Vec<f64>,
    /// `σ^(t) = Σ_x dv φ(α_{t,x}(B*B))` for `B = a(g)`.
    pub values: Vec<Complex64>,
    /// `‖φ‖ · L^s max_{ω≤E}|c_j|² · E/m`, from `Σ_x dv α_x(B*B) = L^s Σ_j |c_j|² a*_j a_j`
    /// and `N ≤ E/m` on `P_E`.
    pub majorant: f64,
}

/// Sums the translated detector `a*(U(t,x)g)a(U(t,x)g)` over the dual lattice.
pub fn detector_integral(phi: &FiniteRankFunctional, g: &SPVector, times: &[f64]) -> Result<DetectorReport> {
    let Some((_, first, _)) = phi.terms.first() else {
        return Ok(DetectorReport { times: times.to_vec(), values: vec![Complex64::new(0.0, 0.0); times.len()], majorant: 0.0 });
    };
    let space = first.space.clone();
    let basis = &space.basis;
    let grid = &basis.grid;
    let m = grid.mass();
    if m <= 0.0 {
        return Err(Error::Unsupported("detector majorant needs m > 0".into()));
    }
    let c = basis.coefficients(g)?;
    let lat = grid.config_lattice(1);
    let dv = lat.cell_volume();
    let period_vol = dv * lat.len() as f64;
    let mut x = vec![0.0; grid.dim()];
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..lat.len() {
            lat.point(i, &mut x);
            let u = basis.coefficients(&g.translate(t, &x))?;
            total += phi.eval_form(|bra, ket| bra.annihilate_coeffs(&u).inner(&ket.annihilate_coeffs(&u))) * dv;
        }
        values.push(total);
    }
    let e = phi.energy;
    let sup_c = (0..c.len()).filter(|&j| basis.energies[j] <= e).map(|j| c[j].norm_sqr()).fold(0.0, f64::max);
    let majorant = phi.norm_bound() * period_vol * sup_c * (e / m);
    Ok(DetectorReport { times: times.to_vec(), values, majorant })
}
