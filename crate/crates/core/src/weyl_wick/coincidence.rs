use num_complex::Complex64;

use super::functional::FiniteRankFunctional;
use super::weyl::{exp_annihilate, weyl_apply_coeffs};
use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::single_particle::SPVector;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coincidence {
    /// Route (i): truncated product of centred Weyl operators.
    pub direct: Complex64,
    /// Route (ii): partition sum with correlation factors.
    pub partition: Complex64,
    pub discrepancy: f64,
    /// `S = Σ (−1)^{|R₂|} φ(:W(Σ_{R₁} g):)`.
    pub residual_sum: Complex64,
    /// Route (ii) minus `e^{−Σ‖g‖²/2} S`.
    pub correlation_part: Complex64,
    /// Bound on the truncation error of route (i).
    pub leak_bound: f64,
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `φ(:W(g):) = Σ c ⟨e^{−ia(g)} bra | e^{ia(g)} ket⟩`.
pub fn normal_ordered_weyl(phi: &FiniteRankFunctional, g: &[Complex64]) -> Complex64 {
    let minus_i_g: Vec<Complex64> = g.iter().map(|x| -I * x).collect();
    let i_g: Vec<Complex64> = g.iter().map(|x| I * x).collect();
    phi.terms
        .iter()
        .map(|(c, bra, ket)| c * exp_annihilate(bra, &i_g).inner(&exp_annihilate(ket, &minus_i_g)))
        .sum()
}

fn coeff_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `φ((W(f₁,x₁) − ω₀(W(f₁)))⋯(W(f_N,x_N) − ω₀(W(f_N))))` evaluated two ways.
pub fn coincidence_form(phi: &FiniteRankFunctional, fs: &[SPVector], xs: &[Vec<f64>]) -> Result<Coincidence> {
    if fs.len() != xs.len() || fs.is_empty() {
        return Err(Error::Param("need one translation per test function and N ≥ 1".into()));
    }
    let n = fs.len();
    if n > 20 {
        return Err(Error::Param(format!("N = {n} too large for the partition sum")));
    }
    let Some((_, _, first)) = phi.terms.first() else {
        let z = Complex64::new(0.0, 0.0);
        return Ok(Coincidence { direct: z, partition: z, discrepancy: 0.0, residual_sum: z, correlation_part: z, leak_bound: 0.0 });
    };
    let basis = &first.space.basis;
    let gs: Vec<Vec<Complex64>> =
        fs.iter().zip(xs).map(|(f, x)| basis.coefficients(&f.translate(0.0, x))).collect::<Result<_>>()?;
    let norms: Vec<f64> = gs.iter().map(|g| coeff_inner(g, g).re).collect();
    let vac: Vec<f64> = norms.iter().map(|n2| (-0.5 * n2).exp()).collect();

    let mut direct = Complex64::new(0.0, 0.0);
    let mut leak_bound = 0.0;
    for (c, bra, ket) in &phi.terms {
        let mut v: FockState = ket.clone();
        let mut growth = 1.0;
        for k in (0..n).rev() {
            let w = weyl_apply_coeffs(&gs[k], &v);
            leak_bound += c.norm() * bra.norm() * w.leak_bound * growth;
            let mut next = w.state;
            next.axpy(Complex64::new(-vac[k], 0.0), &v);
            v = next;
            growth *= 1.0 + vac[k];
        }
        direct += c * bra.inner(&v);
    }

    let total_norm: f64 = norms.iter().sum();
    let mut partition = Complex64::new(0.0, 0.0);
    let mut residual = Complex64::new(0.0, 0.0);
    for mask in 0u32..(1 << n) {
        let r1: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
        let sign = if (n - r1.len()) % 2 == 0 { 1.0 } else { -1.0 };
        let mut sum = vec![Complex64::new(0.0, 0.0); basis.dim()];
        let mut corr = Complex64::new(0.0, 0.0);
        for (a, &k) in r1.iter().enumerate() {
            for &l in &r1[a + 1..] {
                corr += coeff_inner(&gs[k], &gs[l]);
            }
            for (s, g) in sum.iter_mut().zip(&gs[k]) {
                *s += g;
            }
        }
        let nw = normal_ordered_weyl(phi, &sum);
        residual += sign * nw;
        partition += sign * (-0.5 * total_norm).exp() * (-corr).exp() * nw;
    }
    let correlation_part = partition - (-0.5 * total_norm).exp() * residual;
    Ok(Coincidence {
        direct,
        partition,
        discrepancy: (direct - partition).norm(),
        residual_sum: residual,
        correlation_part,
        leak_bound,
    })
}
