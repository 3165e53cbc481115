use num_complex::Complex64;

use crate::error::Result;
use crate::fock::FockState;
use crate::single_particle::SPVector;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `W(f₁)…W(f_N)` with an extra scalar phase in front.
#[derive(Clone, Debug)]
pub struct WeylWord {
    pub fs: Vec<SPVector>,
    pub phase: Complex64,
}

impl WeylWord {
    pub fn new(fs: Vec<SPVector>) -> Self {
        Self { fs, phase: Complex64::new(1.0, 0.0) }
    }

    /// Collapses the word to `c·W(Σf)` using `W(f)W(g) = e^{−i Im⟨f|g⟩} W(f+g)`.
    pub fn reduce(&self) -> Option<(Complex64, SPVector)> {
        let mut iter = self.fs.iter();
        let mut acc = iter.next()?.clone();
        let mut phase = self.phase;
        for g in iter {
            phase *= composition_phase(&acc, g);
            acc = acc.add(g);
        }
        Some((phase, acc))
    }

    /// Translates every argument by the same spacetime vector.
    pub fn translate(&self, x0: f64, x: &[f64]) -> Self {
        Self { fs: self.fs.iter().map(|f| f.translate(x0, x)).collect(), phase: self.phase }
    }
}

/// `e^{−i Im⟨f|g⟩}`.
pub fn composition_phase(f: &SPVector, g: &SPVector) -> Complex64 {
    Complex64::from_polar(1.0, -f.inner(g).im)
}

/// `ω₀(c·W(g)) = c·e^{−‖g‖²/2}`, evaluated symbolically.
pub fn vacuum_weyl_expectation(word: &WeylWord) -> Complex64 {
    match word.reduce() {
        None => word.phase,
        Some((c, g)) => c * (-0.5 * g.norm_sqr()).exp(),
    }
}

/// Result of a truncated Weyl action.
#[derive(Clone, Debug)]
pub struct WeylImage {
    pub state: FockState,
    /// Rigorous upper bound on the norm of the discarded part.
    pub leak_bound: f64,
}

/// `e^{−‖f‖²/2} e^{ia*(f)} e^{ia(f)} Ψ` with the creation series cut at `n_max`.
pub fn weyl_apply(f: &SPVector, psi: &FockState) -> Result<WeylImage> {
    let c = psi.space.basis.coefficients(f)?;
    Ok(weyl_apply_coeffs(&c, psi))
}

pub fn weyl_apply_coeffs(c: &[Complex64], psi: &FockState) -> WeylImage {
    let norm_sq: f64 = c.iter().map(|x| x.norm_sqr()).sum();
    let ann: Vec<Complex64> = c.iter().map(|x| -I * x).collect();
    let cre: Vec<Complex64> = c.iter().map(|x| I * x).collect();
    let lowered = exp_annihilate(psi, &ann).scale(Complex64::new((-0.5 * norm_sq).exp(), 0.0));
    let (state, leak_bound) = exp_create(&lowered, &cre, norm_sq.sqrt());
    WeylImage { state, leak_bound }
}

/// `e^{a(d)}Ψ` with `a(d) = Σ conj(d_j) a_j`; the series terminates.
pub fn exp_annihilate(psi: &FockState, d: &[Complex64]) -> FockState {
    let mut out = psi.clone();
    let mut term = psi.clone();
    for k in 1..=psi.space.n_max {
        term = term.annihilate_coeffs(d).scale(Complex64::new(1.0 / k as f64, 0.0));
        if term.norm_sqr() == 0.0 {
            break;
        }
        out.axpy(Complex64::new(1.0, 0.0), &term);
    }
    out
}

/// `Σ_k (Σ_j c_j a*_j)^k/k! Ψ` kept below `n_max`, plus a bound on the norm
/// of what is dropped: the sectors `n > n_max` are orthogonal, and each is
/// bounded by `Σ_q ‖Ψ_q‖ ‖c‖^{n−q} √(n!/q!)/(n−q)!`.
pub fn exp_create(psi: &FockState, c: &[Complex64], c_norm: f64) -> (FockState, f64) {
    let sp = &psi.space;
    let mut out = psi.clone();
    let mut term = psi.clone();
    for k in 1..=sp.n_max {
        let (t, _) = term.create_coeffs(c);
        term = t.scale(Complex64::new(1.0 / k as f64, 0.0));
        if term.norm_sqr() == 0.0 {
            break;
        }
        out.axpy(Complex64::new(1.0, 0.0), &term);
    }
    let mut sector = vec![0.0; sp.n_max + 1];
    for (i, a) in psi.amps.iter().enumerate() {
        sector[sp.number(i) as usize] += a.norm_sqr();
    }
    if c_norm == 0.0 {
        return (out, 0.0);
    }
    let ln_fact = |n: usize| (1..=n).map(|j| (j as f64).ln()).sum::<f64>();
    let lc = c_norm.ln();
    let mut total = 0.0;
    let mut peak: f64 = 0.0;
    for top in sp.n_max + 1.. {
        let lf_top = 0.5 * ln_fact(top);
        let amp: f64 = sector
            .iter()
            .enumerate()
            .filter(|(_, m)| **m > 0.0)
            .map(|(q, m)| {
                let k = top - q;
                (0.5 * m.ln() + k as f64 * lc + lf_top - 0.5 * ln_fact(q) - ln_fact(k)).exp()
            })
            .sum();
        total += amp * amp;
        peak = peak.max(amp);
        if amp < 1e-300 || (amp < 1e-12 * peak && amp * amp < 1e-24 * total) || top > sp.n_max + 100_000 {
            break;
        }
    }
    let bound = total.sqrt();
    (out, bound)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fock::{FockSpace, ModeBasis};
    use crate::single_particle::MomentumGrid;

    fn setup(n_max: usize) -> Arc<FockSpace> {
        let g = MomentumGrid::new(1, 1.0, 4.0, 16).unwrap();
        FockSpace::new(ModeBasis::cell_indicators(&g, &[7, 8, 9]).unwrap(), n_max).unwrap()
    }

    fn vec_in_span(sp: &FockSpace, c: &[Complex64]) -> SPVector {
        sp.basis.vector(c)
    }

    #[test]
    fn closed_form_examples() {
        let sp = setup(4);
        let f = vec_in_span(&sp, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]);
        assert!((f.norm_sqr() - 2.0).abs() < 1e-14);
        let w = WeylWord::new(vec![f.clone()]);
        assert!((vacuum_weyl_expectation(&w) - Complex64::new((-1f64).exp(), 0.0)).norm() < 1e-14);
        let w = WeylWord::new(vec![f.clone(), f.scale_real(-1.0)]);
        assert!((vacuum_weyl_expectation(&w) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn truncated_matches_symbolic() {
        let sp = setup(14);
        let f = vec_in_span(&sp, &[Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.5), Complex64::new(0.4, 0.0)]);
        let g = vec_in_span(&sp, &[Complex64::new(0.1, -0.3), Complex64::new(0.2, 0.2), Complex64::new(0.0, 0.5)]);
        let om = FockState::vacuum(&sp);
        let a = weyl_apply(&g, &om).unwrap();
        let b = weyl_apply(&f, &a.state).unwrap();
        let num = om.inner(&b.state);
        let sym = vacuum_weyl_expectation(&WeylWord::new(vec![f.clone(), g.clone()]));
        assert!((num - sym).norm() < 1e-10, "{num} vs {sym}");
        let single = weyl_apply(&f, &om).unwrap();
        assert!((om.inner(&single.state).re - (-0.5 * f.norm_sqr()).exp()).abs() < 1e-12);
    }

    #[test]
    fn zero_argument_is_identity() {
        let sp = setup(3);
        let psi = FockState::basis_state(&sp, &[1, 1, 0]).unwrap();
        let out = weyl_apply(&SPVector::zeros(&sp.basis.grid), &psi).unwrap();
        assert_eq!(out.state.sub(&psi).norm(), 0.0);
        assert_eq!(out.leak_bound, 0.0);
    }

    #[test]
    fn unitarity_deficit_within_leak_bound() {
        let sp = setup(5);
        let f = vec_in_span(&sp, &[Complex64::new(0.9, 0.1), Complex64::new(-0.2, 0.5), Complex64::new(0.4, 0.0)]);
        let psi = FockState::basis_state(&sp, &[1, 0, 1]).unwrap();
        let out = weyl_apply(&f, &psi).unwrap();
        let deficit = psi.norm() - out.state.norm();
        assert!(deficit >= -1e-12);
        assert!(deficit <= out.leak_bound + 1e-12, "{deficit} > {}", out.leak_bound);
    }
}
