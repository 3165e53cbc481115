use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::fft::fft_nd;
use crate::fock::FockState;
use crate::multiindex::binomial;

/// Lattice `p = start + k·spacing` per axis, `k ∈ 0..points`, on which an
/// n-fold momentum convolution lives.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityLattice {
    pub s: usize,
    pub start: f64,
    pub spacing: f64,
    pub points: usize,
}

impl DensityLattice {
    pub fn len(&self) -> usize {
        self.points.pow(self.s as u32)
    }
    pub fn is_empty(&self) -> bool {
        self.points == 0
    }
    pub fn point(&self, i: usize, out: &mut [f64]) {
        let mut rest = i;
        for a in (0..self.s).rev() {
            out[a] = self.start + (rest % self.points) as f64 * self.spacing;
            rest /= self.points;
        }
    }
    pub fn momentum_norm(&self, i: usize) -> f64 {
        let mut p = vec![0.0; self.s];
        self.point(i, &mut p);
        p.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
    pub fn cell_weight(&self) -> f64 {
        self.spacing.powi(self.s as i32)
    }
}

/// `⟨bra| :φ̃₊ⁿ:(p) |ket⟩` with `φ̃₊(p) = (2ω(p))^{−1/2}(a*(p) + a(−p))` on the
/// n-fold sum lattice.
///
/// Writing `c_j(q) = conj(e_j(q))/√(2ω)`, `d_j(q) = e_j(−q)/√(2ω)` and
/// `M_k(J) = ⟨bra|a*_{j₁}…a*_{j_k} a_{j_{k+1}}…a_{j_n}|ket⟩`, the value is
/// `(2π)^{−s(n−1)/2} Σ_k C(n,k) Σ_J M_k(J) (c_{j₁} ∗ … ∗ d_{j_n})(p)`.
/// Convolutions are computed by zero-padded FFT.
pub fn wick_field_density(bra: &FockState, ket: &FockState, n: usize) -> Result<(DensityLattice, Vec<Complex64>)> {
    if n == 0 {
        return Err(Error::Param("Wick power must be ≥ 1".into()));
    }
    let sp = &ket.space;
    let basis = &sp.basis;
    let grid = &basis.grid;
    if grid.omegas().contains(&0.0) {
        return Err(Error::Config("grid samples ω = 0".into()));
    }
    let s = grid.dim();
    let nn = grid.n_per_axis();
    let d = basis.dim();
    let len = n * nn;
    let total = len.pow(s as u32);
    if total > 1 << 24 {
        return Err(Error::Config(format!("padded convolution lattice {len}^{s} too large")));
    }
    let embed = |vals: &dyn Fn(usize) -> Complex64| -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); total];
        for i in 0..grid.len() {
            let flat = grid.axis_indices(i).iter().fold(0, |acc, &k| acc * len + k);
            buf[flat] = vals(i);
        }
        fft_nd(&mut buf, &vec![len; s], FftDirection::Forward);
        buf
    };
    let c_hat: Vec<Vec<Complex64>> = (0..d)
        .map(|j| {
            let e = &basis.modes[j];
            embed(&|i| e.amps[i].conj() / (2.0 * grid.omega(i)).sqrt())
        })
        .collect();
    let d_hat: Vec<Vec<Complex64>> = (0..d)
        .map(|j| {
            let e = &basis.modes[j];
            embed(&|i| e.amps[grid.neg_index(i)] / (2.0 * grid.omega(i)).sqrt())
        })
        .collect();

    let mut acc = vec![Complex64::new(0.0, 0.0); total];
    let tuples = |k: usize| -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..k {
            out = out.into_iter().flat_map(|t| (0..d).map(move |j| [t.clone(), vec![j]].concat())).collect();
        }
        out
    };
    let unit = |j: usize| -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[j] = Complex64::new(1.0, 0.0);
        v
    };
    for k in 0..=n {
        let binom = binomial(n as u64, k as u64) as f64;
        // bra side: a_{j_k}…a_{j_1} bra, ket side: a_{j_{k+1}}…a_{j_n} ket
        let bras: Vec<(Vec<usize>, FockState)> = tuples(k)
            .into_iter()
            .map(|t| {
                let mut v = bra.clone();
                for &j in &t {
                    v = v.annihilate_coeffs(&unit(j));
                }
                (t, v)
            })
            .filter(|(_, v)| v.norm_sqr() > 0.0)
            .collect();
        if bras.is_empty() {
            continue;
        }
        let kets: Vec<(Vec<usize>, FockState)> = tuples(n - k)
            .into_iter()
            .map(|t| {
                let mut v = ket.clone();
                for &j in t.iter().rev() {
                    v = v.annihilate_coeffs(&unit(j));
                }
                (t, v)
            })
            .filter(|(_, v)| v.norm_sqr() > 0.0)
            .collect();
        for (tb, vb) in &bras {
            for (tk, vk) in &kets {
                let m = vb.inner(vk);
                if m.norm() == 0.0 {
                    continue;
                }
                let w = m * binom;
                let mut prod = vec![w; total];
                for &j in tb {
                    for (p, c) in prod.iter_mut().zip(&c_hat[j]) {
                        *p *= c;
                    }
                }
                for &j in tk {
                    for (p, c) in prod.iter_mut().zip(&d_hat[j]) {
                        *p *= c;
                    }
                }
                for (a, p) in acc.iter_mut().zip(&prod) {
                    *a += p;
                }
            }
        }
    }
    fft_nd(&mut acc, &vec![len; s], FftDirection::Inverse);
    let points = n * (nn - 1) + 1;
    let lattice = DensityLattice { s, start: n as f64 * (-grid.half_width() + 0.5 * grid.spacing()), spacing: grid.spacing(), points };
    let scale = (2.0 * PI).powf(-(s as f64) * (n as f64 - 1.0) / 2.0) * grid.cell_weight().powi(n as i32 - 1) / total as f64;
    let mut out = Vec::with_capacity(lattice.len());
    let mut idx = vec![0usize; s];
    for _ in 0..lattice.len() {
        let flat = idx.iter().fold(0, |a, &k| a * len + k);
        out.push(acc[flat] * scale);
        for a in (0..s).rev() {
            idx[a] += 1;
            if idx[a] < points {
                break;
            }
            idx[a] = 0;
        }
    }
    Ok((lattice, out))
}

/// `Σ_cells w |p|^β |v(p)|²`.
pub fn spectral_density_of(lattice: &DensityLattice, values: &[Complex64], beta: f64) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let pn = lattice.momentum_norm(i);
            if v.norm_sqr() == 0.0 {
                0.0
            } else {
                pn.powf(beta) * v.norm_sqr()
            }
        })
        .sum::<f64>()
        * lattice.cell_weight()
}
