use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{restricted_matrix, spectral_norm, FockSpace, Letter, OperatorWord};
use crate::quadrature::gauss_legendre;
use crate::single_particle::mollifier;

/// Time profile `g(t) = (2π)^{−1/2}∫g̃(ω)e^{−iωt}dω` with a bump transform
/// `g̃(ω) = (2π)^{−1/2} b((ω−c)/w)/b(0)` supported in `[c−w, c+w]`.
/// The smearing integral `∫g(t)e^{iΔt}dt` is taken numerically over `[−T, T]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeProfile {
    pub center: f64,
    pub half_width: f64,
    pub horizon: f64,
}

impl TimeProfile {
    /// Support `(−0.9m, 0.9m)`, `g̃(0) = (2π)^{−1/2}`.
    pub fn default_for_mass(m: f64) -> Self {
        Self { center: 0.0, half_width: 0.9 * m, horizon: 600.0 / m.min(1.0) }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    pub fn transform(&self, w: f64) -> f64 {
        let b0 = mollifier(&[0.0], 1.0);
        mollifier(&[(w - self.center) / self.half_width], 1.0) / b0 / (2.0 * PI).sqrt()
    }

    fn omega_nodes(&self) -> Vec<(f64, f64)> {
        let panels = 128 + (self.horizon * self.half_width / 4.0).ceil() as usize;
        composite_nodes(self.center - self.half_width, self.center + self.half_width, panels, 16)
    }

    /// `g(t)` at the given times.
    pub fn samples(&self, ts: &[f64]) -> Vec<Complex64> {
        let om = self.omega_nodes();
        let weights: Vec<f64> = om.iter().map(|&(w, q)| q * self.transform(w)).collect();
        let norm = (2.0 * PI).sqrt().recip();
        ts.iter()
            .map(|&t| {
                om.iter().zip(&weights).map(|(&(w, _), &q)| Complex64::from_polar(q, -w * t)).sum::<Complex64>() * norm
            })
            .collect()
    }
}

fn composite_nodes(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (xs, ws) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in xs.iter().zip(&ws) {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

/// `F(Δ) = ∫_{−T}^{T} g(t) e^{iΔt} dt` for a batch of frequencies.
pub fn smearing_factors(profile: &TimeProfile, deltas: &[f64]) -> Vec<Complex64> {
    let fmax = deltas.iter().fold(0.0f64, |m, d| m.max(d.abs())) + profile.center.abs() + profile.half_width;
    let t = profile.horizon;
    let panels = 64 + (t * fmax / PI).ceil() as usize;
    let nodes = composite_nodes(-t, t, panels, 16);
    let ts: Vec<f64> = nodes.iter().map(|n| n.0).collect();
    let g = profile.samples(&ts);
    deltas
        .iter()
        .map(|&d| nodes.iter().zip(&g).map(|(&(t, w), &gt)| gt * Complex64::from_polar(w, d * t)).sum())
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmearedNorm {
    /// `‖P_E W(g) P_E‖`.
    pub norm: f64,
    /// `‖P_E W P_E‖` without smearing.
    pub unsmeared: f64,
    /// Largest `|F(Δ)|` over the energy transfers that occur.
    pub max_factor: f64,
    pub leakage: f64,
}

/// `‖P_E W(g) P_E‖` with `W(g) = ∫g(t)e^{itH}We^{−itH}dt`, for any word and profile.
pub fn time_smeared_norm(space: &Arc<FockSpace>, word: &OperatorWord, profile: &TimeProfile, energy: f64) -> Result<SmearedNorm> {
    if !(profile.half_width > 0.0 && profile.horizon > 0.0) {
        return Err(Error::Param("time profile needs positive width and horizon".into()));
    }
    let leak = std::cell::Cell::new(0.0f64);
    let (idx, mut m) = restricted_matrix(space, energy, |v| {
        let (out, l) = word.apply(v);
        leak.set(leak.get().max(l));
        out
    });
    let unsmeared = spectral_norm(&m);
    let mut keys: HashMap<u64, usize> = HashMap::new();
    let mut deltas = Vec::new();
    for &r in &idx {
        for &c in &idx {
            let d = space.energy(r) - space.energy(c);
            keys.entry(d.to_bits()).or_insert_with(|| {
                deltas.push(d);
                deltas.len() - 1
            });
        }
    }
    let factors = smearing_factors(profile, &deltas);
    let mut max_factor: f64 = 0.0;
    for (row, &r) in idx.iter().enumerate() {
        for (col, &c) in idx.iter().enumerate() {
            if m[(row, col)] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let f = factors[keys[&(space.energy(r) - space.energy(c)).to_bits()]];
            max_factor = max_factor.max(f.norm());
            m[(row, col)] *= f;
        }
    }
    Ok(SmearedNorm { norm: spectral_norm(&m), unsmeared, max_factor, leakage: leak.get() })
}

/// The annihilator-only case: requires `m > 0`, a word without creators, and
/// `supp g̃` inside `(−m, m)` with a margin of `m/100`.
pub fn time_smeared_word(space: &Arc<FockSpace>, word: &OperatorWord, profile: &TimeProfile, energy: f64) -> Result<SmearedNorm> {
    let m = space.basis.grid.mass();
    if m <= 0.0 {
        return Err(Error::Precondition("time-smeared annihilators need m > 0".into()));
    }
    if word.letters.iter().any(|l| matches!(l, Letter::Cre(_))) {
        return Err(Error::Precondition("word contains creators".into()));
    }
    let (lo, hi) = profile.support();
    let margin = 0.01 * m;
    if lo < -m + margin || hi > m - margin {
        return Err(Error::Precondition(format!("supp g̃ = [{lo}, {hi}] not inside (−{m}, {m}) with margin {margin}")));
    }
    time_smeared_norm(space, word, profile, energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ModeBasis;
    use crate::single_particle::{MomentumGrid, SPVector};

    fn space(n_max: usize) -> Arc<FockSpace> {
        let g = MomentumGrid::new(1, 1.0, 3.0, 12).unwrap();
        FockSpace::new(ModeBasis::cell_indicators(&g, &[4, 6, 9]).unwrap(), n_max).unwrap()
    }

    fn h(sp: &FockSpace, c: [f64; 3]) -> SPVector {
        sp.basis.vector(&c.map(|x| Complex64::new(x, 0.3 * x)))
    }

    #[test]
    fn factor_matches_transform() {
        let p = TimeProfile::default_for_mass(1.0);
        let ds = [0.0, 0.4, -0.7, 1.0, -1.3, 2.5];
        let f = smearing_factors(&p, &ds);
        assert!((f[0].re - 1.0).abs() < 1e-10 && f[0].im.abs() < 1e-10, "{}", f[0]);
        for (d, v) in ds.iter().zip(&f) {
            let want = (2.0 * PI).sqrt() * p.transform(*d);
            assert!((v - want).norm() < 1e-10, "Δ={d}: {v} vs {want}");
        }
    }

    #[test]
    fn single_annihilator_vanishes() {
        let sp = space(3);
        let p = TimeProfile::default_for_mass(1.0);
        let w = OperatorWord::from_letters(vec![OperatorWord::ann(&sp.basis, &h(&sp, [1.0, -0.5, 0.7])).unwrap()]);
        let r = time_smeared_word(&sp, &w, &p, 6.0).unwrap();
        assert!(r.unsmeared > 0.1);
        assert!(r.norm <= 1e-10, "{}", r.norm);
    }

    #[test]
    fn creators_rejected_and_support_checked() {
        let sp = space(2);
        let w = OperatorWord::from_letters(vec![OperatorWord::cre(&sp.basis, &h(&sp, [1.0, 0.0, 0.0])).unwrap()]);
        assert!(matches!(time_smeared_word(&sp, &w, &TimeProfile::default_for_mass(1.0), 3.0), Err(Error::Precondition(_))));
        let wide = TimeProfile { center: 0.0, half_width: 1.2, horizon: 600.0 };
        let a = OperatorWord::from_letters(vec![OperatorWord::ann(&sp.basis, &h(&sp, [1.0, 0.0, 0.0])).unwrap()]);
        assert!(matches!(time_smeared_word(&sp, &a, &wide, 3.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn creator_outside_window_vanishes() {
        let sp = space(2);
        let m = 1.0;
        let p = TimeProfile { center: m + 1.5, half_width: 0.5, horizon: 600.0 };
        let w = OperatorWord::from_letters(vec![OperatorWord::cre(&sp.basis, &h(&sp, [1.0, 0.5, -0.4])).unwrap()]);
        let r = time_smeared_norm(&sp, &w, &p, m + 0.9).unwrap();
        assert!(r.unsmeared > 0.1);
        assert!(r.norm <= 1e-10, "{}", r.norm);
    }
}
