use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockSpace, FockState, ModeBasis};
use crate::single_particle::{mollifier, smooth_step, SPVector};

use super::radial::{gl_nodes, RadialPacket};

fn bump(x: f64) -> f64 {
    mollifier(&[x], 1.0)
}

/// Positive time profile `h = K|k|²` with `k` the transform of a bump of
/// half-width `w`, so `h̃` is supported in `[−2w, 2w]`; normalised to
/// `h̃(0) = (2π)^{−2}` with `h̃(Ω) = (2π)^{−1/2}∫h(t)e^{iΩt}dt`.
#[derive(Clone, Debug)]
pub struct HRTimeProfile {
    pub width: f64,
    scale: f64,
    nodes: Vec<(f64, f64)>,
}

impl HRTimeProfile {
    pub fn new(width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::Param(format!("time profile width must be positive, got {width}")));
        }
        let nodes = gl_nodes(-width, width, 64, 16);
        let b2: f64 = nodes.iter().map(|(w, q)| q * bump(w / width).powi(2)).sum();
        Ok(Self { width, scale: (2.0 * PI).powf(-2.5) / b2, nodes })
    }

    pub fn h(&self, u: f64) -> f64 {
        let k: f64 = self.nodes.iter().map(|(w, q)| q * bump(w / self.width) * (w * u).cos()).sum();
        self.scale * k * k
    }

    pub fn transform(&self, omega: f64) -> f64 {
        let w = self.width;
        let (lo, hi) = ((-w).max(-w - omega), w.min(w - omega));
        if lo >= hi {
            return 0.0;
        }
        let c: f64 = gl_nodes(lo, hi, 32, 16).iter().map(|(x, q)| q * bump((x + omega) / w) * bump(x / w)).sum();
        self.scale * (2.0 * PI).sqrt() * c
    }

    /// `∫h = (2π)^{1/2}h̃(0)`.
    pub fn integral(&self) -> f64 {
        (2.0 * PI).sqrt() * self.transform(0.0)
    }
}

/// `h_T(t) = h((t−T)/s(T))/s(T)` with `s(T) = T^ν`.
#[derive(Clone, Debug)]
pub struct HRCreationSpec {
    pub profile: HRTimeProfile,
    pub nu: f64,
}

impl HRCreationSpec {
    pub fn new(profile: HRTimeProfile, nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::Param(format!("ν must lie in (0,1), got {nu}")));
        }
        Ok(Self { profile, nu })
    }

    pub fn s(&self, t_big: f64) -> f64 {
        t_big.powf(self.nu)
    }

    pub fn h_t(&self, t_big: f64, t: f64) -> f64 {
        let s = self.s(t_big);
        self.profile.h((t - t_big) / s) / s
    }

    /// `∫h_T(t)e^{iΩt}dt = (2π)^{1/2}e^{iΩT}h̃(s(T)Ω)`.
    pub fn average(&self, omega: f64, t_big: f64) -> Complex64 {
        Complex64::from_polar((2.0 * PI).sqrt() * self.profile.transform(self.s(t_big) * omega), omega * t_big)
    }
}

/// `χ_δ(τ, ρ)`: 1 within `δ/2` of the cone `{(1, v) : |v| ≤ v_max}`, 0 beyond `δ`.
pub fn chi_delta(tau: f64, rho: f64, v_max: f64, delta: f64) -> f64 {
    let d = ((tau - 1.0).powi(2) + (rho - v_max).max(0.0).powi(2)).sqrt();
    smooth_step((d - 0.5 * delta) / (0.5 * delta))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VelocitySplit {
    pub t_big: f64,
    /// `∫|f̌_T| d⁴x`.
    pub tail: f64,
    /// `∫|f̂_T| d⁴x`.
    pub dominant: f64,
    pub total: f64,
}

/// Splits `f_T(t,x) = h_T(t) f(t,x)` by `χ_δ(x/T)` and integrates both parts
/// over `|t − T| ≤ 40 s(T)`, `|x| ≤ |t|v_max + margin`.
pub fn velocity_split(packet: &RadialPacket, spec: &HRCreationSpec, delta: f64, t_big: f64, margin: f64) -> Result<VelocitySplit> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Param(format!("δ must lie in (0,1) so the cutoff stays away from t = 0, got {delta}")));
    }
    if !(t_big >= 1.0) {
        return Err(Error::Param(format!("T must be ≥ 1, got {t_big}")));
    }
    let v = packet.max_velocity();
    let s = spec.s(t_big);
    let span = 40.0 * s;
    let panels = 8 + (2.0 * span * spec.profile.width / (0.5 * PI * s)).ceil() as usize;
    let mut out = VelocitySplit { t_big, tail: 0.0, dominant: 0.0, total: 0.0 };
    for (t, wt) in gl_nodes(t_big - span, t_big + span, panels, 8) {
        let ht = spec.h_t(t_big, t).abs();
        if ht == 0.0 {
            continue;
        }
        let (rs, vals) = packet.lattice(t, t.abs() * v + margin, 0.1);
        let dr = rs.get(1).copied().unwrap_or(0.0);
        let (mut tail, mut dom) = (0.0, 0.0);
        for (r, f) in rs.iter().zip(&vals) {
            let w = 4.0 * PI * r * r * dr * f.norm();
            let chi = chi_delta(t / t_big, r / t_big, v, delta);
            dom += chi * w;
            tail += (1.0 - chi) * w;
        }
        out.tail += wt * ht * tail;
        out.dominant += wt * ht * dom;
        out.total += wt * ht * (tail + dom);
    }
    Ok(out)
}

/// `(f̂_T, f̌_T, f_T)` at one spacetime point.
pub fn split_point(packet: &RadialPacket, spec: &HRCreationSpec, delta: f64, t_big: f64, t: f64, r: f64) -> (Complex64, Complex64, Complex64) {
    let f = packet.values(t, &[r])[0] * spec.h_t(t_big, t);
    let chi = chi_delta(t / t_big, r / t_big, packet.max_velocity(), delta);
    (f * chi, f * (1.0 - chi), f)
}

/// One Haag–Ruelle creator `A(f_T)` built from the smeared field
/// `A = a*(g) + a(g)` and a Klein–Gordon packet `f̃` on the same grid.
#[derive(Clone, Debug)]
pub struct HRFockSpec {
    pub ftilde: SPVector,
    pub g: SPVector,
    pub time: HRCreationSpec,
}

impl HRFockSpec {
    fn dim_factor(&self) -> f64 {
        (2.0 * PI).powf(self.g.grid.dim() as f64 / 2.0)
    }

    /// `a*` part: `F(p) = (2π)^{s/2} g(p) f̃(p) ∫h`; independent of `T`.
    pub fn creator_vector(&self) -> SPVector {
        let c = self.dim_factor() * self.time.profile.integral();
        SPVector { grid: self.g.grid.clone(), amps: self.g.amps.iter().zip(&self.ftilde.amps).map(|(a, b)| a * b * c).collect() }
    }

    /// `a` part: `G_T(p) = (2π)^{s/2} g(p) conj f̃(−p) ∫h_T(t)e^{2iω(p)t}dt`.
    pub fn annihilator_vector(&self, t_big: f64) -> SPVector {
        let grid = &self.g.grid;
        let c = self.dim_factor();
        let amps = (0..grid.len())
            .map(|i| self.g.amps[i] * self.ftilde.amps[grid.neg_index(i)].conj() * self.time.average(2.0 * grid.omega(i), t_big) * c)
            .collect();
        SPVector { grid: grid.clone(), amps }
    }

    /// Bounding box of `{p/ω(p)}` over the support of `f̃`.
    pub fn velocity_box(&self) -> Option<Vec<(f64, f64)>> {
        let grid = &self.ftilde.grid;
        let mut bx: Option<Vec<(f64, f64)>> = None;
        for i in (0..grid.len()).filter(|&i| self.ftilde.amps[i].norm() > 0.0) {
            let v: Vec<f64> = grid.point(i).iter().map(|p| p / grid.omega(i)).collect();
            let b = bx.get_or_insert_with(|| v.iter().map(|&x| (x, x)).collect());
            for (e, x) in b.iter_mut().zip(&v) {
                e.0 = e.0.min(*x);
                e.1 = e.1.max(*x);
            }
        }
        bx
    }
}

fn boxes_disjoint(a: &[(f64, f64)], b: &[(f64, f64)]) -> bool {
    a.iter().zip(b).any(|(x, y)| x.1 < y.0 || y.1 < x.0)
}

#[derive(Clone, Debug)]
pub struct AsymptoticReport {
    pub times: Vec<f64>,
    /// `‖Ψ(T_{k+1}) − Ψ(T_k)‖`.
    pub differences: Vec<f64>,
    pub sum_of_differences: f64,
    pub states: Vec<FockState>,
    pub leakage: f64,
}

impl AsymptoticReport {
    pub fn limit(&self) -> &FockState {
        self.states.last().expect("report holds at least one state")
    }
}

/// Fock space on the cells touched by any creator or annihilator vector.
pub fn hr_fock_space(specs: &[HRFockSpec]) -> Result<Arc<FockSpace>> {
    let Some(first) = specs.first() else {
        return Err(Error::Param("need at least one creator".into()));
    };
    let grid = first.g.grid.clone();
    let mut cells: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            specs.iter().any(|s| {
                s.g.amps[i].norm() > 0.0 && (s.ftilde.amps[i].norm() > 0.0 || s.ftilde.amps[grid.neg_index(i)].norm() > 0.0)
            })
        })
        .collect();
    cells.sort_unstable();
    FockSpace::new(ModeBasis::cell_indicators(&grid, &cells)?, specs.len())
}

/// `Ψ(T) = A₁(f_{1T})…A_n(f_{nT})Ω` on a truncated Fock space for each `T`.
pub fn asymptotic_state_convergence(specs: &[HRFockSpec], times: &[f64]) -> Result<AsymptoticReport> {
    asymptotic_states_on(&hr_fock_space(specs)?, specs, times)
}

/// As [`asymptotic_state_convergence`] on a given space, which must contain
/// every creator and annihilator vector.
pub fn asymptotic_states_on(space: &Arc<FockSpace>, specs: &[HRFockSpec], times: &[f64]) -> Result<AsymptoticReport> {
    if space.basis.grid.mass() <= 0.0 {
        return Err(Error::Precondition("asymptotic states need a massive grid".into()));
    }
    let boxes: Vec<Vec<(f64, f64)>> = specs
        .iter()
        .map(|s| s.velocity_box().ok_or_else(|| Error::Param("packet with empty support".into())))
        .collect::<Result<_>>()?;
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            if !boxes_disjoint(&boxes[i], &boxes[j]) {
                return Err(Error::Precondition(format!("velocity supports of packets {i} and {j} overlap")));
            }
        }
    }
    let cre: Vec<Vec<Complex64>> = specs.iter().map(|s| space.basis.coefficients(&s.creator_vector())).collect::<Result<_>>()?;
    let mut states = Vec::with_capacity(times.len());
    let mut leakage: f64 = 0.0;
    for &t in times {
        let mut psi = FockState::vacuum(space);
        for (k, s) in specs.iter().enumerate().rev() {
            let ann = space.basis.coefficients(&s.annihilator_vector(t))?;
            let (mut up, lk) = psi.create_coeffs(&cre[k]);
            leakage = leakage.max(lk);
            up.axpy(Complex64::new(1.0, 0.0), &psi.annihilate_coeffs(&ann));
            psi = up;
        }
        states.push(psi);
    }
    let differences: Vec<f64> = states.windows(2).map(|w| w[1].sub(&w[0]).norm()).collect();
    Ok(AsymptoticReport { times: times.to_vec(), sum_of_differences: differences.iter().sum(), differences, states, leakage })
}

/// `Σ_σ Π_i ⟨F_i|F̂_{σ(i)}⟩`, the overlap of `a*(F₁)…a*(F_n)Ω` with `a*(F̂₁)…a*(F̂_n)Ω`.
pub fn permanent_overlap(fs: &[SPVector], fhats: &[SPVector]) -> Result<Complex64> {
    let n = fs.len();
    if n != fhats.len() || n > 10 {
        return Err(Error::Param("permanent needs equal families of at most 10 vectors".into()));
    }
    let m: Vec<Vec<Complex64>> = fs.iter().map(|f| fhats.iter().map(|g| f.inner(g)).collect()).collect();
    fn rec(m: &[Vec<Complex64>], row: usize, used: u32) -> Complex64 {
        if row == m.len() {
            return Complex64::new(1.0, 0.0);
        }
        (0..m.len()).filter(|c| used >> c & 1 == 0).map(|c| m[row][c] * rec(m, row + 1, used | 1 << c)).sum()
    }
    Ok(rec(&m, 0, 0))
}
