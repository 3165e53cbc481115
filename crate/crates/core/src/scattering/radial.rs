use std::f64::consts::PI;

use num_complex::Complex64;

use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::fft::fft_nd;
use crate::fit::{power_law_fit, LinearFit};
use crate::quadrature::gauss_legendre;
use crate::single_particle::smooth_step;

/// Rotation-invariant momentum profile with compact support.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadialProfile {
    /// `e^{−p²/2σ²}` cut off smoothly between `0.8R` and `R`.
    Gaussian { sigma: f64, cutoff: f64 },
    /// `1` for `p ≤ a`, falling smoothly to 0 at `p = R`.
    Plateau { inner: f64, outer: f64 },
}

impl RadialProfile {
    pub fn value(&self, p: f64) -> f64 {
        match *self {
            Self::Gaussian { sigma, cutoff } => (-0.5 * p * p / (sigma * sigma)).exp() * smooth_step((p - 0.8 * cutoff) / (0.2 * cutoff)),
            Self::Plateau { inner, outer } => smooth_step((p - inner) / (outer - inner)),
        }
    }

    pub fn radius(&self) -> f64 {
        match *self {
            Self::Gaussian { cutoff, .. } => cutoff,
            Self::Plateau { outer, .. } => outer,
        }
    }
}

pub(crate) fn gl_nodes(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (xs, ws) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .flat_map(|k| {
            let mid = a + (k as f64 + 0.5) * h;
            xs.iter().zip(&ws).map(move |(x, w)| (mid + 0.5 * h * x, 0.5 * h * w)).collect::<Vec<_>>()
        })
        .collect()
}

/// Continuum Klein–Gordon solution in three dimensions with a radial profile:
/// `f(t,r) = (2π)^{−3/2}(4π/r)∫ p sin(pr) f̃(p) e^{−iω(p)t} dp`.
#[derive(Clone, Debug)]
pub struct RadialPacket {
    pub mass: f64,
    pub profile: RadialProfile,
}

/// Radial samples `f(t, r_j)` with the weights of `∫ ·  d³x`.
#[derive(Clone, Debug)]
pub struct RadialSnapshot {
    pub t: f64,
    pub r: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl RadialSnapshot {
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v.norm() * w).sum()
    }
    pub fn l2_norm(&self) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v.norm_sqr() * w).sum::<f64>().sqrt()
    }
}

impl RadialPacket {
    pub fn new(mass: f64, profile: RadialProfile) -> Result<Self> {
        if !(mass > 0.0 && profile.radius() > 0.0) {
            return Err(Error::Param("radial packet needs m > 0 and a positive support radius".into()));
        }
        Ok(Self { mass, profile })
    }

    pub fn omega(&self, p: f64) -> f64 {
        (p * p + self.mass * self.mass).sqrt()
    }

    pub fn max_velocity(&self) -> f64 {
        let r = self.profile.radius();
        r / self.omega(r)
    }

    /// `(∫|f̃|²d³p)^{1/2}`.
    pub fn momentum_l2(&self) -> f64 {
        let r = self.profile.radius();
        (4.0 * PI * gl_nodes(0.0, r, 64, 16).iter().map(|(p, w)| w * p * p * self.profile.value(*p).powi(2)).sum::<f64>()).sqrt()
    }

    /// Radial grid `[0, r_max]` resolving the oscillation length `2π/p_max`.
    pub fn radial_nodes(&self, r_max: f64) -> Vec<(f64, f64)> {
        let panels = (r_max * self.profile.radius() / 1.5).ceil().max(8.0) as usize;
        gl_nodes(0.0, r_max, panels, 8)
    }

    fn momentum_nodes(&self, phase_span: f64) -> Vec<(f64, f64)> {
        let r = self.profile.radius();
        let panels = 16 + (phase_span * r / (2.0 * PI)).ceil() as usize * 2;
        gl_nodes(0.0, r, panels, 16)
    }

    /// `f(t, r)` at each requested radius.
    pub fn values(&self, t: f64, rs: &[f64]) -> Vec<Complex64> {
        let r_max = rs.iter().cloned().fold(0.0, f64::max);
        let nodes = self.momentum_nodes(t.abs() + r_max);
        let pref = 4.0 * PI * (2.0 * PI).powf(-1.5);
        let amps: Vec<(f64, Complex64)> =
            nodes.iter().map(|&(p, w)| (p, Complex64::from_polar(w * p * self.profile.value(p), -self.omega(p) * t))).collect();
        rs.iter()
            .map(|&r| {
                let s: Complex64 = if r * self.profile.radius() < 1e-6 {
                    amps.iter().map(|(p, a)| a * p).sum()
                } else {
                    amps.iter().map(|(p, a)| a * ((p * r).sin() / r)).sum()
                };
                s * pref
            })
            .collect()
    }

    /// Samples out to `|t|·v_max + margin`.
    pub fn snapshot(&self, t: f64, margin: f64) -> RadialSnapshot {
        let nodes = self.radial_nodes(t.abs() * self.max_velocity() + margin);
        let r: Vec<f64> = nodes.iter().map(|n| n.0).collect();
        let weights = nodes.iter().map(|(r, w)| 4.0 * PI * r * r * w).collect();
        let values = self.values(t, &r);
        RadialSnapshot { t, r, weights, values }
    }
}

#[derive(Clone, Debug)]
pub struct RadialDispersion {
    pub times: Vec<f64>,
    pub sup: Vec<f64>,
    pub l1: Vec<f64>,
    pub l2: Vec<f64>,
    pub sup_fit: LinearFit,
    pub l1_fit: LinearFit,
}

pub fn radial_dispersion_fit(f: &RadialPacket, times: &[f64], margin: f64) -> Result<RadialDispersion> {
    let snaps: Vec<RadialSnapshot> = times.iter().map(|&t| f.snapshot(t, margin)).collect();
    let sup: Vec<f64> = snaps.iter().map(|s| s.sup_norm()).collect();
    let l1: Vec<f64> = snaps.iter().map(|s| s.l1_norm()).collect();
    let l2: Vec<f64> = snaps.iter().map(|s| s.l2_norm()).collect();
    Ok(RadialDispersion {
        times: times.to_vec(),
        sup_fit: power_law_fit(times, &sup, 0.0)?,
        l1_fit: power_law_fit(times, &l1, 0.0)?,
        sup,
        l1,
        l2,
    })
}

impl RadialPacket {
    /// `f(t, r_j)` on `r_j = j·dr`, `j·dr ≤ r_max`, from one FFT of the odd
    /// extension of `p f̃(p) e^{−iωt}` (trapezoid in `p`, spectrally accurate).
    pub fn lattice(&self, t: f64, r_max: f64, dr: f64) -> (Vec<f64>, Vec<Complex64>) {
        let big_r = self.profile.radius();
        // period 2π/dp in r must hold the packet twice over
        let dp = (big_r / 64.0).min(2.0 * PI / (2.5 * (r_max + 1.0)));
        let k_max = (big_r / dp).ceil() as usize;
        let m = ((2.0 * PI / (dp * dr)).ceil() as usize).max(2 * k_max + 1).next_power_of_two();
        let dr = 2.0 * PI / (m as f64 * dp);
        let mut a = vec![Complex64::new(0.0, 0.0); m];
        let mut r0 = Complex64::new(0.0, 0.0);
        for k in 1..=k_max {
            let p = k as f64 * dp;
            let q = Complex64::from_polar(p * self.profile.value(p), -self.omega(p) * t);
            a[k] = q;
            a[m - k] = -q;
            r0 += q * p * dp;
        }
        fft_nd(&mut a, &[m], FftDirection::Forward);
        let pref = 4.0 * PI * (2.0 * PI).powf(-1.5);
        let n = ((r_max / dr).floor() as usize + 1).min(m / 2);
        let rs: Vec<f64> = (0..n).map(|j| j as f64 * dr).collect();
        let vals = rs
            .iter()
            .enumerate()
            .map(|(j, &r)| if j == 0 { r0 * pref } else { a[j] * Complex64::new(0.0, 0.5 * dp) / r * pref })
            .collect();
        (rs, vals)
    }
}
