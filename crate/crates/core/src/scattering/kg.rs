use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fit::{power_law_fit, LinearFit};
use crate::single_particle::{ConfigLattice, MomentumGrid, SPVector};

/// `f(t,x) = (2π)^{−s/2}∫e^{−iω(p)t+ip·x} f̃(p) d^sp` sampled on the dual
/// lattice, refined `oversample` times.
#[derive(Clone, Debug)]
pub struct KGWavepacket {
    pub ftilde: SPVector,
    pub oversample: usize,
}

/// Configuration-space samples of `f(t, ·)`.
#[derive(Clone, Debug)]
pub struct KGSnapshot {
    pub t: f64,
    pub lattice: ConfigLattice,
    pub values: Vec<Complex64>,
}

impl KGSnapshot {
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum::<f64>() * self.lattice.cell_volume()
    }
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.lattice.cell_volume()).sqrt()
    }
}

impl KGWavepacket {
    /// Rejects packets whose support comes within two cells of the cutoff.
    pub fn new(ftilde: SPVector, oversample: usize) -> Result<Self> {
        let g = &ftilde.grid;
        let n = g.n_per_axis();
        for (i, a) in ftilde.amps.iter().enumerate() {
            if a.norm() > 0.0 && g.axis_indices(i).iter().any(|&k| k < 2 || k + 2 >= n) {
                return Err(Error::Config(format!(
                    "packet support reaches momentum {:?}, within two cells of the cutoff {}",
                    g.point(i),
                    g.half_width()
                )));
            }
        }
        Ok(Self { ftilde, oversample: oversample.max(1) })
    }

    /// `f̃(p) = b((p−p₀)/R)`, `b` the standard bump.
    pub fn bump(grid: &Arc<MomentumGrid>, center: &[f64], radius: f64, oversample: usize) -> Result<Self> {
        let f = SPVector::from_fn(grid, |p, _| {
            let d: Vec<f64> = p.iter().zip(center).map(|(a, b)| a - b).collect();
            Complex64::new(crate::single_particle::mollifier(&d, radius), 0.0)
        });
        Self::new(f, oversample)
    }

    /// `f̃ = 1` for `|p−p₀| ≤ a`, falling smoothly to 0 at `|p−p₀| = R`.
    pub fn plateau(grid: &Arc<MomentumGrid>, center: &[f64], inner: f64, outer: f64, oversample: usize) -> Result<Self> {
        if !(0.0 <= inner && inner < outer) {
            return Err(Error::Param(format!("plateau needs 0 ≤ a < R, got {inner}, {outer}")));
        }
        let f = SPVector::from_fn(grid, |p, _| {
            let d = p.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            Complex64::new(crate::single_particle::smooth_step((d - inner) / (outer - inner)), 0.0)
        });
        Self::new(f, oversample)
    }

    pub fn grid(&self) -> &Arc<MomentumGrid> {
        &self.ftilde.grid
    }

    /// Momentum amplitudes at time `t`: `e^{−iωt}f̃`.
    pub fn at(&self, t: f64) -> SPVector {
        self.ftilde.translate(-t, &vec![0.0; self.grid().dim()])
    }

    pub fn propagate(&self, t: f64) -> KGSnapshot {
        let (lattice, values) = self.at(t).to_config(self.oversample);
        KGSnapshot { t, lattice, values }
    }

    /// Largest group velocity `|p|/ω` on the support.
    pub fn max_velocity(&self) -> f64 {
        let g = self.grid();
        (0..g.len())
            .filter(|&i| self.ftilde.amps[i].norm() > 0.0)
            .map(|i| g.momentum_norm(i) / g.omega(i))
            .fold(0.0, f64::max)
    }
}

pub fn kg_propagate(f: &KGWavepacket, t: f64) -> KGSnapshot {
    f.propagate(t)
}

#[derive(Clone, Debug)]
pub struct DispersionFit {
    pub times: Vec<f64>,
    pub sup: Vec<f64>,
    pub l1: Vec<f64>,
    pub l2: Vec<f64>,
    pub sup_fit: LinearFit,
    pub l1_fit: LinearFit,
}

/// Power-law fits of `sup_x|f(t,x)|` and `∫|f(t,x)|dx` over the given times.
/// Fails if the packet would wrap around the periodic lattice.
pub fn dispersion_fit(f: &KGWavepacket, times: &[f64]) -> Result<DispersionFit> {
    let period = 2.0 * std::f64::consts::PI / f.grid().spacing();
    let t_max = times.iter().cloned().fold(0.0, f64::max);
    if 2.0 * t_max * f.max_velocity() > 0.95 * period {
        return Err(Error::Config(format!(
            "packet spreads over {:.1} by t = {t_max}, lattice period is {period:.1}",
            2.0 * t_max * f.max_velocity()
        )));
    }
    let snaps: Vec<KGSnapshot> = times.iter().map(|&t| f.propagate(t)).collect();
    let sup: Vec<f64> = snaps.iter().map(|s| s.sup_norm()).collect();
    let l1: Vec<f64> = snaps.iter().map(|s| s.l1_norm()).collect();
    let l2: Vec<f64> = snaps.iter().map(|s| s.l2_norm()).collect();
    let sup_fit = power_law_fit(times, &sup, 0.0)?;
    let l1_fit = power_law_fit(times, &l1, 0.0)?;
    Ok(DispersionFit { times: times.to_vec(), sup, l1, l2, sup_fit, l1_fit })
}
