use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::fft::fft_nd;

const MAX_CELLS: usize = 1 << 26;

/// Uniform midpoint lattice on `[−Λ, Λ]^s`.
///
/// Cells are stored row-major with axis 0 most significant. With an even number
/// of points per axis the origin is never a node.
#[derive(Clone, PartialEq)]
pub struct MomentumGrid {
    s: usize,
    m: f64,
    half_width: f64,
    n_per_axis: usize,
    spacing: f64,
    cell_weight: f64,
    points: Vec<f64>,
    omega: Vec<f64>,
}

impl fmt::Debug for MomentumGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MomentumGrid(s={}, m={}, Λ={}, n={})", self.s, self.m, self.half_width, self.n_per_axis)
    }
}

impl MomentumGrid {
    /// `s` may be 1 through 4; the fourth dimension is only used by the
    /// infrared witnesses.
    pub fn new(s: usize, m: f64, half_width: f64, n_per_axis: usize) -> Result<Arc<Self>> {
        if !(1..=4).contains(&s) {
            return Err(Error::Config(format!("spatial dimension {s} not in 1..=4")));
        }
        if !(m >= 0.0 && m.is_finite()) {
            return Err(Error::Config(format!("mass must be finite and ≥ 0, got {m}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Config(format!("momentum cutoff must be positive, got {half_width}")));
        }
        if n_per_axis < 2 || n_per_axis % 2 != 0 {
            return Err(Error::Config(format!("n_per_axis must be even and ≥ 2, got {n_per_axis}")));
        }
        let total = n_per_axis
            .checked_pow(s as u32)
            .filter(|&t| t <= MAX_CELLS)
            .ok_or_else(|| Error::Config(format!("{n_per_axis}^{s} cells exceeds the grid cap")))?;
        let spacing = 2.0 * half_width / n_per_axis as f64;
        let axis: Vec<f64> = (0..n_per_axis).map(|k| -half_width + (k as f64 + 0.5) * spacing).collect();
        let mut points = Vec::with_capacity(total * s);
        let mut omega = Vec::with_capacity(total);
        let mut idx = vec![0usize; s];
        for _ in 0..total {
            let mut p2 = 0.0;
            for &k in &idx {
                points.push(axis[k]);
                p2 += axis[k] * axis[k];
            }
            omega.push((p2 + m * m).sqrt());
            for a in (0..s).rev() {
                idx[a] += 1;
                if idx[a] < n_per_axis {
                    break;
                }
                idx[a] = 0;
            }
        }
        Ok(Arc::new(Self { s, m, half_width, n_per_axis, spacing, cell_weight: spacing.powi(s as i32), points, omega }))
    }

    /// `n_per_axis` = 64, 32, 24 for s = 1, 2, 3 and Λ = 4·max(E, m, 1).
    pub fn with_defaults(s: usize, m: f64, energy: f64) -> Result<Arc<Self>> {
        let n = match s {
            1 => 64,
            2 => 32,
            3 => 24,
            _ => 16,
        };
        Self::new(s, m, 4.0 * energy.max(m).max(1.0), n)
    }

    pub fn dim(&self) -> usize {
        self.s
    }
    pub fn mass(&self) -> f64 {
        self.m
    }
    pub fn half_width(&self) -> f64 {
        self.half_width
    }
    pub fn n_per_axis(&self) -> usize {
        self.n_per_axis
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    pub fn cell_weight(&self) -> f64 {
        self.cell_weight
    }
    pub fn len(&self) -> usize {
        self.omega.len()
    }
    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.s..(i + 1) * self.s]
    }
    pub fn omega(&self, i: usize) -> f64 {
        self.omega[i]
    }
    pub fn omegas(&self) -> &[f64] {
        &self.omega
    }
    pub fn momentum_norm(&self, i: usize) -> f64 {
        self.point(i).iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Index of the cell at `−p`.
    pub fn neg_index(&self, i: usize) -> usize {
        let n = self.n_per_axis;
        let mut rest = i;
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.s {
            let k = rest % n;
            rest /= n;
            out += (n - 1 - k) * scale;
            scale *= n;
        }
        out
    }

    pub fn axis_indices(&self, i: usize) -> Vec<usize> {
        let n = self.n_per_axis;
        let mut idx = vec![0; self.s];
        let mut rest = i;
        for a in (0..self.s).rev() {
            idx[a] = rest % n;
            rest /= n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &k| acc * self.n_per_axis + k)
    }

    /// Cell whose box contains `p`, if inside the cutoff.
    pub fn cell_containing(&self, p: &[f64]) -> Option<usize> {
        let mut idx = Vec::with_capacity(self.s);
        for &x in p {
            let k = ((x + self.half_width) / self.spacing).floor();
            if k < 0.0 || k >= self.n_per_axis as f64 {
                return None;
            }
            idx.push(k as usize);
        }
        Some(self.flat_index(&idx))
    }

    /// Stable textual description for provenance hashing.
    pub fn fingerprint(&self) -> String {
        format!("s={};m={:e};L={:e};n={}", self.s, self.m, self.half_width, self.n_per_axis)
    }

    /// Configuration-space lattice dual to this grid, refined `oversample` times.
    pub fn config_lattice(&self, oversample: usize) -> ConfigLattice {
        let points = self.n_per_axis * oversample.max(1);
        let period = 2.0 * PI / self.spacing;
        ConfigLattice { s: self.s, points, spacing: period / points as f64 }
    }
}

/// Symmetric midpoint lattice `x_j = (j − (M−1)/2)·h` per axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfigLattice {
    pub s: usize,
    pub points: usize,
    pub spacing: f64,
}

impl ConfigLattice {
    pub fn len(&self) -> usize {
        self.points.pow(self.s as u32)
    }
    pub fn is_empty(&self) -> bool {
        self.points == 0
    }
    pub fn coord(&self, k: usize) -> f64 {
        (k as f64 - (self.points as f64 - 1.0) / 2.0) * self.spacing
    }
    pub fn point(&self, i: usize, out: &mut [f64]) {
        let mut rest = i;
        for a in (0..self.s).rev() {
            out[a] = self.coord(rest % self.points);
            rest /= self.points;
        }
    }
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.s as i32)
    }
}

pub(crate) fn check_same_grid(a: &Arc<MomentumGrid>, b: &Arc<MomentumGrid>) {
    assert!(Arc::ptr_eq(a, b) || **a == **b, "vectors live on different grids");
}

/// Complex amplitude per cell of a [`MomentumGrid`].
#[derive(Clone, Debug)]
pub struct SPVector {
    pub grid: Arc<MomentumGrid>,
    pub amps: Vec<Complex64>,
}

impl SPVector {
    pub fn zeros(grid: &Arc<MomentumGrid>) -> Self {
        Self { grid: grid.clone(), amps: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn<F: Fn(&[f64], f64) -> Complex64>(grid: &Arc<MomentumGrid>, f: F) -> Self {
        let amps = (0..grid.len()).map(|i| f(grid.point(i), grid.omega(i))).collect();
        Self { grid: grid.clone(), amps }
    }

    /// Unit-norm indicator of one cell.
    pub fn cell_indicator(grid: &Arc<MomentumGrid>, cell: usize) -> Self {
        let mut v = Self::zeros(grid);
        v.amps[cell] = Complex64::new(grid.cell_weight().sqrt().recip(), 0.0);
        v
    }

    pub fn inner(&self, other: &SPVector) -> Complex64 {
        check_same_grid(&self.grid, &other.grid);
        let s: Complex64 = self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum();
        s * self.grid.cell_weight()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.cell_weight()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn sobolev_norm(&self, l: f64) -> f64 {
        let g = &self.grid;
        let s: f64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let p2: f64 = g.point(i).iter().map(|x| x * x).sum();
                (1.0 + p2).powf(l) * a.norm_sqr()
            })
            .sum();
        (s * g.cell_weight()).sqrt()
    }

    /// `amps(p) ↦ e^{i(ω(p)x⁰ − p·x)} amps(p)`.
    pub fn translate(&self, x0: f64, x: &[f64]) -> SPVector {
        assert_eq!(x.len(), self.grid.dim());
        let g = &self.grid;
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let px: f64 = g.point(i).iter().zip(x).map(|(p, y)| p * y).sum();
                a * Complex64::from_polar(1.0, g.omega(i) * x0 - px)
            })
            .collect();
        SPVector { grid: g.clone(), amps }
    }

    /// Configuration-space complex conjugation: `amps(p) ↦ conj(amps(−p))`.
    pub fn conj_j(&self) -> SPVector {
        let g = &self.grid;
        let amps = (0..g.len()).map(|i| self.amps[g.neg_index(i)].conj()).collect();
        SPVector { grid: g.clone(), amps }
    }

    /// Largest deviation `|amps(p) − conj(amps(−p))|` relative to the largest amplitude.
    pub fn j_defect(&self) -> f64 {
        let g = &self.grid;
        let scale = self.amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        (0..g.len()).map(|i| (self.amps[i] - self.amps[g.neg_index(i)].conj()).norm()).fold(0.0, f64::max) / scale
    }

    pub fn scale(&self, c: Complex64) -> SPVector {
        SPVector { grid: self.grid.clone(), amps: self.amps.iter().map(|a| a * c).collect() }
    }

    pub fn scale_real(&self, c: f64) -> SPVector {
        SPVector { grid: self.grid.clone(), amps: self.amps.iter().map(|a| a * c).collect() }
    }

    pub fn add(&self, other: &SPVector) -> SPVector {
        check_same_grid(&self.grid, &other.grid);
        SPVector { grid: self.grid.clone(), amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &SPVector) -> SPVector {
        check_same_grid(&self.grid, &other.grid);
        SPVector { grid: self.grid.clone(), amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect() }
    }

    /// `self += c·other`.
    pub fn axpy(&mut self, c: Complex64, other: &SPVector) {
        check_same_grid(&self.grid, &other.grid);
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += c * b;
        }
    }

    /// Pointwise multiplication by a real function of `(p, ω)`.
    pub fn mul_fn<F: Fn(&[f64], f64) -> f64>(&self, f: F) -> SPVector {
        let g = &self.grid;
        let amps = self.amps.iter().enumerate().map(|(i, a)| a * f(g.point(i), g.omega(i))).collect();
        SPVector { grid: g.clone(), amps }
    }

    pub fn omega_pow(&self, beta: f64) -> SPVector {
        self.mul_fn(|_, w| w.powf(beta))
    }

    /// Samples `(2π)^{−s/2} Σ_k dp^s e^{ip·x} amps(p)` on the dual lattice.
    pub fn to_config(&self, oversample: usize) -> (ConfigLattice, Vec<Complex64>) {
        let g = &self.grid;
        let lat = g.config_lattice(oversample);
        let mpts = lat.points;
        let n = g.n_per_axis();
        let s = g.dim();
        let mut data = vec![Complex64::new(0.0, 0.0); lat.len()];
        let off = (mpts - n) / 2;
        for i in 0..g.len() {
            let idx = g.axis_indices(i);
            let fine: Vec<usize> = idx.iter().map(|k| k + off).collect();
            let flat = fine.iter().fold(0, |acc, &k| acc * mpts + k);
            data[flat] = self.amps[i];
        }
        let (pre, post) = dft_phases(mpts, 1.0);
        apply_separable(&mut data, s, mpts, &pre);
        fft_nd(&mut data, &vec![mpts; s], FftDirection::Inverse);
        apply_separable(&mut data, s, mpts, &post);
        let norm = (2.0 * PI).powf(-(s as f64) / 2.0) * g.cell_weight();
        for d in &mut data {
            *d *= norm;
        }
        (lat, data)
    }

    /// `(2π)^{−s/2} ∫ e^{−ip·x} f(x) d^sx` evaluated by the midpoint rule on
    /// the dual lattice refined `oversample` times.
    pub fn from_config<F: Fn(&[f64]) -> Complex64>(grid: &Arc<MomentumGrid>, oversample: usize, f: F) -> SPVector {
        let lat = grid.config_lattice(oversample);
        let mut x = vec![0.0; grid.dim()];
        let samples: Vec<Complex64> = (0..lat.len())
            .map(|i| {
                lat.point(i, &mut x);
                f(&x)
            })
            .collect();
        Self::from_config_samples(grid, &lat, samples)
    }

    pub fn from_config_samples(grid: &Arc<MomentumGrid>, lat: &ConfigLattice, mut data: Vec<Complex64>) -> SPVector {
        let s = grid.dim();
        let mpts = lat.points;
        let n = grid.n_per_axis();
        let (pre, post) = dft_phases(mpts, -1.0);
        apply_separable(&mut data, s, mpts, &pre);
        fft_nd(&mut data, &vec![mpts; s], FftDirection::Forward);
        apply_separable(&mut data, s, mpts, &post);
        let norm = (2.0 * PI).powf(-(s as f64) / 2.0) * lat.cell_volume();
        let off = (mpts - n) / 2;
        let amps = (0..grid.len())
            .map(|i| {
                let flat = grid.axis_indices(i).iter().fold(0, |acc, &k| acc * mpts + k + off);
                data[flat] * norm
            })
            .collect();
        SPVector { grid: grid.clone(), amps }
    }
}

/// Per-axis phases turning the symmetric-lattice transform
/// `Σ_j e^{σ2πi(k−c)(j−c)/M}` into an ordinary DFT.
fn dft_phases(mpts: usize, sigma: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let c = (mpts as f64 - 1.0) / 2.0;
    let mf = mpts as f64;
    let pre: Vec<Complex64> = (0..mpts).map(|j| Complex64::from_polar(1.0, -sigma * 2.0 * PI * c * j as f64 / mf)).collect();
    let post: Vec<Complex64> = (0..mpts)
        .map(|k| Complex64::from_polar(1.0, sigma * 2.0 * PI * (c * c / mf - c * k as f64 / mf)))
        .collect();
    (pre, post)
}

fn apply_separable(data: &mut [Complex64], s: usize, mpts: usize, phase: &[Complex64]) {
    let mut idx = vec![0usize; s];
    for d in data.iter_mut() {
        let mut f = Complex64::new(1.0, 0.0);
        for &k in &idx {
            f *= phase[k];
        }
        *d *= f;
        for a in (0..s).rev() {
            idx[a] += 1;
            if idx[a] < mpts {
                break;
            }
            idx[a] = 0;
        }
    }
}

/// `exp(−1/(1−(|x|/r)²))` inside the ball of radius `r`, zero outside.
pub fn mollifier(x: &[f64], r: f64) -> f64 {
    let q = x.iter().map(|v| v * v).sum::<f64>() / (r * r);
    if q >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - q)).exp()
    }
}

/// Smooth step equal to 1 for `t ≤ 0` and 0 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    let psi = |u: f64| if u <= 0.0 { 0.0 } else { (-1.0 / u).exp() };
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let a = psi(1.0 - t);
        a / (a + psi(t))
    }
}

/// `χ_E(p)`: 1 on `{ω ≤ E}`, 0 outside `{ω ≤ E + m + 1}`.
pub fn chi_energy(omega: f64, energy: f64, m: f64) -> f64 {
    smooth_step((omega - energy) / (m + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rand_vec(grid: &Arc<MomentumGrid>, seed: u64) -> SPVector {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let amps = (0..grid.len()).map(|_| Complex64::new(next(), next())).collect();
        SPVector { grid: grid.clone(), amps }
    }

    #[test]
    fn grid_basics() {
        let g = MomentumGrid::new(2, 0.0, 1.0, 4).unwrap();
        assert_eq!(g.len(), 16);
        assert!(g.omegas().iter().all(|&w| w > 0.0));
        for i in 0..g.len() {
            let j = g.neg_index(i);
            for (a, b) in g.point(i).iter().zip(g.point(j)) {
                assert_eq!(*a, -*b);
            }
            assert_eq!(g.cell_containing(g.point(i)), Some(i));
        }
        assert!(MomentumGrid::new(1, 1.0, 1.0, 5).is_err());
        assert!(MomentumGrid::new(5, 1.0, 1.0, 4).is_err());
    }

    #[test]
    fn sobolev_examples() {
        let g = MomentumGrid::new(1, 1.0, 2.0, 4).unwrap();
        let z = SPVector::zeros(&g);
        assert_eq!(z.sobolev_norm(3.0), 0.0);
        let f = rand_vec(&g, 3);
        assert!((f.sobolev_norm(0.0) - f.norm()).abs() < 1e-14);
        let g = MomentumGrid::new(1, 0.0, 4.0 / 3.0, 4).unwrap();
        let cell = g.cell_containing(&[1.0]).unwrap();
        assert!((g.point(cell)[0] - 1.0).abs() < 1e-12);
        let e = SPVector::cell_indicator(&g, cell);
        assert!((e.norm() - 1.0).abs() < 1e-14);
        assert!((e.sobolev_norm(1.0) - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn translation_and_conjugation() {
        let g = MomentumGrid::new(2, 0.5, 3.0, 8).unwrap();
        let f = rand_vec(&g, 11);
        assert!((f.translate(0.0, &[0.0, 0.0]).sub(&f)).norm() < 1e-15);
        let t = f.translate(1.3, &[0.2, -4.0]);
        assert!((t.norm() - f.norm()).abs() < 1e-13);
        let tt = t.translate(-0.3, &[1.0, 1.0]);
        let direct = f.translate(1.0, &[1.2, -3.0]);
        assert!(tt.sub(&direct).norm() < 1e-12);
        let h = rand_vec(&g, 12);
        let lhs = f.conj_j().inner(&h.conj_j());
        assert!((lhs - f.inner(&h).conj()).norm() < 1e-12);
        assert!(f.conj_j().conj_j().sub(&f).norm() == 0.0);
    }

    #[test]
    fn config_transform_round_trip_and_gaussian() {
        let g = MomentumGrid::new(1, 1.0, 12.0, 64).unwrap();
        // FT of e^{−x²/2} is e^{−p²/2} in the unitary convention
        let v = SPVector::from_config(&g, 2, |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0));
        for i in 0..g.len() {
            let p = g.point(i)[0];
            assert!((v.amps[i] - Complex64::new((-p * p / 2.0).exp(), 0.0)).norm() < 1e-12);
        }
        let (lat, xs) = v.to_config(1);
        let mut x = [0.0];
        for (i, val) in xs.iter().enumerate() {
            lat.point(i, &mut x);
            assert!((val - Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0)).norm() < 1e-12);
        }
        // shift theorem: f(x − a) ↦ e^{−ipa} f̃(p)
        let a = 0.7;
        let w = SPVector::from_config(&g, 2, |x| Complex64::new((-(x[0] - a).powi(2) / 2.0).exp(), 0.0));
        let want = v.translate(0.0, &[a]);
        assert!(w.sub(&want).norm() < 1e-11);
    }

    #[test]
    fn steps() {
        assert_eq!(smooth_step(-1.0), 1.0);
        assert_eq!(smooth_step(1.0), 0.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(chi_energy(2.0, 2.0, 1.0), 1.0);
        assert_eq!(chi_energy(4.0, 2.0, 1.0), 0.0);
        assert_eq!(mollifier(&[1.0], 1.0), 0.0);
        assert!((mollifier(&[0.0, 0.0], 2.0) - (-1f64).exp()).abs() < 1e-15);
    }
}
