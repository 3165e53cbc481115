mod clustering;
mod coincidence;
mod energy_bounds;
mod eps_content;
mod infrared;
mod mollifier;
mod nuclearity;
mod qm_translations;
mod scattering;

use std::sync::Arc;

use fockscope_core::MomentumGrid;
use num_complex::Complex64;
use rand::Rng;

use crate::Experiment;

pub static ALL: &[Experiment] = &[
    infrared::EXPERIMENT,
    energy_bounds::EXPERIMENT,
    nuclearity::EXPERIMENT,
    clustering::EXPERIMENT,
    eps_content::EXPERIMENT,
    coincidence::EXPERIMENT,
    mollifier::EXPERIMENT,
    scattering::EXPERIMENT,
    qm_translations::EXPERIMENT,
];

fn random_complex<R: Rng>(rng: &mut R, d: usize, scale: f64) -> Vec<Complex64> {
    (0..d).map(|_| Complex64::new(scale * rng.gen_range(-1.0..1.0), scale * rng.gen_range(-1.0..1.0))).collect()
}

fn coeff_norm(c: &[Complex64]) -> f64 {
    c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// The `count` cells of lowest `ω`, ties broken by index.
fn lowest_cells(grid: &Arc<MomentumGrid>, count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..grid.len()).collect();
    idx.sort_by(|&a, &b| grid.omega(a).total_cmp(&grid.omega(b)).then(a.cmp(&b)));
    idx.truncate(count);
    idx.sort_unstable();
    idx
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}
