use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fockscope_bench::{gaussian_3d, ladder_word, scattered_points, small_fock};
use fockscope_core::epsilon_content::{eps_content, Norm, PointCloud};
use fockscope_core::fock::operator_norm_on_pe;
use fockscope_core::multiindex::multinomial_sum;
use num_complex::Complex64;

fn eps_content_20(c: &mut Criterion) {
    let cloud = PointCloud::from_real(&scattered_points(20), Norm::Euclidean).unwrap();
    c.bench_function("eps_content 20 points", |b| b.iter(|| eps_content(black_box(&cloud), 0.9).unwrap()));
}

fn multinomial(c: &mut Criterion) {
    let t: Vec<Complex64> = (0..5).map(|j| Complex64::new(0.1 * j as f64, 0.3)).collect();
    c.bench_function("multinomial_sum 5 terms k=8", |b| b.iter(|| multinomial_sum(black_box(&t), 8).unwrap()));
}

fn word_norm(c: &mut Criterion) {
    let (space, basis) = small_fock(5);
    let word = ladder_word(&basis);
    let e = (0..space.dim()).map(|i| space.energy(i)).fold(0.0, f64::max);
    c.bench_function("operator_norm_on_pe 4 modes n_max 5", |b| b.iter(|| operator_norm_on_pe(&space, black_box(&word), e, 1e-6, 200)));
}

fn config_transform(c: &mut Criterion) {
    let f = gaussian_3d(24);
    c.bench_function("to_config 24^3 oversample 2", |b| b.iter(|| black_box(&f).to_config(2)));
}

criterion_group!(kernels, eps_content_20, multinomial, word_norm, config_transform);
criterion_main!(kernels);
