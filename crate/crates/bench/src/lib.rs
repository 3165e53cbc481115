//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use fockscope_core::fock::OperatorWord;
use fockscope_core::{FockSpace, ModeBasis, MomentumGrid, SPVector};
use num_complex::Complex64;

/// `n` scattered points in the plane, fixed across runs.
pub fn scattered_points(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| vec![(i as f64 * 1.618).sin() * 2.0, (i as f64 * 2.414).cos() * 2.0]).collect()
}

/// Four cell modes on a massive line grid, `n_max` particles.
pub fn small_fock(n_max: usize) -> (Arc<FockSpace>, ModeBasis) {
    let grid = MomentumGrid::new(1, 1.0, 3.0, 16).expect("grid");
    let basis = ModeBasis::cell_indicators(&grid, &[6, 7, 8, 9]).expect("basis");
    (FockSpace::new(basis.clone(), n_max).expect("space"), basis)
}

/// `a(f) a*(g) a(f)` with `f`, `g` spread over all modes.
pub fn ladder_word(basis: &ModeBasis) -> OperatorWord {
    let f = basis.vector(&[Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.5), Complex64::new(-0.3, 0.0), Complex64::new(0.2, -0.1)]);
    let g = basis.vector(&[Complex64::new(0.1, 0.0), Complex64::new(0.9, 0.0), Complex64::new(0.0, 0.4), Complex64::new(0.3, 0.3)]);
    OperatorWord::from_letters(vec![
        OperatorWord::ann(basis, &f).expect("in span"),
        OperatorWord::cre(basis, &g).expect("in span"),
        OperatorWord::ann(basis, &f).expect("in span"),
    ])
}

/// A Gaussian bump on an `s = 3` grid with `n` points per axis.
pub fn gaussian_3d(n: usize) -> SPVector {
    let grid = MomentumGrid::new(3, 1.0, 4.0, n).expect("grid");
    SPVector::from_fn(&grid, |p, _| Complex64::new((-p.iter().map(|x| x * x).sum::<f64>()).exp(), 0.0))
}
