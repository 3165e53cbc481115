use std::sync::Arc;

use fockscope_core::epsilon_content::{eps_content, key_key_bound, product_compose_bound, Norm, PointCloud};
use fockscope_core::multiindex::multinomial_sum;
use fockscope_core::phase_space::NPointConfig;
use fockscope_core::weyl_wick::{composition_phase, vacuum_weyl_expectation, WeylWord};
use fockscope_core::{FockSpace, FockState, ModeBasis, MomentumGrid, MultiIndex, SPVector};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> Arc<MomentumGrid> {
    MomentumGrid::new(1, 1.0, 4.0, 8).unwrap()
}

fn sp_vector(parts: &[(f64, f64)]) -> SPVector {
    let g = grid();
    let mut v = SPVector::zeros(&g);
    for (a, &(re, im)) in v.amps.iter_mut().zip(parts) {
        *a = Complex64::new(re, im);
    }
    v
}

fn amps() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 8)
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

fn points(max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 2), 1..=max)
}

/// Largest subset with pairwise Euclidean distance `> eps`, by trying every subset.
fn exhaustive_content(pts: &[Vec<f64>], eps: f64) -> usize {
    let n = pts.len();
    let far = |i: usize, j: usize| pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() > eps;
    (1u32..1 << n)
        .filter(|mask| (0..n).all(|i| mask >> i & 1 == 0 || (i + 1..n).all(|j| mask >> j & 1 == 0 || far(i, j))))
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

fn content(pts: &[Vec<f64>], eps: f64) -> usize {
    eps_content(&PointCloud::from_real(pts, Norm::Euclidean).unwrap(), eps).unwrap().value
}

fn multi(counts: Vec<u32>) -> MultiIndex {
    MultiIndex::from_dense(&counts)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiindex_addition_laws(a in prop::collection::vec(0u32..3, 4), b in prop::collection::vec(0u32..3, 4), c in prop::collection::vec(0u32..3, 4)) {
        let (a, b, c) = (multi(a), multi(b), multi(c));
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.add(&b).len(), a.len() + b.len());
        prop_assert!(a.add(&b).factorial().unwrap() >= a.factorial().unwrap() * b.factorial().unwrap());
    }

    #[test]
    fn multinomial_sum_is_power_of_sum(t in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..5), k in 0usize..=8) {
        let t: Vec<Complex64> = t.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        let direct = t.iter().sum::<Complex64>().powu(k as u32);
        let scale: f64 = t.iter().map(|z| z.norm()).sum::<f64>().powi(k as i32).max(1.0);
        prop_assert!((multinomial_sum(&t, k).unwrap() - direct).norm() <= 1e-12 * scale);
    }

    #[test]
    fn conjugation_is_antiunitary(f in amps(), g in amps()) {
        let (f, g) = (sp_vector(&f), sp_vector(&g));
        let (jf, jg) = (f.conj_j(), g.conj_j());
        prop_assert!(close(jf.inner(&jg), f.inner(&g).conj(), 1e-12));
        prop_assert!(close(jf.conj_j().inner(&g), f.inner(&g), 1e-12));
    }

    #[test]
    fn sobolev_norms_grow_with_order(f in amps(), l1 in 0.0..3.0f64, dl in 0.0..2.0f64) {
        let f = sp_vector(&f);
        prop_assert!(f.sobolev_norm(l1) <= f.sobolev_norm(l1 + dl) * (1.0 + 1e-14));
        prop_assert!((f.sobolev_norm(0.0) - f.norm()).abs() <= 1e-12 * (1.0 + f.norm()));
    }

    #[test]
    fn translations_compose(f in amps(), t1 in -5.0..5.0f64, x1 in -5.0..5.0f64, t2 in -5.0..5.0f64, x2 in -5.0..5.0f64) {
        let f = sp_vector(&f);
        let twice = f.translate(t1, &[x1]).translate(t2, &[x2]);
        let once = f.translate(t1 + t2, &[x1 + x2]);
        prop_assert!(twice.sub(&once).norm() <= 1e-12 * (1.0 + f.norm()));
    }

    #[test]
    fn weyl_phase_is_antisymmetric_and_unimodular(f in amps(), g in amps()) {
        let (f, g) = (sp_vector(&f), sp_vector(&g));
        let (fg, gf) = (composition_phase(&f, &g), composition_phase(&g, &f));
        prop_assert!(close(fg, gf.conj(), 1e-14));
        prop_assert!((fg.norm() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn vacuum_expectation_is_translation_invariant(
        fs in prop::collection::vec(amps(), 1..4),
        t in -10.0..10.0f64,
        x in -10.0..10.0f64,
    ) {
        let word = WeylWord::new(fs.iter().map(|a| sp_vector(a)).collect());
        let moved = word.translate(t, &[x]);
        prop_assert!(close(vacuum_weyl_expectation(&word), vacuum_weyl_expectation(&moved), 1e-12));
    }

    #[test]
    fn commutator_matrix_elements(f in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 3), g in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 3), seed in 0u64..1000) {
        let grid = grid();
        let basis = ModeBasis::cell_indicators(&grid, &[3, 4, 5]).unwrap();
        let space = FockSpace::new(basis.clone(), 4).unwrap();
        let cf: Vec<Complex64> = f.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let cg: Vec<Complex64> = g.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let fv = basis.vector(&cf);
        let gv = basis.vector(&cg);
        // states with at most two particles leave headroom for a* a* a
        let mut psi = FockState::zero(&space);
        let mut phi = FockState::zero(&space);
        for i in 0..space.dim() {
            if space.number(i) <= 2 {
                let h = (seed.wrapping_mul(2_654_435_761).wrapping_add(i as u64 * 40_503)) % 997;
                psi.amps[i] = Complex64::new((h as f64 / 997.0) - 0.5, (i as f64 * 0.37).sin());
                phi.amps[i] = Complex64::new((i as f64 * 0.71).cos(), (h as f64 / 499.0) - 1.0);
            }
        }
        let (cre_psi, _) = psi.apply_creator(&gv).unwrap();
        let a_cre = cre_psi.apply_annihilator(&fv).unwrap();
        let (cre_a, _) = psi.apply_annihilator(&fv).unwrap().apply_creator(&gv).unwrap();
        let lhs = phi.inner(&a_cre.sub(&cre_a));
        let rhs = fv.inner(&gv) * phi.inner(&psi);
        prop_assert!(close(lhs, rhs, 1e-11));
    }

    #[test]
    fn content_matches_exhaustive_search(pts in points(10), eps in 0.05..3.0f64) {
        prop_assert_eq!(content(&pts, eps), exhaustive_content(&pts, eps));
    }

    #[test]
    fn content_decreases_with_eps(pts in points(14), e1 in 0.05..3.0f64, de in 0.0..2.0f64) {
        prop_assert!(content(&pts, e1) >= content(&pts, e1 + de));
    }

    #[test]
    fn content_ignores_duplicated_points(pts in points(10), eps in 0.05..3.0f64) {
        let mut doubled = pts.clone();
        doubled.extend(pts.iter().cloned());
        prop_assert_eq!(content(&pts, eps), content(&doubled, eps));
    }

    #[test]
    fn key_key_bound_monotone(n in 1usize..20, dn in 0usize..20, s in 0.0..1.0f64, ds in 0.0..1.0f64, eps in 0.5..4.0f64) {
        let base = key_key_bound(n, s, eps).unwrap().value;
        prop_assert!(key_key_bound(n + dn, s, eps).unwrap().value >= base);
        prop_assert!(key_key_bound(n, s + ds, eps).unwrap().value >= base);
    }

    #[test]
    fn separation_membership(xs in prop::collection::vec((-20.0..20.0f64, -50.0..50.0f64), 2..6)) {
        let pts: Vec<Vec<f64>> = xs.iter().map(|&(t, x)| vec![t, x]).collect();
        let config = NPointConfig::new(pts.clone()).unwrap();
        let mut delta = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                delta = delta.min((pts[i][1] - pts[j][1]).abs() - (pts[i][0] - pts[j][0]).abs());
            }
        }
        prop_assert!((config.delta() - delta).abs() <= 1e-12);
        prop_assert_eq!(config.in_gamma(0.0), config.delta() > 0.0);
    }
}

#[test]
fn two_point_cloud() {
    let pts = vec![vec![0.0, 0.0], vec![3.0, 0.0]];
    assert_eq!(content(&pts, 2.0), 2);
    assert_eq!(content(&pts, 4.0), 1);
    assert_eq!(content(&pts, 3.0), 1);
}

#[test]
fn zero_norm_key_key_bound_is_one() {
    assert_eq!(key_key_bound(5, 0.0, 1.0).unwrap().value, 1.0);
}

#[test]
fn single_term_composition() {
    let f = |e: f64| (3.0 / e).ceil();
    let terms: [&dyn Fn(f64) -> f64; 1] = [&f];
    assert_eq!(product_compose_bound(&terms, &[0.25], 1.0).unwrap(), 12.0);
    assert!(product_compose_bound(&terms, &[0.3], 1.0).is_err());
}

#[test]
fn content_reaches_one_exactly_when_diameter_drops_below_eps() {
    // a two-point image of a map with norm 1/δ
    for delta in [0.5, 1.0, 2.0, 4.0] {
        let pts = vec![vec![-1.0 / delta], vec![1.0 / delta]];
        for eps in [0.3, 0.7, 1.5] {
            let want = if 2.0 / delta > eps { 2 } else { 1 };
            assert_eq!(content(&pts, eps), want, "δ = {delta}, ε = {eps}");
        }
    }
}
