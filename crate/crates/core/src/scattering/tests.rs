use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::*;
use crate::error::Error;
use crate::fock::{FockSpace, FockState, ModeBasis};
use crate::single_particle::{mollifier, MomentumGrid, SPVector};
use crate::weyl_wick::FiniteRankFunctional;

fn packet_grid() -> Arc<MomentumGrid> {
    MomentumGrid::new(3, 1.0, 0.8, 16).unwrap()
}

#[test]
fn kg_time_zero_and_unitarity() {
    let g = packet_grid();
    let f = KGWavepacket::bump(&g, &[0.1, 0.0, -0.1], 0.5, 2).unwrap();
    let snap = kg_propagate(&f, 0.0);
    let back = SPVector::from_config_samples(&g, &snap.lattice, snap.values.clone());
    let err = back.sub(&f.ftilde).norm() / f.ftilde.norm();
    assert!(err < 1e-12, "{err}");
    let n0 = f.ftilde.norm();
    for t in [0.0, 3.0, 17.5, 60.0] {
        let n = kg_propagate(&f, t).l2_norm();
        assert!((n - n0).abs() < 1e-12 * n0, "t={t}: {n} vs {n0}");
    }
}

#[test]
fn kg_rejects_support_at_cutoff() {
    let g = packet_grid();
    let r = KGWavepacket::bump(&g, &[0.0, 0.0, 0.0], 0.95, 1);
    assert!(matches!(r, Err(Error::Config(_))));
}

#[test]
fn radial_packet_matches_grid_norm() {
    let f = RadialPacket::new(1.0, RadialProfile::Gaussian { sigma: 1.0, cutoff: 3.0 }).unwrap();
    let n = f.momentum_l2();
    for t in [0.0, 10.0, 40.0] {
        let s = f.snapshot(t, 40.0);
        assert!((s.l2_norm() - n).abs() < 1e-6 * n);
    }
    let (rs, lat) = f.lattice(25.0, 80.0, 0.2);
    let direct = f.values(25.0, &rs);
    for (a, b) in lat.iter().zip(&direct) {
        assert!((a - b).norm() < 1e-8);
    }
}

#[test]
fn dispersion_exponents() {
    let f = RadialPacket::new(1.0, RadialProfile::Gaussian { sigma: 1.0, cutoff: 3.0 }).unwrap();
    let ts = [10.0, 14.0, 20.0, 28.0, 40.0, 56.0, 80.0];
    let d = radial_dispersion_fit(&f, &ts, 30.0).unwrap();
    assert!((d.sup_fit.slope + 1.5).abs() <= 0.1, "{}", d.sup_fit.slope);
    assert!(d.l1_fit.slope <= 1.6, "{}", d.l1_fit.slope);
}

fn hr_spec(w: f64, nu: f64) -> HRCreationSpec {
    HRCreationSpec::new(HRTimeProfile::new(w).unwrap(), nu).unwrap()
}

#[test]
fn time_profile_normalisation() {
    let spec = hr_spec(2.0, 0.25);
    let want = (2.0 * PI).powf(-1.5);
    assert!((spec.profile.integral() - want).abs() < 1e-12);
    for t_big in [4.0, 50.0] {
        let s = spec.s(t_big);
        let total = crate::quadrature::gauss_legendre_composite(|t| spec.h_t(t_big, t), t_big - 60.0 * s, t_big + 60.0 * s, 400, 8);
        assert!((total - want).abs() < 1e-9, "{total}");
    }
    for u in [0.0, 0.3, 1.7, 9.0] {
        assert!(spec.profile.h(u) >= 0.0);
    }
    assert_eq!(spec.profile.transform(4.0), 0.0);
    assert!(HRCreationSpec::new(HRTimeProfile::new(1.0).unwrap(), 1.0).is_err());
}

#[test]
fn velocity_split_parts() {
    let f = RadialPacket::new(1.0, RadialProfile::Gaussian { sigma: 1.0, cutoff: 3.0 }).unwrap();
    let spec = hr_spec(2.0, 0.25);
    for (t, r) in [(30.0, 5.0), (31.0, 40.0), (12.0, 2.0), (50.0, 45.0)] {
        let (hat, check, full) = split_point(&f, &spec, 0.5, 32.0, t, r);
        assert!((hat + check - full).norm() <= 1e-12 * (1.0 + full.norm()));
    }
    let v = f.max_velocity();
    for r in [0.0, 10.0, 32.0 * v] {
        let (_, check, _) = split_point(&f, &spec, 0.5, 32.0, 32.0, r);
        assert_eq!(check, Complex64::new(0.0, 0.0));
    }
    assert!(velocity_split(&f, &spec, 0.0, 16.0, 40.0).is_err());
    assert!(velocity_split(&f, &spec, 1.5, 16.0, 40.0).is_err());
}

#[test]
fn velocity_split_tail_decay() {
    let f = RadialPacket::new(1.0, RadialProfile::Gaussian { sigma: 1.0, cutoff: 3.0 }).unwrap();
    let spec = hr_spec(2.0, 0.25);
    let ts = [16.0, 32.0, 64.0];
    let tails: Vec<f64> = ts.iter().map(|&t| velocity_split(&f, &spec, 0.5, t, 40.0).unwrap().tail).collect();
    assert!(tails.windows(2).all(|w| w[1] <= w[0]), "{tails:?}");
    let fit = crate::fit::power_law_fit(&ts, &tails, 0.0).unwrap();
    let (n, n0) = (3.0, 5.0);
    assert!(fit.slope <= -(n - (n + n0) * 0.25) + 0.3, "{}", fit.slope);
}

fn line_grid() -> Arc<MomentumGrid> {
    MomentumGrid::new(1, 1.0, 3.0, 32).unwrap()
}

fn packet(grid: &Arc<MomentumGrid>, center: f64, radius: f64) -> SPVector {
    SPVector::from_fn(grid, |p, _| Complex64::new(mollifier(&[p[0] - center], radius), 0.0))
}

fn smearing(grid: &Arc<MomentumGrid>) -> SPVector {
    SPVector::from_fn(grid, |p, w| Complex64::new(mollifier(&[p[0]], 2.9) / (2.0 * w).sqrt(), 0.1 * p[0]))
}

#[test]
fn single_creator_is_time_independent() {
    let grid = line_grid();
    let spec = HRFockSpec { ftilde: packet(&grid, 1.0, 0.6), g: smearing(&grid), time: hr_spec(6.0, 0.5) };
    let rep = asymptotic_state_convergence(std::slice::from_ref(&spec), &[2.0, 8.0, 16.0, 32.0, 64.0]).unwrap();
    let space = rep.limit().space.clone();
    let c = space.basis.coefficients(&spec.creator_vector()).unwrap();
    let oracle = FockState::vacuum(&space).create_coeffs(&c).0;
    for s in &rep.states {
        assert!(s.sub(&oracle).norm() <= 1e-10);
    }
    assert!(rep.sum_of_differences <= 1e-10);
}

#[test]
fn two_creators_stabilise() {
    let grid = line_grid();
    let g = smearing(&grid);
    let specs = [
        HRFockSpec { ftilde: packet(&grid, 1.0, 0.6), g: g.clone(), time: hr_spec(6.0, 0.5) },
        HRFockSpec { ftilde: packet(&grid, -1.0, 0.6), g: g.clone(), time: hr_spec(6.0, 0.5) },
    ];
    let rep = asymptotic_state_convergence(&specs, &[8.0, 16.0, 32.0, 64.0]).unwrap();
    assert!(rep.differences[0] > 0.0);
    assert!(rep.differences.windows(2).all(|w| w[1] <= w[0]), "{:?}", rep.differences);
    assert!(*rep.differences.last().unwrap() <= 1e-14);

    let space = rep.limit().space.clone();
    let slow: Vec<HRFockSpec> = specs.iter().map(|s| HRFockSpec { time: hr_spec(6.0, 0.2), ..s.clone() }).collect();
    let a = asymptotic_states_on(&space, &specs, &[1e6]).unwrap();
    let b = asymptotic_states_on(&space, &slow, &[1e6]).unwrap();
    assert!(a.limit().sub(b.limit()).norm() <= 1e-6);
}

#[test]
fn overlapping_velocities_rejected() {
    let grid = line_grid();
    let g = smearing(&grid);
    let specs = [
        HRFockSpec { ftilde: packet(&grid, 1.0, 0.6), g: g.clone(), time: hr_spec(6.0, 0.5) },
        HRFockSpec { ftilde: packet(&grid, 1.3, 0.6), g, time: hr_spec(6.0, 0.5) },
    ];
    assert!(matches!(asymptotic_state_convergence(&specs, &[8.0]), Err(Error::Precondition(_))));
}

#[test]
fn scalar_product_factorises() {
    let grid = line_grid();
    let g = smearing(&grid).scale_real(10.0);
    let mk = |c: f64, r: f64| HRFockSpec { ftilde: packet(&grid, c, r), g: g.clone(), time: hr_spec(6.0, 0.5) };
    let fam = [mk(1.0, 0.6), mk(-1.0, 0.6)];
    let hat = [mk(-0.9, 0.5), mk(1.1, 0.7)];
    let all: Vec<HRFockSpec> = fam.iter().chain(&hat).cloned().collect();
    let space = FockSpace::new(hr_fock_space(&all).unwrap().basis.clone(), 2).unwrap();
    let a = asymptotic_states_on(&space, &fam, &[1e4]).unwrap();
    let b = asymptotic_states_on(&space, &hat, &[1e4]).unwrap();
    let lhs = a.limit().inner(b.limit());
    let fs: Vec<SPVector> = fam.iter().map(|s| s.creator_vector()).collect();
    let fh: Vec<SPVector> = hat.iter().map(|s| s.creator_vector()).collect();
    let rhs = permanent_overlap(&fs, &fh).unwrap();
    assert!(rhs.norm() > 1e-5);
    assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm(), "{lhs} vs {rhs}");
}

fn detector_space() -> (Arc<FockSpace>, SPVector) {
    let grid = MomentumGrid::new(1, 1.0, 2.0, 16).unwrap();
    let cells: Vec<usize> = (4..12).collect();
    let space = FockSpace::new(ModeBasis::cell_indicators(&grid, &cells).unwrap(), 2).unwrap();
    let mut g = SPVector::zeros(&grid);
    for &c in &cells {
        g.amps[c] = Complex64::new(0.5 + 0.05 * c as f64, -0.1 * c as f64 + 0.4);
    }
    (space, g)
}

#[test]
fn detector_vacuum_and_one_particle() {
    let (space, g) = detector_space();
    let times = [0.0, 5.0, 40.0, 300.0];
    let vac = detector_integral(&FiniteRankFunctional::vacuum(&space), &g, &times).unwrap();
    assert!(vac.values.iter().all(|v| v.norm() == 0.0));
    let mut occ = vec![0u8; space.modes()];
    occ[3] = 1;
    let one = FockState::basis_state(&space, &occ).unwrap();
    let e = space.basis.energies[3] + 1e-9;
    let phi = FiniteRankFunctional::rank_one(one.clone(), one, e).unwrap();
    let rep = detector_integral(&phi, &g, &times).unwrap();
    let v0 = rep.values[0];
    assert!(v0.re > 0.0);
    for v in &rep.values {
        assert!((v - v0).norm() <= 1e-8 * v0.norm());
        assert!(v.norm() <= rep.majorant * (1.0 + 1e-12));
    }
    // number-diagonal oracle: L^s |c_3|²
    let c = space.basis.coefficients(&g).unwrap();
    let lat = g.grid.config_lattice(1);
    let want = c[3].norm_sqr() * lat.cell_volume() * lat.len() as f64;
    assert!((v0.re - want).abs() <= 1e-10 * want);
}
