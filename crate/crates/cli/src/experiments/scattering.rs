//! Klein-Gordon dispersion, velocity-support splitting, Haag-Ruelle
//! asymptotic states in the free field, scalar-product factorization and
//! detector sums.

use std::sync::Arc;

use fockscope_core::fit::power_law_fit;
use fockscope_core::scattering::{
    asymptotic_state_convergence, asymptotic_states_on, detector_integral, hr_fock_space, permanent_overlap, radial_dispersion_fit,
    velocity_split, HRCreationSpec, HRFockSpec, HRTimeProfile, KGWavepacket, RadialPacket, RadialProfile,
};
use fockscope_core::single_particle::mollifier;
use fockscope_core::weyl_wick::FiniteRankFunctional;
use fockscope_core::{FockSpace, FockState, ModeBasis, MomentumGrid, SPVector};
use num_complex::Complex64;
use serde_json::json;

use super::max_of;
use crate::config::{key, Kind};
use crate::{Context, Experiment, Outcome, Record, RunError};

pub const EXPERIMENT: Experiment = Experiment {
    name: "scattering",
    about: "Klein-Gordon dispersion exponents, velocity-split tails, free-field Haag-Ruelle asymptotic states, scalar-product factorization, detector sums",
    keys: &[
        key("mass", Kind::Positive, "1"),
        key("radial.sigma", Kind::Positive, "1"),
        key("radial.cutoff", Kind::Positive, "3"),
        key("radial.times", Kind::FloatList, "10,14,20,28,40,56,80"),
        key("radial.margin", Kind::Positive, "30"),
        key("radial.sup_exponent", Kind::Float, "-1.5"),
        key("radial.sup_tolerance", Kind::Positive, "0.1"),
        key("radial.l1_max_exponent", Kind::Float, "1.6"),
        key("split.width", Kind::Positive, "2"),
        key("split.nu", Kind::Positive, "0.25"),
        key("split.delta", Kind::Positive, "0.5"),
        key("split.times", Kind::FloatList, "16,32,64"),
        key("split.margin", Kind::Positive, "40"),
        key("split.order", Kind::Positive, "3"),
        key("split.n0", Kind::Positive, "5"),
        key("split.slack", Kind::Positive, "0.3"),
        key("kg.n_per_axis", Kind::PositiveCount, "24"),
        key("kg.half_width", Kind::Positive, "1.2"),
        key("kg.radius", Kind::Positive, "0.6"),
        key("kg.oversample", Kind::PositiveCount, "2"),
        key("kg.times", Kind::FloatList, "0,10,40,80"),
        key("kg.tolerance", Kind::Positive, "1e-12"),
        key("hr.half_width", Kind::Positive, "3"),
        key("hr.n_per_axis", Kind::PositiveCount, "32"),
        key("hr.width", Kind::Positive, "6"),
        key("hr.nu", Kind::Positive, "0.5"),
        key("hr.slow_nu", Kind::Positive, "0.2"),
        key("hr.times", Kind::FloatList, "8,16,32,64"),
        key("hr.limit_time", Kind::Positive, "1e6"),
        key("hr.tolerance", Kind::Positive, "1e-10"),
        key("hr.nu_tolerance", Kind::Positive, "1e-6"),
        key("hr.overlap_tolerance", Kind::Positive, "1e-8"),
        key("detector.times", Kind::FloatList, "0,5,40,300"),
        key("detector.tolerance", Kind::Positive, "1e-8"),
    ],
    randomized: false,
    run,
};

fn run(ctx: &Context) -> Result<Outcome, RunError> {
    let mut out = Outcome::default();
    dispersion(ctx, &mut out)?;
    split(ctx, &mut out)?;
    kg_grid(ctx, &mut out)?;
    asymptotic(ctx, &mut out)?;
    detector(ctx, &mut out)?;
    Ok(out)
}

/// Power-law exponents of `sup|f(t)|` and `∫|f(t)|` for a radial `s = 3` packet.
fn dispersion(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let f = RadialPacket::new(c.f64("mass"), RadialProfile::Gaussian { sigma: c.f64("radial.sigma"), cutoff: c.f64("radial.cutoff") })?;
    let d = radial_dispersion_fit(&f, &c.f64s("radial.times"), c.f64("radial.margin"))?;
    for (t, (s, l)) in d.times.iter().zip(d.sup.iter().zip(&d.l1)) {
        out.push(Record::info(format!("t{t}"), "sup_norm", *s));
        out.push(Record::info(format!("t{t}"), "l1_norm", *l));
    }
    let (want, tol) = (c.f64("radial.sup_exponent"), c.f64("radial.sup_tolerance"));
    out.push(Record::between("radial-s3", "sup_exponent", d.sup_fit.slope, want - tol, want + tol, "Klein-Gordon sup-norm decay"));
    out.push(Record::upper("radial-s3", "l1_exponent", d.l1_fit.slope, c.f64("radial.l1_max_exponent"), "Klein-Gordon L1 growth"));
    out.field("sup_exponent", d.sup_fit.slope);
    out.field("l1_exponent", d.l1_fit.slope);
    Ok(())
}

/// `∫|f̌_T|` over `T`, monotone with log-slope `≤ −(N − (N+N₀)ν) + slack`.
fn split(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let f = RadialPacket::new(c.f64("mass"), RadialProfile::Gaussian { sigma: c.f64("radial.sigma"), cutoff: c.f64("radial.cutoff") })?;
    let nu = c.f64("split.nu");
    let spec = HRCreationSpec::new(HRTimeProfile::new(c.f64("split.width"))?, nu)?;
    let ts = c.f64s("split.times");
    let (delta, margin) = (c.f64("split.delta"), c.f64("split.margin"));
    let parts = ctx.try_par_map(&ts, |_, &t| Ok(velocity_split(&f, &spec, delta, t, margin)?))?;
    let tails: Vec<f64> = parts.iter().map(|p| p.tail).collect();
    for (t, p) in ts.iter().zip(&parts) {
        out.push(Record::info(format!("T{t}"), "tail", p.tail));
        out.push(Record::info(format!("T{t}"), "dominant", p.dominant));
    }
    for (w, t) in tails.windows(2).zip(&ts[1..]) {
        out.push(Record::upper(format!("T{t}"), "tail_step", w[1], w[0], "velocity-split tail nonincreasing"));
    }
    let fit = power_law_fit(&ts, &tails, 0.0)?;
    let (n, n0) = (c.f64("split.order"), c.f64("split.n0"));
    out.push(Record::upper("split", "tail_exponent", fit.slope, -(n - (n + n0) * nu) + c.f64("split.slack"), "velocity-split tail decay"));
    out.field("tail_exponent", fit.slope);
    out.field("tails", json!(tails));
    Ok(())
}

/// Unitarity of the spectral propagation on a three-dimensional grid.
fn kg_grid(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let grid = MomentumGrid::new(3, c.f64("mass"), c.f64("kg.half_width"), c.usize("kg.n_per_axis"))?;
    out.grid(grid.fingerprint());
    let f = KGWavepacket::bump(&grid, &[0.1, 0.0, -0.1], c.f64("kg.radius"), c.usize("kg.oversample"))?;
    let n0 = f.ftilde.norm();
    let tol = c.f64("kg.tolerance");
    let times = c.f64s("kg.times");
    let drifts = ctx.par_map(&times, |_, &t| (f.propagate(t).l2_norm() - n0).abs() / n0);
    for (t, d) in times.iter().zip(&drifts) {
        out.push(Record::upper(format!("grid-t{t}"), "norm_drift", *d, tol, "unitary Klein-Gordon propagation"));
    }
    let snap = f.propagate(0.0);
    let back = SPVector::from_config_samples(&grid, &snap.lattice, snap.values);
    out.push(Record::upper("grid-t0", "round_trip", back.sub(&f.ftilde).norm() / n0, tol, "propagation at t = 0 is the identity"));
    out.field("kg_max_drift", max_of(drifts));
    Ok(())
}

fn bump_packet(grid: &Arc<MomentumGrid>, center: f64, radius: f64) -> SPVector {
    SPVector::from_fn(grid, |p, _| Complex64::new(mollifier(&[p[0] - center], radius), 0.0))
}

fn smearing(grid: &Arc<MomentumGrid>) -> SPVector {
    SPVector::from_fn(grid, |p, w| Complex64::new(mollifier(&[p[0]], 0.97 * grid.half_width()) / (2.0 * w).sqrt(), 0.1 * p[0]))
}

/// Free-field asymptotic states: one creator is exact, two stabilise, the
/// limit ignores `ν`, and overlaps factorise into permanents.
fn asymptotic(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let grid = MomentumGrid::new(1, c.f64("mass"), c.f64("hr.half_width"), c.usize("hr.n_per_axis"))?;
    out.grid(grid.fingerprint());
    let time = HRCreationSpec::new(HRTimeProfile::new(c.f64("hr.width"))?, c.f64("hr.nu"))?;
    let slow_time = HRCreationSpec::new(HRTimeProfile::new(c.f64("hr.width"))?, c.f64("hr.slow_nu"))?;
    let g = smearing(&grid);
    let mk = |center: f64, radius: f64, g: &SPVector| HRFockSpec { ftilde: bump_packet(&grid, center, radius), g: g.clone(), time: time.clone() };
    let times = c.f64s("hr.times");
    let (tol, limit_t) = (c.f64("hr.tolerance"), c.f64("hr.limit_time"));

    let one = mk(1.0, 0.6, &g);
    let rep = asymptotic_state_convergence(std::slice::from_ref(&one), &times)?;
    let space = rep.limit().space.clone();
    let oracle = FockState::vacuum(&space).create_coeffs(&space.basis.coefficients(&one.creator_vector())?).0;
    let dist = max_of(rep.states.iter().map(|s| s.sub(&oracle).norm()));
    out.push(Record::upper("one-creator", "distance_to_limit", dist, tol, "single creator gives the one-particle limit"));

    let pair = [mk(1.0, 0.6, &g), mk(-1.0, 0.6, &g)];
    let rep = asymptotic_state_convergence(&pair, &times)?;
    for (t, d) in times[1..].iter().zip(&rep.differences) {
        out.push(Record::info(format!("two-creators-T{t}"), "difference", *d));
    }
    for (w, t) in rep.differences.windows(2).zip(&times[2..]) {
        out.push(Record::upper(format!("two-creators-T{t}"), "difference_step", w[1], w[0], "asymptotic state differences nonincreasing"));
    }
    out.push(Record::upper("two-creators", "leakage", rep.leakage, 0.0, "no truncation loss"));
    out.field("two_creator_differences", json!(rep.differences));

    let space = rep.limit().space.clone();
    let slow: Vec<HRFockSpec> = pair.iter().map(|s| HRFockSpec { time: slow_time.clone(), ..s.clone() }).collect();
    let a = asymptotic_states_on(&space, &pair, &[limit_t])?;
    let b = asymptotic_states_on(&space, &slow, &[limit_t])?;
    let nu_gap = a.limit().sub(b.limit()).norm();
    out.push(Record::upper("two-creators", "nu_independence", nu_gap, c.f64("hr.nu_tolerance"), "asymptotic limit independent of nu"));

    let g10 = g.scale_real(10.0);
    let fam = [mk(1.0, 0.6, &g10), mk(-1.0, 0.6, &g10)];
    let hat = [mk(-0.9, 0.5, &g10), mk(1.1, 0.7, &g10)];
    let all: Vec<HRFockSpec> = fam.iter().chain(&hat).cloned().collect();
    let space = FockSpace::new(hr_fock_space(&all)?.basis.clone(), 2)?;
    let lhs = asymptotic_states_on(&space, &fam, &[1e4])?.limit().inner(asymptotic_states_on(&space, &hat, &[1e4])?.limit());
    let fs: Vec<SPVector> = fam.iter().map(|s| s.creator_vector()).collect();
    let fh: Vec<SPVector> = hat.iter().map(|s| s.creator_vector()).collect();
    let rhs = permanent_overlap(&fs, &fh)?;
    out.push(Record::info("overlap", "permanent_abs", rhs.norm()));
    out.push(Record::upper("overlap", "relative_error", (lhs - rhs).norm() / rhs.norm(), c.f64("hr.overlap_tolerance"), "scalar product factorises into a permanent"));
    Ok(())
}

/// `σ^(t)` for the vacuum and for one- and two-particle functionals.
fn detector(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let grid = MomentumGrid::new(1, c.f64("mass"), 2.0, 16)?;
    out.grid(grid.fingerprint());
    let cells: Vec<usize> = (4..12).collect();
    let space = FockSpace::new(ModeBasis::cell_indicators(&grid, &cells)?, 2)?;
    let mut g = SPVector::zeros(&grid);
    for &k in &cells {
        g.amps[k] = Complex64::new(0.5 + 0.05 * k as f64, 0.4 - 0.1 * k as f64);
    }
    let times = c.f64s("detector.times");
    let tol = c.f64("detector.tolerance");

    let vac = detector_integral(&FiniteRankFunctional::vacuum(&space), &g, &times)?;
    out.push(Record::upper("vacuum", "max_value", max_of(vac.values.iter().map(|v| v.norm())), 0.0, "vacuum detector sum vanishes"));

    let coeffs = space.basis.coefficients(&g)?;
    let lat = grid.config_lattice(1);
    let volume = lat.cell_volume() * lat.len() as f64;
    let mut worst: f64 = 0.0;
    for j in 0..space.modes() {
        let mut occ = vec![0u8; space.modes()];
        occ[j] = 1;
        let one = FockState::basis_state(&space, &occ)?;
        let phi = FiniteRankFunctional::rank_one(one.clone(), one, space.basis.energies[j] + 1e-9)?;
        let rep = detector_integral(&phi, &g, &times)?;
        let want = coeffs[j].norm_sqr() * volume;
        let case = format!("one-particle-mode{j}");
        let spread = max_of(rep.values.iter().map(|v| (v.re - want).abs().max(v.im.abs()) / want));
        worst = worst.max(spread);
        out.push(Record::upper(case.clone(), "relative_deviation", spread, tol, "one-particle detector sum is constant"));
        out.push(Record::upper(case, "max_value", max_of(rep.values.iter().map(|v| v.norm())), rep.majorant * (1.0 + 1e-12), "detector sum below the uniform bound"));
    }
    out.field("detector_max_deviation", worst);

    let two: Vec<usize> = (0..space.dim()).filter(|&i| space.number(i) == 2).collect();
    let mut psi = FockState::zero(&space);
    for (k, &i) in two.iter().enumerate() {
        psi.amps[i] = Complex64::new((0.7 * k as f64).cos(), (1.3 * k as f64).sin());
    }
    let psi = psi.scale(Complex64::new(1.0 / psi.norm(), 0.0));
    let phi = FiniteRankFunctional::rank_one(psi.clone(), psi.clone(), psi.max_energy())?;
    let rep = detector_integral(&phi, &g, &times)?;
    for (t, v) in times.iter().zip(&rep.values) {
        out.push(Record::upper(format!("two-particle-t{t}"), "value", v.norm(), rep.majorant * (1.0 + 1e-12), "detector sum below the uniform bound"));
    }
    Ok(())
}
