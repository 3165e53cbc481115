//! Coincidence forms of centred Weyl products evaluated two ways, the
//! residual sum above the energy threshold, and the stress-energy integral.

use std::sync::Arc;

use fockscope_core::weyl_wick::{coincidence_form, stress_energy_integral, FiniteRankFunctional};
use fockscope_core::{FockSpace, FockState, MomentumGrid, ModeBasis, SPVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{max_of, random_complex};
use crate::config::{key, Kind};
use crate::{Context, Experiment, Outcome, Record, RunError};

pub const EXPERIMENT: Experiment = Experiment {
    name: "coincidence",
    about: "coincidence forms of centred Weyl products (direct vs partition sum), vanishing residual sum above 2E/m, stress-energy integral against phi(H)",
    keys: &[
        key("cells.m", Kind::Positive, "1"),
        key("cells.half_width", Kind::Positive, "2"),
        key("cells.n_per_axis", Kind::PositiveCount, "8"),
        key("cells.indices", Kind::CountList, "3,4,5"),
        key("routes.count", Kind::Count, "12"),
        key("routes.max_points", Kind::PositiveCount, "3"),
        key("routes.n_max", Kind::PositiveCount, "44"),
        key("routes.f_norm", Kind::Positive, "0.8"),
        key("routes.tolerance", Kind::Positive, "1e-8"),
        key("residual.count", Kind::Count, "20"),
        key("residual.n_max", Kind::PositiveCount, "4"),
        key("residual.max_energy", Kind::Positive, "2.5"),
        key("residual.tolerance", Kind::Positive, "1e-10"),
        key("stress.count", Kind::Count, "50"),
        key("stress.m", Kind::Positive, "1"),
        key("stress.half_width", Kind::Positive, "2"),
        key("stress.n_per_axis", Kind::PositiveCount, "8"),
        key("stress.n_max", Kind::PositiveCount, "2"),
        key("stress.tolerance", Kind::Positive, "1e-6"),
    ],
    randomized: true,
    run,
};

const STREAM_ROUTES: u64 = 1 << 32;
const STREAM_RESIDUAL: u64 = 2 << 32;
const STREAM_STRESS: u64 = 3 << 32;

fn run(ctx: &Context) -> Result<Outcome, RunError> {
    let mut out = Outcome::default();
    routes(ctx, &mut out)?;
    residual(ctx, &mut out)?;
    stress(ctx, &mut out)?;
    Ok(out)
}

fn cell_space(ctx: &Context, n_max: usize) -> Result<Arc<FockSpace>, RunError> {
    let c = &ctx.config;
    let grid = MomentumGrid::new(1, c.f64("cells.m"), c.f64("cells.half_width"), c.usize("cells.n_per_axis"))?;
    let cells = c.usizes("cells.indices");
    if let Some(&bad) = cells.iter().find(|&&i| i >= grid.len()) {
        return Err(RunError::Config(format!("key `cells.indices`: cell {bad} outside a grid of {} cells", grid.len())));
    }
    Ok(FockSpace::new(ModeBasis::cell_indicators(&grid, &cells)?, n_max)?)
}

/// A normalised random superposition of the basis states satisfying `keep`.
fn random_state(rng: &mut ChaCha8Rng, space: &Arc<FockSpace>, keep: impl Fn(usize) -> bool) -> FockState {
    let mut v = FockState::zero(space);
    for i in (0..space.dim()).filter(|&i| keep(i)) {
        v.amps[i] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let n = v.norm();
    v.scale(Complex64::new(1.0 / n, 0.0))
}

/// Rank-two functional `c₁|ψ⟩⟨ψ| + c₂|χ⟩⟨ξ|` on the states of energy `≤ e`.
fn random_functional(rng: &mut ChaCha8Rng, space: &Arc<FockSpace>, e: f64, max_number: u32) -> Result<FiniteRankFunctional, RunError> {
    let keep = |i: usize| space.energy(i) <= e && space.number(i) <= max_number;
    let psi = random_state(rng, space, keep);
    let chi = random_state(rng, space, keep);
    let xi = random_state(rng, space, keep);
    let c2 = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
    Ok(FiniteRankFunctional::new(vec![(Complex64::new(1.0, 0.0), psi.clone(), psi), (c2, xi, chi)], e)?)
}

/// Truncated Weyl products against the partition sum for `N ≤ 3`.
fn routes(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let space = cell_space(ctx, c.usize("routes.n_max"))?;
    out.grid(space.basis.grid.fingerprint());
    let e = 2.0 * max_of(space.basis.energies.iter().cloned()) + 1e-9;
    let (max_points, f_norm, tol) = (c.usize("routes.max_points"), c.f64("routes.f_norm"), c.f64("routes.tolerance"));
    let ids: Vec<usize> = (0..c.usize("routes.count")).collect();
    let rows = ctx.try_par_map(&ids, |_, &i| {
        let mut rng = ctx.rng(STREAM_ROUTES + i as u64);
        let phi = random_functional(&mut rng, &space, e, 2)?;
        let n = 1 + i % max_points;
        let fs: Vec<SPVector> = (0..n)
            .map(|_| {
                let v = space.basis.vector(&random_complex(&mut rng, space.modes(), 1.0));
                v.scale_real(f_norm / v.norm())
            })
            .collect();
        let spacing = rng.gen_range(0.0..4.0);
        let xs: Vec<Vec<f64>> = (0..n).map(|k| vec![spacing * k as f64]).collect();
        let r = coincidence_form(&phi, &fs, &xs)?;
        let case = format!("routes-{i:03}-n{n}");
        Ok(vec![
            Record::info(case.clone(), "direct_re", r.direct.re),
            Record::info(case.clone(), "direct_im", r.direct.im),
            Record::upper(case.clone(), "discrepancy", r.discrepancy, tol, "coincidence routes agree"),
            Record::upper(case, "truncation_bound", r.leak_bound, tol, "Weyl truncation below tolerance"),
        ])
    })?;
    out.field("routes_max_discrepancy", max_of(rows.iter().map(|r| r[2].value)));
    out.extend(rows.into_iter().flatten());
    Ok(())
}

/// `S = 0` once `N > 2E/m`.
fn residual(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let space = cell_space(ctx, c.usize("residual.n_max"))?;
    let m = space.basis.grid.mass();
    let e_lo = min_of(&space.basis.energies);
    let (e_hi, tol) = (c.f64("residual.max_energy"), c.f64("residual.tolerance"));
    if e_hi < e_lo {
        return Err(RunError::Config(format!("key `residual.max_energy`: {e_hi} is below the lowest mode energy {e_lo}")));
    }
    let ids: Vec<usize> = (0..c.usize("residual.count")).collect();
    let rows = ctx.try_par_map(&ids, |_, &i| {
        let mut rng = ctx.rng(STREAM_RESIDUAL + i as u64);
        let e = rng.gen_range(e_lo..=e_hi);
        if (e / m).floor() as usize > space.n_max {
            return Err(RunError::Config(format!("key `residual.n_max`: {} cannot hold all states below E = {e}", space.n_max)));
        }
        let phi = random_functional(&mut rng, &space, e, u32::MAX)?;
        let n = (2.0 * e / m).floor() as usize + 1;
        let fs: Vec<SPVector> = (0..n).map(|_| space.basis.vector(&random_complex(&mut rng, space.modes(), 0.5))).collect();
        let spacing = rng.gen_range(0.0..2.0);
        let xs: Vec<Vec<f64>> = (0..n).map(|k| vec![spacing * k as f64]).collect();
        let r = coincidence_form(&phi, &fs, &xs)?;
        let case = format!("residual-{i:03}-n{n}");
        Ok(vec![
            Record::info(case.clone(), "energy", e),
            Record::upper(case, "residual_sum", r.residual_sum.norm(), tol, "residual sum vanishes above 2E/m"),
        ])
    })?;
    out.field("residual_max", max_of(rows.iter().map(|r| r[1].value)));
    out.extend(rows.into_iter().flatten());
    Ok(())
}

fn min_of(xs: &[f64]) -> f64 {
    xs.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// `|Σ_x φ(T⁰⁰(x)) − φ(H)| / (1 + |φ(H)|)` on a massive `s = 3` space.
fn stress(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let grid = MomentumGrid::new(3, c.f64("stress.m"), c.f64("stress.half_width"), c.usize("stress.n_per_axis"))?;
    out.grid(grid.fingerprint());
    let n = grid.n_per_axis();
    let cells = [grid.flat_index(&[n * 3 / 8, n / 2, n / 2]), grid.flat_index(&[n / 2, n / 2, n / 2]), grid.flat_index(&[n * 5 / 8, n / 4, n * 3 / 4])];
    let space = FockSpace::new(ModeBasis::cell_indicators(&grid, &cells)?, c.usize("stress.n_max"))?;
    let tol = c.f64("stress.tolerance");
    let e = space.n_max as f64 * max_of(space.basis.energies.iter().cloned()) + 1e-9;
    let ids: Vec<usize> = (0..c.usize("stress.count")).collect();
    let rows = ctx.try_par_map(&ids, |_, &i| {
        let mut rng = ctx.rng(STREAM_STRESS + i as u64);
        let phi = random_functional(&mut rng, &space, e, u32::MAX)?;
        let r = stress_energy_integral(&phi)?;
        let case = format!("stress-{i:03}");
        Ok(vec![
            Record::info(case.clone(), "phi_h", r.rhs.re),
            Record::upper(case, "relative_error", (r.lhs - r.rhs).norm() / (1.0 + r.rhs.norm()), tol, "stress-energy integral reproduces the energy"),
        ])
    })?;
    out.field("stress_max_relative_error", max_of(rows.iter().map(|r| r[1].value)));
    out.extend(rows.into_iter().flatten());
    Ok(())
}
