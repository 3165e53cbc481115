//! Infrared orders of `φ₊` and `:φ₊²:` from witness families, the witness
//! scaling law, and the `2E` bound on the `φ₊` density.

use fockscope_core::infrared::{beta_grid, estimate_order, phi1_closed_form, phi_plus_energy_bound, spectral_density, OrderEstimate, Witness};
use fockscope_core::{FockSpace, FockState, ModeBasis, MomentumGrid};
use num_complex::Complex64;
use rand::Rng;
use serde_json::json;

use super::{lowest_cells, max_of};
use crate::config::{key, Kind};
use crate::{Context, Experiment, Outcome, Record, RunError};

pub const EXPERIMENT: Experiment = Experiment {
    name: "infrared-order",
    about: "infrared orders of phi_+ and :phi_+^2: from witness sequences, witness scaling law, energy bound of the phi_+ density",
    keys: &[
        key("witness.s", Kind::PositiveCount, "3"),
        key("witness.energy", Kind::Positive, "1"),
        key("witness.n_per_axis", Kind::PositiveCount, "32"),
        key("witness.ks", Kind::CountList, "8,16,32,64"),
        key("beta.step", Kind::Positive, "0.1"),
        key("beta.max", Kind::Positive, "3"),
        key("order.tolerance", Kind::Positive, "0.2"),
        key("scaling.eps", Kind::FloatList, "0.2,0.5"),
        key("scaling.ks", Kind::CountList, "8,16,32"),
        key("scaling.tolerance", Kind::Positive, "0.02"),
        key("ebound.states", Kind::Count, "100"),
        key("ebound.s", Kind::PositiveCount, "3"),
        key("ebound.m", Kind::NonNegative, "0"),
        key("ebound.half_width", Kind::Positive, "2"),
        key("ebound.n_per_axis", Kind::PositiveCount, "8"),
        key("ebound.modes", Kind::PositiveCount, "4"),
        key("ebound.n_max", Kind::PositiveCount, "3"),
        key("ebound.energy", Kind::Positive, "3"),
    ],
    randomized: true,
    run,
};

const STREAM_EBOUND: u64 = 1 << 32;

fn run(ctx: &Context) -> Result<Outcome, RunError> {
    let c = &ctx.config;
    let (s, e, n_axis) = (c.usize("witness.s"), c.f64("witness.energy"), c.usize("witness.n_per_axis"));
    let ks = c.usizes("witness.ks");
    let betas = beta_grid(c.f64("beta.max"), c.f64("beta.step"));
    let tol = c.f64("order.tolerance");
    let mut out = Outcome::default();
    for &k in &ks {
        out.grid(MomentumGrid::new(s, 0.0, e / k as f64, n_axis)?.fingerprint());
    }

    // (witness, field power, expected order)
    let families = [(Witness::phi1(s, e, n_axis), 1usize, 2.0), (Witness::phi2(s, e, n_axis), 2usize, 1.0)];
    let estimates: Vec<OrderEstimate> = ctx.try_par_map(&families, |_, (w, n, _)| Ok(estimate_order(w, *n, &ks, &betas)?))?;
    for ((_, n, want), est) in families.iter().zip(&estimates) {
        let case = if *n == 1 { "phi_plus" } else { "phi_plus_sq" };
        for (b, sl) in est.scan.betas.iter().zip(&est.scan.slopes) {
            out.push(Record::info(format!("{case}-beta{b:.3}"), "growth_slope", *sl));
        }
        let (lo, hi) = est.bracket;
        out.push(Record::lower(case, "order_bracket_lo", lo, want - tol, "infrared order bracket"));
        out.push(Record::upper(case, "order_bracket_hi", hi, want + tol, "infrared order bracket"));
        out.push(Record::info(case, "order_estimate", est.estimate));
        let prefix = if *n == 1 { "ord" } else { "ord2" };
        out.field(&format!("{prefix}_bracket"), json!([lo, hi]));
        out.field(&format!("{prefix}_estimate"), est.estimate);
    }

    scaling_law(ctx, &mut out)?;
    energy_bound_battery(ctx, &mut out)?;
    Ok(out)
}

/// Density of the `φ₊` witness at `β = 2 − ε` against `(k^ε/2)∫|p|^{1−ε}|h|²`.
fn scaling_law(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let (s, e, n_axis) = (c.usize("witness.s"), c.f64("witness.energy"), c.usize("witness.n_per_axis"));
    let tol = c.f64("scaling.tolerance");
    let w = Witness::phi1(s, e, n_axis);
    let cells: Vec<(f64, usize)> = c.f64s("scaling.eps").iter().flat_map(|&eps| c.usizes("scaling.ks").into_iter().map(move |k| (eps, k))).collect();
    let ratios = ctx.try_par_map(&cells, |_, &(eps, k)| {
        let beta = 2.0 - eps;
        Ok(spectral_density(&w.functional(k)?, 1, beta)? / phi1_closed_form(s, e, k, beta))
    })?;
    for (&(eps, k), &r) in cells.iter().zip(&ratios) {
        out.push(Record::between(format!("eps{eps}-k{k}"), "density_ratio", r, 1.0 - tol, 1.0 + tol, "witness scaling law"));
    }
    out.field("scaling_ratio_range", json!([ratios.iter().cloned().fold(f64::INFINITY, f64::min), max_of(ratios.iter().cloned())]));
    Ok(())
}

/// `∫|p|²|⟨Ψ₁|φ̃₊(p)Ψ₂⟩|² ≤ 2E` over random pairs of energy-bounded states.
fn energy_bound_battery(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let grid = MomentumGrid::new(c.usize("ebound.s"), c.f64("ebound.m"), c.f64("ebound.half_width"), c.usize("ebound.n_per_axis"))?;
    out.grid(grid.fingerprint());
    let cells = lowest_cells(&grid, c.usize("ebound.modes"));
    let space = FockSpace::new(ModeBasis::cell_indicators(&grid, &cells)?, c.usize("ebound.n_max"))?;
    let e = c.f64("ebound.energy");
    let admissible: Vec<usize> = (0..space.dim()).filter(|&i| space.energy(i) <= e).collect();
    let random_state = |rng: &mut rand_chacha::ChaCha8Rng| {
        let mut v = FockState::zero(&space);
        for &i in &admissible {
            v.amps[i] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let n = v.norm();
        v.scale(Complex64::new(1.0 / n, 0.0))
    };
    let ids: Vec<usize> = (0..c.usize("ebound.states")).collect();
    let rows = ctx.try_par_map(&ids, |_, &i| {
        let mut rng = ctx.rng(STREAM_EBOUND + i as u64);
        let bra = random_state(&mut rng);
        let ket = random_state(&mut rng);
        let (density, bound) = phi_plus_energy_bound(&bra, &ket, e)?;
        Ok(Record::upper(format!("pair-{i:03}"), "p2_density", density, bound, "energy bound of the phi_+ density"))
    })?;
    out.field("ebound_max_ratio", max_of(rows.iter().map(|r| r.value / r.bound_value())));
    out.extend(rows);
    Ok(())
}
