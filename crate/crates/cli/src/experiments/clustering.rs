//! N-point collective norms against their majorant, N-uniformity of the
//! majorant at large separation, and decay of the correlation factor.

use std::sync::Arc;

use fockscope_core::phase_space::{collective_majorant, collective_norm, NPointConfig};
use fockscope_core::single_particle::{
    default_h_r0, exponential_decay_fit, geomspace, localized_probe, power_decay_fit, radial_massless_correlation, Sign,
};
use fockscope_core::{FockSpace, FockState, ModeBasis, MomentumGrid, SPVector};
use num_complex::Complex64;
use rand::Rng;
use serde_json::json;

use super::{lowest_cells, max_of};
use crate::config::{key, Kind};
use crate::{Context, Experiment, Outcome, Record, RunError};

pub const EXPERIMENT: Experiment = Experiment {
    name: "clustering",
    about: "N-point collective norms and their majorant, N-uniformity at large separation, massive and massless correlation decay",
    keys: &[
        key("fock.m", Kind::Positive, "1"),
        key("fock.half_width", Kind::Positive, "3"),
        key("fock.n_per_axis", Kind::PositiveCount, "16"),
        key("fock.modes", Kind::PositiveCount, "4"),
        key("fock.n_max", Kind::PositiveCount, "3"),
        key("fock.energy", Kind::Positive, "3"),
        key("collective.ns", Kind::CountList, "1,2,4,8"),
        key("collective.spacings", Kind::FloatList, "0,1,4,16"),
        key("collective.vectors", Kind::Count, "8"),
        key("uniform.half_width", Kind::Positive, "25"),
        key("uniform.n_per_axis", Kind::PositiveCount, "16384"),
        key("uniform.r", Kind::Positive, "1"),
        key("uniform.r0", Kind::Positive, "1"),
        key("uniform.ns", Kind::CountList, "2,4,8,16"),
        key("uniform.delta_times_m", Kind::Positive, "64"),
        key("uniform.max_span", Kind::Positive, "1.2"),
        key("decay.from", Kind::Positive, "4"),
        key("decay.to", Kind::Positive, "20"),
        key("decay.samples", Kind::PositiveCount, "17"),
        key("decay.min_rate_over_m", Kind::Positive, "0.5"),
        key("massless.r", Kind::Positive, "1"),
        key("massless.r0", Kind::Positive, "1"),
        key("massless.from", Kind::Positive, "8"),
        key("massless.to", Kind::Positive, "64"),
        key("massless.samples", Kind::PositiveCount, "12"),
        key("massless.slack", Kind::Positive, "0.2"),
    ],
    randomized: true,
    run,
};

const STREAM_COLLECTIVE: u64 = 1 << 32;

fn run(ctx: &Context) -> Result<Outcome, RunError> {
    let mut out = Outcome::default();
    collective(ctx, &mut out)?;
    uniformity(ctx, &mut out)?;
    massless(ctx, &mut out)?;
    Ok(out)
}

/// `‖P_E Σ_k S_k P_E‖ ≤ E sup|h|² {‖g‖² + (N−1) sup|⟨g|U g⟩|}` for random `g, h`.
fn collective(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let grid = MomentumGrid::new(1, c.f64("fock.m"), c.f64("fock.half_width"), c.usize("fock.n_per_axis"))?;
    out.grid(grid.fingerprint());
    let cells = lowest_cells(&grid, c.usize("fock.modes"));
    let space = FockSpace::new(ModeBasis::cell_indicators(&grid, &cells)?, c.usize("fock.n_max"))?;
    let e = c.f64("fock.energy");
    let battery = battery(&space, e);
    let ns = c.usizes("collective.ns");
    let spacings = c.f64s("collective.spacings");
    let vectors: Vec<usize> = (0..c.usize("collective.vectors")).collect();
    let rows = ctx.try_par_map(&vectors, |_, &v| {
        let mut rng = ctx.rng(STREAM_COLLECTIVE + v as u64);
        let (mut g, mut h) = (SPVector::zeros(&grid), SPVector::zeros(&grid));
        for &cell in &cells {
            g.amps[cell] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            h.amps[cell] = Complex64::new(rng.gen_range(0.1..1.0), 0.0);
        }
        let mut rows = Vec::new();
        for &n in &ns {
            for &d in &spacings {
                let config = NPointConfig::spatial_line(n, 1, d)?;
                let r = collective_norm(&space, &g, &h, &config, &battery, e)?;
                let case = format!("v{v:02}-n{n}-d{d}");
                rows.push(Record::upper(case.clone(), "operator_norm", r.operator_norm, r.majorant * (1.0 + 1e-12), "collective norm below its majorant"));
                rows.push(Record::upper(
                    case,
                    "functional_norm",
                    r.functional_norm,
                    r.operator_norm * (n as f64).sqrt() * (1.0 + 1e-12) + 1e-12,
                    "collective functional norm below the operator norm",
                ));
            }
        }
        Ok(rows)
    })?;
    out.field("collective_max_ratio", max_of(rows.iter().flat_map(|r| r.iter().step_by(2)).map(|r| r.value / r.bound_value())));
    out.extend(rows.into_iter().flatten());
    Ok(())
}

/// Basis states of energy `≤ E`, each mixed with the vacuum.
fn battery(space: &Arc<FockSpace>, e: f64) -> Vec<FockState> {
    (0..space.dim())
        .filter(|&i| space.energy(i) <= e)
        .map(|i| {
            let mut v = FockState::zero(space);
            v.amps[i] = Complex64::new(1.0, 0.0);
            if i > 0 {
                v.amps[0] = Complex64::new(0.3, 0.4);
            }
            v
        })
        .collect()
}

/// The majorant over `N` at separation `δ = 64/m`, and the exponential rate of
/// the `+` probe correlation.
fn uniformity(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let m = c.f64("fock.m");
    let e = c.f64("fock.energy");
    let grid = MomentumGrid::new(1, m, c.f64("uniform.half_width"), c.usize("uniform.n_per_axis"))?;
    out.grid(grid.fingerprint());
    let (h, _) = default_h_r0(&grid, c.f64("uniform.r0"))?;
    let probe = localized_probe(&grid, c.f64("uniform.r"), &h, Sign::Plus);
    let ones = SPVector::from_fn(&grid, |_, _| Complex64::new(1.0, 0.0));
    let delta = c.f64("uniform.delta_times_m") / m;
    let ns = c.usizes("uniform.ns");
    // correlations on the grid are periodic in x with this period
    let period = 2.0 * std::f64::consts::PI / grid.spacing();
    let widest = ns.iter().max().copied().unwrap_or(1).saturating_sub(1) as f64 * delta;
    if widest + delta > period {
        return Err(RunError::Config(format!(
            "uniform grid: configurations span {widest} but correlations repeat every {period:.1}; refine the momentum spacing"
        )));
    }
    let majorants = ctx.try_par_map(&ns, |_, &n| Ok(collective_majorant(&probe, &ones, e, &NPointConfig::spatial_line(n, 1, delta)?)))?;
    for (&n, &v) in ns.iter().zip(&majorants) {
        out.push(Record::info(format!("n{n}"), "majorant", v));
    }
    let lo = majorants.iter().cloned().fold(f64::INFINITY, f64::min);
    let span = max_of(majorants.iter().cloned()) / lo;
    out.push(Record::upper(format!("delta{delta}"), "majorant_span", span, c.f64("uniform.max_span"), "N-uniform collective majorant"));
    out.field("majorant_span", span);

    let fit = exponential_decay_fit(&probe, c.f64("decay.from"), c.f64("decay.to"), c.usize("decay.samples"))?;
    let rate = -fit.slope;
    out.push(Record::lower("massive-plus-probe", "decay_rate", rate, c.f64("decay.min_rate_over_m") * m, "exponential decay of the correlation factor"));
    out.field("decay_rate", rate);
    Ok(())
}

/// Power-law exponent of the massless `s = 3` correlation, against `−(s−2)`.
fn massless(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let xs = geomspace(c.f64("massless.from"), c.f64("massless.to"), c.usize("massless.samples"));
    let vals = radial_massless_correlation(c.f64("massless.r"), c.f64("massless.r0"), &xs);
    let fit = power_decay_fit(&xs, &vals)?;
    out.push(Record::upper("massless-s3", "decay_exponent", fit.slope, -1.0 + c.f64("massless.slack"), "power-law decay of the massless correlation"));
    out.field("massless_exponent", fit.slope);
    out.field("massless_samples", json!(xs.iter().zip(&vals).map(|(x, v)| [*x, *v]).collect::<Vec<_>>()));
    Ok(())
}
