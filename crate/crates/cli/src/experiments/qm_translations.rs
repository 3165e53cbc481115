//! Square-integrability of translates in one-particle quantum mechanics and
//! the growth of the divergence witness.

use fockscope_core::single_particle::{disjoint_support_pair, divergence_witness_growth, qm_translation_check};
use fockscope_core::{MomentumGrid, SPVector};
use num_complex::Complex64;
use rand::Rng;
use serde_json::json;

use super::max_of;
use crate::config::{key, Kind};
use crate::{Context, Experiment, Outcome, Record, RunError};

pub const EXPERIMENT: Experiment = Experiment {
    name: "qm-translations",
    about: "integral of |<Phi|U(x)Psi>|^2 against |K| |Phi|^2 |Psi|^2 for box-supported Psi, divergence witness growth",
    keys: &[
        key("grid.s", Kind::PositiveCount, "1"),
        key("grid.m", Kind::Positive, "1"),
        key("grid.half_width", Kind::Positive, "16"),
        key("grid.n_per_axis", Kind::PositiveCount, "128"),
        key("pairs.count", Kind::Count, "50"),
        key("pairs.max_box", Kind::Positive, "2"),
        key("witness.s", Kind::PositiveCount, "3"),
        key("witness.delta", Kind::Positive, "0.2"),
        key("witness.ks", Kind::FloatList, "1,1.5"),
        key("witness.radii", Kind::FloatList, "1e4,1e5,1e6"),
        key("witness.tolerance", Kind::Positive, "0.1"),
    ],
    randomized: true,
    run,
};

const STREAM_PAIRS: u64 = 1 << 32;

fn run(ctx: &Context) -> Result<Outcome, RunError> {
    let c = &ctx.config;
    let grid = MomentumGrid::new(c.usize("grid.s"), c.f64("grid.m"), c.f64("grid.half_width"), c.usize("grid.n_per_axis"))?;
    let mut out = Outcome::default();
    out.grid(grid.fingerprint());
    let s = grid.dim();
    let max_box = c.f64("pairs.max_box");
    let ids: Vec<usize> = (0..c.usize("pairs.count")).collect();
    let rows = ctx.try_par_map(&ids, |_, &i| {
        let mut rng = ctx.rng(STREAM_PAIRS + i as u64);
        let box_half: Vec<f64> = (0..s).map(|_| rng.gen_range(0.3..max_box)).collect();
        let power = rng.gen_range(1..=4);
        let (a, b) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let psi = |x: &[f64]| {
            let w: f64 = x.iter().zip(&box_half).map(|(x, h)| (1.0 - (x / h).powi(2)).max(0.0).powi(power)).product();
            Complex64::new(a, b) * w * (1.0 + 0.5 * x[0])
        };
        let centre: Vec<f64> = (0..s).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let width = rng.gen_range(0.3..3.0);
        let phase = rng.gen_range(-1.0..1.0);
        let phi = SPVector::from_fn(&grid, |p, _| {
            let d2: f64 = p.iter().zip(&centre).map(|(p, c)| (p - c).powi(2)).sum();
            Complex64::from_polar((-d2 / (2.0 * width * width)).exp(), phase * p[0])
        });
        let r = qm_translation_check(&phi, psi, &box_half)?;
        let case = format!("pair-{i:03}");
        Ok(vec![
            Record::info(case.clone(), "integral", r.integral),
            Record::upper(case, "ratio", r.ratio, 1.0 + 1e-10, "square-integrable translates"),
        ])
    })?;
    out.field("max_ratio", max_of(rows.iter().map(|r| r[1].value)));
    out.extend(rows.into_iter().flatten());

    let (lo, _) = disjoint_support_pair(&grid, 1.0);
    let phi = lo.mul_fn(|p, _| if p[0].abs() >= 1.0 { 1.0 } else { 0.0 });
    let psi = |x: &[f64]| Complex64::new(x.iter().map(|x| (1.0 - x * x).max(0.0).powi(3)).product::<f64>(), 0.0);
    let r = qm_translation_check(&phi, psi, &vec![1.0; s])?;
    out.push(Record::upper("disjoint", "integral", r.integral, 0.0, "disjoint momentum supports give zero"));

    let ws = c.usize("witness.s");
    let delta = c.f64("witness.delta");
    let radii = c.f64s("witness.radii");
    let tol = c.f64("witness.tolerance");
    let mut exponents = Vec::new();
    for k in c.f64s("witness.ks") {
        let w = divergence_witness_growth(ws, delta, k, 1.0, 1.0, &radii)?;
        let want = ws as f64 - k * (ws as f64 + delta) / 2.0;
        let case = format!("witness-k{k}");
        out.push(Record::lower(case.clone(), "growth_exponent", w.exponent, 0.0, "divergence witness grows"));
        out.push(Record::between(case, "growth_exponent_vs_power_count", w.exponent, want - tol, want + tol, "divergence witness growth rate"));
        exponents.push(w.exponent);
    }
    out.field("witness_exponents", json!(exponents));
    Ok(out)
}
