//! Schatten norms of the localization operator T and p-norm sums of the
//! rank-one expansion against the closed majorant.

use fockscope_core::phase_space::{p_norm_partial_sum, RankOneExpansion};
use fockscope_core::single_particle::{default_h_r0, TOperator};
use fockscope_core::MomentumGrid;
use serde_json::json;

use super::max_of;
use crate::config::{key, optional, Kind};
use crate::{Context, Experiment, Outcome, Record, RunError};

pub const EXPERIMENT: Experiment = Experiment {
    name: "nuclearity",
    about: "singular values of the localization operator T and p-norm sums of the rank-one expansion against the closed majorant",
    keys: &[
        key("grid.s", Kind::PositiveCount, "1"),
        key("grid.m", Kind::Positive, "1"),
        key("grid.half_width", Kind::Positive, "8"),
        key("grid.n_per_axis", Kind::PositiveCount, "64"),
        key("r", Kind::Positive, "1"),
        key("r0", Kind::Positive, "1"),
        key("energy", Kind::Positive, "2"),
        key("gamma", Kind::Positive, "0.5"),
        key("taylor_order", Kind::Count, "4"),
        key("p", Kind::FloatList, "0.25,0.5,1"),
        optional("k_max", Kind::Count),
        key("tail.tolerance", Kind::Positive, "1e-6"),
    ],
    randomized: false,
    run,
};

fn run(ctx: &Context) -> Result<Outcome, RunError> {
    let c = &ctx.config;
    let grid = MomentumGrid::new(c.usize("grid.s"), c.f64("grid.m"), c.f64("grid.half_width"), c.usize("grid.n_per_axis"))?;
    let (e, m) = (c.f64("energy"), grid.mass());
    let (h, h_min) = default_h_r0(&grid, c.f64("r0"))?;
    let t = TOperator::build(&grid, c.f64("r"), e, c.f64("gamma"), &h, c.usize("taylor_order"))?;
    let cap = (e / m).floor() as usize;
    let k_max = c.get("k_max").map(|_| c.usize("k_max")).unwrap_or(2 * cap + 4);
    let tail_tol = c.f64("tail.tolerance");

    let mut out = Outcome::default();
    out.grid(grid.fingerprint());
    out.field("h_r0_min", h_min);
    out.field("eigenvalues", json!(t.eigenvalues));
    out.field("order_cap", cap);
    out.field("k_max", k_max);
    for (i, v) in t.eigenvalues.iter().enumerate() {
        out.push(Record::info(format!("t{i:02}"), "eigenvalue", *v));
    }

    let ps = c.f64s("p");
    let expansion = RankOneExpansion::new(t.eigenvalues.clone(), e, Some(cap));
    let sums = ctx.try_par_map(&ps, |_, &p| Ok(p_norm_partial_sum(&expansion, p, k_max)?))?;
    let mut ratios = Vec::new();
    for (&p, sum) in ps.iter().zip(&sums) {
        let case = format!("p{p}");
        let components: f64 = t.components.all().iter().map(|xs| xs.iter().map(|x| x.powf(p)).sum::<f64>()).sum();
        out.push(Record::info(case.clone(), "schatten_norm", t.schatten(p)?));
        out.push(Record::upper(case.clone(), "trace_power", t.trace_power(p), components * (1.0 + 1e-10), "trace of T^p against its four components"));
        out.push(Record::upper(case.clone(), "partial_sum", sum.value, sum.majorant, "p-norm sum below the closed majorant"));
        out.push(Record::upper(case.clone(), "tail", sum.tail, tail_tol * sum.value, "massive truncation tail"));
        out.push(Record::lower(case, "tail_converged", if sum.tail_converged { 1.0 } else { 0.0 }, 1.0, "tail bound converged"));
        ratios.push(sum.value / sum.majorant);
    }
    out.field("partial_sum_over_majorant", json!(ratios));
    out.field("max_tail", max_of(sums.iter().map(|s| s.tail)));
    Ok(out)
}
