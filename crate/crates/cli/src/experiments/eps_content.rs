//! ε-content of fixture clouds and of sampled images of rank-one maps,
//! against the key-key bound, the product bound for sums, and lattice counts.

use fockscope_core::epsilon_content::{ball_count, eps_content, key_key_bound, product_compose_bound, Norm, PointCloud};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::max_of;
use crate::config::{key, optional, Kind};
use crate::{Context, Experiment, Outcome, Record, RunError};

pub const EXPERIMENT: Experiment = Experiment {
    name: "eps-content",
    about: "exact eps-content of point clouds and sampled rank-one images against the key-key bound, product bound for sums, lattice ball counts",
    keys: &[
        optional("cloud.points", Kind::Text),
        key("cloud.eps", Kind::Positive, "1"),
        key("cloud.norm", Kind::Text, "euclidean"),
        key("trials.count", Kind::Count, "500"),
        key("trials.max_rows", Kind::PositiveCount, "6"),
        key("trials.dim", Kind::PositiveCount, "3"),
        key("trials.inputs", Kind::PositiveCount, "24"),
        key("sums.count", Kind::Count, "100"),
        key("ball.n", Kind::PositiveCount, "2"),
        key("ball.max_m", Kind::PositiveCount, "3"),
    ],
    randomized: true,
    run,
};

const STREAM_TRIALS: u64 = 1 << 32;
const STREAM_SUMS: u64 = 2 << 32;

fn run(ctx: &Context) -> Result<Outcome, RunError> {
    let mut out = Outcome::default();
    fixture(ctx, &mut out)?;
    key_key_trials(ctx, &mut out)?;
    sum_trials(ctx, &mut out)?;
    ball_counts(ctx, &mut out);
    Ok(out)
}

/// Parses `x,y;u,v;...` into real points.
fn parse_points(text: &str) -> Result<Vec<Vec<f64>>, RunError> {
    text.split(';')
        .map(|p| {
            p.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| RunError::Config(format!("key `cloud.points`: bad coordinate `{}`", x.trim()))))
                .collect()
        })
        .collect()
}

fn fixture(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let Some(text) = c.text("cloud.points") else { return Ok(()) };
    let norm = match c.text("cloud.norm").unwrap_or_default() {
        "sup" => Norm::Sup,
        "euclidean" => Norm::Euclidean,
        other => return Err(RunError::Config(format!("key `cloud.norm`: expected `sup` or `euclidean`, got `{other}`"))),
    };
    let cloud = PointCloud::from_real(&parse_points(text)?, norm)?;
    let content = eps_content(&cloud, c.f64("cloud.eps"))?;
    out.push(Record::info("fixture", "content", content.value as f64));
    out.push(Record::info("fixture", "points", cloud.len() as f64));
    out.push(Record::lower("fixture", "exact", if content.exact { 1.0 } else { 0.0 }, 1.0, "exact branch-and-bound search"));
    out.field("fixture_content", content.value);
    Ok(())
}

/// Points drawn uniformly from the complex unit ball of `C^d`.
fn unit_ball_inputs(rng: &mut ChaCha8Rng, count: usize, d: usize) -> Vec<Vec<Complex64>> {
    (0..count)
        .map(|_| loop {
            let u: Vec<Complex64> = (0..d).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            if u.iter().map(|z| z.norm_sqr()).sum::<f64>() <= 1.0 {
                break u;
            }
        })
        .collect()
}

fn random_rows(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<Complex64>> {
    let scale = rng.gen_range(0.05..1.0);
    (0..n).map(|_| (0..d).map(|_| Complex64::new(scale * rng.gen_range(-1.0..1.0), scale * rng.gen_range(-1.0..1.0))).collect()).collect()
}

fn hs_norm(rows: &[Vec<Complex64>]) -> f64 {
    rows.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `ln 𝓝(ε) ≤ 2⁷π‖Σ‖₂²/ε² · ln(4eN)`, compared in logs so the bound never overflows.
fn key_key_trials(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let (max_rows, d, inputs) = (c.usize("trials.max_rows"), c.usize("trials.dim"), c.usize("trials.inputs"));
    let ids: Vec<usize> = (0..c.usize("trials.count")).collect();
    let rows = ctx.try_par_map(&ids, |_, &i| {
        let mut rng = ctx.rng(STREAM_TRIALS + i as u64);
        let n = rng.gen_range(1..=max_rows);
        let rows = random_rows(&mut rng, n, d);
        let norm2 = hs_norm(&rows);
        let eps = norm2 * rng.gen_range(0.05..2.5);
        let cloud = PointCloud::image_of(&rows, &unit_ball_inputs(&mut rng, inputs, d));
        let content = eps_content(&cloud, eps)?;
        let bound = key_key_bound(n, norm2, eps)?;
        let ln_bound = bound.exponent * (4.0 * std::f64::consts::E * n as f64).ln();
        let case = format!("trial-{i:03}");
        Ok(vec![
            Record::info(case.clone(), "content", content.value as f64),
            Record::upper(case.clone(), "ln_content", (content.value as f64).ln(), ln_bound, "key-key content bound"),
            Record::lower(case, "exact", if content.exact { 1.0 } else { 0.0 }, 1.0, "exact branch-and-bound search"),
        ])
    })?;
    out.field("key_key_max_content", max_of(rows.iter().map(|r| r[0].value)));
    out.extend(rows.into_iter().flatten());
    Ok(())
}

/// `𝓝(ε)` of `Σ₁+Σ₂` on a sample against `𝓝₁(ε/8)𝓝₂(ε/8)`.
fn sum_trials(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let (max_rows, d, inputs) = (c.usize("trials.max_rows"), c.usize("trials.dim"), c.usize("trials.inputs"));
    let ids: Vec<usize> = (0..c.usize("sums.count")).collect();
    let rows = ctx.try_par_map(&ids, |_, &i| {
        let mut rng = ctx.rng(STREAM_SUMS + i as u64);
        let n = rng.gen_range(1..=max_rows);
        let (a, b) = (random_rows(&mut rng, n, d), random_rows(&mut rng, n, d));
        let sum: Vec<Vec<Complex64>> = a.iter().zip(&b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + v).collect()).collect();
        let eps = hs_norm(&sum) * rng.gen_range(0.05..1.0);
        let us = unit_ball_inputs(&mut rng, inputs, d);
        let content_of = |rows: &[Vec<Complex64>], e: f64| eps_content(&PointCloud::image_of(rows, &us), e).map(|c| c.value as f64).unwrap_or(f64::NAN);
        let value = eps_content(&PointCloud::image_of(&sum, &us), eps)?.value as f64;
        let (fa, fb) = (|e| content_of(&a, e), |e| content_of(&b, e));
        let bound = product_compose_bound(&[&fa, &fb], &[eps / 8.0, eps / 8.0], eps)?;
        Ok(Record::upper(format!("sum-{i:03}"), "content", value, bound, "content of a sum below the product bound"))
    })?;
    out.extend(rows);
    Ok(())
}

/// `#{n ∈ ℤ^{2N} : Σn² ≤ M} ≤ C(2N,M) 2^M V_M(2√M) ≤ (4Ne)^{8πM}`.
fn ball_counts(ctx: &Context, out: &mut Outcome) {
    let c = &ctx.config;
    let n = c.usize("ball.n");
    for m in 1..=c.usize("ball.max_m") {
        let b = ball_count(n, m);
        let case = format!("n{n}-m{m}");
        out.push(Record::upper(case.clone(), "lattice_count", b.count as f64, b.cube_bound, "lattice ball count"));
        out.push(Record::upper(case, "cube_bound", b.cube_bound, b.power_bound, "lattice ball count power form"));
    }
}
