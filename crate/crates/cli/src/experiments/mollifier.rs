//! The mollifier identity on random tensor-split instances.

use fockscope_core::phase_space::{mollifier_identity_check, TensorInstance, ThetaQuadrature};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::max_of;
use crate::config::{key, Kind};
use crate::{Context, Experiment, Outcome, Record, RunError};

pub const EXPERIMENT: Experiment = Experiment {
    name: "mollifier",
    about: "mollifier identity phi(AB) = ring + two strip terms on random tensor-split instances",
    keys: &[
        key("instances", Kind::Count, "50"),
        key("max_dim", Kind::PositiveCount, "6"),
        key("max_energy", Kind::Positive, "2"),
        key("betas", Kind::FloatList, "0.5,1,2"),
        key("deltas", Kind::FloatList, "0.5,2,8"),
        key("quadrature.tolerance", Kind::Positive, "1e-13"),
        key("quadrature.max_level", Kind::PositiveCount, "12"),
        key("tolerance", Kind::Positive, "1e-8"),
    ],
    randomized: true,
    run,
};

const STREAM_INSTANCES: u64 = 1 << 32;

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// `XX*/Tr(XX*)`.
fn density_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let x = random_matrix(rng, n);
    let rho = &x * x.adjoint();
    let tr = rho.trace();
    rho / tr
}

fn run(ctx: &Context) -> Result<Outcome, RunError> {
    let c = &ctx.config;
    let (max_dim, e_max, tol) = (c.usize("max_dim"), c.f64("max_energy"), c.f64("tolerance"));
    let (betas, deltas) = (c.f64s("betas"), c.f64s("deltas"));
    let q = ThetaQuadrature::Adaptive { tol: c.f64("quadrature.tolerance"), max_level: c.usize("quadrature.max_level") };
    let ids: Vec<usize> = (0..c.usize("instances")).collect();
    let rows = ctx.try_par_map(&ids, |_, &i| {
        let mut rng = ctx.rng(STREAM_INSTANCES + i as u64);
        let (n1, n2) = (rng.gen_range(1..=max_dim), rng.gen_range(1..=max_dim));
        let inst = TensorInstance {
            a1: random_matrix(&mut rng, n1),
            h1: (0..n1).map(|_| rng.gen_range(0.0..=e_max)).collect(),
            b2: random_matrix(&mut rng, n2),
            h2: (0..n2).map(|_| rng.gen_range(0.0..=e_max)).collect(),
            rho: density_matrix(&mut rng, n1 * n2),
        };
        let mut rows = Vec::new();
        for &beta in &betas {
            for &delta in &deltas {
                let r = mollifier_identity_check(&inst, beta, delta, q)?;
                let case = format!("inst-{i:03}-{n1}x{n2}-beta{beta}-delta{delta}");
                rows.push(Record::info(case.clone(), "lhs_abs", r.lhs.norm()));
                rows.push(Record::upper(case, "discrepancy", r.discrepancy, tol, "mollifier identity"));
            }
        }
        Ok(rows)
    })?;
    let mut out = Outcome::default();
    out.field("max_discrepancy", max_of(rows.iter().flatten().filter(|r| r.quantity == "discrepancy").map(|r| r.value)));
    out.extend(rows.into_iter().flatten());
    Ok(out)
}
