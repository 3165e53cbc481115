//! Energy bounds of ladder words, vector lengths, multinomial identities and
//! time-smeared annihilators.

use std::sync::Arc;

use fockscope_core::fock::{operator_norm_on_pe, Letter};
use fockscope_core::multiindex::{factorial_f64, multinomial_sum_int, trinomial_sum};
use fockscope_core::phase_space::{time_smeared_word, TimeProfile};
use fockscope_core::{FockSpace, FockState, ModeBasis, MomentumGrid, OperatorWord};
use num_complex::Complex64;
use rand::Rng;

use super::{coeff_norm, lowest_cells, max_of, random_complex};
use crate::config::{key, Kind};
use crate::{Context, Experiment, Outcome, Record, RunError};

pub const EXPERIMENT: Experiment = Experiment {
    name: "energy-bounds",
    about: "ladder words on energy-bounded states, Fock vector lengths, multinomial sums, time-smeared annihilators",
    keys: &[
        key("grid.s", Kind::PositiveCount, "1"),
        key("grid.m", Kind::Positive, "1"),
        key("grid.half_width", Kind::Positive, "4"),
        key("grid.n_per_axis", Kind::PositiveCount, "16"),
        key("fock.modes", Kind::PositiveCount, "4"),
        key("fock.n_max", Kind::PositiveCount, "8"),
        key("fock.energy", Kind::Positive, "4"),
        key("words.count", Kind::Count, "200"),
        key("words.max_len", Kind::PositiveCount, "4"),
        key("words.tolerance", Kind::Positive, "1e-6"),
        key("words.max_iter", Kind::PositiveCount, "5000"),
        key("vectors.count", Kind::Count, "200"),
        key("vectors.max_len", Kind::PositiveCount, "5"),
        key("vectors.tolerance", Kind::Positive, "1e-10"),
        key("multinomial.max", Kind::Count, "12"),
        key("smearing.count", Kind::Count, "12"),
        key("smearing.max_len", Kind::PositiveCount, "3"),
        key("smearing.bound", Kind::Positive, "1e-9"),
    ],
    randomized: true,
    run,
};

const STREAM_WORDS: u64 = 1 << 32;
const STREAM_VECTORS: u64 = 2 << 32;
const STREAM_MULTINOMIAL: u64 = 3 << 32;
const STREAM_SMEARING: u64 = 4 << 32;

fn run(ctx: &Context) -> Result<Outcome, RunError> {
    let c = &ctx.config;
    let grid = MomentumGrid::new(c.usize("grid.s"), c.f64("grid.m"), c.f64("grid.half_width"), c.usize("grid.n_per_axis"))?;
    let cells = lowest_cells(&grid, c.usize("fock.modes"));
    let space = FockSpace::new(ModeBasis::cell_indicators(&grid, &cells)?, c.usize("fock.n_max"))?;
    let mut out = Outcome::default();
    out.grid(grid.fingerprint());
    out.field("modes", space.modes());
    out.field("fock_dim", space.dim());

    energy_words(ctx, &space, &mut out);
    vector_lengths(ctx, &space, &mut out)?;
    multinomials(ctx, &mut out)?;
    smearing(ctx, &space, &mut out)?;
    Ok(out)
}

/// Normal-ordered words `a*(ω^{1/2}h₁)…a(ω^{1/2}h_n)` against `E^{n/2}Π‖hⱼ‖`.
fn energy_words(ctx: &Context, space: &Arc<FockSpace>, out: &mut Outcome) {
    let c = &ctx.config;
    let e = c.f64("fock.energy");
    let (tol, max_iter, max_len) = (c.f64("words.tolerance"), c.usize("words.max_iter"), c.usize("words.max_len"));
    let ids: Vec<usize> = (0..c.usize("words.count")).collect();
    let sqrt_w: Vec<f64> = space.basis.energies.iter().map(|w| w.sqrt()).collect();
    let rows = ctx.par_map(&ids, |_, &i| {
        let mut rng = ctx.rng(STREAM_WORDS + i as u64);
        let n = rng.gen_range(1..=max_len);
        let creators = rng.gen_range(0..=n);
        let mut bound = e.powf(n as f64 / 2.0);
        let mut letters = Vec::with_capacity(n);
        for k in 0..n {
            let scale = rng.gen_range(0.2..1.5);
            let h = random_complex(&mut rng, space.modes(), scale);
            bound *= coeff_norm(&h);
            let f: Vec<Complex64> = h.iter().zip(&sqrt_w).map(|(x, s)| x * s).collect();
            letters.push(if k < creators { Letter::Cre(f) } else { Letter::Ann(f) });
        }
        let word = OperatorWord::from_letters(letters);
        let est = operator_norm_on_pe(space, &word, e, tol, max_iter);
        let case = format!("word-{i:03}");
        vec![
            Record::info(case.clone(), "length", n as f64),
            Record::info(case.clone(), "creators", creators as f64),
            Record::upper(case.clone(), "norm_on_pe", est.value, bound, "energy bound of normal-ordered ladder words"),
            Record::lower(case, "converged", if est.converged { 1.0 } else { 0.0 }, 1.0, "power iteration converged"),
        ]
    });
    let ratio = max_of(rows.iter().map(|r| r[2].value / r[2].bound_value()));
    out.field("words_max_ratio", ratio);
    out.extend(rows.into_iter().flatten());
}

/// `‖a♯(b₁)…a*(b_n)Ω‖ ≤ √(n!)Π‖bᵢ‖`, and the exact orthonormal values.
fn vector_lengths(ctx: &Context, space: &Arc<FockSpace>, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let max_len = c.usize("vectors.max_len");
    if max_len > space.n_max {
        return Err(RunError::Config(format!("vectors.max_len = {max_len} exceeds fock.n_max = {}", space.n_max)));
    }
    let tol = c.f64("vectors.tolerance");
    let vac = FockState::vacuum(space);
    let ids: Vec<usize> = (0..c.usize("vectors.count")).collect();
    let rows = ctx.par_map(&ids, |_, &i| {
        let mut rng = ctx.rng(STREAM_VECTORS + i as u64);
        let n = rng.gen_range(1..=max_len);
        let mut bound = factorial_f64(n).sqrt();
        let mut letters = Vec::with_capacity(n);
        for k in 0..n {
            let scale = rng.gen_range(0.2..1.5);
            let b = random_complex(&mut rng, space.modes(), scale);
            bound *= coeff_norm(&b);
            let create = k == n - 1 || rng.gen_bool(0.5);
            letters.push(if create { Letter::Cre(b) } else { Letter::Ann(b) });
        }
        let (v, leak) = OperatorWord::from_letters(letters).apply(&vac);
        let case = format!("family-{i:03}");
        vec![
            Record::upper(case.clone(), "vector_length", v.norm(), bound, "vector length bound"),
            Record::upper(case, "leakage", leak, 0.0, "no truncation loss"),
        ]
    });
    let ratio = max_of(rows.iter().map(|r| r[0].value / r[0].bound_value()));
    out.field("vectors_max_ratio", ratio);
    out.extend(rows.into_iter().flatten());

    let mut worst: f64 = 0.0;
    for j in 0..space.modes() {
        let mut e = vec![Complex64::new(0.0, 0.0); space.modes()];
        e[j] = Complex64::new(1.0, 0.0);
        for beta in 0..=max_len {
            for alpha in 0..=(max_len - beta) {
                let mut letters = vec![Letter::Ann(e.clone()); alpha];
                letters.extend(vec![Letter::Cre(e.clone()); beta]);
                let (v, _) = OperatorWord::from_letters(letters).apply(&vac);
                let exact = if alpha > beta { 0.0 } else { factorial_f64(beta) / factorial_f64(beta - alpha).sqrt() };
                let case = format!("mode{j}-a{alpha}-b{beta}");
                let err = (v.norm() - exact).abs();
                worst = worst.max(err);
                out.push(Record::upper(case.clone(), "abs_error", err, tol, "orthonormal vector length"));
                out.push(Record::upper(case, "vector_length", v.norm(), factorial_f64(alpha + beta).sqrt() * (1.0 + 1e-12), "vector length bound"));
            }
        }
    }
    out.field("orthonormal_max_error", worst);
    Ok(())
}

/// `Σ_{|μ|=k}(k!/μ!)t^μ = (Σt)^k` over `n` integer variables, and the
/// trinomial sum `3^n`, both in exact integer arithmetic.
fn multinomials(ctx: &Context, out: &mut Outcome) -> Result<(), RunError> {
    let top = ctx.config.usize("multinomial.max");
    let cells: Vec<(usize, usize)> = (1..=top).flat_map(|n| (0..=top).map(move |k| (n, k))).collect();
    let rows = ctx.try_par_map(&cells, |i, &(n, k)| {
        let mut rng = ctx.rng(STREAM_MULTINOMIAL + i as u64);
        let t: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        let lhs = multinomial_sum_int(&t, k)?;
        let rhs = (t.iter().sum::<i64>() as i128).pow(k as u32);
        Ok(Record::upper(format!("n{n}-k{k}"), "abs_difference", (lhs - rhs).unsigned_abs() as f64, 0.0, "multinomial identity"))
    })?;
    let mut worst = max_of(rows.iter().map(|r| r.value));
    out.extend(rows);
    for n in 0..=top as u32 {
        let diff = (trinomial_sum(n)? as i128 - 3i128.pow(n)).unsigned_abs() as f64;
        worst = worst.max(diff);
        out.push(Record::upper(format!("trinomial-n{n}"), "abs_difference", diff, 0.0, "trinomial identity"));
    }
    out.field("multinomial_max_abs_difference", worst);
    Ok(())
}

/// `‖P_E(a(h₁)…a(h_n))(g)P_E‖` with `g̃` supported in `(−0.9m, 0.9m)`.
fn smearing(ctx: &Context, space: &Arc<FockSpace>, out: &mut Outcome) -> Result<(), RunError> {
    let c = &ctx.config;
    let e = c.f64("fock.energy");
    let (max_len, bound) = (c.usize("smearing.max_len"), c.f64("smearing.bound"));
    let profile = TimeProfile::default_for_mass(space.basis.grid.mass());
    let ids: Vec<usize> = (0..c.usize("smearing.count")).collect();
    let rows = ctx.try_par_map(&ids, |_, &i| {
        let mut rng = ctx.rng(STREAM_SMEARING + i as u64);
        let n = 1 + i % max_len;
        let letters = (0..n).map(|_| Letter::Ann(random_complex(&mut rng, space.modes(), 1.0))).collect();
        let r = time_smeared_word(space, &OperatorWord::from_letters(letters), &profile, e)?;
        let case = format!("smeared-{i:03}");
        Ok(vec![
            Record::info(case.clone(), "length", n as f64),
            Record::info(case.clone(), "unsmeared_norm", r.unsmeared),
            Record::upper(case, "smeared_norm", r.norm, bound, "time-smeared annihilators vanish on energy-bounded states"),
        ])
    })?;
    out.field("smearing_max_norm", max_of(rows.iter().map(|r| r[2].value)));
    out.extend(rows.into_iter().flatten());
    Ok(())
}
