use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::multiindex::{MultiIndex, TwoMultiIndex};

/// Mode coordinates of the families `b⁺_i`, `b⁻_i` (index `i` starts at 1).
#[derive(Clone, Debug)]
pub struct BFamily {
    pub plus: Vec<Vec<Complex64>>,
    pub minus: Vec<Vec<Complex64>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaValue {
    pub value: Complex64,
    /// `Σ |coefficient|·‖bra‖·‖ket‖` over the splitting terms.
    pub term_bound: f64,
}

fn apply_creators(mut v: FockState, alpha: &TwoMultiIndex, b: &BFamily) -> Result<FockState> {
    for (mu, fam) in [(&alpha.minus, &b.minus), (&alpha.plus, &b.plus)] {
        for (k, count) in mu.iter() {
            let c = fam.get(k - 1).ok_or(Error::IndexOutOfRange { index: k, len: fam.len() })?;
            for _ in 0..count {
                v = v.create_coeffs(c).0;
            }
        }
    }
    Ok(v)
}

fn apply_annihilators(mut v: FockState, alpha: &TwoMultiIndex, b: &BFamily) -> Result<FockState> {
    for (mu, fam) in [(&alpha.minus, &b.minus), (&alpha.plus, &b.plus)] {
        for (k, count) in mu.iter() {
            let c = fam.get(k - 1).ok_or(Error::IndexOutOfRange { index: k, len: fam.len() })?;
            for _ in 0..count {
                v = v.annihilate_coeffs(c);
            }
        }
    }
    Ok(v)
}

/// Sign exponent of each splitting term. `derived` uses
/// `|α⁺| + |α″⁺| + |α″⁻|` (the expansion of the generating functional);
/// otherwise `|α⁺| + |α″⁻|`.
fn sign_exponent(a: &TwoMultiIndex, a2: &TwoMultiIndex, derived: bool) -> usize {
    if derived {
        a.plus.len() + a2.plus.len() + a2.minus.len()
    } else {
        a.plus.len() + a2.minus.len()
    }
}

fn triple_splits(mu: &MultiIndex) -> Vec<(MultiIndex, MultiIndex, MultiIndex)> {
    let mut out = Vec::new();
    for (a, rest) in mu.splits() {
        for (a1, a2) in rest.splits() {
            out.push((a.clone(), a1, a2));
        }
    }
    out
}

/// `σ_{μ⁺,μ⁻}(A)` as the finite sum over `ᾱ + ᾱ′ + ᾱ″ = μ̄` of
/// `(½)^{|μ̄|} i^{|μ⁺|+2|μ⁻|} (−1)^{…} μ̄!/(ᾱ!ᾱ′!ᾱ″!) ⟨a(b)^{ᾱ′}a*(b)^{ᾱ}Ω | A a*(b)^{ᾱ″}Ω⟩`.
/// `op` must be exact on vectors with at most `|μ̄|` particles after projection.
pub fn sigma_functional<F>(mu: &TwoMultiIndex, b: &BFamily, vacuum: &FockState, op: F) -> Result<SigmaValue>
where
    F: Fn(&FockState) -> FockState,
{
    sigma_with_sign(mu, b, vacuum, op, true)
}

pub fn sigma_with_sign<F>(mu: &TwoMultiIndex, b: &BFamily, vacuum: &FockState, op: F, derived: bool) -> Result<SigmaValue>
where
    F: Fn(&FockState) -> FockState,
{
    let total = mu.len();
    if vacuum.space.n_max < total {
        return Err(Error::Config(format!("n_max = {} below |μ̄| = {total}", vacuum.space.n_max)));
    }
    let pref = Complex64::new(0.5f64.powi(total as i32), 0.0) * Complex64::new(0.0, 1.0).powu((mu.plus.len() + 2 * mu.minus.len()) as u32);
    let mu_fact = mu.factorial_f64();
    let mut value = Complex64::new(0.0, 0.0);
    let mut bound = 0.0;
    let splits_plus = triple_splits(&mu.plus);
    let splits_minus = triple_splits(&mu.minus);
    for (ap, ap1, ap2) in &splits_plus {
        for (am, am1, am2) in &splits_minus {
            let a = TwoMultiIndex::new(ap.clone(), am.clone());
            let a1 = TwoMultiIndex::new(ap1.clone(), am1.clone());
            let a2 = TwoMultiIndex::new(ap2.clone(), am2.clone());
            let coef = mu_fact / (a.factorial_f64() * a1.factorial_f64() * a2.factorial_f64());
            let sign = if sign_exponent(&a, &a2, derived) % 2 == 0 { 1.0 } else { -1.0 };
            let bra = apply_annihilators(apply_creators(vacuum.clone(), &a, b)?, &a1, b)?;
            let ket = apply_creators(vacuum.clone(), &a2, b)?;
            if bra.norm_sqr() == 0.0 || ket.norm_sqr() == 0.0 {
                continue;
            }
            let elem = bra.inner(&op(&ket));
            value += pref * sign * coef * elem;
            bound += pref.norm() * coef * bra.norm() * ket.norm();
        }
    }
    Ok(SigmaValue { value, term_bound: bound })
}
