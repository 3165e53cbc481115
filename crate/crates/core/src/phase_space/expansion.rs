use crate::error::{Error, Result};
use crate::multiindex::{factorial_f64, MultiIndex, TwoMultiIndex};

/// One rank-one term `τ_{μ̄,ν̄} S_{μ̄,ν̄}` with its norm bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionTerm {
    pub mu: TwoMultiIndex,
    pub nu: TwoMultiIndex,
    pub tau: f64,
    pub s: f64,
}

fn t_power(t: &[f64], mu: &MultiIndex) -> Result<f64> {
    let mut out = 1.0;
    for (k, n) in mu.iter() {
        let v = t.get(k.wrapping_sub(1)).ok_or(Error::IndexOutOfRange { index: k, len: t.len() })?;
        out *= v.powi(n as i32);
    }
    Ok(out)
}

/// `τ ≤ 2^{(5/2)(|μ̄|+|ν̄|)}/√(μ̄!ν̄!)` and `‖S‖ ≤ E^{(|μ̄|+|ν̄|)/2} t^{μ̄} t^{ν̄}`,
/// with `t` the eigenvalues of T indexed from 1.
pub fn expansion_term_bounds(mu: &TwoMultiIndex, nu: &TwoMultiIndex, t: &[f64], energy: f64) -> Result<(f64, f64)> {
    let k = (mu.len() + nu.len()) as f64;
    let tau = 2f64.powf(2.5 * k) / (mu.factorial_f64() * nu.factorial_f64()).sqrt();
    let tp = t_power(t, &mu.plus)? * t_power(t, &mu.minus)? * t_power(t, &nu.plus)? * t_power(t, &nu.minus)?;
    Ok((tau, energy.powf(k / 2.0) * tp))
}

/// The expansion of the energy-damped localization map in rank-one terms,
/// indexed by four multiindices over the eigenvalues of T. In the massive
/// case `order_cap = [E/m]`: terms with `|μ̄|` or `|ν̄|` above it vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOneExpansion {
    pub eigenvalues: Vec<f64>,
    pub energy: f64,
    pub order_cap: Option<usize>,
    pub terms: Vec<ExpansionTerm>,
}

impl RankOneExpansion {
    pub fn new(eigenvalues: Vec<f64>, energy: f64, order_cap: Option<usize>) -> Self {
        Self { eigenvalues, energy, order_cap, terms: Vec::new() }
    }

    /// Lists every term with `|μ̄| + |ν̄| ≤ k_max`, in order of total length.
    pub fn enumerate(mut self, k_max: usize, max_terms: usize) -> Result<Self> {
        let d = self.eigenvalues.len();
        let cap = self.order_cap.unwrap_or(usize::MAX);
        for k in 0..=k_max {
            for a in 0..=k {
                let b = k - a;
                if a > cap || b > cap {
                    continue;
                }
                for mu in two_indices(a, d) {
                    for nu in two_indices(b, d) {
                        if self.terms.len() >= max_terms {
                            return Err(Error::Config(format!("more than {max_terms} expansion terms")));
                        }
                        let (tau, s) = expansion_term_bounds(&mu, &nu, &self.eigenvalues, self.energy)?;
                        self.terms.push(ExpansionTerm { mu: mu.clone(), nu, tau, s });
                    }
                }
            }
        }
        Ok(self)
    }

    /// Running sums of `(τS)^p` over the listed terms.
    pub fn running_sums(&self, p: f64) -> Vec<f64> {
        let mut acc = 0.0;
        self.terms
            .iter()
            .map(|t| {
                acc += (t.tau * t.s).powf(p);
                acc
            })
            .collect()
    }
}

fn two_indices(len: usize, d: usize) -> Vec<TwoMultiIndex> {
    let mut out = Vec::new();
    if d == 0 {
        if len == 0 {
            out.push(TwoMultiIndex::new(MultiIndex::new(), MultiIndex::new()));
        }
        return out;
    }
    for a in 0..=len {
        for p in MultiIndex::enumerate_of_length(a, d) {
            for m in MultiIndex::enumerate_of_length(len - a, d) {
                out.push(TwoMultiIndex::new(p.clone(), m));
            }
        }
    }
    out
}

/// `A_k = Σ_{|μ|=k} (2^{5/2}√E)^{pk} t^{pμ}/(μ!)^{p/2}` for one multiindex, `k ≤ k_max`.
pub fn graded_weights(t: &[f64], energy: f64, p: f64, k_max: usize) -> Vec<f64> {
    let c = (2f64.powf(2.5) * energy.sqrt()).powf(p);
    let mut poly = vec![0.0; k_max + 1];
    poly[0] = 1.0;
    for &ti in t {
        let factor: Vec<f64> = (0..=k_max).map(|j| (c * ti.powf(p)).powi(j as i32) / factorial_f64(j).powf(p / 2.0)).collect();
        poly = convolve(&poly, &factor, k_max);
    }
    poly
}

/// `B_k = (2^5E)^{pk/2} ‖T^p‖₁^k/(k!)^{p/2}`, which dominates `A_k`.
pub fn majorant_weights(t: &[f64], energy: f64, p: f64, k_max: usize) -> Vec<f64> {
    let trace: f64 = t.iter().map(|x| x.powf(p)).sum();
    let c = (32.0 * energy).powf(p / 2.0) * trace;
    (0..=k_max).map(|k| c.powi(k as i32) / factorial_f64(k).powf(p / 2.0)).collect()
}

fn convolve(a: &[f64], b: &[f64], k_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; k_max + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j <= k_max {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// `Σ (τS)^p` over `|μ̄|+|ν̄| ≤ k_max` from graded single-index weights `w`,
/// with `|μ̄|, |ν̄| ≤ cap`.
fn four_fold_sum(w: &[f64], k_lo: usize, k_hi: usize, cap: Option<usize>) -> f64 {
    let pair = convolve(w, w, w.len() - 1);
    let cap = cap.unwrap_or(usize::MAX);
    let mut total = 0.0;
    for (a, x) in pair.iter().enumerate() {
        for (b, y) in pair.iter().enumerate() {
            let k = a + b;
            if a <= cap && b <= cap && k >= k_lo && k <= k_hi {
                total += x * y;
            }
        }
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PNormSum {
    pub value: f64,
    /// Majorant of the omitted terms with `|μ̄|+|ν̄| > k_max`.
    pub tail: f64,
    /// `(Σ_{k ≤ k_max} B_k)⁴`, a lower truncation of the closed majorant.
    pub majorant: f64,
    pub tail_converged: bool,
}

/// Partial sum of `(τS)^p` over `|μ̄|+|ν̄| ≤ k_max`, the tail bound from the
/// majorant weights, and the truncated closed majorant.
pub fn p_norm_partial_sum(exp: &RankOneExpansion, p: f64, k_max: usize) -> Result<PNormSum> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Param(format!("p = {p} outside (0, 1]")));
    }
    if exp.eigenvalues.is_empty() {
        return Ok(PNormSum { value: if exp.terms.is_empty() { 0.0 } else { 1.0 }, tail: 0.0, majorant: 1.0, tail_converged: true });
    }
    let w = graded_weights(&exp.eigenvalues, exp.energy, p, k_max);
    let value = four_fold_sum(&w, 0, k_max, exp.order_cap);
    let maj_w = majorant_weights(&exp.eigenvalues, exp.energy, p, k_max);
    let majorant = maj_w.iter().sum::<f64>().powi(4);
    let (tail, tail_converged) = match exp.order_cap {
        Some(cap) => {
            let hi = 2 * cap;
            if hi <= k_max {
                (0.0, true)
            } else {
                let mw = majorant_weights(&exp.eigenvalues, exp.energy, p, hi);
                (four_fold_sum(&mw, k_max + 1, hi, Some(cap)), true)
            }
        }
        None => {
            let mut hi = (2 * k_max).max(16);
            let mut last = f64::INFINITY;
            let mut converged = false;
            while hi <= 4096 {
                let mw = majorant_weights(&exp.eigenvalues, exp.energy, p, hi);
                let t = four_fold_sum(&mw, k_max + 1, hi, None);
                if !t.is_finite() {
                    break;
                }
                if (t - last).abs() <= 1e-12 * t {
                    converged = true;
                    last = t;
                    break;
                }
                last = t;
                hi *= 2;
            }
            (last, converged)
        }
    };
    Ok(PNormSum { value, tail, majorant, tail_converged })
}

/// `base · (1 + (N−1)·corr)^{1/2}`: the N-dependence of the N-point p-norm bound.
pub fn n_point_majorant(base: f64, correlation: f64, n: usize) -> f64 {
    base * (1.0 + (n as f64 - 1.0) * correlation).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_bounds() {
        let z = TwoMultiIndex::new(MultiIndex::new(), MultiIndex::new());
        assert_eq!(expansion_term_bounds(&z, &z, &[0.3], 4.0).unwrap(), (1.0, 1.0));
        let one = TwoMultiIndex::new(MultiIndex::from_pairs([(1, 1)]), MultiIndex::new());
        let (_, s) = expansion_term_bounds(&one, &z, &[0.3, 0.1], 4.0).unwrap();
        assert!((s - 0.6).abs() < 1e-15);
        let bad = TwoMultiIndex::new(MultiIndex::from_pairs([(3, 1)]), MultiIndex::new());
        assert!(expansion_term_bounds(&bad, &z, &[0.3], 1.0).is_err());
    }

    #[test]
    fn graded_sum_matches_enumeration() {
        let t = vec![0.4, 0.15, 0.05];
        for cap in [None, Some(2)] {
            let exp = RankOneExpansion::new(t.clone(), 1.5, cap).enumerate(4, 1_000_000).unwrap();
            for p in [0.25, 0.5, 1.0] {
                let direct = *exp.running_sums(p).last().unwrap();
                let graded = p_norm_partial_sum(&exp, p, 4).unwrap();
                assert!((direct / graded.value - 1.0).abs() < 1e-12, "{direct} vs {}", graded.value);
                assert!(graded.value <= graded.majorant);
            }
        }
    }

    #[test]
    fn empty_expansion() {
        let exp = RankOneExpansion::new(vec![], 1.0, None);
        let r = p_norm_partial_sum(&exp, 0.5, 3).unwrap();
        assert_eq!((r.value, r.tail), (0.0, 0.0));
    }

    #[test]
    fn massive_tail_vanishes_beyond_twice_the_cap() {
        let exp = RankOneExpansion::new(vec![0.5, 0.2], 2.0, Some(2));
        let r = p_norm_partial_sum(&exp, 1.0, 8).unwrap();
        assert_eq!(r.tail, 0.0);
        let r = p_norm_partial_sum(&exp, 1.0, 3).unwrap();
        assert!(r.tail > 0.0);
    }
}
