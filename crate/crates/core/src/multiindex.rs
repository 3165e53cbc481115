//! Sparse multiindices `μ: ℕ → ℕ₀` with length, factorial and powers.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Occupation map with only nonzero counts stored. Keys start at 1.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    entries: BTreeMap<usize, u32>,
}

impl MultiIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from `(key, count)` pairs; zero counts are skipped, repeated keys add up.
    pub fn from_pairs<I: IntoIterator<Item = (usize, u32)>>(pairs: I) -> Self {
        let mut mi = Self::new();
        for (k, c) in pairs {
            mi.bump(k, c);
        }
        mi
    }

    /// Dense tuple `(μ(1), …, μ(dims))`.
    pub fn from_dense(counts: &[u32]) -> Self {
        Self::from_pairs(counts.iter().enumerate().map(|(i, &c)| (i + 1, c)))
    }

    pub fn unit(key: usize) -> Self {
        Self::from_pairs([(key, 1)])
    }

    pub fn get(&self, key: usize) -> u32 {
        self.entries.get(&key).copied().unwrap_or(0)
    }

    pub fn bump(&mut self, key: usize, by: u32) {
        assert!(key >= 1, "multiindex keys start at 1");
        if by > 0 {
            *self.entries.entry(key).or_insert(0) += by;
        }
    }

    /// Removes one unit at `key`; returns false when the count is already zero.
    pub fn lower(&mut self, key: usize) -> bool {
        match self.entries.get_mut(&key) {
            Some(c) if *c > 1 => {
                *c -= 1;
                true
            }
            Some(_) => {
                self.entries.remove(&key);
                true
            }
            None => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.entries.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_key(&self) -> usize {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    /// |μ|
    pub fn len(&self) -> usize {
        self.entries.values().map(|&c| c as usize).sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        let mut out = self.clone();
        for (k, c) in other.iter() {
            out.bump(k, c);
        }
        out
    }

    /// `self − other` when `other ≤ self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = self.clone();
        for (k, c) in other.iter() {
            let have = out.get(k);
            if have < c {
                return None;
            }
            out.entries.remove(&k);
            if have > c {
                out.entries.insert(k, have - c);
            }
        }
        Some(out)
    }

    /// μ! as an exact integer.
    pub fn factorial(&self) -> Result<u64> {
        let mut acc: u64 = 1;
        for (_, c) in self.iter() {
            acc = acc
                .checked_mul(factorial_u64(c as u64)?)
                .ok_or(Error::Overflow("multiindex factorial"))?;
        }
        Ok(acc)
    }

    /// μ! in floating point; never overflows for realistic sizes.
    pub fn factorial_f64(&self) -> f64 {
        self.iter().map(|(_, c)| factorial_f64(c as usize)).product()
    }

    /// |μ|!/μ!
    pub fn multinomial(&self) -> Result<u64> {
        let mut acc: u128 = 1;
        let mut running: u128 = 0;
        for (_, c) in self.iter() {
            for j in 1..=c as u128 {
                running += 1;
                acc = acc * running / j;
                if acc > u64::MAX as u128 {
                    return Err(Error::Overflow("multinomial coefficient"));
                }
            }
        }
        Ok(acc as u64)
    }

    /// Π seq[i−1]^{μ(i)}
    pub fn power(&self, seq: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for (k, c) in self.iter() {
            let v = seq
                .get(k - 1)
                .ok_or(Error::IndexOutOfRange { index: k, len: seq.len() })?;
            acc *= v.powu(c);
        }
        Ok(acc)
    }

    pub fn power_real(&self, seq: &[f64]) -> Result<f64> {
        let mut acc = 1.0;
        for (k, c) in self.iter() {
            let v = seq
                .get(k - 1)
                .ok_or(Error::IndexOutOfRange { index: k, len: seq.len() })?;
            acc *= v.powi(c as i32);
        }
        Ok(acc)
    }

    pub fn to_dense(&self, dims: usize) -> Vec<u32> {
        (1..=dims).map(|k| self.get(k)).collect()
    }

    /// All multiindices over keys `1..=dims` with `|μ| = k`, ordered so that the
    /// dense tuples descend lexicographically: `{1:2}, {1:1,2:1}, {2:2}`.
    pub fn enumerate_of_length(k: usize, dims: usize) -> Vec<MultiIndex> {
        assert!(dims >= 1, "dims must be positive");
        let mut out = Vec::new();
        let mut dense = vec![0u32; dims];
        fill(&mut dense, 0, k as u32, &mut out);
        out
    }

    /// Every `ν ≤ μ` componentwise, together with `μ − ν`.
    pub fn splits(&self) -> Vec<(MultiIndex, MultiIndex)> {
        let items: Vec<(usize, u32)> = self.iter().collect();
        let mut out = vec![(MultiIndex::new(), MultiIndex::new())];
        for (k, c) in items {
            let mut next = Vec::with_capacity(out.len() * (c as usize + 1));
            for (a, b) in &out {
                for take in 0..=c {
                    let mut a2 = a.clone();
                    let mut b2 = b.clone();
                    a2.bump(k, take);
                    b2.bump(k, c - take);
                    next.push((a2, b2));
                }
            }
            out = next;
        }
        out
    }
}

fn fill(dense: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos == dense.len() - 1 {
        dense[pos] = remaining;
        out.push(MultiIndex::from_dense(dense));
        dense[pos] = 0;
        return;
    }
    for c in (0..=remaining).rev() {
        dense[pos] = c;
        fill(dense, pos + 1, remaining - c, out);
    }
    dense[pos] = 0;
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, c)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}:{c}")?;
        }
        write!(f, "}}")
    }
}

/// Pair `μ̄ = (μ⁺, μ⁻)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoMultiIndex {
    pub plus: MultiIndex,
    pub minus: MultiIndex,
}

impl TwoMultiIndex {
    pub fn new(plus: MultiIndex, minus: MultiIndex) -> Self {
        Self { plus, minus }
    }

    pub fn len(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty() && self.minus.is_empty()
    }

    pub fn factorial(&self) -> Result<u64> {
        self.plus
            .factorial()?
            .checked_mul(self.minus.factorial()?)
            .ok_or(Error::Overflow("two-multiindex factorial"))
    }

    pub fn factorial_f64(&self) -> f64 {
        self.plus.factorial_f64() * self.minus.factorial_f64()
    }

    pub fn add(&self, other: &TwoMultiIndex) -> TwoMultiIndex {
        TwoMultiIndex::new(self.plus.add(&other.plus), self.minus.add(&other.minus))
    }
}

pub fn factorial_u64(n: u64) -> Result<u64> {
    (1..=n).try_fold(1u64, |acc, j| acc.checked_mul(j).ok_or(Error::Overflow("factorial")))
}

pub fn factorial_f64(n: usize) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k as u128 {
        acc = acc * (n as u128 - j) / (j + 1);
    }
    acc as u64
}

/// Σ_{a+a'+a''=n} n!/(a!a'!a''!), computed term by term in exact arithmetic.
pub fn trinomial_sum(n: u32) -> Result<u128> {
    let mut total: u128 = 0;
    for a in 0..=n {
        for b in 0..=(n - a) {
            let c = n - a - b;
            total += MultiIndex::from_dense(&[a, b, c]).multinomial()? as u128;
        }
    }
    Ok(total)
}

/// Σ_{|μ|=k} (|μ|!/μ!) t^μ over `t.len()` keys.
pub fn multinomial_sum(t: &[Complex64], k: usize) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for mu in MultiIndex::enumerate_of_length(k, t.len()) {
        acc += mu.multinomial()? as f64 * mu.power(t)?;
    }
    Ok(acc)
}

/// Integer version of [`multinomial_sum`], exact.
pub fn multinomial_sum_int(t: &[i64], k: usize) -> Result<i128> {
    let mut acc: i128 = 0;
    for mu in MultiIndex::enumerate_of_length(k, t.len()) {
        let mut term = mu.multinomial()? as i128;
        for (key, c) in mu.iter() {
            term = term
                .checked_mul((t[key - 1] as i128).pow(c))
                .ok_or(Error::Overflow("multinomial sum"))?;
        }
        acc = acc.checked_add(term).ok_or(Error::Overflow("multinomial sum"))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn add_examples() {
        let a = MultiIndex::from_pairs([(1, 2)]);
        let b = MultiIndex::from_pairs([(1, 1), (3, 1)]);
        assert_eq!(a.add(&b), MultiIndex::from_pairs([(1, 3), (3, 1)]));
        assert_eq!(MultiIndex::new().add(&MultiIndex::new()), MultiIndex::new());
        let seven = MultiIndex::from_pairs([(7, 5)]);
        assert_eq!(seven.add(&MultiIndex::new()), seven);
    }

    #[test]
    fn absent_key_is_zero_and_zero_counts_not_stored() {
        let mi = MultiIndex::from_pairs([(2, 0), (4, 3)]);
        assert_eq!(mi.get(2), 0);
        assert_eq!(mi.get(1), 0);
        assert_eq!(mi.iter().count(), 1);
        assert_eq!(mi.len(), 3);
    }

    #[test]
    fn power_examples() {
        let mu = MultiIndex::from_pairs([(1, 2)]);
        assert_eq!(mu.power(&[c(2.0, 0.0), c(3.0, 0.0)]).unwrap(), c(4.0, 0.0));
        assert_eq!(MultiIndex::new().power(&[c(9.0, 1.0)]).unwrap(), c(1.0, 0.0));
        let z = mu.power(&[c(1.0, 1.0)]).unwrap();
        assert!((z - c(0.0, 2.0)).norm() < 1e-15);
        let err = MultiIndex::unit(3).power(&[c(1.0, 0.0)]).unwrap_err();
        assert_eq!(err, Error::IndexOutOfRange { index: 3, len: 1 });
    }

    #[test]
    fn enumeration_examples() {
        let got = MultiIndex::enumerate_of_length(2, 2);
        let want = vec![
            MultiIndex::from_pairs([(1, 2)]),
            MultiIndex::from_pairs([(1, 1), (2, 1)]),
            MultiIndex::from_pairs([(2, 2)]),
        ];
        assert_eq!(got, want);
        assert_eq!(MultiIndex::enumerate_of_length(0, 5), vec![MultiIndex::new()]);
    }

    #[test]
    fn enumeration_count_matches_brute_force() {
        // brute force: every dense tuple in {0..=k}^dims whose entries sum to k
        for dims in 1..=4usize {
            for k in 0..=5u32 {
                let mut count = 0;
                let total = (k as usize + 1).pow(dims as u32);
                for code in 0..total {
                    let mut rest = code;
                    let mut sum = 0;
                    for _ in 0..dims {
                        sum += (rest % (k as usize + 1)) as u32;
                        rest /= k as usize + 1;
                    }
                    if sum == k {
                        count += 1;
                    }
                }
                assert_eq!(MultiIndex::enumerate_of_length(k as usize, dims).len(), count);
            }
        }
        assert_eq!(MultiIndex::enumerate_of_length(3, 3).len(), 10);
    }

    #[test]
    fn factorial_and_overflow() {
        assert_eq!(MultiIndex::from_pairs([(1, 3), (2, 2)]).factorial().unwrap(), 12);
        assert_eq!(MultiIndex::new().factorial().unwrap(), 1);
        assert_eq!(MultiIndex::from_pairs([(1, 21)]).factorial(), Err(Error::Overflow("factorial")));
        assert_eq!(MultiIndex::from_pairs([(1, 2), (2, 1)]).multinomial().unwrap(), 3);
    }

    #[test]
    fn trinomial_is_power_of_three() {
        for n in 0..=12u32 {
            assert_eq!(trinomial_sum(n).unwrap(), 3u128.pow(n));
        }
    }

    #[test]
    fn integer_multinomial_identity_exact() {
        let t = [3i64, -2, 5, 1];
        for k in 0..=12 {
            let s: i128 = t.iter().map(|&x| x as i128).sum();
            assert_eq!(multinomial_sum_int(&t, k).unwrap(), s.pow(k as u32));
        }
    }

    #[test]
    fn two_multiindex_length_and_factorial() {
        let mb = TwoMultiIndex::new(MultiIndex::from_pairs([(1, 2)]), MultiIndex::from_pairs([(2, 3)]));
        assert_eq!(mb.len(), 5);
        assert_eq!(mb.factorial().unwrap(), 12);
    }

    #[test]
    fn splits_cover_all_subindices() {
        let mu = MultiIndex::from_pairs([(1, 2), (3, 1)]);
        let sp = mu.splits();
        assert_eq!(sp.len(), 6);
        for (a, b) in sp {
            assert_eq!(a.add(&b), mu);
        }
    }
}
