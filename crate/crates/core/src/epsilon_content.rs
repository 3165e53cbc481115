//! ε-content of finite point clouds and the counting bounds that control it.

use std::f64::consts::{E, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest cloud searched exactly.
pub const EXACT_CAP: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    Sup,
    Euclidean,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Vec<Complex64>>,
    pub norm: Norm,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<Complex64>>, norm: Norm) -> Result<Self> {
        if let Some(first) = points.first() {
            if points.iter().any(|p| p.len() != first.len()) {
                return Err(Error::Param("points of a cloud must share a dimension".into()));
            }
        }
        Ok(Self { points, norm })
    }

    pub fn from_real(points: &[Vec<f64>], norm: Norm) -> Result<Self> {
        Self::new(points.iter().map(|p| p.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect(), norm)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let diffs = self.points[i].iter().zip(&self.points[j]).map(|(a, b)| (a - b).norm());
        match self.norm {
            Norm::Sup => diffs.fold(0.0, f64::max),
            Norm::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
        }
    }

    /// `u ↦ (S₁(u), …, S_N(u))` over the given inputs, with `S_k(u) = Σ_j s_kj u_j`
    /// and the sup norm on `ℂ^N`.
    pub fn image_of(rows: &[Vec<Complex64>], inputs: &[Vec<Complex64>]) -> Self {
        let points = inputs.iter().map(|u| rows.iter().map(|s| s.iter().zip(u).map(|(a, b)| a * b).sum()).collect()).collect();
        Self { points, norm: Norm::Sup }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Content {
    pub value: usize,
    /// False when the cloud exceeded [`EXACT_CAP`] and `value` is a greedy lower bound.
    pub exact: bool,
}

/// Largest subset with pairwise distances `> ε`.
pub fn eps_content(cloud: &PointCloud, eps: f64) -> Result<Content> {
    if !(eps > 0.0) {
        return Err(Error::Param(format!("ε must be positive, got {eps}")));
    }
    let n = cloud.len();
    if n == 0 {
        return Ok(Content { value: 0, exact: true });
    }
    if n > EXACT_CAP {
        return Ok(Content { value: greedy(cloud, eps), exact: false });
    }
    let mut adj = vec![0u32; n];
    for i in 0..n {
        for j in i + 1..n {
            if cloud.distance(i, j) > eps {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(adj[i].count_ones()), i));
    // relabel so that bit k is the k-th vertex in degree order
    let mut rel = vec![0u32; n];
    for (a, &i) in order.iter().enumerate() {
        for (b, &j) in order.iter().enumerate() {
            if adj[i] >> j & 1 == 1 {
                rel[a] |= 1 << b;
            }
        }
    }
    let mut best = 0;
    clique(&rel, 0, (1u32 << n) - 1, &mut best);
    Ok(Content { value: best, exact: true })
}

fn clique(adj: &[u32], size: usize, mut cand: u32, best: &mut usize) {
    if cand == 0 {
        *best = (*best).max(size);
        return;
    }
    while cand != 0 {
        if size + cand.count_ones() as usize <= *best {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        cand &= !(1 << v);
        clique(adj, size + 1, cand & adj[v], best);
    }
}

fn greedy(cloud: &PointCloud, eps: f64) -> usize {
    let n = cloud.len();
    let deg: Vec<usize> = (0..n).map(|i| (0..n).filter(|&j| j != i && cloud.distance(i, j) > eps).count()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(deg[i]), i));
    let mut chosen: Vec<usize> = Vec::new();
    for i in order {
        if chosen.iter().all(|&j| cloud.distance(i, j) > eps) {
            chosen.push(i);
        }
    }
    chosen.len()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KeyKeyBound {
    pub value: f64,
    pub exponent: f64,
    pub overflow: bool,
}

/// `(4eN)^{2⁷π‖Σ‖₂²/ε²}`.
pub fn key_key_bound(n: usize, norm2: f64, eps: f64) -> Result<KeyKeyBound> {
    if n == 0 || !(eps > 0.0) || !(norm2 >= 0.0) {
        return Err(Error::Param(format!("need N ≥ 1, ε > 0, ‖Σ‖₂ ≥ 0 (got {n}, {eps}, {norm2})")));
    }
    let exponent = 128.0 * PI * norm2 * norm2 / (eps * eps);
    let value = (exponent * (4.0 * E * n as f64).ln()).exp();
    Ok(KeyKeyBound { value, exponent, overflow: !value.is_finite() })
}

/// `#{n ∈ ℤ^d : Σn² ≤ M}` by enumeration.
pub fn lattice_count(d: usize, m: u64) -> u64 {
    fn rec(d: usize, left: u64) -> u64 {
        if d == 0 {
            return 1;
        }
        let r = (left as f64).sqrt() as i64 + 1;
        (-r..=r).filter(|k| (k * k) as u64 <= left).map(|k| rec(d - 1, left - (k * k) as u64)).sum()
    }
    rec(d, m)
}

/// Volume of the `M`-ball of radius `r`.
pub fn ball_volume(m: usize, r: f64) -> f64 {
    // V_M = 2π/M · r² · V_{M−2}
    let (mut v, start) = if m % 2 == 0 { (1.0, 2) } else { (2.0 * r, 3) };
    let mut k = start;
    while k <= m {
        v *= 2.0 * PI * r * r / k as f64;
        k += 2;
    }
    v
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallCount {
    pub count: u64,
    /// `C(2N,M) 2^M V_M(2√M)`.
    pub cube_bound: f64,
    /// `(4Ne)^{8πM}`.
    pub power_bound: f64,
}

pub fn ball_count(n: usize, m: usize) -> BallCount {
    let mf = m as f64;
    BallCount {
        count: lattice_count(2 * n, m as u64),
        cube_bound: binomial(2 * n, m) * 2f64.powi(m as i32) * ball_volume(m, 2.0 * mf.sqrt()),
        power_bound: (8.0 * PI * mf * (4.0 * n as f64 * E).ln()).exp(),
    }
}

/// `Π_n 𝓝(ε_n)_n`, requiring `Σε_n ≤ ε/4`.
pub fn product_compose_bound(contents: &[&dyn Fn(f64) -> f64], eps_split: &[f64], eps: f64) -> Result<f64> {
    if contents.len() != eps_split.len() {
        return Err(Error::Param(format!("{} maps but {} budget entries", contents.len(), eps_split.len())));
    }
    let total: f64 = eps_split.iter().sum();
    if eps_split.iter().any(|&e| !(e > 0.0)) || total > eps / 4.0 * (1.0 + 1e-12) {
        return Err(Error::Param(format!("split Σε_n = {total} exceeds ε/4 = {}", eps / 4.0)));
    }
    Ok(contents.iter().zip(eps_split).map(|(f, &e)| f(e)).product())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> PointCloud {
        PointCloud::from_real(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>(), Norm::Euclidean).unwrap()
    }

    #[test]
    fn small_cases() {
        assert_eq!(eps_content(&line(&[0.3]), 1.0).unwrap().value, 1);
        assert_eq!(eps_content(&line(&[0.0, 3.0]), 2.0).unwrap().value, 2);
        assert_eq!(eps_content(&line(&[0.0, 3.0]), 4.0).unwrap().value, 1);
        assert_eq!(eps_content(&line(&[0.0, 3.0]), 3.0).unwrap().value, 1);
        assert_eq!(eps_content(&line(&[0.0, 1.0, 2.0, 3.0, 4.0]), 1.5).unwrap().value, 3);
        assert!(eps_content(&line(&[0.0]), 0.0).is_err());
    }

    #[test]
    fn greedy_beyond_cap() {
        let xs: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let c = eps_content(&line(&xs), 2.5).unwrap();
        assert!(!c.exact);
        assert_eq!(c.value, 10);
    }

    #[test]
    fn key_key_edges() {
        assert_eq!(key_key_bound(3, 0.0, 0.5).unwrap().value, 1.0);
        let b = key_key_bound(6, 10.0, 0.01).unwrap();
        assert!(b.overflow && b.value.is_infinite());
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(lattice_count(2, 1), 5);
        assert_eq!(lattice_count(4, 1), 9);
        assert_eq!(lattice_count(4, 2), 33);
        for m in 1..=3 {
            let b = ball_count(2, m);
            assert!(b.count as f64 <= b.cube_bound && b.cube_bound <= b.power_bound, "{b:?}");
        }
    }

    #[test]
    fn ball_volumes() {
        assert!((ball_volume(2, 1.0) - PI).abs() < 1e-14);
        assert!((ball_volume(3, 2.0) - 4.0 / 3.0 * PI * 8.0).abs() < 1e-12);
        assert_eq!(ball_volume(0, 5.0), 1.0);
    }

    #[test]
    fn budget_enforced() {
        let one = |_: f64| 3.0;
        let f: &dyn Fn(f64) -> f64 = &one;
        assert_eq!(product_compose_bound(&[f], &[0.25], 1.0).unwrap(), 3.0);
        assert!(product_compose_bound(&[f, f], &[0.2, 0.1], 1.0).is_err());
    }
}
