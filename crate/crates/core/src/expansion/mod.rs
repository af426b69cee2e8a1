//! Vertex expansion of output distributions, light cones, the Chebyshev profile
//! behind the expansion bound, closed-form bound calculators, and a dense
//! statevector simulator for small circuits.
//!
//! `∂_ℓ(S)` is the set of strings within Hamming distance `ℓ` of the other side of
//! the cut `(S, S^c)`; `h_ℓ(p)` is the least `p(∂_ℓ(S)) / p(S)` over `0 < p(S) <= 1/2`.
//! Distances are integers, so a real radius `ℓ` acts as `⌊ℓ⌋`.

mod circuit;
mod trials;

pub use circuit::{
    haar_unitary, light_cones, random_circuit, simulate, statevector, Circuit, Gate,
    LightConeReport, MASS_FLOOR, UNITARY_TOL,
};
pub use trials::{
    empirical_vertex_theorem, GammaSummary, TrialConfig, TrialReport, Violation, VIOLATION_TOL,
};

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::BitVector;

pub const MAX_SIM_QUBITS: usize = 20;
/// Largest `n` for which every subset of `F_2^n` is tried.
pub const MAX_EXACT_N: usize = 4;
pub const DIST_TOL: f64 = 1e-10;
pub const CHEB_SAMPLES: usize = 10_000;
pub const DEFAULT_GAMMAS: [f64; 5] = [0.0, 0.125, 0.25, 0.375, 0.5];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpansionError {
    #[error("{n} qubits exceeds the simulator limit of {limit}")]
    TooManyQubits { n: usize, limit: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("no candidate set has 0 < p(S) <= 1/2")]
    NoValidCandidate,
    #[error("mu must lie in (0, 1/2], got {0}")]
    InvalidMu(f64),
    #[error("gamma must lie in [0, 1/2], got {0}")]
    InvalidGamma(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Finite distribution on `F_2^n`: distinct strings with positive masses summing to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    n: usize,
    support: Vec<(BitVector, f64)>,
}

impl Distribution {
    /// Sorts entries; rejects duplicates, nonpositive masses and a total off 1 by more than `DIST_TOL`.
    pub fn new(n: usize, mut support: Vec<(BitVector, f64)>) -> Result<Self, ExpansionError> {
        let bad = |s: String| Err(ExpansionError::InvalidDistribution(s));
        if let Some((x, _)) = support.iter().find(|(x, _)| x.len() != n) {
            return bad(format!(
                "string of length {} in a distribution on {n} bits",
                x.len()
            ));
        }
        if support.iter().any(|&(_, m)| !(m > 0.0)) {
            return bad("masses must be positive".into());
        }
        support.sort_by(|a, b| a.0.cmp(&b.0));
        if support.windows(2).any(|w| w[0].0 == w[1].0) {
            return bad("repeated support point".into());
        }
        let total: f64 = support.iter().map(|(_, m)| m).sum();
        if (total - 1.0).abs() > DIST_TOL {
            return bad(format!("masses sum to {total}"));
        }
        Ok(Self { n, support })
    }

    /// From masses indexed by the integer whose bit `i` is string position `i`.
    /// Masses at or below `floor` are dropped and the rest renormalized.
    pub fn from_dense(n: usize, masses: &[f64], floor: f64) -> Result<Self, ExpansionError> {
        let kept: Vec<(usize, f64)> = masses
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, m)| m > floor)
            .collect();
        let total: f64 = kept.iter().map(|(_, m)| m).sum();
        if (total - 1.0).abs() > DIST_TOL {
            return Err(ExpansionError::InvalidDistribution(format!(
                "masses sum to {total}"
            )));
        }
        let support = kept
            .into_iter()
            .map(|(i, m)| (BitVector::from_u64(n, i as u64), m / total))
            .collect();
        Self::new(n, support)
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn support(&self) -> &[(BitVector, f64)] {
        &self.support
    }

    #[must_use]
    pub fn mass_where(&self, mut pred: impl FnMut(&BitVector) -> bool) -> f64 {
        self.support
            .iter()
            .filter(|(x, _)| pred(x))
            .map(|(_, m)| m)
            .sum()
    }

    /// Marginal on positions `keep`, in that order.
    pub fn marginal(&self, keep: &[usize]) -> Result<Self, ExpansionError> {
        if let Some(&q) = keep.iter().find(|&&q| q >= self.n) {
            return Err(ExpansionError::InvalidArgument(format!(
                "position {q} out of range"
            )));
        }
        let mut acc: std::collections::BTreeMap<BitVector, f64> = std::collections::BTreeMap::new();
        for (x, m) in &self.support {
            *acc.entry(x.select(keep)).or_insert(0.0) += m;
        }
        Self::new(keep.len(), acc.into_iter().collect())
    }

    /// Total variation distance `½ Σ |p - q|`.
    #[must_use]
    pub fn total_variation(&self, other: &Self) -> f64 {
        let mut all: std::collections::BTreeMap<&BitVector, (f64, f64)> =
            std::collections::BTreeMap::new();
        for (x, m) in &self.support {
            all.entry(x).or_default().0 = *m;
        }
        for (x, m) in &other.support {
            all.entry(x).or_default().1 = *m;
        }
        0.5 * all.values().map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    /// Lines `bitstring mass`.
    pub fn parse(text: &str) -> Result<Self, ExpansionError> {
        let mut support = Vec::new();
        let mut n = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(bits), Some(mass), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(ExpansionError::Parse(format!(
                    "line {}: expected `bits mass`",
                    i + 1
                )));
            };
            let x = BitVector::parse01(bits).map_err(|e| ExpansionError::Parse(e.to_string()))?;
            let m: f64 = mass
                .parse()
                .map_err(|_| ExpansionError::Parse(format!("line {}: bad mass {mass:?}", i + 1)))?;
            n.get_or_insert(x.len());
            support.push((x, m));
        }
        Self::new(n.unwrap_or(0), support)
    }

    #[must_use]
    pub fn to_text(&self) -> String {
        self.support
            .iter()
            .map(|(x, m)| format!("{x} {m:e}\n"))
            .collect()
    }

    /// Masses indexed by integer, for `n <= MAX_SIM_QUBITS`.
    fn dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; 1 << self.n];
        for (x, m) in &self.support {
            out[x.to_u64() as usize] = *m;
        }
        out
    }
}

/// A subset of `F_2^n` with decidable membership and distances.
#[derive(Clone, Debug, PartialEq)]
pub enum PointSet {
    Explicit(Vec<BitVector>),
    Ball { center: BitVector, radius: usize },
}

fn radius_of(ell: f64, n: usize) -> usize {
    if ell <= 0.0 {
        0
    } else {
        (ell.floor() as usize).min(n)
    }
}

fn ball_volume(n: usize, r: usize) -> u128 {
    let mut c: u128 = 1;
    let mut total: u128 = 1;
    for i in 1..=r.min(n) {
        c = c * (n + 1 - i) as u128 / i as u128;
        total += c;
    }
    total
}

impl PointSet {
    fn contains(&self, x: &BitVector, explicit: &HashSet<BitVector>) -> bool {
        match self {
            Self::Explicit(_) => explicit.contains(x),
            Self::Ball { center, radius } => x.distance(center) <= *radius,
        }
    }

    /// Whether `x` lies in `∂_r`.
    fn on_boundary(&self, x: &BitVector, r: usize, explicit: &HashSet<BitVector>) -> bool {
        let n = x.len();
        if r == 0 {
            return false;
        }
        match self {
            Self::Explicit(pts) => {
                if explicit.contains(x) {
                    let inside = pts.iter().filter(|y| y.distance(x) <= r).count() as u128;
                    inside < ball_volume(n, r)
                } else {
                    pts.iter().any(|y| y.distance(x) <= r)
                }
            }
            Self::Ball { center, radius } => {
                let d = x.distance(center);
                if d <= *radius {
                    *radius < n && d + r > *radius
                } else {
                    d <= radius + r
                }
            }
        }
    }
}

/// `p(S)` and `p(∂_ℓ(S))`.
pub fn set_and_boundary_mass(
    p: &Distribution,
    s: &PointSet,
    ell: f64,
) -> Result<(f64, f64), ExpansionError> {
    let explicit: HashSet<BitVector> = match s {
        PointSet::Explicit(pts) => {
            if let Some(x) = pts.iter().find(|x| x.len() != p.n()) {
                return Err(ExpansionError::InvalidArgument(format!(
                    "set point of length {} for n = {}",
                    x.len(),
                    p.n()
                )));
            }
            pts.iter().cloned().collect()
        }
        PointSet::Ball { center, .. } => {
            if center.len() != p.n() {
                return Err(ExpansionError::InvalidArgument("ball center length".into()));
            }
            HashSet::new()
        }
    };
    let r = radius_of(ell, p.n());
    let mut mass = 0.0;
    let mut boundary = 0.0;
    for (x, m) in p.support() {
        if s.contains(x, &explicit) {
            mass += m;
        }
        if s.on_boundary(x, r, &explicit) {
            boundary += m;
        }
    }
    Ok((mass, boundary))
}

pub fn boundary_mass(p: &Distribution, s: &PointSet, ell: f64) -> Result<f64, ExpansionError> {
    set_and_boundary_mass(p, s, ell).map(|(_, b)| b)
}

/// Least `p(∂_ℓ(S)) / p(S)` over the candidates with `0 < p(S) <= 1/2`, and its index.
pub fn expansion_upper(
    p: &Distribution,
    candidates: &[PointSet],
    ell: f64,
) -> Result<(f64, usize), ExpansionError> {
    let mut best: Option<(f64, usize)> = None;
    for (i, s) in candidates.iter().enumerate() {
        let (mass, boundary) = set_and_boundary_mass(p, s, ell)?;
        if mass > 0.0 && mass <= 0.5 {
            let ratio = boundary / mass;
            if best.is_none_or(|(b, _)| ratio < b) {
                best = Some((ratio, i));
            }
        }
    }
    best.ok_or(ExpansionError::NoValidCandidate)
}

/// Exact `h_ℓ(p)` over all `2^(2^n)` subsets, with a minimizing set as a bitmask over
/// string indices. Requires `n <= MAX_EXACT_N`.
pub fn exact_expansion(p: &Distribution, ell: f64) -> Result<(f64, u16), ExpansionError> {
    let n = p.n();
    if n > MAX_EXACT_N {
        return Err(ExpansionError::InvalidArgument(format!(
            "exact expansion needs n <= {MAX_EXACT_N}"
        )));
    }
    let r = radius_of(ell, n);
    let pts = 1usize << n;
    let mass = p.dense();
    let near: Vec<u32> = (0..pts)
        .map(|x| {
            (0..pts)
                .filter(|&y| ((x ^ y) as u32).count_ones() as usize <= r)
                .fold(0u32, |acc, y| acc | (1 << y))
        })
        .collect();
    let full: u32 = if pts == 32 {
        u32::MAX
    } else {
        (1u32 << pts) - 1
    };
    let mut best: Option<(f64, u16)> = None;
    for s in 1..full {
        let ps: f64 = (0..pts).filter(|&x| s >> x & 1 == 1).map(|x| mass[x]).sum();
        if !(ps > 0.0 && ps <= 0.5) {
            continue;
        }
        let comp = full & !s;
        let boundary: f64 = (0..pts)
            .filter(|&x| {
                let other = if s >> x & 1 == 1 { comp } else { s };
                near[x] & other != 0
            })
            .map(|x| mass[x])
            .sum();
        let ratio = boundary / ps;
        if best.is_none_or(|(b, _)| ratio < b) {
            best = Some((ratio, s as u16));
        }
    }
    best.ok_or(ExpansionError::NoValidCandidate)
}

/// Distance from every point of `F_2^n` to the nearest member of `set`
/// (`u8::MAX` when `set` is empty).
#[must_use]
pub fn hypercube_distances(n: usize, set: &[bool]) -> Vec<u8> {
    let mut dist = vec![u8::MAX; 1 << n];
    let mut queue = VecDeque::new();
    for (x, &inside) in set.iter().enumerate() {
        if inside {
            dist[x] = 0;
            queue.push_back(x);
        }
    }
    while let Some(x) = queue.pop_front() {
        let d = dist[x] + 1;
        for i in 0..n {
            let y = x ^ (1 << i);
            if dist[y] == u8::MAX {
                dist[y] = d;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Radius and bound of the vertex-expansion theorem for blow-up `b` on `n` outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexBound {
    pub gamma: f64,
    /// `¼ B (Bn)^{1/2-γ}`.
    pub ell: f64,
    /// `(1/8)(nB)^{-2γ}`.
    pub lower_bound: f64,
    /// Chebyshev degree `⌈½ (Bn)^{1/2-γ}⌉`.
    pub degree: usize,
    /// Locality `B · degree` of the degree-`degree` polynomial in the conjugated projector.
    pub proof_ell: f64,
}

pub fn theorem_vertex_bound(n: usize, b: usize, gamma: f64) -> Result<VertexBound, ExpansionError> {
    if !(0.0..=0.5).contains(&gamma) {
        return Err(ExpansionError::InvalidGamma(gamma));
    }
    let nb = (n * b) as f64;
    let bf = b as f64;
    let root = nb.powf(0.5 - gamma);
    let degree = ((0.5 * root).ceil() as usize).max(1);
    Ok(VertexBound {
        gamma,
        ell: 0.25 * bf * root,
        lower_bound: 0.125 * nb.powf(-2.0 * gamma),
        degree,
        proof_ell: bf * degree as f64,
    })
}

fn check_mu(mu: f64) -> Result<(), ExpansionError> {
    if mu > 0.0 && mu <= 0.5 {
        Ok(())
    } else {
        Err(ExpansionError::InvalidMu(mu))
    }
}

/// `4 √n B^{1.5} / μ`: no circuit of blow-up `B` has two sets of mass `>= μ` farther apart.
pub fn partition_distance_bound(mu: f64, b: f64, n: usize) -> Result<f64, ExpansionError> {
    check_mu(mu)?;
    Ok(4.0 * (n as f64).sqrt() * b.powf(1.5) / mu)
}

/// `(2/3) log₂(μ D / (4 √n))`: a `(μ, D)`-partitioned distribution needs more depth than this.
pub fn depth_lower_bound(mu: f64, d: f64, n: usize) -> Result<f64, ExpansionError> {
    check_mu(mu)?;
    if !(d >= 0.0 && d <= n as f64) {
        return Err(ExpansionError::InvalidArgument(format!(
            "distance {d} outside [0, {n}]"
        )));
    }
    Ok(2.0 / 3.0 * (mu * d / (4.0 * (n as f64).sqrt())).log2())
}

/// Depth bound from the expansion theorem at exponent `γ`: `log₂ B*` for the least real
/// `B* >= 1` with `D <= 2ℓ(B)(1 + 8(1-2μ)(nB)^{2γ}/μ)`, `ℓ(B) = ¼B(Bn)^{1/2-γ}`.
/// Zero when `B = 1` already allows distance `D`.
pub fn depth_lower_bound_gamma(
    mu: f64,
    d: f64,
    n: usize,
    gamma: f64,
) -> Result<f64, ExpansionError> {
    check_mu(mu)?;
    if !(0.0..=0.5).contains(&gamma) {
        return Err(ExpansionError::InvalidGamma(gamma));
    }
    let nf = n as f64;
    let reach = |b: f64| {
        let ell = 0.25 * b * (b * nf).powf(0.5 - gamma);
        2.0 * ell * (1.0 + 8.0 * (1.0 - 2.0 * mu) * (nf * b).powf(2.0 * gamma) / mu)
    };
    if reach(1.0) >= d {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while reach(hi.exp2()) < d {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if reach(mid.exp2()) < d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// `T_m(x)` by the three-term recurrence.
#[must_use]
pub fn chebyshev(m: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if m == 0 {
        return a;
    }
    for _ in 1..m {
        (a, b) = (b, 2.0 * x * b - a);
    }
    b
}

/// `ln T_m(y)` for `y >= 1`, from `T_m(y) = cosh(m acosh y)`.
fn ln_chebyshev(m: usize, y: f64) -> f64 {
    let t = m as f64 * y.acosh();
    t + (-2.0 * t).exp().ln_1p() - std::f64::consts::LN_2
}

/// `C_m(x) = 1 - T_m(f(x))/T_m(f(0))`, `f(x) = (1 + 1/L - 2x)/(1 - 1/L)`.
#[must_use]
pub fn cm(m: usize, l_size: usize, x: f64) -> f64 {
    let inv = 1.0 / l_size as f64;
    let f = |x: f64| (1.0 + inv - 2.0 * x) / (1.0 - inv);
    let (y, y0) = (f(x), f(0.0));
    let ratio = if y == y0 {
        1.0
    } else if y > 1.0 {
        (ln_chebyshev(m, y) - ln_chebyshev(m, y0)).exp()
    } else {
        chebyshev(m, y) * (-ln_chebyshev(m, y0)).exp()
    };
    1.0 - ratio
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevProfile {
    pub m: usize,
    pub l_size: usize,
    pub samples: usize,
    pub at_zero: f64,
    pub min_all: f64,
    pub max_all: f64,
    /// Least sampled value on `[1/L, 1]`, including `x = 1/L` itself.
    pub min_gap_region: f64,
    pub at_inv_l: f64,
    /// `¼ (nB)^{-2γ}`.
    pub gap_target: f64,
}

impl ChebyshevProfile {
    #[must_use]
    pub fn zero_fixed(&self) -> bool {
        self.at_zero == 0.0
    }

    #[must_use]
    pub fn in_range(&self, tol: f64) -> bool {
        self.min_all >= -tol && self.max_all <= 2.0 + tol
    }

    #[must_use]
    pub fn gap_holds(&self) -> bool {
        self.min_gap_region >= self.gap_target
    }
}

/// Samples `C_m` at `CHEB_SAMPLES` evenly spaced points of `[0, 1]` plus `1/L`.
pub fn cheb_operatorless_profile(
    m: usize,
    l_size: usize,
    n: usize,
    b: usize,
    gamma: f64,
) -> Result<ChebyshevProfile, ExpansionError> {
    if m == 0 || l_size < 2 {
        return Err(ExpansionError::InvalidArgument(
            "need m >= 1 and |L| >= 2".into(),
        ));
    }
    let inv = 1.0 / l_size as f64;
    let at_inv_l = cm(m, l_size, inv);
    let mut p = ChebyshevProfile {
        m,
        l_size,
        samples: CHEB_SAMPLES,
        at_zero: cm(m, l_size, 0.0),
        min_all: f64::INFINITY,
        max_all: f64::NEG_INFINITY,
        min_gap_region: at_inv_l,
        at_inv_l,
        gap_target: 0.25 * ((n * b) as f64).powf(-2.0 * gamma),
    };
    for i in 0..CHEB_SAMPLES {
        let x = i as f64 / (CHEB_SAMPLES - 1) as f64;
        let c = cm(m, l_size, x);
        p.min_all = p.min_all.min(c);
        p.max_all = p.max_all.max(c);
        if x >= inv {
            p.min_gap_region = p.min_gap_region.min(c);
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        BitVector::parse01(s).unwrap()
    }

    fn uniform(n: usize) -> Distribution {
        let w = 1.0 / (1u64 << n) as f64;
        Distribution::new(
            n,
            (0..1u64 << n)
                .map(|i| (BitVector::from_u64(n, i), w))
                .collect(),
        )
        .unwrap()
    }

    fn cat(n: usize) -> Distribution {
        Distribution::new(
            n,
            vec![(BitVector::zeros(n), 0.5), (BitVector::ones(n), 0.5)],
        )
        .unwrap()
    }

    #[test]
    fn boundary_examples() {
        let s = PointSet::Explicit(vec![bv("00")]);
        assert!((boundary_mass(&uniform(2), &s, 1.0).unwrap() - 0.75).abs() < 1e-15);
        let s = PointSet::Explicit(vec![bv("000")]);
        assert!((boundary_mass(&cat(3), &s, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((boundary_mass(&cat(3), &s, 3.0).unwrap() - 1.0).abs() < 1e-15);
        // Real radii act through their floor.
        assert_eq!(boundary_mass(&cat(3), &s, 0.9).unwrap(), 0.0);
        let ball = PointSet::Ball {
            center: bv("000"),
            radius: 0,
        };
        assert_eq!(boundary_mass(&cat(3), &ball, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn cat_ratios() {
        let s = [PointSet::Explicit(vec![bv("000")])];
        assert_eq!(expansion_upper(&cat(3), &s, 1.0).unwrap().0, 1.0);
        assert_eq!(expansion_upper(&cat(3), &s, 3.0).unwrap().0, 2.0);
        let heavy = [PointSet::Explicit(vec![bv("000"), bv("111")])];
        assert_eq!(
            expansion_upper(&cat(3), &heavy, 1.0),
            Err(ExpansionError::NoValidCandidate)
        );
    }

    #[test]
    fn ball_and_explicit_agree() {
        let p = uniform(4);
        for r in 0..=4 {
            let c = bv("0110");
            let pts: Vec<BitVector> = (0..16)
                .map(|i| BitVector::from_u64(4, i))
                .filter(|x| x.distance(&c) <= r)
                .collect();
            for ell in 0..=4 {
                let a = boundary_mass(
                    &p,
                    &PointSet::Ball {
                        center: c.clone(),
                        radius: r,
                    },
                    ell as f64,
                )
                .unwrap();
                let b = boundary_mass(&p, &PointSet::Explicit(pts.clone()), ell as f64).unwrap();
                assert!((a - b).abs() < 1e-15, "r={r} ell={ell}");
            }
        }
    }

    #[test]
    fn exact_uniform_cube() {
        let p = uniform(4);
        let (h, s) = exact_expansion(&p, 1.0).unwrap();
        // Radius-1 balls and half cubes both have ratio 2; the optimum is no worse.
        let ball = PointSet::Ball {
            center: bv("0000"),
            radius: 1,
        };
        let half = PointSet::Explicit((0..8).map(|i| BitVector::from_u64(4, i)).collect());
        let (upper, _) = expansion_upper(&p, &[ball, half], 1.0).unwrap();
        assert_eq!(upper, 2.0);
        assert!(h <= upper);
        let pts: Vec<BitVector> = (0..16)
            .filter(|i| s >> i & 1 == 1)
            .map(|i| BitVector::from_u64(4, i))
            .collect();
        let (mass, boundary) = set_and_boundary_mass(&p, &PointSet::Explicit(pts), 1.0).unwrap();
        assert!((boundary / mass - h).abs() < 1e-12);
    }

    #[test]
    fn closed_forms() {
        let b = theorem_vertex_bound(16, 2, 0.25).unwrap();
        assert!((b.ell - 0.5 * 32f64.powf(0.25)).abs() < 1e-12);
        assert!((b.lower_bound - 0.125 / 32f64.sqrt()).abs() < 1e-12);
        let b0 = theorem_vertex_bound(9, 4, 0.0).unwrap();
        assert_eq!((b0.ell, b0.lower_bound), (6.0, 0.125));
        let b1 = theorem_vertex_bound(9, 4, 0.5).unwrap();
        assert_eq!(
            (b1.ell, b1.lower_bound, b1.degree, b1.proof_ell),
            (1.0, 0.125 / 36.0, 1, 4.0)
        );
        assert_eq!(partition_distance_bound(0.5, 1.0, 64).unwrap(), 64.0);
        assert_eq!(depth_lower_bound(0.5, 1024.0, 1024).unwrap(), 4.0 / 3.0);
        assert!(depth_lower_bound(0.0, 1.0, 4).is_err());
        assert!(theorem_vertex_bound(4, 1, 0.6).is_err());
    }

    #[test]
    fn gamma_depth_bound_inverts_reach() {
        let mu = 0.25;
        let (d, n) = (900.0, 1000);
        for gamma in DEFAULT_GAMMAS {
            let depth = depth_lower_bound_gamma(mu, d, n, gamma).unwrap();
            let b = depth.exp2();
            let ell = 0.25 * b * (b * n as f64).powf(0.5 - gamma);
            let reach =
                2.0 * ell * (1.0 + 8.0 * (1.0 - 2.0 * mu) * (n as f64 * b).powf(2.0 * gamma) / mu);
            assert!(
                depth == 0.0 || (reach - d).abs() < 1e-6 * d,
                "gamma {gamma}"
            );
        }
    }

    #[test]
    fn chebyshev_values() {
        assert_eq!(chebyshev(2, 3.0), 17.0);
        assert_eq!(chebyshev(0, 0.3), 1.0);
        for m in 1..8 {
            let x: f64 = 0.37;
            assert!((chebyshev(m, x) - (m as f64 * x.acos()).cos()).abs() < 1e-12);
            assert_eq!(cm(m, 10, 0.0), 0.0);
        }
        assert!((ln_chebyshev(3, 2.0) - chebyshev(3, 2.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn profile_meets_gap() {
        let (n, b, gamma) = (16, 2, 0.25);
        let m = theorem_vertex_bound(n, b, gamma).unwrap().degree;
        let p = cheb_operatorless_profile(m, n * b, n, b, gamma).unwrap();
        assert!(p.zero_fixed() && p.in_range(0.0) && p.gap_holds());
    }

    #[test]
    fn distribution_text_round_trip() {
        let p = cat(3);
        let q = Distribution::parse(&p.to_text()).unwrap();
        assert_eq!(p, q);
        assert!(Distribution::parse("01 0.5\n01 0.5\n").is_err());
        assert!(Distribution::parse("01 0.4\n").is_err());
    }
}
