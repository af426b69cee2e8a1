//! Classical codes given by a parity-check matrix, with the repetition code of a
//! graph as the main instance: distance, local-testability soundness and the
//! robustness of that soundness under deletions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{for_each_in_coset, BitMatrix, BitVector, Gf2Error};
use crate::graphs::{
    cheeger_exhaustive, spectral_report, Graph, GraphError, ResidualBounds, ResidualGraph,
};

pub const MAX_DISTANCE_DIM: usize = 26;
pub const MAX_SOUNDNESS_N: usize = 22;
pub const MAX_ROBUST_N: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodeError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("{what} is {value}, limit is {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("soundness must be positive")]
    ZeroSoundness,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// `ker(H)` for a parity-check matrix `H`; rows are checks, columns are bits.
#[derive(Clone, Debug)]
pub struct TannerCode {
    check: BitMatrix,
    rank: usize,
}

impl TannerCode {
    #[must_use]
    pub fn new(check: BitMatrix) -> Self {
        let rank = check.rank();
        Self { check, rank }
    }

    /// Bits on vertices, one check per edge.
    pub fn repetition_from_graph(g: &Graph) -> Result<Self, CodeError> {
        if !g.is_connected() {
            return Err(CodeError::Disconnected);
        }
        Ok(Self::new(g.incidence()))
    }

    /// The code with the transposed check matrix.
    #[must_use]
    pub fn transpose(&self) -> Self {
        Self {
            check: self.check.transpose(),
            rank: self.rank,
        }
    }

    #[must_use]
    pub fn check(&self) -> &BitMatrix {
        &self.check
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.check.ncols()
    }

    #[must_use]
    pub fn m(&self) -> usize {
        self.check.nrows()
    }

    #[must_use]
    pub fn dim(&self) -> usize {
        self.n() - self.rank
    }

    #[must_use]
    pub fn kernel_basis(&self) -> BitMatrix {
        self.check.nullspace_basis()
    }

    #[must_use]
    pub fn syndrome(&self, w: &BitVector) -> BitVector {
        self.check.mul_vec(w)
    }

    #[must_use]
    pub fn contains(&self, w: &BitVector) -> bool {
        self.syndrome(w).is_zero()
    }

    #[must_use]
    pub fn violated(&self, w: &BitVector) -> usize {
        self.syndrome(w).weight()
    }

    /// Fraction of checks `w` fails; zero when there are no checks.
    #[must_use]
    pub fn violated_fraction(&self, w: &BitVector) -> f64 {
        if self.m() == 0 {
            0.0
        } else {
            self.violated(w) as f64 / self.m() as f64
        }
    }
}

/// Minimum nonzero codeword weight, or `None` for the zero code.
pub fn distance_exhaustive(code: &TannerCode) -> Result<Option<usize>, CodeError> {
    let basis = code.kernel_basis();
    if basis.nrows() > MAX_DISTANCE_DIM {
        return Err(CodeError::TooLarge {
            what: "code dimension",
            value: basis.nrows(),
            limit: MAX_DISTANCE_DIM,
        });
    }
    let mut best: Option<usize> = None;
    for_each_in_coset(basis.rows(), &BitVector::zeros(code.n()), u64::MAX, |w| {
        let wt = w.weight();
        if wt > 0 && best.is_none_or(|b| wt < b) {
            best = Some(wt);
        }
    })?;
    Ok(best)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SoundnessReport {
    pub n: usize,
    pub m: usize,
    /// `min over w outside the code of viol(w) / (dist(w, C) / n)`; `+inf` if no such `w`.
    pub rho_exhaustive: f64,
    /// `2h/d` for a repetition code of a regular graph.
    pub rho_bound: Option<f64>,
    pub argmin_word: Option<String>,
}

/// Soundness by exhaustion: distances to the code come from a breadth-first search
/// seeded with every codeword, and syndromes are updated along a Gray code.
pub fn ltc_soundness_exhaustive(code: &TannerCode) -> Result<SoundnessReport, CodeError> {
    let n = code.n();
    if n > MAX_SOUNDNESS_N {
        return Err(CodeError::TooLarge {
            what: "block length",
            value: n,
            limit: MAX_SOUNDNESS_N,
        });
    }
    let size = 1usize << n;
    let mut dist = vec![u8::MAX; size];
    let mut queue: Vec<u32> = Vec::new();
    for_each_in_coset(
        code.kernel_basis().rows(),
        &BitVector::zeros(n),
        u64::MAX,
        |c| {
            let x = c.to_u64() as u32;
            dist[x as usize] = 0;
            queue.push(x);
        },
    )?;
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        let dx = dist[x as usize];
        for b in 0..n {
            let y = (x ^ (1 << b)) as usize;
            if dist[y] == u8::MAX {
                dist[y] = dx + 1;
                queue.push(y as u32);
            }
        }
    }

    let m = code.m();
    let columns: Vec<BitVector> = code.check.transpose().into_rows();
    let mut syn = BitVector::zeros(m);
    let mut x = 0u32;
    let mut best: Option<(usize, usize, u32)> = None;
    for i in 1..size {
        let b = i.trailing_zeros() as usize;
        x ^= 1 << b;
        syn.xor_assign(&columns[b]);
        let d = dist[x as usize] as usize;
        if d == 0 {
            continue;
        }
        let v = syn.weight();
        // Compare v/d against the incumbent without rounding.
        if best.is_none_or(|(bv, bd, _)| v * bd < bv * d) {
            best = Some((v, d, x));
        }
    }
    let (rho, argmin) = match best {
        None => (f64::INFINITY, None),
        Some((v, d, w)) => (
            (v as f64 / m as f64) * n as f64 / d as f64,
            Some(BitVector::from_u64(n, u64::from(w)).to_string()),
        ),
    };
    Ok(SoundnessReport {
        n,
        m,
        rho_exhaustive: rho,
        rho_bound: None,
        argmin_word: argmin,
    })
}

/// Soundness of a graph's repetition code, with `2h/d` attached.
pub fn graph_soundness(g: &Graph) -> Result<SoundnessReport, CodeError> {
    let code = TannerCode::repetition_from_graph(g)?;
    let mut report = ltc_soundness_exhaustive(&code)?;
    let d = g.regular_degree().ok_or(GraphError::NotRegular)?;
    report.rho_bound = Some(2.0 * cheeger_exhaustive(g)? / d as f64);
    Ok(report)
}

/// Radius `eps / rho` of the cluster around the code holding all words that fail at
/// most an `eps` fraction of the checks.
pub fn cluster_radius(eps: f64, rho: f64) -> Result<f64, CodeError> {
    if rho <= 0.0 {
        return Err(CodeError::ZeroSoundness);
    }
    Ok(eps / rho)
}

/// Test of the repetition code of a residual subgraph as a local tester.
///
/// Every word `w` on the residual vertices is checked against two bounds on its
/// fractional distance to `{0, 1}`:
/// the measured form `(δ + η_E) / (ρ (1 - η_V))`, where `η_V, η_E` are the deleted
/// vertex and edge fractions and `ρ` the parent's soundness, which always holds; and
/// the stated form `(δ + 2ε') / (g (1 - ε'))` at a spectral gap `g`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RobustLtcReport {
    pub parent_n: usize,
    pub residual_n: usize,
    pub eta_vertices: f64,
    pub eta_edges: f64,
    pub rho_parent: f64,
    pub eps: f64,
    pub gap: f64,
    pub eps_prime: f64,
    /// Largest `dist - bound` over all words, measured form.
    pub worst_excess_measured: f64,
    pub holds_measured: bool,
    /// `None` when `ε' >= 1` makes the stated bound vacuous.
    pub worst_excess_stated: Option<f64>,
    pub holds_stated: bool,
}

pub fn robust_ltc_check(
    parent: &Graph,
    residual: &ResidualGraph,
    eps: f64,
) -> Result<RobustLtcReport, CodeError> {
    let child = &residual.graph;
    let np = child.n();
    if np > MAX_ROBUST_N {
        return Err(CodeError::TooLarge {
            what: "residual size",
            value: np,
            limit: MAX_ROBUST_N,
        });
    }
    let d = parent.regular_degree().ok_or(GraphError::NotRegular)?;
    let spec = spectral_report(parent)?;
    let gap = (d as f64 - spec.lambda2) / d as f64;
    let rho_parent = if parent.n() <= MAX_SOUNDNESS_N {
        ltc_soundness_exhaustive(&TannerCode::repetition_from_graph(parent)?)?.rho_exhaustive
    } else {
        gap
    };
    let eta_v = 1.0 - residual.vertex_fraction;
    let eta_e = 1.0 - residual.edge_fraction;
    let eps_prime = ResidualBounds::with_gap(eps, d, gap).eps_prime;
    let stated_ok = eps_prime < 1.0;

    let mut worst_m = f64::NEG_INFINITY;
    let mut worst_s = f64::NEG_INFINITY;
    let mut in_set = vec![false; np];
    for mask in 0u32..(1u32 << np) {
        for (v, slot) in in_set.iter_mut().enumerate() {
            *slot = mask & (1 << v) != 0;
        }
        let wt = mask.count_ones() as usize;
        let dist = wt.min(np - wt) as f64 / np as f64;
        let delta = if child.m() == 0 {
            0.0
        } else {
            child.edge_boundary(&in_set) as f64 / child.m() as f64
        };
        let bound_m = (delta + eta_e) / (rho_parent * (1.0 - eta_v));
        worst_m = worst_m.max(dist - bound_m);
        if stated_ok {
            let bound_s = (delta + 2.0 * eps_prime) / (gap * (1.0 - eps_prime));
            worst_s = worst_s.max(dist - bound_s);
        }
    }
    const SLACK: f64 = 1e-12;
    Ok(RobustLtcReport {
        parent_n: parent.n(),
        residual_n: np,
        eta_vertices: eta_v,
        eta_edges: eta_e,
        rho_parent,
        eps,
        gap,
        eps_prime,
        worst_excess_measured: worst_m,
        holds_measured: worst_m <= SLACK,
        worst_excess_stated: stated_ok.then_some(worst_s),
        holds_stated: stated_ok && worst_s <= SLACK,
    })
}

/// Edge expansion of the residual graph restricted to sets whose relative size lies in
/// `[100 ε', 1/2]`, compared with the constant 3 claimed for degree 14.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BandExpansionReport {
    pub band_lo: f64,
    pub band_hi: f64,
    pub sets_in_band: u64,
    /// `min |∂w| / |w|` over the band, `None` if the band is empty.
    pub min_ratio: Option<f64>,
    pub required: f64,
    pub holds: bool,
}

pub fn band_expansion(
    residual: &ResidualGraph,
    eps_prime: f64,
) -> Result<BandExpansionReport, CodeError> {
    const REQUIRED: f64 = 3.0;
    let g = &residual.graph;
    let n = g.n();
    if n > MAX_ROBUST_N {
        return Err(CodeError::TooLarge {
            what: "residual size",
            value: n,
            limit: MAX_ROBUST_N,
        });
    }
    let lo = 100.0 * eps_prime;
    let mut count = 0u64;
    let mut min_ratio: Option<f64> = None;
    let mut in_set = vec![false; n];
    for mask in 1u32..(1u32 << n) {
        let wt = mask.count_ones() as usize;
        let frac = wt as f64 / n as f64;
        if frac < lo || 2 * wt > n {
            continue;
        }
        for (v, slot) in in_set.iter_mut().enumerate() {
            *slot = mask & (1 << v) != 0;
        }
        let r = g.edge_boundary(&in_set) as f64 / wt as f64;
        count += 1;
        min_ratio = Some(min_ratio.map_or(r, |m: f64| m.min(r)));
    }
    Ok(BandExpansionReport {
        band_lo: lo,
        band_hi: 0.5,
        sets_in_band: count,
        min_ratio,
        required: REQUIRED,
        holds: min_ratio.is_none_or(|r| r >= REQUIRED),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{complete_graph, cycle_graph, disjoint_union, path_graph};

    #[test]
    fn repetition_code_basics() {
        let code = TannerCode::repetition_from_graph(&cycle_graph(4)).unwrap();
        assert_eq!(code.dim(), 1);
        let w = BitVector::parse01("1010").unwrap();
        assert_eq!(code.violated(&w), 4);
        let w = BitVector::parse01("1100").unwrap();
        assert_eq!(code.violated_fraction(&w), 0.5);
        let two = disjoint_union(&cycle_graph(3), &cycle_graph(3));
        assert!(matches!(
            TannerCode::repetition_from_graph(&two),
            Err(CodeError::Disconnected)
        ));
    }

    #[test]
    fn distances() {
        let code = TannerCode::repetition_from_graph(&cycle_graph(5)).unwrap();
        assert_eq!(distance_exhaustive(&code).unwrap(), Some(5));
        // Cycle space of a tree is trivial.
        let t = TannerCode::repetition_from_graph(&path_graph(4))
            .unwrap()
            .transpose();
        assert_eq!(distance_exhaustive(&t).unwrap(), None);
        // Triangles are the shortest cycles of K4.
        let k = TannerCode::repetition_from_graph(&complete_graph(4))
            .unwrap()
            .transpose();
        assert_eq!(distance_exhaustive(&k).unwrap(), Some(3));
    }

    #[test]
    fn soundness_examples() {
        let r = graph_soundness(&cycle_graph(4)).unwrap();
        assert!((r.rho_exhaustive - 1.0).abs() < 1e-12);
        assert_eq!(r.rho_bound, Some(1.0));
        // A single vertex gives (3/6)·4/1 = 2, but an edge's endpoints give (4/6)·4/2 = 4/3.
        let r = graph_soundness(&complete_graph(4)).unwrap();
        assert!((r.rho_exhaustive - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.argmin_word.as_deref(), Some("1100"));
    }

    #[test]
    fn cluster_radius_rejects_zero() {
        assert_eq!(cluster_radius(0.1, 0.5).unwrap(), 0.2);
        assert_eq!(cluster_radius(0.1, 0.0), Err(CodeError::ZeroSoundness));
    }
}
