use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::StatesError;
use crate::css::{Basis, PartitionSets};
use crate::gf2::{for_each_in_coset, BitVector};
use crate::hgp::{HgpIndex, LineOrientation};

/// Largest family the unplanted decoder searches exhaustively.
pub const DEFAULT_DECODER_BUDGET: u64 = 1 << 22;

/// Error family `U` defining the cells `S_a = C_a + U`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorFamily {
    /// Every word of weight at most `radius`.
    Ball { radius: usize },
    /// Words of an HGP layout with at most `vertex_cap` ones on every vertex row and
    /// column, at most `edge_cap` on every edge row and column, and at most
    /// `weight_cap` in total.
    Lines {
        index: HgpIndex,
        vertex_cap: usize,
        edge_cap: usize,
        weight_cap: usize,
    },
}

fn line_maxima(index: &HgpIndex, t: &BitVector) -> (usize, usize) {
    let mut v = 0;
    let mut e = 0;
    for o in [LineOrientation::Columns, LineOrientation::Rows] {
        for i in 0..index.n {
            v = v.max(
                index
                    .vertex_line(o, i)
                    .iter()
                    .filter(|&&q| t.get(q))
                    .count(),
            );
        }
        for i in 0..index.m {
            e = e.max(index.edge_line(o, i).iter().filter(|&&q| t.get(q)).count());
        }
    }
    (v, e)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    r
}

impl ErrorFamily {
    /// Caps `⌊ν n⌋` and `⌊ν m⌋` from a line-fraction parameter, no weight cap.
    #[must_use]
    pub fn lines_from_nu(index: HgpIndex, nu: f64) -> Self {
        let vertex_cap = (nu * index.n as f64).floor() as usize;
        let edge_cap = (nu * index.m as f64).floor() as usize;
        Self::Lines {
            index,
            vertex_cap,
            edge_cap,
            weight_cap: index.n * vertex_cap + index.m * edge_cap,
        }
    }

    /// Smallest line family containing `t`: caps and total weight measured on `t`.
    #[must_use]
    pub fn tight_lines(index: HgpIndex, t: &BitVector) -> Self {
        let (vertex_cap, edge_cap) = line_maxima(&index, t);
        Self::Lines {
            index,
            vertex_cap,
            edge_cap,
            weight_cap: t.weight(),
        }
    }

    /// Measured line fraction `max(vertex_cap / n, edge_cap / m)` of a line family.
    #[must_use]
    pub fn nu(&self) -> Option<f64> {
        match self {
            Self::Ball { .. } => None,
            Self::Lines {
                index,
                vertex_cap,
                edge_cap,
                ..
            } => {
                let v = *vertex_cap as f64 / index.n.max(1) as f64;
                let e = if index.m == 0 {
                    0.0
                } else {
                    *edge_cap as f64 / index.m as f64
                };
                Some(v.max(e))
            }
        }
    }

    #[must_use]
    pub fn contains(&self, t: &BitVector) -> bool {
        match self {
            Self::Ball { radius } => t.weight() <= *radius,
            Self::Lines {
                index,
                vertex_cap,
                edge_cap,
                weight_cap,
            } => {
                if t.len() != index.qubits() || t.weight() > *weight_cap {
                    return false;
                }
                let (v, e) = line_maxima(index, t);
                v <= *vertex_cap && e <= *edge_cap
            }
        }
    }

    /// Largest weight of a member.
    #[must_use]
    pub fn max_weight(&self) -> usize {
        match self {
            Self::Ball { radius } => *radius,
            Self::Lines {
                index,
                vertex_cap,
                edge_cap,
                weight_cap,
            } => (*weight_cap).min(index.n * vertex_cap + index.m * edge_cap),
        }
    }

    /// Number of words the enumerator visits: all words of weight `<= max_weight`.
    #[must_use]
    pub fn size(&self, n: usize) -> u128 {
        (0..=self.max_weight().min(n))
            .map(|w| binomial(n, w))
            .fold(0u128, u128::saturating_add)
    }

    /// Every member on `n` bits, or `None` when the search exceeds `budget`.
    #[must_use]
    pub fn members(&self, n: usize, budget: u64) -> Option<Vec<BitVector>> {
        if self.size(n) > u128::from(budget) {
            return None;
        }
        let mut out = Vec::new();
        for w in 0..=self.max_weight().min(n) {
            let mut idx: Vec<usize> = (0..w).collect();
            loop {
                let t = BitVector::from_support(n, &idx);
                if self.contains(&t) {
                    out.push(t);
                }
                // Next combination in lexicographic order.
                let mut i = w;
                while i > 0 && idx[i - 1] == n - w + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                idx[i - 1] += 1;
                for j in i..w {
                    idx[j] = idx[j - 1] + 1;
                }
            }
        }
        Some(out)
    }
}

/// Cells `S_a = C_a + U` in one basis.
#[derive(Debug)]
pub struct VoronoiSpec<'a> {
    pub sets: PartitionSets<'a>,
    pub basis: Basis,
    pub family: ErrorFamily,
    pub budget: u64,
    members: OnceLock<Option<Vec<BitVector>>>,
}

impl<'a> VoronoiSpec<'a> {
    #[must_use]
    pub fn new(sets: PartitionSets<'a>, basis: Basis, family: ErrorFamily, budget: u64) -> Self {
        Self {
            sets,
            basis,
            family,
            budget,
            members: OnceLock::new(),
        }
    }

    /// Family members, enumerated once.
    #[must_use]
    pub fn members(&self) -> Option<&[BitVector]> {
        self.members
            .get_or_init(|| self.family.members(self.sets.code.n(), self.budget))
            .as_deref()
    }

    /// Bitmask of the cells certifying `x`: bit `a` set when `x + t ∈ C_a` for some member `t`.
    fn cell_mask(&self, x: &BitVector, members: &[BitVector]) -> u8 {
        let mut mask = 0u8;
        let mut y = x.clone();
        for t in members {
            y.xor_assign(t);
            if let Some(a) = self.sets.classify(self.basis, &y) {
                mask |= 1 << a;
                if mask == 3 {
                    break;
                }
            }
            y.xor_assign(t);
        }
        mask
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VoronoiOutcome {
    Cell(u8),
    /// Both cells certify: the cells are not disjoint.
    Ambiguous,
    /// No member of the family (or the planted error) reaches the outcome space.
    Uncertified,
    /// Family larger than the decoder budget.
    Unresolved,
}

/// Cell of `x`, by subtracting `planted` when given and by exhaustive search otherwise.
pub fn voronoi_classify(
    x: &BitVector,
    spec: &VoronoiSpec<'_>,
    planted: Option<&BitVector>,
) -> Result<VoronoiOutcome, StatesError> {
    if let Some(t) = planted {
        if !spec.family.contains(t) {
            return Err(StatesError::NotInFamily);
        }
        return Ok(match spec.sets.classify(spec.basis, &(x ^ t)) {
            Some(a) => VoronoiOutcome::Cell(a),
            None => VoronoiOutcome::Uncertified,
        });
    }
    let Some(members) = spec.members() else {
        return Ok(VoronoiOutcome::Unresolved);
    };
    Ok(match spec.cell_mask(x, members) {
        0 => VoronoiOutcome::Uncertified,
        1 => VoronoiOutcome::Cell(0),
        2 => VoronoiOutcome::Cell(1),
        _ => VoronoiOutcome::Ambiguous,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub basis: Basis,
    pub outcome_space: u64,
    pub family: usize,
    /// Distinct strings in `outcome space + U`.
    pub points: usize,
    pub doubly_certified: usize,
}

/// Marks every `c + t` with `c` in the outcome space and `t` in the family by the class
/// of `c`, and counts strings marked by both classes.
pub fn double_certification_sweep(
    spec: &VoronoiSpec<'_>,
    cap: u64,
) -> Result<SweepReport, StatesError> {
    let code = spec.sets.code;
    let members = spec.members().ok_or(StatesError::BudgetExceeded {
        size: spec.family.size(code.n()),
        budget: spec.budget,
    })?;
    let space = match spec.basis {
        Basis::Z => code.hz().nullspace_basis(),
        Basis::X => code.hx().nullspace_basis(),
    };
    let pairing = spec.sets.pairing_vector(spec.basis);
    let mut marks: HashMap<BitVector, u8> = HashMap::new();
    let outcome_space = for_each_in_coset(space.rows(), &BitVector::zeros(code.n()), cap, |c| {
        let bit = 1u8 << u8::from(c.dot(pairing));
        for t in members {
            *marks.entry(c ^ t).or_insert(0) |= bit;
        }
    })?;
    Ok(SweepReport {
        basis: spec.basis,
        outcome_space,
        family: members.len(),
        points: marks.len(),
        doubly_certified: marks.values().filter(|&&m| m == 3).count(),
    })
}

/// Ordered pairs `(t, t')` of family members with `t + t' ∈ C_1`. The cells intersect
/// exactly when this count is nonzero.
pub fn double_certification_pairs(spec: &VoronoiSpec<'_>) -> Result<u64, StatesError> {
    let code = spec.sets.code;
    let members = spec.members().ok_or(StatesError::BudgetExceeded {
        size: spec.family.size(code.n()),
        budget: spec.budget,
    })?;
    let mut count = 0;
    for t in members {
        for u in members {
            if spec.sets.classify(spec.basis, &(t ^ u)) == Some(1) {
                count += 1;
            }
        }
    }
    Ok(count)
}
