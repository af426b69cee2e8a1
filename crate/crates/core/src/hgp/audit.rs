use serde::{Deserialize, Serialize};

use super::{HgpCode, HgpError};
use crate::css::{Basis, LogicalBasis};
use crate::gf2::{independent_subset, BitVector};

/// Largest class the audit will enumerate.
pub const DEFAULT_AUDIT_CAP: u64 = 1 << 30;

/// Which family of lines a weight profile is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LineOrientation {
    /// `V×v` and `E×e`.
    Columns,
    /// `v×V` and `e×E`.
    Rows,
}

/// Line-weight profile of every word in one nontrivial logical class.
///
/// The class for `Basis::Z` is `C_1^Z = {x ∈ S_z^⊥ : <x, bz> = 1}`, which contains the
/// row logical `bx`; for `Basis::X` it is `C_1^X = {x ∈ S_x^⊥ : <x, bx> = 1}`, which
/// contains the column logical `bz`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LocalizedAudit {
    pub class: Basis,
    pub orientation: LineOrientation,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub words: u64,
    pub min_weight: usize,
    /// Smallest, over words, of the heaviest vertex line.
    pub min_max_vertex_line: usize,
    /// Smallest, over words, of the heaviest edge line.
    pub min_max_edge_line: usize,
    /// Distinct `(heaviest vertex line, heaviest edge line)` pairs that occur, sorted.
    pub profiles: Vec<(usize, usize)>,
    /// Every word has a vertex line of weight `>= n/2` or an edge line of weight `>= 3n/(8d)`.
    pub holds_stated: bool,
}

impl LocalizedAudit {
    /// `min over words of max(a - 2 vertex_cap, b - 2 edge_cap)` for profile `(a, b)`.
    ///
    /// If two errors each put at most `vertex_cap` flips on any vertex line and at most
    /// `edge_cap` on any edge line, words of the two classes they displace stay at least
    /// this far apart.
    #[must_use]
    pub fn distance_lower_bound(&self, vertex_cap: usize, edge_cap: usize) -> i64 {
        self.profiles
            .iter()
            .map(|&(a, b)| (a as i64 - 2 * vertex_cap as i64).max(b as i64 - 2 * edge_cap as i64))
            .min()
            .unwrap_or(i64::MAX)
    }
}

pub fn localized_distance_audit(
    h: &HgpCode,
    lb: &LogicalBasis,
    index: usize,
    class: Basis,
    orientation: LineOrientation,
    cap: u64,
) -> Result<LocalizedAudit, HgpError> {
    let code = &h.code;
    let nq = h.n_qubits();
    let (space, pairing, offset) = match class {
        Basis::Z => (code.hz().nullspace_basis(), &lb.bz[index], &lb.bx[index]),
        Basis::X => (code.hx().nullspace_basis(), &lb.bx[index], &lb.bz[index]),
    };
    let mut rows = independent_subset(nq, space.rows());
    let pivot = rows
        .iter()
        .position(|r| r.dot(pairing))
        .ok_or(HgpError::NotLogical)?;
    let p = rows.swap_remove(pivot);
    for r in &mut rows {
        if r.dot(pairing) {
            r.xor_assign(&p);
        }
    }
    let dim = rows.len();
    if dim >= 63 || (1u64 << dim) > cap {
        return Err(HgpError::TooLarge { dim, cap });
    }

    let HgpCode {
        index: ix, graph, ..
    } = h;
    let (n, m) = (ix.n, ix.m);
    let vlines: Vec<Vec<usize>> = (0..n).map(|v| ix.vertex_line(orientation, v)).collect();
    let elines: Vec<Vec<usize>> = (0..m).map(|e| ix.edge_line(orientation, e)).collect();
    let mut seen = vec![false; (n + 1) * (m + 1)];
    let mut min_weight = usize::MAX;
    let total = 1u64 << dim;

    if nq <= 64 {
        let to_mask = |line: &Vec<usize>| line.iter().fold(0u64, |acc, &q| acc | (1 << q));
        let vmasks: Vec<u64> = vlines.iter().map(to_mask).collect();
        let emasks: Vec<u64> = elines.iter().map(to_mask).collect();
        let basis: Vec<u64> = rows.iter().map(BitVector::to_u64).collect();
        let mut cur = offset.to_u64();
        for i in 0..total {
            if i > 0 {
                cur ^= basis[i.trailing_zeros() as usize];
            }
            let a = vmasks
                .iter()
                .map(|&k| (cur & k).count_ones())
                .max()
                .unwrap_or(0) as usize;
            let b = emasks
                .iter()
                .map(|&k| (cur & k).count_ones())
                .max()
                .unwrap_or(0) as usize;
            seen[a * (m + 1) + b] = true;
            min_weight = min_weight.min(cur.count_ones() as usize);
        }
    } else {
        let vmasks: Vec<BitVector> = vlines
            .iter()
            .map(|l| BitVector::from_support(nq, l))
            .collect();
        let emasks: Vec<BitVector> = elines
            .iter()
            .map(|l| BitVector::from_support(nq, l))
            .collect();
        let mut cur = offset.clone();
        for i in 0..total {
            if i > 0 {
                cur.xor_assign(&rows[i.trailing_zeros() as usize]);
            }
            let a = vmasks.iter().map(|k| cur.and_weight(k)).max().unwrap_or(0);
            let b = emasks.iter().map(|k| cur.and_weight(k)).max().unwrap_or(0);
            seen[a * (m + 1) + b] = true;
            min_weight = min_weight.min(cur.weight());
        }
    }

    let profiles: Vec<(usize, usize)> = (0..seen.len())
        .filter(|&i| seen[i])
        .map(|i| (i / (m + 1), i % (m + 1)))
        .collect();
    let d = graph.max_degree();
    let holds_stated = profiles
        .iter()
        .all(|&(a, b)| 2 * a >= n || (d > 0 && 8.0 * d as f64 * b as f64 >= 3.0 * n as f64));
    Ok(LocalizedAudit {
        class,
        orientation,
        n,
        m,
        d,
        words: total,
        min_weight,
        min_max_vertex_line: profiles.iter().map(|p| p.0).min().unwrap_or(0),
        min_max_edge_line: profiles.iter().map(|p| p.1).min().unwrap_or(0),
        profiles,
        holds_stated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::cycle_graph;
    use crate::hgp::hypergraph_product;

    #[test]
    fn triangle_audit() {
        let h = hypergraph_product(&cycle_graph(3)).unwrap();
        let lb = h.line_logical_basis(0).unwrap();
        let a = localized_distance_audit(&h, &lb, 0, Basis::X, LineOrientation::Columns, 1 << 20)
            .unwrap();
        assert_eq!(a.words, 512);
        assert_eq!(a.min_weight, 3);
        assert!(a.holds_stated);
        // bz itself is a full column with an empty E block.
        assert!(a.profiles.contains(&(3, 0)));
        let b =
            localized_distance_audit(&h, &lb, 0, Basis::Z, LineOrientation::Rows, 1 << 20).unwrap();
        assert_eq!(a.profiles, b.profiles);
    }

    #[test]
    fn cap_is_enforced() {
        let h = hypergraph_product(&cycle_graph(3)).unwrap();
        let lb = h.line_logical_basis(0).unwrap();
        let e = localized_distance_audit(&h, &lb, 0, Basis::X, LineOrientation::Columns, 256);
        assert_eq!(e.unwrap_err(), HgpError::TooLarge { dim: 9, cap: 256 });
    }
}
