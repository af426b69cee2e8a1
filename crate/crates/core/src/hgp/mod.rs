//! Hypergraph product of a graph's repetition code with itself.
//!
//! Qubits sit on `V×V ∪ E×E`. The `V×V` block comes first in row-major order,
//! `(u, v) ↦ u·n + v`, followed by `E×E` with `(e, f) ↦ n² + e·m + f`.
//! X-checks are indexed by `(e, v)` and Z-checks by `(v, e)`:
//!
//! * `s_x(e, v) = ∂ᵀe ⊗ v + e ⊗ ∂v`, so `hx = (∂ ⊗ I_n | I_m ⊗ ∂ᵀ)`;
//! * `s_z(v, e) = v ⊗ ∂ᵀe + ∂v ⊗ e`, so `hz = (I_n ⊗ ∂ | ∂ᵀ ⊗ I_m)`.

mod audit;

pub use audit::{localized_distance_audit, LineOrientation, LocalizedAudit, DEFAULT_AUDIT_CAP};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classical::TannerCode;
use crate::css::{
    css_distance_with_limit, logical_basis_with, make_css, Basis, CssCode, CssError, LogicalBasis,
};
use crate::gf2::{BitMatrix, BitVector, Echelon, Gf2Error};
use crate::graphs::{maximal_connected_residual, Graph, GraphError, ResidualGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HgpError {
    #[error("source graph is disconnected")]
    Disconnected,
    #[error("{what} index {index} out of range ({limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },
    #[error("line vector is not a logical operator")]
    NotLogical,
    #[error("enumeration of 2^{dim} words exceeds the cap of {cap}")]
    TooLarge { dim: usize, cap: u64 },
    #[error(transparent)]
    Css(#[from] CssError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Qubit layout of the product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HgpIndex {
    pub n: usize,
    pub m: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Qubit {
    VV(usize, usize),
    EE(usize, usize),
}

impl HgpIndex {
    #[must_use]
    pub fn qubits(&self) -> usize {
        self.n * self.n + self.m * self.m
    }

    #[must_use]
    pub fn vv(&self, u: usize, v: usize) -> usize {
        debug_assert!(u < self.n && v < self.n);
        u * self.n + v
    }

    #[must_use]
    pub fn ee(&self, e: usize, f: usize) -> usize {
        debug_assert!(e < self.m && f < self.m);
        self.n * self.n + e * self.m + f
    }

    #[must_use]
    pub fn decode(&self, q: usize) -> Qubit {
        let nn = self.n * self.n;
        if q < nn {
            Qubit::VV(q / self.n, q % self.n)
        } else {
            let r = q - nn;
            Qubit::EE(r / self.m, r % self.m)
        }
    }

    /// Qubits of the vertex line through `v`: the column `V×v` or the row `v×V`.
    #[must_use]
    pub fn vertex_line(&self, orientation: LineOrientation, v: usize) -> Vec<usize> {
        match orientation {
            LineOrientation::Columns => (0..self.n).map(|u| self.vv(u, v)).collect(),
            LineOrientation::Rows => (0..self.n).map(|u| self.vv(v, u)).collect(),
        }
    }

    /// Qubits of the edge line through `e`: the column `E×e` or the row `e×E`.
    #[must_use]
    pub fn edge_line(&self, orientation: LineOrientation, e: usize) -> Vec<usize> {
        match orientation {
            LineOrientation::Columns => (0..self.m).map(|f| self.ee(f, e)).collect(),
            LineOrientation::Rows => (0..self.m).map(|f| self.ee(e, f)).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HgpCode {
    pub code: CssCode,
    pub index: HgpIndex,
    pub graph: Graph,
}

/// Product of the repetition code of `g` with itself.
pub fn hypergraph_product(g: &Graph) -> Result<HgpCode, HgpError> {
    if !g.is_connected() {
        return Err(HgpError::Disconnected);
    }
    let d = g.incidence();
    let dt = d.transpose();
    let (n, m) = (g.n(), g.m());
    let hx = BitMatrix::hstack(
        &BitMatrix::kron(&d, &BitMatrix::identity(n)),
        &BitMatrix::kron(&BitMatrix::identity(m), &dt),
    );
    let hz = BitMatrix::hstack(
        &BitMatrix::kron(&BitMatrix::identity(n), &d),
        &BitMatrix::kron(&dt, &BitMatrix::identity(m)),
    );
    Ok(HgpCode {
        code: make_css(hx, hz)?,
        index: HgpIndex { n, m },
        graph: g.clone(),
    })
}

impl HgpCode {
    #[must_use]
    pub fn n_qubits(&self) -> usize {
        self.index.qubits()
    }

    /// `1 + dim(ker ∂ᵀ)²`, the dimension count for a connected source.
    #[must_use]
    pub fn k_formula(&self) -> usize {
        let c = self.graph.m() + 1 - self.graph.n();
        1 + c * c
    }

    /// `s_x(e, v)` or `s_z(v, e)` from the defining formula.
    pub fn stabilizer_generator(
        &self,
        kind: Basis,
        v: usize,
        e: usize,
    ) -> Result<BitVector, HgpError> {
        let HgpIndex { n, m } = self.index;
        if v >= n {
            return Err(HgpError::IndexOutOfRange {
                what: "vertex",
                index: v,
                limit: n,
            });
        }
        if e >= m {
            return Err(HgpError::IndexOutOfRange {
                what: "edge",
                index: e,
                limit: m,
            });
        }
        let (a, b) = self.graph.edge(e);
        let incident: Vec<usize> = self
            .graph
            .neighbors(v)
            .iter()
            .map(|&w| self.graph.edge_index(v, w).expect("neighbor edge exists"))
            .collect();
        let mut s = BitVector::zeros(self.n_qubits());
        match kind {
            Basis::X => {
                s.flip(self.index.vv(a, v));
                s.flip(self.index.vv(b, v));
                for &f in &incident {
                    s.flip(self.index.ee(e, f));
                }
            }
            Basis::Z => {
                s.flip(self.index.vv(v, a));
                s.flip(self.index.vv(v, b));
                for &f in &incident {
                    s.flip(self.index.ee(f, e));
                }
            }
        }
        Ok(s)
    }

    /// Row of `hx` for `(e, v)` or of `hz` for `(v, e)`.
    #[must_use]
    pub fn check_row(&self, kind: Basis, v: usize, e: usize) -> &BitVector {
        match kind {
            Basis::X => self.code.hx().row(e * self.index.n + v),
            Basis::Z => self.code.hz().row(v * self.index.m + e),
        }
    }

    /// `1_{V×v1}` for Z (in `S_x^⊥ - S_z`) or `1_{v1×V}` for X (in `S_z^⊥ - S_x`).
    pub fn column_logical(&self, kind: Basis, v1: usize) -> Result<BitVector, HgpError> {
        let n = self.index.n;
        if v1 >= n {
            return Err(HgpError::IndexOutOfRange {
                what: "vertex",
                index: v1,
                limit: n,
            });
        }
        let orientation = match kind {
            Basis::Z => LineOrientation::Columns,
            Basis::X => LineOrientation::Rows,
        };
        let w = BitVector::from_support(self.n_qubits(), &self.index.vertex_line(orientation, v1));
        let ok = match kind {
            Basis::Z => self.code.in_sx_perp(&w) && !self.code.span_z().contains(&w),
            Basis::X => self.code.in_sz_perp(&w) && !self.code.span_x().contains(&w),
        };
        if !ok {
            return Err(HgpError::NotLogical);
        }
        Ok(w)
    }

    /// Logical basis whose first pair is the line logicals through `v1`.
    pub fn line_logical_basis(&self, v1: usize) -> Result<LogicalBasis, HgpError> {
        let bx = self.column_logical(Basis::X, v1)?;
        let bz = self.column_logical(Basis::Z, v1)?;
        Ok(logical_basis_with(&self.code, &bx, &bz)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpanningReport {
    pub dim_sx_perp: usize,
    pub spanning_rank: usize,
    pub all_in_sx_perp: bool,
    pub spans: bool,
    pub cycle_dim: usize,
    pub k_rank: usize,
    pub k_formula: usize,
}

/// Checks that `{1_{V×v1}} ∪ {e ⊗ c : e ∈ E, c ∈ ker ∂ᵀ} ∪ S_z` spans `S_x^⊥`.
pub fn spanning_set_check(h: &HgpCode) -> Result<SpanningReport, HgpError> {
    let nq = h.n_qubits();
    let cycles = TannerCode::repetition_from_graph(&h.graph)
        .map_err(|_| HgpError::Disconnected)?
        .transpose()
        .kernel_basis();
    let mut vectors = vec![h.column_logical(Basis::Z, 0)?];
    for e in 0..h.index.m {
        for c in cycles.rows() {
            let support: Vec<usize> = c.iter_ones().map(|f| h.index.ee(e, f)).collect();
            vectors.push(BitVector::from_support(nq, &support));
        }
    }
    let all_in = vectors.iter().all(|v| h.code.in_sx_perp(v));
    let mut span = Echelon::from_rows(nq, h.code.hz().rows());
    for v in &vectors {
        span.insert(v);
    }
    let dim_sx_perp = nq - h.code.rank_x();
    Ok(SpanningReport {
        dim_sx_perp,
        spanning_rank: span.rank(),
        all_in_sx_perp: all_in,
        spans: all_in && span.rank() == dim_sx_perp,
        cycle_dim: cycles.nrows(),
        k_rank: h.code.k(),
        k_formula: h.k_formula(),
    })
}

/// Product over a residual subgraph, embedded in the parent's qubits.
#[derive(Clone, Debug)]
pub struct FractalSubcode {
    pub child: HgpCode,
    pub residual: ResidualGraph,
    /// `embedding[q]` is the parent qubit of child qubit `q`.
    pub embedding: Vec<usize>,
}

pub fn fractal_subcode(
    h: &HgpCode,
    v_keep: &[usize],
    e_keep: &[usize],
) -> Result<FractalSubcode, HgpError> {
    let residual = maximal_connected_residual(&h.graph, v_keep, e_keep)?;
    let child = hypergraph_product(&residual.graph)?;
    let vs = &residual.vertices;
    let es = &residual.edges;
    let mut embedding = Vec::with_capacity(child.n_qubits());
    for &u in vs {
        for &v in vs {
            embedding.push(h.index.vv(u, v));
        }
    }
    for &e in es {
        for &f in es {
            embedding.push(h.index.ee(e, f));
        }
    }
    Ok(FractalSubcode {
        child,
        residual,
        embedding,
    })
}

impl FractalSubcode {
    /// Every child check equals the matching parent check restricted to the embedding.
    #[must_use]
    pub fn checks_inherited(&self, parent: &HgpCode) -> bool {
        let vs = &self.residual.vertices;
        let es = &self.residual.edges;
        for (ci, &pv) in vs.iter().enumerate() {
            for (cj, &pe) in es.iter().enumerate() {
                for kind in [Basis::X, Basis::Z] {
                    let child = self.child.check_row(kind, ci, cj);
                    let parent_row = parent.check_row(kind, pv, pe).select(&self.embedding);
                    if *child != parent_row {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Restriction of a parent vector to the child's qubits.
    #[must_use]
    pub fn restrict(&self, w: &BitVector) -> BitVector {
        w.select(&self.embedding)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[allow(non_snake_case)]
pub struct StructuralReport {
    pub N: usize,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub checks_x: usize,
    pub checks_z: usize,
    pub k_rank: usize,
    pub k_formula: usize,
    pub max_check_weight: usize,
    pub max_qubit_degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<usize>,
}

/// Parameters by construction and by rank; the distance is filled in when both
/// quotient spaces have dimension at most `max_dim`.
pub fn structural_report(h: &HgpCode, max_dim: usize) -> StructuralReport {
    let c = &h.code;
    StructuralReport {
        N: h.n_qubits(),
        n: h.index.n,
        m: h.index.m,
        d: h.graph.max_degree(),
        checks_x: c.hx().nrows(),
        checks_z: c.hz().nrows(),
        k_rank: c.k(),
        k_formula: h.k_formula(),
        max_check_weight: c.hx().max_row_weight().max(c.hz().max_row_weight()),
        max_qubit_degree: c.hx().max_col_weight().max(c.hz().max_col_weight()),
        distance: css_distance_with_limit(c, max_dim).ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{complete_graph, cycle_graph, path_graph};

    #[test]
    fn toric_triangle_shape() {
        let h = hypergraph_product(&cycle_graph(3)).unwrap();
        assert_eq!(h.n_qubits(), 18);
        assert_eq!(h.code.hx().nrows(), 9);
        assert_eq!(h.code.hz().nrows(), 9);
        assert!(h.code.hx().rows().iter().all(|r| r.weight() == 4));
        assert!(h.code.hz().rows().iter().all(|r| r.weight() == 4));
        assert_eq!(h.code.k(), 2);
    }

    #[test]
    fn k4_shape() {
        let h = hypergraph_product(&complete_graph(4)).unwrap();
        assert_eq!(h.n_qubits(), 52);
        assert_eq!(h.code.hx().max_row_weight(), 5);
        assert_eq!(h.code.k(), 10);
        assert_eq!(h.k_formula(), 10);
    }

    #[test]
    fn generators_match_rows() {
        for g in [cycle_graph(3), complete_graph(4), path_graph(4)] {
            let h = hypergraph_product(&g).unwrap();
            for v in 0..g.n() {
                for e in 0..g.m() {
                    for kind in [Basis::X, Basis::Z] {
                        let s = h.stabilizer_generator(kind, v, e).unwrap();
                        assert_eq!(&s, h.check_row(kind, v, e));
                        let vv = s.iter_ones().filter(|&q| q < g.n() * g.n()).count();
                        assert_eq!(vv, 2);
                        assert_eq!(s.weight(), 2 + g.degree(v));
                    }
                }
            }
        }
    }

    #[test]
    fn line_logicals() {
        let h = hypergraph_product(&cycle_graph(3)).unwrap();
        let z = h.column_logical(Basis::Z, 0).unwrap();
        let x = h.column_logical(Basis::X, 0).unwrap();
        assert_eq!(z.weight(), 3);
        assert!(x.dot(&z));
        let lb = h.line_logical_basis(1).unwrap();
        assert_eq!(lb.k(), 2);
        let h = hypergraph_product(&complete_graph(4)).unwrap();
        assert_eq!(h.column_logical(Basis::Z, 2).unwrap().weight(), 4);
    }

    #[test]
    fn spanning_sets() {
        for (g, k) in [
            (cycle_graph(3), 2),
            (path_graph(5), 1),
            (complete_graph(4), 10),
        ] {
            let h = hypergraph_product(&g).unwrap();
            let r = spanning_set_check(&h).unwrap();
            assert!(r.spans, "{r:?}");
            assert_eq!(r.k_rank, k);
            assert_eq!(r.k_formula, k);
        }
    }

    #[test]
    fn fractal_identity_and_triangle() {
        let g = complete_graph(4);
        let h = hypergraph_product(&g).unwrap();
        let all_e: Vec<usize> = (0..g.m()).collect();
        let sub = fractal_subcode(&h, &[0, 1, 2, 3], &all_e).unwrap();
        assert_eq!(sub.embedding, (0..52).collect::<Vec<_>>());
        let sub = fractal_subcode(&h, &[0, 1, 2], &all_e).unwrap();
        assert_eq!(sub.child.n_qubits(), 18);
        assert!(sub.checks_inherited(&h));
        // (1, 2) in the triangle is (1, 2) in K4; child edge 2 = (1, 2) is parent edge 3.
        assert_eq!(sub.embedding[5], 6);
        assert_eq!(sub.embedding[9 + 2 * 3 + 2], 16 + 3 * 6 + 3);
    }

    #[test]
    fn product_distance_is_min_of_factors() {
        let h = hypergraph_product(&cycle_graph(3)).unwrap();
        assert_eq!(structural_report(&h, 26).distance, Some(3));
        let h = hypergraph_product(&path_graph(3)).unwrap();
        assert_eq!(structural_report(&h, 26).distance, Some(3));
    }
}
