//! CSS codes from a pair of check matrices: validation, parameters, logical bases,
//! exact distance for small codes, classical energies and the logical partition
//! of measurement outcomes.
//!
//! Conventions: `S_x` is the row span of `hx` and `S_z` that of `hz`. Code states are
//! uniform superpositions over cosets `z + S_x` with `z` in `S_z^⊥`, so Z-basis
//! outcomes land in `S_z^⊥` and X-basis outcomes in `S_x^⊥`. X-type logicals `bx`
//! live in `S_z^⊥ - S_x` and Z-type logicals `bz` in `S_x^⊥ - S_z`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{pair_normalize, BitMatrix, BitVector, Echelon, Gf2Error};

pub const MAX_CSS_DISTANCE_DIM: usize = 26;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CssError {
    #[error("hx has {x} columns but hz has {z}")]
    ColumnMismatch { x: usize, z: usize },
    #[error("X-check {x_row} and Z-check {z_row} overlap an odd number of times")]
    Violation { x_row: usize, z_row: usize },
    #[error("code encodes no logical qubits")]
    Trivial,
    #[error("{side} space has dimension {dim}, limit is {limit}")]
    TooLarge {
        side: &'static str,
        dim: usize,
        limit: usize,
    },
    #[error("not a logical operator: {0}")]
    NotLogical(String),
    #[error("logical index {index} out of range for k = {k}")]
    IndexOutOfRange { index: usize, k: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Z,
}

impl Basis {
    #[must_use]
    pub fn other(self) -> Self {
        match self {
            Self::X => Self::Z,
            Self::Z => Self::X,
        }
    }
}

#[derive(Debug)]
pub struct CssCode {
    hx: BitMatrix,
    hz: BitMatrix,
    rank_x: usize,
    rank_z: usize,
    span_x: OnceLock<Echelon>,
    span_z: OnceLock<Echelon>,
}

impl Clone for CssCode {
    fn clone(&self) -> Self {
        Self {
            hx: self.hx.clone(),
            hz: self.hz.clone(),
            rank_x: self.rank_x,
            rank_z: self.rank_z,
            span_x: self.span_x.clone(),
            span_z: self.span_z.clone(),
        }
    }
}

/// Validates `hx hz^T = 0` and caches ranks.
pub fn make_css(hx: BitMatrix, hz: BitMatrix) -> Result<CssCode, CssError> {
    if hx.ncols() != hz.ncols() {
        return Err(CssError::ColumnMismatch {
            x: hx.ncols(),
            z: hz.ncols(),
        });
    }
    let overlap = hx.mul(&hz.transpose());
    for (i, row) in overlap.rows().iter().enumerate() {
        if let Some(j) = row.first_one() {
            return Err(CssError::Violation { x_row: i, z_row: j });
        }
    }
    let rank_x = hx.rank();
    let rank_z = hz.rank();
    Ok(CssCode {
        hx,
        hz,
        rank_x,
        rank_z,
        span_x: OnceLock::new(),
        span_z: OnceLock::new(),
    })
}

impl CssCode {
    #[must_use]
    pub fn hx(&self) -> &BitMatrix {
        &self.hx
    }

    #[must_use]
    pub fn hz(&self) -> &BitMatrix {
        &self.hz
    }

    /// Number of qubits.
    #[must_use]
    pub fn n(&self) -> usize {
        self.hx.ncols()
    }

    #[must_use]
    pub fn rank_x(&self) -> usize {
        self.rank_x
    }

    #[must_use]
    pub fn rank_z(&self) -> usize {
        self.rank_z
    }

    #[must_use]
    pub fn k(&self) -> usize {
        self.n() - self.rank_x - self.rank_z
    }

    #[must_use]
    pub fn checks(&self, basis: Basis) -> &BitMatrix {
        match basis {
            Basis::X => &self.hx,
            Basis::Z => &self.hz,
        }
    }

    #[must_use]
    pub fn span_x(&self) -> &Echelon {
        self.span_x
            .get_or_init(|| Echelon::from_rows(self.n(), self.hx.rows()))
    }

    #[must_use]
    pub fn span_z(&self) -> &Echelon {
        self.span_z
            .get_or_init(|| Echelon::from_rows(self.n(), self.hz.rows()))
    }

    /// `w ∈ S_x^⊥`, i.e. `hx w = 0`.
    #[must_use]
    pub fn in_sx_perp(&self, w: &BitVector) -> bool {
        self.hx.rows().iter().all(|r| !r.dot(w))
    }

    /// `w ∈ S_z^⊥`, i.e. `hz w = 0`.
    #[must_use]
    pub fn in_sz_perp(&self, w: &BitVector) -> bool {
        self.hz.rows().iter().all(|r| !r.dot(w))
    }

    /// Outcomes of a measurement in `basis` lie in this space: `S_z^⊥` for Z, `S_x^⊥` for X.
    #[must_use]
    pub fn outcome_space_contains(&self, basis: Basis, w: &BitVector) -> bool {
        match basis {
            Basis::Z => self.in_sz_perp(w),
            Basis::X => self.in_sx_perp(w),
        }
    }

    /// Parses two matrix blocks separated by a `---` line.
    pub fn parse(text: &str) -> Result<Self, CssError> {
        let mut parts = text.split("\n---");
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(CssError::Parse(
                "expected two blocks separated by ---".into(),
            ));
        };
        let b = b.trim_start_matches('-');
        make_css(BitMatrix::parse(a)?, BitMatrix::parse(b)?)
    }

    #[must_use]
    pub fn to_text(&self) -> String {
        format!("{}---\n{}", self.hx.to_text(), self.hz.to_text())
    }
}

/// Conjugate pairs of logical operators with `<bx_i, bz_j> = δ_ij`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalBasis {
    pub bx: Vec<BitVector>,
    pub bz: Vec<BitVector>,
}

impl LogicalBasis {
    #[must_use]
    pub fn k(&self) -> usize {
        self.bx.len()
    }

    /// Recomputes every pairing and quotient membership.
    pub fn verify(&self, code: &CssCode) -> Result<(), CssError> {
        if self.bx.len() != code.k() || self.bz.len() != code.k() {
            return Err(CssError::NotLogical(format!(
                "expected {} pairs, found {}/{}",
                code.k(),
                self.bx.len(),
                self.bz.len()
            )));
        }
        for (i, x) in self.bx.iter().enumerate() {
            if !code.in_sz_perp(x) || code.span_x().contains(x) {
                return Err(CssError::NotLogical(format!("bx[{i}]")));
            }
            for (j, z) in self.bz.iter().enumerate() {
                if x.dot(z) != (i == j) {
                    return Err(CssError::NotLogical(format!("pairing ({i}, {j})")));
                }
            }
        }
        for (i, z) in self.bz.iter().enumerate() {
            if !code.in_sx_perp(z) || code.span_z().contains(z) {
                return Err(CssError::NotLogical(format!("bz[{i}]")));
            }
        }
        Ok(())
    }
}

fn quotient_reps(start: &Echelon, space: &BitMatrix) -> Vec<BitVector> {
    let mut e = start.clone();
    space
        .rows()
        .iter()
        .filter(|v| e.insert(v))
        .cloned()
        .collect()
}

pub fn logical_basis(code: &CssCode) -> Result<LogicalBasis, CssError> {
    if code.k() == 0 {
        return Err(CssError::Trivial);
    }
    let bx = quotient_reps(code.span_x(), &code.hz.nullspace_basis());
    let bz = quotient_reps(code.span_z(), &code.hx.nullspace_basis());
    let (bx, bz) = pair_normalize(&bx, &bz)?;
    let lb = LogicalBasis { bx, bz };
    lb.verify(code)?;
    Ok(lb)
}

/// Logical basis whose first pair is `(bx0, bz0)`.
pub fn logical_basis_with(
    code: &CssCode,
    bx0: &BitVector,
    bz0: &BitVector,
) -> Result<LogicalBasis, CssError> {
    if code.k() == 0 {
        return Err(CssError::Trivial);
    }
    if !bx0.dot(bz0) {
        return Err(CssError::NotLogical(
            "designated pair does not anticommute".into(),
        ));
    }
    let mut ex = code.span_x().clone();
    if !code.in_sz_perp(bx0) || !ex.insert(bx0) {
        return Err(CssError::NotLogical("designated bx".into()));
    }
    let mut ez = code.span_z().clone();
    if !code.in_sx_perp(bz0) || !ez.insert(bz0) {
        return Err(CssError::NotLogical("designated bz".into()));
    }
    let mut bx = vec![bx0.clone()];
    bx.extend(quotient_reps(&ex, &code.hz.nullspace_basis()));
    let mut bz = vec![bz0.clone()];
    bz.extend(quotient_reps(&ez, &code.hx.nullspace_basis()));
    let (bx, bz) = pair_normalize(&bx, &bz)?;
    debug_assert_eq!(&bx[0], bx0);
    debug_assert_eq!(&bz[0], bz0);
    let lb = LogicalBasis { bx, bz };
    lb.verify(code)?;
    Ok(lb)
}

/// Minimum weight of `span(logicals) + span(stabilizers)` outside `span(stabilizers)`.
/// `logicals` must be independent modulo the stabilizers.
fn min_logical_weight(len: usize, logicals: &[BitVector], stabilizers: &[BitVector]) -> usize {
    let k = logicals.len();
    let stab = crate::gf2::independent_subset(len, stabilizers);
    let basis: Vec<&BitVector> = logicals.iter().chain(&stab).collect();
    let total = 1u64 << basis.len();
    let low = (1u64 << k) - 1;
    let mut best = usize::MAX;
    if len <= 64 {
        let words: Vec<u64> = basis.iter().map(|b| b.to_u64()).collect();
        let mut cur = 0u64;
        for i in 1..total {
            let b = i.trailing_zeros() as usize;
            cur ^= words[b];
            if (i ^ (i >> 1)) & low != 0 {
                best = best.min(cur.count_ones() as usize);
                if best == 1 {
                    break;
                }
            }
        }
    } else {
        let mut cur = BitVector::zeros(len);
        for i in 1..total {
            let b = i.trailing_zeros() as usize;
            cur.xor_assign(basis[b]);
            if (i ^ (i >> 1)) & low != 0 {
                best = best.min(cur.weight());
                if best == 1 {
                    break;
                }
            }
        }
    }
    best
}

/// Exact code distance by enumerating both quotient spaces.
pub fn css_distance_exhaustive(code: &CssCode) -> Result<usize, CssError> {
    css_distance_with_limit(code, MAX_CSS_DISTANCE_DIM)
}

pub fn css_distance_with_limit(code: &CssCode, max_dim: usize) -> Result<usize, CssError> {
    let k = code.k();
    if k == 0 {
        return Err(CssError::Trivial);
    }
    let dim_sx_perp = code.n() - code.rank_x;
    let dim_sz_perp = code.n() - code.rank_z;
    for (side, dim) in [("S_x^perp", dim_sx_perp), ("S_z^perp", dim_sz_perp)] {
        if dim > max_dim {
            return Err(CssError::TooLarge {
                side,
                dim,
                limit: max_dim,
            });
        }
    }
    let lb = logical_basis(code)?;
    let mut sides = [
        (dim_sz_perp, &lb.bx, code.hx.rows()),
        (dim_sx_perp, &lb.bz, code.hz.rows()),
    ];
    sides.sort_by_key(|s| s.0);
    let mut best = usize::MAX;
    for (_, logicals, stabilizers) in sides {
        best = best.min(min_logical_weight(code.n(), logicals, stabilizers));
        if best == 1 {
            break;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EnergyReport {
    pub basis: Basis,
    /// Checks with a definite value on the string that it fails.
    pub violated: usize,
    /// Size of that check family.
    pub checks: usize,
    /// `violated / (2 checks)`, the per-family half weighting of the code Hamiltonian.
    pub code_ham: f64,
    /// `violated / (m_x + m_z)`, one weight per check overall.
    pub per_check: f64,
}

/// Classical energy of a computational-basis string.
///
/// A Z-basis string is an eigenstate of every Z-type check, so it is scored against
/// `hz`; an X-basis string against `hx`. Checks of the other type have no definite
/// value on such a string and are left out of both normalizations.
#[must_use]
pub fn energy(code: &CssCode, w: &BitVector, basis: Basis) -> EnergyReport {
    let h = code.checks(basis);
    let violated = h.mul_vec(w).weight();
    let checks = h.nrows();
    let total = code.hx.nrows() + code.hz.nrows();
    EnergyReport {
        basis,
        violated,
        checks,
        code_ham: if checks == 0 {
            0.0
        } else {
            violated as f64 / (2.0 * checks as f64)
        },
        per_check: if total == 0 {
            0.0
        } else {
            violated as f64 / total as f64
        },
    }
}

/// Split of the measurement outcome spaces by one logical pair:
/// `C_0^Z = S_z^⊥ ∩ bz^⊥`, `C_1^Z = bx + C_0^Z`, and dually for X.
#[derive(Clone, Debug)]
pub struct PartitionSets<'a> {
    pub code: &'a CssCode,
    pub bx: BitVector,
    pub bz: BitVector,
}

pub fn partition_sets<'a>(
    code: &'a CssCode,
    lb: &LogicalBasis,
    i: usize,
) -> Result<PartitionSets<'a>, CssError> {
    if i >= lb.k() {
        return Err(CssError::IndexOutOfRange {
            index: i,
            k: lb.k(),
        });
    }
    Ok(PartitionSets {
        code,
        bx: lb.bx[i].clone(),
        bz: lb.bz[i].clone(),
    })
}

impl PartitionSets<'_> {
    /// Logical class of `x` in `basis`, or `None` if `x` is not a possible outcome.
    #[must_use]
    pub fn classify(&self, basis: Basis, x: &BitVector) -> Option<u8> {
        if !self.code.outcome_space_contains(basis, x) {
            return None;
        }
        Some(u8::from(x.dot(self.pairing_vector(basis))))
    }

    /// The logical whose pairing separates the two classes in `basis`.
    #[must_use]
    pub fn pairing_vector(&self, basis: Basis) -> &BitVector {
        match basis {
            Basis::Z => &self.bz,
            Basis::X => &self.bx,
        }
    }

    /// The logical that shifts class 0 onto class 1 in `basis`.
    #[must_use]
    pub fn shift_vector(&self, basis: Basis) -> &BitVector {
        match basis {
            Basis::Z => &self.bx,
            Basis::X => &self.bz,
        }
    }
}

#[must_use]
pub fn steane() -> CssCode {
    let h = BitMatrix::from_strs(&["1010101", "0110011", "0001111"]);
    make_css(h.clone(), h).expect("Steane checks commute")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_qubit() -> CssCode {
        make_css(
            BitMatrix::from_strs(&["1100"]),
            BitMatrix::from_strs(&["0011"]),
        )
        .unwrap()
    }

    #[test]
    fn make_css_examples() {
        assert_eq!(four_qubit().k(), 2);
        let e = make_css(BitMatrix::from_strs(&["10"]), BitMatrix::from_strs(&["10"])).unwrap_err();
        assert_eq!(e, CssError::Violation { x_row: 0, z_row: 0 });
        assert_eq!(steane().k(), 1);
    }

    #[test]
    fn logical_bases_verify() {
        for c in [four_qubit(), steane()] {
            let lb = logical_basis(&c).unwrap();
            assert_eq!(lb.k(), c.k());
            lb.verify(&c).unwrap();
        }
    }

    #[test]
    fn distances() {
        assert_eq!(css_distance_exhaustive(&steane()).unwrap(), 3);
        assert_eq!(css_distance_exhaustive(&four_qubit()).unwrap(), 1);
    }

    #[test]
    fn trivial_code() {
        let c = make_css(BitMatrix::from_strs(&["10"]), BitMatrix::from_strs(&["01"])).unwrap();
        assert_eq!(logical_basis(&c), Err(CssError::Trivial));
    }

    #[test]
    fn energy_half_weighting() {
        let c = make_css(BitMatrix::zeros(0, 4), BitMatrix::identity(4)).unwrap();
        let e = energy(&c, &BitVector::zeros(4), Basis::Z);
        assert_eq!(e.code_ham, 0.0);
        let e = energy(&c, &BitVector::parse01("0100").unwrap(), Basis::Z);
        assert_eq!((e.violated, e.checks, e.code_ham), (1, 4, 0.125));
        assert_eq!(e.per_check, 0.25);
        // No X-checks, so an X-basis string scores zero.
        assert_eq!(energy(&c, &BitVector::ones(4), Basis::X).violated, 0);
    }

    #[test]
    fn partition_classes() {
        let c = steane();
        let lb = logical_basis(&c).unwrap();
        let p = partition_sets(&c, &lb, 0).unwrap();
        assert_eq!(p.classify(Basis::Z, &BitVector::zeros(7)), Some(0));
        assert_eq!(p.classify(Basis::Z, &lb.bx[0]), Some(1));
        assert!(partition_sets(&c, &lb, 1).is_err());
    }

    #[test]
    fn file_round_trip() {
        let c = steane();
        let back = CssCode::parse(&c.to_text()).unwrap();
        assert_eq!(back.hx(), c.hx());
        assert_eq!(back.hz(), c.hz());
    }
}
