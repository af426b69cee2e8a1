//! Packed linear algebra over GF(2): vectors, matrices, elimination, coset
//! enumeration and normalization of dual pairs.

mod matrix;
mod vector;

pub use matrix::{BitMatrix, Echelon};
pub use vector::BitVector;

use thiserror::Error;

/// Default bound on the number of elements a coset enumeration may produce.
pub const DEFAULT_COSET_CAP: u64 = 1 << 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coset of dimension {dim} exceeds the enumeration cap of {cap} elements")]
    CapacityExceeded { dim: usize, cap: u64 },
    #[error("pairing matrix is singular")]
    SingularPairing,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Rows of `rows` that are independent of the rows before them, in order.
#[must_use]
pub fn independent_subset(len: usize, rows: &[BitVector]) -> Vec<BitVector> {
    let mut e = Echelon::new(len);
    rows.iter().filter(|r| e.insert(r)).cloned().collect()
}

/// Visits every element of `offset + span(basis)` exactly once, in Gray-code order
/// starting at `offset`. Dependent basis rows are dropped first. Returns the count.
pub fn for_each_in_coset(
    basis: &[BitVector],
    offset: &BitVector,
    cap: u64,
    mut visit: impl FnMut(&BitVector),
) -> Result<u64, Gf2Error> {
    let basis = independent_subset(offset.len(), basis);
    let dim = basis.len();
    if dim >= 64 || (1u64 << dim) > cap {
        return Err(Gf2Error::CapacityExceeded { dim, cap });
    }
    let mut cur = offset.clone();
    visit(&cur);
    let total = 1u64 << dim;
    for i in 1..total {
        cur.xor_assign(&basis[i.trailing_zeros() as usize]);
        visit(&cur);
    }
    Ok(total)
}

/// Every element of `offset + rowspan(basis)`.
pub fn coset_enumerate(
    basis: &BitMatrix,
    offset: &BitVector,
    cap: u64,
) -> Result<Vec<BitVector>, Gf2Error> {
    if basis.ncols() != offset.len() {
        return Err(Gf2Error::DimensionMismatch {
            expected: basis.ncols(),
            found: offset.len(),
        });
    }
    let mut out = Vec::new();
    for_each_in_coset(basis.rows(), offset, cap, |v| out.push(v.clone()))?;
    Ok(out)
}

/// Replaces `(xs, zs)` by spans-preserving combinations with `<x_i, z_j> = δ_ij`.
///
/// Row `i` pivots on the first `j >= i` with `<x_i, z_j> = 1`; that `z_j` is swapped
/// into slot `i` and then used to clear row and column `i` of the pairing matrix.
/// Pairs that are already dual come back unchanged.
pub fn pair_normalize(
    xs: &[BitVector],
    zs: &[BitVector],
) -> Result<(Vec<BitVector>, Vec<BitVector>), Gf2Error> {
    if xs.len() != zs.len() {
        return Err(Gf2Error::DimensionMismatch {
            expected: xs.len(),
            found: zs.len(),
        });
    }
    let mut xs = xs.to_vec();
    let mut zs = zs.to_vec();
    let k = xs.len();
    for i in 0..k {
        let j = (i..k)
            .find(|&j| xs[i].dot(&zs[j]))
            .ok_or(Gf2Error::SingularPairing)?;
        zs.swap(i, j);
        let (xi, zi) = (xs[i].clone(), zs[i].clone());
        for j in (0..k).filter(|&j| j != i) {
            if xs[j].dot(&zi) {
                xs[j].xor_assign(&xi);
            }
            if xi.dot(&zs[j]) {
                zs[j].xor_assign(&zi);
            }
        }
    }
    Ok((xs, zs))
}

/// Pairing matrix `G[i][j] = <xs_i, zs_j>`.
#[must_use]
pub fn gram(xs: &[BitVector], zs: &[BitVector]) -> Vec<Vec<bool>> {
    xs.iter()
        .map(|x| zs.iter().map(|z| x.dot(z)).collect())
        .collect()
}
