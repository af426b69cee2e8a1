use std::fmt;

use super::{BitVector, Gf2Error};

/// Row-major GF(2) matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    #[must_use]
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    #[must_use]
    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self, Gf2Error> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Gf2Error::DimensionMismatch {
                expected: cols,
                found: r.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    /// Rows given as `0`/`1` strings.
    ///
    /// # Panics
    /// On malformed input; meant for literals in tests and examples.
    #[must_use]
    pub fn from_strs(rows: &[&str]) -> Self {
        let rows: Vec<BitVector> = rows
            .iter()
            .map(|s| BitVector::parse01(s).expect("bad bit string"))
            .collect();
        let cols = rows.first().map_or(0, BitVector::len);
        Self::from_rows(cols, rows).expect("ragged rows")
    }

    #[must_use]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[must_use]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[must_use]
    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    #[must_use]
    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    #[must_use]
    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    #[must_use]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.rows[r].flip(c);
    }

    pub fn push_row(&mut self, row: BitVector) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.rows.push(row);
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    #[must_use]
    pub fn max_row_weight(&self) -> usize {
        self.rows.iter().map(BitVector::weight).max().unwrap_or(0)
    }

    #[must_use]
    pub fn column_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.cols];
        for r in &self.rows {
            for c in r.iter_ones() {
                w[c] += 1;
            }
        }
        w
    }

    #[must_use]
    pub fn max_col_weight(&self) -> usize {
        self.column_weights().into_iter().max().unwrap_or(0)
    }

    #[must_use]
    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.iter_ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// `M x`.
    #[must_use]
    pub fn mul_vec(&self, x: &BitVector) -> BitVector {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        let mut out = BitVector::zeros(self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(x) {
                out.set(i, true);
            }
        }
        out
    }

    /// `self * other`, accumulating rows of `other` over the support of each row of `self`.
    #[must_use]
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.nrows(), "inner dimension mismatch");
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = BitVector::zeros(other.cols);
                for k in r.iter_ones() {
                    acc.xor_assign(&other.rows[k]);
                }
                acc
            })
            .collect();
        Self {
            cols: other.cols,
            rows,
        }
    }

    /// Kronecker product, `(a ⊗ b)[(i, k), (j, l)] = a[i, j] b[k, l]`.
    #[must_use]
    pub fn kron(a: &Self, b: &Self) -> Self {
        let cols = a.cols * b.cols;
        let mut out = Self::zeros(a.nrows() * b.nrows(), cols);
        for (i, ar) in a.rows.iter().enumerate() {
            for j in ar.iter_ones() {
                for (k, br) in b.rows.iter().enumerate() {
                    let row = &mut out.rows[i * b.nrows() + k];
                    for l in br.iter_ones() {
                        row.set(j * b.cols + l, true);
                    }
                }
            }
        }
        out
    }

    /// `[a | b]`.
    #[must_use]
    pub fn hstack(a: &Self, b: &Self) -> Self {
        assert_eq!(a.nrows(), b.nrows(), "row count mismatch in hstack");
        Self {
            cols: a.cols + b.cols,
            rows: a
                .rows
                .iter()
                .zip(&b.rows)
                .map(|(x, y)| x.concat(y))
                .collect(),
        }
    }

    /// `a` on top of `b`.
    #[must_use]
    pub fn vstack(a: &Self, b: &Self) -> Self {
        assert_eq!(a.cols, b.cols, "column count mismatch in vstack");
        let mut rows = a.rows.clone();
        rows.extend(b.rows.iter().cloned());
        Self { cols: a.cols, rows }
    }

    /// Columns `indices` of every row.
    #[must_use]
    pub fn select_columns(&self, indices: &[usize]) -> Self {
        Self {
            cols: indices.len(),
            rows: self.rows.iter().map(|r| r.select(indices)).collect(),
        }
    }

    #[must_use]
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        Self {
            cols: self.cols,
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    #[must_use]
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        echelon_in_place(&mut rows, self.cols, false).len()
    }

    /// Rows spanning `{x : M x = 0}`, one per free column of the RREF.
    #[must_use]
    pub fn nullspace_basis(&self) -> Self {
        let mut rows = self.rows.clone();
        let pivots = echelon_in_place(&mut rows, self.cols, true);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVector::unit(self.cols, f);
            for (i, &p) in pivots.iter().enumerate() {
                if rows[i].get(f) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        Self {
            cols: self.cols,
            rows: basis,
        }
    }

    /// Some `x` with `M x = b`, or `None` when `b` is outside the column space.
    #[must_use]
    pub fn solve(&self, b: &BitVector) -> Option<BitVector> {
        assert_eq!(b.len(), self.nrows(), "right-hand side length mismatch");
        let mut rows: Vec<BitVector> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut a = BitVector::zeros(self.cols + 1);
                for c in r.iter_ones() {
                    a.set(c, true);
                }
                if b.get(i) {
                    a.set(self.cols, true);
                }
                a
            })
            .collect();
        let pivots = echelon_in_place(&mut rows, self.cols + 1, true);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = BitVector::zeros(self.cols);
        for (i, &p) in pivots.iter().enumerate() {
            if rows[i].get(self.cols) {
                x.set(p, true);
            }
        }
        Some(x)
    }

    /// Parses the text format: a `rows cols` header, then one `0`/`1` row per line.
    pub fn parse(text: &str) -> Result<Self, Gf2Error> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Gf2Error::Parse("missing header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| Gf2Error::Parse(format!("bad header {header:?}: {e}")))?;
        let [r, c] = dims[..] else {
            return Err(Gf2Error::Parse(format!("bad header {header:?}")));
        };
        let mut rows = Vec::with_capacity(r);
        for i in 0..r {
            let line = lines
                .next()
                .ok_or_else(|| Gf2Error::Parse(format!("missing row {i}")))?;
            let row = BitVector::parse01(line)?;
            if row.len() != c {
                return Err(Gf2Error::Parse(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            rows.push(row);
        }
        if lines.next().is_some() {
            return Err(Gf2Error::Parse("trailing rows after matrix".into()));
        }
        Ok(Self { cols: c, rows })
    }

    #[must_use]
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.nrows(), self.cols);
        for r in &self.rows {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.nrows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

/// Gaussian elimination over the first `cols` columns. Rows are permuted so the
/// first `rank` rows carry the pivots, which are returned in order. With `full`
/// the pivot columns are also cleared above each pivot (reduced form).
pub(crate) fn echelon_in_place(rows: &mut [BitVector], cols: usize, full: bool) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows.len() {
            break;
        }
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(c)) else {
            continue;
        };
        rows.swap(rank, p);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot = &head[rank];
        let w = c / 64;
        for r in tail.iter_mut() {
            if r.get(c) {
                r.xor_assign_from(pivot, w);
            }
        }
        if full {
            let (above, rest) = rows.split_at_mut(rank);
            for r in above.iter_mut() {
                if r.get(c) {
                    r.xor_assign(&rest[0]);
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    pivots
}

/// Incremental reduced row-echelon basis of a subspace, for span membership tests.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    len: usize,
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl Echelon {
    #[must_use]
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    #[must_use]
    pub fn from_rows<'a>(len: usize, rows: impl IntoIterator<Item = &'a BitVector>) -> Self {
        let mut e = Self::new(len);
        for r in rows {
            e.insert(r);
        }
        e
    }

    #[must_use]
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    #[must_use]
    pub fn basis(&self) -> &[BitVector] {
        &self.rows
    }

    /// Residual of `v` after clearing every pivot coordinate.
    #[must_use]
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.len, "length mismatch");
        let mut v = v.clone();
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(r);
            }
        }
        v
    }

    #[must_use]
    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        let v = self.reduce(v);
        let Some(p) = v.first_one() else {
            return false;
        };
        for r in &mut self.rows {
            if r.get(p) {
                r.xor_assign(&v);
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::zeros(3, 3).rank(), 0);
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        assert_eq!(BitMatrix::from_strs(&["110", "011", "101"]).rank(), 2);
    }

    #[test]
    fn nullspace_of_parity_pair() {
        let m = BitMatrix::from_strs(&["110", "011"]);
        let ns = m.nullspace_basis();
        assert_eq!(ns.nrows(), 1);
        assert_eq!(ns.row(0).to_string(), "111");
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = BitMatrix::from_strs(&["110", "011"]);
        let x = m.solve(&BitVector::parse01("10").unwrap()).unwrap();
        assert_eq!(m.mul_vec(&x).to_string(), "10");
        let m = BitMatrix::from_strs(&["11", "11"]);
        assert!(m.solve(&BitVector::parse01("10").unwrap()).is_none());
    }

    #[test]
    fn kron_and_mul() {
        let a = BitMatrix::from_strs(&["11"]);
        let i = BitMatrix::identity(2);
        let k = BitMatrix::kron(&a, &i);
        assert_eq!(k.row(0).to_string(), "1010");
        assert_eq!(k.row(1).to_string(), "0101");
        let p = a.mul(&a.transpose());
        assert!(p.is_zero());
    }

    #[test]
    fn text_round_trip() {
        let m = BitMatrix::from_strs(&["101", "010"]);
        let t = m.to_text();
        assert_eq!(t, "2 3\n101\n010\n");
        assert_eq!(BitMatrix::parse(&t).unwrap(), m);
        assert!(BitMatrix::parse("2 3\n101\n").is_err());
        assert!(BitMatrix::parse("1 3\n1011\n").is_err());
    }

    #[test]
    fn echelon_membership() {
        let mut e = Echelon::new(4);
        assert!(e.insert(&BitVector::parse01("1100").unwrap()));
        assert!(e.insert(&BitVector::parse01("0110").unwrap()));
        assert!(!e.insert(&BitVector::parse01("1010").unwrap()));
        assert!(e.contains(&BitVector::parse01("1010").unwrap()));
        assert!(!e.contains(&BitVector::parse01("0001").unwrap()));
    }
}
