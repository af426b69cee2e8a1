use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use super::Gf2Error;

/// Packed GF(2) vector. Bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

#[inline]
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitVector {
    #[must_use]
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    #[must_use]
    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_padding();
        v
    }

    /// Unit vector with a single one at `i`.
    #[must_use]
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    #[must_use]
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// # Panics
    /// If an index is out of range.
    #[must_use]
    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
            v.flip(i);
        }
        v
    }

    /// Low `len` bits of `value`, bit 0 first.
    ///
    /// # Panics
    /// If `len > 64`.
    #[must_use]
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= 64, "from_u64 takes at most 64 bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.clear_padding();
        }
        v
    }

    /// Parses a string of `0`/`1` characters, index 0 leftmost.
    pub fn parse01(s: &str) -> Result<Self, Gf2Error> {
        let s = s.trim();
        let mut v = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(Gf2Error::Parse(format!(
                        "unexpected character {other:?} in bit string"
                    )))
                }
            }
        }
        Ok(v)
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.len
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[must_use]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// First word, for vectors of length at most 64.
    #[must_use]
    pub fn to_u64(&self) -> u64 {
        debug_assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    fn clear_padding(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    #[inline]
    #[must_use]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    #[must_use]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Standard inner product over GF(2).
    #[must_use]
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones() & 1;
        }
        acc == 1
    }

    /// Weight of the intersection of supports.
    #[must_use]
    pub fn and_weight(&self, other: &Self) -> usize {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Hamming distance.
    #[must_use]
    pub fn distance(&self, other: &Self) -> usize {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// XOR restricted to words `from..`; callers guarantee earlier words of `other` are zero.
    #[inline]
    pub(crate) fn xor_assign_from(&mut self, other: &Self, from: usize) {
        for (a, b) in self.words[from..].iter_mut().zip(&other.words[from..]) {
            *a ^= b;
        }
    }

    #[must_use]
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }

    #[must_use]
    pub fn support(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    /// `self` followed by `other`.
    #[must_use]
    pub fn concat(&self, other: &Self) -> Self {
        let mut v = Self::zeros(self.len + other.len);
        for i in self.iter_ones() {
            v.set(i, true);
        }
        for i in other.iter_ones() {
            v.set(self.len + i, true);
        }
        v
    }

    /// Coordinates `indices[j]` of `self`, as a vector of length `indices.len()`.
    #[must_use]
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut v = Self::zeros(indices.len());
        for (j, &i) in indices.iter().enumerate() {
            if self.get(i) {
                v.set(j, true);
            }
        }
        v
    }

    /// Places `self` into a vector of length `len` at positions `indices`.
    #[must_use]
    pub fn scatter(&self, len: usize, indices: &[usize]) -> Self {
        assert_eq!(indices.len(), self.len, "index map length mismatch");
        let mut v = Self::zeros(len);
        for j in self.iter_ones() {
            v.set(indices[j], true);
        }
        v
    }

    #[must_use]
    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        self.xor_assign(rhs);
    }
}

impl BitXor for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(rhs);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padding_stays_zero() {
        let v = BitVector::ones(70);
        assert_eq!(v.weight(), 70);
        assert_eq!(v.words()[1], (1 << 6) - 1);
        let w = BitVector::from_u64(3, 0xff);
        assert_eq!(w.weight(), 3);
    }

    #[test]
    fn parse_and_display_round_trip() {
        let v = BitVector::parse01("0110001").unwrap();
        assert_eq!(v.support(), vec![1, 2, 6]);
        assert_eq!(v.to_string(), "0110001");
        assert!(BitVector::parse01("01x").is_err());
    }

    #[test]
    fn dot_and_distance() {
        let a = BitVector::parse01("1101").unwrap();
        let b = BitVector::parse01("1011").unwrap();
        assert!(!a.dot(&b));
        assert_eq!(a.distance(&b), 2);
        assert_eq!((&a ^ &b).to_string(), "0110");
    }

    #[test]
    fn select_scatter() {
        let a = BitVector::parse01("10110").unwrap();
        let s = a.select(&[0, 2, 4]);
        assert_eq!(s.to_string(), "110");
        assert_eq!(s.scatter(5, &[0, 2, 4]).to_string(), "10100");
    }
}
