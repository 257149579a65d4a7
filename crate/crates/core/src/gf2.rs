//! Packed GF(2) vectors and incremental Gaussian elimination.

use std::fmt;

const WORD: usize = 64;

/// A fixed-length vector over GF(2), packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Packed words, little-endian bit order; bits past `len` are zero.
    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len, "bit {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn or(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    /// Parity of the bitwise AND, i.e. the GF(2) dot product.
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * WORD + t)
                }
            })
        })
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    /// Concatenation `self || other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Bits `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        let mut out = BitVec::zeros(len);
        for i in self.iter_ones().filter(|&i| i >= start && i < start + len) {
            out.set(i - start, true);
        }
        out
    }

    /// Lexicographic comparison of the sorted index lists of two sets.
    pub fn cmp_as_index_sets(&self, other: &BitVec) -> std::cmp::Ordering {
        self.iter_ones().cmp(other.iter_ones())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Transposes a list of equal-width rows.
pub fn transpose(rows: &[BitVec], width: usize) -> Vec<BitVec> {
    let mut cols = vec![BitVec::zeros(rows.len()); width];
    for (r, row) in rows.iter().enumerate() {
        for c in row.iter_ones() {
            cols[c].set(r, true);
        }
    }
    cols
}

/// Reduced row echelon form built incrementally, remembering for every
/// pivot row which source rows it is the sum of.
#[derive(Clone, Debug)]
pub struct Echelon {
    width: usize,
    sources: usize,
    rows: Vec<BitVec>,
    combos: Vec<BitVec>,
    pivots: Vec<usize>,
    dependencies: Vec<BitVec>,
}

impl Echelon {
    pub fn new(rows: &[BitVec], width: usize) -> Self {
        let mut ech = Echelon {
            width,
            sources: rows.len(),
            rows: Vec::new(),
            combos: Vec::new(),
            pivots: Vec::new(),
            dependencies: Vec::new(),
        };
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), width, "row {i} has width {} != {width}", row.len());
            ech.insert(row.clone(), BitVec::from_indices(rows.len(), [i]));
        }
        ech
    }

    fn insert(&mut self, mut row: BitVec, mut combo: BitVec) {
        for (k, &p) in self.pivots.iter().enumerate() {
            if row.get(p) {
                row.xor_assign(&self.rows[k]);
                combo.xor_assign(&self.combos[k]);
            }
        }
        match row.first_one() {
            None => self.dependencies.push(combo),
            Some(p) => {
                for k in 0..self.rows.len() {
                    if self.rows[k].get(p) {
                        let (r, c) = (row.clone(), combo.clone());
                        self.rows[k].xor_assign(&r);
                        self.combos[k].xor_assign(&c);
                    }
                }
                self.rows.push(row);
                self.combos.push(combo);
                self.pivots.push(p);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Reduced rows, in insertion order of their pivots.
    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Residual of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for (k, &p) in self.pivots.iter().enumerate() {
            if v.get(p) {
                v.xor_assign(&self.rows[k]);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Source-row combination summing to `v`, if `v` is in the row space.
    pub fn express(&self, v: &BitVec) -> Option<BitVec> {
        let mut v = v.clone();
        let mut combo = BitVec::zeros(self.sources);
        for (k, &p) in self.pivots.iter().enumerate() {
            if v.get(p) {
                v.xor_assign(&self.rows[k]);
                combo.xor_assign(&self.combos[k]);
            }
        }
        v.is_zero().then_some(combo)
    }

    /// Basis of the source-row combinations that sum to zero.
    pub fn dependencies(&self) -> &[BitVec] {
        &self.dependencies
    }
}

/// Rank of a set of rows.
pub fn rank(rows: &[BitVec], width: usize) -> usize {
    Echelon::new(rows, width).rank()
}

/// Basis of `{x : M x = 0}` where `rows` are the rows of `M`.
pub fn kernel(rows: &[BitVec], width: usize) -> Vec<BitVec> {
    Echelon::new(&transpose(rows, width), rows.len())
        .dependencies()
        .to_vec()
}

/// Some `x` with `M x = b`, if one exists.
pub fn solve(rows: &[BitVec], width: usize, b: &BitVec) -> Option<BitVec> {
    assert_eq!(b.len(), rows.len());
    Echelon::new(&transpose(rows, width), rows.len()).express(b)
}
