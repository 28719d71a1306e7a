//! Dense GF(2) matrices packed into 64-bit words.

use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let w = &mut self.data[r * self.stride + c / 64];
        if value {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn xor_rows(&mut self, src: usize, dst: usize) {
        for w in 0..self.stride {
            let v = self.data[src * self.stride + w];
            self.data[dst * self.stride + w] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// `M v` for a packed vector `v` of `cols` bits.
    pub fn mul_packed(&self, v: &[u64]) -> Vec<bool> {
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Parity of the bitwise AND of two packed vectors.
pub fn dot(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum::<u32>() % 2 == 1
}

pub fn pack(bits: impl IntoIterator<Item = bool>, len: usize) -> Vec<u64> {
    let mut out = vec![0u64; len.div_ceil(64)];
    for (i, b) in bits.into_iter().enumerate() {
        if b {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

/// Reduced row echelon form with pivots chosen left to right.
#[derive(Debug, Clone)]
pub struct Echelon {
    /// Nonzero rows of the reduced matrix.
    pub reduced: BitMatrix,
    /// Pivot column of each reduced row, increasing.
    pub pivot_cols: Vec<usize>,
    /// Columns without a pivot, increasing.
    pub free_cols: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }
}

pub fn rref(m: &BitMatrix) -> Echelon {
    let mut a = m.clone();
    let mut pivot_cols = Vec::new();
    let mut free_cols = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        let Some(p) = (row..a.rows).find(|&r| a.get(r, col)) else {
            free_cols.push(col);
            continue;
        };
        a.swap_rows(p, row);
        for r in 0..a.rows {
            if r != row && a.get(r, col) {
                a.xor_rows(row, r);
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let mut reduced = BitMatrix::zeros(row, a.cols);
    reduced.data.copy_from_slice(&a.data[..row * a.stride]);
    Echelon { reduced, pivot_cols, free_cols }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&str]) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows.len(), rows[0].len());
        for (r, s) in rows.iter().enumerate() {
            for (c, ch) in s.chars().enumerate() {
                m.set(r, c, ch == '1');
            }
        }
        m
    }

    #[test]
    fn rank_and_pivots() {
        let m = from_rows(&["1100", "0110", "1010"]);
        let e = rref(&m);
        assert_eq!(e.rank(), 2);
        assert_eq!(e.pivot_cols, vec![0, 1]);
        assert_eq!(e.free_cols, vec![2, 3]);
        assert!(e.reduced.get(0, 2) && e.reduced.get(1, 2));
    }

    #[test]
    fn wide_matrices_cross_word_boundaries() {
        let mut m = BitMatrix::zeros(2, 130);
        m.set(0, 0, true);
        m.set(0, 129, true);
        m.set(1, 64, true);
        m.set(1, 129, true);
        let e = rref(&m);
        assert_eq!(e.pivot_cols, vec![0, 64]);
        let v = pack((0..130).map(|c| c == 129), 130);
        assert_eq!(m.mul_packed(&v), vec![true, true]);
    }
}
