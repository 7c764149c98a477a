//! Bit-packed GF(2) matrices with rank by Gaussian elimination.

#[derive(Debug, Clone, PartialEq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        Gf2Matrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.words + c / 64];
        if bit {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn xor_into_row(&mut self, r: usize, other: &Gf2Matrix, other_r: usize) {
        debug_assert_eq!(self.words, other.words);
        for w in 0..self.words {
            self.data[r * self.words + w] ^= other.data[other_r * self.words + w];
        }
    }

    /// Stack matrices with identical column counts.
    pub fn vstack(parts: &[&Gf2Matrix]) -> Gf2Matrix {
        assert!(!parts.is_empty());
        let cols = parts[0].cols;
        assert!(parts.iter().all(|p| p.cols == cols));
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = Gf2Matrix::zeros(rows, cols);
        let mut r0 = 0;
        for p in parts {
            for r in 0..p.rows {
                for w in 0..p.words {
                    out.data[(r0 + r) * out.words + w] = p.data[r * p.words + w];
                }
            }
            r0 += p.rows;
        }
        out
    }

    /// Keep only the listed columns (in the given order).
    pub fn select_columns(&self, cols: &[usize]) -> Gf2Matrix {
        let mut out = Gf2Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(r, j, true);
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut pivot_row = 0;
        for c in 0..m.cols {
            let word = c / 64;
            let mask = 1u64 << (c % 64);
            let mut sel = None;
            for r in pivot_row..m.rows {
                if m.data[r * m.words + word] & mask != 0 {
                    sel = Some(r);
                    break;
                }
            }
            let Some(sel) = sel else { continue };
            m.data.swap_chunks(sel, pivot_row, m.words);
            for r in (pivot_row + 1)..m.rows {
                if m.data[r * m.words + word] & mask != 0 {
                    for w in 0..m.words {
                        let v = m.data[pivot_row * m.words + w];
                        m.data[r * m.words + w] ^= v;
                    }
                }
            }
            rank += 1;
            pivot_row += 1;
            if pivot_row == m.rows {
                break;
            }
        }
        rank
    }

    /// Multiply the row-vector `input` (bit i = input[i]) by self transposed:
    /// output bit r = parity(row r & input). Used to evaluate linear maps.
    pub fn apply(&self, input: &[u64]) -> u64 {
        debug_assert!(self.rows <= 64);
        debug_assert!(input.len() >= self.words);
        let mut out = 0u64;
        for r in 0..self.rows {
            let row = &self.data[r * self.words..(r + 1) * self.words];
            let acc = row.iter().zip(input).fold(0u64, |a, (x, y)| a ^ (x & y));
            if acc.count_ones() & 1 == 1 {
                out |= 1 << r;
            }
        }
        out
    }
}

trait SwapChunks {
    fn swap_chunks(&mut self, a: usize, b: usize, len: usize);
}

impl SwapChunks for Vec<u64> {
    fn swap_chunks(&mut self, a: usize, b: usize, len: usize) {
        if a == b {
            return;
        }
        for w in 0..len {
            self.swap(a * len + w, b * len + w);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_known_matrix() {
        // rows: 0010 / 1100 / 0010 -> rank 2
        let mut m = Gf2Matrix::zeros(3, 4);
        m.set(0, 2, true);
        m.set(1, 0, true);
        m.set(1, 1, true);
        m.set(2, 2, true);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rank_of_identity() {
        let mut m = Gf2Matrix::zeros(70, 70);
        for i in 0..70 {
            m.set(i, i, true);
        }
        assert_eq!(m.rank(), 70);
    }

    #[test]
    fn apply_computes_parities() {
        let mut m = Gf2Matrix::zeros(2, 3);
        // row 0: x0 ^ x2, row 1: x1
        m.set(0, 0, true);
        m.set(0, 2, true);
        m.set(1, 1, true);
        assert_eq!(m.apply(&[0b101]), 0b00);
        assert_eq!(m.apply(&[0b100]), 0b01);
        assert_eq!(m.apply(&[0b010]), 0b10);
    }
}
