use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixParseError {
    #[error("missing `rows cols` line")]
    MissingDimensions,
    #[error("line {line}: malformed hex row")]
    MalformedRow { line: usize },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
}

/// Dense matrix over F2 with rows packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl std::fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: String = (0..self.cols).map(|c| if self.get(r, c) { '1' } else { '0' }).collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        Self { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// From 0/1 rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, v & 1 == 1);
            }
        }
        m
    }

    /// From sparse columns listing the row indices that hold a 1.
    pub fn from_columns(rows: usize, columns: &[Vec<usize>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            for &r in col {
                m.toggle(r, c);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.stride + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    #[inline]
    pub fn toggle(&mut self, r: usize, c: usize) {
        self.data[r * self.stride + c / 64] ^= 1 << (c % 64);
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn column(&self, c: usize) -> Vec<bool> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn column_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for (j, &c) in cols.iter().enumerate() {
            for r in 0..self.rows {
                if self.get(r, c) {
                    m.set(r, j, true);
                }
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            m.data[i * m.stride..(i + 1) * m.stride].copy_from_slice(self.row_words(r));
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[bool]) -> Vec<bool> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|r| x.iter().enumerate().filter(|&(c, &b)| b && self.get(r, c)).count() % 2 == 1).collect()
    }

    pub fn mul(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = F2Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    for w in 0..out.stride {
                        out.data[r * out.stride + w] ^= other.data[k * other.stride + w];
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    #[inline]
    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..src * s + s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s] as &[u64], &mut lo[dst * s..dst * s + s])
        };
        for (d, &x) in b.iter_mut().zip(a) {
            *d ^= x;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for w in 0..self.stride {
                self.data.swap(a * self.stride + w, b * self.stride + w);
            }
        }
    }

    /// Reduced row echelon form in place, scanning columns left to right and
    /// taking the first row with a 1 as pivot. Returns pivot columns.
    fn rref_in_place(&mut self, upto_cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..upto_cols {
            if prow == self.rows {
                break;
            }
            let Some(r) = (prow..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(prow, r);
            for other in 0..self.rows {
                if other != prow && self.get(other, c) {
                    self.xor_row_into(prow, other);
                }
            }
            pivots.push(c);
            prow += 1;
        }
        pivots
    }

    /// Rank by forward elimination; `self` is untouched.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut prow = 0;
        for c in 0..m.cols {
            if prow == m.rows {
                break;
            }
            let Some(r) = (prow..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(prow, r);
            for below in prow + 1..m.rows {
                if m.get(below, c) {
                    m.xor_row_into(prow, below);
                }
            }
            prow += 1;
        }
        prow
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// A solution of `self · x = b`, with every free variable set to 0.
    pub fn solve(&self, b: &[bool]) -> Option<Vec<bool>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = F2Matrix::zeros(self.rows, self.cols + 1);
        for (r, &br) in b.iter().enumerate() {
            for c in 0..self.cols {
                if self.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            aug.set(r, self.cols, br);
        }
        let pivots = aug.rref_in_place(self.cols);
        if (pivots.len()..aug.rows).any(|r| aug.get(r, self.cols)) {
            return None;
        }
        let mut x = vec![false; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols);
        }
        Some(x)
    }

    /// A basis of the null space, one vector per free column.
    pub fn null_space(&self) -> Vec<Vec<bool>> {
        let mut m = self.clone();
        let pivots = m.rref_in_place(self.cols);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![false; self.cols];
                x[f] = true;
                for (r, &p) in pivots.iter().enumerate() {
                    x[p] = m.get(r, f);
                }
                x
            })
            .collect()
    }

    /// `rows cols` on the first line, then one hex string per row. Column `c`
    /// is bit `c` of the row read as a little-endian big integer.
    pub fn to_hex_dump(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        let digits = self.cols.div_ceil(4).max(1);
        for r in 0..self.rows {
            let mut row = String::with_capacity(digits);
            for d in (0..digits).rev() {
                let nibble = (0..4).fold(0u8, |acc, i| {
                    let c = d * 4 + i;
                    acc | (u8::from(c < self.cols && self.get(r, c)) << i)
                });
                write!(row, "{nibble:x}").expect("writing to a String");
            }
            out.push_str(&row);
            out.push('\n');
        }
        out
    }

    pub fn from_hex_dump(text: &str) -> Result<Self, MatrixParseError> {
        let mut lines = text.lines();
        let dims = lines.next().ok_or(MatrixParseError::MissingDimensions)?;
        let parts: Vec<usize> = dims
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| MatrixParseError::MissingDimensions)?;
        let [rows, cols] = parts[..] else {
            return Err(MatrixParseError::MissingDimensions);
        };
        let mut m = Self::zeros(rows, cols);
        let mut found = 0;
        for (i, line) in lines.enumerate() {
            if found == rows {
                return Err(MatrixParseError::RowCount { expected: rows, found: found + 1 });
            }
            let digits: Vec<u32> = line
                .trim()
                .chars()
                .map(|ch| ch.to_digit(16))
                .collect::<Option<_>>()
                .ok_or(MatrixParseError::MalformedRow { line: i + 2 })?;
            for (d, &v) in digits.iter().rev().enumerate() {
                for b in 0..4 {
                    if v >> b & 1 == 1 {
                        let c = d * 4 + b;
                        if c >= cols {
                            return Err(MatrixParseError::MalformedRow { line: i + 2 });
                        }
                        m.set(found, c, true);
                    }
                }
            }
            found += 1;
        }
        if found != rows {
            return Err(MatrixParseError::RowCount { expected: rows, found });
        }
        Ok(m)
    }

    /// True iff `other` equals `self` after some permutation of rows and of
    /// columns. Brute force over column permutations; meant for small blocks.
    pub fn equal_up_to_permutation(&self, other: &F2Matrix) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        assert!(self.cols <= 8, "permutation search is limited to 8 columns");
        let mut perm: Vec<usize> = (0..self.cols).collect();
        let mut target: Vec<Vec<bool>> =
            (0..other.rows).map(|r| (0..other.cols).map(|c| other.get(r, c)).collect()).collect();
        target.sort();
        loop {
            let mut rows: Vec<Vec<bool>> =
                (0..self.rows).map(|r| perm.iter().map(|&c| self.get(r, c)).collect()).collect();
            rows.sort();
            if rows == target {
                return true;
            }
            if !next_permutation(&mut perm) {
                return false;
            }
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let Some(i) = (0..p.len() - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}
