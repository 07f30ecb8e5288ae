//! Column reduction for sparse F2 matrices, used where the dense kernel would
//! not fit. Columns are sorted row-index lists; the pivot of a column is its
//! largest row index.

pub type Column = Vec<u32>;

/// Symmetric difference of two sorted columns.
pub fn xor_into(acc: &mut Column, other: &[u32]) {
    let mut out = Vec::with_capacity(acc.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < acc.len() && j < other.len() {
        match acc[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                out.push(acc[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&acc[i..]);
    out.extend_from_slice(&other[j..]);
    *acc = out;
}

/// Result of reducing `D` column by column into `R = D V`.
#[derive(Debug, Clone)]
pub struct Reduction {
    reduced: Vec<Column>,
    combos: Option<Vec<Column>>,
    pivot_col: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl Reduction {
    /// Reduces `columns` left to right. Columns flagged in `skip` are known to
    /// lie in the span of earlier columns and are zeroed without work.
    /// `track` keeps the combination matrix `V` for solving.
    pub fn new(rows: usize, columns: Vec<Column>, skip: Option<&[bool]>, track: bool) -> Self {
        let mut pivot_col = vec![NONE; rows];
        let mut reduced: Vec<Column> = Vec::with_capacity(columns.len());
        let mut combos: Option<Vec<Column>> = track.then(|| Vec::with_capacity(columns.len()));
        for (j, mut col) in columns.into_iter().enumerate() {
            let mut combo: Column = if track { vec![j as u32] } else { Vec::new() };
            if skip.is_some_and(|s| s[j]) && !track {
                col.clear();
            }
            while let Some(&low) = col.last() {
                let p = pivot_col[low as usize];
                if p == NONE {
                    pivot_col[low as usize] = j as u32;
                    break;
                }
                xor_into(&mut col, &reduced[p as usize]);
                if let Some(c) = combos.as_ref() {
                    xor_into(&mut combo, &c[p as usize]);
                }
            }
            reduced.push(col);
            if let Some(c) = combos.as_mut() {
                c.push(combo);
            }
        }
        Self { reduced, combos, pivot_col }
    }

    pub fn rank(&self) -> usize {
        self.reduced.iter().filter(|c| !c.is_empty()).count()
    }

    /// Row indices that are pivots of some reduced column.
    pub fn pivot_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_col.iter().enumerate().filter(|(_, &c)| c != NONE).map(|(r, _)| r)
    }

    pub fn is_zero_column(&self, j: usize) -> bool {
        self.reduced[j].is_empty()
    }

    /// Basis of the kernel: `(j, v)` for each column `j` that reduced to
    /// zero, with `v` the combination of columns `<= j` that produced it.
    /// Requires `V` to have been tracked.
    pub fn kernel_basis(&self) -> Vec<(usize, Column)> {
        let combos = self.combos.as_ref().expect("kernel basis needs tracked combinations");
        self.reduced
            .iter()
            .zip(combos)
            .enumerate()
            .filter(|(_, (r, _))| r.is_empty())
            .map(|(j, (_, c))| (j, c.clone()))
            .collect()
    }

    /// Reduces `v` against the pivots. Returns the residue and, when `V` was
    /// tracked, the original columns whose sum equals `v - residue`.
    pub fn reduce_vector(&self, mut v: Column) -> (Column, Option<Column>) {
        let mut combo = self.combos.as_ref().map(|_| Vec::new());
        while let Some(&low) = v.last() {
            let p = self.pivot_col[low as usize];
            if p == NONE {
                break;
            }
            xor_into(&mut v, &self.reduced[p as usize]);
            if let (Some(acc), Some(c)) = (combo.as_mut(), self.combos.as_ref()) {
                xor_into(acc, &c[p as usize]);
            }
        }
        (v, combo)
    }
}
