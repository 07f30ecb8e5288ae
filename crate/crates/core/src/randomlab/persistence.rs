use std::collections::HashMap;

use serde::Serialize;

use super::RandomLabError;
use crate::homology::sparse::{Column, Reduction};

pub const MAX_VR_POINTS: usize = 200;
pub const MAX_VR_DIM: usize = 2;
/// Simplices allowed in the filtration at the largest scale.
pub const MAX_VR_SIMPLICES: usize = 2_000_000;
pub const DEFAULT_EPS_GRID: [f64; 4] = [1.0, 2.0, 3.0, 4.0];

/// Persistence intervals of one homology degree. A `None` death means the
/// class is alive at the last scale of the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Barcode {
    pub dim: usize,
    pub intervals: Vec<(f64, Option<f64>)>,
}

/// `3 ln n / n`, a log-scale radius for samples from the n-cube.
pub fn eps_preset_log(n: usize) -> f64 {
    3.0 * (n as f64).ln() / n as f64
}

struct Filtration {
    /// Per dimension, simplices sorted by (value, vertex list).
    simplices: Vec<Vec<(u32, Vec<u32>)>>,
}

impl Filtration {
    fn build(points: &[u64], top: usize, eps_max: f64) -> Result<Self, RandomLabError> {
        let p = points.len();
        let dist = |a: usize, b: usize| (points[a] ^ points[b]).count_ones();
        let within = |a: usize, b: usize| dist(a, b) as f64 <= eps_max;
        let nbrs: Vec<Vec<u32>> =
            (0..p).map(|a| (a + 1..p).filter(|&b| within(a, b)).map(|b| b as u32).collect()).collect();
        let mut simplices: Vec<Vec<(u32, Vec<u32>)>> = vec![Vec::new(); top + 1];
        let mut total = 0usize;
        let mut stack: Vec<(Vec<u32>, u32, Vec<u32>)> =
            (0..p as u32).map(|v| (vec![v], 0, nbrs[v as usize].clone())).collect();
        while let Some((verts, value, cands)) = stack.pop() {
            let d = verts.len() - 1;
            total += 1;
            if total > MAX_VR_SIMPLICES {
                return Err(RandomLabError::CapExceeded { what: "simplices", found: total, limit: MAX_VR_SIMPLICES });
            }
            if d < top {
                for (i, &c) in cands.iter().enumerate() {
                    let v = verts.iter().map(|&u| dist(u as usize, c as usize)).max().unwrap_or(0).max(value);
                    let rest: Vec<u32> =
                        cands[i + 1..].iter().copied().filter(|&w| within(c as usize, w as usize)).collect();
                    let mut next = verts.clone();
                    next.push(c);
                    stack.push((next, v, rest));
                }
            }
            simplices[d].push((value, verts));
        }
        for level in &mut simplices {
            level.sort_unstable();
        }
        Ok(Self { simplices })
    }

    /// Number of d-simplices with value at most `eps`.
    fn prefix(&self, d: usize, eps: f64) -> usize {
        self.simplices[d].partition_point(|(v, _)| *v as f64 <= eps)
    }

    /// Boundary columns of the d-simplices, rows indexed by (d-1)-simplex order.
    fn boundary(&self, d: usize) -> Vec<Column> {
        let index: HashMap<&[u32], u32> =
            self.simplices[d - 1].iter().enumerate().map(|(i, (_, s))| (s.as_slice(), i as u32)).collect();
        self.simplices[d]
            .iter()
            .map(|(_, s)| {
                let mut col: Column = (0..s.len())
                    .map(|skip| {
                        let facet: Vec<u32> =
                            s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                        index[facet.as_slice()]
                    })
                    .collect();
                col.sort_unstable();
                col
            })
            .collect()
    }
}

/// Vietoris–Rips barcodes under Hamming distance for degrees `0..=max_dim`.
///
/// Duplicate points are merged. For every pair of scales `i <= j` the
/// persistent Betti number `β^{i,j} = rank[B_j | Z_i] - rank B_j` is computed
/// by rank, and interval multiplicities follow by inclusion–exclusion.
/// Births and deaths are grid values.
pub fn vr_persistence(points: &[u64], eps_grid: &[f64], max_dim: usize) -> Result<Vec<Barcode>, RandomLabError> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() > MAX_VR_POINTS {
        return Err(RandomLabError::CapExceeded { what: "points", found: pts.len(), limit: MAX_VR_POINTS });
    }
    if max_dim > MAX_VR_DIM {
        return Err(RandomLabError::CapExceeded { what: "max_dim", found: max_dim, limit: MAX_VR_DIM });
    }
    if eps_grid.is_empty() || eps_grid.windows(2).any(|w| w[0] >= w[1]) || eps_grid[0] < 0.0 {
        return Err(RandomLabError::InvalidRange("eps grid must be nonempty, nonnegative and increasing".into()));
    }
    let last = eps_grid.len() - 1;
    let filt = Filtration::build(&pts, max_dim + 1, eps_grid[last])?;
    let counts: Vec<Vec<usize>> =
        (0..=max_dim + 1).map(|d| eps_grid.iter().map(|&e| filt.prefix(d, e)).collect()).collect();
    let mut out = Vec::with_capacity(max_dim + 1);
    for d in 0..=max_dim {
        let rows = filt.simplices[d].len();
        // Cycle basis in filtration order, tagged with the column that closed it.
        let cycles: Vec<(usize, Column)> = if d == 0 {
            (0..rows).map(|j| (j, vec![j as u32])).collect()
        } else {
            Reduction::new(filt.simplices[d - 1].len(), filt.boundary(d), None, true).kernel_basis()
        };
        let z_count: Vec<usize> = counts[d].iter().map(|&c| cycles.partition_point(|(j, _)| *j < c)).collect();
        let up = filt.boundary(d + 1);
        // pb[i][j] = β^{i,j} for i <= j.
        let mut pb = vec![vec![0usize; eps_grid.len()]; eps_grid.len()];
        for j in 0..eps_grid.len() {
            let b: Vec<Column> = up[..counts[d + 1][j]].to_vec();
            let nb = b.len();
            let mut cols = b;
            cols.extend(cycles[..z_count[j]].iter().map(|(_, c)| c.clone()));
            let red = Reduction::new(rows, cols, None, false);
            let mut independent = 0;
            let mut z_seen = 0;
            for i in 0..=j {
                while z_seen < z_count[i] {
                    if !red.is_zero_column(nb + z_seen) {
                        independent += 1;
                    }
                    z_seen += 1;
                }
                pb[i][j] = independent;
            }
        }
        let beta = |i: isize, j: usize| if i < 0 { 0 } else { pb[i as usize][j] as isize };
        let mut intervals = Vec::new();
        for i in 0..eps_grid.len() {
            let ii = i as isize;
            for j in i + 1..eps_grid.len() {
                let mu = beta(ii, j - 1) - beta(ii, j) - beta(ii - 1, j - 1) + beta(ii - 1, j);
                intervals.extend(std::iter::repeat_n((eps_grid[i], Some(eps_grid[j])), mu.max(0) as usize));
            }
            let alive = beta(ii, last) - beta(ii - 1, last);
            intervals.extend(std::iter::repeat_n((eps_grid[i], None), alive.max(0) as usize));
        }
        out.push(Barcode { dim: d, intervals });
    }
    Ok(out)
}
