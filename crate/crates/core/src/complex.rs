//! Satisfying-assignment enumeration and the cubical solution complex.
//!
//! Assignments are packed into `u64` words (variable `i` in bit `i - 1`). A
//! face is stored as a pair of masks: `free` marks the varying coordinates and
//! `base` holds the fixed bits, with every free bit cleared.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::formula::{word_to_bitstring, Assignment, CnfFormula};

pub const DEFAULT_CAP: usize = 26;

/// Separations are only computed for cluster pairs with `|Ci| * |Cj|` at or
/// below this many distance evaluations.
pub const SEPARATION_PAIR_LIMIT: usize = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("{n} variables exceeds the enumeration cap of {cap}")]
    DimensionCapExceeded { n: usize, cap: usize },
    #[error("coordinate {coord} out of range for dimension {n}")]
    CoordOutOfRange { coord: usize, n: usize },
    #[error("max_dim {max_dim} exceeds ambient dimension {n}")]
    MaxDimExceedsAmbient { max_dim: usize, n: usize },
    #[error("complex has no 1-skeleton")]
    MissingOneSkeleton,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SolutionSet {
    n: usize,
    members: Vec<u64>,
}

impl SolutionSet {
    /// Sorts and deduplicates `members`. Bits at or above `n` must be clear.
    pub fn new(n: usize, mut members: Vec<u64>) -> Self {
        assert!(n <= 64);
        debug_assert!(n == 64 || members.iter().all(|&w| w >> n == 0));
        members.sort_unstable();
        members.dedup();
        Self { n, members }
    }

    pub fn full(n: usize) -> Self {
        assert!(n < 64);
        Self { n, members: (0..1u64 << n).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Members in ascending word order.
    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, word: u64) -> bool {
        self.members.binary_search(&word).is_ok()
    }

    pub fn assignments(&self) -> Vec<Assignment> {
        self.members.iter().map(|&w| Assignment::from_word(self.n, w)).collect()
    }

    pub fn bitstrings(&self) -> Vec<String> {
        self.members.iter().map(|&w| word_to_bitstring(self.n, w)).collect()
    }
}

/// All satisfying assignments in ascending word order.
///
/// Backtracks from the highest variable down, checking each clause as soon as
/// its lowest variable is assigned.
pub fn enumerate_solutions(f: &CnfFormula, cap: usize) -> Result<SolutionSet, ComplexError> {
    let n = f.num_vars();
    if n > cap || n >= 64 {
        return Err(ComplexError::DimensionCapExceeded { n, cap: cap.min(63) });
    }
    let compiled = f.compile();
    let mut buckets: Vec<Vec<(u64, u64)>> = vec![Vec::new(); n + 1];
    for (p, q) in compiled.clause_masks() {
        buckets[(p | q).trailing_zeros() as usize].push((p, q));
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(0);
    } else {
        descend(n - 1, 0, &buckets, &mut out);
    }
    Ok(SolutionSet { n, members: out })
}

fn descend(bit: usize, x: u64, buckets: &[Vec<(u64, u64)>], out: &mut Vec<u64>) {
    for value in [0u64, 1] {
        let y = x | (value << bit);
        if buckets[bit].iter().any(|&(p, q)| y & p == 0 && !y & q == 0) {
            continue;
        }
        if bit == 0 {
            out.push(y);
        } else {
            descend(bit - 1, y, buckets, out);
        }
    }
}

/// Projection onto `coords` (1-based); output coordinate `j` is `coords[j-1]`.
pub fn restrict_to_coords(s: &SolutionSet, coords: &[usize]) -> Result<SolutionSet, ComplexError> {
    if let Some(&c) = coords.iter().find(|&&c| c == 0 || c > s.n) {
        return Err(ComplexError::CoordOutOfRange { coord: c, n: s.n });
    }
    let words = s
        .members
        .iter()
        .map(|&w| coords.iter().enumerate().fold(0u64, |acc, (j, &c)| acc | (((w >> (c - 1)) & 1) << j)))
        .collect();
    Ok(SolutionSet::new(coords.len(), words))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Face {
    pub free: u64,
    pub base: u64,
}

impl Face {
    pub fn vertex(word: u64) -> Self {
        Self { free: 0, base: word }
    }

    /// Builds a face from 1-based free coordinates; free bits of `base` are cleared.
    pub fn from_coords(free_coords: &[usize], base: u64) -> Self {
        let free = free_coords.iter().fold(0u64, |m, &c| m | 1 << (c - 1));
        Self { free, base: base & !free }
    }

    pub fn dim(&self) -> usize {
        self.free.count_ones() as usize
    }

    /// Sorted 1-based free coordinates.
    pub fn free_coords(&self) -> Vec<usize> {
        bits(self.free).map(|b| b + 1).collect()
    }

    pub fn corners(&self) -> impl Iterator<Item = u64> + '_ {
        subsets(self.free).map(move |s| self.base | s)
    }

    /// The `2k` codimension-one faces: for each free axis, the side with that
    /// bit 0 then the side with it 1.
    pub fn facets(&self) -> impl Iterator<Item = Face> + '_ {
        bits(self.free).flat_map(move |b| {
            let free = self.free & !(1 << b);
            [Face { free, base: self.base }, Face { free, base: self.base | 1 << b }]
        })
    }

    fn sort_key(&self) -> (std::cmp::Reverse<u64>, u64) {
        // Reversed-bit order on `free` equals lexicographic order of the
        // sorted coordinate lists.
        (std::cmp::Reverse(self.free.reverse_bits()), self.base)
    }
}

pub(crate) fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let b = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(b)
    })
}

/// All submasks of `mask`, starting from 0 in increasing order.
pub(crate) fn subsets(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask { None } else { Some((cur.wrapping_sub(mask)) & mask) };
        Some(cur)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicalComplex {
    n: usize,
    faces_by_dim: Vec<Vec<Face>>,
    complete: bool,
}

impl CubicalComplex {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Highest dimension that was built.
    pub fn max_dim(&self) -> usize {
        self.faces_by_dim.len() - 1
    }

    /// True when no faces exist above `max_dim`.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Canonically ordered faces; empty for dimensions above `max_dim`.
    pub fn faces(&self, k: usize) -> &[Face] {
        self.faces_by_dim.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn face_counts(&self) -> Vec<usize> {
        self.faces_by_dim.iter().map(Vec::len).collect()
    }

    pub fn vertices(&self) -> &[Face] {
        self.faces(0)
    }

    /// Position of each face of dimension `k` in canonical order.
    pub fn index(&self, k: usize) -> HashMap<Face, usize> {
        self.faces(k).iter().enumerate().map(|(i, &f)| (f, i)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.faces_by_dim
            .iter()
            .enumerate()
            .map(|(k, f)| if k % 2 == 0 { f.len() as i64 } else { -(f.len() as i64) })
            .sum()
    }

    /// Every facet of every face is present.
    pub fn verify_closure(&self) -> bool {
        (1..self.faces_by_dim.len()).all(|k| {
            let below: HashSet<Face> = self.faces(k - 1).iter().copied().collect();
            self.faces(k).par_iter().all(|f| f.facets().all(|g| below.contains(&g)))
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Dump {
            n: usize,
            faces: Vec<(usize, Vec<usize>, String)>,
        }
        let faces = self
            .faces_by_dim
            .iter()
            .enumerate()
            .flat_map(|(k, fs)| fs.iter().map(move |f| (k, f.free_coords(), format!("{:x}", f.base))))
            .collect();
        serde_json::to_value(Dump { n: self.n, faces }).expect("plain data serializes")
    }
}

/// All subcubes with every corner in `s`, up to dimension `max_dim`.
///
/// A k-face is produced once, from its lower half along its highest free axis
/// `j`, and kept if the upper half is also a (k-1)-face.
pub fn build_complex(s: &SolutionSet, max_dim: usize) -> Result<CubicalComplex, ComplexError> {
    if max_dim > s.n {
        return Err(ComplexError::MaxDimExceedsAmbient { max_dim, n: s.n });
    }
    let mut faces_by_dim = vec![s.members.iter().map(|&w| Face::vertex(w)).collect::<Vec<_>>()];
    for _ in 1..=max_dim {
        let prev = faces_by_dim.last().expect("dimension 0 present");
        if prev.is_empty() {
            break;
        }
        let present: HashSet<Face> = prev.iter().copied().collect();
        let n = s.n;
        let mut next: Vec<Face> = prev
            .par_iter()
            .flat_map_iter(|f| {
                let start = if f.free == 0 { 0 } else { 64 - f.free.leading_zeros() as usize };
                let present = &present;
                (start..n).filter_map(move |j| {
                    let bit = 1u64 << j;
                    if f.base & bit != 0 || !present.contains(&Face { free: f.free, base: f.base | bit }) {
                        return None;
                    }
                    Some(Face { free: f.free | bit, base: f.base })
                })
            })
            .collect();
        next.par_sort_unstable_by_key(Face::sort_key);
        faces_by_dim.push(next);
    }
    let complete = faces_by_dim.len() - 1 == s.n || faces_by_dim.last().is_some_and(Vec::is_empty);
    while faces_by_dim.len() <= max_dim {
        faces_by_dim.push(Vec::new());
    }
    let mut k = CubicalComplex { n: s.n, faces_by_dim, complete };
    k.faces_by_dim[0].sort_unstable_by_key(Face::sort_key);
    Ok(k)
}

/// Builds every dimension that has faces.
pub fn build_full_complex(s: &SolutionSet) -> CubicalComplex {
    build_complex(s, s.n).expect("n is a valid max_dim")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterPartition {
    /// Sorted member words per cluster, clusters ordered by smallest member.
    pub clusters: Vec<Vec<u64>>,
    /// Minimal Hamming distance between clusters; `None` where the pair
    /// exceeds [`SEPARATION_PAIR_LIMIT`].
    pub separations: Vec<Vec<Option<u32>>>,
}

impl ClusterPartition {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Smallest off-diagonal separation among computed pairs.
    pub fn min_separation(&self) -> Option<u32> {
        self.separations.iter().enumerate().flat_map(|(i, row)| row.iter().skip(i + 1).flatten().copied()).min()
    }

    pub fn cluster_of(&self, word: u64) -> Option<usize> {
        self.clusters.iter().position(|c| c.binary_search(&word).is_ok())
    }
}

/// Connected components of the 1-skeleton and their pairwise separations.
pub fn components(k: &CubicalComplex) -> Result<ClusterPartition, ComplexError> {
    if k.max_dim() < 1 && k.n > 0 {
        return Err(ComplexError::MissingOneSkeleton);
    }
    let verts: Vec<u64> = k.vertices().iter().map(|f| f.base).collect();
    let pos: HashMap<u64, usize> = verts.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let mut uf = UnionFind::new(verts.len());
    for e in k.faces(1) {
        uf.union(pos[&e.base], pos[&(e.base | e.free)]);
    }
    let mut by_root: HashMap<usize, Vec<u64>> = HashMap::new();
    for (i, &w) in verts.iter().enumerate() {
        by_root.entry(uf.find(i)).or_default().push(w);
    }
    let mut clusters: Vec<Vec<u64>> = by_root.into_values().collect();
    for c in &mut clusters {
        c.sort_unstable();
    }
    clusters.sort_unstable_by_key(|c| c[0]);
    let separations = separation_matrix(&clusters);
    Ok(ClusterPartition { clusters, separations })
}

fn separation_matrix(clusters: &[Vec<u64>]) -> Vec<Vec<Option<u32>>> {
    let m = clusters.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let dists: Vec<Option<u32>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&clusters[i], &clusters[j]);
            if a.len().saturating_mul(b.len()) > SEPARATION_PAIR_LIMIT {
                return None;
            }
            a.iter().flat_map(|x| b.iter().map(move |y| (x ^ y).count_ones())).min()
        })
        .collect();
    let mut out = vec![vec![Some(0); m]; m];
    for (&(i, j), d) in pairs.iter().zip(dists) {
        out[i][j] = d;
        out[j][i] = d;
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
