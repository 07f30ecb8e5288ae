//! F2 boundary operators, Betti numbers and chain classification on cubical
//! complexes.

mod matrix;
pub mod sparse;

use serde::Serialize;
use thiserror::Error;

use crate::complex::{
    build_complex, enumerate_solutions, restrict_to_coords, ComplexError, CubicalComplex, Face, SolutionSet,
};
use crate::formula::CnfFormula;
pub use matrix::{F2Matrix, MatrixParseError};
use sparse::{Column, Reduction};

/// Dense elimination is used for boundary solves up to this many matrix bits.
const DENSE_SOLVE_BITS: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("dimension {k} outside 1..={max_dim}")]
    DimensionOutOfRange { k: usize, max_dim: usize },
    #[error("complex is built only through dimension {built}; dimension {needed} is required")]
    TruncatedComplexWithoutFlag { built: usize, needed: usize },
    #[error("chain has dimension {chain_dim} and length {len}, complex has {faces} faces in that dimension")]
    DimensionMismatch { chain_dim: usize, len: usize, faces: usize },
    #[error("chain {index} is not a cycle")]
    NotACycle { index: usize },
    #[error("face {face:?} is not in the complex")]
    UnknownFace { face: Face },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A k-chain as a coefficient vector over the canonical k-face order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct F2Chain {
    pub dim: usize,
    pub coeffs: Vec<bool>,
}

impl F2Chain {
    pub fn zero(k: &CubicalComplex, dim: usize) -> Self {
        Self { dim, coeffs: vec![false; k.faces(dim).len()] }
    }

    /// Sum of the given faces, which must all have dimension `dim`.
    pub fn from_faces(k: &CubicalComplex, dim: usize, faces: &[Face]) -> Result<Self, HomologyError> {
        let index = k.index(dim);
        let mut c = Self::zero(k, dim);
        for f in faces {
            let &i = index.get(f).ok_or(HomologyError::UnknownFace { face: *f })?;
            c.coeffs[i] ^= true;
        }
        Ok(c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&b| !b)
    }

    pub fn support(&self) -> Vec<usize> {
        self.coeffs.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }

    pub fn faces(&self, k: &CubicalComplex) -> Vec<Face> {
        self.support().into_iter().map(|i| k.faces(self.dim)[i]).collect()
    }

    fn as_column(&self) -> Column {
        self.support().into_iter().map(|i| i as u32).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiVector {
    pub betti: Vec<usize>,
    /// Set when the top entry is only an upper bound.
    pub truncated: bool,
}

impl BettiVector {
    pub fn get(&self, k: usize) -> usize {
        self.betti.get(k).copied().unwrap_or(0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.betti.iter().enumerate().map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum()
    }
}

/// Columns of `∂_k` as sorted row indices into the (k-1)-face order.
pub fn boundary_columns(k: &CubicalComplex, dim: usize) -> Vec<Column> {
    if dim == 0 || dim > k.max_dim() {
        return vec![Vec::new(); k.faces(dim).len()];
    }
    let index = k.index(dim - 1);
    k.faces(dim)
        .iter()
        .map(|f| {
            let mut col: Column = f.facets().map(|g| index[&g] as u32).collect();
            col.sort_unstable();
            col
        })
        .collect()
}

/// Dense `∂_k`: rows are (k-1)-faces, columns are k-faces.
pub fn boundary_matrix(k: &CubicalComplex, dim: usize) -> Result<F2Matrix, HomologyError> {
    if dim == 0 || dim > k.max_dim() {
        return Err(HomologyError::DimensionOutOfRange { k: dim, max_dim: k.max_dim() });
    }
    let cols: Vec<Vec<usize>> =
        boundary_columns(k, dim).into_iter().map(|c| c.into_iter().map(|r| r as usize).collect()).collect();
    Ok(F2Matrix::from_columns(k.faces(dim - 1).len(), &cols))
}

/// Betti numbers `β_0..=β_up_to`.
///
/// Needs faces through `up_to + 1` unless the complex is complete. With
/// `allow_truncated`, a missing top layer is accepted and `β_up_to` becomes
/// an upper bound.
pub fn betti_numbers(k: &CubicalComplex, up_to: usize, allow_truncated: bool) -> Result<BettiVector, HomologyError> {
    let truncated = !k.is_complete() && k.max_dim() < up_to + 1;
    if truncated && (!allow_truncated || k.max_dim() < up_to) {
        return Err(HomologyError::TruncatedComplexWithoutFlag { built: k.max_dim(), needed: up_to + 1 });
    }
    let ranks = boundary_ranks(k, up_to + 1);
    let betti = (0..=up_to).map(|d| k.faces(d).len() - ranks[d] - ranks[d + 1]).collect();
    Ok(BettiVector { betti, truncated })
}

/// `ranks[d] = rank ∂_d` for `d` in `0..=top` (with `rank ∂_0 = 0`).
/// Reduces from the top down, clearing columns already known to be in the
/// span of earlier ones.
fn boundary_ranks(k: &CubicalComplex, top: usize) -> Vec<usize> {
    let mut ranks = vec![0; top + 2];
    let mut clear: Option<Vec<bool>> = None;
    for d in (1..=top.min(k.max_dim())).rev() {
        let cols = boundary_columns(k, d);
        let red = Reduction::new(k.faces(d - 1).len(), cols, clear.as_deref(), false);
        ranks[d] = red.rank();
        let mut next = vec![false; k.faces(d - 1).len()];
        for r in red.pivot_rows() {
            next[r] = true;
        }
        clear = Some(next);
    }
    ranks
}

/// `∂_{d-1} ∘ ∂_d = 0` for every `d` of the complex.
pub fn verify_boundary_squared(k: &CubicalComplex) -> bool {
    (2..=k.max_dim()).all(|d| {
        let upper = boundary_columns(k, d);
        let lower = boundary_columns(k, d - 1);
        upper.iter().all(|col| {
            let mut acc: Column = Vec::new();
            for &r in col {
                sparse::xor_into(&mut acc, &lower[r as usize]);
            }
            acc.is_empty()
        })
    })
}

/// `∂_k c` as a (k-1)-chain; zero for `k = 0`.
pub fn boundary_of(k: &CubicalComplex, c: &F2Chain) -> Result<F2Chain, HomologyError> {
    check_chain(k, c)?;
    if c.dim == 0 {
        return Ok(F2Chain { dim: 0, coeffs: vec![false; 0] });
    }
    let cols = boundary_columns(k, c.dim);
    let mut acc: Column = Vec::new();
    for i in c.support() {
        sparse::xor_into(&mut acc, &cols[i]);
    }
    let mut out = F2Chain::zero(k, c.dim - 1);
    for r in acc {
        out.coeffs[r as usize] = true;
    }
    Ok(out)
}

fn check_chain(k: &CubicalComplex, c: &F2Chain) -> Result<(), HomologyError> {
    let faces = k.faces(c.dim).len();
    if c.dim > k.max_dim() || c.coeffs.len() != faces {
        return Err(HomologyError::DimensionMismatch { chain_dim: c.dim, len: c.coeffs.len(), faces });
    }
    Ok(())
}

fn require_dim(k: &CubicalComplex, needed: usize) -> Result<(), HomologyError> {
    if k.max_dim() < needed && !k.is_complete() {
        return Err(HomologyError::TruncatedComplexWithoutFlag { built: k.max_dim(), needed });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainClass {
    pub is_cycle: bool,
    pub is_boundary: bool,
    /// A (k+1)-chain whose boundary is the input, when one exists.
    pub witness: Option<F2Chain>,
}

/// Decides whether `c` is a cycle and whether it bounds.
pub fn classify_chain(k: &CubicalComplex, c: &F2Chain) -> Result<ChainClass, HomologyError> {
    check_chain(k, c)?;
    require_dim(k, c.dim + 1)?;
    let is_cycle = c.dim == 0 || boundary_of(k, c)?.is_zero();
    let up = c.dim + 1;
    let (rows, cols) = (k.faces(c.dim).len(), k.faces(up).len());
    let solution = if cols == 0 {
        c.is_zero().then(Vec::new)
    } else if rows.saturating_mul(cols) <= DENSE_SOLVE_BITS {
        boundary_matrix(k, up)?.solve(&c.coeffs)
    } else {
        let red = Reduction::new(rows, boundary_columns(k, up), None, true);
        let (residue, combo) = red.reduce_vector(c.as_column());
        residue.is_empty().then(|| {
            let mut x = vec![false; cols];
            for j in combo.expect("tracked reduction") {
                x[j as usize] = true;
            }
            x
        })
    };
    Ok(ChainClass {
        is_cycle,
        is_boundary: solution.is_some(),
        witness: solution.map(|coeffs| F2Chain { dim: up, coeffs }),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Independence {
    pub independent: bool,
    pub rank: usize,
}

/// Rank of the span of the classes `[c_i]` in `H_k`:
/// `rank [∂_{k+1} | chains] - rank ∂_{k+1}`.
pub fn homology_independence(k: &CubicalComplex, chains: &[F2Chain]) -> Result<Independence, HomologyError> {
    let Some(first) = chains.first() else {
        return Ok(Independence { independent: true, rank: 0 });
    };
    let dim = first.dim;
    for (index, c) in chains.iter().enumerate() {
        if c.dim != dim {
            return Err(HomologyError::DimensionMismatch {
                chain_dim: c.dim,
                len: c.coeffs.len(),
                faces: k.faces(dim).len(),
            });
        }
        if !classify_cycle(k, c)? {
            return Err(HomologyError::NotACycle { index });
        }
    }
    require_dim(k, dim + 1)?;
    let mut cols = boundary_columns(k, dim + 1);
    let base = cols.len();
    cols.extend(chains.iter().map(F2Chain::as_column));
    let red = Reduction::new(k.faces(dim).len(), cols, None, false);
    let rank = (base..base + chains.len()).filter(|&j| !red.is_zero_column(j)).count();
    Ok(Independence { independent: rank == chains.len(), rank })
}

fn classify_cycle(k: &CubicalComplex, c: &F2Chain) -> Result<bool, HomologyError> {
    Ok(c.dim == 0 || boundary_of(k, c)?.is_zero())
}

/// A subset of `s` whose complex is homotopy equivalent to that of `s`.
///
/// Splitting along coordinate `i` into halves `S0`, `S1` (bit `i` cleared),
/// the complex is `K(S0) ∪ K(S1) ∪ K(S0 ∩ S1) × [0,1]`. When `S0 ⊆ S1` it
/// deformation retracts onto the `S1` side, and symmetrically. Repeats until
/// no coordinate collapses; collapsed coordinates are left at 0.
pub fn homotopy_core(s: &SolutionSet) -> SolutionSet {
    let mut words = s.members().to_vec();
    let mut active: Vec<usize> = (0..s.n()).collect();
    loop {
        let mut changed = false;
        active.retain(|&i| {
            let bit = 1u64 << i;
            let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (Vec::new(), Vec::new());
            for &w in &words {
                if w & bit == 0 {
                    s0.push(w);
                } else {
                    s1.push(w & !bit);
                }
            }
            // `s0` and `s1` inherit ascending order from `words`.
            let keep = if is_sorted_subset(&s0, &s1) {
                s1
            } else if is_sorted_subset(&s1, &s0) {
                s0
            } else {
                return true;
            };
            words = keep;
            changed = true;
            false
        });
        if !changed {
            break;
        }
    }
    SolutionSet::new(s.n(), words)
}

fn is_sorted_subset(a: &[u64], b: &[u64]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// `β_0..=β_up_to` of the solution complex of `s`, computed on its homotopy core.
pub fn betti_of_solutions(s: &SolutionSet, up_to: usize) -> BettiVector {
    let core = homotopy_core(s);
    let top = (up_to + 1).min(core.n());
    let k = build_complex(&core, top).expect("top is at most n");
    let mut b = betti_numbers(&k, up_to.min(top), false).expect("complex is complete or deep enough");
    b.betti.resize(up_to + 1, 0);
    b
}

/// Betti numbers computed directly on the full solution complex.
pub fn betti_of_solutions_direct(s: &SolutionSet, up_to: usize) -> BettiVector {
    let top = (up_to + 1).min(s.n());
    let k = build_complex(s, top).expect("top is at most n");
    let mut b = betti_numbers(&k, up_to.min(top), false).expect("complex is complete or deep enough");
    b.betti.resize(up_to + 1, 0);
    b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyComparison {
    pub betti_original: Vec<usize>,
    pub betti_reduced: Vec<usize>,
    pub solutions_original: usize,
    pub solutions_reduced: usize,
    /// Projection of the reduced solutions onto the original variables equals the original solutions.
    pub projection_matches: bool,
    pub equal: bool,
}

/// Compares `β_0..=β_up_to` of `Sol(f)` and `Sol(reduced)`, where `reduced`
/// keeps the variables `1..=f.num_vars()` and adds auxiliaries after them.
pub fn compare_homology(
    f: &CnfFormula,
    reduced: &CnfFormula,
    up_to: usize,
    cap: usize,
) -> Result<HomologyComparison, HomologyError> {
    let s = enumerate_solutions(f, cap)?;
    let t = enumerate_solutions(reduced, cap)?;
    let coords: Vec<usize> = (1..=f.num_vars()).collect();
    let projected = restrict_to_coords(&t, &coords)?;
    let a = betti_of_solutions(&s, up_to).betti;
    let b = betti_of_solutions(&t, up_to).betti;
    Ok(HomologyComparison {
        equal: a == b,
        betti_original: a,
        betti_reduced: b,
        solutions_original: s.len(),
        solutions_reduced: t.len(),
        projection_matches: projected == s,
    })
}
