//! Solution-graph Laplacians, conductance and the clause-penalty coupling bound.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::complex::{enumerate_solutions, ClusterPartition, ComplexError, SolutionSet};
use crate::formula::{word_to_bitstring, CnfFormula};
use crate::graph::SimpleGraph;

/// Eigenvalues at or below this magnitude count as zero.
pub const ZERO_TOL: f64 = 1e-9;

/// Largest vertex count for exhaustive conductance.
pub const EXACT_CHEEGER_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph has no proper cut")]
    NoProperCut,
    #[error("{vertices} vertices is too many for exact conductance and no cluster hint was given")]
    TooLargeForExact { vertices: usize },
    #[error("invalid parameter: {0}")]
    InvalidRange(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Symmetric nonnegative weights on labelled vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedGraph {
    /// Vertex labels; for solution graphs these are packed assignments.
    pub vertices: Vec<u64>,
    /// Bit width of the labels, used for printing.
    pub label_bits: usize,
    /// Adjacency lists `(neighbor, weight)`, sorted by neighbor, positive weights only.
    pub adjacency: Vec<Vec<(usize, f64)>>,
    pub degree: Vec<f64>,
}

impl WeightedGraph {
    pub fn from_edges(vertices: Vec<u64>, label_bits: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for &(a, b, w) in edges {
            assert!(a != b && w >= 0.0, "weights must be nonnegative off the diagonal");
            if w > 0.0 {
                adjacency[a].push((b, w));
                adjacency[b].push((a, w));
            }
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(j, _)| j);
        }
        let degree = adjacency.iter().map(|l| l.iter().map(|&(_, w)| w).sum()).collect();
        Self { vertices, label_bits, adjacency, degree }
    }

    pub fn from_simple_graph(g: &SimpleGraph) -> Self {
        let edges: Vec<_> = g.edges().iter().map(|&(u, v)| (u, v, 1.0)).collect();
        Self::from_edges((0..g.vertex_count() as u64).collect(), 0, &edges)
    }

    /// Weight `g` on every pair of members at Hamming distance 1.
    pub fn hamming_graph(s: &SolutionSet, g: f64) -> Self {
        let m = s.members();
        let mut edges = Vec::new();
        for (i, &x) in m.iter().enumerate() {
            for b in 0..s.n() {
                let y = x ^ (1 << b);
                if y > x {
                    if let Ok(j) = m.binary_search(&y) {
                        edges.push((i, j, g));
                    }
                }
            }
        }
        Self::from_edges(m.to_vec(), s.n(), &edges)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.adjacency[a].binary_search_by_key(&b, |&(j, _)| j).map_or(0.0, |k| self.adjacency[a][k].1)
    }

    /// Connected components under positive weights, each sorted, ordered by first vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &(w, _) in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn labels(&self, idx: &[usize]) -> Vec<String> {
        idx.iter()
            .map(|&i| {
                if self.label_bits == 0 {
                    self.vertices[i].to_string()
                } else {
                    word_to_bitstring(self.label_bits, self.vertices[i])
                }
            })
            .collect()
    }

    /// `a b w` per edge with `a < b`, one per line.
    pub fn to_weighted_edge_list(&self) -> String {
        let mut out = String::new();
        for (a, list) in self.adjacency.iter().enumerate() {
            for &(b, w) in list.iter().filter(|&&(b, _)| b > a) {
                out.push_str(&format!("{a} {b} {w}\n"));
            }
        }
        out
    }
}

/// The solution graph of `f` with coupling `g` on single-bit flips.
pub fn config_graph(f: &CnfFormula, g: f64, cap: usize) -> Result<WeightedGraph, SpectralError> {
    if !(g.is_finite() && g >= 0.0) {
        return Err(SpectralError::InvalidRange(format!("coupling must be finite and nonnegative, got {g}")));
    }
    let s = enumerate_solutions(f, cap)?;
    Ok(WeightedGraph::hamming_graph(&s, g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplacianKind {
    Combinatorial,
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Smallest eigenvalue above [`ZERO_TOL`].
    pub lambda1: Option<f64>,
    pub kernel_dim: usize,
}

/// `L = D - W`, or `I - D^{-1/2} W D^{-1/2}` with zero rows for isolated vertices.
pub fn laplacian(g: &WeightedGraph, kind: LaplacianKind) -> DMatrix<f64> {
    let n = g.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        match kind {
            LaplacianKind::Combinatorial => m[(i, i)] = g.degree[i],
            LaplacianKind::Normalized => m[(i, i)] = if g.degree[i] > 0.0 { 1.0 } else { 0.0 },
        }
        for &(j, w) in &g.adjacency[i] {
            m[(i, j)] = match kind {
                LaplacianKind::Combinatorial => -w,
                LaplacianKind::Normalized => -w / (g.degree[i] * g.degree[j]).sqrt(),
            };
        }
    }
    m
}

pub fn laplacian_spectrum(g: &WeightedGraph, kind: LaplacianKind) -> Result<Spectrum, SpectralError> {
    if g.is_empty() {
        return Err(SpectralError::EmptyGraph);
    }
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(laplacian(g, kind)).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let kernel_dim = eigenvalues.iter().filter(|v| v.abs() <= ZERO_TOL).count();
    let lambda1 = eigenvalues.iter().copied().find(|&v| v > ZERO_TOL);
    Ok(Spectrum { eigenvalues, lambda1, kernel_dim })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheegerMethod {
    Exact,
    /// Minimum over the hinted cluster cuts only; an upper bound on `h`.
    ClusterBound,
    /// The graph is disconnected, so a component is a zero-conductance cut.
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheegerResult {
    pub value: f64,
    pub method: CheegerMethod,
    /// Vertex indices of one side of the optimal cut found.
    pub witness: Vec<usize>,
}

/// `w(U, V∖U) / min(vol U, vol V∖U)`.
pub fn conductance(g: &WeightedGraph, in_u: &[bool]) -> f64 {
    let (mut cut, mut vol_u, mut vol_all) = (0.0, 0.0, 0.0);
    for i in 0..g.len() {
        vol_all += g.degree[i];
        if in_u[i] {
            vol_u += g.degree[i];
            cut += g.adjacency[i].iter().filter(|&&(j, _)| !in_u[j]).map(|&(_, w)| w).sum::<f64>();
        }
    }
    let denom = f64::min(vol_u, vol_all - vol_u);
    if denom > 0.0 {
        cut / denom
    } else {
        f64::INFINITY
    }
}

/// Conductance of the graph: exact by subset enumeration up to
/// [`EXACT_CHEEGER_LIMIT`] vertices, otherwise the best hinted cluster cut.
pub fn cheeger(g: &WeightedGraph, hint: Option<&ClusterPartition>) -> Result<CheegerResult, SpectralError> {
    let n = g.len();
    if n < 2 {
        return Err(SpectralError::NoProperCut);
    }
    let comps = g.components();
    if comps.len() > 1 {
        return Ok(CheegerResult { value: 0.0, method: CheegerMethod::Disconnected, witness: comps[0].clone() });
    }
    if n <= EXACT_CHEEGER_LIMIT {
        return Ok(exact_cheeger(g));
    }
    let hint = hint.ok_or(SpectralError::TooLargeForExact { vertices: n })?;
    let mut best: Option<CheegerResult> = None;
    for cluster in &hint.clusters {
        let in_u: Vec<bool> = g.vertices.iter().map(|w| cluster.binary_search(w).is_ok()).collect();
        let count = in_u.iter().filter(|&&b| b).count();
        if count == 0 || count == n {
            continue;
        }
        let value = conductance(g, &in_u);
        if best.as_ref().is_none_or(|b| value < b.value) {
            let witness = (0..n).filter(|&i| in_u[i]).collect();
            best = Some(CheegerResult { value, method: CheegerMethod::ClusterBound, witness });
        }
    }
    best.ok_or(SpectralError::NoProperCut)
}

/// Scans every cut once by keeping vertex 0 on the `U` side. Ties go to the
/// smallest subset mask.
fn exact_cheeger(g: &WeightedGraph) -> CheegerResult {
    let n = g.len();
    let rest = n - 1;
    let (value, mask) = (0..(1u64 << rest) - 1)
        .into_par_iter()
        .map(|m| {
            let mask = (m << 1) | 1;
            let in_u: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            (conductance(g, &in_u), mask)
        })
        .reduce(|| (f64::INFINITY, u64::MAX), |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    let witness = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
    CheegerResult { value, method: CheegerMethod::Exact, witness }
}

/// `g (n g / Δ)^{w-1}`: the effective tunnelling amplitude between clusters
/// at Hamming separation `w` under a transverse driver of strength `g` and a
/// clause-penalty gap `Δ`.
pub fn effective_coupling_bound(n: usize, w: u32, g: f64, delta: f64) -> Result<f64, SpectralError> {
    if w < 1 {
        return Err(SpectralError::InvalidRange("separation w must be at least 1".into()));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(SpectralError::InvalidRange(format!("penalty gap must be positive, got {delta}")));
    }
    if !(g.is_finite() && g >= 0.0) {
        return Err(SpectralError::InvalidRange(format!("driver strength must be nonnegative, got {g}")));
    }
    Ok(g * (n as f64 * g / delta).powi(w as i32 - 1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub vertices: usize,
    pub edges: usize,
    /// Classical ground-space degeneracy, equal to the number of solutions.
    pub ground_state_degeneracy: usize,
    pub components: usize,
    pub lambda1_combinatorial: Option<f64>,
    pub lambda1_normalized: Option<f64>,
    pub kernel_dim: usize,
    pub cheeger_value: Option<f64>,
    pub cheeger_method: Option<CheegerMethod>,
    pub cheeger_witness: Vec<String>,
    /// `λ1(normalized) ≤ 2h`, checked when both sides are defined and `h` is exact.
    pub cheeger_inequality_holds: Option<bool>,
}

pub fn analyze(g: &WeightedGraph, hint: Option<&ClusterPartition>) -> Result<SpectralReport, SpectralError> {
    let comb = laplacian_spectrum(g, LaplacianKind::Combinatorial)?;
    let norm = laplacian_spectrum(g, LaplacianKind::Normalized)?;
    let ch = match cheeger(g, hint) {
        Ok(c) => Some(c),
        Err(SpectralError::NoProperCut | SpectralError::TooLargeForExact { .. }) => None,
        Err(e) => return Err(e),
    };
    let inequality = match (&ch, norm.lambda1) {
        (Some(c), Some(l)) if c.method == CheegerMethod::Exact => Some(l <= 2.0 * c.value + ZERO_TOL),
        _ => None,
    };
    Ok(SpectralReport {
        vertices: g.len(),
        edges: g.edge_count(),
        ground_state_degeneracy: g.len(),
        components: g.components().len(),
        lambda1_combinatorial: comb.lambda1,
        lambda1_normalized: norm.lambda1,
        kernel_dim: comb.kernel_dim,
        cheeger_value: ch.as_ref().map(|c| c.value),
        cheeger_method: ch.as_ref().map(|c| c.method),
        cheeger_witness: ch.as_ref().map_or_else(Vec::new, |c| g.labels(&c.witness)),
        cheeger_inequality_holds: inequality,
    })
}
