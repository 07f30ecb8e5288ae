use std::collections::VecDeque;

use serde::Serialize;

use super::{clause, GadgetError, GadgetInstance, GadgetKind, VarAllocator};
use crate::formula::{encode_three_color, CnfFormula, Origin};
use crate::graph::SimpleGraph;
use crate::spectral::{laplacian_spectrum, LaplacianKind, WeightedGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FundamentalCycle {
    /// Closed walk `v0, v1, …, v_{l-1}` (the edge back to `v0` is implied).
    pub vertices: Vec<usize>,
    /// Edges along the walk as `(min, max)` pairs, starting at `(v0, v1)`.
    pub edges: Vec<(usize, usize)>,
}

impl FundamentalCycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// One cycle per non-tree edge of the BFS tree rooted at vertex 0, with
/// neighbors visited in ascending order. Non-tree edges are taken in the
/// graph's edge order; each cycle walks from the edge's first endpoint up to
/// the common ancestor and down to the second endpoint.
pub fn fundamental_cycle_basis(g: &SimpleGraph) -> Result<Vec<FundamentalCycle>, GadgetError> {
    if !g.is_connected() {
        return Err(GadgetError::DisconnectedGraph);
    }
    let n = g.vertex_count();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        let mut nbrs = g.neighbors(u).to_vec();
        nbrs.sort_unstable();
        for w in nbrs {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                depth[w] = depth[u] + 1;
                queue.push_back(w);
            }
        }
    }
    let is_tree = |a: usize, b: usize| parent[a] == b || parent[b] == a;
    let mut out = Vec::new();
    for &(a, b) in g.edges() {
        if is_tree(a, b) {
            continue;
        }
        let (mut x, mut y) = (a, b);
        let mut up = vec![x];
        let mut down = vec![y];
        while x != y {
            if depth[x] >= depth[y] {
                x = parent[x];
                up.push(x);
            } else {
                y = parent[y];
                down.push(y);
            }
        }
        // Both walks end at the common ancestor; keep it once.
        down.pop();
        up.extend(down.into_iter().rev());
        let vertices = up;
        let l = vertices.len();
        let edges = (0..l)
            .map(|i| {
                let (p, q) = (vertices[i], vertices[(i + 1) % l]);
                (p.min(q), p.max(q))
            })
            .collect();
        out.push(FundamentalCycle { vertices, edges });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStats {
    pub vertices: usize,
    pub edges: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub girth: Option<usize>,
    pub cyclomatic_number: usize,
    /// Smallest nonzero eigenvalue of the normalized Laplacian.
    pub spectral_gap: Option<f64>,
}

impl GraphStats {
    pub fn measure(g: &SimpleGraph) -> Self {
        let degrees: Vec<usize> = (0..g.vertex_count()).map(|v| g.degree(v)).collect();
        let spectral_gap = laplacian_spectrum(&WeightedGraph::from_simple_graph(g), LaplacianKind::Normalized)
            .ok()
            .and_then(|s| s.lambda1);
        Self {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            min_degree: degrees.iter().copied().min().unwrap_or(0),
            max_degree: degrees.iter().copied().max().unwrap_or(0),
            girth: g.girth(),
            cyclomatic_number: g.cyclomatic_number(),
            spectral_gap,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpanderEmbedding {
    pub formula: CnfFormula,
    pub gadgets: Vec<GadgetInstance>,
    pub cycles: Vec<FundamentalCycle>,
    /// Clause counts for vertex coloring, edge constraints, XOR gadgets and edge coupling.
    pub group_sizes: [usize; 4],
    pub stats: GraphStats,
}

/// 3-coloring encoding of `g` plus, for every fundamental cycle `C_i`, the
/// parity pair `u_i, v_i` tied by `(u_i ∨ ¬v_i) ∧ (¬u_i ∨ v_i)` and one edge
/// selector `y_e` per cycle edge with the coupling clauses
/// `(y_e ∨ ¬u_i) ∧ (y_e ∨ ¬v_i)` and `(¬y_e ∨ ¬x_{a,c} ∨ ¬x_{b,c})` for
/// `e = (a, b)`, `c = 1..3`.
///
/// Variables: colors first, then per cycle `u_i, v_i, y_e…` in cycle edge
/// order. Clauses: coloring groups, then all XOR pairs, then coupling
/// clauses per cycle (the 2-literal pairs per edge, then the 3-literal ones).
pub fn expander_embed(g: &SimpleGraph) -> Result<ExpanderEmbedding, GadgetError> {
    let cycles = fundamental_cycle_basis(g)?;
    let (base, map) = encode_three_color(g);
    let coloring_clauses = base.clauses().len();
    let mut alloc = VarAllocator::new(map.num_vars());
    let mut blocks = Vec::new();
    for cyc in &cycles {
        let u = alloc.fresh();
        let v = alloc.fresh();
        let ys = alloc.fresh_block(cyc.len());
        blocks.push((u, v, ys));
    }
    let mut xor = Vec::new();
    for (u, v, _) in &blocks {
        let (u, v) = (*u as i32, *v as i32);
        xor.push(vec![clause(&[u, -v]), clause(&[-u, v])]);
    }
    let mut coupling = Vec::new();
    for ((u, v, ys), cyc) in blocks.iter().zip(&cycles) {
        let (u, v) = (*u as i32, *v as i32);
        let mut group = Vec::new();
        for &y in ys {
            group.push(clause(&[y as i32, -u]));
            group.push(clause(&[y as i32, -v]));
        }
        for (&y, &(a, b)) in ys.iter().zip(&cyc.edges) {
            for c in 1..=3 {
                group.push(clause(&[-(y as i32), -(map.var(a, c) as i32), -(map.var(b, c) as i32)]));
            }
        }
        coupling.push(group);
    }
    let xor_count: usize = xor.iter().map(Vec::len).sum();
    let coupling_count: usize = coupling.iter().map(Vec::len).sum();
    let mut gadgets = Vec::new();
    for (i, (((u, v, ys), x), cpl)) in blocks.iter().zip(xor).zip(coupling).enumerate() {
        let mut support = vec![*u, *v];
        support.extend(ys);
        let mut roles = vec![("u".to_string(), *u), ("v".to_string(), *v)];
        roles.extend(ys.iter().enumerate().map(|(j, &y)| (format!("y{}", j + 1), y)));
        let clauses: Vec<_> = x.into_iter().chain(cpl).collect();
        gadgets.push(GadgetInstance {
            kind: GadgetKind::XorCycle,
            index: i,
            formula_fragment: CnfFormula::new(alloc.used(), clauses, Origin::Gadget)
                .expect("gadget variables are allocated"),
            support,
            roles,
            cycle_dim: 2,
            canonical_cycle: None,
        });
    }
    let mut ordered = base.clauses().to_vec();
    for g in &gadgets {
        ordered.extend_from_slice(&g.formula_fragment.clauses()[..2]);
    }
    for g in &gadgets {
        ordered.extend_from_slice(&g.formula_fragment.clauses()[2..]);
    }
    let formula = CnfFormula::new(alloc.used(), ordered, Origin::Gadget).expect("indices in range");
    let vertex_clauses = 4 * g.vertex_count();
    Ok(ExpanderEmbedding {
        formula,
        gadgets,
        cycles,
        group_sizes: [vertex_clauses, coloring_clauses - vertex_clauses, xor_count, coupling_count],
        stats: GraphStats::measure(g),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_has_one_cycle() {
        let b = fundamental_cycle_basis(&SimpleGraph::complete(3)).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].len(), 3);
    }

    #[test]
    fn petersen_basis() {
        let g = SimpleGraph::petersen();
        let b = fundamental_cycle_basis(&g).unwrap();
        assert_eq!(b.len(), 6);
        for c in &b {
            assert!(c.edges.iter().all(|e| g.edges().contains(e)));
            let mut sorted = c.vertices.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), c.vertices.len(), "cycle revisits a vertex");
        }
    }

    #[test]
    fn tree_and_disconnected_inputs() {
        assert!(fundamental_cycle_basis(&SimpleGraph::path(5)).unwrap().is_empty());
        let g = SimpleGraph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(fundamental_cycle_basis(&g), Err(GadgetError::DisconnectedGraph));
    }

    #[test]
    fn triangle_embedding_counts() {
        let e = expander_embed(&SimpleGraph::complete(3)).unwrap();
        assert_eq!(e.formula.num_vars(), 9 + 2 + 3);
        assert_eq!(e.group_sizes, [12, 9, 2, 15]);
        assert_eq!(e.formula.clauses().len(), 12 + 9 + 2 + 15);
        assert_eq!(e.gadgets[0].support, vec![10, 11, 12, 13, 14]);
        assert_eq!(e.stats.girth, Some(3));
    }

    #[test]
    fn four_cycle_embedding_counts() {
        let e = expander_embed(&SimpleGraph::cycle(4)).unwrap();
        assert_eq!(e.cycles.len(), 1);
        assert_eq!(e.cycles[0].len(), 4);
        assert_eq!(e.formula.num_vars(), 12 + 2 + 4);
    }

    #[test]
    fn tree_embedding_is_plain_coloring() {
        let g = SimpleGraph::path(4);
        let e = expander_embed(&g).unwrap();
        assert!(e.gadgets.is_empty());
        assert_eq!(e.formula.clauses(), encode_three_color(&g).0.clauses());
    }
}
