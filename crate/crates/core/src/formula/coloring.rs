use serde::Serialize;

use super::{Clause, CnfFormula, Origin};
use crate::graph::SimpleGraph;

/// Index map for the 3-coloring encoding: `x_{v,c}` is variable `3v + c`
/// for 0-indexed vertex `v` and color `c ∈ {1, 2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ColorVarMap {
    pub vertices: usize,
}

impl ColorVarMap {
    pub fn var(&self, v: usize, c: usize) -> usize {
        assert!(v < self.vertices && (1..=3).contains(&c));
        3 * v + c
    }

    /// Inverse of [`ColorVarMap::var`].
    pub fn vertex_color(&self, var: usize) -> (usize, usize) {
        ((var - 1) / 3, (var - 1) % 3 + 1)
    }

    pub fn num_vars(&self) -> usize {
        3 * self.vertices
    }
}

/// Vertex clauses come first, grouped per vertex as one at-least-one clause
/// followed by the at-most-one pairs (1,2), (1,3), (2,3). Edge clauses follow
/// in edge order, colors 1..3 per edge. Self-loops are rejected when the graph
/// is built, so the encoding itself cannot fail.
pub fn encode_three_color(g: &SimpleGraph) -> (CnfFormula, ColorVarMap) {
    let map = ColorVarMap { vertices: g.vertex_count() };
    let x = |v, c| map.var(v, c) as i32;
    let mut clauses = Vec::with_capacity(4 * g.vertex_count() + 3 * g.edge_count());
    for v in 0..g.vertex_count() {
        clauses.push(vec![x(v, 1), x(v, 2), x(v, 3)]);
        for (c1, c2) in [(1, 2), (1, 3), (2, 3)] {
            clauses.push(vec![-x(v, c1), -x(v, c2)]);
        }
    }
    for &(u, v) in g.edges() {
        for c in 1..=3 {
            clauses.push(vec![-x(u, c), -x(v, c)]);
        }
    }
    let clauses = clauses.into_iter().map(|l| Clause::new(l).expect("distinct color variables")).collect();
    let f = CnfFormula::new(map.num_vars(), clauses, Origin::Reduced).expect("indices in range");
    (f, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Assignment;

    fn count_solutions(f: &CnfFormula) -> usize {
        (0..1u64 << f.num_vars()).filter(|&w| f.evaluate(&Assignment::from_word(f.num_vars(), w)).unwrap()).count()
    }

    #[test]
    fn triangle_sizes() {
        let (f, map) = encode_three_color(&SimpleGraph::complete(3));
        assert_eq!(f.num_vars(), 9);
        assert_eq!(f.clauses().len(), 12 + 9);
        assert_eq!(map.var(2, 3), 9);
        assert_eq!(map.vertex_color(9), (2, 3));
        assert_eq!(count_solutions(&f), 6);
    }

    #[test]
    fn single_vertex() {
        let g = SimpleGraph::new(1, &[]).unwrap();
        let (f, _) = encode_three_color(&g);
        assert_eq!((f.num_vars(), f.clauses().len()), (3, 4));
        assert_eq!(count_solutions(&f), 3);
    }

    #[test]
    fn single_edge_has_six_colorings() {
        let (f, _) = encode_three_color(&SimpleGraph::path(2));
        assert_eq!(count_solutions(&f), 6);
    }

    #[test]
    fn k4_is_not_three_colorable() {
        let (f, _) = encode_three_color(&SimpleGraph::complete(4));
        assert_eq!(count_solutions(&f), 0);
    }
}
