//! Simple undirected graphs and the edge-list file format.
//!
//! The format is one `u v` pair per line with 0-indexed vertices. Blank lines
//! and lines starting with `#` are ignored. A line `n <count>` may declare the
//! vertex count (needed for trailing isolated vertices); otherwise it is one
//! more than the largest index seen.

use std::collections::VecDeque;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("edge ({u}, {v}) listed twice")]
    DuplicateEdge { u: usize, v: usize },
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("line {line}: expected `u v`")]
    MalformedLine { line: usize },
    #[error("graph is disconnected")]
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    /// Edges are stored as `(min, max)` in input order.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        let mut norm = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { vertex: u });
            }
            let e = (u.min(v), u.max(v));
            if adj[e.0].contains(&e.1) {
                return Err(GraphError::DuplicateEdge { u: e.0, v: e.1 });
            }
            adj[e.0].push(e.1);
            adj[e.1].push(e.0);
            norm.push(e);
        }
        Ok(Self { n, edges: norm, adj })
    }

    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut declared = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = t.split_whitespace().collect();
            match parts.as_slice() {
                ["n", count] => {
                    declared = Some(count.parse().map_err(|_| GraphError::MalformedLine { line })?);
                }
                [u, v] => {
                    let u: usize = u.parse().map_err(|_| GraphError::MalformedLine { line })?;
                    let v: usize = v.parse().map_err(|_| GraphError::MalformedLine { line })?;
                    edges.push((u, v));
                }
                _ => return Err(GraphError::MalformedLine { line }),
            }
        }
        let seen = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        Self::new(declared.unwrap_or(seen), &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.component_count() == 1
    }

    /// `|E| - |V| + c`, the rank of the cycle space.
    pub fn cyclomatic_number(&self) -> usize {
        self.edges.len() + self.component_count() - self.n
    }

    /// Length of a shortest cycle, `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for s in 0..self.n {
            let mut dist = vec![usize::MAX; self.n];
            let mut parent = vec![usize::MAX; self.n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        queue.push_back(w);
                    } else if parent[u] != w {
                        let len = dist[u] + dist[w] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges).expect("cycle needs n >= 3")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("path edges are simple")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self::new(n, &edges).expect("complete graph edges are simple")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        Self::new(10, &edges).expect("petersen edges are simple")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn petersen_invariants() {
        let g = SimpleGraph::petersen();
        assert_eq!(g.edge_count(), 15);
        assert!((0..10).all(|v| g.degree(v) == 3));
        assert_eq!(g.girth(), Some(5));
        assert_eq!(g.cyclomatic_number(), 6);
    }

    #[test]
    fn girth_of_small_graphs() {
        assert_eq!(SimpleGraph::complete(3).girth(), Some(3));
        assert_eq!(SimpleGraph::cycle(4).girth(), Some(4));
        assert_eq!(SimpleGraph::cycle(7).girth(), Some(7));
        assert_eq!(SimpleGraph::path(5).girth(), None);
    }

    #[test]
    fn edge_list_parsing() {
        let g = SimpleGraph::parse_edge_list("# triangle\n0 1\n1 2\n\n2 0\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2), (0, 2)]);
        let g = SimpleGraph::parse_edge_list("n 4\n0 1\n").unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.component_count(), 3);
        assert_eq!(SimpleGraph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn edge_list_errors() {
        assert_eq!(SimpleGraph::parse_edge_list("1 1\n"), Err(GraphError::SelfLoop { vertex: 1 }));
        assert_eq!(SimpleGraph::parse_edge_list("0 1\n1 0\n"), Err(GraphError::DuplicateEdge { u: 0, v: 1 }));
        assert_eq!(SimpleGraph::parse_edge_list("0 1 2\n"), Err(GraphError::MalformedLine { line: 1 }));
        assert_eq!(SimpleGraph::parse_edge_list("n 2\n0 5\n"), Err(GraphError::VertexOutOfRange { vertex: 5, n: 2 }));
    }
}
