//! Gadget families and their certificates.
//!
//! Canonical cycles are stored in gadget-local coordinates: coordinate `j`
//! (1-based) of a face is the `j`-th variable of the gadget's support.

mod certify;
mod corner;
mod expander;

use serde::Serialize;
use thiserror::Error;

use crate::complex::{build_full_complex, ComplexError, Face, SolutionSet};
use crate::formula::{Clause, CnfFormula, Origin};
use crate::homology::HomologyError;

pub use certify::{
    printed_ring_matrix, ring_certificate, ring_square_patterns, verify_gadget_family, CertificateReport,
    GadgetCertificate, JointMethod, RingCertificate,
};
pub use corner::{corner_table, CornerRow, CornerTable};
pub use expander::{expander_embed, fundamental_cycle_basis, ExpanderEmbedding, FundamentalCycle, GraphStats};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("coordinate {coord} is assigned in the context")]
    CoordAssignedInContext { coord: usize },
    #[error("context has length {found}, formula has {expected} variables")]
    ContextLength { expected: usize, found: usize },
    #[error("triple coordinates must be distinct and within 1..={n}")]
    BadTriple { n: usize },
    #[error("{free} unassigned context variables exceed the limit of {limit}")]
    TooManyFreeVariables { free: usize, limit: usize },
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("variable {var} appears in the supports of gadgets {first} and {second}")]
    OverlappingSupports { var: usize, first: usize, second: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

/// Hands out fresh variable indices in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarAllocator {
    next: usize,
}

impl VarAllocator {
    /// The first index handed out is `used + 1`.
    pub fn new(used: usize) -> Self {
        Self { next: used + 1 }
    }

    pub fn fresh(&mut self) -> usize {
        self.next += 1;
        self.next - 1
    }

    pub fn fresh_block(&mut self, k: usize) -> Vec<usize> {
        (0..k).map(|_| self.fresh()).collect()
    }

    /// Highest index handed out so far.
    pub fn used(&self) -> usize {
        self.next - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetKind {
    GadgetB,
    Ring,
    XorCycle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetInstance {
    pub kind: GadgetKind,
    pub index: usize,
    pub formula_fragment: CnfFormula,
    /// Global variable indices; defines the local coordinate order.
    pub support: Vec<usize>,
    /// Named variables, e.g. `("u", 5)`.
    pub roles: Vec<(String, usize)>,
    pub cycle_dim: usize,
    /// Faces of the designated chain in local coordinates; `None` when the
    /// construction does not pin one down.
    pub canonical_cycle: Option<Vec<Face>>,
}

impl GadgetInstance {
    pub fn role(&self, name: &str) -> Option<usize> {
        self.roles.iter().find(|(r, _)| r == name).map(|&(_, v)| v)
    }

    /// Local coordinate (1-based) of a global variable.
    pub fn local_coord(&self, var: usize) -> Option<usize> {
        self.support.iter().position(|&v| v == var).map(|i| i + 1)
    }

    /// Global variables varied by the canonical chain.
    pub fn cycle_support(&self) -> Vec<usize> {
        let mask = self.canonical_cycle.iter().flatten().fold(0u64, |m, f| m | f.free);
        crate::complex::bits(mask).map(|b| self.support[b]).collect()
    }

    /// Canonical faces rendered as patterns over the support: `*` for a free
    /// coordinate, otherwise the fixed bit.
    pub fn cycle_patterns(&self) -> Vec<String> {
        self.canonical_cycle.iter().flatten().map(|f| face_pattern(f, self.support.len())).collect()
    }
}

pub fn face_pattern(f: &Face, width: usize) -> String {
    (0..width)
        .map(|b| {
            if f.free >> b & 1 == 1 {
                '*'
            } else if f.base >> b & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

fn clause(lits: &[i32]) -> Clause {
    Clause::new(lits.to_vec()).expect("gadget clauses use distinct variables")
}

fn fragment(alloc: &VarAllocator, clauses: Vec<Clause>) -> CnfFormula {
    CnfFormula::new(alloc.used(), clauses, Origin::Gadget).expect("gadget variables are allocated")
}

/// Three fresh variables `u, v, w` with `(u ∨ v ∨ w) ∧ (¬u ∨ ¬v ∨ ¬w)`.
/// The canonical chain is the hexagon of edges on `{0,1}^3 ∖ {000, 111}`.
pub fn make_gadget_b(index: usize, alloc: &mut VarAllocator) -> GadgetInstance {
    let vars = alloc.fresh_block(3);
    let [u, v, w] = [vars[0], vars[1], vars[2]].map(|x| x as i32);
    let clauses = vec![clause(&[u, v, w]), clause(&[-u, -v, -w])];
    let local = SolutionSet::new(3, (1..7).collect());
    let hexagon = build_full_complex(&local).faces(1).to_vec();
    GadgetInstance {
        kind: GadgetKind::GadgetB,
        index,
        formula_fragment: fragment(alloc, clauses),
        roles: vec![("u".into(), vars[0]), ("v".into(), vars[1]), ("w".into(), vars[2])],
        support: vars,
        cycle_dim: 1,
        canonical_cycle: Some(hexagon),
    }
}

/// Incidence of the four ring squares with the eight y-edges as printed for
/// the ring gadget; rows `e1..e8`, columns `σ1..σ4`.
pub const PRINTED_RING_INCIDENCE: [[u8; 4]; 8] =
    [[1, 0, 0, 1], [1, 0, 0, 1], [1, 1, 0, 0], [1, 1, 0, 0], [0, 1, 1, 0], [0, 1, 1, 0], [0, 0, 1, 1], [0, 0, 1, 1]];

/// Local coordinates of the ring gadget, in allocation order.
pub const RING_ROLES: [&str; 9] = ["y1", "y2", "y3", "y4", "u", "v", "b", "a", "c"];
const RING_U: usize = 5;
const RING_B: usize = 7;

/// Nine fresh variables `y1..y4, u, v, b, a, c` and the eight clauses of the
/// ring gadget: the enable group on `(b, y1, u)` and the 3-CNF encoding of
/// `u = v` with pads `a`, `c`.
///
/// The canonical chain is `σ1 + σ2 + σ3 + σ4`, where `σj` varies `(yj, u)`
/// with `b = 1`, `v = a = c = 0`. The remaining y-bits follow a staircase
/// (`y1..y(j-1) = 1`) so that consecutive squares share a u-edge.
pub fn make_ring_gadget(index: usize, alloc: &mut VarAllocator) -> GadgetInstance {
    let vars = alloc.fresh_block(9);
    let v = |name: &str| vars[RING_ROLES.iter().position(|&r| r == name).expect("known role")] as i32;
    let (b, y1, u, w, a, c) = (v("b"), v("y1"), v("u"), v("v"), v("a"), v("c"));
    let clauses = vec![
        clause(&[b, y1, u]),
        clause(&[b, -y1, u]),
        clause(&[b, y1, -u]),
        clause(&[b, -y1, -u]),
        clause(&[u, -w, a]),
        clause(&[u, -w, -a]),
        clause(&[-u, w, c]),
        clause(&[-u, w, -c]),
    ];
    GadgetInstance {
        kind: GadgetKind::Ring,
        index,
        formula_fragment: fragment(alloc, clauses),
        roles: RING_ROLES.iter().zip(&vars).map(|(r, &x)| (r.to_string(), x)).collect(),
        support: vars,
        cycle_dim: 2,
        canonical_cycle: Some(ring_squares()),
    }
}

/// `σ1..σ4` in local ring coordinates.
pub fn ring_squares() -> Vec<Face> {
    (1..=4)
        .map(|j| {
            let staircase = (1u64 << (j - 1)) - 1;
            Face::from_coords(&[j, RING_U], staircase | 1 << (RING_B - 1))
        })
        .collect()
}

/// The y-edges of the ring squares in row order (y index, then u value).
pub fn ring_y_edges() -> Vec<Face> {
    ring_squares()
        .iter()
        .flat_map(|sq| {
            let j = (sq.free & !(1 << (RING_U - 1))).trailing_zeros() as usize + 1;
            [0u64, 1].map(|uval| Face::from_coords(&[j], sq.base | uval << (RING_U - 1)))
        })
        .collect()
}

/// Conjunction of all gadget fragments over one variable range.
pub fn combine(gadgets: &[GadgetInstance]) -> CnfFormula {
    let n = gadgets.iter().map(|g| g.formula_fragment.num_vars()).max().unwrap_or(0);
    gadgets.iter().fold(CnfFormula::empty(n), |acc, g| acc.conjoin(&g.formula_fragment)).with_origin(Origin::Gadget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{enumerate_solutions, restrict_to_coords, DEFAULT_CAP};
    use crate::homology::{betti_numbers, betti_of_solutions};

    #[test]
    fn allocator_is_ascending() {
        let mut a = VarAllocator::new(3);
        assert_eq!(a.fresh(), 4);
        assert_eq!(a.fresh_block(2), vec![5, 6]);
        assert_eq!(a.used(), 6);
    }

    #[test]
    fn gadget_b_local_hexagon() {
        let g = make_gadget_b(0, &mut VarAllocator::new(0));
        assert_eq!(g.formula_fragment.clauses().len(), 2);
        let s = enumerate_solutions(&g.formula_fragment, DEFAULT_CAP).unwrap();
        let local = restrict_to_coords(&s, &g.support).unwrap();
        let k = build_full_complex(&local);
        assert_eq!(&k.face_counts()[..3], &[6, 6, 0]);
        assert_eq!(betti_numbers(&k, 1, false).unwrap().betti, vec![1, 1]);
        assert_eq!(g.canonical_cycle.as_ref().unwrap().len(), 6);
    }

    #[test]
    fn two_gadget_b_make_a_torus() {
        let mut alloc = VarAllocator::new(0);
        let gs = [make_gadget_b(0, &mut alloc), make_gadget_b(1, &mut alloc)];
        let s = enumerate_solutions(&combine(&gs), DEFAULT_CAP).unwrap();
        assert_eq!(betti_of_solutions(&s, 3).betti, vec![1, 2, 1, 0]);
    }

    #[test]
    fn forcing_u_cuts_the_hexagon() {
        let mut g = make_gadget_b(0, &mut VarAllocator::new(0));
        g.formula_fragment.push_clause(Clause::new(vec![g.support[0] as i32]).unwrap());
        let s = enumerate_solutions(&g.formula_fragment, DEFAULT_CAP).unwrap();
        assert_eq!(betti_of_solutions(&s, 1).betti, vec![1, 0]);
    }

    #[test]
    fn ring_gadget_shape() {
        let g = make_ring_gadget(0, &mut VarAllocator::new(0));
        assert_eq!(g.support, (1..=9).collect::<Vec<_>>());
        assert_eq!(g.formula_fragment.clauses().len(), 8);
        assert!(g.formula_fragment.clauses().iter().all(|c| c.width() == 3));
        assert_eq!(g.cycle_support(), vec![1, 2, 3, 4, 5]);
        assert_eq!(g.cycle_patterns(), vec!["*000*0100", "1*00*0100", "11*0*0100", "111**0100"]);
        assert_eq!(ring_y_edges().len(), 8);
    }

    #[test]
    fn ring_solution_set_is_two_cubes() {
        // The enable group forces b = 1 and the equality group forces u = v,
        // leaving y1..y4, a, c free on each of the two (u, v) sheets.
        let g = make_ring_gadget(0, &mut VarAllocator::new(0));
        let s = enumerate_solutions(&g.formula_fragment, DEFAULT_CAP).unwrap();
        assert_eq!(s.len(), 128);
        assert_eq!(betti_of_solutions(&s, 3).betti, vec![2, 0, 0, 0]);
    }
}
