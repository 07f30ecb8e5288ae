use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{
    corner_table, face_pattern, make_ring_gadget, ring_squares, ring_y_edges, CornerTable, GadgetError, GadgetInstance,
    GadgetKind, VarAllocator, PRINTED_RING_INCIDENCE, RING_ROLES,
};
use crate::complex::{build_complex, build_full_complex, enumerate_solutions, restrict_to_coords, Face, SolutionSet};
use crate::formula::{Clause, CnfFormula};
use crate::homology::{
    betti_numbers, betti_of_solutions, boundary_matrix, classify_chain, homology_independence, F2Chain, F2Matrix,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetCertificate {
    pub index: usize,
    pub kind: GadgetKind,
    pub support: Vec<usize>,
    pub cycle_dim: usize,
    pub support_disjoint: bool,
    /// The designated chain is specified and every face lies in the local complex.
    pub faces_present: bool,
    pub canonical_is_cycle: bool,
    pub non_bounding: bool,
    /// No one-dimension-higher cube of the local solution set contains a chain face.
    pub no_filling_cube: bool,
    pub local_betti: Vec<usize>,
    pub local_rank: usize,
    pub canonical_cycle: Vec<String>,
}

impl GadgetCertificate {
    pub fn passed(&self) -> bool {
        self.support_disjoint
            && self.faces_present
            && self.canonical_is_cycle
            && self.non_bounding
            && self.no_filling_cube
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JointMethod {
    FullComplex,
    LocalUnion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    pub gadgets: Vec<GadgetCertificate>,
    pub joint_method: JointMethod,
    pub joint_rank: usize,
    pub joint_independent: bool,
    /// Betti numbers of the whole formula's solution complex up to the
    /// largest cycle dimension, when it fits the cap.
    pub full_complex_betti: Option<Vec<usize>>,
    /// The whole formula exceeded the cap; local complexes came from the
    /// gadget fragments alone.
    pub local_only: bool,
    pub all_passed: bool,
}

/// Certifies each gadget's designated chain in its local complex (the
/// projection of the solution set onto the gadget support) and then the
/// joint independence of all chains.
///
/// Joint independence runs on the full complex when the formula fits `cap`
/// and every chain lifts into it at the smallest solution; otherwise it is
/// the direct sum of the local ranks.
pub fn verify_gadget_family(
    f: &CnfFormula,
    gadgets: &[GadgetInstance],
    cap: usize,
) -> Result<CertificateReport, GadgetError> {
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for g in gadgets {
        for &v in &g.support {
            if let Some(&first) = owner.get(&v) {
                return Err(GadgetError::OverlappingSupports { var: v, first, second: g.index });
            }
            owner.insert(v, g.index);
        }
    }
    let full = enumerate_solutions(f, cap).ok();
    let locals: Vec<SolutionSet> = gadgets
        .iter()
        .map(|g| match &full {
            Some(s) => restrict_to_coords(s, &g.support),
            None => {
                let own = enumerate_solutions(&g.formula_fragment, cap)?;
                restrict_to_coords(&own, &g.support)
            }
        })
        .collect::<Result<_, _>>()?;
    let certs: Vec<GadgetCertificate> =
        gadgets.par_iter().zip(&locals).map(|(g, s)| certify_local(g, s)).collect::<Result<_, _>>()?;

    let max_dim = gadgets.iter().map(|g| g.cycle_dim).max().unwrap_or(0);
    let full_complex_betti = full.as_ref().map(|s| betti_of_solutions(s, max_dim).betti);
    let lifted = full.as_ref().and_then(|s| lift_all(s, gadgets));
    let (joint_method, joint_rank) = match (&full, lifted) {
        (Some(s), Some(chains)) => (JointMethod::FullComplex, joint_rank_full(s, gadgets, &chains)?),
        _ => (JointMethod::LocalUnion, certs.iter().map(|c| c.local_rank).sum()),
    };
    let joint_independent = joint_rank == gadgets.len();
    let all_passed = joint_independent && certs.iter().all(GadgetCertificate::passed);
    Ok(CertificateReport {
        gadgets: certs,
        joint_method,
        joint_rank,
        joint_independent,
        full_complex_betti,
        local_only: full.is_none(),
        all_passed,
    })
}

fn certify_local(g: &GadgetInstance, local: &SolutionSet) -> Result<GadgetCertificate, GadgetError> {
    let k = build_full_complex(local);
    let local_betti = betti_numbers(&k, g.cycle_dim.min(k.max_dim()), false)?.betti;
    let patterns = g.cycle_patterns();
    let mut cert = GadgetCertificate {
        index: g.index,
        kind: g.kind,
        support: g.support.clone(),
        cycle_dim: g.cycle_dim,
        support_disjoint: true,
        faces_present: false,
        canonical_is_cycle: false,
        non_bounding: false,
        no_filling_cube: false,
        local_betti,
        local_rank: 0,
        canonical_cycle: patterns,
    };
    let Some(faces) = &g.canonical_cycle else {
        return Ok(cert);
    };
    cert.no_filling_cube = faces.iter().all(|f| {
        (0..local.n()).filter(|&b| f.free >> b & 1 == 0).all(|b| {
            let cube = Face { free: f.free | 1 << b, base: f.base & !(1 << b) };
            let filled = cube.corners().all(|w| local.contains(w));
            !filled
        })
    });
    let Ok(chain) = F2Chain::from_faces(&k, g.cycle_dim, faces) else {
        return Ok(cert);
    };
    cert.faces_present = true;
    let class = classify_chain(&k, &chain)?;
    cert.canonical_is_cycle = class.is_cycle;
    cert.non_bounding = class.is_cycle && !class.is_boundary;
    if class.is_cycle {
        cert.local_rank = homology_independence(&k, &[chain])?.rank;
    }
    Ok(cert)
}

/// Global faces for every designated chain, with non-support coordinates
/// taken from the smallest solution; `None` if some face leaves the solution set.
fn lift_all(s: &SolutionSet, gadgets: &[GadgetInstance]) -> Option<Vec<Vec<Face>>> {
    let &x0 = s.members().first()?;
    gadgets
        .iter()
        .map(|g| {
            let faces = g.canonical_cycle.as_ref()?;
            let support_mask = g.support.iter().fold(0u64, |m, &v| m | 1 << (v - 1));
            faces
                .iter()
                .map(|f| {
                    let map = |local: u64| {
                        g.support.iter().enumerate().fold(0u64, |w, (j, &v)| w | (local >> j & 1) << (v - 1))
                    };
                    let lifted = Face { free: map(f.free), base: (x0 & !support_mask) | map(f.base) };
                    let inside = lifted.corners().all(|w| s.contains(w));
                    inside.then_some(lifted)
                })
                .collect()
        })
        .collect()
}

fn joint_rank_full(s: &SolutionSet, gadgets: &[GadgetInstance], lifted: &[Vec<Face>]) -> Result<usize, GadgetError> {
    let dim = gadgets.iter().map(|g| g.cycle_dim).max().unwrap_or(0);
    if gadgets.iter().any(|g| g.cycle_dim != dim) {
        return Ok(0);
    }
    let k = build_complex(s, (dim + 1).min(s.n()))?;
    let chains: Vec<F2Chain> =
        lifted.iter().map(|faces| F2Chain::from_faces(&k, dim, faces)).collect::<Result<_, _>>()?;
    match homology_independence(&k, &chains) {
        Ok(ind) => Ok(ind.rank),
        Err(crate::homology::HomologyError::NotACycle { .. }) => Ok(0),
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RingCertificate {
    pub printed_matrix: String,
    pub printed_rank: usize,
    pub printed_nullity: usize,
    /// `∂2` of the complex spanned by the four designated squares, restricted
    /// to their eight y-edges in (y index, u value) row order.
    pub reconstructed_matrix: String,
    pub reconstructed_rank: usize,
    pub reconstructed_nullity: usize,
    pub reconstructed_matches_printed: bool,
    /// Every corner of every designated square satisfies the gadget.
    pub squares_in_solution_set: bool,
    /// Classification of `σ1 + σ2 + σ3 + σ4` in the complex spanned by the squares.
    pub ring_chain_is_cycle: bool,
    pub ring_chain_is_boundary: bool,
    pub corner_table: CornerTable,
    /// Satisfiable after adding the unit clause `¬b`.
    pub satisfiable_with_b_zero: bool,
    pub solution_count: usize,
    pub betti: Vec<usize>,
    pub family: CertificateReport,
}

/// Checks one ring gadget against its printed incidence matrix and corner table.
pub fn ring_certificate(cap: usize) -> Result<RingCertificate, GadgetError> {
    let g = make_ring_gadget(0, &mut VarAllocator::new(0));
    let f = &g.formula_fragment;
    let sol = enumerate_solutions(f, cap)?;
    let printed = printed_ring_matrix();

    let squares = ring_squares();
    let corners: Vec<u64> = squares.iter().flat_map(|s| s.corners().collect::<Vec<_>>()).collect();
    let span = build_full_complex(&SolutionSet::new(RING_ROLES.len(), corners));
    let d2 = boundary_matrix(&span, 2)?;
    let edge_index = span.index(1);
    let square_index = span.index(2);
    let rows: Vec<usize> = ring_y_edges().iter().map(|e| edge_index[e]).collect();
    let cols: Vec<usize> = squares.iter().map(|s| square_index[s]).collect();
    let reconstructed = d2.select_rows(&rows).select_columns(&cols);
    let chain = F2Chain::from_faces(&span, 2, &squares)?;
    let class = classify_chain(&span, &chain)?;

    let r = |name: &str| g.role(name).expect("ring role");
    let mut ctx = vec![Some(false); f.num_vars()];
    for v in ["y1", "u", "v"] {
        ctx[r(v) - 1] = None;
    }
    ctx[r("b") - 1] = Some(true);
    let table = corner_table(f, [r("y1"), r("u"), r("v")], &ctx)?;

    let mut disabled = f.clone();
    disabled.push_clause(Clause::new(vec![-(r("b") as i32)]).expect("unit clause"));
    let family = verify_gadget_family(f, std::slice::from_ref(&g), cap)?;
    Ok(RingCertificate {
        printed_matrix: printed.to_hex_dump(),
        printed_rank: printed.rank(),
        printed_nullity: printed.nullity(),
        reconstructed_matrix: reconstructed.to_hex_dump(),
        reconstructed_rank: reconstructed.rank(),
        reconstructed_nullity: reconstructed.nullity(),
        reconstructed_matches_printed: reconstructed.equal_up_to_permutation(&printed),
        squares_in_solution_set: squares.iter().all(|s| s.corners().all(|w| sol.contains(w))),
        ring_chain_is_cycle: class.is_cycle,
        ring_chain_is_boundary: class.is_boundary,
        corner_table: table,
        satisfiable_with_b_zero: !enumerate_solutions(&disabled, cap)?.is_empty(),
        solution_count: sol.len(),
        betti: betti_of_solutions(&sol, 3).betti,
        family,
    })
}

pub fn printed_ring_matrix() -> F2Matrix {
    let rows: Vec<Vec<u8>> = PRINTED_RING_INCIDENCE.iter().map(|r| r.to_vec()).collect();
    F2Matrix::from_rows(&rows)
}

/// Patterns of the designated squares, for reports.
pub fn ring_square_patterns() -> Vec<String> {
    ring_squares().iter().map(|f| face_pattern(f, RING_ROLES.len())).collect()
}
