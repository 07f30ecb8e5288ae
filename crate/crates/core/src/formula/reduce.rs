//! Formula-to-formula reductions that keep the original variables `1..=n`
//! and append fresh variables in one ascending block.

use std::collections::HashMap;

use serde::Serialize;

use super::{Clause, CnfFormula, FormulaError, Origin};

/// Per original clause, the auxiliary variables introduced for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuxMap {
    pub original_vars: usize,
    pub per_clause: Vec<Vec<usize>>,
}

impl AuxMap {
    pub fn is_empty(&self) -> bool {
        self.per_clause.iter().all(Vec::is_empty)
    }

    pub fn aux_count(&self) -> usize {
        self.per_clause.iter().map(Vec::len).sum()
    }
}

/// Replaces every clause of width `m > 3` by the chain
/// `(l1 ∨ l2 ∨ a1) ∧ (¬a1 ∨ l3 ∨ a2) ∧ … ∧ (¬a_k ∨ l_{m-1} ∨ l_m)` with
/// `k = m - 3` fresh auxiliaries. Narrower clauses pass through untouched.
/// Auxiliaries are never shared between chains.
pub fn split_to_3cnf(f: &CnfFormula) -> (CnfFormula, AuxMap) {
    let mut next = f.num_vars() + 1;
    let mut clauses = Vec::with_capacity(f.clauses().len());
    let mut per_clause = Vec::with_capacity(f.clauses().len());
    for c in f.clauses() {
        let lits = c.lits();
        let m = lits.len();
        if m <= 3 {
            clauses.push(c.clone());
            per_clause.push(Vec::new());
            continue;
        }
        let aux: Vec<usize> = (next..next + m - 3).collect();
        next += m - 3;
        let a = |i: usize| aux[i] as i32;
        clauses.push(clause(vec![lits[0], lits[1], a(0)]));
        for j in 1..aux.len() {
            clauses.push(clause(vec![-a(j - 1), lits[j + 1], a(j)]));
        }
        clauses.push(clause(vec![-a(aux.len() - 1), lits[m - 2], lits[m - 1]]));
        per_clause.push(aux);
    }
    let out = CnfFormula::new(next - 1, clauses, Origin::Reduced).expect("indices allocated in range");
    (out, AuxMap { original_vars: f.num_vars(), per_clause })
}

/// Pads clauses of width 1 and 2 up to width 3 with fresh bits:
/// `(a ∨ b)` becomes `(a ∨ b ∨ p) ∧ (a ∨ b ∨ ¬p)`, and a unit clause uses two
/// pad bits and four clauses. The solution set becomes `S × {0,1}^pads`.
/// Wider clauses are left alone; combine with [`split_to_3cnf`] for pure 3-CNF.
pub fn pad_to_3cnf(f: &CnfFormula) -> (CnfFormula, AuxMap) {
    let mut next = f.num_vars() + 1;
    let mut clauses = Vec::new();
    let mut per_clause = Vec::with_capacity(f.clauses().len());
    for c in f.clauses() {
        let need = 3usize.saturating_sub(c.width());
        let pads: Vec<usize> = (next..next + need).collect();
        next += need;
        let mut partial: Vec<Vec<i32>> = vec![c.lits().to_vec()];
        for &p in &pads {
            partial = partial
                .into_iter()
                .flat_map(|l| {
                    let mut pos = l.clone();
                    pos.push(p as i32);
                    let mut neg = l;
                    neg.push(-(p as i32));
                    [pos, neg]
                })
                .collect();
        }
        clauses.extend(partial.into_iter().map(clause));
        per_clause.push(pads);
    }
    let out = CnfFormula::new(next - 1, clauses, Origin::Reduced).expect("indices allocated in range");
    (out, AuxMap { original_vars: f.num_vars(), per_clause })
}

/// One gadget-local copy introduced by [`localize_auxiliaries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VarCopy {
    pub base: usize,
    pub gadget: usize,
    pub copy: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CopyMap {
    pub copies: Vec<VarCopy>,
}

/// Variable duplication: every variable used by clauses of more than one
/// gadget is replaced inside each gadget by a fresh copy `x^(j)`, and the
/// equality pair `(x ∨ ¬x^(j)) ∧ (¬x ∨ x^(j))` is appended per copy.
///
/// `gadget_of[i]` is the gadget id of clause `i`. Copies are allocated in
/// clause order after the original variables; equality clauses follow the
/// gadget clauses in allocation order.
pub fn localize_auxiliaries(f: &CnfFormula, gadget_of: &[usize]) -> Result<(CnfFormula, CopyMap), FormulaError> {
    if gadget_of.len() != f.clauses().len() {
        return Err(FormulaError::IncompletePartition { clauses: f.clauses().len(), partition: gadget_of.len() });
    }
    let mut owners: HashMap<usize, Vec<usize>> = HashMap::new();
    for (c, &g) in f.clauses().iter().zip(gadget_of) {
        for v in c.vars() {
            let list = owners.entry(v).or_default();
            if !list.contains(&g) {
                list.push(g);
            }
        }
    }
    let shared = |v: usize| owners.get(&v).is_some_and(|g| g.len() > 1);

    let mut next = f.num_vars() + 1;
    let mut copy_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut map = CopyMap::default();
    let mut clauses = Vec::with_capacity(f.clauses().len());
    for (c, &g) in f.clauses().iter().zip(gadget_of) {
        let lits = c
            .lits()
            .iter()
            .map(|&l| {
                let v = l.unsigned_abs() as usize;
                if !shared(v) {
                    return l;
                }
                let copy = *copy_of.entry((v, g)).or_insert_with(|| {
                    let idx = next;
                    next += 1;
                    map.copies.push(VarCopy { base: v, gadget: g, copy: idx });
                    idx
                });
                l.signum() * copy as i32
            })
            .collect();
        clauses.push(clause(lits));
    }
    for vc in &map.copies {
        let (x, y) = (vc.base as i32, vc.copy as i32);
        clauses.push(clause(vec![x, -y]));
        clauses.push(clause(vec![-x, y]));
    }
    let origin = if map.copies.is_empty() { f.origin() } else { Origin::Reduced };
    let out = CnfFormula::new(next - 1, clauses, origin).expect("indices allocated in range");
    Ok((out, map))
}

fn clause(lits: Vec<i32>) -> Clause {
    Clause::new(lits).expect("reduction emits distinct variables")
}
