#![allow(dead_code)]

use proptest::prelude::*;
use topocube::formula::{Assignment, Clause, CnfFormula, Origin};

/// Clause over distinct variables of `1..=n` with widths in `widths`.
pub fn clause_strategy(n: usize, widths: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Clause> {
    let hi = (*widths.end()).min(n);
    let lo = (*widths.start()).min(hi);
    proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), lo..=hi)
        .prop_flat_map(|vars| {
            let k = vars.len();
            (Just(vars), proptest::collection::vec(any::<bool>(), k))
        })
        .prop_map(|(vars, signs)| {
            let lits = vars.iter().zip(signs).map(|(&v, s)| if s { -(v as i32) } else { v as i32 }).collect();
            Clause::new(lits).unwrap()
        })
}

pub fn formula_strategy(
    n: std::ops::RangeInclusive<usize>,
    clauses: std::ops::Range<usize>,
    widths: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = CnfFormula> {
    n.prop_flat_map(move |n| {
        proptest::collection::vec(clause_strategy(n, widths.clone()), clauses.clone())
            .prop_map(move |cs| CnfFormula::new(n, cs, Origin::Generated).unwrap())
    })
}

/// Solutions by evaluating every assignment through the unpacked evaluator.
pub fn brute_solutions(f: &CnfFormula) -> Vec<u64> {
    let n = f.num_vars();
    (0..1u64 << n).filter(|&w| f.evaluate(&Assignment::from_word(n, w)).unwrap()).collect()
}

/// Every (free, base) subcube of dimension `k` with all corners in `sol`,
/// tested candidate by candidate.
pub fn naive_faces(n: usize, sol: &[u64], k: usize) -> Vec<(u64, u64)> {
    let set: std::collections::HashSet<u64> = sol.iter().copied().collect();
    let mut out = Vec::new();
    for free in 0..1u64 << n {
        if free.count_ones() as usize != k {
            continue;
        }
        for base in 0..1u64 << n {
            if base & free != 0 {
                continue;
            }
            let mut all = true;
            let mut s = free;
            loop {
                if !set.contains(&(base | s)) {
                    all = false;
                    break;
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & free;
            }
            if all {
                out.push((free, base));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Proper 3-colourings exist, by trying all `3^|V|` colourings.
pub fn brute_three_colorable(n: usize, edges: &[(usize, usize)]) -> bool {
    let total = 3usize.pow(n as u32);
    (0..total).any(|mut code| {
        let mut color = vec![0; n];
        for c in color.iter_mut() {
            *c = code % 3;
            code /= 3;
        }
        edges.iter().all(|&(a, b)| color[a] != color[b])
    })
}

/// Plain DPLL with unit propagation, used where enumeration is too large.
pub fn dpll_satisfiable(f: &CnfFormula) -> bool {
    let clauses: Vec<Vec<i32>> = f.clauses().iter().map(|c| c.lits().to_vec()).collect();
    let mut val = vec![0i8; f.num_vars() + 1];
    dpll(&clauses, &mut val)
}

fn dpll(clauses: &[Vec<i32>], val: &mut Vec<i8>) -> bool {
    let lit_val = |val: &[i8], l: i32| {
        let v = val[l.unsigned_abs() as usize];
        if l > 0 {
            v
        } else {
            -v
        }
    };
    let saved = val.clone();
    loop {
        let mut unit = None;
        for c in clauses {
            if c.iter().any(|&l| lit_val(val, l) == 1) {
                continue;
            }
            let open: Vec<i32> = c.iter().copied().filter(|&l| lit_val(val, l) == 0).collect();
            match open.len() {
                0 => {
                    *val = saved;
                    return false;
                }
                1 => {
                    unit = Some(open[0]);
                    break;
                }
                _ => {}
            }
        }
        match unit {
            Some(l) => val[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 },
            None => break,
        }
    }
    let Some(v) = (1..val.len()).find(|&v| val[v] == 0) else {
        return true;
    };
    for s in [1, -1] {
        val[v] = s;
        if dpll(clauses, val) {
            return true;
        }
        val[v] = 0;
    }
    *val = saved;
    false
}
