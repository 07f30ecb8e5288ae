use rand::{seq::index, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Clause, CnfFormula, FormulaError, Origin};

/// Uniform random k-CNF: each of the `m` clauses draws `k` distinct variables
/// uniformly and negates each literal with probability 1/2. Clauses are drawn
/// independently, so repeats across the formula are possible.
///
/// Literals are listed in ascending variable order. The same `(n, m, k, seed)`
/// always produces the same formula.
pub fn random_ksat(n: usize, m: usize, k: usize, seed: u64) -> Result<CnfFormula, FormulaError> {
    if k > n {
        return Err(FormulaError::WidthExceedsVars { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clauses = Vec::with_capacity(m);
    for _ in 0..m {
        let mut vars = index::sample(&mut rng, n, k).into_vec();
        vars.sort_unstable();
        let lits = vars
            .into_iter()
            .map(|v| {
                let var = (v + 1) as i32;
                if rng.gen::<bool>() {
                    -var
                } else {
                    var
                }
            })
            .collect();
        clauses.push(Clause::new(lits)?);
    }
    CnfFormula::new(n, clauses, Origin::Generated)
}
