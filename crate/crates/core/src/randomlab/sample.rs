use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::RandomLabError;
use crate::complex::bits;
use crate::formula::CnfFormula;

/// Probability of a random walk move instead of a greedy one.
pub const WALKSAT_NOISE: f64 = 0.5;

/// Flips allowed per recorded sample, per variable.
const FLIPS_PER_VAR: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct McmcSample {
    pub n: usize,
    /// Recorded solutions in the order found; repeats are kept.
    pub points: Vec<u64>,
    /// Flips plus restarts.
    pub steps: u64,
}

/// `count` satisfying assignments from a WalkSAT chain. The chain starts at a
/// uniform random assignment, records each solution it reaches once the
/// first `burn_in` steps (flips or restarts) are spent, and restarts from a
/// fresh uniform assignment after every solution. The recorded measure is not uniform
/// over the solution set.
///
/// Fails with `NoSolutionFound` when `10^4 (n + 1)` flips pass without a
/// recorded solution.
pub fn mcmc_sample(f: &CnfFormula, count: usize, burn_in: u64, seed: u64) -> Result<McmcSample, RandomLabError> {
    let n = f.num_vars();
    if n > 64 {
        return Err(RandomLabError::CapExceeded { what: "num_vars", found: n, limit: 64 });
    }
    let masks: Vec<(u64, u64)> = f.compile().clause_masks().collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let budget = FLIPS_PER_VAR * (n as u64 + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let true_lits = |x: u64, (p, q): (u64, u64)| (x & p) | (!x & q);
    let mut x = rng.gen::<u64>() & full;
    let mut steps = 0u64;
    let mut since_last = 0u64;
    let mut points = Vec::with_capacity(count);
    let mut unsat = Vec::new();
    while points.len() < count {
        unsat.clear();
        unsat.extend((0..masks.len()).filter(|&c| true_lits(x, masks[c]) == 0));
        if unsat.is_empty() {
            if steps >= burn_in {
                points.push(x);
                since_last = 0;
            }
            x = rng.gen::<u64>() & full;
            steps += 1;
            continue;
        }
        if since_last >= budget {
            return Err(RandomLabError::NoSolutionFound { steps: since_last });
        }
        let (p, q) = masks[unsat[rng.gen_range(0..unsat.len())]];
        let vars: Vec<usize> = bits(p | q).collect();
        let v = if rng.gen_bool(WALKSAT_NOISE) {
            vars[rng.gen_range(0..vars.len())]
        } else {
            let breaks = |v: usize| masks.iter().filter(|&&c| true_lits(x, c) == 1 << v).count();
            let best = vars.iter().map(|&v| breaks(v)).min().expect("clauses are nonempty");
            let ties: Vec<usize> = vars.into_iter().filter(|&v| breaks(v) == best).collect();
            ties[rng.gen_range(0..ties.len())]
        };
        x ^= 1 << v;
        steps += 1;
        since_last += 1;
    }
    Ok(McmcSample { n, points, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{enumerate_solutions, DEFAULT_CAP};
    use crate::formula::{circle_formula, Origin};

    #[test]
    fn circle_samples_are_solutions() {
        let f = circle_formula();
        let sol = enumerate_solutions(&f, DEFAULT_CAP).unwrap();
        let s = mcmc_sample(&f, 100, 10, 3).unwrap();
        assert_eq!(s.points.len(), 100);
        assert!(s.points.iter().all(|&w| sol.contains(w)));
        assert_eq!(s, mcmc_sample(&f, 100, 10, 3).unwrap());
    }

    #[test]
    fn unsatisfiable_exhausts_budget() {
        let f = CnfFormula::from_lits(1, &[&[1], &[-1]], Origin::Generated).unwrap();
        assert!(matches!(mcmc_sample(&f, 1, 0, 1), Err(RandomLabError::NoSolutionFound { .. })));
    }

    #[test]
    fn empty_formula_is_near_uniform() {
        let s = mcmc_sample(&CnfFormula::empty(8), 10_000, 0, 5).unwrap();
        for i in 0..8 {
            let mean = s.points.iter().filter(|&&w| w >> i & 1 == 1).count() as f64 / 1e4;
            assert!((0.45..=0.55).contains(&mean), "coordinate {i}: {mean}");
        }
    }
}
