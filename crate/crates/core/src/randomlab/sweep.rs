use rayon::prelude::*;
use serde::Serialize;

use super::{derive_seed, RandomLabError};
use crate::complex::{build_complex, components, enumerate_solutions, DEFAULT_CAP};
use crate::formula::random_ksat;

pub const SWEEP_CSV_HEADER: &str = "alpha,trials,satisfiable,mean_solution_count,mean_beta0,mean_min_separation,seed";

/// Per-density averages. Means run over satisfiable draws; the separation
/// mean runs over draws with at least two clusters and is `None` when there
/// were none.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub trials: usize,
    pub satisfiable: usize,
    pub mean_solution_count: Option<f64>,
    pub mean_beta0: Option<f64>,
    pub mean_min_separation: Option<f64>,
    pub seed: u64,
}

struct Draw {
    solutions: usize,
    clusters: usize,
    min_separation: Option<u32>,
}

/// Random 3-SAT over `n` variables with `round(alpha n)` clauses, `trials`
/// draws per density. The draw `t` at grid position `a` uses seed
/// `derive_seed(seed, a * trials + t)`.
pub fn shattering_sweep(
    n: usize,
    alpha_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<SweepRow>, RandomLabError> {
    if trials == 0 {
        return Err(RandomLabError::ZeroTrials);
    }
    if n > DEFAULT_CAP {
        return Err(RandomLabError::CapExceeded { what: "n", found: n, limit: DEFAULT_CAP });
    }
    if n < 3 {
        return Err(RandomLabError::InvalidRange(format!("n = {n} is below the clause width 3")));
    }
    if let Some(a) = alpha_grid.iter().find(|a| !a.is_finite() || **a < 0.0) {
        return Err(RandomLabError::InvalidRange(format!("alpha = {a} must be finite and nonnegative")));
    }
    alpha_grid
        .iter()
        .enumerate()
        .map(|(ai, &alpha)| {
            let m = (alpha * n as f64).round() as usize;
            let draws: Vec<Draw> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let f = random_ksat(n, m, 3, derive_seed(seed, (ai * trials + t) as u64))?;
                    let s = enumerate_solutions(&f, DEFAULT_CAP)?;
                    if s.is_empty() {
                        return Ok(Draw { solutions: 0, clusters: 0, min_separation: None });
                    }
                    let parts = components(&build_complex(&s, 1)?)?;
                    Ok(Draw { solutions: s.len(), clusters: parts.len(), min_separation: parts.min_separation() })
                })
                .collect::<Result<_, RandomLabError>>()?;
            let sat: Vec<&Draw> = draws.iter().filter(|d| d.solutions > 0).collect();
            let mean = |xs: Vec<f64>| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
            Ok(SweepRow {
                alpha,
                trials,
                satisfiable: sat.len(),
                mean_solution_count: mean(sat.iter().map(|d| d.solutions as f64).collect()),
                mean_beta0: mean(sat.iter().map(|d| d.clusters as f64).collect()),
                mean_min_separation: mean(sat.iter().filter_map(|d| d.min_separation.map(f64::from)).collect()),
                seed,
            })
        })
        .collect()
}

/// CSV with a header line; missing means are empty fields.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.alpha,
            r.trials,
            r.satisfiable,
            opt(r.mean_solution_count),
            opt(r.mean_beta0),
            opt(r.mean_min_separation),
            r.seed
        ));
    }
    out
}
