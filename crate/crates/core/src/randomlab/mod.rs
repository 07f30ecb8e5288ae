//! Random 3-SAT face statistics, Monte-Carlo checks, solution sampling,
//! Vietoris–Rips persistence and clause-density sweeps.

mod persistence;
mod sample;
mod sweep;

pub use persistence::{
    eps_preset_log, vr_persistence, Barcode, DEFAULT_EPS_GRID, MAX_VR_DIM, MAX_VR_POINTS, MAX_VR_SIMPLICES,
};
pub use sample::{mcmc_sample, McmcSample, WALKSAT_NOISE};
pub use sweep::{shattering_sweep, sweep_csv, SweepRow, SWEEP_CSV_HEADER};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::complex::{subsets, ComplexError};
use crate::formula::{random_ksat, FormulaError};

/// Largest `n` for exhaustive face counting.
pub const MAX_EXHAUSTIVE_N: usize = 14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RandomLabError {
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("phi has no sign change on the probe grid at alpha = {alpha}")]
    NoBracket { alpha: f64 },
    #[error("{what} is {found}, limit is {limit}")]
    CapExceeded { what: &'static str, found: usize, limit: usize },
    #[error("trials must be at least 1")]
    ZeroTrials,
    #[error("no satisfying assignment found within {steps} flips")]
    NoSolutionFound { steps: u64 },
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Seed of trial `index` in a run seeded with `seed`: the first word of the
/// ChaCha8 stream `index` under `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FaceStatParams {
    pub n: usize,
    pub k: usize,
    pub m: usize,
}

impl FaceStatParams {
    pub fn new(n: usize, k: usize, m: usize) -> Result<Self, RandomLabError> {
        if k > n {
            return Err(RandomLabError::InvalidRange(format!("k = {k} exceeds n = {n}")));
        }
        Ok(Self { n, k, m })
    }

    pub fn alpha(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    pub fn gamma(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QMode {
    Exact,
    Limit,
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `C(n, k) 2^(n-k)`, the number of k-subcubes of the n-cube.
pub fn face_count(n: usize, k: usize) -> f64 {
    binomial(n, k) * 2f64.powi((n - k) as i32)
}

/// Probability that one uniform 3-clause forbids a fixed k-subcube of the
/// n-cube: `t` of its variables land on fixed coordinates and all `t` of
/// those literals must be false.
pub fn q_exact(n: usize, k: usize) -> Result<f64, RandomLabError> {
    if n < 3 {
        return Err(RandomLabError::InvalidRange(format!("n = {n} is below the clause width 3")));
    }
    if k > n {
        return Err(RandomLabError::InvalidRange(format!("k = {k} exceeds n = {n}")));
    }
    let total = binomial(n, 3);
    Ok((0..=3).map(|t| binomial(n - k, t) * binomial(k, 3 - t) / total * 0.5f64.powi(t as i32)).sum())
}

/// `q(γ) = Σ_t C(3,t) (1-γ)^t γ^(3-t) 2^(-t)`.
pub fn q_limit(gamma: f64) -> Result<f64, RandomLabError> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(RandomLabError::InvalidRange(format!("gamma = {gamma} outside [0, 1]")));
    }
    Ok((0..=3)
        .map(|t| binomial(3, t) * (1.0 - gamma).powi(t as i32) * gamma.powi(3 - t as i32) * 0.5f64.powi(t as i32))
        .sum())
}

pub fn clause_forbid_prob(p: &FaceStatParams, mode: QMode) -> Result<f64, RandomLabError> {
    match mode {
        QMode::Exact => q_exact(p.n, p.k),
        QMode::Limit => q_limit(p.gamma()),
    }
}

/// `E[X_k] = C(n,k) 2^(n-k) (1 - q_{k,n})^m`.
pub fn expected_faces(p: &FaceStatParams) -> Result<f64, RandomLabError> {
    let q = q_exact(p.n, p.k)?;
    Ok(face_count(p.n, p.k) * (1.0 - q).powi(p.m as i32))
}

/// Binary entropy in nats, with `H(0) = H(1) = 0`.
pub fn binary_entropy(gamma: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.ln() };
    term(gamma) + term(1.0 - gamma)
}

/// `Φ(γ; α) = H(γ) + (1-γ) ln 2 - α q(γ)`.
pub fn phi(gamma: f64, alpha: f64) -> Result<f64, RandomLabError> {
    Ok(binary_entropy(gamma) + (1.0 - gamma) * std::f64::consts::LN_2 - alpha * q_limit(gamma)?)
}

const PHI_GRID: usize = 1000;
const PHI_TOL: f64 = 1e-10;

/// Smallest root of `Φ(·; α)` in `[0, 1)`: the first sign change on a grid
/// of 1000 steps, refined by bisection to `1e-10`.
pub fn phi_root(alpha: f64) -> Result<f64, RandomLabError> {
    let f = |g: f64| phi(g, alpha).expect("grid stays in [0, 1]");
    let grid: Vec<f64> = (0..=PHI_GRID).map(|i| i as f64 / PHI_GRID as f64).collect();
    let (mut lo, mut hi) = grid
        .windows(2)
        .find(|w| f(w[0]) == 0.0 || f(w[0]).signum() != f(w[1]).signum())
        .map(|w| (w[0], w[1]))
        .ok_or(RandomLabError::NoBracket { alpha })?;
    if f(lo) == 0.0 {
        return Ok(lo);
    }
    let lo_sign = f(lo).signum();
    while hi - lo > PHI_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurvivalVariant {
    /// Survival indicator of the face varying coordinates `1..=k` at base 0.
    Fixed,
    /// Number of surviving k-faces, counted over all candidates.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let t = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / t;
        let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t - 1.0) } else { 0.0 };
        Self { mean, stderr: (var / t).sqrt(), trials: xs.len() }
    }

    /// `|mean - target|` in standard errors (infinite when the error is zero
    /// and the mean is off target).
    pub fn sigmas_from(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }
}

/// Surviving k-faces over `trials` random 3-CNF formulas with `m` clauses.
/// Trial `i` uses the formula seeded by `derive_seed(seed, i)`.
pub fn mc_face_survival(
    p: &FaceStatParams,
    trials: usize,
    seed: u64,
    variant: SurvivalVariant,
) -> Result<Estimate, RandomLabError> {
    if trials == 0 {
        return Err(RandomLabError::ZeroTrials);
    }
    if p.n < 3 {
        return Err(RandomLabError::InvalidRange(format!("n = {} is below the clause width 3", p.n)));
    }
    if variant == SurvivalVariant::Exhaustive && p.n > MAX_EXHAUSTIVE_N {
        return Err(RandomLabError::CapExceeded { what: "n", found: p.n, limit: MAX_EXHAUSTIVE_N });
    }
    if p.n > 64 {
        return Err(RandomLabError::CapExceeded { what: "n", found: p.n, limit: 64 });
    }
    let free_masks: Vec<u64> = match variant {
        SurvivalVariant::Fixed => vec![(1u64 << p.k) - 1],
        SurvivalVariant::Exhaustive => masks_of_weight(p.n, p.k),
    };
    let full = if p.n == 64 { u64::MAX } else { (1u64 << p.n) - 1 };
    let samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let f = random_ksat(p.n, p.m, 3, derive_seed(seed, i)).expect("k = 3 <= n").compile();
            let count: usize = match variant {
                SurvivalVariant::Fixed => usize::from(!f.forbids_subcube(free_masks[0], 0)),
                SurvivalVariant::Exhaustive => free_masks
                    .iter()
                    .map(|&free| subsets(full & !free).filter(|&b| !f.forbids_subcube(free, b)).count())
                    .sum(),
            };
            count as f64
        })
        .collect();
    Ok(Estimate::from_samples(&samples))
}

/// All `n`-bit masks with exactly `k` bits set, ascending.
fn masks_of_weight(n: usize, k: usize) -> Vec<u64> {
    (0..1u64 << n).filter(|m| m.count_ones() as usize == k).collect()
}
